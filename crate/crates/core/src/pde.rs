//! The weighted Cauchy–Riemann system for a graph `(g + i y, f - i x)`, its
//! potential form
//! `(q+1)^2 (h_y^2 + x^2 + a1^2)^{q/(q+1)} h_xx + (p+1)^2 (h_x^2 + y^2 + a2^2)^{p/(p+1)} h_yy = 0`,
//! and a damped Newton solver for the Dirichlet problem on rectangles.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::linalg::BandMatrix;
use crate::surfaces::{Provenance, SurfaceGrid};
use crate::C2;

/// Scalar field on a uniform rectangular grid, stored row-major with `x` as
/// the fast index: `h[j * nx + i]` sits at `(x0 + i dx, y0 + j dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub h: Vec<f64>,
    pub p: u32,
    pub q: u32,
    pub a1: f64,
    pub a2: f64,
}

/// Exponents and regularizers of the potential equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub p: u32,
    pub q: u32,
    pub a1: f64,
    pub a2: f64,
}

impl Weights {
    pub fn new(p: u32, q: u32, a1: f64, a2: f64) -> Result<Self> {
        if !(a1 >= 0.0 && a2 >= 0.0 && a1.is_finite() && a2.is_finite()) {
            return Err(invalid("a1/a2", "regularizers must be finite and nonnegative"));
        }
        Ok(Self { p, q, a1, a2 })
    }

    fn kappa(k: u32) -> f64 {
        f64::from(k) / (f64::from(k) + 1.0)
    }

    /// Coefficient of `h_xx` and its derivative in `h_y`.
    fn xx(&self, hy: f64, x: f64) -> (f64, f64) {
        let c = (f64::from(self.q) + 1.0).powi(2);
        let k = Self::kappa(self.q);
        if self.q == 0 {
            return (c, 0.0);
        }
        let base = hy * hy + x * x + self.a1 * self.a1;
        let value = c * base.powf(k);
        (value, c * k * base.powf(k - 1.0) * 2.0 * hy)
    }

    /// Coefficient of `h_yy` and its derivative in `h_x`.
    fn yy(&self, hx: f64, y: f64) -> (f64, f64) {
        let c = (f64::from(self.p) + 1.0).powi(2);
        let k = Self::kappa(self.p);
        if self.p == 0 {
            return (c, 0.0);
        }
        let base = hx * hx + y * y + self.a2 * self.a2;
        let value = c * base.powf(k);
        (value, c * k * base.powf(k - 1.0) * 2.0 * hx)
    }
}

impl PotentialGrid {
    /// Grid on `[x0, x1] × [y0, y1]` with `shape = (nx, ny)` nodes, filled
    /// with `f(x, y)`.
    pub fn from_fn(
        weights: Weights,
        domain: [f64; 4],
        shape: (usize, usize),
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let [x0, x1, y0, y1] = domain;
        let (nx, ny) = shape;
        if nx < 3 || ny < 3 {
            return Err(invalid("shape", "grids need at least 3×3 nodes"));
        }
        if !(x1 > x0 && y1 > y0) || domain.iter().any(|v| !v.is_finite()) {
            return Err(invalid("domain", "expected finite x0 < x1 and y0 < y1"));
        }
        let dx = (x1 - x0) / (nx - 1) as f64;
        let dy = (y1 - y0) / (ny - 1) as f64;
        let mut h = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                h.push(f(x0 + i as f64 * dx, y0 + j as f64 * dy));
            }
        }
        Ok(Self {
            nx,
            ny,
            x0,
            y0,
            dx,
            dy,
            h,
            p: weights.p,
            q: weights.q,
            a1: weights.a1,
            a2: weights.a2,
        })
    }

    /// Boundary-only grid from dense edge values, each ordered by increasing
    /// coordinate: `bottom`/`top` have `nx` entries, `left`/`right` have `ny`.
    /// Shared corners must agree; the interior is zero.
    pub fn from_edges(
        weights: Weights,
        domain: [f64; 4],
        edges: [&[f64]; 4],
    ) -> Result<Self> {
        let [bottom, top, left, right] = edges;
        let (nx, ny) = (bottom.len(), left.len());
        if top.len() != nx || right.len() != ny {
            return Err(invalid("edges", "bottom/top and left/right must have matching lengths"));
        }
        let mut grid = Self::from_fn(weights, domain, (nx, ny), |_, _| 0.0)?;
        let corners = [
            (bottom[0], left[0]),
            (bottom[nx - 1], right[0]),
            (top[0], left[ny - 1]),
            (top[nx - 1], right[ny - 1]),
        ];
        for (a, b) in corners {
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(invalid("edges", "edge values disagree at a corner"));
            }
        }
        for i in 0..nx {
            grid.h[i] = bottom[i];
            grid.h[(ny - 1) * nx + i] = top[i];
        }
        for j in 0..ny {
            grid.h[j * nx] = left[j];
            grid.h[j * nx + nx - 1] = right[j];
        }
        if grid.h.iter().any(|v| !v.is_finite()) {
            return Err(invalid("edges", "edge values must be finite"));
        }
        Ok(grid)
    }

    /// The four edges in the order accepted by `from_edges`.
    pub fn edges(&self) -> [Vec<f64>; 4] {
        let (nx, ny) = (self.nx, self.ny);
        [
            (0..nx).map(|i| self.at(i, 0)).collect(),
            (0..nx).map(|i| self.at(i, ny - 1)).collect(),
            (0..ny).map(|j| self.at(0, j)).collect(),
            (0..ny).map(|j| self.at(nx - 1, j)).collect(),
        ]
    }

    pub fn weights(&self) -> Weights {
        Weights {
            p: self.p,
            q: self.q,
            a1: self.a1,
            a2: self.a2,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.h[j * self.nx + i]
    }

    fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Residual of the potential equation at interior node `(i, j)`.
    fn residual_at(&self, i: usize, j: usize) -> f64 {
        let w = self.weights();
        let (c, l, r, d, u) = (
            self.at(i, j),
            self.at(i - 1, j),
            self.at(i + 1, j),
            self.at(i, j - 1),
            self.at(i, j + 1),
        );
        let hx = (r - l) / (2.0 * self.dx);
        let hy = (u - d) / (2.0 * self.dy);
        let hxx = (r - 2.0 * c + l) / (self.dx * self.dx);
        let hyy = (u - 2.0 * c + d) / (self.dy * self.dy);
        w.xx(hy, self.x(i)).0 * hxx + w.yy(hx, self.y(j)).0 * hyy
    }

    /// Largest absolute interior residual.
    pub fn max_residual(&self) -> f64 {
        potential_residual(self).iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Largest deviation from `f` over all nodes.
    pub fn max_deviation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.ny {
            for i in 0..self.nx {
                worst = worst.max((self.at(i, j) - f(self.x(i), self.y(j))).abs());
            }
        }
        worst
    }
}

/// Interior residual of the (regularized) potential equation, row-major on
/// the `(nx - 2) × (ny - 2)` interior.
pub fn potential_residual(grid: &PotentialGrid) -> Vec<f64> {
    let mut out = Vec::with_capacity((grid.nx - 2) * (grid.ny - 2));
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            out.push(grid.residual_at(i, j));
        }
    }
    out
}

/// `f = h_y`, `g = h_x` on the interior of a potential grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFields {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl GraphFields {
    pub fn from_fn(
        domain: [f64; 4],
        shape: (usize, usize),
        f: impl Fn(f64, f64) -> f64,
        g: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let w = Weights::new(0, 0, 0.0, 0.0)?;
        let fg = PotentialGrid::from_fn(w, domain, shape, f)?;
        let gg = PotentialGrid::from_fn(w, domain, shape, g)?;
        Ok(Self {
            nx: fg.nx,
            ny: fg.ny,
            x0: fg.x0,
            y0: fg.y0,
            dx: fg.dx,
            dy: fg.dy,
            f: fg.h,
            g: gg.h,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    /// `(g + i y, f - i x)` at every node, row-major.
    pub fn phi_hat(&self) -> Vec<C2> {
        let mut out = Vec::with_capacity(self.f.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                out.push([
                    Complex64::new(self.g[k], self.y(j)),
                    Complex64::new(self.f[k], -self.x(i)),
                ]);
            }
        }
        out
    }

    /// The graph `(g + i y, f - i x)` as a surface grid over `(x, y)`, with
    /// tangents from central differences of `f` and `g` on the interior.
    pub fn surface(&self, p: u32, q: u32, a1: f64, a2: f64) -> Result<SurfaceGrid> {
        if self.nx < 3 || self.ny < 3 {
            return Err(invalid("fields", "need at least 3×3 nodes"));
        }
        let phi = self.phi_hat();
        let (mut points, mut d_t, mut d_s) = (Vec::new(), Vec::new(), Vec::new());
        for i in 1..self.nx - 1 {
            for j in 1..self.ny - 1 {
                let k = j * self.nx + i;
                let d = |a: &[f64], o: usize, h: f64| (a[k + o] - a[k - o]) / (2.0 * h);
                points.push(phi[k]);
                d_t.push([
                    Complex64::new(d(&self.g, 1, self.dx), 0.0),
                    Complex64::new(d(&self.f, 1, self.dx), -1.0),
                ]);
                d_s.push([
                    Complex64::new(d(&self.g, self.nx, self.dy), 1.0),
                    Complex64::new(d(&self.f, self.nx, self.dy), 0.0),
                ]);
            }
        }
        SurfaceGrid::new(
            (1..self.nx - 1).map(|i| self.x(i)).collect(),
            (1..self.ny - 1).map(|j| self.y(j)).collect(),
            points,
            d_t,
            d_s,
            p,
            q,
            Provenance::Graph { a1, a2 },
        )
    }
}

/// Central-difference `f = h_y`, `g = h_x` on the interior.
pub fn reconstruct_graph(grid: &PotentialGrid) -> GraphFields {
    let (nx, ny) = (grid.nx - 2, grid.ny - 2);
    let (mut f, mut g) = (Vec::with_capacity(nx * ny), Vec::with_capacity(nx * ny));
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            f.push((grid.at(i, j + 1) - grid.at(i, j - 1)) / (2.0 * grid.dy));
            g.push((grid.at(i + 1, j) - grid.at(i - 1, j)) / (2.0 * grid.dx));
        }
    }
    GraphFields {
        nx,
        ny,
        x0: grid.x0 + grid.dx,
        y0: grid.y0 + grid.dy,
        dx: grid.dx,
        dy: grid.dy,
        f,
        g,
    }
}

/// `(f_x - g_y, A(f, x) g_x + B(g, y) f_y)` on the interior of the fields,
/// with `A = (q+1)^2 (f^2 + x^2 + a1^2)^{q/(q+1)}` and
/// `B = (p+1)^2 (g^2 + y^2 + a2^2)^{p/(p+1)}`; pass `a1 = a2 = 0` for the
/// unregularized system.
pub fn cr_residual(fields: &GraphFields, weights: Weights) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (fields.nx, fields.ny);
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    if nx < 3 || ny < 3 {
        return (r1, r2);
    }
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let dx = |a: &[f64]| (a[k + 1] - a[k - 1]) / (2.0 * fields.dx);
            let dy = |a: &[f64]| (a[k + nx] - a[k - nx]) / (2.0 * fields.dy);
            let (fx, fy, gx, gy) = (dx(&fields.f), dy(&fields.f), dx(&fields.g), dy(&fields.g));
            r1.push(fx - gy);
            let a = weights.xx(fields.f[k], fields.x(i)).0;
            let b = weights.yy(fields.g[k], fields.y(j)).0;
            r2.push(a * gx + b * fy);
        }
    }
    (r1, r2)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// How an accepted iterate was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepKind {
    Initial,
    /// Newton step scaled by the accepted line-search factor.
    Newton { damping: f64 },
    /// Nonlinear Gauss–Seidel sweeps after a failed line search.
    GaussSeidel { sweeps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub step: StepKind,
    pub residual_l2: f64,
    pub residual_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution {
    pub grid: PotentialGrid,
    pub log: Vec<IterationRecord>,
}

impl DirichletSolution {
    /// The L2 residual never increases across accepted iterates.
    pub fn monotone(&self) -> bool {
        self.log.windows(2).all(|w| w[1].residual_l2 <= w[0].residual_l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target for the max-norm interior residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest Newton damping tried before falling back to Gauss–Seidel.
    pub min_damping: f64,
    /// Gauss–Seidel sweeps per fallback.
    pub sweeps: usize,
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            min_damping: 1.0 / 1024.0,
            sweeps: 50,
        }
    }
}

/// Transfinite bilinear (Coons) interpolation of the boundary values into
/// the interior; exact for bilinear data.
pub fn coons_fill(grid: &mut PotentialGrid) {
    let (nx, ny) = (grid.nx, grid.ny);
    let corner = [grid.at(0, 0), grid.at(nx - 1, 0), grid.at(0, ny - 1), grid.at(nx - 1, ny - 1)];
    for j in 1..ny - 1 {
        let v = j as f64 / (ny - 1) as f64;
        for i in 1..nx - 1 {
            let u = i as f64 / (nx - 1) as f64;
            let edges = (1.0 - v) * grid.at(i, 0)
                + v * grid.at(i, ny - 1)
                + (1.0 - u) * grid.at(0, j)
                + u * grid.at(nx - 1, j);
            let bilinear = (1.0 - u) * (1.0 - v) * corner[0]
                + u * (1.0 - v) * corner[1]
                + (1.0 - u) * v * corner[2]
                + u * v * corner[3];
            grid.h[j * nx + i] = edges - bilinear;
        }
    }
}

fn jacobian(grid: &PotentialGrid) -> BandMatrix {
    let (mx, my) = (grid.nx - 2, grid.ny - 2);
    let w = grid.weights();
    let mut jac = BandMatrix::zeros(mx * my, mx);
    let (dx, dy) = (grid.dx, grid.dy);
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let row = (j - 1) * mx + (i - 1);
            let (c, l, r, d, u) = (
                grid.at(i, j),
                grid.at(i - 1, j),
                grid.at(i + 1, j),
                grid.at(i, j - 1),
                grid.at(i, j + 1),
            );
            let hx = (r - l) / (2.0 * dx);
            let hy = (u - d) / (2.0 * dy);
            let hxx = (r - 2.0 * c + l) / (dx * dx);
            let hyy = (u - 2.0 * c + d) / (dy * dy);
            let (a, da) = w.xx(hy, grid.x(i));
            let (b, db) = w.yy(hx, grid.y(j));
            jac.add(row, row, -2.0 * a / (dx * dx) - 2.0 * b / (dy * dy));
            let mut neighbour = |ii: usize, jj: usize, v: f64| {
                if !grid.is_boundary(ii, jj) {
                    jac.add(row, (jj - 1) * mx + (ii - 1), v);
                }
            };
            neighbour(i - 1, j, a / (dx * dx) - hyy * db / (2.0 * dx));
            neighbour(i + 1, j, a / (dx * dx) + hyy * db / (2.0 * dx));
            neighbour(i, j - 1, b / (dy * dy) - hxx * da / (2.0 * dy));
            neighbour(i, j + 1, b / (dy * dy) + hxx * da / (2.0 * dy));
        }
    }
    jac
}

fn with_update(grid: &PotentialGrid, delta: &[f64], scale: f64) -> PotentialGrid {
    let mut next = grid.clone();
    let mx = grid.nx - 2;
    for (k, d) in delta.iter().enumerate() {
        let (i, j) = (k % mx + 1, k / mx + 1);
        next.h[j * grid.nx + i] += scale * d;
    }
    next
}

fn gauss_seidel(grid: &mut PotentialGrid, sweeps: usize) {
    let w = grid.weights();
    let (dx, dy) = (grid.dx, grid.dy);
    for _ in 0..sweeps {
        for j in 1..grid.ny - 1 {
            for i in 1..grid.nx - 1 {
                let (l, r, d, u) = (grid.at(i - 1, j), grid.at(i + 1, j), grid.at(i, j - 1), grid.at(i, j + 1));
                let a = w.xx((u - d) / (2.0 * dy), grid.x(i)).0;
                let b = w.yy((r - l) / (2.0 * dx), grid.y(j)).0;
                let diag = 2.0 * a / (dx * dx) + 2.0 * b / (dy * dy);
                grid.h[j * grid.nx + i] = (a * (l + r) / (dx * dx) + b * (d + u) / (dy * dy)) / diag;
            }
        }
    }
}

/// Solves the regularized potential equation with the boundary values of
/// `boundary` (interior values are replaced by the Coons interpolant).
/// Damped Newton with Armijo backtracking on the L2 residual, banded LU for
/// the linearized system, and Gauss–Seidel sweeps when the line search
/// fails.
pub fn solve_dirichlet(boundary: &PotentialGrid, opts: SolverOptions) -> Result<DirichletSolution> {
    if !(boundary.a1 > 0.0 && boundary.a2 > 0.0) {
        return Err(invalid(
            "a1/a2",
            "both regularizers must be strictly positive: the equation is not elliptic where g(x,0)=0 or f(0,y)=0",
        ));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(invalid("tol/max_iter", "tol must be positive and max_iter at least 1"));
    }
    if boundary.nx < 3 || boundary.ny < 3 || boundary.h.len() != boundary.nx * boundary.ny {
        return Err(invalid("boundary", "grid must have at least 3×3 nodes"));
    }
    let mut grid = boundary.clone();
    coons_fill(&mut grid);
    let mut res = potential_residual(&grid);
    let mut norm = l2(&res);
    let mut log = vec![IterationRecord {
        iteration: 0,
        step: StepKind::Initial,
        residual_l2: norm,
        residual_max: max_abs(&res),
    }];
    for iteration in 1..=opts.max_iter {
        if max_abs(&res) < opts.tol {
            return Ok(DirichletSolution { grid, log });
        }
        let mut delta: Vec<f64> = res.iter().map(|r| -r).collect();
        let newton = jacobian(&grid).solve(&mut delta);
        let mut accepted = None;
        if newton.is_ok() {
            let mut damping = 1.0;
            while damping >= opts.min_damping {
                let trial = with_update(&grid, &delta, damping);
                let trial_res = potential_residual(&trial);
                let trial_norm = l2(&trial_res);
                if trial_norm <= (1.0 - 1e-4 * damping) * norm {
                    accepted = Some((trial, trial_res, trial_norm, StepKind::Newton { damping }));
                    break;
                }
                damping *= 0.5;
            }
        }
        let (next, next_res, next_norm, step) = match accepted {
            Some(a) => a,
            None => {
                let mut trial = grid.clone();
                gauss_seidel(&mut trial, opts.sweeps);
                let trial_res = potential_residual(&trial);
                let trial_norm = l2(&trial_res);
                if !(trial_norm < norm) {
                    return Err(Error::NonConvergence {
                        iterations: iteration,
                        residual: max_abs(&res),
                    });
                }
                (trial, trial_res, trial_norm, StepKind::GaussSeidel { sweeps: opts.sweeps })
            }
        };
        grid = next;
        res = next_res;
        norm = next_norm;
        log.push(IterationRecord {
            iteration,
            step,
            residual_l2: norm,
            residual_max: max_abs(&res),
        });
    }
    if max_abs(&res) < opts.tol {
        return Ok(DirichletSolution { grid, log });
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: max_abs(&res),
    })
}

/// Closed-form boundary data available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCatalog {
    /// `x y + 2x - y`
    Bilinear,
    /// `x y`
    Product,
    /// `x^2 - y^2`
    Quadratic,
    /// `x^3 - 3 x y^2`
    Cubic,
    /// `x^4 - 6 x^2 y^2 + y^4`
    Quartic,
    /// `e^x sin y`
    ExpSin,
}

impl BoundaryCatalog {
    pub const ALL: [BoundaryCatalog; 6] = [
        Self::Bilinear,
        Self::Product,
        Self::Quadratic,
        Self::Cubic,
        Self::Quartic,
        Self::ExpSin,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bilinear => "bilinear",
            Self::Product => "product",
            Self::Quadratic => "quadratic",
            Self::Cubic => "cubic",
            Self::Quartic => "quartic",
            Self::ExpSin => "exp-sin",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Bilinear => x * y + 2.0 * x - y,
            Self::Product => x * y,
            Self::Quadratic => x * x - y * y,
            Self::Cubic => x * x * x - 3.0 * x * y * y,
            Self::Quartic => x.powi(4) - 6.0 * x * x * y * y + y.powi(4),
            Self::ExpSin => x.exp() * y.sin(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: u32, q: u32, a1: f64, a2: f64) -> Weights {
        Weights::new(p, q, a1, a2).unwrap()
    }

    #[test]
    fn cr_residual_examples() {
        let d = [-1.0, 1.0, -1.0, 1.0];
        for (p, q) in [(0, 0), (1, 0), (2, 3)] {
            let fields = GraphFields::from_fn(d, (9, 9), |x, _| 2.0 * x + 3.0, |_, y| 2.0 * y + 5.0).unwrap();
            let (r1, r2) = cr_residual(&fields, w(p, q, 0.0, 0.0));
            assert!(max_abs(&r1) < 1e-12);
            // affine fields: g_x = 0 and f_y = 0
            assert!(max_abs(&r2) < 1e-12);
        }
        let fields = GraphFields::from_fn(d, (9, 9), |x, y| x * x - y * y, |x, y| 2.0 * x * y).unwrap();
        let (r1, r2) = cr_residual(&fields, w(0, 0, 0.0, 0.0));
        // f_x = 2x = g_y; g_x + f_y = 2y - 2y
        assert!(max_abs(&r1) < 1e-12 && max_abs(&r2) < 1e-12);
    }

    #[test]
    fn cr_residual_non_solution_probes() {
        let d = [0.5, 1.5, 0.5, 1.5];
        // f = x, g = -y/4: g_x = 0 and f_y = 0, so R2 = 0 while R1 = 1 + 1/4
        let fields = GraphFields::from_fn(d, (7, 7), |x, _| x, |_, y| -y / 4.0).unwrap();
        let (r1, r2) = cr_residual(&fields, w(1, 0, 0.0, 0.0));
        assert!(r1.iter().all(|v| (v - 1.25).abs() < 1e-12));
        assert!(max_abs(&r2) < 1e-12);
        // g = -x/4: R2 = (q+1)^2 (f^2 + x^2)^0 g_x = -1/4 at q = 0
        let fields = GraphFields::from_fn(d, (7, 7), |x, _| x, |x, _| -x / 4.0).unwrap();
        let (_, r2) = cr_residual(&fields, w(1, 0, 0.0, 0.0));
        assert!(r2.iter().all(|v| (v + 0.25).abs() < 1e-12));
    }

    #[test]
    fn potential_residual_examples() {
        let d = [-1.0, 2.0, -0.5, 1.5];
        for (p, q, a1, a2) in [(0, 0, 0.0, 0.0), (1, 2, 0.5, 1.0), (3, 1, 1.0, 0.1)] {
            let g = PotentialGrid::from_fn(w(p, q, a1, a2), d, (13, 9), |x, y| 0.75 * x * y + 2.0 * x - y).unwrap();
            assert!(g.max_residual() <= 1e-12, "{}", g.max_residual());
        }
        let g = PotentialGrid::from_fn(w(0, 0, 0.0, 0.0), d, (13, 9), |x, y| x * x - y * y).unwrap();
        assert!(g.max_residual() <= 1e-12);
        let g = PotentialGrid::from_fn(w(1, 0, 1.0, 1.0), d, (13, 9), |x, _| x * x).unwrap();
        assert!(potential_residual(&g).iter().all(|r| (r - 2.0).abs() < 1e-11));
    }

    #[test]
    fn reconstruct_examples() {
        let d = [-1.0, 1.0, 0.0, 2.0];
        let g = PotentialGrid::from_fn(w(0, 0, 0.0, 0.0), d, (6, 5), |x, y| x * y).unwrap();
        let fields = reconstruct_graph(&g);
        let phi = fields.phi_hat();
        for j in 0..fields.ny {
            for i in 0..fields.nx {
                let k = j * fields.nx + i;
                let (x, y) = (fields.x(i), fields.y(j));
                assert!((fields.f[k] - x).abs() < 1e-14 && (fields.g[k] - y).abs() < 1e-14);
                assert!((phi[k][0] - Complex64::new(y, y)).norm() < 1e-14);
                assert!((phi[k][1] - Complex64::new(x, -x)).norm() < 1e-14);
            }
        }
        let g = PotentialGrid::from_fn(w(0, 0, 0.0, 0.0), d, (6, 5), |x, _| x * x).unwrap();
        let fields = reconstruct_graph(&g);
        for j in 0..fields.ny {
            for i in 0..fields.nx {
                let k = j * fields.nx + i;
                assert!(fields.f[k].abs() < 1e-14 && (fields.g[k] - 2.0 * fields.x(i)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bilinear_boundary_is_reproduced() {
        let d = [-1.0, 1.0, -1.0, 1.0];
        for (p, q) in [(0, 0), (1, 0), (2, 3)] {
            let b = PotentialGrid::from_fn(w(p, q, 1.0, 1.0), d, (33, 33), |x, y| BoundaryCatalog::Bilinear.eval(x, y))
                .unwrap();
            let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 20)).unwrap();
            assert!(sol.grid.max_deviation(|x, y| BoundaryCatalog::Bilinear.eval(x, y)) < 1e-10);
        }
    }

    #[test]
    fn edges_round_trip() {
        let d = [0.0, 1.0, -1.0, 1.0];
        let g = PotentialGrid::from_fn(w(1, 1, 1.0, 1.0), d, (7, 5), |x, y| x - 2.0 * y * y).unwrap();
        let e = g.edges();
        let b = PotentialGrid::from_edges(g.weights(), d, [&e[0], &e[1], &e[2], &e[3]]).unwrap();
        assert_eq!(b.edges(), e);
        let mut bad = e[2].clone();
        bad[0] += 1.0;
        assert!(PotentialGrid::from_edges(g.weights(), d, [&e[0], &e[1], &bad, &e[3]]).is_err());
    }

    #[test]
    fn harmonic_solution_reconstructs_conjugate_pair() {
        let cat = BoundaryCatalog::Cubic;
        let b = PotentialGrid::from_fn(w(0, 0, 1e-6, 1e-6), [0.0, 1.0, 0.0, 1.0], (33, 33), |x, y| cat.eval(x, y)).unwrap();
        let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 10)).unwrap();
        assert!(sol.grid.max_deviation(|x, y| cat.eval(x, y)) < 1e-9);
        let (r1, r2) = cr_residual(&reconstruct_graph(&sol.grid), w(0, 0, 0.0, 0.0));
        let dx2 = sol.grid.dx * sol.grid.dx;
        assert!(max_abs(&r1) < 5.0 * dx2 && max_abs(&r2) < 5.0 * dx2);
    }

    #[test]
    fn degenerate_regularizers_are_rejected() {
        let d = [1.0, 2.0, 1.0, 2.0];
        let b = PotentialGrid::from_fn(w(1, 0, 0.0, 0.5), d, (9, 9), |x, y| x * y).unwrap();
        assert!(matches!(
            solve_dirichlet(&b, SolverOptions::new(1e-10, 20)),
            Err(Error::InvalidParameter { name: "a1/a2", .. })
        ));
    }

    fn harmonic_error(n: usize, cat: BoundaryCatalog) -> f64 {
        let b = PotentialGrid::from_fn(w(0, 0, 1e-6, 1e-6), [0.0, 1.0, 0.0, 1.0], (n, n), |x, y| cat.eval(x, y)).unwrap();
        let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 20)).unwrap();
        assert!(sol.monotone());
        sol.grid.max_deviation(|x, y| cat.eval(x, y))
    }

    #[test]
    fn harmonic_oracle_converges_at_second_order() {
        for cat in [BoundaryCatalog::Quartic, BoundaryCatalog::ExpSin] {
            let e = [harmonic_error(17, cat), harmonic_error(33, cat), harmonic_error(65, cat)];
            for k in 0..2 {
                let ratio = e[k] / e[k + 1];
                assert!((3.5..=4.5).contains(&ratio), "{cat:?}: {e:?}");
            }
        }
        assert!(harmonic_error(17, BoundaryCatalog::Cubic) < 1e-10);
    }

    #[test]
    fn nonlinear_solve_is_self_consistent() {
        let d = [1.0, 2.0, 1.0, 2.0];
        let wt = w(1, 0, 0.5, 0.5);
        let b = PotentialGrid::from_fn(wt, d, (33, 33), |x, y| x * y).unwrap();
        let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 30)).unwrap();
        let (r1, r2) = cr_residual(&reconstruct_graph(&sol.grid), wt);
        let dx2 = sol.grid.dx * sol.grid.dx;
        assert!(max_abs(&r1) < 5.0 * dx2 && max_abs(&r2) < 5.0 * dx2);

        let mut errs = Vec::new();
        for n in [33, 65, 129] {
            let b = PotentialGrid::from_fn(wt, d, (n, n), |x, y| (0.5 * x).exp() * (y + 0.3 * x * x)).unwrap();
            let sol = solve_dirichlet(&b, SolverOptions::new(1e-8, 40)).unwrap();
            assert!(sol.monotone());
            assert!(sol.grid.max_residual() < 1e-8);
            let fields = reconstruct_graph(&sol.grid);
            let (_, r2) = cr_residual(&fields, wt);
            // the boundary data is not corner-compatible, so measure away from the corners
            let mx = fields.nx - 2;
            let central = r2.iter().enumerate().filter(|(k, _)| {
                let (x, y) = (fields.x(k % mx + 1), fields.y(k / mx + 1));
                (1.25..=1.75).contains(&x) && (1.25..=1.75).contains(&y)
            });
            errs.push(central.fold(0.0_f64, |m, (_, v)| m.max(v.abs())));
        }
        for k in 0..2 {
            let ratio = errs[k] / errs[k + 1];
            assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn graph_surface_of_harmonic_solution_is_lagrangian() {
        let cat = BoundaryCatalog::Cubic;
        let b = PotentialGrid::from_fn(w(0, 0, 1e-6, 1e-6), [-1.0, 1.0, -1.0, 1.0], (17, 17), |x, y| cat.eval(x, y)).unwrap();
        let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 10)).unwrap();
        let fields = reconstruct_graph(&sol.grid);
        let s = fields.surface(0, 0, 1e-6, 1e-6).unwrap();
        for k in 0..s.points.len() {
            assert!(crate::surfaces::symplectic_residual(&s.d_t[k], &s.d_s[k]).abs() < 1e-9);
        }
    }
}
