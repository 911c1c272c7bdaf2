//! Lagrangian surfaces in C^2 sampled on rectangular parameter grids: the
//! products of an alpha and a gamma curve, their Lagrangian angle, the
//! membership equations of their image, and total Gauss curvature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curves::{
    integrate_at, special_lambda, symmetric_extent, CurveKind, CurveParams, CurveSample, IntegrationOptions,
};
use crate::error::{invalid, Error, Result};
use crate::numeric::linalg::real_inner;
use crate::numeric::{circular_stats, linspace, pairwise_sum, wrap_angle, CircularStats};
use crate::C2;

/// Components with modulus below this are treated as zero.
pub const ZERO_COMPONENT: f64 = 1e-12;
/// Real frames with area below this are degenerate.
pub const MIN_AREA: f64 = 1e-14;
/// Frames whose normalized symplectic residual exceeds this are flagged.
pub const LAGRANGIAN_TOL: f64 = 1e-8;

/// Where a surface grid came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Componentwise product of an alpha and a gamma curve.
    CurveProduct { alpha: CurveParams, gamma: CurveParams },
    /// Graph reconstructed from a potential solve with the given regularizers.
    Graph { a1: f64, a2: f64 },
    External(String),
}

/// Points and coordinate tangents of a surface on a `ts × ss` grid, stored
/// row-major with `t` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
    pub points: Vec<C2>,
    pub d_t: Vec<C2>,
    pub d_s: Vec<C2>,
    pub p: u32,
    pub q: u32,
    pub provenance: Provenance,
}

fn increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

fn uniform_step(v: &[f64], name: &'static str) -> Result<f64> {
    if v.len() < 2 {
        return Err(invalid(name, "at least two grid values are required"));
    }
    let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    let uniform = v
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !uniform {
        return Err(invalid(name, "grid spacing must be uniform"));
    }
    Ok(h)
}

impl SurfaceGrid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ts: Vec<f64>,
        ss: Vec<f64>,
        points: Vec<C2>,
        d_t: Vec<C2>,
        d_s: Vec<C2>,
        p: u32,
        q: u32,
        provenance: Provenance,
    ) -> Result<Self> {
        if !increasing(&ts) || !increasing(&ss) {
            return Err(invalid("ts/ss", "grid values must be finite and strictly increasing"));
        }
        let size = ts.len() * ss.len();
        if points.len() != size || d_t.len() != size || d_s.len() != size {
            return Err(invalid("points", format!("expected {size} values per field")));
        }
        Ok(Self {
            ts,
            ss,
            points,
            d_t,
            d_s,
            p,
            q,
            provenance,
        })
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn ns(&self) -> usize {
        self.ss.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ss.len() + j
    }

    pub fn point(&self, i: usize, j: usize) -> C2 {
        self.points[self.index(i, j)]
    }

    /// Every `stride`-th grid line in both directions; `stride` must divide
    /// the number of intervals.
    pub fn subsample(&self, stride: usize) -> Result<SurfaceGrid> {
        if stride == 0 || (self.nt() - 1) % stride != 0 || (self.ns() - 1) % stride != 0 {
            return Err(invalid("stride", "must divide the number of grid intervals"));
        }
        let rows: Vec<usize> = (0..self.nt()).step_by(stride).collect();
        let cols: Vec<usize> = (0..self.ns()).step_by(stride).collect();
        let pick = |field: &Vec<C2>| -> Vec<C2> {
            rows.iter()
                .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                .map(|(i, j)| field[self.index(i, j)])
                .collect()
        };
        Ok(SurfaceGrid {
            ts: rows.iter().map(|&i| self.ts[i]).collect(),
            ss: cols.iter().map(|&j| self.ss[j]).collect(),
            points: pick(&self.points),
            d_t: pick(&self.d_t),
            d_s: pick(&self.d_s),
            p: self.p,
            q: self.q,
            provenance: self.provenance.clone(),
        })
    }

    /// Largest deviation of the stored tangents from fourth-order central
    /// differences of the points, relative to `max(1, |tangent|)`, over
    /// nodes with two neighbours on each side.
    pub fn tangent_fd_defect(&self) -> Result<f64> {
        let ht = uniform_step(&self.ts, "ts")?;
        let hs = uniform_step(&self.ss, "ss")?;
        let stencil = |f: &dyn Fn(isize) -> C2, h: f64| -> C2 {
            let (m2, m1, p1, p2) = (f(-2), f(-1), f(1), f(2));
            [0, 1].map(|k| (m2[k] - p2[k] + 8.0 * (p1[k] - m1[k])) / (12.0 * h))
        };
        let defect = |fd: C2, exact: C2| -> f64 {
            let scale = (exact[0].norm_sqr() + exact[1].norm_sqr()).sqrt().max(1.0);
            (fd[0] - exact[0]).norm().max((fd[1] - exact[1]).norm()) / scale
        };
        let mut worst: f64 = 0.0;
        for i in 0..self.nt() {
            for j in 0..self.ns() {
                let k = self.index(i, j);
                if i >= 2 && i + 2 < self.nt() {
                    let f = |o: isize| self.point((i as isize + o) as usize, j);
                    worst = worst.max(defect(stencil(&f, ht), self.d_t[k]));
                }
                if j >= 2 && j + 2 < self.ns() {
                    let f = |o: isize| self.point(i, (j as isize + o) as usize);
                    worst = worst.max(defect(stencil(&f, hs), self.d_s[k]));
                }
            }
        }
        Ok(worst)
    }
}

/// `phi(t, s) = (alpha_1(t) gamma_1(s), alpha_2(t) gamma_2(s))` with
/// tangents from the two curve equations.
pub fn product_surface(alpha: &CurveSample, gamma: &CurveSample) -> Result<SurfaceGrid> {
    if alpha.params.kind != CurveKind::Alpha || gamma.params.kind != CurveKind::Gamma {
        return Err(invalid("alpha/gamma", "expected an alpha sample and a gamma sample"));
    }
    let (ap, gp) = (alpha.params, gamma.params);
    if (ap.p, ap.q) != (gp.p, gp.q) {
        return Err(Error::ExponentMismatch(format!(
            "alpha has (p, q) = ({}, {}), gamma has ({}, {})",
            ap.p, ap.q, gp.p, gp.q
        )));
    }
    if alpha.is_empty() || gamma.is_empty() {
        return Err(invalid("alpha/gamma", "samples must be nonempty"));
    }
    let da: Vec<C2> = (0..alpha.len()).map(|i| alpha.velocity(i)).collect::<Result<_>>()?;
    let dg: Vec<C2> = (0..gamma.len()).map(|j| gamma.velocity(j)).collect::<Result<_>>()?;
    let size = alpha.len() * gamma.len();
    let (mut points, mut d_t, mut d_s) = (Vec::with_capacity(size), Vec::with_capacity(size), Vec::with_capacity(size));
    for (a, a_dot) in alpha.points.iter().zip(&da) {
        for (g, g_dot) in gamma.points.iter().zip(&dg) {
            points.push([a[0] * g[0], a[1] * g[1]]);
            d_t.push([a_dot[0] * g[0], a_dot[1] * g[1]]);
            d_s.push([a[0] * g_dot[0], a[1] * g_dot[1]]);
        }
    }
    SurfaceGrid::new(
        alpha.ts.clone(),
        gamma.ts.clone(),
        points,
        d_t,
        d_s,
        ap.p,
        ap.q,
        Provenance::CurveProduct { alpha: ap, gamma: gp },
    )
}

/// Integrates both curves on uniform grids and forms their product. The
/// `t` range is `[-T, T]` with `T <= t_max` the largest symmetric extent on
/// which the alpha curve stays inside its escape bounds.
#[allow(clippy::too_many_arguments)]
pub fn curve_product_surface(
    p: u32,
    q: u32,
    a: [f64; 2],
    b: [f64; 2],
    t_max: f64,
    s_range: (f64, f64),
    shape: (usize, usize),
    tol: f64,
) -> Result<SurfaceGrid> {
    let alpha = CurveParams::alpha(p, q, a)?;
    let gamma = CurveParams::gamma(p, q, b)?;
    let opts = IntegrationOptions::new(tol);
    let (extent, _) = symmetric_extent(alpha, t_max, opts)?;
    let ts = linspace(-extent, extent, shape.0);
    let ss = linspace(s_range.0, s_range.1, shape.1);
    let alpha_sample = integrate_at(alpha, &ts, opts)?;
    if alpha_sample.len() != ts.len() {
        return Err(invalid("t_max", "alpha curve escaped inside the requested range"));
    }
    let gamma_sample = integrate_at(gamma, &ss, opts)?;
    product_surface(&alpha_sample, &gamma_sample)
}

/// `(t, s) -> (g(t), h(s))` with `g^{p+1} = c_1 + i t` and
/// `h^{q+1} = c_2 + i s`: a product of two curves whose powers are straight
/// lines.
pub fn power_line_product(p: u32, q: u32, c: [f64; 2], ts: &[f64], ss: &[f64]) -> Result<SurfaceGrid> {
    use crate::curves::{gamma_c_curve, gamma_c_derivative};
    let mut points = Vec::with_capacity(ts.len() * ss.len());
    let (mut d_t, mut d_s) = (Vec::with_capacity(points.capacity()), Vec::with_capacity(points.capacity()));
    let zero = Complex64::new(0.0, 0.0);
    for &t in ts {
        let g = gamma_c_curve(p + 1, c[0], t)?;
        let dg = gamma_c_derivative(p + 1, c[0], t)?;
        for &s in ss {
            let h = gamma_c_curve(q + 1, c[1], s)?;
            let dh = gamma_c_derivative(q + 1, c[1], s)?;
            points.push([g, h]);
            d_t.push([dg, zero]);
            d_s.push([zero, dh]);
        }
    }
    SurfaceGrid::new(
        ts.to_vec(),
        ss.to_vec(),
        points,
        d_t,
        d_s,
        p,
        q,
        Provenance::External("product of power-line curves".into()),
    )
}

/// Lagrangian angle data of a real 2-frame in C^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAngle {
    /// `arg det[v w]` in `(-pi, pi]`.
    pub beta: f64,
    /// Unit complex number `det[v w] / |det[v w]|`.
    pub phase: Complex64,
    /// Real area `sqrt(|v|^2 |w|^2 - <v, w>^2)`; equals `|det[v w]|` on
    /// Lagrangian frames.
    pub area: f64,
    /// `omega(v, w)`.
    pub symplectic: f64,
    /// The span is Lagrangian to within `LAGRANGIAN_TOL` relative to `area`.
    pub lagrangian: bool,
}

/// `omega(v, w) = -Im sum v_i conj(w_i)`.
pub fn symplectic_residual(v: &C2, w: &C2) -> f64 {
    -(v[0] * w[0].conj() + v[1] * w[1].conj()).im
}

pub fn frame_angle(v: &C2, w: &C2) -> Result<FrameAngle> {
    let vv = v[0].norm_sqr() + v[1].norm_sqr();
    let ww = w[0].norm_sqr() + w[1].norm_sqr();
    let g = real_inner(v, w);
    let omega = symplectic_residual(v, w);
    let area = (vv * ww - g * g).max(0.0).sqrt();
    let det = v[0] * w[1] - v[1] * w[0];
    if !(area >= MIN_AREA && det.norm() >= MIN_AREA) {
        return Err(Error::DegenerateFrame(format!(
            "real area {area:e}, complex determinant modulus {:e}",
            det.norm()
        )));
    }
    let phase = det / det.norm();
    Ok(FrameAngle {
        beta: wrap_angle(det.arg()),
        phase,
        area,
        symplectic: omega,
        lagrangian: omega.abs() <= LAGRANGIAN_TOL * area,
    })
}

/// Lagrangian angle `arg det[v w]` of the real 2-frame `(v, w)`.
pub fn lagrangian_angle(v: &C2, w: &C2) -> Result<f64> {
    frame_angle(v, w).map(|f| f.beta)
}

/// Per-point angle data of a surface grid (row-major like the grid).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport {
    pub beta: Vec<f64>,
    /// `omega(d_t, d_s) / |d_t ∧ d_s|`.
    pub symplectic: Vec<f64>,
    /// `beta + p arg z_1 + q arg z_2` wrapped to `(-pi, pi]`.
    pub condition: Vec<f64>,
    pub max_abs_symplectic: f64,
    pub max_abs_condition: f64,
    /// Circular statistics of the condition values.
    pub condition_stats: CircularStats,
}

impl AngleReport {
    /// Largest wrapped distance of the condition from its circular mean.
    pub fn condition_spread(&self) -> f64 {
        self.condition_stats.max_deviation
    }
}

pub fn angle_condition(surface: &SurfaceGrid) -> Result<AngleReport> {
    let n = surface.points.len();
    let (mut beta, mut symplectic, mut condition) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut phases = Vec::with_capacity(n);
    for k in 0..n {
        let z = surface.points[k];
        for (c, w) in z.iter().enumerate() {
            if !(w.norm() >= ZERO_COMPONENT) {
                return Err(Error::ZeroComponent {
                    i: k / surface.ns(),
                    j: k % surface.ns(),
                    component: c + 1,
                });
            }
        }
        let f = frame_angle(&surface.d_t[k], &surface.d_s[k])?;
        let u1 = z[0] / z[0].norm();
        let u2 = z[1] / z[1].norm();
        let total = f.phase * u1.powu(surface.p) * u2.powu(surface.q);
        beta.push(f.beta);
        symplectic.push(f.symplectic / f.area);
        condition.push(wrap_angle(total.arg()));
        phases.push(total);
    }
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(AngleReport {
        max_abs_symplectic: max_abs(&symplectic),
        max_abs_condition: max_abs(&condition),
        condition_stats: circular_stats(&phases),
        beta,
        symplectic,
        condition,
    })
}

/// Right-hand sides of the two membership equations of the product image.
pub fn sigma_a_levels(p: u32, q: u32, a: [f64; 2]) -> (f64, f64) {
    let lambda = special_lambda(p, q);
    let (p1, q1) = (f64::from(p) + 1.0, f64::from(q) + 1.0);
    let radial = (a[0] * a[0] - a[1] * a[1]) / lambda;
    let line = a[0].powf(p1) * a[1].powf(q1) * (p1 * q1).sqrt() / lambda;
    (radial, line)
}

/// Left minus right side of
/// `|z_1|^2/(p+1) - |z_2|^2/(q+1) = (a_1^2 - a_2^2)/lambda` and
/// `Re(z_1^{p+1} z_2^{q+1}) = a_1^{p+1} a_2^{q+1} sqrt((p+1)(q+1))/lambda`.
pub fn sigma_a_membership(z: &C2, p: u32, q: u32, a: [f64; 2]) -> (f64, f64) {
    let (radial, line) = sigma_a_levels(p, q, a);
    let (p1, q1) = (f64::from(p) + 1.0, f64::from(q) + 1.0);
    let lhs_radial = z[0].norm_sqr() / p1 - z[1].norm_sqr() / q1;
    let lhs_line = (z[0].powu(p + 1) * z[1].powu(q + 1)).re;
    (lhs_radial - radial, lhs_line - line)
}

/// [`sigma_a_membership`] with each residual divided by `max(1, size of its
/// terms)`, matching the scaling of the curve drifts.
pub fn sigma_a_membership_scaled(z: &C2, p: u32, q: u32, a: [f64; 2]) -> (f64, f64) {
    let (r1, r2) = sigma_a_membership(z, p, q, a);
    let (p1, q1) = (f64::from(p) + 1.0, f64::from(q) + 1.0);
    let s1 = (z[0].norm_sqr() / p1 + z[1].norm_sqr() / q1).max(1.0);
    let s2 = (z[0].powu(p + 1) * z[1].powu(q + 1)).norm().max(1.0);
    (r1 / s1, r2 / s2)
}

/// Largest absolute scaled membership residuals over a grid.
pub fn sigma_a_grid_residuals(surface: &SurfaceGrid, a: [f64; 2]) -> (f64, f64) {
    surface.points.iter().fold((0.0f64, 0.0f64), |(m1, m2), z| {
        let (r1, r2) = sigma_a_membership_scaled(z, surface.p, surface.q, a);
        (m1.max(r1.abs()), m2.max(r2.abs()))
    })
}

fn first_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i + 1 == n {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

fn second_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let h2 = h * h;
    (0..n)
        .map(|i| {
            if i == 0 {
                (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
            } else if i + 1 == n {
                (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2
            } else {
                (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
            }
        })
        .collect()
}

/// Applies a line operator along `t` (columns) of a row-major field.
fn along_t(field: &[f64], nt: usize, ns: usize, op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; field.len()];
    for j in 0..ns {
        let col: Vec<f64> = (0..nt).map(|i| field[i * ns + j]).collect();
        for (i, v) in op(&col).into_iter().enumerate() {
            out[i * ns + j] = v;
        }
    }
    out
}

/// Applies a line operator along `s` (rows) of a row-major field.
fn along_s(field: &[f64], ns: usize, op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    field.chunks(ns).flat_map(&op).collect()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Gauss curvature at every node from the first fundamental form
/// (Brioschi formula, second-order differences, one-sided at the borders)
/// together with the area element `sqrt(EG - F^2)`.
pub fn gauss_curvature(surface: &SurfaceGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    let (nt, ns) = (surface.nt(), surface.ns());
    if nt < 4 || ns < 4 {
        return Err(invalid("surface", "curvature needs at least 4 grid lines per direction"));
    }
    let ht = uniform_step(&surface.ts, "ts")?;
    let hs = uniform_step(&surface.ss, "ss")?;
    let e: Vec<f64> = surface.d_t.iter().map(|v| real_inner(v, v)).collect();
    let f: Vec<f64> = surface.d_t.iter().zip(&surface.d_s).map(|(v, w)| real_inner(v, w)).collect();
    let g: Vec<f64> = surface.d_s.iter().map(|w| real_inner(w, w)).collect();
    let mut area = Vec::with_capacity(e.len());
    for k in 0..e.len() {
        let d = e[k] * g[k] - f[k] * f[k];
        if !(d > 0.0) {
            return Err(Error::DegenerateMetric {
                i: k / ns,
                j: k % ns,
                value: d,
            });
        }
        area.push(d.sqrt());
    }
    let dt = |v: &[f64]| first_derivative(v, ht);
    let ds = |v: &[f64]| first_derivative(v, hs);
    let e_t = along_t(&e, nt, ns, dt);
    let e_s = along_s(&e, ns, ds);
    let e_ss = along_s(&e, ns, |v| second_derivative(v, hs));
    let f_t = along_t(&f, nt, ns, dt);
    let f_s = along_s(&f, ns, ds);
    let f_ts = along_t(&f_s, nt, ns, dt);
    let g_t = along_t(&g, nt, ns, dt);
    let g_s = along_s(&g, ns, ds);
    let g_tt = along_t(&g, nt, ns, |v| second_derivative(v, ht));
    let k: Vec<f64> = (0..e.len())
        .map(|k| {
            let m1 = [
                [-0.5 * e_ss[k] + f_ts[k] - 0.5 * g_tt[k], 0.5 * e_t[k], f_t[k] - 0.5 * e_s[k]],
                [f_s[k] - 0.5 * g_t[k], e[k], f[k]],
                [0.5 * g_s[k], f[k], g[k]],
            ];
            let m2 = [
                [0.0, 0.5 * e_s[k], 0.5 * g_t[k]],
                [0.5 * e_s[k], e[k], f[k]],
                [0.5 * g_t[k], f[k], g[k]],
            ];
            (det3(m1) - det3(m2)) / area[k].powi(4)
        })
        .collect();
    Ok((k, area))
}

/// `∫∫ K dA` over the grid by the trapezoid rule (pairwise summation in
/// row-major order).
pub fn total_curvature(surface: &SurfaceGrid) -> Result<f64> {
    let (k, area) = gauss_curvature(surface)?;
    let (nt, ns) = (surface.nt(), surface.ns());
    let ht = uniform_step(&surface.ts, "ts")?;
    let hs = uniform_step(&surface.ss, "ss")?;
    let weight = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
    let terms: Vec<f64> = (0..k.len())
        .map(|idx| {
            let (i, j) = (idx / ns, idx % ns);
            k[idx] * area[idx] * weight(i, nt) * weight(j, ns)
        })
        .collect();
    Ok(pairwise_sum(&terms) * ht * hs)
}

/// Total curvature on a grid and on its 2× and 4× coarsenings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub full: f64,
    pub half: f64,
    pub quarter: f64,
    /// `(quarter - half) / (half - full)`; close to 4 for second-order
    /// convergence.
    pub ratio: f64,
    /// Richardson extrapolation `full + (full - half) / 3`.
    pub extrapolated: f64,
    /// `|full - half| / 3`.
    pub error_estimate: f64,
}

impl CurvatureReport {
    pub fn second_order(&self, band: (f64, f64)) -> bool {
        self.ratio >= band.0 && self.ratio <= band.1
    }
}

/// Requires the number of grid intervals in each direction to be a
/// multiple of 4.
pub fn curvature_report(surface: &SurfaceGrid) -> Result<CurvatureReport> {
    let full = total_curvature(surface)?;
    let half = total_curvature(&surface.subsample(2)?)?;
    let quarter = total_curvature(&surface.subsample(4)?)?;
    Ok(CurvatureReport {
        full,
        half,
        quarter,
        ratio: (quarter - half) / (half - full),
        extrapolated: full + (full - half) / 3.0,
        error_estimate: (full - half).abs() / 3.0,
    })
}

/// Closed-form total curvature of the `p = q = 0`, `a = (1, 1)` product
/// surface over `|t| <= t_max` and one full period in `s`.
pub fn cylinder_total_curvature(t_max: f64) -> f64 {
    -4.0 * PI * (2.0 * t_max).tanh()
}
