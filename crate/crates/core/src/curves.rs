//! Plane-curve pairs in C^2 generating the product surfaces: the hyperbolic
//! family `alpha`, the spherical family `gamma`, the explicit equality-case
//! curve, and the curves `gamma_c` with `gamma^n = c + i s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{invalid, Error, Result};
use crate::numeric::ode::Integrator;
use crate::numeric::quad::Quadrature;
use crate::numeric::rational::{best_rational, to_f64};
use crate::numeric::roots::{bisect, brent};
use crate::C2;

const GUARD_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// `alpha_j' conj(alpha_j) = i conj(alpha_1^{p+1} alpha_2^{q+1})`
    Alpha,
    /// `gamma_j' conj(gamma_j) = (-1)^{j-1} i conj(gamma_1^{p+1} gamma_2^{q+1})`
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub p: u32,
    pub q: u32,
    /// Real initial point, both components strictly positive.
    pub init: [f64; 2],
    pub kind: CurveKind,
}

impl CurveParams {
    pub fn new(kind: CurveKind, p: u32, q: u32, init: [f64; 2]) -> Result<Self> {
        for (k, v) in init.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(invalid(
                    "init",
                    format!("component {} must be a finite positive real, got {v}", k + 1),
                ));
            }
        }
        Ok(Self { p, q, init, kind })
    }

    pub fn alpha(p: u32, q: u32, a: [f64; 2]) -> Result<Self> {
        Self::new(CurveKind::Alpha, p, q, a)
    }

    pub fn gamma(p: u32, q: u32, b: [f64; 2]) -> Result<Self> {
        Self::new(CurveKind::Gamma, p, q, b)
    }

    /// Ambient complex dimension `n = p + q + 2` of the assembled immersion.
    pub fn n(&self) -> u32 {
        self.p + self.q + 2
    }

    /// The monomial `z_1^{p+1} z_2^{q+1}`.
    pub fn monomial(&self, z: &C2) -> Complex64 {
        z[0].powu(self.p + 1) * z[1].powu(self.q + 1)
    }

    /// Real value of the monomial along the whole curve.
    pub fn line_level(&self) -> f64 {
        self.init[0].powi(self.p as i32 + 1) * self.init[1].powi(self.q as i32 + 1)
    }

    fn sign2(&self) -> f64 {
        match self.kind {
            CurveKind::Alpha => -1.0,
            CurveKind::Gamma => 1.0,
        }
    }

    /// `|z_1|^2 - |z_2|^2` for alpha, `|z_1|^2 + |z_2|^2` for gamma.
    pub fn radial_quantity(&self, z: &C2) -> f64 {
        z[0].norm_sqr() + self.sign2() * z[1].norm_sqr()
    }

    pub fn radial_level(&self) -> f64 {
        self.init[0].powi(2) + self.sign2() * self.init[1].powi(2)
    }

    /// Drifts of the two conserved quantities at `z`, each divided by
    /// `max(1, size of its terms)`.
    pub fn residuals(&self, z: &C2) -> (f64, f64) {
        let radial = (self.radial_quantity(z) - self.radial_level())
            / (z[0].norm_sqr() + z[1].norm_sqr()).max(1.0);
        let m = self.monomial(z);
        let line = (m.re - self.line_level()) / m.norm().max(1.0);
        (radial, line)
    }

    /// Right-hand side of the curve equation at `z`.
    pub fn velocity(&self, t: f64, z: &C2) -> Result<C2> {
        let cm = self.monomial(z).conj();
        let i = Complex64::i();
        let signs = [1.0, -self.sign2()];
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for j in 0..2 {
            let r2 = z[j].norm_sqr();
            if !(r2.sqrt() >= GUARD_RADIUS) {
                return Err(Error::SingularRadius {
                    t,
                    component: j + 1,
                    radius: r2.sqrt(),
                });
            }
            out[j] = i * cm * z[j] * (signs[j] / r2);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Per-step tolerance of the adaptive integrator.
    pub tol: f64,
    /// Number of output samples on each side of `t = 0`.
    pub samples_per_side: usize,
    /// Integration stops once a component modulus exceeds this radius.
    pub escape_radius: f64,
    /// Integration also stops once `|z_1^{p+1} z_2^{q+1}|` exceeds this
    /// multiple of `max(1, c)`, `c` the line level.
    pub escape_growth: f64,
}

impl IntegrationOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            samples_per_side: 200,
            escape_radius: 100.0,
            escape_growth: 1e8,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tol", "must be a positive real"));
        }
        if self.samples_per_side == 0 {
            return Err(invalid("samples_per_side", "must be at least 1"));
        }
        if !(self.escape_radius > 0.0) {
            return Err(invalid("escape_radius", "must be positive"));
        }
        if !(self.escape_growth > 1.0) {
            return Err(invalid("escape_growth", "must exceed 1"));
        }
        Ok(())
    }
}

/// A sampled curve with per-sample drifts of its two conserved quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub params: CurveParams,
    pub ts: Vec<f64>,
    pub points: Vec<C2>,
    pub residual_conserved: Vec<f64>,
    pub residual_line: Vec<f64>,
    /// Tolerance the sample was produced with.
    pub tol: f64,
    /// Set when the requested range was cut short by the escape bounds.
    pub truncated: bool,
}

impl CurveSample {
    fn from_points(params: CurveParams, ts: Vec<f64>, points: Vec<C2>, tol: f64) -> Self {
        let (residual_conserved, residual_line) = points.iter().map(|z| params.residuals(z)).unzip();
        Self {
            params,
            ts,
            points,
            residual_conserved,
            residual_line,
            tol,
            truncated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn max_abs_conserved(&self) -> f64 {
        self.residual_conserved.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_abs_line(&self) -> f64 {
        self.residual_line.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Analytic tangent at sample `i`.
    pub fn velocity(&self, i: usize) -> Result<C2> {
        self.params.velocity(self.ts[i], &self.points[i])
    }

    /// Largest `|z(-t) - conj(z(t))|` over sample pairs with opposite
    /// parameters.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &t) in self.ts.iter().enumerate() {
            if t <= 0.0 {
                continue;
            }
            if let Some(j) = self.ts.iter().position(|&u| u == -t) {
                let (z, w) = (self.points[i], self.points[j]);
                worst = worst.max((w[0] - z[0].conj()).norm()).max((w[1] - z[1].conj()).norm());
            }
        }
        worst
    }
}

fn to_state(z: &C2) -> [f64; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

fn to_point(y: &[f64; 4]) -> C2 {
    [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])]
}

fn start_point(params: &CurveParams) -> C2 {
    [
        Complex64::new(params.init[0], 0.0),
        Complex64::new(params.init[1], 0.0),
    ]
}

fn rhs(params: CurveParams) -> impl Fn(f64, &[f64; 4]) -> Result<[f64; 4]> {
    move |t, y| Ok(to_state(&params.velocity(t, &to_point(y))?))
}

fn escape_test(params: CurveParams, opts: IntegrationOptions) -> impl Fn(&[f64; 4]) -> bool {
    let bound = opts.escape_growth * params.line_level().max(1.0);
    move |y| {
        let z = to_point(y);
        z[0].norm() > opts.escape_radius
            || z[1].norm() > opts.escape_radius
            || params.monomial(&z).norm() > bound
    }
}

/// Integrates the curve equation through the given increasing parameter
/// values (which may straddle 0), starting from the real initial point at
/// `t = 0`. Samples beyond the escape radius are dropped and the result is
/// flagged as truncated.
pub fn integrate_at(params: CurveParams, ts: &[f64], opts: IntegrationOptions) -> Result<CurveSample> {
    opts.validate()?;
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("ts", "parameter values must be strictly increasing"));
    }
    let solver = Integrator::dop853(opts.tol);
    let system = rhs(params);
    let y0 = to_state(&start_point(&params));
    let split = ts.partition_point(|&t| t < 0.0);
    let backward: Vec<f64> = ts[..split].iter().rev().copied().collect();
    let forward = &ts[split..];
    let escaped = escape_test(params, opts);
    let back = solver.solve(&system, 0.0, y0, &backward, |_, y| escaped(y))?;
    let fwd = solver.solve(&system, 0.0, y0, forward, |_, y| escaped(y))?;

    let mut out_ts = Vec::with_capacity(ts.len());
    let mut points = Vec::with_capacity(ts.len());
    for (t, y) in back.ts.iter().zip(&back.ys).rev().chain(fwd.ts.iter().zip(&fwd.ys)) {
        out_ts.push(*t);
        points.push(to_point(y));
    }
    let mut sample = CurveSample::from_points(params, out_ts, points, opts.tol);
    sample.truncated = back.stopped || fwd.stopped;
    Ok(sample)
}

/// Parameter at which the solution first leaves the escape radius going in
/// the direction of `t_end`, or `None` if it stays inside.
fn escape_time(params: CurveParams, t_end: f64, opts: IntegrationOptions) -> Result<Option<f64>> {
    let solver = Integrator::dop853(opts.tol);
    let mut last_inside = None;
    let y0 = to_state(&start_point(&params));
    let escaped = escape_test(params, opts);
    solver.advance(&rhs(params), 0.0, y0, t_end, None, |t_prev, _, _, y| {
        if escaped(y) {
            last_inside = Some(t_prev);
            true
        } else {
            false
        }
    })?;
    Ok(last_inside)
}

fn symmetric_grid(t_max: f64, per_side: usize) -> Vec<f64> {
    let n = per_side as i64;
    (-n..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

fn integrate_symmetric(params: CurveParams, t_max: f64, opts: IntegrationOptions) -> Result<CurveSample> {
    opts.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max", "must be a positive real"));
    }
    let (extent, truncated) = symmetric_extent(params, t_max, opts)?;
    let mut sample = integrate_at(params, &symmetric_grid(extent, opts.samples_per_side), opts)?;
    sample.truncated |= truncated;
    Ok(sample)
}

/// Largest `T <= t_max` such that the solution stays inside the escape
/// bounds on `[-T, T]`, and whether `T < t_max`.
pub fn symmetric_extent(params: CurveParams, t_max: f64, opts: IntegrationOptions) -> Result<(f64, bool)> {
    opts.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max", "must be a positive real"));
    }
    Ok(
        match (escape_time(params, t_max, opts)?, escape_time(params, -t_max, opts)?) {
            (None, None) => (t_max, false),
            (a, b) => (a.unwrap_or(t_max).min(b.map_or(t_max, f64::abs)), true),
        },
    )
}

fn check_kind(params: &CurveParams, kind: CurveKind) -> Result<()> {
    if params.kind != kind {
        return Err(invalid("params", format!("expected a {kind:?} curve")));
    }
    Ok(())
}

/// Samples the alpha curve on `[-t_max, t_max]` (or the symmetric part of it
/// before the solution escapes; the alpha flow blows up in finite time when
/// `p + q >= 1`).
pub fn integrate_alpha(params: CurveParams, t_max: f64, tol: f64) -> Result<CurveSample> {
    integrate_alpha_with(params, t_max, IntegrationOptions::new(tol))
}

pub fn integrate_alpha_with(params: CurveParams, t_max: f64, opts: IntegrationOptions) -> Result<CurveSample> {
    check_kind(&params, CurveKind::Alpha)?;
    integrate_symmetric(params, t_max, opts)
}

/// Samples the gamma curve on `[-t_max, t_max]`.
pub fn integrate_gamma(params: CurveParams, t_max: f64, tol: f64) -> Result<CurveSample> {
    integrate_gamma_with(params, t_max, IntegrationOptions::new(tol))
}

pub fn integrate_gamma_with(params: CurveParams, t_max: f64, opts: IntegrationOptions) -> Result<CurveSample> {
    check_kind(&params, CurveKind::Gamma)?;
    integrate_symmetric(params, t_max, opts)
}

/// Phase `theta_j(s)` of the alpha curve written in the radial parameter
/// `s`, where `|alpha_j|^2 = s^2 + a_j^2`.
pub fn alpha_phase(params: &CurveParams, j: usize, s: f64) -> Result<f64> {
    check_kind(params, CurveKind::Alpha)?;
    if j > 1 {
        return Err(invalid("j", "component index must be 0 or 1"));
    }
    if !s.is_finite() {
        return Err(invalid("s", "must be finite"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let [a1, a2] = params.init;
    let (e1, e2) = (f64::from(params.p + 1), f64::from(params.q + 1));
    let k = e1 / (a1 * a1) + e2 / (a2 * a2);
    let k2 = 0.5 * k * k - e1 / (2.0 * a1.powi(4)) - e2 / (2.0 * a2.powi(4));
    let threshold = 1e-3 * a1.min(a2);
    let aj2 = params.init[j].powi(2);
    // (|monomial|^2 - c^2) / (c^2 x^2) as a function of x
    let bracket = move |x: f64| {
        if x < threshold {
            k + k2 * x * x
        } else {
            let l = e1 * (x * x / (a1 * a1)).ln_1p() + e2 * (x * x / (a2 * a2)).ln_1p();
            l.exp_m1() / (x * x)
        }
    };
    let integrand = move |x: f64| 1.0 / ((x * x + aj2) * bracket(x).sqrt());
    let r = Quadrature::default().integrate(integrand, 0.0, s.abs())?;
    Ok(r.value.copysign(s))
}

/// Closed-form alpha curve `(rho_1 e^{i theta_1}, rho_2 e^{i theta_2})` in
/// the radial parameter `s`.
pub fn alpha_closed_form(params: &CurveParams, s: f64) -> Result<C2> {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (j, o) in out.iter_mut().enumerate() {
        let rho = s.hypot(params.init[j]);
        *o = Complex64::from_polar(rho, alpha_phase(params, j, s)?);
    }
    Ok(out)
}

/// Scale `lambda > 0` with `lambda^{p+q} = (p+1)^p (q+1)^q`; `1` when
/// `p = q = 0`.
pub fn special_lambda(p: u32, q: u32) -> f64 {
    if p + q == 0 {
        return 1.0;
    }
    let (pf, qf) = (f64::from(p), f64::from(q));
    ((pf * (pf + 1.0).ln() + qf * (qf + 1.0).ln()) / (pf + qf)).exp()
}

/// Explicit gamma curve with constant radii (the equality case).
pub fn gamma_special(p: u32, q: u32, t: f64) -> C2 {
    let (p1, q1) = (f64::from(p) + 1.0, f64::from(q) + 1.0);
    let scale = special_lambda(p, q).sqrt().recip();
    [
        Complex64::from_polar(scale * p1.sqrt(), (q1 / p1).sqrt() * t),
        Complex64::from_polar(scale * q1.sqrt(), -(p1 / q1).sqrt() * t),
    ]
}

/// Initial point `gamma_special(p, q, 0)`.
pub fn gamma_special_init(p: u32, q: u32) -> [f64; 2] {
    let z = gamma_special(p, q, 0.0);
    [z[0].re, z[1].re]
}

/// Samples `gamma_special` on `[-t_max, t_max]` with the conserved-quantity
/// drifts evaluated on the exact points.
pub fn gamma_special_sample(p: u32, q: u32, t_max: f64, samples_per_side: usize) -> Result<CurveSample> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max", "must be a positive real"));
    }
    if samples_per_side == 0 {
        return Err(invalid("samples_per_side", "must be at least 1"));
    }
    gamma_special_at(p, q, &symmetric_grid(t_max, samples_per_side))
}

/// Samples `gamma_special` at the given increasing parameter values.
pub fn gamma_special_at(p: u32, q: u32, ts: &[f64]) -> Result<CurveSample> {
    if ts.windows(2).any(|w| !(w[1] > w[0])) || ts.iter().any(|t| !t.is_finite()) {
        return Err(invalid("ts", "parameter values must be finite and strictly increasing"));
    }
    let params = CurveParams::gamma(p, q, gamma_special_init(p, q))?;
    let points = ts.iter().map(|&t| gamma_special(p, q, t)).collect();
    Ok(CurveSample::from_points(params, ts.to_vec(), points, 0.0))
}

/// Turning values of `x = |gamma_1|^2 / |gamma|^2` along a gamma curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalRadii {
    /// Equality case: `x` is constant.
    Double(f64),
    /// `x` oscillates between the two roots.
    Pair(f64, f64),
}

impl CriticalRadii {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Self::Double(x) => vec![x],
            Self::Pair(lo, hi) => vec![lo, hi],
        }
    }
}

/// Roots in `[0, 1]` of `r2^n x^{p+1} (1-x)^{q+1} = c^2` for an arbitrary
/// radius level `r2 = |gamma|^2` and line level `c`.
pub fn critical_radii_for_levels(p: u32, q: u32, r2: f64, c: f64) -> Result<CriticalRadii> {
    if !(r2 > 0.0 && c > 0.0) {
        return Err(invalid("levels", "radius and line levels must be positive"));
    }
    let (e1, e2) = (f64::from(p + 1), f64::from(q + 1));
    let n = e1 + e2;
    // log of the left side over the right side
    let g = |x: f64| n * r2.ln() + e1 * x.ln() + e2 * (1.0 - x).ln() - 2.0 * c.ln();
    let x_star = e1 / n;
    let peak = g(x_star);
    if peak.abs() <= 1e-12 {
        return Ok(CriticalRadii::Double(x_star));
    }
    if peak < 0.0 {
        return Err(Error::InequalityViolated);
    }
    Ok(CriticalRadii::Pair(bisect(g, 0.0, x_star), bisect(g, x_star, 1.0)))
}

fn gamma_levels(p: u32, q: u32, b: [f64; 2]) -> Result<(f64, f64)> {
    let params = CurveParams::gamma(p, q, b)?;
    Ok((params.radial_level(), params.line_level()))
}

pub fn critical_radii(p: u32, q: u32, b: [f64; 2]) -> Result<CriticalRadii> {
    let (r2, c) = gamma_levels(p, q, b)?;
    critical_radii_for_levels(p, q, r2, c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    pub p: u32,
    pub q: u32,
    pub b: [f64; 2],
    /// Period of the radii (quadrature), or the fundamental period of the
    /// curve in the equality case.
    pub period: f64,
    /// Period measured between consecutive minima of `|gamma_1|` on the
    /// integrated curve.
    pub period_events: Option<f64>,
    pub critical_radii: CriticalRadii,
    /// `(c / 2 pi) int_0^T dt / |gamma_j|^2` over one period.
    pub winding_integrals: [f64; 2],
    /// Best rational approximations of the winding integrals.
    pub candidates: Option<[Ratio<i64>; 2]>,
    /// Present when both candidates lie within the tolerance.
    pub closed: Option<[Ratio<i64>; 2]>,
}

/// The three period integrals `int dx / sqrt(F)`, `int dx / (x sqrt(F))`,
/// `int dx / ((1-x) sqrt(F))` over `[lo, hi]`, with
/// `F = r2^n x^{p+1} (1-x)^{q+1} - c^2`.
fn period_integrals(p: u32, q: u32, c: f64, lo: f64, hi: f64) -> Result<[f64; 3]> {
    let (e1, e2) = (f64::from(p + 1), f64::from(q + 1));
    let width = hi - lo;
    // F from the nearer root, x = lo + width sin^2(theta / 2)
    let eval = move |theta: f64| -> (f64, f64) {
        let half = 0.5 * theta;
        let (x, root, delta) = if theta <= 0.5 * PI {
            let d = width * half.sin().powi(2);
            (lo + d, lo, d)
        } else {
            let d = -width * half.cos().powi(2);
            (hi + d, hi, d)
        };
        let l = e1 * (delta / root).ln_1p() + e2 * (-delta / (1.0 - root)).ln_1p();
        let f = c * c * l.exp_m1().max(0.0);
        (x, 0.5 * width * theta.sin() / f.sqrt())
    };
    let quad = Quadrature::default();
    let plain = quad.integrate(|th| eval(th).1, 0.0, PI)?.value;
    let first = quad
        .integrate(|th| {
            let (x, w) = eval(th);
            w / x
        }, 0.0, PI)?
        .value;
    let second = quad
        .integrate(|th| {
            let (x, w) = eval(th);
            w / (1.0 - x)
        }, 0.0, PI)?
        .value;
    Ok([plain, first, second])
}

/// Period of the radii measured on the integrated curve: the distance
/// between two consecutive minima of `|gamma_1|` (sign changes of
/// `Im(gamma_1^{p+1} gamma_2^{q+1})` from negative to positive).
pub fn gamma_period_events(p: u32, q: u32, b: [f64; 2], tol: f64, horizon: f64) -> Result<f64> {
    let params = CurveParams::gamma(p, q, b)?;
    let system = rhs(params);
    let solver = Integrator::dop853(tol);
    let im_m = |y: &[f64; 4]| params.monomial(&to_point(y)).im;
    let mut brackets: Vec<(f64, [f64; 4], f64)> = Vec::new();
    let y0 = to_state(&start_point(&params));
    solver.advance(&system, 0.0, y0, horizon, None, |tp, yp, t, y| {
        if im_m(yp) < 0.0 && im_m(y) >= 0.0 {
            brackets.push((tp, *yp, t));
        }
        brackets.len() >= 2
    })?;
    if brackets.len() < 2 {
        return Err(Error::NonConvergence {
            iterations: brackets.len(),
            residual: horizon,
        });
    }
    let mut minima = [0.0; 2];
    for (slot, &(tp, yp, t)) in minima.iter_mut().zip(&brackets) {
        let f = |tau: f64| -> Result<f64> {
            let run = solver.advance(&system, tp, yp, tau, None, |_, _, _, _| false)?;
            Ok(im_m(&run.y))
        };
        *slot = brent(f, tp, t, 1e-14 * t.abs().max(1.0))?;
    }
    Ok(minima[1] - minima[0])
}

fn equality_report(p: u32, q: u32, b: [f64; 2], x: f64) -> Result<PeriodReport> {
    let (r2, c) = gamma_levels(p, q, b)?;
    let (e1, e2) = (u64::from(p + 1), u64::from(q + 1));
    let n = (e1 + e2) as f64;
    // phase rates c / |gamma_j|^2 = K / (p+1) and K / (q+1)
    let k = c * n / r2;
    let lcm = e1 / gcd(e1, e2) * e2;
    let period = 2.0 * PI * lcm as f64 / k;
    let windings = [(lcm / e1) as i64, (lcm / e2) as i64];
    let exact = [Ratio::from_integer(windings[0]), Ratio::from_integer(windings[1])];
    Ok(PeriodReport {
        p,
        q,
        b,
        period,
        period_events: None,
        critical_radii: CriticalRadii::Double(x),
        winding_integrals: [windings[0] as f64, windings[1] as f64],
        candidates: Some(exact),
        closed: Some(exact),
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Period of the radii of `gamma_b` by quadrature of the turning-point
/// equation, cross-checked against event detection on the integrated curve.
pub fn gamma_period(p: u32, q: u32, b: [f64; 2]) -> Result<PeriodReport> {
    let (r2, c) = gamma_levels(p, q, b)?;
    let radii = critical_radii_for_levels(p, q, r2, c)?;
    let (lo, hi) = match radii {
        CriticalRadii::Double(_) => return Err(Error::EqualityCase),
        CriticalRadii::Pair(lo, hi) => (lo, hi),
    };
    let [plain, first, second] = period_integrals(p, q, c, lo, hi)?;
    let period = r2 * plain;
    let events = gamma_period_events(p, q, b, 1e-12, 4.0 * period)?;
    if (events - period).abs() > 1e-6 * period {
        return Err(Error::PeriodMismatch {
            quadrature: period,
            events,
        });
    }
    Ok(PeriodReport {
        p,
        q,
        b,
        period,
        period_events: Some(events),
        critical_radii: radii,
        winding_integrals: [c * first / (2.0 * PI), c * second / (2.0 * PI)],
        candidates: None,
        closed: None,
    })
}

/// Closedness classifier: the curve closes after one radial period exactly
/// when both winding integrals are rational. Reports the best rational
/// approximations with denominator at most `max_denominator`, and declares
/// the curve closed when both lie within `tol`.
pub fn gamma_closedness(p: u32, q: u32, b: [f64; 2], tol: f64, max_denominator: u32) -> Result<PeriodReport> {
    if !(tol >= 0.0) {
        return Err(invalid("tol", "must be nonnegative"));
    }
    if max_denominator == 0 {
        return Err(invalid("max_denominator", "must be at least 1"));
    }
    if let CriticalRadii::Double(x) = critical_radii(p, q, b)? {
        return equality_report(p, q, b, x);
    }
    let mut report = gamma_period(p, q, b)?;
    let cands = report.winding_integrals.map(|w| best_rational(w, max_denominator));
    let within = cands
        .iter()
        .zip(&report.winding_integrals)
        .all(|(r, w)| (to_f64(*r) - w).abs() <= tol);
    report.candidates = Some(cands);
    report.closed = within.then_some(cands);
    Ok(report)
}

/// Principal `n`-th root of `c + i s`.
pub fn gamma_c_curve(n: u32, c: f64, s: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(invalid("n", "exponent must be at least 1"));
    }
    if !(c >= 0.0) || !c.is_finite() || !s.is_finite() {
        return Err(invalid("c", "c must be a nonnegative real and s finite"));
    }
    if c == 0.0 && s == 0.0 {
        return Err(Error::VertexSingularity);
    }
    let nf = f64::from(n);
    Ok(Complex64::from_polar(c.hypot(s).powf(1.0 / nf), s.atan2(c) / nf))
}

/// Derivative of [`gamma_c_curve`] in `s`: `i / (n gamma^{n-1})`.
pub fn gamma_c_derivative(n: u32, c: f64, s: f64) -> Result<Complex64> {
    let z = gamma_c_curve(n, c, s)?;
    Ok(Complex64::i() / (f64::from(n) * z.powu(n - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn initial_velocities() {
        let a = CurveParams::alpha(0, 0, [1.0, 1.0]).unwrap();
        let v = a.velocity(0.0, &start_point(&a)).unwrap();
        assert!((v[0] - c(0.0, 1.0)).norm() < 1e-15 && (v[1] - c(0.0, 1.0)).norm() < 1e-15);
        let g = CurveParams::gamma(0, 0, [1.0, 1.0]).unwrap();
        let v = g.velocity(0.0, &start_point(&g)).unwrap();
        assert!((v[0] - c(0.0, 1.0)).norm() < 1e-15 && (v[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_initial_data() {
        assert!(CurveParams::alpha(0, 0, [0.0, 1.0]).is_err());
        assert!(CurveParams::gamma(0, 0, [1.0, -2.0]).is_err());
        let a = CurveParams::alpha(0, 0, [1.0, 1.0]).unwrap();
        assert!(integrate_gamma(a, 1.0, 1e-10).is_err());
        assert!(integrate_alpha(a, 0.0, 1e-10).is_err());
        assert!(integrate_alpha(a, 1.0, 0.0).is_err());
    }

    #[test]
    fn alpha_difference_of_squares_conserved() {
        let a = CurveParams::alpha(0, 0, [1.0, 1.0]).unwrap();
        let s = integrate_alpha(a, 1.0, 1e-10).unwrap();
        assert_eq!(s.ts.len(), 401);
        assert!(!s.truncated);
        assert!(s.max_abs_conserved() < 1e-8);
    }

    #[test]
    fn alpha_with_equal_data_is_a_hyperbola() {
        // alpha_1 = alpha_2 = cosh t + i sinh t
        let a = CurveParams::alpha(0, 0, [1.0, 1.0]).unwrap();
        let s = integrate_alpha(a, 2.0, 1e-11).unwrap();
        for (t, z) in s.ts.iter().zip(&s.points) {
            let exact = c(t.cosh(), t.sinh());
            assert!((z[0] - exact).norm() < 1e-8 * exact.norm());
        }
    }

    #[test]
    fn alpha_line_level_is_conserved() {
        let a = CurveParams::alpha(2, 3, [1.0, 2.0]).unwrap();
        assert_eq!(a.line_level(), 16.0);
        let s = integrate_alpha(a, 1.0, 1e-10).unwrap();
        assert!(s.truncated, "this flow escapes before t = 1");
        assert!(s.max_abs_line() < 1e-8);
        assert!(s.max_abs_conserved() < 1e-8);
        assert!(s.conjugate_symmetry_defect() < 1e-9 * 100.0);
    }

    #[test]
    fn gamma_sum_of_squares_conserved() {
        let g = CurveParams::gamma(1, 0, [1.0, 0.5f64.sqrt()]).unwrap();
        let s = integrate_gamma(g, 10.0, 1e-10).unwrap();
        let worst = s
            .points
            .iter()
            .map(|z| (z[0].norm_sqr() + z[1].norm_sqr() - 1.5).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn integrated_gamma_matches_special_curve() {
        let g = CurveParams::gamma(1, 0, gamma_special_init(1, 0)).unwrap();
        let s = integrate_gamma(g, 10.0, 1e-10).unwrap();
        for (t, z) in s.ts.iter().zip(&s.points) {
            let w = gamma_special(1, 0, *t);
            assert!((z[0] - w[0]).norm() < 1e-6 && (z[1] - w[1]).norm() < 1e-6);
        }
    }

    #[test]
    fn special_curve_examples() {
        assert!((special_lambda(1, 0) - 2.0).abs() < 1e-15);
        let z = gamma_special(1, 0, 0.0);
        assert!((z[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((z[1] - c(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
        for t in [0.3, 1.7, -4.0] {
            let z = gamma_special(1, 0, t);
            assert!((z[0] * z[0] * z[1] - c(0.5f64.sqrt(), 0.0)).norm() < 1e-14);
            let u = gamma_special(0, 0, t);
            assert!((u[0] - c(t.cos(), t.sin())).norm() < 1e-15);
            assert!((u[1] - c(t.cos(), -t.sin())).norm() < 1e-15);
        }
        let s = gamma_special_sample(2, 1, 3.0, 20).unwrap();
        assert!(s.max_abs_conserved() < 1e-14 && s.max_abs_line() < 1e-13);
    }

    #[test]
    fn special_lambda_solves_its_equation() {
        for p in 0..5u32 {
            for q in 0..5u32 {
                if p + q == 0 {
                    continue;
                }
                let l = special_lambda(p, q);
                let lhs = l.powi((p + q) as i32);
                let rhs = f64::from(p + 1).powi(p as i32) * f64::from(q + 1).powi(q as i32);
                assert!((lhs - rhs).abs() < 1e-12 * rhs);
            }
        }
    }

    #[test]
    fn critical_radii_examples() {
        assert_eq!(critical_radii(0, 0, [1.0, 1.0]).unwrap(), CriticalRadii::Double(0.5));
        match critical_radii(0, 0, [1.0, 0.5]).unwrap() {
            CriticalRadii::Pair(lo, hi) => {
                assert!((lo - 0.2).abs() < 1e-14 && (hi - 0.8).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        match critical_radii(1, 0, gamma_special_init(1, 0)).unwrap() {
            CriticalRadii::Double(x) => assert!((x - 2.0 / 3.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            critical_radii_for_levels(0, 0, 2.0, 1.5),
            Err(Error::InequalityViolated)
        );
    }

    #[test]
    fn initial_radius_is_always_a_root() {
        for (p, q, b) in [(2, 1, [0.9, 0.7]), (0, 3, [1.3, 0.6]), (4, 4, [0.5, 2.0])] {
            let x0 = b[0] * b[0] / (b[0] * b[0] + b[1] * b[1]);
            let roots = critical_radii(p, q, b).unwrap().values();
            assert!(roots.iter().any(|r| (r - x0).abs() < 1e-12), "{roots:?} vs {x0}");
        }
    }

    #[test]
    fn period_of_linear_case_is_pi() {
        let r = gamma_period(0, 0, [1.0, 0.5]).unwrap();
        assert!((r.period - PI).abs() < 1e-10, "{}", r.period);
        let e = r.period_events.unwrap();
        assert!((e - r.period).abs() < 1e-6 * r.period);
        assert!((r.winding_integrals[0] - 0.5).abs() < 1e-10);
        assert!((r.winding_integrals[1] - 0.5).abs() < 1e-10);
        assert_eq!(gamma_period(0, 0, [1.0, 1.0]), Err(Error::EqualityCase));
    }

    #[test]
    fn period_agrees_with_events_for_higher_exponents() {
        let r = gamma_period(2, 1, [0.9, 0.7]).unwrap();
        let e = r.period_events.unwrap();
        assert!((e - r.period).abs() < 1e-6 * r.period);
        // the radii stay between the turning values along the orbit
        let g = CurveParams::gamma(2, 1, [0.9, 0.7]).unwrap();
        let s = integrate_gamma(g, r.period, 1e-11).unwrap();
        let CriticalRadii::Pair(lo, hi) = r.critical_radii else {
            panic!()
        };
        let r2 = g.radial_level();
        for z in &s.points {
            let x = z[0].norm_sqr() / r2;
            assert!(x >= lo - 1e-9 && x <= hi + 1e-9);
        }
    }

    #[test]
    fn closedness_classification() {
        let r = gamma_closedness(1, 0, gamma_special_init(1, 0), 1e-9, 50).unwrap();
        assert_eq!(r.closed, Some([Ratio::from_integer(1), Ratio::from_integer(2)]));
        assert!((r.period - 2.0 * 2f64.sqrt() * PI).abs() < 1e-12);
        let r = gamma_closedness(0, 0, [1.0, 1.0], 1e-9, 50).unwrap();
        assert!((r.period - 2.0 * PI).abs() < 1e-12);
        assert!(r.closed.is_some());
        let r = gamma_closedness(0, 0, [1.0, 0.5], 1e-8, 50).unwrap();
        assert_eq!(r.closed, Some([Ratio::new(1, 2), Ratio::new(1, 2)]));
    }

    #[test]
    fn special_curve_closes_after_its_fundamental_period() {
        let r = gamma_closedness(1, 0, gamma_special_init(1, 0), 1e-9, 50).unwrap();
        let z0 = gamma_special(1, 0, 0.0);
        let z1 = gamma_special(1, 0, r.period);
        assert!((z0[0] - z1[0]).norm() < 1e-12 && (z0[1] - z1[1]).norm() < 1e-12);
        let half = gamma_special(1, 0, 0.5 * r.period);
        assert!((z0[0] - half[0]).norm() > 0.1 || (z0[1] - half[1]).norm() > 0.1);
    }

    #[test]
    fn gamma_c_examples() {
        assert!((gamma_c_curve(2, 1.0, 0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let z = gamma_c_curve(2, 1.0, 3f64.sqrt()).unwrap();
        assert!((z - Complex64::from_polar(2f64.sqrt(), PI / 6.0)).norm() < 1e-15);
        let z = gamma_c_curve(3, 0.0, 1.0).unwrap();
        assert!((z - Complex64::from_polar(1.0, PI / 6.0)).norm() < 1e-15);
        assert_eq!(gamma_c_curve(3, 0.0, 0.0), Err(Error::VertexSingularity));
    }

    #[test]
    fn gamma_c_derivative_matches_differences() {
        for (n, cc, s) in [(2, 1.0, 0.3), (3, 0.5, -1.2), (5, 2.0, 4.0)] {
            let h = 1e-6;
            let fd = (gamma_c_curve(n, cc, s + h).unwrap() - gamma_c_curve(n, cc, s - h).unwrap()) / (2.0 * h);
            assert!((fd - gamma_c_derivative(n, cc, s).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn closed_form_examples() {
        let a = CurveParams::alpha(3, 1, [0.7, 1.4]).unwrap();
        let z = alpha_closed_form(&a, 0.0).unwrap();
        assert_eq!(z, [c(0.7, 0.0), c(1.4, 0.0)]);
        let a = CurveParams::alpha(0, 0, [1.0, 1.0]).unwrap();
        let z = alpha_closed_form(&a, 0.5).unwrap();
        assert!((z[0].norm() - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((z[0] - z[1]).norm() < 1e-15);
        // on the hyperbola cosh t + i sinh t the radial parameter is sqrt(2) sinh t
        let t: f64 = 0.4;
        let s = (2.0 * t.cosh().powi(2) - 1.0 - 1.0).sqrt();
        let w = alpha_closed_form(&a, s).unwrap();
        assert!((w[0] - c(t.cosh(), t.sinh())).norm() < 1e-10, "{w:?}");
    }

    #[test]
    fn closed_form_agrees_with_integration() {
        let a = CurveParams::alpha(1, 0, [1.0, 1.0]).unwrap();
        // find the parameter t at which s = 0.7 on the integrated curve
        let target = 0.7f64;
        let f = |t: f64| -> Result<f64> {
            let s = integrate_at(a, &[0.0, t], IntegrationOptions::new(1e-12))?;
            Ok(s.points[1][0].norm_sqr() - 1.0 - target * target)
        };
        let t = brent(f, 1e-3, 0.6, 1e-14).unwrap();
        let z = integrate_at(a, &[0.0, t], IntegrationOptions::new(1e-12)).unwrap().points[1];
        let w = alpha_closed_form(&a, target).unwrap();
        assert!((z[0] - w[0]).norm() < 1e-6 && (z[1] - w[1]).norm() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conservation_and_symmetry(
            p in 0u32..=4, q in 0u32..=4,
            x in 0.5f64..2.0, y in 0.5f64..2.0,
            gamma in any::<bool>(),
        ) {
            let tol = 1e-10;
            let params = if gamma {
                CurveParams::gamma(p, q, [x, y]).unwrap()
            } else {
                CurveParams::alpha(p, q, [x, y]).unwrap()
            };
            let opts = IntegrationOptions { samples_per_side: 40, ..IntegrationOptions::new(tol) };
            let s = integrate_symmetric(params, 1.0, opts).unwrap();
            prop_assert!(s.max_abs_conserved() <= 100.0 * tol);
            prop_assert!(s.max_abs_line() <= 100.0 * tol);
            let scale = s.points.iter().map(|z| z[0].norm().max(z[1].norm())).fold(1.0, f64::max);
            prop_assert!(s.conjugate_symmetry_defect() <= 10.0 * tol * scale);
        }

        #[test]
        fn phase_is_odd_and_increasing(
            p in 0u32..=4, q in 0u32..=4,
            x in 0.5f64..2.0, y in 0.5f64..2.0,
            s in 0.01f64..3.0,
        ) {
            let a = CurveParams::alpha(p, q, [x, y]).unwrap();
            for j in 0..2 {
                let th = alpha_phase(&a, j, s).unwrap();
                prop_assert!(th > 0.0);
                prop_assert!((alpha_phase(&a, j, -s).unwrap() + th).abs() < 1e-15);
                prop_assert!(alpha_phase(&a, j, 1.01 * s).unwrap() > th);
            }
        }

        #[test]
        fn closed_form_matches_integration(
            p in 0u32..=4, q in 0u32..=4,
            x in 0.5f64..2.0, y in 0.5f64..2.0,
            t in 0.001f64..0.05,
        ) {
            let a = CurveParams::alpha(p, q, [x, y]).unwrap();
            let sample = integrate_at(a, &[-t, 0.0, t], IntegrationOptions::new(1e-12)).unwrap();
            prop_assume!(!sample.truncated);
            for (k, z) in [sample.points[0], sample.points[2]].iter().enumerate() {
                let s = (z[0].norm_sqr() - x * x).max(0.0).sqrt() * if k == 0 { -1.0 } else { 1.0 };
                let w = alpha_closed_form(&a, s).unwrap();
                prop_assert!((z[0] - w[0]).norm() < 1e-6 && (z[1] - w[1]).norm() < 1e-6);
            }
        }
    }
}
