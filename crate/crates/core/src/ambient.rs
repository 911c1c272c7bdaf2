//! Higher-dimensional immersions assembled from a surface (or a plane curve)
//! and Legendrian factors, with the Lagrangian phase read off an
//! orthonormal tangent frame.

use num_complex::Complex64;

use crate::curves::{gamma_c_curve, gamma_c_derivative};
use crate::error::{Error, Result};
use crate::legendrian::{check_legendrian, LegendrianMap};
use crate::matrix_orbits::CMatrix;
use crate::numeric::linalg::{column_determinant, gram_schmidt, orthonormality_defect};
use crate::numeric::{circular_stats, halton_point, CircularStats};
use crate::surfaces::{frame_angle, SurfaceGrid, ZERO_COMPONENT};

/// Tolerance of the factor contact-condition check.
pub const LEGENDRIAN_TOL: f64 = 1e-9;
/// Halton points used, besides the evaluation point, to validate a factor.
pub const LEGENDRIAN_PROBES: u64 = 8;
pub const ORTHONORMAL_TOL: f64 = 1e-8;
pub const UNIT_DET_TOL: f64 = 1e-6;

/// Tangent frame of an assembled immersion at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientFrame {
    pub point: Vec<Complex64>,
    /// Orthonormal real frame, surface (or curve) block first.
    pub frame: Vec<Vec<Complex64>>,
    /// `det(frame) / |det(frame)|`.
    pub phase: Complex64,
    pub det_modulus: f64,
    /// Scale of each block in the induced metric: `1` for the base, then the
    /// modulus multiplying each factor.
    pub metric_blocks: Vec<f64>,
    pub orthonormality_defect: f64,
}

impl AmbientFrame {
    fn from_blocks(point: Vec<Complex64>, frame: Vec<Vec<Complex64>>, metric_blocks: Vec<f64>) -> Result<Self> {
        let defect = orthonormality_defect(&frame);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::FrameNotOrthonormal { deviation: defect });
        }
        let det = column_determinant(&frame);
        let modulus = det.norm();
        if !((modulus - 1.0).abs() <= UNIT_DET_TOL) {
            return Err(Error::NonUnitaryFrame { modulus });
        }
        Ok(Self {
            point,
            phase: det / modulus,
            det_modulus: modulus,
            frame,
            metric_blocks,
            orthonormality_defect: defect,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// Applies the unitary matrix `a` to the point and every frame vector.
    pub fn rotated(&self, a: &CMatrix) -> Result<AmbientFrame> {
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            (0..a.nrows())
                .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * v[c]).sum())
                .collect()
        };
        AmbientFrame::from_blocks(
            apply(&self.point),
            self.frame.iter().map(|v| apply(v)).collect(),
            self.metric_blocks.clone(),
        )
    }
}

fn check_factor(map: &LegendrianMap, dim: u32, x: &[f64], label: &str) -> Result<()> {
    let dim = dim as usize;
    if map.domain_dim != dim || map.ambient_dim != dim + 1 {
        return Err(Error::ExponentMismatch(format!(
            "{label} factor `{}` maps a {}-dimensional domain into C^{}, expected {dim} into C^{}",
            map.name,
            map.domain_dim,
            map.ambient_dim,
            dim + 1
        )));
    }
    if x.len() != dim {
        return Err(Error::ExponentMismatch(format!(
            "{label} factor expects {dim} parameters, got {}",
            x.len()
        )));
    }
    check_legendrian(map, x, LEGENDRIAN_PROBES, LEGENDRIAN_TOL)
}

fn embed(head: &[Complex64], head_len: usize, tail: &[Complex64], total: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    v[..head.len()].copy_from_slice(head);
    v[head_len..head_len + tail.len()].copy_from_slice(tail);
    v
}

fn surface_components(surface: &SurfaceGrid, u: (usize, usize)) -> Result<usize> {
    let (i, j) = u;
    if i >= surface.nt() || j >= surface.ns() {
        return Err(crate::error::invalid("u", "grid index out of range"));
    }
    let k = surface.index(i, j);
    for (c, w) in surface.points[k].iter().enumerate() {
        if !(w.norm() >= ZERO_COMPONENT) {
            return Err(Error::ZeroComponent { i, j, component: c + 1 });
        }
    }
    Ok(k)
}

/// Orthonormalized factor block `{unit * t_k}` for the tangents `t_k` of a
/// factor map.
fn factor_block(unit: Complex64, tangents: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let scaled: Vec<Vec<Complex64>> = tangents.iter().map(|t| t.iter().map(|w| unit * w).collect()).collect();
    gram_schmidt(&scaled).map_err(|_| Error::DegenerateFrame("factor tangents are dependent (chart pole)".into()))
}

/// Frame of `(u, x, y) -> (z_1(u) psi(x), z_2(u) phi(y))` at grid node `u`.
pub fn assemble_theorem1(
    surface: &SurfaceGrid,
    psi: &LegendrianMap,
    phi: &LegendrianMap,
    u: (usize, usize),
    x: &[f64],
    y: &[f64],
) -> Result<AmbientFrame> {
    check_factor(psi, surface.p, x, "first")?;
    check_factor(phi, surface.q, y, "second")?;
    let k = surface_components(surface, u)?;
    let z = surface.points[k];
    let (px, py) = (psi.eval(x), phi.eval(y));
    let (m1, m2) = (px.len(), py.len());
    let n = m1 + m2;
    let lift = |w: &[Complex64; 2]| -> Vec<Complex64> {
        let a: Vec<Complex64> = px.iter().map(|v| w[0] * v).collect();
        let b: Vec<Complex64> = py.iter().map(|v| w[1] * v).collect();
        embed(&a, m1, &b, n)
    };
    let point = lift(&z);
    let mut frame = gram_schmidt(&[lift(&surface.d_t[k]), lift(&surface.d_s[k])])?;
    let u1 = z[0] / z[0].norm();
    let u2 = z[1] / z[1].norm();
    for v in factor_block(u1, &psi.tangent(x))? {
        frame.push(embed(&v, m1, &[], n));
    }
    for v in factor_block(u2, &phi.tangent(y))? {
        frame.push(embed(&[], m1, &v, n));
    }
    AmbientFrame::from_blocks(point, frame, vec![1.0, z[0].norm(), z[1].norm()])
}

/// Frame of `(s, x) -> gamma_c(s) psi(x)` with `gamma_c^n = c + i s`.
pub fn assemble_prop_a(curve_n: u32, c: f64, psi: &LegendrianMap, s: f64, x: &[f64]) -> Result<AmbientFrame> {
    if curve_n == 0 {
        return Err(crate::error::invalid("curve_n", "must be at least 1"));
    }
    check_factor(psi, curve_n - 1, x, "sphere")?;
    let g = gamma_c_curve(curve_n, c, s)?;
    let dg = gamma_c_derivative(curve_n, c, s)?;
    let z = psi.eval(x);
    let point: Vec<Complex64> = z.iter().map(|w| g * w).collect();
    let unit = g / g.norm();
    let mut columns = vec![z.iter().map(|w| dg * w).collect::<Vec<_>>()];
    columns.extend(psi.tangent(x).iter().map(|t| t.iter().map(|w| unit * w).collect::<Vec<_>>()));
    let frame = gram_schmidt(&columns)?;
    AmbientFrame::from_blocks(point, frame, vec![1.0, g.norm()])
}

/// Determinant of `{f, orthonormalized tangents of f}` for a factor map.
fn factor_determinant(map: &LegendrianMap, x: &[f64]) -> Result<Complex64> {
    let mut cols = vec![map.eval(x)];
    cols.extend(factor_block(Complex64::new(1.0, 0.0), &map.tangent(x))?);
    Ok(column_determinant(&cols))
}

/// `|phase - (-1)^p e^{i(beta + p arg z_1 + q arg z_2)} det B det C|` where
/// `B`, `C` are the factor determinants.
pub fn phase_identity_check(
    surface: &SurfaceGrid,
    psi: &LegendrianMap,
    phi: &LegendrianMap,
    u: (usize, usize),
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let frame = assemble_theorem1(surface, psi, phi, u, x, y)?;
    let k = surface.index(u.0, u.1);
    let z = surface.points[k];
    let base = frame_angle(&surface.d_t[k], &surface.d_s[k])?.phase;
    let sign = if surface.p % 2 == 0 { 1.0 } else { -1.0 };
    let expected = base
        * (z[0] / z[0].norm()).powu(surface.p)
        * (z[1] / z[1].norm()).powu(surface.q)
        * factor_determinant(psi, x)?
        * factor_determinant(phi, y)?
        * sign;
    Ok((frame.phase - expected).norm())
}

/// A sample location `(u, x, y)` for the product construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSample {
    pub u: (usize, usize),
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Halton points over grid nodes and both factor parameter boxes.
pub fn product_samples(surface: &SurfaceGrid, psi: &LegendrianMap, phi: &LegendrianMap, count: usize) -> Vec<ProductSample> {
    let (dp, dq) = (psi.domain_dim, phi.domain_dim);
    (0..count as u64)
        .map(|k| {
            let h = halton_point(k, 2 + dp + dq);
            let node = |v: f64, n: usize| ((v * n as f64) as usize).min(n - 1);
            let scale = |vals: &[f64], map: &LegendrianMap| -> Vec<f64> {
                vals.iter().zip(&map.ranges).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect()
            };
            ProductSample {
                u: (node(h[0], surface.nt()), node(h[1], surface.ns())),
                x: scale(&h[2..2 + dp], psi),
                y: scale(&h[2 + dp..], phi),
            }
        })
        .collect()
}

/// Phases and worst phase-identity residual over product samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSurvey {
    pub stats: CircularStats,
    pub max_identity_residual: f64,
    pub max_orthonormality_defect: f64,
    pub samples: usize,
}

pub fn survey_product(
    surface: &SurfaceGrid,
    psi: &LegendrianMap,
    phi: &LegendrianMap,
    count: usize,
) -> Result<PhaseSurvey> {
    let mut phases = Vec::with_capacity(count);
    let (mut worst_id, mut worst_on) = (0.0f64, 0.0f64);
    for smp in product_samples(surface, psi, phi, count) {
        let f = assemble_theorem1(surface, psi, phi, smp.u, &smp.x, &smp.y)?;
        worst_id = worst_id.max(phase_identity_check(surface, psi, phi, smp.u, &smp.x, &smp.y)?);
        worst_on = worst_on.max(f.orthonormality_defect);
        phases.push(f.phase);
    }
    Ok(PhaseSurvey {
        stats: circular_stats(&phases),
        max_identity_residual: worst_id,
        max_orthonormality_defect: worst_on,
        samples: phases.len(),
    })
}

/// Circular statistics of the phase of `(s, x) -> gamma_c(s) psi(x)` over
/// Halton points of `s_range × (parameter box of psi)`.
pub fn survey_prop_a(curve_n: u32, c: f64, psi: &LegendrianMap, s_range: (f64, f64), count: usize) -> Result<PhaseSurvey> {
    let mut phases = Vec::with_capacity(count);
    let mut worst_on = 0.0f64;
    for k in 0..count as u64 {
        let h = halton_point(k, 1 + psi.domain_dim);
        let s = s_range.0 + h[0] * (s_range.1 - s_range.0);
        let x: Vec<f64> = h[1..].iter().zip(&psi.ranges).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect();
        let f = assemble_prop_a(curve_n, c, psi, s, &x)?;
        worst_on = worst_on.max(f.orthonormality_defect);
        phases.push(f.phase);
    }
    Ok(PhaseSurvey {
        stats: circular_stats(&phases),
        max_identity_residual: 0.0,
        max_orthonormality_defect: worst_on,
        samples: phases.len(),
    })
}

pub fn phase_statistics(frames: &[AmbientFrame]) -> CircularStats {
    circular_stats(&frames.iter().map(|f| f.phase).collect::<Vec<_>>())
}
