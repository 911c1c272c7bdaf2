//! Points of the SU-invariant special Lagrangian families in the spaces of
//! general, symmetric and skew-symmetric complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curves::{gamma_c_curve, gamma_c_derivative};
use crate::error::{invalid, Error, Result};
use crate::numeric::linalg::{column_determinant, gram_schmidt_spanning};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitVariant {
    /// All `n × n` matrices, `B = gamma A / sqrt n`.
    GL,
    /// Symmetric `n × n` matrices, `B = gamma A A^T / sqrt n`.
    Sym,
    /// Skew `2n × 2n` matrices, `B = gamma A J A^T / sqrt(2n)`.
    Skew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitKind {
    pub variant: OrbitVariant,
    pub n: usize,
}

impl OrbitKind {
    pub fn new(variant: OrbitVariant, n: usize) -> Result<Self> {
        let min = if variant == OrbitVariant::Skew { 1 } else { 2 };
        if n < min {
            return Err(invalid("n", format!("{variant:?} orbits need n >= {min}")));
        }
        Ok(Self { variant, n })
    }

    /// Side length of the matrices (`2n` for skew).
    pub fn matrix_size(&self) -> usize {
        match self.variant {
            OrbitVariant::Skew => 2 * self.n,
            _ => self.n,
        }
    }

    /// Complex dimension `m` of the matrix space, which is also the exponent
    /// of the generating curve `gamma^m = c + i s`.
    pub fn curve_exponent(&self) -> u32 {
        let n = self.n as u32;
        match self.variant {
            OrbitVariant::GL => n * n,
            OrbitVariant::Sym => n * (n + 1) / 2,
            OrbitVariant::Skew => n * (2 * n - 1),
        }
    }

    /// Real dimension of the unit sphere holding the orbit map, `2m - 1`.
    pub fn sphere_dim(&self) -> u32 {
        2 * self.curve_exponent() - 1
    }

    fn scale(&self) -> f64 {
        (self.matrix_size() as f64).sqrt().recip()
    }

    /// Unit-norm orbit map `A -> A/sqrt n`, `A A^T/sqrt n` or
    /// `A J A^T / sqrt(2n)`.
    pub fn orbit_map(&self, a: &CMatrix) -> CMatrix {
        let s = Complex64::new(self.scale(), 0.0);
        match self.variant {
            OrbitVariant::GL => a * s,
            OrbitVariant::Sym => a * a.transpose() * s,
            OrbitVariant::Skew => a * symplectic_j(self.n) * a.transpose() * s,
        }
    }

    /// Value of the curve level `Re(gamma^m) = c` read off the matrix,
    /// normalized as [`expected_curve_level`].
    pub fn curve_level(&self, b: &CMatrix) -> f64 {
        let d = b.determinant();
        match self.variant {
            OrbitVariant::GL => d.powu(self.n as u32).re,
            OrbitVariant::Sym => branch_free_root_re(d.powu(self.n as u32 + 1)),
            OrbitVariant::Skew => branch_free_root_re(d.powu(2 * self.n as u32 - 1)),
        }
    }

    /// Matrix level `Re((det B)^n)` (general and symmetric) or
    /// `Re((det B)^{2n})` (skew).
    pub fn level(&self, b: &CMatrix) -> f64 {
        let d = b.determinant();
        match self.variant {
            OrbitVariant::Skew => d.powu(2 * self.n as u32).re,
            _ => d.powu(self.n as u32).re,
        }
    }

    /// Frobenius norm of `B conj(B)^T - |det B|^{2/n} I` (general),
    /// `B conj(B) - |det B|^{2/n} I` (symmetric) or
    /// `B conj(B) + |det B|^{1/n} I` (skew).
    pub fn residual_unitary(&self, b: &CMatrix) -> f64 {
        let size = self.matrix_size();
        let det = b.determinant().norm();
        let nf = self.n as f64;
        let (prod, target) = match self.variant {
            OrbitVariant::GL => (b * b.adjoint(), det.powf(2.0 / nf)),
            OrbitVariant::Sym => (b * b.map(|z| z.conj()), det.powf(2.0 / nf)),
            OrbitVariant::Skew => (b * b.map(|z| z.conj()), -det.powf(1.0 / nf)),
        };
        (prod - CMatrix::identity(size, size) * Complex64::new(target, 0.0)).norm()
    }

    /// Isometric coordinates of `b` in C^m (off-diagonal pairs of symmetric
    /// and skew matrices weighted by `sqrt 2`).
    pub fn coordinates(&self, b: &CMatrix) -> Vec<Complex64> {
        let size = self.matrix_size();
        let r2 = std::f64::consts::SQRT_2;
        match self.variant {
            OrbitVariant::GL => (0..size * size).map(|k| b[(k / size, k % size)]).collect(),
            OrbitVariant::Sym => (0..size)
                .flat_map(|i| (i..size).map(move |j| (i, j)))
                .map(|(i, j)| if i == j { b[(i, i)] } else { b[(i, j)] * r2 })
                .collect(),
            OrbitVariant::Skew => (0..size)
                .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
                .map(|(i, j)| b[(i, j)] * r2)
                .collect(),
        }
    }
}

/// `|Re sqrt(w)| = sqrt((|w| + Re w) / 2)`, evaluated without cancellation.
fn branch_free_root_re(w: Complex64) -> f64 {
    let r = w.norm();
    if w.re >= 0.0 {
        ((r + w.re) / 2.0).sqrt()
    } else {
        w.im.abs() / (2.0 * (r - w.re)).sqrt()
    }
}

/// Closed-form curve level of the family with parameter `c`.
pub fn expected_curve_level(kind: OrbitKind, c: f64) -> f64 {
    let nf = kind.n as f64;
    match kind.variant {
        OrbitVariant::GL => c / nf.powf(nf * nf / 2.0),
        OrbitVariant::Sym => c / nf.powf(nf * (nf + 1.0) / 4.0),
        OrbitVariant::Skew => c / (2.0 * nf).powf(nf * (2.0 * nf - 1.0) / 2.0),
    }
}

/// `J = [[0, -I], [I, 0]]` of size `2n`.
pub fn symplectic_j(n: usize) -> CMatrix {
    CMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if c == r + n {
            Complex64::new(-1.0, 0.0)
        } else if r == c + n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Haar-distributed unitary matrix (complex Gaussian, QR, phase fix),
/// deterministic in `seed` (ChaCha8).
pub fn unitary_sample(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Special unitary sample: [`unitary_sample`] divided by an `n`-th root of
/// its determinant.
pub fn su_sample(n: usize, seed: u64) -> CMatrix {
    if n <= 1 {
        return CMatrix::identity(n, n);
    }
    let u = unitary_sample(n, seed);
    let phi = u.determinant().arg();
    u * Complex64::from_polar(1.0, -phi / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    pub matrix: CMatrix,
    pub kind: OrbitKind,
    pub residual_unitary: f64,
    pub level: f64,
    pub curve_level: f64,
}

impl OrbitPoint {
    /// Evaluates the defining residuals of an arbitrary matrix.
    pub fn from_matrix(kind: OrbitKind, matrix: CMatrix) -> Result<Self> {
        let size = kind.matrix_size();
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(invalid("matrix", format!("expected a {size}x{size} matrix")));
        }
        Ok(Self {
            residual_unitary: kind.residual_unitary(&matrix),
            level: kind.level(&matrix),
            curve_level: kind.curve_level(&matrix),
            matrix,
            kind,
        })
    }
}

fn check_group_element(kind: OrbitKind, a: &CMatrix) -> Result<()> {
    let size = kind.matrix_size();
    if a.nrows() != size || a.ncols() != size {
        return Err(invalid("A", format!("expected a {size}x{size} special unitary matrix")));
    }
    let defect = (a * a.adjoint() - CMatrix::identity(size, size)).norm();
    let det = (a.determinant() - Complex64::new(1.0, 0.0)).norm();
    if defect > 1e-10 || det > 1e-10 {
        return Err(invalid("A", format!("not special unitary (defect {defect:e}, det error {det:e})")));
    }
    Ok(())
}

/// `gamma(s) · orbit_map(A)` with `gamma^m = c + i s`.
pub fn orbit_point(kind: OrbitKind, c: f64, s: f64, a: &CMatrix) -> Result<OrbitPoint> {
    orbit_point_with_exponent(kind, kind.curve_exponent(), c, s, a)
}

/// As [`orbit_point`] with an explicit curve exponent.
pub fn orbit_point_with_exponent(kind: OrbitKind, exponent: u32, c: f64, s: f64, a: &CMatrix) -> Result<OrbitPoint> {
    check_group_element(kind, a)?;
    let g = gamma_c_curve(exponent, c, s)?;
    OrbitPoint::from_matrix(kind, kind.orbit_map(a) * g)
}

/// `(residual_unitary, |level - target_level|)`.
pub fn orbit_residual(point: &OrbitPoint, target_level: f64) -> (f64, f64) {
    (point.residual_unitary, (point.level - target_level).abs())
}

/// Basis of the Lie algebra `su(size)`.
fn su_basis(size: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(size * size - 1);
    let zero = || CMatrix::zeros(size, size);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    for k in 0..size.saturating_sub(1) {
        let mut m = zero();
        m[(k, k)] = i;
        m[(k + 1, k + 1)] = -i;
        out.push(m);
    }
    for k in 0..size {
        for l in k + 1..size {
            let mut m = zero();
            m[(k, l)] = one;
            m[(l, k)] = -one;
            out.push(m);
            let mut m = zero();
            m[(k, l)] = i;
            m[(l, k)] = i;
            out.push(m);
        }
    }
    out
}

/// Unit complex determinant of an orthonormal real frame of the tangent
/// space of the family `gamma(s) · orbit_map(A)` at `(s, A)`, in the
/// isometric coordinates of [`OrbitKind::coordinates`]. The frame starts
/// with the curve direction and continues with the infinitesimal group
/// action; since the kept generators may change with `A`, the sign is
/// meaningful only up to orientation, so compare squares of phases.
pub fn orbit_phase(kind: OrbitKind, exponent: u32, c: f64, s: f64, a: &CMatrix) -> Result<Complex64> {
    check_group_element(kind, a)?;
    let g = gamma_c_curve(exponent, c, s)?;
    let dg = gamma_c_derivative(exponent, c, s)?;
    let base = kind.orbit_map(a);
    let mut tangents = vec![kind.coordinates(&(&base * dg))];
    for y in su_basis(kind.matrix_size()) {
        let moved = match kind.variant {
            OrbitVariant::GL => &y * &base,
            _ => &y * &base + &base * y.transpose(),
        };
        tangents.push(kind.coordinates(&(moved * g)));
    }
    let frame = gram_schmidt_spanning(&tangents, 1e-8);
    let m = kind.curve_exponent() as usize;
    if frame.len() != m {
        return Err(Error::DegenerateFrame(format!(
            "orbit tangent space has dimension {}, expected {m}",
            frame.len()
        )));
    }
    let det = column_determinant(&frame);
    if (det.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::NonUnitaryFrame { modulus: det.norm() });
    }
    Ok(det / det.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::wrap_angle;

    fn kinds() -> Vec<OrbitKind> {
        let mut out = Vec::new();
        for n in 2..=3 {
            out.push(OrbitKind::new(OrbitVariant::GL, n).unwrap());
            out.push(OrbitKind::new(OrbitVariant::Sym, n).unwrap());
        }
        for n in 1..=3 {
            out.push(OrbitKind::new(OrbitVariant::Skew, n).unwrap());
        }
        out
    }

    #[test]
    fn exponents_match_matrix_space_dimension() {
        for k in kinds() {
            assert_eq!(k.coordinates(&CMatrix::zeros(k.matrix_size(), k.matrix_size())).len() as u32, k.curve_exponent());
        }
        assert_eq!(OrbitKind::new(OrbitVariant::Skew, 2).unwrap().curve_exponent(), 6);
        assert!(OrbitKind::new(OrbitVariant::GL, 1).is_err());
        assert!(OrbitKind::new(OrbitVariant::Skew, 0).is_err());
    }

    #[test]
    fn su_samples() {
        for seed in 0..5 {
            let a = su_sample(2, seed);
            assert!((&a * a.adjoint() - CMatrix::identity(2, 2)).norm() < 1e-12);
            assert!((a.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(su_sample(1, 3), CMatrix::identity(1, 1));
        assert_eq!(su_sample(3, 7), su_sample(3, 7));
        assert_ne!(su_sample(3, 7), su_sample(3, 8));
    }

    #[test]
    fn gl_examples() {
        let k = OrbitKind::new(OrbitVariant::GL, 2).unwrap();
        let pt = orbit_point(k, 1.0, 0.0, &CMatrix::identity(2, 2)).unwrap();
        let expected = CMatrix::identity(2, 2) * Complex64::new(0.5f64.sqrt(), 0.0);
        assert!((&pt.matrix - expected).norm() < 1e-15);
        let (r, l) = orbit_residual(&pt, 0.25);
        assert!(r < 1e-12 && l < 1e-12);
        let pt = orbit_point(k, 1.0, 1.0, &su_sample(2, 4)).unwrap();
        let (r, l) = orbit_residual(&pt, 0.25);
        assert!(r < 1e-10 && l < 1e-10);
    }

    #[test]
    fn skew_example() {
        let k = OrbitKind::new(OrbitVariant::Skew, 1).unwrap();
        let pt = orbit_point(k, 1.0, 0.0, &CMatrix::identity(2, 2)).unwrap();
        let expected = symplectic_j(1) * Complex64::new(0.5f64.sqrt(), 0.0);
        assert!((&pt.matrix - expected).norm() < 1e-15);
        let bb = &pt.matrix * pt.matrix.map(|z| z.conj());
        assert!((bb + CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(pt.residual_unitary < 1e-15);
        // det B = 1/2, so (det B)^2 = 1/4
        assert!((pt.level - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sym_level_is_common_across_group_at_fixed_s() {
        let k = OrbitKind::new(OrbitVariant::Sym, 2).unwrap();
        let target = orbit_point(k, 1.0, 0.5, &CMatrix::identity(2, 2)).unwrap().level;
        for seed in 0..10 {
            let pt = orbit_point(k, 1.0, 0.5, &su_sample(2, seed)).unwrap();
            let (r, l) = orbit_residual(&pt, target);
            assert!(r < 1e-10 && l < 1e-10);
        }
    }

    #[test]
    fn negative_control_is_flagged() {
        let k = OrbitKind::new(OrbitVariant::GL, 2).unwrap();
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]));
        let pt = OrbitPoint::from_matrix(k, d * su_sample(2, 1)).unwrap();
        assert!(orbit_residual(&pt, 0.25).0 > 0.1);
        assert!(orbit_point(k, 1.0, 0.0, &(CMatrix::identity(2, 2) * Complex64::new(2.0, 0.0))).is_err());
        assert!(matches!(
            orbit_point(k, 0.0, 0.0, &CMatrix::identity(2, 2)),
            Err(Error::VertexSingularity)
        ));
    }

    fn draws() -> Vec<(f64, f64, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..100)
            .map(|k| ([0.5, 1.0, 2.0][k % 3], rng.random_range(-3.0..3.0), rng.random::<u64>()))
            .collect()
    }

    #[test]
    fn random_draws_satisfy_membership() {
        for k in kinds() {
            for (c, s, seed) in draws() {
                let a = su_sample(k.matrix_size(), seed);
                let pt = orbit_point(k, c, s, &a).unwrap();
                assert!(pt.residual_unitary < 1e-10, "{k:?}: {}", pt.residual_unitary);
                let expected = expected_curve_level(k, c);
                assert!((pt.curve_level - expected).abs() < 1e-10 * expected.max(1.0), "{k:?}");
                match k.variant {
                    OrbitVariant::GL => assert!((pt.level - expected).abs() < 1e-10),
                    OrbitVariant::Sym => assert!((&pt.matrix - pt.matrix.transpose()).norm() < 1e-12),
                    OrbitVariant::Skew => assert!((&pt.matrix + pt.matrix.transpose()).norm() < 1e-12),
                }
                // the matrix level is shared by the whole group orbit at fixed s
                let at_identity = orbit_point(k, c, s, &CMatrix::identity(k.matrix_size(), k.matrix_size())).unwrap();
                assert!((pt.level - at_identity.level).abs() < 1e-10 * at_identity.level.abs().max(1.0));
            }
        }
    }

    #[test]
    fn matrix_level_of_sym_and_skew_moves_with_s() {
        for k in [OrbitKind::new(OrbitVariant::Sym, 2).unwrap(), OrbitKind::new(OrbitVariant::Skew, 2).unwrap()] {
            let id = CMatrix::identity(k.matrix_size(), k.matrix_size());
            let l0 = orbit_point(k, 1.0, 0.0, &id).unwrap().level;
            let l1 = orbit_point(k, 1.0, 1.0, &id).unwrap().level;
            assert!((l0 - l1).abs() > 1e-3 * l0.abs());
        }
    }

    fn phase_spread(k: OrbitKind, exponent: u32) -> f64 {
        let phases: Vec<Complex64> = draws()
            .into_iter()
            .take(30)
            .map(|(_, s, seed)| orbit_phase(k, exponent, 1.0, s, &su_sample(k.matrix_size(), seed)).unwrap())
            .collect();
        let squared0 = phases[0] * phases[0];
        phases.iter().map(|z| wrap_angle((z * z / squared0).arg()).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn tangent_phase_is_constant_for_dimension_exponent() {
        for k in kinds() {
            let spread = phase_spread(k, k.curve_exponent());
            assert!(spread < 1e-8, "{k:?}: {spread:e}");
        }
    }

    #[test]
    fn tangent_phase_varies_for_other_exponents() {
        // gamma^{n^2} would make the symmetric matrix level constant, but
        // the resulting family is not special Lagrangian
        let k = OrbitKind::new(OrbitVariant::Sym, 2).unwrap();
        assert!(phase_spread(k, 4) > 1e-2);
        // 2n^2 counts the real sphere dimension of all 2n x 2n matrices, not
        // the skew ones
        let k = OrbitKind::new(OrbitVariant::Skew, 2).unwrap();
        assert!(phase_spread(k, 8) > 1e-2);
    }
}
