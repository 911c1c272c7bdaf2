//! Small dense/banded linear algebra on real frames in complex space.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euclidean inner product `Re Σ a_i conj(b_i)` of C^n viewed as R^{2n}.
pub fn real_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Hermitian product `Σ a_i conj(b_i)`.
pub fn hermitian(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    real_inner(a, a).sqrt()
}

/// Modified Gram–Schmidt for the real inner product; order and orientation
/// of the input are preserved. Fails if a vector is (numerically) dependent
/// on its predecessors.
pub fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        let scale = norm(v);
        let mut w = v.clone();
        for u in &out {
            let c = real_inner(&w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= ui * c;
            }
        }
        let n = norm(&w);
        if !(n > 1e-10 * scale.max(f64::MIN_POSITIVE)) || n == 0.0 {
            return Err(Error::DegenerateFrame(format!(
                "vector {k} is dependent on its predecessors"
            )));
        }
        w.iter_mut().for_each(|x| *x /= n);
        out.push(w);
    }
    Ok(out)
}

/// Gram–Schmidt that skips vectors dependent on the ones already kept
/// (relative residual below `drop_tol`). Returns the kept orthonormal set.
pub fn gram_schmidt_spanning(vectors: &[Vec<Complex64>], drop_tol: f64) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        // two passes keep the kept set orthonormal to rounding
        for _ in 0..2 {
            for u in &out {
                let c = real_inner(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * c;
                }
            }
        }
        let n = norm(&w);
        if n > drop_tol * scale {
            w.iter_mut().for_each(|x| *x /= n);
            out.push(w);
        }
    }
    out
}

/// Largest deviation of the real Gram matrix from the identity.
pub fn orthonormality_defect(vectors: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((real_inner(a, b) - target).abs());
        }
    }
    worst
}

/// Determinant of the square matrix whose columns are `columns`
/// (LU with partial pivoting).
pub fn column_determinant(columns: &[Vec<Complex64>]) -> Complex64 {
    let n = columns.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let m = DMatrix::from_fn(n, n, |r, c| columns[c][r]);
    m.lu().determinant()
}

/// Square band matrix with `bw` sub- and super-diagonals, factorized by
/// Gaussian elimination without pivoting (the Jacobians it serves are
/// diagonally dominant on fine grids; a tiny pivot is reported as singular).
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    // row-major, each row stores columns i-bw ..= i+bw
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.bw >= i && j <= i + self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.bw < i || j > i + self.bw {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Solves `A x = rhs` in place, consuming the factorization.
    pub fn solve(mut self, rhs: &mut [f64]) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot.abs() <= 1e-14 * scale {
                return Err(Error::SingularMatrix { row: k, pivot });
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let s = self.slot(i, k);
                let factor = self.data[s] / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.data[s] = 0.0;
                for j in k + 1..=last {
                    let sk = self.slot(k, j);
                    let si = self.slot(i, j);
                    self.data[si] -= factor * self.data[sk];
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let last = (k + bw).min(n - 1);
            let mut acc = rhs[k];
            for j in k + 1..=last {
                acc -= self.data[self.slot(k, j)] * rhs[j];
            }
            rhs[k] = acc / self.data[self.slot(k, k)];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gram_schmidt_orthonormalizes_real_frames() {
        let vs = vec![
            vec![c(1.0, 1.0), c(0.0, 0.5)],
            vec![c(0.3, -1.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0)],
        ];
        let out = gram_schmidt(&vs).unwrap();
        assert!(orthonormality_defect(&out) < 1e-14);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_vectors() {
        let vs = vec![vec![c(1.0, 2.0)], vec![c(-2.0, -4.0)]];
        assert!(matches!(gram_schmidt(&vs), Err(Error::DegenerateFrame(_))));
        // i*v is independent of v over the reals
        let vs = vec![vec![c(1.0, 2.0)], vec![c(-2.0, 1.0)]];
        assert!(gram_schmidt(&vs).is_ok());
    }

    #[test]
    fn spanning_set_drops_dependents() {
        let vs = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 3.0)],
        ];
        assert_eq!(gram_schmidt_spanning(&vs, 1e-8).len(), 2);
    }

    #[test]
    fn determinant_of_columns() {
        let cols = vec![vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, -1.0)]];
        let d = column_determinant(&cols);
        assert!((d - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn band_solver_matches_tridiagonal_solution() {
        // -x_{i-1} + 2 x_i - x_{i+1} = 1 with zero ends: x_i = i (n+1-i) / 2
        let n = 30;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let mut rhs = vec![1.0; n];
        a.solve(&mut rhs).unwrap();
        for (i, x) in rhs.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((x - k * (n as f64 + 1.0 - k) / 2.0).abs() < 1e-10);
        }
    }
}
