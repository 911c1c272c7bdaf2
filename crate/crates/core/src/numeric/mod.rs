//! Numerical building blocks shared by the geometric modules.

pub mod linalg;
pub mod ode;
pub mod quad;
pub mod rational;
pub mod roots;

use std::f64::consts::PI;

use num_complex::Complex64;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Pairwise summation; the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Circular statistics of a set of unit phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularStats {
    /// Argument of the mean resultant.
    pub mean: f64,
    /// `sqrt(-2 ln R)` with `R` the mean resultant length.
    pub std_dev: f64,
    /// Largest wrapped distance from the mean.
    pub max_deviation: f64,
}

/// Circular mean and standard deviation of `arg(phases)`. Deviations are
/// taken relative to the first phase before averaging so that `1 - R` is
/// computed without cancellation.
pub fn circular_stats(phases: &[Complex64]) -> CircularStats {
    if phases.is_empty() {
        return CircularStats {
            mean: 0.0,
            std_dev: 0.0,
            max_deviation: 0.0,
        };
    }
    let reference = phases[0].arg();
    let devs: Vec<f64> = phases.iter().map(|z| wrap_angle(z.arg() - reference)).collect();
    let n = devs.len() as f64;
    let half_chord: Vec<f64> = devs.iter().map(|d| 2.0 * (0.5 * d).sin().powi(2)).collect();
    let sines: Vec<f64> = devs.iter().map(|d| d.sin()).collect();
    // mean cos = 1 - a, mean sin = b
    let a = pairwise_sum(&half_chord) / n;
    let b = pairwise_sum(&sines) / n;
    let one_minus_r2 = (2.0 * a - a * a - b * b).max(0.0);
    let std_dev = (-(-one_minus_r2).ln_1p()).max(0.0).sqrt();
    let mean = wrap_angle(reference + b.atan2(1.0 - a));
    let max_deviation = phases
        .iter()
        .map(|z| wrap_angle(z.arg() - mean).abs())
        .fold(0.0, f64::max);
    CircularStats {
        mean,
        std_dev,
        max_deviation,
    }
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Radical-inverse (Halton) coordinate of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Point `index` (1-based internally, so the origin is never produced) of
/// the `dim`-dimensional Halton sequence in the unit cube.
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton sequence limited to 16 dimensions");
    PRIMES[..dim].iter().map(|&b| halton(index + 1, b)).collect()
}
