//! Legendrian immersions into odd-dimensional unit spheres and a numerical
//! check of the contact condition `<v, J z> = 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::halton_point;
use crate::numeric::linalg::{norm, real_inner};

pub type EvalFn = dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync;
pub type TangentFn = dyn Fn(&[f64]) -> Vec<Vec<Complex64>> + Send + Sync;

/// Margin kept between sampled colatitudes and the chart poles.
pub const POLE_MARGIN: f64 = 1e-2;

/// A parameterized immersion of a `domain_dim`-dimensional box into the unit
/// sphere of C^`ambient_dim`, with its coordinate tangent basis.
#[derive(Clone)]
pub struct LegendrianMap {
    pub name: String,
    pub domain_dim: usize,
    pub ambient_dim: usize,
    /// Parameter box used for sampling.
    pub ranges: Vec<(f64, f64)>,
    eval: Arc<EvalFn>,
    tangent: Arc<TangentFn>,
}

impl fmt::Debug for LegendrianMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LegendrianMap")
            .field("name", &self.name)
            .field("domain_dim", &self.domain_dim)
            .field("ambient_dim", &self.ambient_dim)
            .field("ranges", &self.ranges)
            .finish()
    }
}

impl LegendrianMap {
    pub fn new(
        name: impl Into<String>,
        domain_dim: usize,
        ambient_dim: usize,
        ranges: Vec<(f64, f64)>,
        eval: Arc<EvalFn>,
        tangent: Arc<TangentFn>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(invalid("ambient_dim", "must be at least 1"));
        }
        if ranges.len() != domain_dim {
            return Err(invalid("ranges", "one range per domain coordinate is required"));
        }
        if ranges.iter().any(|(lo, hi)| !(hi > lo)) {
            return Err(invalid("ranges", "each range must be a nonempty interval"));
        }
        Ok(Self {
            name: name.into(),
            domain_dim,
            ambient_dim,
            ranges,
            eval,
            tangent,
        })
    }

    pub fn eval(&self, x: &[f64]) -> Vec<Complex64> {
        (self.eval)(x)
    }

    /// Coordinate tangent vectors `d eval / d x_i`.
    pub fn tangent(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        (self.tangent)(x)
    }

    /// Point `index` of a Halton sequence mapped into the parameter box.
    pub fn sample_params(&self, index: u64) -> Vec<f64> {
        halton_point(index, self.domain_dim)
            .into_iter()
            .zip(&self.ranges)
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }

    /// `|eval(x)| - 1`.
    pub fn unit_defect(&self, x: &[f64]) -> f64 {
        norm(&self.eval(x)) - 1.0
    }

    /// Largest deviation between the tangent basis and central differences
    /// of `eval` with step `h`.
    pub fn tangent_fd_defect(&self, x: &[f64], h: f64) -> f64 {
        let tangents = self.tangent(x);
        let mut worst: f64 = 0.0;
        for (i, t) in tangents.iter().enumerate() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let (fp, fm) = (self.eval(&xp), self.eval(&xm));
            for ((a, b), ti) in fp.iter().zip(&fm).zip(t) {
                worst = worst.max(((a - b) / (2.0 * h) - ti).norm());
            }
        }
        worst
    }
}

/// `<t_i, J z>` for the `index`-th tangent vector at `z = eval(x)`.
pub fn legendrian_residual(map: &LegendrianMap, x: &[f64], index: usize) -> Result<f64> {
    if index >= map.domain_dim {
        return Err(Error::TangentIndex {
            index,
            dim: map.domain_dim,
        });
    }
    let z = map.eval(x);
    let jz: Vec<Complex64> = z.iter().map(|w| Complex64::i() * w).collect();
    Ok(real_inner(&map.tangent(x)[index], &jz))
}

/// Largest `|legendrian_residual|` over all tangent indices at `x`.
pub fn max_residual_at(map: &LegendrianMap, x: &[f64]) -> f64 {
    (0..map.domain_dim)
        .map(|i| legendrian_residual(map, x, i).map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max)
}

/// Rejects `map` if the contact residual exceeds `tol` at `x` or at any of
/// the first `samples` Halton points of its parameter box.
pub fn check_legendrian(map: &LegendrianMap, x: &[f64], samples: u64, tol: f64) -> Result<()> {
    let mut worst = max_residual_at(map, x);
    for k in 0..samples {
        worst = worst.max(max_residual_at(map, &map.sample_params(k)));
    }
    if worst > tol {
        return Err(Error::NotLegendrian {
            name: map.name.clone(),
            residual: worst,
        });
    }
    Ok(())
}

/// Hyperspherical coordinates on `S^p ⊂ R^{p+1} ⊂ C^{p+1}`: angles
/// `a_0..a_{p-2}` are colatitudes and `a_{p-1}` is the azimuth. For `p = 0`
/// the map is the constant `1 ∈ C^1`.
pub fn geodesic_sphere(p: usize) -> LegendrianMap {
    let eval = move |a: &[f64]| -> Vec<Complex64> {
        let mut out = Vec::with_capacity(p + 1);
        let mut prod = 1.0;
        for &ak in &a[..p] {
            out.push(Complex64::new(prod * ak.cos(), 0.0));
            prod *= ak.sin();
        }
        out.push(Complex64::new(prod, 0.0));
        out
    };
    let tangent = move |a: &[f64]| -> Vec<Vec<Complex64>> {
        (0..p)
            .map(|i| {
                let mut out = vec![Complex64::new(0.0, 0.0); p + 1];
                let mut prod = 1.0;
                for k in 0..=p {
                    let value = if k < i {
                        0.0
                    } else if k == i {
                        -prod * a[k].sin()
                    } else if k < p {
                        prod * a[k].cos()
                    } else {
                        prod
                    };
                    out[k] = Complex64::new(value, 0.0);
                    if k < p {
                        prod *= if k == i { a[k].cos() } else { a[k].sin() };
                    }
                }
                out
            })
            .collect()
    };
    let mut ranges = vec![(POLE_MARGIN, PI - POLE_MARGIN); p.saturating_sub(1)];
    if p > 0 {
        ranges.push((0.0, 2.0 * PI));
    }
    LegendrianMap {
        name: format!("geodesic sphere S^{p}"),
        domain_dim: p,
        ambient_dim: p + 1,
        ranges,
        eval: Arc::new(eval),
        tangent: Arc::new(tangent),
    }
}

/// `t -> (e^{it}, e^{-it}) / sqrt 2` in `S^3`.
pub fn great_circle() -> LegendrianMap {
    let eval = |t: &[f64]| {
        vec![
            Complex64::from_polar(FRAC_1_SQRT_2, t[0]),
            Complex64::from_polar(FRAC_1_SQRT_2, -t[0]),
        ]
    };
    let tangent = |t: &[f64]| {
        vec![vec![
            Complex64::i() * Complex64::from_polar(FRAC_1_SQRT_2, t[0]),
            -Complex64::i() * Complex64::from_polar(FRAC_1_SQRT_2, -t[0]),
        ]]
    };
    LegendrianMap {
        name: "great circle".into(),
        domain_dim: 1,
        ambient_dim: 2,
        ranges: vec![(0.0, 2.0 * PI)],
        eval: Arc::new(eval),
        tangent: Arc::new(tangent),
    }
}

/// `(th_1..th_{m-1}) -> (e^{i th_1}, ..., e^{i th_{m-1}}, e^{-i sum th}) / sqrt m`
/// in `S^{2m-1}`.
pub fn legendrian_torus(m: usize) -> Result<LegendrianMap> {
    if m < 2 {
        return Err(invalid("m", "the torus needs m >= 2"));
    }
    let r = (m as f64).sqrt().recip();
    let eval = move |th: &[f64]| {
        let mut out: Vec<Complex64> = th.iter().map(|&a| Complex64::from_polar(r, a)).collect();
        out.push(Complex64::from_polar(r, -th.iter().sum::<f64>()));
        out
    };
    let tangent = move |th: &[f64]| {
        let last = -Complex64::i() * Complex64::from_polar(r, -th.iter().sum::<f64>());
        (0..m - 1)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); m];
                v[i] = Complex64::i() * Complex64::from_polar(r, th[i]);
                v[m - 1] = last;
                v
            })
            .collect()
    };
    Ok(LegendrianMap {
        name: format!("Legendrian torus T^{}", m - 1),
        domain_dim: m - 1,
        ambient_dim: m,
        ranges: vec![(0.0, 2.0 * PI); m - 1],
        eval: Arc::new(eval),
        tangent: Arc::new(tangent),
    })
}

/// The Hopf fiber `t -> (e^{it}, 0)`, tangent to `J z`: a non-Legendrian
/// control.
pub fn hopf_fiber() -> LegendrianMap {
    let eval = |t: &[f64]| vec![Complex64::from_polar(1.0, t[0]), Complex64::new(0.0, 0.0)];
    let tangent = |t: &[f64]| {
        vec![vec![
            Complex64::i() * Complex64::from_polar(1.0, t[0]),
            Complex64::new(0.0, 0.0),
        ]]
    };
    LegendrianMap {
        name: "Hopf fiber".into(),
        domain_dim: 1,
        ambient_dim: 2,
        ranges: vec![(0.0, 2.0 * PI)],
        eval: Arc::new(eval),
        tangent: Arc::new(tangent),
    }
}
