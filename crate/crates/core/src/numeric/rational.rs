//! Best rational approximation by continued fractions.

use num_rational::Ratio;

/// Closest fraction to `x` with denominator at most `max_denominator`,
/// taken from the convergents and semiconvergents of its continued fraction.
pub fn best_rational(x: f64, max_denominator: u32) -> Ratio<i64> {
    assert!(max_denominator >= 1, "max_denominator must be positive");
    assert!(x.is_finite(), "cannot approximate a non-finite value");
    let max_den = i64::from(max_denominator);

    // convergent recurrences: (h_{k-2}, h_{k-1}), (k_{k-2}, k_{k-1})
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rem = x;
    loop {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.saturating_mul(h1).saturating_add(h0);
        let k2 = a.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den {
            // largest admissible semiconvergent
            let t = (max_den - k0) / k1;
            let semi = Ratio::new(t * h1 + h0, t * k1 + k0);
            let conv = Ratio::new(h1, k1);
            return closer(x, semi, conv);
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = rem - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    Ratio::new(h1, k1)
}

fn closer(x: f64, a: Ratio<i64>, b: Ratio<i64>) -> Ratio<i64> {
    let da = (to_f64(a) - x).abs();
    let db = (to_f64(b) - x).abs();
    if da < db {
        a
    } else {
        b
    }
}

pub fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classic_pi_approximations() {
        assert_eq!(best_rational(PI, 1), Ratio::new(3, 1));
        assert_eq!(best_rational(PI, 7), Ratio::new(22, 7));
        assert_eq!(best_rational(PI, 113), Ratio::new(355, 113));
        // semiconvergent region between 22/7 and 355/113
        assert_eq!(best_rational(PI, 57), Ratio::new(179, 57));
    }

    #[test]
    fn exact_fractions_and_negatives() {
        assert_eq!(best_rational(0.5, 50), Ratio::new(1, 2));
        assert_eq!(best_rational(-0.75, 50), Ratio::new(-3, 4));
        assert_eq!(best_rational(2.0, 3), Ratio::new(2, 1));
    }

    #[test]
    fn matches_brute_force_search() {
        for &x in &[0.1234567, 1.0 / 3.0 + 1e-4, 2f64.sqrt(), 0.999, 7.3819] {
            for max_den in [1u32, 5, 13, 50, 97] {
                let got = best_rational(x, max_den);
                let mut best = f64::INFINITY;
                for d in 1..=max_den as i64 {
                    let n = (x * d as f64).round();
                    best = best.min((n / d as f64 - x).abs());
                }
                assert!(
                    ((to_f64(got) - x).abs() - best).abs() < 1e-15,
                    "x={x} max_den={max_den} got={got}"
                );
            }
        }
    }
}
