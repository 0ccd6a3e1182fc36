use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::gamma::lgamma_c;
use super::zeta::zeta_c;
use crate::error::{Error, Result};

/// Positive ordinates of the first nontrivial zeros of ζ, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaZeroList {
    pub ordinates: Vec<f64>,
    pub refine_tol: f64,
}

impl ZetaZeroList {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

/// Riemann–Siegel θ(t) = arg Γ(¼ + it/2) − (t/2) log π, continuous in t.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let lg = lgamma_c(Complex64::new(0.25, 0.5 * t)).expect("Re > 0");
    lg.im - 0.5 * t * PI.ln()
}

/// Hardy's function Z(t) = e^{iθ(t)} ζ(½ + it), real for real t.
pub fn hardy_z(t: f64) -> f64 {
    let z = zeta_c(Complex64::new(0.5, t)).expect("not the pole");
    (Complex64::from_polar(1.0, riemann_siegel_theta(t)) * z).re
}

/// N(T): number of zeros with 0 < γ ≤ T, from θ(T)/π + 1 + S(T) with S(T)
/// tracked by continuous variation of arg ζ(σ + iT) from σ = 3 down to ½.
fn zero_count(t: f64) -> f64 {
    let steps = 250;
    let mut arg = zeta_c(Complex64::new(3.0, t)).expect("not the pole").arg();
    let mut prev = arg;
    for i in 1..=steps {
        let sigma = 3.0 - 2.5 * i as f64 / steps as f64;
        let a = zeta_c(Complex64::new(sigma, t)).expect("not the pole").arg();
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        arg += d;
        prev = a;
    }
    riemann_siegel_theta(t) / PI + 1.0 + arg / PI
}

/// First `count` zero ordinates, from sign changes of Z on a grid of step 0.1
/// refined by bisection to `1e-9`.
pub fn zeta_zeros(count: usize) -> Result<ZetaZeroList> {
    zeta_zeros_with_tol(count, 1e-9)
}

pub fn zeta_zeros_with_tol(count: usize, refine_tol: f64) -> Result<ZetaZeroList> {
    if count == 0 || count > 100 {
        return Err(Error::Domain(format!("zero count must be in 1..=100, got {count}")));
    }
    let step = 0.1;
    let mut ordinates = Vec::with_capacity(count);
    let mut a = 1.0;
    let mut za = hardy_z(a);
    while ordinates.len() < count {
        let b = a + step;
        let zb = hardy_z(b);
        if za == 0.0 {
            ordinates.push(a);
        } else if za.signum() != zb.signum() {
            let (mut lo, mut hi, mut zlo) = (a, b, za);
            while hi - lo > refine_tol {
                let mid = 0.5 * (lo + hi);
                let zm = hardy_z(mid);
                if zm.signum() == zlo.signum() {
                    lo = mid;
                    zlo = zm;
                } else {
                    hi = mid;
                }
            }
            ordinates.push(0.5 * (lo + hi));
        }
        a = b;
        za = zb;
    }
    // no zeros lie in (γ_last, a], so N(T) must equal the count at T in between
    let last = *ordinates.last().expect("nonempty");
    let height = 0.5 * (last + a);
    let expected = zero_count(height);
    if (expected - ordinates.len() as f64).abs() > 0.25 {
        return Err(Error::MissedZero {
            found: ordinates.len(),
            expected,
            height,
        });
    }
    Ok(ZetaZeroList { ordinates, refine_tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_zeros() {
        let z = zeta_zeros(2).unwrap();
        assert!((z.ordinates[0] - 14.134_725).abs() < 1e-6);
        assert!((z.ordinates[1] - 21.022_040).abs() < 1e-6);
        for &g in &z.ordinates {
            assert!(zeta_c(Complex64::new(0.5, g)).unwrap().norm() < 1e-7);
        }
    }

    #[test]
    fn hundred_zeros_increasing_and_vanishing() {
        let z = zeta_zeros(100).unwrap();
        assert_eq!(z.len(), 100);
        assert!(z.ordinates.windows(2).all(|w| w[0] < w[1]));
        // γ₁₀₀ = 236.524229665816...
        assert!((z.ordinates[99] - 236.524_229_665_816).abs() < 1e-6);
        for &g in &z.ordinates {
            assert!(zeta_c(Complex64::new(0.5, g)).unwrap().norm() < 1e-7, "g={g}");
        }
    }

    #[test]
    fn count_matches_known_values() {
        assert!((zero_count(20.0) - 1.0).abs() < 1e-6);
        assert!((zero_count(50.0) - 10.0).abs() < 1e-6);
    }

    #[test]
    fn bad_count_is_rejected() {
        assert!(zeta_zeros(0).is_err());
        assert!(zeta_zeros(101).is_err());
    }
}
