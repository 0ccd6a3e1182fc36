use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{gamma_c, BERNOULLI_EVEN};
use crate::error::{Error, Result};

/// ζ(s) by Euler–Maclaurin summation.
///
/// Uses N = 10 + ⌈1.3·|Im s|⌉ direct terms and twelve Bernoulli corrections.
pub fn zeta_c(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "zeta",
            at: "1".into(),
        });
    }
    let n_terms = 10 + (1.3 * s.im.abs()).ceil() as usize + (s.re.min(0.0).abs().ceil() as usize);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..n_terms {
        sum += (-s * (n as f64).ln()).exp();
    }
    let nf = n_terms as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{−s}
    sum += n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    // Σ B₂ₖ/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut fact = 2.0; // (2k)!
    let mut npow = n_pow / nf;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = k + 1;
        sum += b / fact * rising * npow;
        let kf = k as f64;
        rising *= (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf);
        fact *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
        npow /= nf * nf;
    }
    Ok(sum)
}

/// ζ*(s) = π^{−s/2} Γ(s/2) ζ(s).
pub fn zeta_star(s: Complex64) -> Result<Complex64> {
    let half = s * 0.5;
    Ok((-half * PI.ln()).exp() * gamma_c(half)? * zeta_c(s)?)
}
