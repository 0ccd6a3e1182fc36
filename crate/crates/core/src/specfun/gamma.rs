use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// B₂ₖ for k = 1..=12.
pub(crate) const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn pole_check(function: &'static str, z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole {
            function,
            at: format!("{}", z.re),
        });
    }
    Ok(())
}

/// Γ(z) for complex z, with reflection for Re z < ½.
pub fn gamma_c(z: Complex64) -> Result<Complex64> {
    pole_check("gamma", z)?;
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return PI / (s * gamma_unchecked(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// log Γ(z) on the branch continuous in Re z > 0 (principal near the
/// positive axis), by upward shift and the Stirling series.
pub fn lgamma_c(z: Complex64) -> Result<Complex64> {
    pole_check("lgamma", z)?;
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("lgamma_c is defined here for Re z > 0, got {z}")));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 || w.re < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    let mut acc = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (k + 1) as f64;
        acc += b / ((2.0 * k) * (2.0 * k - 1.0) * wp);
        wp *= w2;
    }
    Ok(acc - shift)
}

/// ψ(z) = Γ'(z)/Γ(z) by upward recurrence and the asymptotic series.
pub fn digamma_c(z: Complex64) -> Result<Complex64> {
    pole_check("digamma", z)?;
    if z.re < 0.0 {
        // ψ(z) = ψ(1 − z) − π cot(πz)
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma_c(1.0 - z)? - PI * cot);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 || w.re < 10.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (k + 1) as f64;
        series += b / (2.0 * k) * p;
        p *= inv2;
    }
    Ok(acc + w.ln() - 0.5 * inv - series)
}
