//! Modified Bessel function of the second kind with complex order.
//!
//! K(s, x) = ½ ∫_{−∞}^{∞} e^{st − x cosh t} dt. The integrand is entire in t
//! and decays double-exponentially for |Im t| < π/2, so the line of
//! integration may be moved to Im t = η. Taking η near the imaginary part of
//! the saddle t* = asinh(s/x) removes the cancellation that ruins the
//! real-axis integral when |Im s| is large. On that line the trapezoidal
//! rule converges geometrically in the step; the step is halved until two
//! successive sums agree.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::theta::TruncationPolicy;

const ETA_MARGIN: f64 = 0.1;
const MAX_HALVINGS: usize = 18;

/// K(s, x) for complex order s and real x > 0.
pub fn bessel_k(s: Complex64, x: f64, policy: &TruncationPolicy) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("bessel_k requires x > 0, got {x}")));
    }
    let saddle = (s / x).asinh();
    let cap = FRAC_PI_2 - ETA_MARGIN;
    let eta = saddle.im.clamp(-cap, cap);
    let shift = Complex64::new(0.0, eta);
    let phase = |w: f64| {
        let t = shift + w;
        s * t - x * t.cosh()
    };
    // Re φ along the line is concave with its maximum where
    // Re s = x cos η sinh w.
    let w0 = (s.re / (x * eta.cos())).asinh();
    let peak = phase(w0).re;
    let drop = policy.tail_epsilon.ln().abs() + 8.0;
    let mut lo = w0;
    while phase(lo).re > peak - drop {
        lo -= 0.5;
    }
    let mut hi = w0;
    while phase(hi).re > peak - drop {
        hi += 0.5;
    }
    let scaled = |w: f64| (phase(w) - peak).exp();

    let mut h = policy.quad_step;
    let mut n = ((hi - lo) / h).ceil() as usize;
    h = (hi - lo) / n as f64;
    let mut sum: Complex64 = (0..=n).map(|i| scaled(lo + i as f64 * h)).sum();
    let mut estimate = sum * h;
    for _ in 0..MAX_HALVINGS {
        let mids: Complex64 = (0..n).map(|i| scaled(lo + (i as f64 + 0.5) * h)).sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let change = (refined - estimate).norm();
        estimate = refined;
        if change <= policy.quad_tol * refined.norm() {
            return Ok(0.5 * estimate * peak.exp());
        }
    }
    Err(Error::Quadrature {
        what: "bessel_k trapezoid",
        estimate: estimate.norm(),
    })
}
