//! Jacobi theta functions on the positive imaginary axis and the exponential
//! sums α, β built from the coefficient functions.
//!
//! With q = e^{−πy}:
//!
//! * θ₂(iy) = 2 Σ_{n≥0} q^{(n+½)²}
//! * θ₃(iy) = 1 + 2 Σ_{n≥1} q^{n²}
//! * θ₄(iy) = 1 + 2 Σ_{n≥1} (−1)ⁿ q^{n²}
//!
//! and α(u) = Σ a(k) e^{−πku}, β(u) = Σ b(l) e^{−πlu}. Small arguments are
//! routed through the modular transformation y ↦ 1/y, which turns a slowly
//! converging sum into a handful of terms.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{coeff, shared_tables, CoeffKind};
use crate::error::{Error, Result};

/// Truncation controls shared by every series and integral evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Relative size of the neglected tail.
    pub tail_epsilon: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Initial step of trapezoidal rules; halved until converged.
    pub quad_step: f64,
    /// Relative tolerance of adaptive quadrature.
    pub quad_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_epsilon: 1e-15,
            max_terms: 1_000_000,
            quad_step: 0.25,
            quad_tol: 1e-13,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.tail_epsilon.is_nan() || self.tail_epsilon <= 0.0 {
            return Err(Error::Config(format!("tail_epsilon must be > 0, got {}", self.tail_epsilon)));
        }
        if self.max_terms < 16 {
            return Err(Error::Config(format!("max_terms must be >= 16, got {}", self.max_terms)));
        }
        if self.quad_step.is_nan() || self.quad_step <= 0.0 || self.quad_tol.is_nan() || self.quad_tol <= 0.0 {
            return Err(Error::Config("quadrature controls must be positive".into()));
        }
        Ok(())
    }
}

/// Index of a Jacobi theta function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    Two,
    Three,
    Four,
}

impl ThetaKind {
    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            4 => Ok(Self::Four),
            _ => Err(Error::Domain(format!("theta index must be 2, 3 or 4, got {k}"))),
        }
    }
}

fn check_positive(name: &str, y: f64) -> Result<()> {
    if y > 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a positive finite argument, got {y}")))
    }
}

/// θ(iy) by the defining series, without any transformation.
///
/// Accurate for y ≳ 0.1; below that θ₄ suffers cancellation.
pub fn theta_direct(kind: ThetaKind, y: f64) -> Result<f64> {
    check_positive("theta", y)?;
    let eps = f64::EPSILON * 0.25;
    let mut n = 0u64;
    Ok(match kind {
        ThetaKind::Two => {
            let mut sum = 0.0;
            loop {
                let x = n as f64 + 0.5;
                let t = (-PI * y * x * x).exp();
                sum += t;
                if t < eps * sum {
                    break;
                }
                n += 1;
            }
            2.0 * sum
        }
        ThetaKind::Three | ThetaKind::Four => {
            let sign = if kind == ThetaKind::Four { -1.0 } else { 1.0 };
            let mut sum = 0.0;
            let mut s = 1.0;
            loop {
                n += 1;
                s *= sign;
                let t = (-PI * y * (n * n) as f64).exp();
                sum += s * t;
                if t < eps {
                    break;
                }
            }
            1.0 + 2.0 * sum
        }
    })
}

/// θ_kind(iy), transforming to 1/y when y < 1.
pub fn theta(kind: ThetaKind, y: f64) -> Result<f64> {
    check_positive("theta", y)?;
    if y >= 1.0 {
        return theta_direct(kind, y);
    }
    let dual = match kind {
        ThetaKind::Two => ThetaKind::Four,
        ThetaKind::Three => ThetaKind::Three,
        ThetaKind::Four => ThetaKind::Two,
    };
    Ok(theta_direct(dual, 1.0 / y)? / y.sqrt())
}

/// Integer q-expansion of a theta power.
///
/// For θ₂ the stored series is (Σ_{n≥0} q^{n(n+1)})^power; the actual power
/// series is `scale · q^{quarter_offset/4}` times it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExpansion {
    pub kind: ThetaKind,
    pub power: u32,
    pub coefficients: Vec<i64>,
    pub scale: i64,
    pub quarter_offset: u32,
}

impl QExpansion {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Coefficients with the constant prefactor applied.
    pub fn scaled(&self) -> Vec<i64> {
        self.coefficients.iter().map(|c| c * self.scale).collect()
    }
}

fn cauchy(x: &[i64], y: &[i64], len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    for (i, &xi) in x.iter().enumerate().take(len) {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate().take(len - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

/// Exact q-expansion of θ_kind^power through q^nmax.
pub fn theta_power_coeffs(kind: ThetaKind, power: u32, nmax: usize) -> Result<QExpansion> {
    if power == 0 || power > 8 {
        return Err(Error::Domain(format!("power must be in 1..=8, got {power}")));
    }
    if nmax > 10_000 {
        return Err(Error::Domain(format!("nmax must be <= 10000, got {nmax}")));
    }
    let len = nmax + 1;
    let mut base = vec![0i64; len];
    match kind {
        ThetaKind::Two => {
            let mut n = 0;
            while n * (n + 1) < len {
                base[n * (n + 1)] = 1;
                n += 1;
            }
        }
        ThetaKind::Three | ThetaKind::Four => {
            base[0] = 1;
            let mut n = 1;
            while n * n < len {
                base[n * n] = if kind == ThetaKind::Four && n % 2 == 1 { -2 } else { 2 };
                n += 1;
            }
        }
    }
    let mut acc = base.clone();
    for _ in 1..power {
        acc = cauchy(&acc, &base, len);
    }
    let (scale, quarter_offset) = match kind {
        ThetaKind::Two => (1i64 << power, power),
        _ => (1, 0),
    };
    Ok(QExpansion {
        kind,
        power,
        coefficients: acc,
        scale,
        quarter_offset,
    })
}

/// Σ_{k≥1} c(k) e^{−πku} for a coefficient function bounded by k².
fn coefficient_sum(kind: CoeffKind, u: f64, policy: &TruncationPolicy, what: &'static str) -> Result<f64> {
    let (ta, tb) = shared_tables();
    let table = match kind {
        CoeffKind::A => ta,
        CoeffKind::B => tb,
        _ => unreachable!("only a and b series are summed"),
    };
    let r = (-PI * u).exp();
    let peak = 2.0 / (PI * u);
    let mut sum = 0.0;
    let mut ek = 1.0;
    for k in 1..=policy.max_terms as u64 {
        ek *= r;
        let c = if (k as usize) <= table.cap() {
            table.get(k)
        } else {
            coeff(kind, k)
        };
        sum += c as f64 * ek;
        let kf = k as f64;
        if kf > peak {
            // a(m), b(m) <= m² and the envelope ratio is below one past the peak
            let ratio = ((kf + 2.0) / (kf + 1.0)).powi(2) * r;
            let tail = (kf + 1.0).powi(2) * ek * r / (1.0 - ratio);
            if tail <= policy.tail_epsilon * sum || ek == 0.0 {
                return Ok(sum);
            }
        }
    }
    Err(Error::Truncation {
        what,
        terms: policy.max_terms,
        partial: sum,
    })
}

/// α(u) by direct summation of Σ a(k) e^{−πku}.
pub fn alpha_direct(u: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_positive("alpha", u)?;
    coefficient_sum(CoeffKind::A, u, policy, "alpha series")
}

/// β(u) by direct summation of Σ b(l) e^{−πlu}.
pub fn beta_direct(u: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_positive("beta", u)?;
    coefficient_sum(CoeffKind::B, u, policy, "beta series")
}

/// (d/dw) log θ₂(iw) by term-wise differentiation.
fn log_deriv_theta2(w: f64) -> f64 {
    // common factor e^{−πw/4} cancels between numerator and denominator
    let mut num = 0.0;
    let mut den = 0.0;
    let mut n = 0u64;
    loop {
        let m = (n * (n + 1)) as f64;
        let t = (-PI * w * m).exp();
        let x = n as f64 + 0.5;
        num += x * x * t;
        den += t;
        if t < f64::EPSILON * 1e-3 * den && n > 0 {
            break;
        }
        n += 1;
    }
    -PI * num / den
}

/// (d/dy) log θ₄(iy).
///
/// Equals 2π Σ a(n) e^{−πny} = 2π α(y). For y ≥ ¼ the θ₄ series is
/// differentiated term by term; below that the modular transformation
/// gives −1/(2y) − y^{−2}·(θ₂'/θ₂)(i/y).
pub fn log_deriv_theta4(y: f64) -> Result<f64> {
    check_positive("log_deriv_theta4", y)?;
    if y < 0.25 {
        return Ok(-0.5 / y - log_deriv_theta2(1.0 / y) / (y * y));
    }
    let mut num = 0.0;
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut n = 1u64;
    loop {
        sign = -sign;
        let n2 = (n * n) as f64;
        let t = (-PI * y * n2).exp();
        num += sign * n2 * t;
        sum += sign * t;
        if n2 * t < f64::EPSILON * 1e-3 * num.abs().max(1e-300) {
            break;
        }
        n += 1;
    }
    Ok(-2.0 * PI * num / (1.0 + 2.0 * sum))
}

/// α(u) = Σ a(k) e^{−πku}.
///
/// Uses the direct series for u ≥ ¼ and (d/du) log θ₄(iu) / (2π) with the
/// θ₂ series at 1/u below.
pub fn alpha(u: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_positive("alpha", u)?;
    if u >= 0.25 {
        alpha_direct(u, policy)
    } else {
        Ok(alpha_modular(u))
    }
}

/// α(u) through the modular transformation of θ₄; any u > 0.
pub fn alpha_modular(u: f64) -> f64 {
    (-0.5 / u - log_deriv_theta2(1.0 / u) / (u * u)) / (2.0 * PI)
}

/// β(u) = Σ b(l) e^{−πlu}.
///
/// For u < 1 uses θ₂⁴(iu) = u^{−2} θ₄⁴(i/u), i.e. β(u) = θ₄⁴(i/u) / (16u²).
pub fn beta(u: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_positive("beta", u)?;
    if u >= 1.0 {
        beta_direct(u, policy)
    } else {
        Ok(beta_modular(u))
    }
}

/// β(u) through θ₄ at 1/u; accurate for u ≲ 3.
pub fn beta_modular(u: f64) -> f64 {
    let t4 = theta_direct(ThetaKind::Four, 1.0 / u).expect("positive argument");
    t4.powi(4) / (16.0 * u * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    // θ₃(i) = π^{1/4}/Γ(3/4); Γ(3/4) to 20 digits
    const GAMMA_3_4: f64 = 1.225_416_702_465_177_6;

    #[test]
    fn theta3_at_i() {
        let t = theta(ThetaKind::Three, 1.0).unwrap();
        assert!((t - 1.086_434_8).abs() < 1e-7);
        assert!(rel(t, PI.powf(0.25) / GAMMA_3_4) < 1e-15);
    }

    #[test]
    fn theta2_equals_theta4_at_i() {
        let t2 = theta(ThetaKind::Two, 1.0).unwrap();
        let t4 = theta(ThetaKind::Four, 1.0).unwrap();
        assert!(rel(t2, t4) < 1e-15);
        assert!((t2 - 0.913_579_1).abs() < 1e-7);
    }

    #[test]
    fn theta4_tends_to_one() {
        for y in [30.0, 45.0, 100.0] {
            assert!((theta(ThetaKind::Four, y).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn nonpositive_argument_is_domain_error() {
        assert!(matches!(theta(ThetaKind::Three, 0.0), Err(Error::Domain(_))));
        assert!(matches!(theta(ThetaKind::Two, -1.0), Err(Error::Domain(_))));
        assert!(matches!(alpha(0.0, &pol()), Err(Error::Domain(_))));
        assert!(matches!(beta(f64::NAN, &pol()), Err(Error::Domain(_))));
    }

    #[test]
    fn jacobi_quartic_identity() {
        for y in [0.5, 1.0, 2.0, 5.0] {
            let t2 = theta(ThetaKind::Two, y).unwrap().powi(4);
            let t3 = theta(ThetaKind::Three, y).unwrap().powi(4);
            let t4 = theta(ThetaKind::Four, y).unwrap().powi(4);
            assert!(rel(t2 + t4, t3) < 1e-12, "y={y}");
        }
    }

    #[test]
    fn direct_and_transformed_agree() {
        for i in 0..=40 {
            let y = 0.1 * 100f64.powf(i as f64 / 40.0);
            for kind in [ThetaKind::Two, ThetaKind::Three, ThetaKind::Four] {
                let direct = theta_direct(kind, y).unwrap();
                let dual = match kind {
                    ThetaKind::Two => ThetaKind::Four,
                    ThetaKind::Three => ThetaKind::Three,
                    ThetaKind::Four => ThetaKind::Two,
                };
                let transformed = theta_direct(dual, 1.0 / y).unwrap() / y.sqrt();
                assert!(rel(direct, transformed) < 1e-12, "{kind:?} y={y}");
            }
        }
    }

    #[test]
    fn q_expansion_examples() {
        let t4 = theta_power_coeffs(ThetaKind::Four, 4, 3).unwrap();
        assert_eq!(t4.coefficients, vec![1, -8, 24, -32]);
        let t2 = theta_power_coeffs(ThetaKind::Two, 4, 2).unwrap();
        assert_eq!(t2.scaled(), vec![16, 0, 64]);
        assert_eq!(t2.quarter_offset, 4);
        let t3 = theta_power_coeffs(ThetaKind::Three, 1, 4).unwrap();
        assert_eq!(t3.coefficients, vec![1, 2, 0, 0, 2]);
        assert_eq!(t3.len(), 5);
        assert!(theta_power_coeffs(ThetaKind::Three, 0, 4).is_err());
        assert!(theta_power_coeffs(ThetaKind::Three, 2, 10_001).is_err());
    }

    #[test]
    fn q_expansions_match_coefficient_functions() {
        let t4 = theta_power_coeffs(ThetaKind::Four, 4, 200).unwrap();
        assert_eq!(t4.coefficients[0], 1);
        for k in 1..=200 {
            assert_eq!(t4.coefficients[k], -8 * coeff(CoeffKind::C, k as u64), "k={k}");
        }
        let t2 = theta_power_coeffs(ThetaKind::Two, 4, 200).unwrap();
        for n in 1..=200usize {
            // θ₂⁴ = 16 q Σ ...: q^n sits at index n − 1
            assert_eq!(t2.scaled()[n - 1], 16 * coeff(CoeffKind::B, n as u64), "n={n}");
        }
        let t8 = theta_power_coeffs(ThetaKind::Two, 8, 100).unwrap();
        assert_eq!(t8.scale, 256);
        for n in 2..=100usize {
            assert_eq!(t8.coefficients[n - 2], coeff(CoeffKind::BSquare, n as u64), "n={n}");
        }
    }

    #[test]
    fn q_expansion_evaluates_to_theta() {
        let y = 1.3;
        let q = (-PI * y).exp();
        let e = theta_power_coeffs(ThetaKind::Three, 4, 60).unwrap();
        let v: f64 = e.coefficients.iter().enumerate().map(|(n, &c)| c as f64 * q.powi(n as i32)).sum();
        assert!(rel(v, theta(ThetaKind::Three, y).unwrap().powi(4)) < 1e-14);
    }

    #[test]
    fn alpha_at_one() {
        // oracle: ten explicit terms of Σ a(k) e^{−πk}
        let oracle: f64 = (1..=10u64).map(|k| coeff(CoeffKind::A, k) as f64 * (-PI * k as f64).exp()).sum();
        let a1 = alpha(1.0, &pol()).unwrap();
        assert!((a1 - 0.047_286_5).abs() < 1e-6);
        assert!(rel(a1, oracle) < 1e-11);
    }

    #[test]
    fn alpha_leading_term_dominates() {
        let a = alpha(10.0, &pol()).unwrap();
        let lead = (-10.0 * PI).exp();
        assert!(rel(a, lead) < 1e-12);
    }

    #[test]
    fn alpha_two_paths_agree() {
        for u in [0.05, 0.1, 0.2, 0.25, 0.5, 1.0, 2.0] {
            let d = alpha_direct(u, &pol()).unwrap();
            let m = alpha_modular(u);
            assert!(rel(d, m) < 1e-12, "u={u} direct={d} modular={m}");
        }
    }

    #[test]
    fn beta_values() {
        let b1 = beta(1.0, &pol()).unwrap();
        assert!((b1 - 0.043_537_6).abs() < 1e-7);
        assert!(rel(b1, PI / (32.0 * GAMMA_3_4.powi(4))) < 1e-14);
        let b2 = beta(2.0, &pol()).unwrap();
        let oracle: f64 = [1u64, 3, 5, 7]
            .iter()
            .map(|&l| coeff(CoeffKind::B, l) as f64 * (-2.0 * PI * l as f64).exp())
            .sum();
        assert!((b2 - 0.001_867_4).abs() < 1e-7);
        assert!((b2 - oracle).abs() < 1e-9);
    }

    #[test]
    fn beta_two_paths_agree() {
        for u in [1.0 / 3.0, 0.5, 0.8, 1.0, 1.5, 2.5] {
            let d = beta_direct(u, &pol()).unwrap();
            let m = beta_modular(u);
            assert!(rel(d, m) < 1e-12, "u={u}");
        }
    }

    #[test]
    fn log_derivative_matches_alpha_and_finite_difference() {
        let d1 = log_deriv_theta4(1.0).unwrap();
        assert!((d1 - 0.297_109_9).abs() < 1e-7);
        assert!(rel(d1, 2.0 * PI * alpha(1.0, &pol()).unwrap()) < 1e-12);
        let d2 = log_deriv_theta4(2.0).unwrap();
        assert!(rel(d2, 2.0 * PI * alpha(2.0, &pol()).unwrap()) < 1e-12);
        let h = 1e-5;
        let lt = |y: f64| theta(ThetaKind::Four, y).unwrap().ln();
        let fd = (lt(1.0 + h) - lt(1.0 - h)) / (2.0 * h);
        assert!((fd - d1).abs() < 1e-8);
        assert!(log_deriv_theta4(40.0).unwrap() < 1e-50);
    }

    #[test]
    fn grid_properties() {
        let grid: Vec<f64> = (0..100).map(|i| 0.05 * 400f64.powf(i as f64 / 99.0)).collect();
        let mut prev: Option<(f64, f64)> = None;
        for &u in &grid {
            let a = alpha(u, &pol()).unwrap();
            let b = beta(u, &pol()).unwrap();
            assert!(a > 0.0 && b > 0.0);
            if let Some((pa, pb)) = prev {
                assert!(a < pa && b < pb, "not decreasing at u={u}");
            }
            prev = Some((a, b));
            let d = log_deriv_theta4(u).unwrap();
            assert!(rel(d / (2.0 * PI), a) < 1e-12, "u={u}");
        }
    }

    #[test]
    fn policy_validation() {
        assert!(pol().validate().is_ok());
        let bad = TruncationPolicy {
            tail_epsilon: 0.0,
            ..pol()
        };
        assert!(bad.validate().is_err());
        let bad = TruncationPolicy { max_terms: 8, ..pol() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncation_error_carries_partial_sum() {
        let tight = TruncationPolicy { max_terms: 16, ..pol() };
        match alpha_direct(0.01, &tight) {
            Err(Error::Truncation { partial, terms, .. }) => {
                assert_eq!(terms, 16);
                assert!(partial > 0.0);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
