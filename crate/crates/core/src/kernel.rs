//! The kernel G, its transform Ĝ, and the checks that tie them to ζ.
//!
//! With g(v, x) = e^{v/2} exp(−(x/2)(eᵛ + e^{−v})), whose transform is
//! 2K(½ + it, x), the kernel is
//!
//! G(v) = Σ_j Σ_{d|j} a(d) b(j/d) (j/d²)^{1/4} g(v − ½log(j/d²), 2π√j)
//!      = e^{v/2} α(eᵛ) β(e^{−v}),
//!
//! and Ĝ(t) = Σ_j Σ_{d|j} a(d) b(j/d) (j/d²)^{s/2} 2K(s, 2π√j), s = ½ + it.
//! The Mellin computation behind it gives Ĝ((s − ½)/i) = E(s) ζ(s).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::arith::{divisor_pairs, shared_tables, CoeffKind, CoeffTable};
use crate::error::{Error, Result};
use crate::report::{fmt_complex, Check};
use crate::specfun::{bessel_k, gamma_c, zeta_c, zeta_star};
use crate::theta::{alpha, beta, TruncationPolicy};

/// Largest |Im t| accepted by [`g_hat_series`].
pub const MAX_IM_T: f64 = 4.0;

/// Cutoff of the outer sum over j plus the shared truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub j_max: usize,
    pub policy: TruncationPolicy,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            j_max: 200,
            policy: TruncationPolicy::default(),
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if self.j_max < 20 {
            return Err(Error::Config(format!("j_max must be >= 20, got {}", self.j_max)));
        }
        let tail = (-2.0 * PI * (self.j_max as f64).sqrt()).exp();
        if tail > self.policy.tail_epsilon {
            return Err(Error::Config(format!(
                "j_max = {} leaves a Bessel tail of {tail:e}, above tail_epsilon {:e}",
                self.j_max, self.policy.tail_epsilon
            )));
        }
        Ok(())
    }
}

/// g(v, x) = e^{v/2} exp(−(x/2)(eᵛ + e^{−v})).
pub fn g_pair(v: f64, x: f64) -> f64 {
    (0.5 * v - 0.5 * x * (v.exp() + (-v).exp())).exp()
}

/// G(v) = e^{v/2} α(eᵛ) β(e^{−v}).
pub fn g_closed(v: f64, policy: &TruncationPolicy) -> Result<f64> {
    Ok((0.5 * v).exp() * alpha(v.exp(), policy)? * beta((-v).exp(), policy)?)
}

/// G(v) from the truncated double sum over j ≤ j_max, d | j.
pub fn g_series(v: f64, cfg: &KernelConfig) -> f64 {
    let (a, b) = shared_tables();
    let mut sum = 0.0;
    for j in 1..=cfg.j_max as u64 {
        let x = 2.0 * PI * (j as f64).sqrt();
        for (d, l) in divisor_pairs(j) {
            let bl = b.get(l);
            if bl == 0 {
                continue;
            }
            let r = j as f64 / (d * d) as f64;
            let shift = 0.5 * r.ln();
            sum += (a.get(d) * bl) as f64 * r.powf(0.25) * g_pair(v - shift, x);
        }
    }
    sum
}

/// Σ_{d|j} a(d) b(j/d) (j/d²)^{s/2} for one j.
fn divisor_weight(j: u64, s: Complex64, a: &CoeffTable, b: &CoeffTable) -> Complex64 {
    divisor_pairs(j)
        .into_iter()
        .filter(|&(_, l)| b.get(l) != 0)
        .map(|(d, l)| {
            let r = (j as f64 / (d * d) as f64).ln();
            (a.get(d) * b.get(l)) as f64 * (0.5 * s * r).exp()
        })
        .sum()
}

/// Ĝ(t) from the Bessel double sum, for |Im t| ≤ [`MAX_IM_T`].
pub fn g_hat_series(t: Complex64, cfg: &KernelConfig) -> Result<Complex64> {
    if t.im.abs() > MAX_IM_T || !t.re.is_finite() {
        return Err(Error::Domain(format!("g_hat_series needs |Im t| <= {MAX_IM_T}, got {t}")));
    }
    let s = Complex64::new(0.5, 0.0) + Complex64::i() * t;
    let (a, b) = shared_tables();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..=cfg.j_max as u64 {
        let w = divisor_weight(j, s, a, b);
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        sum += w * 2.0 * bessel_k(s, 2.0 * PI * (j as f64).sqrt(), &cfg.policy)?;
    }
    Ok(sum)
}

fn cache_key(cfg: &KernelConfig) -> (usize, u64, u64, u64) {
    let p = &cfg.policy;
    (cfg.j_max, p.tail_epsilon.to_bits(), p.quad_step.to_bits(), p.quad_tol.to_bits())
}

/// (Ĝ(i/2), Ĝ(−i/2)), both real, memoized per configuration.
pub fn g_hat_boundary(cfg: &KernelConfig) -> Result<(f64, f64)> {
    type Cache = Mutex<HashMap<(usize, u64, u64, u64), (f64, f64)>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = cache_key(cfg);
    if let Some(&v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let plus = g_hat_series(Complex64::new(0.0, 0.5), cfg)?.re;
    let minus = g_hat_series(Complex64::new(0.0, -0.5), cfg)?.re;
    cache.lock().expect("cache lock").insert(key, (plus, minus));
    Ok((plus, minus))
}

fn pow2(z: Complex64) -> Complex64 {
    (z * std::f64::consts::LN_2).exp()
}

/// E(s) = 2·s(s+1)/(32π²√2)·(2^{s/2} − 2^{−s/2})(2^{(s−1)/2} − 2^{−(s−1)/2})
/// ·π^{−s/2}Γ(s/2)ζ*(s+1).
pub fn e_factor(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) || s == Complex64::new(-1.0, 0.0) {
        return Err(Error::Pole {
            function: "E",
            at: fmt_complex(s),
        });
    }
    let half = 0.5 * s;
    let hm = 0.5 * (s - 1.0);
    let pre = 2.0 * s * (s + 1.0) / (32.0 * PI * PI * 2f64.sqrt());
    let twos = (pow2(half) - pow2(-half)) * (pow2(hm) - pow2(-hm));
    if twos == Complex64::new(0.0, 0.0) {
        return Ok(twos);
    }
    let pi_pow = (-half * PI.ln()).exp();
    Ok(pre * twos * pi_pow * gamma_c(half)? * zeta_star(s + 1.0)?)
}

/// Both sides of Ĝ((s − ½)/i) = E(s) ζ(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "crate::report::complex_str")]
    pub s: Complex64,
    #[serde(with = "crate::report::complex_str")]
    pub lhs: Complex64,
    #[serde(with = "crate::report::complex_str")]
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    #[serde(with = "crate::report::complex_str")]
    pub ratio: Complex64,
}

impl Factorization {
    pub fn to_check(&self, name: impl Into<String>, tol: f64) -> Check {
        Check::new(name, self.lhs.norm(), Some(self.rhs.norm()))
            .errors(self.abs_err, self.rel_err)
            .gate(self.rel_err < tol, tol)
            .extra("s", fmt_complex(self.s))
            .extra("lhs", fmt_complex(self.lhs))
            .extra("rhs", fmt_complex(self.rhs))
            .extra("ratio", fmt_complex(self.ratio))
    }
}

/// L = E(s)ζ(s) against R = Ĝ((s − ½)/i).
pub fn verify_factorization(s: Complex64, cfg: &KernelConfig) -> Result<Factorization> {
    let lhs = e_factor(s)? * zeta_c(s)?;
    let t = (s - 0.5) / Complex64::i();
    let rhs = g_hat_series(t, cfg)?;
    let abs_err = (lhs - rhs).norm();
    Ok(Factorization {
        s,
        lhs,
        rhs,
        abs_err,
        rel_err: abs_err / rhs.norm(),
        ratio: lhs / rhs,
    })
}

/// |Ĝ(γ)| against the larger of |Ĝ(γ ± 0.5)|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroDip {
    pub gamma: f64,
    pub at_zero: f64,
    pub neighbour: f64,
    pub ratio: f64,
}

pub fn zero_dip(gamma: f64, cfg: &KernelConfig) -> Result<ZeroDip> {
    let at = |t: f64| g_hat_series(Complex64::new(t, 0.0), cfg).map(|z| z.norm());
    let at_zero = at(gamma)?;
    let neighbour = at(gamma - 0.5)?.max(at(gamma + 0.5)?);
    Ok(ZeroDip {
        gamma,
        at_zero,
        neighbour,
        ratio: at_zero / neighbour,
    })
}

fn weight8_table(cap: usize) -> &'static CoeffTable {
    static TABLE: OnceLock<Mutex<Option<&'static CoeffTable>>> = OnceLock::new();
    let slot = TABLE.get_or_init(|| Mutex::new(None));
    let mut guard = slot.lock().expect("table lock");
    match *guard {
        Some(t) if t.cap() >= cap => t,
        _ => {
            let t: &'static CoeffTable = Box::leak(Box::new(CoeffTable::build(CoeffKind::BSquare, cap.max(256))));
            *guard = Some(t);
            t
        }
    }
}

/// Both sides of the θ₄⁸ identity at s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight8 {
    #[serde(with = "crate::report::complex_str")]
    pub s: Complex64,
    #[serde(with = "crate::report::complex_str")]
    pub lhs: Complex64,
    #[serde(with = "crate::report::complex_str")]
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    #[serde(with = "crate::report::complex_str")]
    pub ratio: Complex64,
}

/// L = s(s+2)(s+3)/(256π³√2)·2^{s/2}(2^{(s−1)/2} − 2^{−(s−1)/2})ζ*(s)ζ*(s+3)
/// against R = Σ_j Σ_{d|j} a(d) B(j/d) (j/d²)^{s/2} K(s, 2π√j).
pub fn verify_weight8(s: Complex64, cfg: &KernelConfig) -> Result<Weight8> {
    let hm = 0.5 * (s - 1.0);
    let pre = s * (s + 2.0) * (s + 3.0) / (256.0 * PI.powi(3) * 2f64.sqrt());
    let lhs = pre * pow2(0.5 * s) * (pow2(hm) - pow2(-hm)) * zeta_star(s)? * zeta_star(s + 3.0)?;
    let (a, _) = shared_tables();
    let big_b = weight8_table(cfg.j_max);
    let terms: Vec<Result<Complex64>> = (1..=cfg.j_max as u64)
        .into_par_iter()
        .map(|j| {
            let w = divisor_weight(j, s, a, big_b);
            if w == Complex64::new(0.0, 0.0) {
                return Ok(w);
            }
            Ok(w * bessel_k(s, 2.0 * PI * (j as f64).sqrt(), &cfg.policy)?)
        })
        .collect();
    let mut rhs = Complex64::new(0.0, 0.0);
    for t in terms {
        rhs += t?;
    }
    let abs_err = (lhs - rhs).norm();
    Ok(Weight8 {
        s,
        lhs,
        rhs,
        abs_err,
        rel_err: abs_err / rhs.norm(),
        ratio: lhs / rhs,
    })
}

/// Spread of the weight-8 ratio across `points`: max |r_k/r_0 − 1|.
pub fn weight8_ratio_spread(points: &[Weight8]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    points
        .iter()
        .map(|w| (w.ratio / first.ratio - 1.0).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeff;
    use crate::specfun::zeta_zeros;
    use crate::theta::{theta_power_coeffs, ThetaKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut k = cfg();
        k.j_max = 10;
        assert!(matches!(k.validate(), Err(Error::Config(_))));
        // e^{−2π√20} ≈ 6e−13 is above the default tail tolerance
        k.j_max = 20;
        assert!(k.validate().is_err());
        k.policy.tail_epsilon = 1e-12;
        assert!(k.validate().is_ok());
        assert!((-2.0 * PI * 200f64.sqrt()).exp() < 1e-38);
    }

    #[test]
    fn g_pair_values() {
        assert!((g_pair(0.0, 2.0) - (-2f64).exp()).abs() < 1e-16);
        let (v, x) = (1.3, 4.0);
        let lhs = (-v / 2.0f64).exp() * g_pair(v, x);
        let rhs = (v / 2.0f64).exp() * g_pair(-v, x);
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn g_pair_transform_is_bessel() {
        use crate::quad::{integrate, QuadOptions};
        let (t, x) = (2.0, 3.0);
        let o = QuadOptions::default();
        let re = integrate(|v| (t * v).cos() * g_pair(v, x), -12.0, 12.0, o).unwrap();
        let im = integrate(|v| (t * v).sin() * g_pair(v, x), -12.0, 12.0, o).unwrap();
        let k = bessel_k(c(0.5, t), x, &pol()).unwrap();
        assert!((c(0.5 * re, 0.5 * im) - k).norm() / k.norm() < 1e-9);
    }

    #[test]
    fn g_closed_and_series_agree() {
        let g0 = g_closed(0.0, &pol()).unwrap();
        assert!((g0 - 0.047_286_5 * 0.043_537_6).abs() < 1e-8);
        for v in [0.0, 2f64.ln(), 1.5, -0.8] {
            let closed = g_closed(v, &pol()).unwrap();
            let series = g_series(v, &cfg());
            assert!((closed - series).abs() < 1e-10 * closed, "v={v}");
        }
        let l2 = 2f64.ln();
        let expect = 2f64.sqrt() * alpha(2.0, &pol()).unwrap() * beta(0.5, &pol()).unwrap();
        assert!((g_closed(l2, &pol()).unwrap() - expect).abs() < 1e-15);
        assert!(g_closed(4.0, &pol()).unwrap() < 1e-70);
    }

    #[test]
    fn g_series_reflection() {
        // e^{v/2} G(−v) summed directly and with reflected terms
        let v = 0.9;
        let (a, b) = shared_tables();
        let mut reflected = 0.0;
        for j in 1..=200u64 {
            let x = 2.0 * PI * (j as f64).sqrt();
            for (d, l) in divisor_pairs(j) {
                let r = j as f64 / (d * d) as f64;
                let w = (a.get(d) * b.get(l)) as f64 * r.powf(0.25);
                // g(−u) = e^{−u} g(u)
                let u = v + 0.5 * r.ln();
                reflected += w * (v / 2.0f64).exp() * (-u).exp() * g_pair(u, x);
            }
        }
        let direct = (v / 2.0f64).exp() * g_series(-v, &cfg());
        assert!((direct - reflected).abs() < 1e-9 * direct);
    }

    #[test]
    fn g_hat_special_points() {
        let k = cfg();
        let (plus, minus) = g_hat_boundary(&k).unwrap();
        // Ĝ(i/2) = 2 Σ a b K(0, 2π√j): the (j/d²)-power is 1
        let (a, b) = shared_tables();
        let mut oracle = 0.0;
        for j in 1..=200u64 {
            let w: f64 = divisor_pairs(j).iter().map(|&(d, l)| (a.get(d) * b.get(l)) as f64).sum();
            oracle += w * 2.0 * bessel_k(c(0.0, 0.0), 2.0 * PI * (j as f64).sqrt(), &pol()).unwrap().re;
        }
        assert!((plus - oracle).abs() < 1e-13 * oracle);
        assert!(minus > 0.0);
        let g3 = g_hat_series(c(3.0, 0.0), &k).unwrap();
        let gm3 = g_hat_series(c(-3.0, 0.0), &k).unwrap();
        assert!((g3 - gm3.conj()).norm() < 1e-13 * g3.norm());
        let g0 = g_hat_series(c(0.0, 0.0), &k).unwrap();
        let lead = 2.0 * bessel_k(c(0.5, 0.0), 2.0 * PI, &pol()).unwrap().re;
        assert!((lead - 1.8674e-3).abs() < 1e-7);
        assert!(g0.re > lead && g0.im.abs() < 1e-18);
        assert!(g_hat_series(c(0.0, 5.0), &k).is_err());
    }

    #[test]
    fn e_factor_properties() {
        assert_eq!(e_factor(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let s = c(2.0, 3.0);
        assert!((e_factor(s.conj()).unwrap() - e_factor(s).unwrap().conj()).norm() < 1e-15);
        assert!(e_factor(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn factorization_examples() {
        let k = cfg();
        for (s, tol) in [(c(2.0, 0.0), 1e-8), (c(3.0, 0.7), 1e-7), (c(2.5, 0.0), 1e-8)] {
            let f = verify_factorization(s, &k).unwrap();
            assert!(f.rel_err < tol, "s={s} rel={}", f.rel_err);
            assert!((f.ratio - 1.0).norm() < tol);
        }
    }

    #[test]
    fn factorization_grid() {
        let k = cfg();
        for sigma in [0.5, 1.5, 2.0] {
            for t in [0.0, 5.0, 10.0, 20.0] {
                let f = verify_factorization(c(sigma, t), &k).unwrap();
                if f.lhs.norm() > 1e-30 {
                    assert!(f.rel_err < 1e-6, "s={sigma}+{t}i rel={}", f.rel_err);
                }
            }
        }
    }

    #[test]
    fn dips_at_first_zeros() {
        let zeros = zeta_zeros(5).unwrap();
        for &g in &zeros.ordinates {
            let d = zero_dip(g, &cfg()).unwrap();
            assert!(d.ratio < 1e-3, "gamma={g} ratio={}", d.ratio);
        }
        let f = verify_factorization(c(0.5, zeros.ordinates[0]), &cfg()).unwrap();
        let d = zero_dip(zeros.ordinates[0], &cfg()).unwrap();
        assert!(f.rhs.norm() < 1e-3 * d.neighbour);
    }

    #[test]
    fn truncation_stability() {
        let k1 = cfg();
        let k2 = KernelConfig { j_max: 400, ..k1 };
        for t in [0.0, 10.0] {
            let a = g_hat_series(c(t, 0.0), &k1).unwrap();
            let b = g_hat_series(c(t, 0.0), &k2).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm(), "t={t}");
        }
    }

    #[test]
    fn weight8_constant_ratio() {
        let pts: Vec<Weight8> = [2.0, 2.5, 3.0]
            .iter()
            .map(|&s| verify_weight8(c(s, 0.0), &cfg()).unwrap())
            .collect();
        assert!(weight8_ratio_spread(&pts) < 1e-6);
        assert!((pts[0].ratio - 1.0).norm() < 1e-6);
    }

    #[test]
    fn b_square_matches_theta2_eighth_power() {
        let q = theta_power_coeffs(ThetaKind::Two, 8, 100).unwrap();
        // θ₂⁸/256 = q²(Σ q^{n(n+1)})⁸
        for n in 1..=100u64 {
            let idx = n as usize;
            let from_theta = if idx >= 2 { q.coefficients[idx - 2] } else { 0 };
            assert_eq!(from_theta, coeff(CoeffKind::BSquare, n), "n={n}");
        }
    }
}
