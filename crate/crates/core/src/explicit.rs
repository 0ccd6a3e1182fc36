//! The prime power equation at a translate x > 0.
//!
//! Pairing the translate G(v + log x) with the explicit formula gives
//!
//! √x Σ Λ(n) α(xn) β(1/(xn)) + √x Σ (Λ(n)/n) α(x/n) β(n/x)
//!   = √x Ĝ(i/2) + Ĝ(−i/2)/√x − √x log π α(x)β(1/x)
//!     + √x ∫₀^∞ J(eᵛ, x)/(1 − e^{−2v}) dv − γ √x α(x)β(1/x)
//!
//! with J(eᵛ, x) = 2e^{−2v}α(x)β(1/x) − e^{−v}α(xe^{−v})β(eᵛ/x) − α(xeᵛ)β(e^{−v}/x).
//! The zero sum on the other side of the explicit formula vanishes because
//! Ĝ contains ζ as a factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::arith::von_mangoldt;
use crate::error::{Error, Result};
use crate::kernel::{g_hat_boundary, g_hat_series, KernelConfig};
use crate::quad::{integrate_pieces, QuadOptions};
use crate::report::Check;
use crate::specfun::{digamma_c, EULER_GAMMA};
use crate::theta::{alpha, beta, TruncationPolicy};

/// Which way round the Bessel boundary terms are attached to √x and 1/√x.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryOrientation {
    /// √x Ĝ(i/2) + Ĝ(−i/2)/√x, the orientation produced by the translate.
    #[default]
    Translate,
    /// Ĝ(i/2)/√x + √x Ĝ(−i/2); kept for diagnosis.
    Swapped,
}

/// Sign in front of the log π term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchimedeanOrientation {
    #[default]
    MinusLogPi,
    /// Diagnostic only.
    PlusLogPi,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpeOptions {
    pub boundary: BoundaryOrientation,
    pub archimedean: ArchimedeanOrientation,
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("translate x must be positive and finite, got {x}")))
    }
}

/// Cutoff for both prime sums: their terms decay like e^{−πxn} and e^{−πn/x}.
pub fn prime_sum_cutoff(x: f64, policy: &TruncationPolicy) -> usize {
    let scale = x.max(1.0 / x) / PI;
    (scale * (1.0 / policy.tail_epsilon).ln()).ceil() as usize + 64
}

/// √x Σ Λ(n) α(xn) β(1/(xn)) + √x Σ (Λ(n)/n) α(x/n) β(n/x).
pub fn lhs_prime_sum(x: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_x(x)?;
    let n_max = prime_sum_cutoff(x, policy);
    if n_max > policy.max_terms {
        return Err(Error::Truncation {
            what: "prime sum",
            terms: policy.max_terms,
            partial: f64::NAN,
        });
    }
    let mut first = 0.0;
    let mut second = 0.0;
    for n in 2..=n_max as u64 {
        let lam = von_mangoldt(n);
        if lam == 0.0 {
            continue;
        }
        let nf = n as f64;
        first += lam * alpha(x * nf, policy)? * beta(1.0 / (x * nf), policy)?;
        second += lam / nf * alpha(x / nf, policy)? * beta(nf / x, policy)?;
    }
    Ok(x.sqrt() * (first + second))
}

/// √x Ĝ(i/2) + Ĝ(−i/2)/√x, or the swapped orientation.
pub fn bessel_boundary_terms(x: f64, cfg: &KernelConfig, orientation: BoundaryOrientation) -> Result<f64> {
    check_x(x)?;
    let (plus, minus) = g_hat_boundary(cfg)?;
    let r = x.sqrt();
    Ok(match orientation {
        BoundaryOrientation::Translate => r * plus + minus / r,
        BoundaryOrientation::Swapped => plus / r + r * minus,
    })
}

/// Runs an integration whose integrand may fail, surfacing the first error.
fn integrate_fallible<F>(f: F, breaks: &[f64], opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let wrapped = |v: f64| match f(v) {
        Ok(y) => y,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let value = integrate_pieces(&wrapped, breaks, opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    value
}

/// J(eᵛ, x) / (1 − e^{−2v}).
fn j_integrand(v: f64, x: f64, ab: f64, policy: &TruncationPolicy) -> Result<f64> {
    let ev = v.exp();
    let j = 2.0 * ab / (ev * ev)
        - alpha(x / ev, policy)? * beta(ev / x, policy)? / ev
        - alpha(x * ev, policy)? * beta(1.0 / (x * ev), policy)?;
    Ok(j / -(-2.0 * v).exp_m1())
}

/// √x ∫₀^∞ J(eᵛ, x)/(1 − e^{−2v}) dv − γ √x α(x)β(1/x).
pub fn archimedean_log(x: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_x(x)?;
    let ab = alpha(x, policy)? * beta(1.0 / x, policy)?;
    // the slowest term is 2αβe^{−2v}; the others die once β(eᵛ/x) does
    let end = (0.5 * (2.0 / policy.tail_epsilon).ln()).max(x.ln() + 40f64.ln()) + 2.0;
    let mut breaks = vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    let lx = x.ln();
    if lx > 0.0 && lx < end {
        breaks.push(lx);
    }
    breaks.retain(|&b| b < end);
    breaks.push(end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let opts = QuadOptions {
        rel_tol: policy.quad_tol,
        abs_tol: 1e-300,
        max_panels: 20_000,
    };
    let integral = integrate_fallible(|v| j_integrand(v, x, ab, policy), &breaks, opts)?;
    Ok(x.sqrt() * (integral - EULER_GAMMA * ab))
}

/// The Archimedean term from the digamma side of the explicit formula:
/// (1/2π) ∫ Re ψ(¼ + it/2) x^{−it} Ĝ(t) dt, folded onto t ≥ 0.
///
/// x^{−it} Ĝ(t) is the transform of the translate G(v + log x).
pub fn archimedean_spectral(x: f64, cfg: &KernelConfig) -> Result<f64> {
    check_x(x)?;
    // |Ĝ(t)| decays like e^{−π|t|/2}
    let t_end = ((2.0 / PI) * (1.0 / cfg.policy.tail_epsilon).ln() + 12.0).clamp(20.0, 60.0);
    let lx = x.ln();
    let f = |t: f64| -> Result<f64> {
        let psi = digamma_c(Complex64::new(0.25, 0.5 * t))?.re;
        let g = g_hat_series(Complex64::new(t, 0.0), cfg)?;
        Ok(psi * (Complex64::from_polar(1.0, -t * lx) * g).re)
    };
    let mut breaks: Vec<f64> = vec![0.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0];
    breaks.retain(|&b| b < t_end);
    breaks.push(t_end);
    let opts = QuadOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-16,
        max_panels: 2_000,
    };
    Ok(integrate_fallible(f, &breaks, opts)? / PI)
}

/// Both sides of the prime power equation at one translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PPETerms {
    pub x: f64,
    pub lhs_prime_sum: f64,
    pub bessel_boundary: f64,
    pub log_pi_term: f64,
    pub archimedean: f64,
    pub rhs_total: f64,
    pub residual_abs: f64,
    pub residual_rel: f64,
}

impl PPETerms {
    pub fn to_check(&self, name: impl Into<String>, tol: f64) -> Check {
        Check::new(name, self.lhs_prime_sum, Some(self.rhs_total))
            .gate(self.residual_rel < tol, tol)
            .extra("x", self.x)
            .extra("bessel_boundary", self.bessel_boundary)
            .extra("log_pi_term", self.log_pi_term)
            .extra("archimedean", self.archimedean)
    }
}

fn log_pi_term(x: f64, policy: &TruncationPolicy, sign: ArchimedeanOrientation) -> Result<f64> {
    let v = x.sqrt() * PI.ln() * alpha(x, policy)? * beta(1.0 / x, policy)?;
    Ok(match sign {
        ArchimedeanOrientation::MinusLogPi => -v,
        ArchimedeanOrientation::PlusLogPi => v,
    })
}

/// Assembles both sides at x with the default orientations.
pub fn v_of_x(x: f64, cfg: &KernelConfig) -> Result<PPETerms> {
    v_of_x_with(x, cfg, PpeOptions::default())
}

pub fn v_of_x_with(x: f64, cfg: &KernelConfig, opts: PpeOptions) -> Result<PPETerms> {
    check_x(x)?;
    let p = &cfg.policy;
    let lhs = lhs_prime_sum(x, p)?;
    let bessel_boundary = bessel_boundary_terms(x, cfg, opts.boundary)?;
    let log_pi = log_pi_term(x, p, opts.archimedean)?;
    let archimedean = archimedean_log(x, p)?;
    let rhs_total = bessel_boundary + log_pi + archimedean;
    let residual_abs = (lhs - rhs_total).abs();
    Ok(PPETerms {
        x,
        lhs_prime_sum: lhs,
        bessel_boundary,
        log_pi_term: log_pi,
        archimedean,
        rhs_total,
        residual_abs,
        residual_rel: residual_abs / lhs.abs(),
    })
}

/// G(v + log x) = √x e^{v/2} α(xeᵛ) β(e^{−v}/x).
pub fn translate_g(v: f64, x: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_x(x)?;
    Ok(x.sqrt() * (0.5 * v).exp() * alpha(x * v.exp(), policy)? * beta((-v).exp() / x, policy)?)
}

/// f(x) + f(1/x) − f(1)(√x + 1/√x) applied to both sides of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Elimination {
    pub x: f64,
    pub lhs_combined: f64,
    /// Right side without the Bessel terms.
    pub rhs_combined: f64,
    /// What the Bessel terms contribute to the combination; zero up to rounding.
    pub boundary_combined: f64,
    pub residual: f64,
}

pub fn bessel_eliminated_residual(x: f64, cfg: &KernelConfig) -> Result<Elimination> {
    check_x(x)?;
    let at = [v_of_x(x, cfg)?, v_of_x(1.0 / x, cfg)?, v_of_x(1.0, cfg)?];
    let w = x.sqrt() + 1.0 / x.sqrt();
    let combine = |f: &dyn Fn(&PPETerms) -> f64| f(&at[0]) + f(&at[1]) - f(&at[2]) * w;
    let lhs_combined = combine(&|t| t.lhs_prime_sum);
    let rhs_combined = combine(&|t| t.log_pi_term + t.archimedean);
    let boundary_combined = combine(&|t| t.bessel_boundary);
    Ok(Elimination {
        x,
        lhs_combined,
        rhs_combined,
        boundary_combined,
        residual: (lhs_combined - rhs_combined).abs(),
    })
}
