//! The system T Λ = V at finite truncation.
//!
//! Dividing the prime power equation at x = m by √m gives
//! Σ_n f(m, n) Λ(n) = V(m) with
//! f(m, n) = α(mn)β(1/(mn)) + (1/n)α(m/n)β(n/m).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{prime_power_base, von_mangoldt};
use crate::error::{Error, Result};
use crate::explicit::v_of_x;
use crate::kernel::KernelConfig;
use crate::report::Check;
use crate::specfun::ZetaZeroList;
use crate::theta::{alpha, beta, TruncationPolicy};

/// Largest truncation order accepted by [`build_system`].
pub const MAX_ORDER: usize = 256;

/// f(m, n) = α(mn)β(1/(mn)) + (1/n)α(m/n)β(n/m).
pub fn f_entry(m: u64, n: u64, policy: &TruncationPolicy) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("matrix indices start at 1".into()));
    }
    let (mf, nf) = (m as f64, n as f64);
    let p = mf * nf;
    let q = mf / nf;
    Ok(alpha(p, policy)? * beta(1.0 / p, policy)? + alpha(q, policy)? * beta(1.0 / q, policy)? / nf)
}

/// Dense N×N matrix of f(m, n) with the right side V(m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TMatrix {
    pub n: usize,
    /// Row-major, `entries[(m−1)·n + (k−1)] = f(m, k)`.
    pub entries: Vec<f64>,
    pub rhs: Vec<f64>,
    pub cfg: KernelConfig,
    /// True when `rhs` was replaced by T·Λ.
    pub synthetic: bool,
}

impl TMatrix {
    /// f(m, k), 1-based.
    pub fn get(&self, m: usize, k: usize) -> f64 {
        self.entries[(m - 1) * self.n + (k - 1)]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[(m - 1) * self.n..m * self.n]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    /// T·v for a length-N vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (1..=self.n)
            .map(|m| self.row(m).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The same matrix with V replaced by T·Λ, so the system is exactly
    /// consistent with the true solution.
    pub fn synthetic(&self) -> Self {
        let mut out = self.clone();
        out.rhs = self.apply(&true_lambda(self.n));
        out.synthetic = true;
        out
    }
}

/// Λ(1), …, Λ(N).
pub fn true_lambda(n: usize) -> Vec<f64> {
    (1..=n as u64).map(von_mangoldt).collect()
}

/// Fills T and V for orders 1..=N.
pub fn build_system(n: usize, cfg: &KernelConfig) -> Result<TMatrix> {
    cfg.validate()?;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Config(format!("matrix order must be in 1..={MAX_ORDER}, got {n}")));
    }
    let entries = (0..n * n)
        .into_par_iter()
        .map(|idx| f_entry((idx / n + 1) as u64, (idx % n + 1) as u64, &cfg.policy))
        .collect::<Result<Vec<f64>>>()?;
    let rhs = (1..=n)
        .into_par_iter()
        .map(|m| {
            let x = m as f64;
            v_of_x(x, cfg).map(|t| t.rhs_total / x.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TMatrix {
        n,
        entries,
        rhs,
        cfg: *cfg,
        synthetic: false,
    })
}

/// r(m) = |Σ_{k ≤ n_tail} f(m, k) Λ(k) − V(m)| for every row, with the
/// columns past N computed on the fly.
pub fn forward_residual(tm: &TMatrix, n_tail: usize) -> Result<Vec<f64>> {
    if n_tail < tm.n {
        return Err(Error::Config(format!("n_tail = {n_tail} is below the matrix order {}", tm.n)));
    }
    let policy = tm.cfg.policy;
    (1..=tm.n)
        .into_par_iter()
        .map(|m| {
            let mut sum = 0.0;
            for k in 1..=n_tail {
                let lam = von_mangoldt(k as u64);
                if lam == 0.0 {
                    continue;
                }
                let f = if k <= tm.n {
                    tm.get(m, k)
                } else {
                    f_entry(m as u64, k as u64, &policy)?
                };
                sum += f * lam;
            }
            Ok((sum - tm.rhs[m - 1]).abs())
        })
        .collect()
}

/// The block-sum and diagonal diagnostics at order n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub n: u64,
    pub diagonal: f64,
    /// Σ_{k=n+1}^{2n−1} f(n, k).
    pub block: f64,
    /// log 2 · α(1) β(2).
    pub block_bound: f64,
    /// α(1) β(1), the limit of n·f(n, n).
    pub diagonal_limit: f64,
}

pub fn structure(n: u64, policy: &TruncationPolicy) -> Result<Structure> {
    if n < 2 {
        return Err(Error::Domain(format!("structure checks need n >= 2, got {n}")));
    }
    let a1 = alpha(1.0, policy)?;
    let block = (n + 1..2 * n)
        .map(|k| f_entry(n, k, policy))
        .sum::<Result<f64>>()?;
    Ok(Structure {
        n,
        diagonal: f_entry(n, n, policy)?,
        block,
        block_bound: 2f64.ln() * a1 * beta(2.0, policy)?,
        diagonal_limit: a1 * beta(1.0, policy)?,
    })
}

/// Report entries for [`structure`] at order n.
///
/// `block_exceeds_scaled_diagonal` tests Σ_block > n·f(n, n) literally;
/// `block_exceeds_diagonal` is the row-dominance comparison Σ_block > f(n, n).
pub fn structure_checks(n: u64, policy: &TruncationPolicy) -> Result<Vec<Check>> {
    let s = structure(n, policy)?;
    let scaled = n as f64 * s.diagonal;
    let diag_err = (scaled - s.diagonal_limit).abs() / s.diagonal_limit;
    Ok(vec![
        Check::new(format!("diagonal_asymptotic[n={n}]"), scaled, Some(s.diagonal_limit))
            .gate(diag_err < 0.05, 0.05),
        Check::new(format!("block_lower_bound[n={n}]"), s.block, Some(s.block_bound))
            .gate(s.block >= s.block_bound, 0.0),
        Check::new(format!("block_exceeds_scaled_diagonal[n={n}]"), s.block, Some(scaled))
            .gate(s.block > scaled, 0.0),
        Check::new(format!("block_exceeds_diagonal[n={n}]"), s.block, Some(s.diagonal))
            .extra("holds", s.block > s.diagonal),
    ])
}

/// Output of a regularized recovery experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub n: usize,
    pub ridge: f64,
    pub lambda_hat: Vec<f64>,
    pub errors_vs_true: Vec<f64>,
    /// max |R_ii| / min |R_ii| of the QR factor.
    pub condition_estimate: f64,
    pub forward_residual_inf: f64,
}

impl RecoveryResult {
    pub fn max_error(&self) -> f64 {
        self.errors_vs_true.iter().copied().fold(0.0, f64::max)
    }
}

/// ‖T v − V‖∞.
pub fn forward_residual_inf(tm: &TMatrix, v: &[f64]) -> f64 {
    tm.apply(v)
        .iter()
        .zip(&tm.rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Minimizes ‖TΛ̂ − V‖² + ridge·‖Λ̂‖² by Householder QR of [T; √ridge·I].
pub fn solve_regularized(tm: &TMatrix, ridge: f64) -> Result<RecoveryResult> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("ridge must be a nonnegative number, got {ridge}")));
    }
    let n = tm.n;
    let mut a = DMatrix::<f64>::zeros(2 * n, n);
    a.view_mut((0, 0), (n, n)).copy_from(&tm.to_dmatrix());
    let root = ridge.sqrt();
    for i in 0..n {
        a[(n + i, i)] = root;
    }
    let mut b = DVector::<f64>::zeros(2 * n);
    b.rows_mut(0, n).copy_from_slice(&tm.rhs);

    let qr = a.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let big = diag.iter().copied().fold(0.0, f64::max);
    let small = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_estimate = big / small;
    // negated so that a NaN pivot also counts as singular
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let singular = !(small > big * f64::EPSILON * n as f64);
    if singular {
        return Err(Error::Singular(format!(
            "triangular factor is numerically singular (pivot ratio {condition_estimate:e}) at ridge {ridge:e}"
        )));
    }
    let rhs = qr.q().transpose() * b;
    let x = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Singular("zero pivot in back substitution".into()))?;
    let lambda_hat: Vec<f64> = x.iter().copied().collect();
    let errors_vs_true = lambda_hat
        .iter()
        .zip(true_lambda(n))
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(RecoveryResult {
        n,
        ridge,
        forward_residual_inf: forward_residual_inf(tm, &lambda_hat),
        lambda_hat,
        errors_vs_true,
        condition_estimate,
    })
}

/// Ψ₀(N) from Λ against the truncated explicit formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psi0 {
    pub n: u64,
    pub zero_count: usize,
    pub direct: f64,
    pub explicit: f64,
    pub gap: f64,
    pub rel_gap: f64,
}

/// Σ_n u(N, n) Λ(n): weight 1 below N, ½ at N when N is a prime power.
pub fn psi0_direct(n: u64) -> f64 {
    let below: f64 = (2..n).map(von_mangoldt).sum();
    let top = if prime_power_base(n).is_some() { 0.5 * von_mangoldt(n) } else { 0.0 };
    below + top
}

/// ζ'/ζ(0).
pub const ZETA_LOG_DERIV_AT_ZERO: f64 = 1.837_877_066_409_345_5; // log 2π

/// N − Σ_ρ N^ρ/ρ − ζ'/ζ(0) − ½ log(1 − N^{−2}), zeros paired with their conjugates.
pub fn psi0_explicit(n: u64, zeros: &[f64]) -> f64 {
    let nf = n as f64;
    let ln = nf.ln();
    let zero_sum: f64 = zeros
        .iter()
        .map(|&g| {
            let rho = Complex64::new(0.5, g);
            2.0 * ((rho * ln).exp() / rho).re
        })
        .sum();
    nf - zero_sum - ZETA_LOG_DERIV_AT_ZERO - 0.5 * (1.0 - 1.0 / (nf * nf)).ln()
}

pub fn psi0_compare(n: u64, zeros: &ZetaZeroList) -> Result<Psi0> {
    if n < 2 {
        return Err(Error::Domain(format!("psi0 needs N >= 2, got {n}")));
    }
    let direct = psi0_direct(n);
    let explicit = psi0_explicit(n, &zeros.ordinates);
    let gap = (explicit - direct).abs();
    Ok(Psi0 {
        n,
        zero_count: zeros.len(),
        direct,
        explicit,
        gap,
        rel_gap: gap / direct,
    })
}
