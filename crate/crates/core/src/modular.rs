//! Special values at τ = i: the modular λ, θ₃(i), and the bridge between β
//! and θ₂⁴ that makes every f(m, n) an algebraic multiple of θ₃⁴(i).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::report::Check;
use crate::specfun::gamma_c;
use crate::theta::{beta, theta, ThetaKind, TruncationPolicy};

/// λ(iy) = (θ₂(iy)/θ₃(iy))⁴.
pub fn lambda_modular(y: f64) -> Result<f64> {
    Ok((theta(ThetaKind::Two, y)? / theta(ThetaKind::Three, y)?).powi(4))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gated(name: String, value: f64, expected: f64, tol: f64) -> Check {
    let r = rel(value, expected);
    Check::new(name, value, Some(expected)).gate(r < tol, tol)
}

/// λ(i) = ½, θ₃(i) = π^{1/4}/Γ(3/4) and λ(i/M) = 1 − λ(iM) for M ∈ {2, 3, 5}.
pub fn special_value_checks() -> Result<Vec<Check>> {
    special_value_checks_for(&[2, 3, 5])
}

pub fn special_value_checks_for(reciprocal: &[u32]) -> Result<Vec<Check>> {
    let tol = 1e-12;
    let mut out = vec![gated("lambda(i)".into(), lambda_modular(1.0)?, 0.5, tol)];
    let g34 = gamma_c(Complex64::new(0.75, 0.0))?.re;
    out.push(gated("theta3(i)".into(), theta(ThetaKind::Three, 1.0)?, PI.powf(0.25) / g34, tol));
    for &m in reciprocal {
        let m = m as f64;
        out.push(gated(
            format!("lambda(i/{m})+lambda({m}i)"),
            lambda_modular(1.0 / m)? + lambda_modular(m)?,
            1.0,
            tol,
        ));
    }
    Ok(out)
}

/// 16 β(r) against θ₂⁴(ir).
pub fn beta_theta_link(r: f64, policy: &TruncationPolicy) -> Result<Check> {
    let lhs = 16.0 * beta(r, policy)?;
    let rhs = theta(ThetaKind::Two, r)?.powi(4);
    Ok(gated(format!("16beta({r})=theta2^4"), lhs, rhs, 1e-12))
}

/// F(N iy) = (θ₃(N iy)/θ₃(iy))⁴ λ(N iy), so that θ₂⁴(N iy) = F · θ₃⁴(iy).
pub fn f_factor(n: u32, y: f64) -> Result<f64> {
    let ny = n as f64 * y;
    Ok((theta(ThetaKind::Three, ny)? / theta(ThetaKind::Three, y)?).powi(4) * lambda_modular(ny)?)
}

/// θ₂⁴(N iy) against F(N iy) θ₃⁴(iy).
pub fn f_factor_check(n: u32, y: f64) -> Result<Check> {
    let lhs = theta(ThetaKind::Two, n as f64 * y)?.powi(4);
    let rhs = f_factor(n, y)? * theta(ThetaKind::Three, y)?.powi(4);
    Ok(gated(format!("theta2^4({n}*{y}i)=F*theta3^4"), lhs, rhs, 1e-12))
}
