//! Complex special functions: Γ, ψ, ζ, ζ*, K(s, x) and zeta zeros.

mod bessel;
mod gamma;
mod zeros;
mod zeta;

pub use bessel::bessel_k;
pub use gamma::{digamma_c, gamma_c, lgamma_c, EULER_GAMMA};
pub use zeros::{hardy_z, riemann_siegel_theta, zeta_zeros, zeta_zeros_with_tol, ZetaZeroList};
pub use zeta::{zeta_c, zeta_star};
