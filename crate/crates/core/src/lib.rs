//! Numerical laboratory for a prime power equation obtained by pairing the
//! Guinand explicit formula with a kernel whose Fourier transform contains
//! ζ(s) as a factor.
//!
//! The kernel `G` is assembled from the q-expansions of θ₄⁴ and θ₂⁴, its
//! transform is a Bessel-K double sum, and the translates `G(v + log x)`
//! produce one equation per `x > 0`. Restricting to integer translates gives
//! the infinite system `T Λ = V` whose solution is the von Mangoldt vector.
//!
//! Modules, bottom up:
//!
//! * [`arith`]: σ₁, the coefficient functions a, b, c, B and Λ.
//! * [`theta`]: θ₂, θ₃, θ₄ on the imaginary axis, q-expansions, α and β.
//! * [`specfun`]: Γ, ψ, ζ, ζ*, K(s, x) of complex order, zeta zeros.
//! * [`kernel`]: G, Ĝ, E(s) and the factorization checks.
//! * [`explicit`]: the prime power equation at any translate x.
//! * [`linsys`]: the truncated matrix T, forward checks and recovery.
//! * [`modular`]: λ(τ) and the special-value identities at τ = i.
//! * [`report`]: machine-readable verification reports.
//! * [`suites`]: grouped checks, including the acceptance criteria.

pub mod arith;
pub mod error;
pub mod explicit;
pub mod kernel;
pub mod linsys;
pub mod modular;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod suites;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
