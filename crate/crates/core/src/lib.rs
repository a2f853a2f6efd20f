//! Numerical toolkit for the Hankel integral operators `K^(l)` with kernels
//! `k^(l)(x + y)` on `L²(0, ∞)`.
//!
//! The kernels are evaluated by three independent routes (closed form built
//! from exponential integrals, a damped convolution, and direct quadrature of
//! the Fourier symbol). The sequence-space models of the operators are
//! realized as finite Hankel truncations whose parity block structure is
//! verified exactly against generalized Hilbert matrices, and the spectral
//! data (multiplier `h`, densities `rho_p`) is available for comparison with
//! truncation spectra.
//!
//! Module map:
//!
//! * [`specfun`]: sinc derivatives, `E1`/`Ein`, `|Gamma|²`, damped moments.
//! * [`combinatorics`]: exact polynomial coefficients and identity checks.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration and the oracles.
//! * [`kernels`]: `k^(l)` by all routes, Fourier closed forms, asymptotics.
//! * [`operators`]: Hankel / Hilbert-type truncations, block certificates,
//!   Jacobi eigensolver, spectrum reports.
//! * [`spectral`]: `h`, `rho_p` and the per-order diagonalization data.
//! * [`verify`]: the check suites exposed by the command-line tool.

pub mod combinatorics;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use kernels::{KernelEvaluation, KernelOrder, Route};
pub use specfun::ComplexValue;

/// Largest supported kernel order `l`.
pub const L_MAX: u32 = 8;
