//! Exact solution and numerics for a non-Hermitian quasicrystal with a
//! bounded complex tangent potential on a 1D tight-binding chain,
//!
//! ```text
//! psi_{n+1} + psi_{n-1} + V tan(pi*alpha*n + theta + i*eps) psi_n = E psi_n .
//! ```
//!
//! The crate is organized around four pieces:
//!
//! * [`model`] — parameters, rational approximants of the irrational
//!   frequency, and the complex potential itself;
//! * [`analytic`] — every closed-form result: Lyapunov exponent, the complex
//!   spectral curve and its branch-filtered loops, critical couplings,
//!   mobility edge, solvability integral, and the exact eigenstate formulas
//!   in Fourier and physical space;
//! * [`spectral`] — finite-ring Hamiltonians in real and Fourier space,
//!   dense diagonalization, IPR diagnostics and transfer-matrix Lyapunov
//!   estimates;
//! * [`topology`] — point-gap winding numbers by determinant phase
//!   accumulation and by eigenvalue spectral flow.
//!
//! Analytic results are cross-validated against the numerics in the test
//! suites; the `nhm` CLI in the companion crate drives the same code to
//! reproduce the reference figures as CSV/JSON artifacts.

pub mod analytic;
pub mod error;
pub mod model;
pub mod spectral;
pub mod topology;

pub use error::{Error, Result};
pub use model::{ModelParams, RationalApproximant};

/// Inverse golden mean (sqrt(5)-1)/2, the canonical irrational frequency.
pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;
