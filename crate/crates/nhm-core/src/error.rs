//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by the model, analytic, spectral and topology modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Hermitian-limit potential evaluated too close to a tangent pole.
    #[error("potential argument within {distance:e} of a tan pole (eps = 0)")]
    PoleProximity { distance: f64 },

    /// Diagonalization requested at eps = 0, where the potential is
    /// unbounded and none of the non-Hermitian results apply.
    #[error("diagonalization at eps = 0 is not supported (unbounded Hermitian potential)")]
    HermitianLimitUnsupported,

    /// Both square-root branches of the spectral curve are real and no
    /// neighbor is available to resolve the branch by continuity.
    #[error("square-root branch ambiguous at omega = {omega}: both roots real")]
    BranchAmbiguity { omega: f64 },

    /// Curve sampling produced more validity transitions than the loop
    /// structure allows even after refinement.
    #[error(
        "curve resolution too coarse: {transitions} validity transitions at {samples} samples"
    )]
    ResolutionTooCoarse { transitions: usize, samples: usize },

    /// The solvability integrand passes through a zero of 1 - iW(x).
    #[error("singular integrand: min |1 - iW| = {min_abs:e} (energy effectively on the segment)")]
    SingularIntegrand { min_abs: f64 },

    /// Requested extended state lies outside the extended window.
    #[error("omega = {omega} is not in the extended-state window at eps = {epsilon}")]
    NotExtended { omega: f64, epsilon: f64 },

    /// Small denominator in the wavefunction kernel for a retained comb
    /// amplitude.
    #[error("near resonance at comb index {index}: |cos w - cos(w + 2 pi a l)| = {denom:e}")]
    NearResonance { index: i64, denom: f64 },

    /// Rational resonance of a retained Fourier harmonic.
    #[error("small divisor: |sin(pi alpha n)| = {value:e} at harmonic n = {n}")]
    SmallDivisor { n: i64, value: f64 },

    /// IPR of the zero vector is undefined.
    #[error("zero vector")]
    ZeroVector,

    /// Dense eigensolver failed to converge or violated its residual
    /// contract.
    #[error("eigendecomposition failed to converge (pair index {index})")]
    ConvergenceFailure { index: usize },

    /// Vector length does not match the ring size.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Collision of diagonal Fourier energies on the rational ring.
    #[error("resonant denominator at site {site}: |cos(2 pi a n_l) - cos(2 pi a n)| = {value:e}")]
    ResonantDenominator { site: usize, value: f64 },

    /// Base energy crosses (or sits on) the spectral flow along the
    /// flux path.
    #[error("base energy on spectrum: {0}")]
    BaseOnSpectrum(String),

    /// Two eigenvalue-matching candidates are too close to distinguish.
    #[error("eigenvalue matching ambiguous at flux step {step}")]
    MatchingAmbiguity { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
