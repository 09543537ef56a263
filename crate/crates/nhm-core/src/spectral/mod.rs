//! Finite-ring Hamiltonians, dense diagonalization and per-state
//! diagnostics.

mod transfer;

pub use transfer::transfer_matrix_lyapunov;
pub(crate) use transfer::Mat2;

use faer::linalg::solvers::Eigen;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{
    potential_value_with_phase, ModelParams, RationalApproximant, DEFAULT_POLE_GUARD,
};

/// Largest ring size accepted by the dense eigensolver.
pub const MAX_EIGEN_DIM: usize = 2048;

/// Residual contract for the dense eigensolver, relative to ||H||_F.
const RESIDUAL_CONTRACT: f64 = 1e-8;

/// Nonzero pattern of a stored matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixStructure {
    /// Main diagonal, unit super/sub diagonals, unit corner entries.
    TridiagonalPlusCorners,
    /// Strictly lower-triangular hopping band plus diagonal; wrap terms of
    /// the ring appear in the upper triangle.
    LowerTriangularPlusDiagonalBand,
    Dense,
}

/// Dense complex matrix in row-major storage with a structure tag.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
    structure: MatrixStructure,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize, structure: MatrixStructure) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
            structure,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> MatrixStructure {
        self.structure
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] += value;
    }

    /// y = A x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for r in 0..self.dim {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[r] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Number of structural nonzeros in a row (absolute tolerance 0).
    pub fn row_nonzeros(&self, row: usize) -> usize {
        (0..self.dim)
            .filter(|&c| self.get(row, c) != Complex64::new(0.0, 0.0))
            .count()
    }
}

/// Eigenvalues with unit right eigenvectors, sorted lexicographically by
/// (Re, Im), and per-pair residuals relative to the matrix norm.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Column k is the right eigenvector of eigenvalues[k], unit 2-norm.
    pub right_eigenvectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
}

/// IPR-based classification of one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    Localized,
    Extended,
    /// Inside the guard band [2/L, 10/L] around the threshold.
    Ambiguous,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateClass::Localized => "localized",
            StateClass::Extended => "extended",
            StateClass::Ambiguous => "ambiguous",
        })
    }
}

/// Per-state diagnostics: IPR, center, and the thresholded class.
#[derive(Debug, Clone, Copy)]
pub struct StateDiagnostics {
    pub ipr: f64,
    /// Site index (0-based) of the maximum modulus; ties break small.
    pub localization_center: usize,
    pub classified: StateClass,
}

/// Real-space ring Hamiltonian: diagonal
/// `V tan(pi (p/q) n + theta + flux_theta/L + i eps)` for n = 1..=L, unit
/// super/sub diagonals and unit corner hoppings.
pub fn build_real_space_hamiltonian(
    params: &ModelParams,
    approx: &RationalApproximant,
    flux_theta: f64,
) -> Result<ComplexMatrix> {
    if params.epsilon() == 0.0 {
        return Err(Error::HermitianLimitUnsupported);
    }
    let l = approx.ring_size();
    let alpha = approx.value();
    let theta_arg = params.theta() + flux_theta / l as f64;
    let mut h = ComplexMatrix::zeros(l, MatrixStructure::TridiagonalPlusCorners);
    for i in 0..l {
        let n = (i + 1) as i64;
        let v = potential_value_with_phase(params, alpha, n, theta_arg, DEFAULT_POLE_GUARD)?;
        h.set(i, i, v);
    }
    let one = Complex64::new(1.0, 0.0);
    for i in 0..l - 1 {
        h.add(i, i + 1, one);
        h.add(i + 1, i, one);
    }
    h.add(0, l - 1, one);
    h.add(l - 1, 0, one);
    Ok(h)
}

/// Unidirectional hopping coefficient of the complex tan potential:
/// `S_l = 2i(-e^{-2 eps})^{|l|}` for l <= -1, `S_0 = i`, zero for l >= 1.
pub fn unidirectional_coefficient(l: i64, epsilon: f64) -> Complex64 {
    if l > 0 {
        Complex64::new(0.0, 0.0)
    } else if l == 0 {
        Complex64::new(0.0, 1.0)
    } else {
        let k = (-l) as u32;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, 2.0 * sign * (-2.0 * epsilon * k as f64).exp())
    }
}

/// Fourier-space ring Hamiltonian: diagonal `2 cos(2 pi (p/q) n) + iV`,
/// hopping `V S_l` on sub-diagonals l <= -1, ring-wrapped with a phase
/// `e^{i flux_2theta}` per wrap (the boundary condition
/// `phi_{n+L} = phi_n e^{2 i theta}` with `flux_2theta = 2 theta`).
/// The hopping tail is truncated where `|S_l| < 1e-16`.
pub fn build_fourier_hamiltonian(
    params: &ModelParams,
    approx: &RationalApproximant,
    flux_2theta: f64,
) -> Result<ComplexMatrix> {
    if params.epsilon() == 0.0 {
        return Err(Error::HermitianLimitUnsupported);
    }
    let l = approx.ring_size();
    let (p, q) = (approx.p(), approx.q());
    let v = params.v();
    let eps = params.epsilon();
    let mut h = ComplexMatrix::zeros(l, MatrixStructure::LowerTriangularPlusDiagonalBand);
    for i in 0..l {
        let n = (i + 1) as u64;
        let phase = 2.0 * PI * ((p.wrapping_mul(n) % q) as f64) / q as f64;
        h.set(i, i, Complex64::new(2.0 * phase.cos(), v));
    }
    // hopping from site n to site n+k (k >= 1), wrapped around the ring;
    // stored transposed so the unwrapped band sits below the diagonal
    let mut k: i64 = 1;
    loop {
        let s = unidirectional_coefficient(-k, eps);
        if s.norm() < 1e-16 {
            break;
        }
        for i in 0..l {
            let n = i as i64 + 1;
            let mut m = n + k;
            let mut wraps = 0;
            while m > l as i64 {
                m -= l as i64;
                wraps += 1;
            }
            let amp = v * s * Complex64::new(0.0, flux_2theta * wraps as f64).exp();
            h.add((m - 1) as usize, i, amp);
        }
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    Ok(h)
}

/// Full dense eigendecomposition with right eigenvectors, backed by a
/// proven dense solver; deterministic (Re, Im)-lexicographic ordering.
pub fn eigendecompose(matrix: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = matrix.dim();
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} outside 1..={MAX_EIGEN_DIM}"
        )));
    }
    let a = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| matrix.get(i, j));
    let eig = Eigen::new(a.as_ref()).map_err(|_| Error::ConvergenceFailure { index: 0 })?;
    let u = eig.U();
    let s = eig.S();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (s[i], s[j]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });

    let hnorm = matrix.frobenius_norm();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &k in &order {
        let lambda = s[k];
        let mut col: Vec<Complex64> = (0..n).map(|i| u[(i, k)]).collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ConvergenceFailure { index: k });
        }
        for z in &mut col {
            *z /= norm;
        }
        let hv = matrix.apply(&col);
        let mut rsq = 0.0;
        for i in 0..n {
            rsq += (hv[i] - lambda * col[i]).norm_sqr();
        }
        let resid = rsq.sqrt() / hnorm;
        if resid > RESIDUAL_CONTRACT {
            return Err(Error::ConvergenceFailure { index: k });
        }
        eigenvalues.push(lambda);
        vectors.push(col);
        residuals.push(resid);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        right_eigenvectors: vectors,
        residuals,
    })
}

/// Eigenvalues only (no vectors), sorted by (Re, Im).
pub fn eigenvalues_only(matrix: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = matrix.dim();
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} outside 1..={MAX_EIGEN_DIM}"
        )));
    }
    let a = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| matrix.get(i, j));
    let mut ev: Vec<Complex64> = a
        .eigenvalues()
        .map_err(|_| Error::ConvergenceFailure { index: 0 })?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Inverse participation ratio `sum |psi|^4 / (sum |psi|^2)^2`.
pub fn ipr(state: &[Complex64]) -> Result<f64> {
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    for z in state {
        let m = z.norm_sqr();
        s2 += m;
        s4 += m * m;
    }
    if s2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(s4 / (s2 * s2))
}

/// IPR classification threshold tau(L) = 5/L.
pub fn ipr_threshold(l: usize) -> f64 {
    5.0 / l as f64
}

/// IPR, localization center and the guard-banded classification of one
/// state. The guard band [2/L, 10/L] is flagged ambiguous.
pub fn diagnose_state(state: &[Complex64]) -> Result<StateDiagnostics> {
    let value = ipr(state)?;
    let l = state.len();
    let mut center = 0;
    let mut best = -1.0;
    for (i, z) in state.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best {
            best = m;
            center = i;
        }
    }
    let (lo, hi) = (2.0 / l as f64, 10.0 / l as f64);
    let classified = if value >= lo && value <= hi {
        StateClass::Ambiguous
    } else if value < ipr_threshold(l) {
        StateClass::Extended
    } else {
        StateClass::Localized
    };
    Ok(StateDiagnostics {
        ipr: value,
        localization_center: center,
        classified,
    })
}

/// Transform direction for [`fourier_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    Forward,
    Inverse,
}

/// Unitary map between physical and Fourier space on the rational ring:
/// forward `phi_n = L^{-1/2} sum_l psi_l e^{i(2 pi alpha n l + 2 theta n / L)}`,
/// inverse its adjoint. The quadratic phase is reduced exactly with integer
/// arithmetic so round trips hold to machine precision at any L.
pub fn fourier_map(
    state: &[Complex64],
    approx: &RationalApproximant,
    theta: f64,
    direction: MapDirection,
) -> Result<Vec<Complex64>> {
    let l = approx.ring_size();
    if state.len() != l {
        return Err(Error::LengthMismatch {
            expected: l,
            got: state.len(),
        });
    }
    let (p, q) = (approx.p(), approx.q());
    let scale = 1.0 / (l as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for n in 1..=l as u64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..=l as u64 {
            // forward: row n sums psi_m with phase 2 pi p n m / q + 2 theta n / L
            let (row, col) = (n, m);
            let quad = 2.0 * PI * ((p % q * (row * col % q) % q) as f64) / q as f64;
            let lin = 2.0 * theta * row as f64 / l as f64;
            let phase = match direction {
                MapDirection::Forward => quad + lin,
                MapDirection::Inverse => {
                    // adjoint: conj of the (col, row) forward entry
                    let quad_t = 2.0 * PI * ((p % q * (col * row % q) % q) as f64) / q as f64;
                    -(quad_t + 2.0 * theta * col as f64 / l as f64)
                }
            };
            acc += state[(m - 1) as usize] * Complex64::new(0.0, phase).exp();
        }
        out[(n - 1) as usize] = acc * scale;
    }
    Ok(out)
}

/// Unilateral localized eigenstate of the Fourier-space problem centered at
/// site `n_center` (1-based): `phi_{n_center} = 1`, zero above, and the
/// backward recursion below. Returns the state, its diagonal energy
/// `E = 2 cos(2 pi alpha n_center) + iV`, and the max row residual of the
/// Fourier-space eigenproblem on the ring.
pub struct UnilateralState {
    pub state: Vec<Complex64>,
    pub energy: Complex64,
    pub residual: f64,
}

pub fn unilateral_fourier_state(
    n_center: usize,
    params: &ModelParams,
    approx: &RationalApproximant,
) -> Result<UnilateralState> {
    if params.epsilon() == 0.0 {
        return Err(Error::HermitianLimitUnsupported);
    }
    let l = approx.ring_size();
    if n_center == 0 || n_center > l {
        return Err(Error::InvalidParameter(format!(
            "n_center must lie in 1..={l}, got {n_center}"
        )));
    }
    let (p, q) = (approx.p(), approx.q());
    let v = params.v();
    let eps = params.epsilon();
    let cos_at = |n: u64| -> f64 {
        let phase = 2.0 * PI * ((p * (n % q) % q) as f64) / q as f64;
        phase.cos()
    };
    let e_center = cos_at(n_center as u64);
    let energy = Complex64::new(2.0 * e_center, v);

    let mut tail = Vec::new();
    let mut k = 1i64;
    loop {
        let s = unidirectional_coefficient(-k, eps);
        if s.norm() < 1e-16 {
            break;
        }
        tail.push(s);
        k += 1;
    }

    let mut phi = vec![Complex64::new(0.0, 0.0); l];
    phi[n_center - 1] = Complex64::new(1.0, 0.0);
    for n in (1..n_center).rev() {
        let denom = e_center - cos_at(n as u64);
        if denom.abs() < 1e-10 {
            return Err(Error::ResonantDenominator {
                site: n,
                value: denom.abs(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, s) in tail.iter().enumerate() {
            let m = n + idx + 1;
            if m > n_center {
                break;
            }
            acc += s * phi[m - 1];
        }
        phi[n - 1] = v / 2.0 * acc / denom;
    }

    // residual of the ring eigenproblem (flux phase from params.theta)
    let wrap_phase = Complex64::new(0.0, 2.0 * params.theta()).exp();
    let mut worst = 0.0f64;
    for n in 1..=l {
        let diag = Complex64::new(2.0 * cos_at(n as u64), v);
        let mut acc = (energy - diag) * phi[n - 1];
        for (idx, s) in tail.iter().enumerate() {
            let mut m = n + idx + 1;
            let mut wraps = 0;
            while m > l {
                m -= l;
                wraps += 1;
            }
            let mut term = v * s * phi[m - 1];
            for _ in 0..wraps {
                term *= wrap_phase;
            }
            acc -= term;
        }
        worst = worst.max(acc.norm());
    }
    Ok(UnilateralState {
        state: phi,
        energy,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fibonacci_approximants;
    use crate::GOLDEN_MEAN;

    fn params(eps: f64, theta: f64) -> ModelParams {
        ModelParams::new(1.0, eps, theta, GOLDEN_MEAN).unwrap()
    }

    fn approximant_with_q(q: u64) -> RationalApproximant {
        fibonacci_approximants(14)
            .unwrap()
            .into_iter()
            .find(|r| r.q() == q)
            .unwrap()
    }

    #[test]
    fn real_space_structure() {
        let r = approximant_with_q(13);
        let h = build_real_space_hamiltonian(&params(0.1, 0.0), &r, 0.0).unwrap();
        assert_eq!(h.structure(), MatrixStructure::TridiagonalPlusCorners);
        for row in 0..13 {
            let nz = h.row_nonzeros(row);
            assert_eq!(nz, 3, "row {row} has {nz} nonzeros");
        }
        assert_eq!(h.get(0, 12), Complex64::new(1.0, 0.0));
        assert_eq!(h.get(12, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn builders_reject_hermitian_limit() {
        let r = approximant_with_q(13);
        let p0 = params(0.0, 0.0);
        assert!(matches!(
            build_real_space_hamiltonian(&p0, &r, 0.0),
            Err(Error::HermitianLimitUnsupported)
        ));
        assert!(matches!(
            build_fourier_hamiltonian(&p0, &r, 0.0),
            Err(Error::HermitianLimitUnsupported)
        ));
    }

    #[test]
    fn fourier_coefficients_reference_values() {
        // S_{-1} = -2i e^{-1}, S_{-2} = +2i e^{-2} at eps = 0.5
        let s1 = unidirectional_coefficient(-1, 0.5);
        assert!((s1 - Complex64::new(0.0, -2.0 * (-1.0f64).exp())).norm() < 1e-15);
        assert!((s1.im + 0.7357588823428847).abs() < 1e-12);
        let s2 = unidirectional_coefficient(-2, 0.5);
        assert!((s2.im - 0.2706705664732254).abs() < 1e-12);
        for eps in [0.1, 0.46, 2.0] {
            assert_eq!(unidirectional_coefficient(0, eps), Complex64::new(0.0, 1.0));
            assert_eq!(unidirectional_coefficient(3, eps), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn fourier_matrix_strictly_upper_is_wrap_only() {
        let r = approximant_with_q(21);
        let h = build_fourier_hamiltonian(&params(0.6, 0.0), &r, 0.0).unwrap();
        assert_eq!(
            h.structure(),
            MatrixStructure::LowerTriangularPlusDiagonalBand
        );
        // upper-triangle entries are wrap terms, bounded by the wrapped tail
        let bound = 2.0 * (-2.0 * 0.6f64).exp(); // |S_{-1}|
        for i in 0..21 {
            for j in (i + 1)..21 {
                let mag = h.get(i, j).norm();
                let k = 21 - (j as i64 - i as i64); // hop length after one wrap
                let expect = 2.0 * (-2.0 * 0.6 * k as f64).exp();
                assert!(
                    mag <= expect * 1.001 + 1e-18,
                    "wrap entry ({i},{j}) = {mag} exceeds {expect}"
                );
                assert!(mag < bound);
            }
        }
        // sub-diagonal holds V * S_{-1} plus the k = 1 + L multi-wrap tail
        for i in 1..21 {
            let got = h.get(i, i - 1);
            assert!((got - unidirectional_coefficient(-1, 0.6)).norm() < 1e-10);
        }
    }

    #[test]
    fn eigendecompose_diagonal_and_swap() {
        let mut d = ComplexMatrix::zeros(3, MatrixStructure::Dense);
        d.set(0, 0, Complex64::new(1.0, 0.0));
        d.set(1, 1, Complex64::new(0.0, 2.0));
        d.set(2, 2, Complex64::new(-3.0, 0.0));
        let dec = eigendecompose(&d).unwrap();
        assert!((dec.eigenvalues[0] - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
        assert!((dec.eigenvalues[1] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        assert!((dec.eigenvalues[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let mut s = ComplexMatrix::zeros(2, MatrixStructure::Dense);
        s.set(0, 1, Complex64::new(1.0, 0.0));
        s.set(1, 0, Complex64::new(1.0, 0.0));
        let dec = eigendecompose(&s).unwrap();
        assert!((dec.eigenvalues[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((dec.eigenvalues[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigendecompose_residual_contract() {
        let r = approximant_with_q(89);
        let h = build_real_space_hamiltonian(&params(0.46, 0.3), &r, 0.0).unwrap();
        let dec = eigendecompose(&h).unwrap();
        assert_eq!(dec.eigenvalues.len(), 89);
        for &res in &dec.residuals {
            assert!(res < 1e-8);
        }
        // all eigenvalues in the closed upper half plane for eps > 0
        for e in &dec.eigenvalues {
            assert!(e.im > -1e-8, "Im E = {} < -1e-8", e.im);
        }
    }

    #[test]
    fn ipr_reference_values() {
        let mut delta = vec![Complex64::new(0.0, 0.0); 64];
        delta[17] = Complex64::new(0.3, -0.1);
        assert!((ipr(&delta).unwrap() - 1.0).abs() < 1e-15);
        let uniform = vec![Complex64::new(0.5, 0.5); 64];
        assert!((ipr(&uniform).unwrap() - 1.0 / 64.0).abs() < 1e-15);
        assert!(matches!(
            ipr(&vec![Complex64::new(0.0, 0.0); 8]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn diagnose_state_centers_and_classes() {
        let mut s = vec![Complex64::new(0.0, 0.0); 100];
        s[42] = Complex64::new(1.0, 0.0);
        let d = diagnose_state(&s).unwrap();
        assert_eq!(d.localization_center, 42);
        assert_eq!(d.classified, StateClass::Localized);
        let u = vec![Complex64::new(0.1, 0.0); 100];
        let d = diagnose_state(&u).unwrap();
        assert_eq!(d.classified, StateClass::Extended);
        assert_eq!(d.localization_center, 0); // ties break to smallest index
    }

    #[test]
    fn fourier_map_round_trip_and_norm() {
        let r = approximant_with_q(89);
        let mut state: Vec<Complex64> = (0..89)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let norm0: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let fwd = fourier_map(&state, &r, 0.4, MapDirection::Forward).unwrap();
        let norm1: f64 = fwd.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm0 - norm1).abs() < 1e-12 * norm0);
        let back = fourier_map(&fwd, &r, 0.4, MapDirection::Inverse).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in state.iter_mut().zip(back.iter()) {
            worst = worst.max((*a - b).norm());
        }
        assert!(worst < 1e-12, "round trip error {worst}");
    }

    #[test]
    fn fourier_map_length_checked() {
        let r = approximant_with_q(13);
        let bad = vec![Complex64::new(1.0, 0.0); 12];
        assert!(matches!(
            fourier_map(&bad, &r, 0.0, MapDirection::Forward),
            Err(Error::LengthMismatch {
                expected: 13,
                got: 12
            })
        ));
    }

    #[test]
    fn full_flux_period_reproduces_spectrum() {
        // flux_theta = pi is a full period: the potential multiset is a
        // cyclic relabeling, so the spectrum coincides as a set
        let r = approximant_with_q(34);
        let p = params(0.3, 0.2);
        let e0 = eigenvalues_only(&build_real_space_hamiltonian(&p, &r, 0.0).unwrap()).unwrap();
        let epi =
            eigenvalues_only(&build_real_space_hamiltonian(&p, &r, std::f64::consts::PI).unwrap())
                .unwrap();
        assert!(multiset_distance(&e0, &epi) < 1e-6);
    }

    #[test]
    fn representation_equivalence_small() {
        // eigenvalue multisets of the two representations agree
        let r = approximant_with_q(34);
        let theta = 0.3;
        let p = params(0.46, theta);
        let hr = build_real_space_hamiltonian(&p, &r, 0.0).unwrap();
        // matching wrap angle: 2 * (theta * L + flux)
        let hf = build_fourier_hamiltonian(&p, &r, 2.0 * theta * 34.0).unwrap();
        let er = eigenvalues_only(&hr).unwrap();
        let ef = eigenvalues_only(&hf).unwrap();
        let worst = multiset_distance(&er, &ef);
        assert!(worst < 1e-8, "representation mismatch {worst}");
    }

    #[test]
    fn unilateral_state_is_exact_above_center() {
        let r = approximant_with_q(233);
        let p = params(0.6, 0.0);
        let st = unilateral_fourier_state(77, &p, &r).unwrap();
        for n in 78..=233 {
            assert_eq!(st.state[n - 1], Complex64::new(0.0, 0.0));
        }
        assert_eq!(st.state[76], Complex64::new(1.0, 0.0));
        // energy on the segment
        assert!((st.energy.im - 1.0).abs() < 1e-14);
        assert!(st.energy.re.abs() <= 2.0);
        assert!(st.residual < 1e-6, "residual {}", st.residual);
    }

    pub(crate) fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let mut remaining: Vec<Complex64> = b.to_vec();
        let mut worst = 0.0f64;
        for &x in a {
            let (k, d) = remaining
                .iter()
                .enumerate()
                .map(|(k, &y)| (k, (x - y).norm()))
                .min_by(|(_, d1), (_, d2)| d1.total_cmp(d2))
                .unwrap();
            worst = worst.max(d);
            remaining.swap_remove(k);
        }
        worst
    }
}
