//! Exact eigenstate formulas: delta-comb extended states in Fourier space,
//! their physical-space wavefunctions, and the localized Fourier profile.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::curve::{branch_condition, mobility_edge_omega0, spectral_curve_point, TWO_EPS_TOL};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Complex angle phi with `cos(phi) = iV + cos(omega)` on the `Im <= 0`
/// branch; |Im phi| is the decay budget of an extended state at omega.
pub fn segment_angle(omega: f64, v: f64) -> Complex64 {
    let mut phi = Complex64::new(omega.cos(), v).acos();
    if phi.im > 0.0 {
        phi = -phi;
    }
    phi
}

/// Delta-comb amplitudes of an extended state at `E = iV + 2 cos(omega)`.
///
/// `amplitudes[k]` holds `U_l` for `l = -(k+1)`; `U_{-1} = 1` and `U_l = 0`
/// for `l >= 0`. `log_mags[k]` accumulates `ln |U_l|` additively, so the
/// decay fit stays exact far below the floating-point floor.
#[derive(Debug, Clone)]
pub struct ExtendedStateSolution {
    pub omega: f64,
    pub energy: Complex64,
    /// U_l for l = -1, -2, ... (index k maps to l = -(k+1)).
    pub amplitudes: Vec<Complex64>,
    /// ln |U_l| on the same indexing.
    pub log_mags: Vec<f64>,
    /// G_l = W(omega + 2 pi alpha l) on the same indexing.
    pub g_values: Vec<Complex64>,
    /// Fitted asymptotic decay rate of -ln|U_l| / |l|.
    pub decay_rate: f64,
}

impl ExtendedStateSolution {
    /// U_l for any l (zero for l >= 0, zero below the stored cutoff).
    pub fn amplitude(&self, l: i64) -> Complex64 {
        if l >= 0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = (-l - 1) as usize;
        self.amplitudes.get(k).copied().unwrap_or_default()
    }
}

/// Physical-space wavefunction generated from a delta-comb solution.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    pub n_start: i64,
    pub psi: Vec<Complex64>,
    /// Heuristic bound on the truncation error of the comb summation.
    pub truncation_bound: f64,
}

impl Wavefunction {
    pub fn value(&self, n: i64) -> Option<Complex64> {
        let k = n.checked_sub(self.n_start)?;
        if k < 0 {
            return None;
        }
        self.psi.get(k as usize).copied()
    }
}

/// Solves the comb recurrence for the amplitudes U_l of the extended state
/// at `E = iV + 2 cos(omega)`, iterating downward until `|U_l| < cutoff`.
pub fn extended_state_amplitudes(
    omega: f64,
    params: &ModelParams,
    cutoff: f64,
) -> Result<ExtendedStateSolution> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cutoff must lie in (0, 1), got {cutoff}"
        )));
    }
    if cutoff < 1e-280 {
        return Err(Error::InvalidParameter(
            "cutoff below 1e-280 underflows the stored amplitudes".into(),
        ));
    }
    let (v, eps, theta, alpha) = (params.v(), params.epsilon(), params.theta(), params.alpha());
    let window = mobility_edge_omega0(eps, v);
    if !window.contains(omega) {
        return Err(Error::NotExtended {
            omega,
            epsilon: eps,
        });
    }
    let energy = Complex64::new(2.0 * omega.cos(), v);
    let step_phase = Complex64::new(0.0, 2.0 * theta).exp();

    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    let mut log_mags = vec![0.0f64];
    let mut g_values = Vec::new();
    let log_cutoff = cutoff.ln();

    let mut l: i64 = -1;
    let mut cur = Complex64::new(1.0, 0.0);
    let mut cur_log = 0.0;
    loop {
        let x = omega + 2.0 * PI * alpha * l as f64;
        let g = (2.0 * x.cos() - energy) / v;
        g_values.push(g);
        let ratio = (1.0 + Complex64::i() * g) / (1.0 - Complex64::i() * g);
        cur *= step_phase * ratio;
        cur_log += -2.0 * eps + ratio.norm().ln();
        // keep the stored complex amplitude consistent with the exact log
        cur = cur / cur.norm() * cur_log.exp();
        l -= 1;
        amplitudes.push(cur);
        log_mags.push(cur_log);
        if cur_log < log_cutoff {
            break;
        }
        if cur_log > 50.0 || l < -1_000_000 {
            return Err(Error::NotExtended {
                omega,
                epsilon: eps,
            });
        }
    }

    let decay_rate = fit_decay_rate(&log_mags);
    Ok(ExtendedStateSolution {
        omega,
        energy,
        amplitudes,
        log_mags,
        g_values,
        decay_rate,
    })
}

/// Least-squares slope of ln|U_l| against |l| over the deep tail
/// [l_max/4, l_max]; returns the decay rate (minus the slope).
fn fit_decay_rate(log_mags: &[f64]) -> f64 {
    let lmax = log_mags.len() - 1;
    let lo = (lmax / 4).max(1);
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for l in lo..=lmax {
        let (x, y) = (l as f64, log_mags[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    -slope
}

/// Physical-space wavefunction of the extended state:
///
/// ```text
/// psi_n = (1/2pi) [ A_0 e^{-i n w}
///         + sum_{l <= -1} V U_l / (2i (cos w - cos(w + 2 pi a l)))
///           * e^{-i n (w + 2 pi a l)} ]
/// ```
///
/// with `A_0 = e^{2 eps - 2 i theta} / 2` the comb amplitude at l = 0 of
/// psi itself (it is annihilated by `u = (1 - iW) psi`, so it never appears
/// among the U_l). The result satisfies the eigenvalue equation at
/// `E = iV + 2 cos(omega)` up to the comb truncation tail.
pub fn extended_state_wavefunction(
    solution: &ExtendedStateSolution,
    params: &ModelParams,
    n_range: (i64, i64),
    resonance_guard: f64,
) -> Result<Wavefunction> {
    if resonance_guard <= 0.0 {
        return Err(Error::InvalidParameter(
            "resonance_guard must be > 0".into(),
        ));
    }
    if n_range.1 < n_range.0 {
        return Err(Error::InvalidParameter("empty n_range".into()));
    }
    let (v, eps, theta, alpha) = (params.v(), params.epsilon(), params.theta(), params.alpha());
    let omega = solution.omega;

    // comb terms: l = -(k+1), kernel denominators c_l = cos w - cos(w + 2 pi a l)
    let mut kernels = Vec::with_capacity(solution.amplitudes.len());
    let mut min_c = f64::INFINITY;
    for k in 0..solution.amplitudes.len() {
        let l = -(k as i64) - 1;
        let c = omega.cos() - (omega + 2.0 * PI * alpha * l as f64).cos();
        if c.abs() < resonance_guard {
            return Err(Error::NearResonance {
                index: l,
                denom: c.abs(),
            });
        }
        min_c = min_c.min(c.abs());
        kernels.push(v * solution.amplitudes[k] / (Complex64::new(0.0, 2.0) * c));
    }

    let a0 = Complex64::new(2.0 * eps, 0.0).exp() * Complex64::new(0.0, -2.0 * theta).exp() / 2.0;
    let mut psi = Vec::with_capacity((n_range.1 - n_range.0 + 1) as usize);
    for n in n_range.0..=n_range.1 {
        let nf = n as f64;
        let mut acc = a0 * Complex64::new(0.0, -nf * omega).exp();
        for (k, ker) in kernels.iter().enumerate() {
            let l = -(k as i64) - 1;
            let x_l = omega + 2.0 * PI * alpha * l as f64;
            acc += ker * Complex64::new(0.0, -nf * x_l).exp();
        }
        psi.push(acc / (2.0 * PI));
    }

    // dropped-tail estimate: geometric continuation of the last amplitude
    // against the smallest retained kernel denominator
    let last = solution.amplitudes.last().map(|u| u.norm()).unwrap_or(0.0);
    let geo = 1.0 / (1.0 - (-solution.decay_rate).exp()).max(1e-3);
    let truncation_bound = last * geo * v / (2.0 * min_c) / (2.0 * PI);

    Ok(Wavefunction {
        n_start: n_range.0,
        psi,
        truncation_bound,
    })
}

/// Localized-state profile in Fourier space: the log-Fourier coefficients
/// `Omega_n` of the multiplier g(x) and the assembled quasiperiodic factor
/// u(x) solving `u(x - 2 pi alpha) = g(x) u(x)`.
#[derive(Debug, Clone)]
pub struct LocalizedProfile {
    pub omega: f64,
    pub energy: Complex64,
    /// Zero harmonic Omega_0 (real up to quadrature error).
    pub omega_zero: f64,
    /// Imaginary part of the computed Omega_0, as a self-diagnostic.
    pub omega_zero_imag: f64,
    /// Omega_n for n = -harmonics ..= harmonics (offset indexing).
    pub coeffs: Vec<Complex64>,
    pub harmonics: usize,
    /// Winding of g around the circle (an integer; zero off the segment).
    pub g_winding: i64,
    /// max_x |u(x - 2 pi alpha) - g(x) u(x)| / max_x |u(x)| on a test grid.
    pub functional_residual: f64,
    alpha: f64,
    v: f64,
    epsilon: f64,
    theta: f64,
}

impl LocalizedProfile {
    /// The multiplier g(x) = e^{-2 eps + 2 i theta} (1 + iW)/(1 - iW).
    pub fn g(&self, x: f64) -> Complex64 {
        let w = (2.0 * x.cos() - self.energy) / self.v;
        Complex64::new(-2.0 * self.epsilon, 2.0 * self.theta).exp() * (1.0 + Complex64::i() * w)
            / (1.0 - Complex64::i() * w)
    }

    /// u(x) = exp(-i Omega_0 x - sum_{n != 0} pi a Omega_n e^{i n (x + pi a)} / sin(pi a n)).
    pub fn u(&self, x: f64) -> Complex64 {
        let h = self.harmonics as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for n in -h..=h {
            if n == 0 {
                continue;
            }
            let om = self.coeffs[(n + h) as usize];
            let nf = n as f64;
            s += PI * self.alpha * om / (PI * self.alpha * nf).sin()
                * Complex64::new(0.0, nf * (x + PI * self.alpha)).exp();
        }
        (Complex64::new(0.0, -self.omega_zero * x) - s).exp()
    }
}

/// Computes the log-Fourier coefficients Omega_n of g and assembles the
/// quasiperiodic factor u(x) for a branch-valid localized energy
/// `E = E(omega)`.
pub fn localized_fourier_profile(
    omega: f64,
    params: &ModelParams,
    harmonics: usize,
) -> Result<LocalizedProfile> {
    if harmonics < 32 {
        return Err(Error::InvalidParameter(format!(
            "harmonics must be >= 32, got {harmonics}"
        )));
    }
    let (v, eps, theta, alpha) = (params.v(), params.epsilon(), params.theta(), params.alpha());
    let energy = spectral_curve_point(omega, eps, v)?;
    let (_, valid) = branch_condition(energy, eps, v, Some(TWO_EPS_TOL));
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "E(omega) at omega = {omega} is not branch-valid; no localized state there"
        )));
    }
    for n in 1..=harmonics as i64 {
        let s = (PI * alpha * n as f64).sin().abs();
        if s < 1e-6 {
            return Err(Error::SmallDivisor { n, value: s });
        }
    }

    // continuous log of g on a uniform grid over [-pi, pi)
    let ngrid = (8 * harmonics).next_power_of_two().max(4096);
    let gfun = |x: f64| -> Complex64 {
        let w = (2.0 * x.cos() - energy) / v;
        Complex64::new(-2.0 * eps, 2.0 * theta).exp() * (1.0 + Complex64::i() * w)
            / (1.0 - Complex64::i() * w)
    };
    let mut logg = Vec::with_capacity(ngrid);
    let mut phase_prev = 0.0;
    for j in 0..ngrid {
        let x = -PI + 2.0 * PI * j as f64 / ngrid as f64;
        let gv = gfun(x);
        let mag = gv.norm().ln();
        let raw = gv.arg();
        let phase = if j == 0 {
            raw
        } else {
            phase_prev + principal_angle(raw - phase_prev)
        };
        phase_prev = phase;
        logg.push(Complex64::new(mag, phase));
    }
    // closure winding of g around the circle
    let close = principal_angle(gfun(-PI).arg() - phase_prev);
    let total = phase_prev + close - logg[0].im;
    let g_winding = (total / (2.0 * PI)).round() as i64;

    let coeffs = omega_coeffs_from_log(&logg, alpha, harmonics);
    let h = harmonics as i64;
    let omega0 = coeffs[h as usize];

    let mut profile = LocalizedProfile {
        omega,
        energy,
        omega_zero: omega0.re,
        omega_zero_imag: omega0.im,
        coeffs,
        harmonics,
        g_winding,
        functional_residual: 0.0,
        alpha,
        v,
        epsilon: eps,
        theta,
    };

    // defining-relation residual on a coarse test grid
    let mut worst = 0.0f64;
    let mut umax = 0.0f64;
    let m = 257;
    for j in 0..m {
        let x = -PI + 2.0 * PI * j as f64 / m as f64;
        let u1 = profile.u(x - 2.0 * PI * alpha);
        let u0 = profile.u(x);
        umax = umax.max(u0.norm());
        worst = worst.max((u1 - profile.g(x) * u0).norm());
    }
    profile.functional_residual = worst / umax;
    Ok(profile)
}

/// Omega_n = -i/(4 pi^2 alpha) * \int_{-pi}^{pi} log g(x) e^{-inx} dx by
/// periodic trapezoid on a uniform grid starting at x = -pi.
fn omega_coeffs_from_log(logg: &[Complex64], alpha: f64, harmonics: usize) -> Vec<Complex64> {
    let ngrid = logg.len();
    let h = harmonics as i64;
    let mut coeffs = Vec::with_capacity(2 * harmonics + 1);
    for n in -h..=h {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, lg) in logg.iter().enumerate() {
            let x = -PI + 2.0 * PI * j as f64 / ngrid as f64;
            acc += lg * Complex64::new(0.0, -n as f64 * x).exp();
        }
        let integral = acc * 2.0 * PI / ngrid as f64;
        coeffs.push(-Complex64::i() / (4.0 * PI * PI * alpha) * integral);
    }
    coeffs
}

fn principal_angle(mut d: f64) -> f64 {
    while d > PI {
        d -= 2.0 * PI;
    }
    while d < -PI {
        d += 2.0 * PI;
    }
    d
}
