//! Verification suite: the ten acceptance checks plus module-invariant
//! spot checks, each reporting name, measured value, tolerance and verdict.
//!
//! Two checks fail by design on this artifact and are kept failing on
//! purpose: the closed-form Lyapunov match (c04) at on-segment energies
//! with small epsilon, and the representation-equivalence tolerance (c07)
//! at L = 233 in the delocalized phase. Both are measured limitations of
//! the underlying claims, not of this implementation; the check output
//! carries the details.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use num_complex::Complex64;

use nhm_core::analytic::{
    classify_phase, critical_epsilons, distance_to_curve, extended_state_amplitudes,
    extended_state_wavefunction, lyapunov_exponent, point_spectrum_loops, segment_angle,
    solvability_residual, spectral_curve_point, PhaseLabel,
};
use nhm_core::model::{fibonacci_approximants, potential_value, ModelParams, RationalApproximant};
use nhm_core::spectral::{
    build_fourier_hamiltonian, build_real_space_hamiltonian, eigendecompose, eigenvalues_only,
    ipr_threshold, transfer_matrix_lyapunov,
};
use nhm_core::topology::{
    periodic_tridiagonal_determinant, spectral_flow_trace, winding_number, WindingMethod,
};
use nhm_core::GOLDEN_MEAN;

use crate::config::{default_winding_grid, ExperimentConfig};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub criterion: Option<u8>,
    pub description: &'static str,
    pub tolerance: f64,
    /// Worst measured value, compared against the tolerance.
    pub measured: f64,
    pub passed: bool,
    pub failures: Vec<String>,
    pub runtime_ms: u128,
}

impl Check {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let tag = match self.criterion {
            Some(n) => format!("criterion {n:2}"),
            None => "invariant   ".to_string(),
        };
        format!(
            "[{verdict}] {tag} {:<28} measured {:.3e} tolerance {:.3e} ({} ms)",
            self.name, self.measured, self.tolerance, self.runtime_ms
        )
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

/// All check names, in execution order.
pub const CHECK_NAMES: [&str; 15] = [
    "thresholds",
    "fig2-spectra",
    "fig3-winding",
    "lyapunov-cross-validation",
    "solvability",
    "extended-states",
    "representation-equivalence",
    "determinant-oracle",
    "spectral-flow",
    "epsilon-zero-limit",
    "potential-positivity",
    "fourier-roundtrip",
    "winding-refinement",
    "unilateral-residual",
    "localized-profile",
];

fn golden_params(v: f64, eps: f64, theta: f64) -> ModelParams {
    ModelParams::new(v, eps, theta, GOLDEN_MEAN).expect("valid parameters")
}

fn approximant_with_q(q: u64) -> RationalApproximant {
    fibonacci_approximants(16)
        .expect("fibonacci sequence")
        .into_iter()
        .find(|r| r.q() == q)
        .unwrap_or_else(|| panic!("no Fibonacci approximant with q = {q}"))
}

fn tol(cfg: &ExperimentConfig, name: &str, default: f64) -> f64 {
    cfg.tolerance_overrides
        .get(name)
        .copied()
        .unwrap_or(default)
}

struct CheckBuilder {
    name: &'static str,
    criterion: Option<u8>,
    description: &'static str,
    tolerance: f64,
    measured: f64,
    failures: Vec<String>,
    started: Instant,
}

impl CheckBuilder {
    fn new(
        name: &'static str,
        criterion: Option<u8>,
        description: &'static str,
        tolerance: f64,
    ) -> Self {
        Self {
            name,
            criterion,
            description,
            tolerance,
            measured: 0.0,
            failures: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Records a measurement; values above tolerance become failures.
    fn observe(&mut self, value: f64, context: impl FnOnce() -> String) {
        if value > self.measured || !value.is_finite() {
            self.measured = value;
        }
        if !(value <= self.tolerance) {
            self.failures.push(format!("{} -> {value:.6e}", context()));
        }
    }

    fn fail(&mut self, message: String) {
        self.failures.push(message);
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            criterion: self.criterion,
            description: self.description,
            tolerance: self.tolerance,
            measured: self.measured,
            passed: self.failures.is_empty(),
            failures: self.failures,
            runtime_ms: self.started.elapsed().as_millis(),
        }
    }
}

/// Criterion 1: critical couplings at V = 1 match the reference values.
pub fn check_thresholds(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "thresholds",
        Some(1),
        "critical_epsilons(1) = (0.4407, 0.5306) within 1e-4",
        tol(cfg, "thresholds", 1e-4),
    );
    let (e1, e2) = critical_epsilons(1.0);
    b.observe((e1 - 0.4407).abs(), || format!("epsilon_1 = {e1:.6}"));
    b.observe((e2 - 0.5306).abs(), || format!("epsilon_2 = {e2:.6}"));
    b.finish()
}

/// Criterion 2: Fig. 2 reproduction at data level (L = 610).
pub fn check_fig2_spectra(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "fig2-spectra",
        Some(2),
        "spectrum/IPR structure at eps = 0.1, 0.46, 0.6, L = 610",
        tol(cfg, "fig2-spectra", 1e-2),
    );
    let approx = approximant_with_q(610);
    let l = approx.ring_size();
    let (lo, hi, tau) = (2.0 / l as f64, 10.0 / l as f64, ipr_threshold(l));

    for eps in [0.1, 0.46, 0.6] {
        let p = golden_params(1.0, eps, 0.0);
        let h = match build_real_space_hamiltonian(&p, &approx, 0.0) {
            Ok(h) => h,
            Err(e) => {
                b.fail(format!("build at eps={eps}: {e}"));
                continue;
            }
        };
        let dec = match eigendecompose(&h) {
            Ok(d) => d,
            Err(e) => {
                b.fail(format!("eigendecompose at eps={eps}: {e}"));
                continue;
            }
        };
        let iprs: Vec<f64> = dec
            .right_eigenvectors
            .iter()
            .map(|v| nhm_core::spectral::ipr(v).expect("nonzero eigenvector"))
            .collect();

        match eps {
            e if e == 0.1 => {
                for (k, en) in dec.eigenvalues.iter().enumerate() {
                    let d = distance_to_curve(*en, eps, 1.0, 2048);
                    b.observe(d, || format!("eps=0.1 E={en:.4} distance to loop"));
                    if iprs[k] <= tau {
                        b.fail(format!("eps=0.1 state {k}: IPR {:.3e} <= tau", iprs[k]));
                    }
                }
            }
            e if e == 0.46 => {
                let e0 = 0.93;
                if !iprs.iter().any(|&x| x < lo) || !iprs.iter().any(|&x| x > hi) {
                    b.fail("eps=0.46: IPR distribution not bimodal".to_string());
                }
                for (k, en) in dec.eigenvalues.iter().enumerate() {
                    if iprs[k] < tau {
                        // extended candidates: on the segment, inside the window
                        b.observe((en.im - 1.0).abs(), || {
                            format!("eps=0.46 extended E={en:.4} off the segment")
                        });
                        if en.re.abs() >= e0 + 0.1 {
                            b.fail(format!(
                                "eps=0.46 extended E={en:.4}: |Re| >= {:.3}",
                                e0 + 0.1
                            ));
                        }
                    } else {
                        b.observe(distance_to_curve(*en, eps, 1.0, 2048), || {
                            format!("eps=0.46 localized E={en:.4} distance to loops")
                        });
                    }
                }
            }
            _ => {
                for (k, en) in dec.eigenvalues.iter().enumerate() {
                    if iprs[k] >= hi {
                        b.fail(format!("eps=0.6 state {k}: IPR {:.3e} >= 10/L", iprs[k]));
                    }
                    let d = if en.re.abs() <= 2.0 {
                        (en.im - 1.0).abs()
                    } else {
                        (en - Complex64::new(2.0f64.copysign(en.re), 1.0)).norm()
                    };
                    b.observe(d, || format!("eps=0.6 E={en:.4} distance to segment"));
                }
            }
        }
    }
    b.finish()
}

/// Criterion 3: winding sweep step structure at L = 377.
pub fn check_fig3_winding(cfg: &ExperimentConfig) -> Check {
    // measured value = bracket miss in units of the grid spacing
    let mut b = CheckBuilder::new(
        "fig3-winding",
        Some(3),
        "w1/w2 steps over 30 epsilon values bracket the thresholds",
        tol(cfg, "fig3-winding", 1.0),
    );
    let approx = approximant_with_q(377);
    let grid = default_winding_grid();
    let spacing = grid[1] - grid[0];
    let (eps1, eps2) = critical_epsilons(1.0);

    let mut rows = Vec::new();
    for &eps in &grid {
        let p = golden_params(1.0, eps, 0.0);
        let w1 = winding_number(
            Complex64::new(0.0, 1.0),
            &p,
            &approx,
            128,
            WindingMethod::Determinant,
        );
        let w2 = winding_number(
            Complex64::new(-2.0, 1.0),
            &p,
            &approx,
            128,
            WindingMethod::Determinant,
        );
        match (w1, w2) {
            (Ok(a), Ok(bb)) => rows.push((eps, a.winding, bb.winding)),
            (e1, e2) => b.fail(format!("eps={eps}: {:?} / {:?}", e1.err(), e2.err())),
        }
    }
    for &(eps, w1, w2) in &rows {
        let expected = match classify_phase(eps, 1.0) {
            PhaseLabel::Localized => (1, 1),
            PhaseLabel::MobilityEdge => (0, 1),
            PhaseLabel::Delocalized => (0, 0),
            PhaseLabel::Critical => continue,
        };
        if (w1, w2) != expected {
            b.fail(format!(
                "eps={eps:.4}: (w1,w2) = ({w1},{w2}), expected {expected:?}"
            ));
        }
    }
    // bracket of each step against its threshold
    for (pick, threshold, label) in [
        (0usize, eps1, "w1 step vs epsilon_1"),
        (1, eps2, "w2 step vs epsilon_2"),
    ] {
        let flips: Vec<(f64, f64)> = rows
            .windows(2)
            .filter(|w| {
                let a = if pick == 0 { w[0].1 } else { w[0].2 };
                let c = if pick == 0 { w[1].1 } else { w[1].2 };
                a != c
            })
            .map(|w| (w[0].0, w[1].0))
            .collect();
        if flips.len() != 1 {
            b.fail(format!("{label}: {} flips, expected 1", flips.len()));
            continue;
        }
        let (a, c) = flips[0];
        let miss = if threshold >= a && threshold <= c {
            0.0
        } else {
            (threshold - a).abs().min((threshold - c).abs()) / spacing
        };
        b.observe(miss, || format!("{label}: flip in [{a:.4}, {c:.4}]"));
    }
    b.finish()
}

/// Criterion 4: closed-form Lyapunov exponent versus the transfer-matrix
/// estimator over ten energies spanning on/off the segment, at
/// eps = 0.1, 0.3, 0.6.
///
/// KNOWN DEFECT (kept failing on purpose): on-segment energies at
/// eps = 0.1 and 0.3 measure the true cocycle rate
/// max(|Im phi_-|, |Im phi_+| - 2 eps) > 0, while the closed form gives 0.
/// The underlying epsilon-independence claim holds only where its first
/// affine piece dominates. See the project notes for the derivation.
pub fn check_lyapunov_cross(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "lyapunov-cross-validation",
        Some(4),
        "closed form vs transfer estimate at 10 energies x 3 epsilons",
        tol(cfg, "lyapunov-cross-validation", 1e-2),
    );
    let energies = crate::experiments::lyapunov_energy_panel();
    for &eps in &[0.1, 0.3, 0.6] {
        let p = golden_params(1.0, eps, 0.0);
        for &e in &energies {
            let closed = lyapunov_exponent(e, 1.0);
            match transfer_matrix_lyapunov(e, &p, cfg.steps.max(200_000), 4) {
                Ok(est) => {
                    b.observe((est - closed).abs(), || {
                        format!("E={e:.3} eps={eps}: closed {closed:.4} vs estimate {est:.4}")
                    });
                }
                Err(err) => b.fail(format!("E={e:.3} eps={eps}: {err}")),
            }
        }
    }
    b.finish()
}

/// Criterion 5: solvability integral vanishes on branch-valid curve points
/// and stays above 1e-2 on off-spectrum energies.
pub fn check_solvability(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "solvability",
        Some(5),
        "50 on-curve residuals < 1e-8 at 2048 points; 20 off-spectrum > 1e-2",
        tol(cfg, "solvability", 1e-8),
    );
    for &eps in &[0.1, 0.46] {
        let loops = match point_spectrum_loops(eps, 1.0, 4096) {
            Ok(l) => l,
            Err(e) => {
                b.fail(format!("loops at eps={eps}: {e}"));
                continue;
            }
        };
        let per_arc = 50 / loops.arcs.len().max(1);
        for arc in &loops.arcs {
            for k in 0..per_arc {
                let f = 0.1 + 0.8 * k as f64 / (per_arc - 1).max(1) as f64;
                let idx = ((arc.len() - 1) as f64 * f) as usize;
                let e = arc[idx].energy;
                match solvability_residual(e, eps, 1.0, 2048) {
                    Ok(r) => b.observe(r.abs(), || {
                        format!("eps={eps} omega={:.4} on-curve", arc[idx].omega)
                    }),
                    Err(err) => b.fail(format!("eps={eps} on-curve: {err}")),
                }
            }
        }
        // off-spectrum points: 12 on the real axis (gap identically zero),
        // 8 in the far field; all have |residual| > 1e-2 at both eps
        let mut off = Vec::new();
        for k in 0..12 {
            off.push(Complex64::new(-4.5 + 9.0 * k as f64 / 11.0, 0.0));
        }
        off.extend([
            Complex64::new(10.0, 10.0),
            Complex64::new(-8.0, 14.0),
            Complex64::new(12.0, -3.0),
            Complex64::new(0.0, 20.0),
            Complex64::new(-15.0, 0.5),
            Complex64::new(7.0, -7.0),
            Complex64::new(20.0, 2.0),
            Complex64::new(-3.0, -9.0),
        ]);
        for e in off {
            match solvability_residual(e, eps, 1.0, 2048) {
                Ok(r) => {
                    if r.abs() <= 1e-2 {
                        b.fail(format!(
                            "eps={eps} off-spectrum E={e:.2}: |residual| = {:.3e} <= 1e-2",
                            r.abs()
                        ));
                    }
                }
                Err(err) => b.fail(format!("eps={eps} off-spectrum E={e:.2}: {err}")),
            }
        }
    }
    b.finish()
}

/// Criterion 6: extended-state decay rates and eigen-residuals at eps = 0.6.
pub fn check_extended_states(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "extended-states",
        Some(6),
        "U_l decay slope = 2 eps - |Im phi| within 1e-2; psi residual < 1e-6",
        tol(cfg, "extended-states", 1e-2),
    );
    let p = golden_params(1.0, 0.6, 0.0);
    for omega in [0.9, 1.2, PI / 2.0, 2.0, 2.3] {
        let deep = match extended_state_amplitudes(omega, &p, 1e-100) {
            Ok(s) => s,
            Err(e) => {
                b.fail(format!("omega={omega}: {e}"));
                continue;
            }
        };
        let predicted = 2.0 * 0.6 - segment_angle(omega, 1.0).im.abs();
        b.observe((deep.decay_rate - predicted).abs(), || {
            format!(
                "omega={omega:.3}: slope {:.5} vs 2eps-|Im phi| {predicted:.5}",
                deep.decay_rate
            )
        });

        let sol = match extended_state_amplitudes(omega, &p, 1e-14) {
            Ok(s) => s,
            Err(e) => {
                b.fail(format!("omega={omega}: {e}"));
                continue;
            }
        };
        match extended_state_wavefunction(&sol, &p, (-51, 51), 1e-8) {
            Ok(wf) => {
                let mut worst = 0.0f64;
                let mut scale = 0.0f64;
                for n in -50..=50 {
                    let psi = wf.value(n).unwrap();
                    scale = scale.max(psi.norm());
                    let vn = potential_value(&p, GOLDEN_MEAN, n).expect("eps > 0");
                    let r = wf.value(n + 1).unwrap() + wf.value(n - 1).unwrap() + vn * psi
                        - sol.energy * psi;
                    worst = worst.max(r.norm());
                }
                let rel = worst / scale;
                if rel >= 1e-6 {
                    b.fail(format!("omega={omega:.3}: psi residual {rel:.3e} >= 1e-6"));
                }
            }
            Err(e) => b.fail(format!("omega={omega}: wavefunction {e}")),
        }
    }
    b.finish()
}

/// Criterion 7: real-space vs Fourier-space eigenvalue multisets.
///
/// KNOWN DEFECT (kept failing on purpose): at L = 233, eps = 0.6 the exact
/// n <-> L-n diagonal degeneracy plus one-sided O(1) coupling forms
/// Jordan-like pairs whose eigenvalues respond to f64 entry rounding as
/// sqrt(coupling * delta) ~ 2e-8 > 1e-8; confirmed with two independent
/// dense solvers. All other 15 grid cells pass at 5e-12 or better.
pub fn check_representation_equivalence(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "representation-equivalence",
        Some(7),
        "eigenvalue multisets agree to 1e-8 at L in {89, 233} x 3 theta x 3 eps",
        tol(cfg, "representation-equivalence", 1e-8),
    );
    for q in [89u64, 233] {
        let approx = approximant_with_q(q);
        for theta in [0.0, 0.3, PI / 2.0] {
            for eps in [0.1, 0.46, 0.6] {
                let p = golden_params(1.0, eps, theta);
                let spectra = (|| -> nhm_core::Result<(Vec<Complex64>, Vec<Complex64>)> {
                    let hr = build_real_space_hamiltonian(&p, &approx, 0.0)?;
                    let hf = build_fourier_hamiltonian(&p, &approx, 2.0 * theta * q as f64)?;
                    Ok((eigenvalues_only(&hr)?, eigenvalues_only(&hf)?))
                })();
                match spectra {
                    Ok((er, ef)) => {
                        let d = multiset_distance(&er, &ef);
                        b.observe(d, || format!("L={q} theta={theta:.3} eps={eps}"));
                    }
                    Err(e) => b.fail(format!("L={q} theta={theta:.3} eps={eps}: {e}")),
                }
            }
        }
    }
    b.finish()
}

/// Criterion 8: O(L) periodic determinant against dense LU.
pub fn check_determinant_oracle(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "determinant-oracle",
        Some(8),
        "fast determinant matches dense LU to 1e-10 relative, 50 draws",
        tol(cfg, "determinant-oracle", 1e-10),
    );
    let mut rng = SplitMix64::new(0x6d61_7279_6c61_6e64);
    for q in [8u64, 13, 21] {
        let approx = approximant_with_q(q);
        for _ in 0..50 {
            let eps = 0.05 + 0.95 * rng.uniform();
            let theta = PI * rng.uniform();
            let flux = PI * rng.uniform();
            let v = 0.5 + 1.5 * rng.uniform();
            let eb = Complex64::new(8.0 * rng.uniform() - 4.0, 8.0 * rng.uniform() - 4.0);
            let p = golden_params(v, eps, theta);
            let fast = match periodic_tridiagonal_determinant(&p, &approx, flux, eb) {
                Ok(d) => d,
                Err(e) => {
                    b.fail(format!("L={q}: {e}"));
                    continue;
                }
            };
            let mut h = build_real_space_hamiltonian(&p, &approx, flux).expect("eps > 0");
            for d in 0..approx.ring_size() {
                let cur = h.get(d, d);
                h.set(d, d, cur - eb);
            }
            let slow = dense_lu_determinant(&h);
            let rel = (fast.value() - slow).norm() / slow.norm().max(f64::MIN_POSITIVE);
            b.observe(rel, || {
                format!("L={q} eps={eps:.3} theta={theta:.3} E_B={eb:.3}")
            });
        }
    }
    b.finish()
}

/// Criterion 9: spectral-flow structure at eps = 0.2, L = 233.
pub fn check_spectral_flow(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "spectral-flow",
        Some(9),
        "trajectories on loop C (< 1e-2), single end cycle, sum dphi = 2 pi",
        tol(cfg, "spectral-flow", 1e-2),
    );
    let approx = approximant_with_q(233);
    let p = golden_params(1.0, 0.2, 0.0);
    let flow = match spectral_flow_trace(&p, &approx, 64) {
        Ok(f) => f,
        Err(e) => {
            b.fail(format!("flow: {e}"));
            return b.finish();
        }
    };
    // distance of every trajectory point to the loop: dense polyline
    // prefilter, exact golden-section refinement of the worst candidates
    let dense: Vec<Complex64> = (0..=32768)
        .map(|k| {
            let omega = PI * k as f64 / 32768.0;
            spectral_curve_point(omega, 0.2, 1.0).expect("no branch ambiguity at eps = 0.2")
        })
        .collect();
    let mut worst_points: Vec<(f64, Complex64)> = Vec::new();
    for lv in &flow.levels {
        for &e in lv {
            let d = dense
                .iter()
                .map(|c| (c - e).norm())
                .fold(f64::INFINITY, f64::min);
            worst_points.push((d, e));
        }
    }
    worst_points.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, e) in worst_points.iter().take(64) {
        let d = distance_to_curve(e, 0.2, 1.0, 4096);
        b.observe(d, || format!("E={e:.4} off loop C"));
    }
    let cycles = flow.cycle_lengths();
    if cycles != vec![233] {
        b.fail(format!("end permutation cycles {cycles:?}, expected [233]"));
    }
    // swept angles around an interior base energy
    let base = Complex64::new(0.0, 1.0);
    let mut total = 0.0;
    for i in 0..approx.ring_size() {
        let path = flow.trajectory(i);
        for w in path.windows(2) {
            let mut d = (w[1] - base).arg() - (w[0] - base).arg();
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            total += d;
        }
    }
    let miss = (total - 2.0 * PI).abs();
    if miss > 1e-3 {
        b.fail(format!("sum dphi = {total:.6}, expected 2 pi within 1e-3"));
    }
    b.finish()
}

/// Criterion 10: the eps -> 0 loop approaches the circle of radius
/// V/(2 eps) centered at iV/(2 eps).
pub fn check_epsilon_zero_limit(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "epsilon-zero-limit",
        Some(10),
        "loop at eps = 0.01 within 5% of the large circle",
        tol(cfg, "epsilon-zero-limit", 0.05),
    );
    let eps = 0.01;
    let r = 1.0 / (2.0 * eps);
    let center = Complex64::new(0.0, r);
    for k in 0..=20_000 {
        let omega = PI * (k as f64 + 0.5) / 20_001.0;
        match spectral_curve_point(omega, eps, 1.0) {
            Ok(e) => {
                let dev = ((e - center).norm() - r).abs() / r;
                if dev > b.measured {
                    b.measured = dev;
                }
                if dev > b.tolerance {
                    b.fail(format!("omega={omega:.5}: deviation {dev:.4}"));
                }
            }
            Err(err) => b.fail(format!("omega={omega:.5}: {err}")),
        }
    }
    b.finish()
}

/// Invariant: Im V_n >= 0 over full periods for eps > 0.
pub fn check_potential_positivity(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "potential-positivity",
        None,
        "Im of the potential nonnegative over a full ring period",
        tol(cfg, "potential-positivity", 0.0),
    );
    let approx = approximant_with_q(233);
    for eps in [0.05, 0.3, 0.8] {
        let p = golden_params(1.0, eps, 0.41);
        for n in 0..approx.ring_size() as i64 {
            let v = potential_value(&p, approx.value(), n).expect("eps > 0");
            if v.im < 0.0 {
                b.fail(format!("eps={eps} n={n}: Im V = {:.3e}", v.im));
            }
        }
    }
    b.finish()
}

/// Invariant: forward/inverse Fourier map round-trips to 1e-12.
pub fn check_fourier_roundtrip(cfg: &ExperimentConfig) -> Check {
    use nhm_core::spectral::{fourier_map, MapDirection};
    let mut b = CheckBuilder::new(
        "fourier-roundtrip",
        None,
        "unitary transform round-trip at L = 89",
        tol(cfg, "fourier-roundtrip", 1e-12),
    );
    let approx = approximant_with_q(89);
    let state: Vec<Complex64> = (0..89)
        .map(|i| Complex64::new((0.7 * i as f64).sin(), (1.3 * i as f64).cos()))
        .collect();
    let fwd = fourier_map(&state, &approx, 0.4, MapDirection::Forward).expect("length ok");
    let back = fourier_map(&fwd, &approx, 0.4, MapDirection::Inverse).expect("length ok");
    let mut worst = 0.0f64;
    for (a, c) in state.iter().zip(back.iter()) {
        worst = worst.max((a - c).norm());
    }
    b.observe(worst, || "round-trip error".to_string());
    b.finish()
}

/// Invariant: winding integer invariant under grid refinement.
pub fn check_winding_refinement(cfg: &ExperimentConfig) -> Check {
    let mut b = CheckBuilder::new(
        "winding-refinement",
        None,
        "winding unchanged when theta_steps doubles",
        tol(cfg, "winding-refinement", 0.0),
    );
    let approx = approximant_with_q(89);
    let p = golden_params(1.0, 0.46, 0.0);
    let eb = Complex64::new(-2.0, 1.0);
    let mut values = Vec::new();
    for steps in [64usize, 128, 256] {
        match winding_number(eb, &p, &approx, steps, WindingMethod::Determinant) {
            Ok(w) => values.push(w.winding),
            Err(e) => b.fail(format!("steps={steps}: {e}")),
        }
    }
    if values.windows(2).any(|w| w[0] != w[1]) {
        b.fail(format!("winding changed under refinement: {values:?}"));
    }
    b.finish()
}

/// Invariant: unilateral Fourier-space eigenstate residual.
pub fn check_unilateral_residual(cfg: &ExperimentConfig) -> Check {
    use nhm_core::spectral::unilateral_fourier_state;
    let mut b = CheckBuilder::new(
        "unilateral-residual",
        None,
        "unilateral state solves the Fourier eigenproblem at L = 233",
        tol(cfg, "unilateral-residual", 1e-6),
    );
    let approx = approximant_with_q(233);
    let p = golden_params(1.0, 0.6, 0.0);
    for center in [40usize, 77, 101] {
        match unilateral_fourier_state(center, &p, &approx) {
            Ok(st) => {
                b.observe(st.residual, || format!("center {center}"));
                if (st.energy.im - 1.0).abs() > 1e-12 || st.energy.re.abs() > 2.0 {
                    b.fail(format!(
                        "center {center}: energy {:.4} off segment",
                        st.energy
                    ));
                }
            }
            Err(e) => b.fail(format!("center {center}: {e}")),
        }
    }
    b.finish()
}

/// Invariant: localized Fourier profile has real zero-mode and solves its
/// defining recurrence.
pub fn check_localized_profile(cfg: &ExperimentConfig) -> Check {
    use nhm_core::analytic::localized_fourier_profile;
    let mut b = CheckBuilder::new(
        "localized-profile",
        None,
        "Omega_0 real to 1e-10 and functional residual < 1e-6",
        tol(cfg, "localized-profile", 1e-6),
    );
    let p = golden_params(1.0, 0.2, 0.0);
    match localized_fourier_profile(PI / 2.0, &p, 128) {
        Ok(prof) => {
            if prof.omega_zero_imag.abs() > 1e-10 {
                b.fail(format!("Im Omega_0 = {:.3e}", prof.omega_zero_imag));
            }
            b.observe(prof.functional_residual, || {
                "functional residual".to_string()
            });
            if prof.g_winding != 0 {
                b.fail(format!("g winding {} != 0", prof.g_winding));
            }
        }
        Err(e) => b.fail(format!("{e}")),
    }
    b.finish()
}

/// Runs the selected checks (all by default) in order.
pub fn all_checks(cfg: &ExperimentConfig) -> Vec<Check> {
    let wanted =
        |name: &str| cfg.only.is_empty() || cfg.only.iter().any(|f| name.contains(f.as_str()));
    let runners: Vec<(&str, fn(&ExperimentConfig) -> Check)> = vec![
        ("thresholds", check_thresholds),
        ("fig2-spectra", check_fig2_spectra),
        ("fig3-winding", check_fig3_winding),
        ("lyapunov-cross-validation", check_lyapunov_cross),
        ("solvability", check_solvability),
        ("extended-states", check_extended_states),
        (
            "representation-equivalence",
            check_representation_equivalence,
        ),
        ("determinant-oracle", check_determinant_oracle),
        ("spectral-flow", check_spectral_flow),
        ("epsilon-zero-limit", check_epsilon_zero_limit),
        ("potential-positivity", check_potential_positivity),
        ("fourier-roundtrip", check_fourier_roundtrip),
        ("winding-refinement", check_winding_refinement),
        ("unilateral-residual", check_unilateral_residual),
        ("localized-profile", check_localized_profile),
    ];
    runners
        .into_iter()
        .filter(|(name, _)| wanted(name))
        .map(|(_, f)| f(cfg))
        .collect()
}

/// Runs the suite, writes the machine-readable report, prints one line per
/// check; `Ok(report)` regardless of verdicts (exit codes are the CLI's
/// concern).
pub fn run_verify_suite(cfg: &ExperimentConfig) -> Result<(Report, PathBuf)> {
    cfg.validate().map_err(|e| e.context("verify config"))?;
    let checks = all_checks(cfg);
    for c in &checks {
        println!("{}", c.line());
        for f in &c.failures {
            println!("         - {f}");
        }
    }
    let all_passed = checks.iter().all(|c| c.passed);
    let json = serde_json::json!({
        "schema_version": crate::output::SCHEMA_VERSION,
        "all_passed": all_passed,
        "checks": checks.iter().map(|c| serde_json::json!({
            "name": c.name,
            "criterion": c.criterion,
            "description": c.description,
            "tolerance": c.tolerance,
            "measured": c.measured,
            "passed": c.passed,
            "failures": c.failures,
            "runtime_ms": c.runtime_ms,
        })).collect::<Vec<_>>(),
    });
    let path = cfg.out_dir.join("verify_report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&json)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok((Report { checks, all_passed }, path))
}

/// Max matched distance between two equal-size eigenvalue multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
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

/// Dense LU determinant with partial pivoting (independent oracle for the
/// O(L) recursion).
fn dense_lu_determinant(m: &nhm_core::spectral::ComplexMatrix) -> Complex64 {
    let n = m.dim();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        for r in k + 1..n {
            if a[r][k].norm() > a[piv][k].norm() {
                piv = r;
            }
        }
        if a[piv][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                let sub = f * a[k][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Deterministic 64-bit mixer for reproducible random draws.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}
