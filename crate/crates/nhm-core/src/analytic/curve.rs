//! The complex spectral curve, its branch condition and loop structure.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::PhaseLabel;
use crate::error::{Error, Result};

/// Threshold below which the square-root branch of the curve is considered
/// ambiguous (both roots essentially real).
const BRANCH_IM_TOL: f64 = 1e-12;

/// Default tolerance for the on-curve gap identity Im(phi_- - phi_+) = 2 eps.
pub(crate) const TWO_EPS_TOL: f64 = 1e-8;

/// The pair of complex angles with `cos(phi_pm) = (E ± iV)/2`, both taken on
/// the `Im <= 0` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAngles {
    pub phi_plus: Complex64,
    pub phi_minus: Complex64,
}

impl BranchAngles {
    /// Im(phi_- - phi_+); equals 2 eps exactly on the point spectrum.
    pub fn im_gap(&self) -> f64 {
        self.phi_minus.im - self.phi_plus.im
    }

    /// Strict ordering constraint Im(phi_+) < Im(phi_-) < 0.
    pub fn ordering_valid(&self) -> bool {
        self.phi_plus.im < self.phi_minus.im && self.phi_minus.im < 0.0
    }
}

/// One sample of the parametric curve E(omega).
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub omega: f64,
    pub energy: Complex64,
    /// Whether the branch condition holds here (solid part of the curve).
    pub branch_valid: bool,
    /// Residual of the defining relation E^2/(4 cos^2) - V^2/(4 sin^2) = 1.
    pub self_test: f64,
}

/// Branch-filtered arcs of the point spectrum.
#[derive(Debug, Clone)]
pub struct LoopSet {
    /// Full sweep over omega in [0, pi], valid and invalid samples alike.
    pub samples: Vec<CurveSample>,
    /// Contiguous branch-valid runs (circular in omega).
    pub arcs: Vec<Vec<CurveSample>>,
    pub loop_count: usize,
    pub phase_label: PhaseLabel,
}

/// Extended-state energy window on the segment Gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedWindow {
    /// No extended states (eps < eps_1).
    Empty,
    /// Partial window |cos omega| < cos(omega0), energies (-E0, E0) + iV.
    Partial { omega0: f64, e0: f64 },
    /// The whole segment (eps > eps_2).
    Full,
}

impl ExtendedWindow {
    /// Membership test for the extended window, read as |cos w| < cos w0.
    pub fn contains(&self, omega: f64) -> bool {
        match self {
            ExtendedWindow::Empty => false,
            ExtendedWindow::Partial { omega0, .. } => omega.cos().abs() < omega0.cos(),
            ExtendedWindow::Full => true,
        }
    }
}

/// Point of the parametric spectral curve,
/// `E(w) = sqrt(4 cos^2(w + i eps) + V^2 cot^2(w + i eps))`,
/// on the branch with `Im E >= 0`.
///
/// Errors with [`Error::BranchAmbiguity`] where both roots are real to
/// within 1e-12; samplers resolve those points by continuity in omega.
pub fn spectral_curve_point(omega: f64, epsilon: f64, v: f64) -> Result<Complex64> {
    let (e, _) = curve_point_raw(omega, epsilon, v);
    if e.im.abs() < BRANCH_IM_TOL {
        return Err(Error::BranchAmbiguity { omega });
    }
    Ok(e)
}

/// Curve point without the ambiguity check, plus the defining-relation
/// residual. The returned branch has Im >= 0.
fn curve_point_raw(omega: f64, epsilon: f64, v: f64) -> (Complex64, f64) {
    let z = Complex64::new(omega, epsilon);
    let c = z.cos();
    let s = z.sin();
    let e2 = 4.0 * c * c + v * v * (c * c) / (s * s);
    let mut e = e2.sqrt();
    if e.im < 0.0 {
        e = -e;
    }
    let resid = (e * e / (4.0 * c * c) - v * v / (4.0 * s * s) - 1.0).norm();
    (e, resid)
}

/// Complex angles `phi_pm = acos((E ± iV)/2)` on the `Im <= 0` branch.
pub fn branch_angles(e: Complex64, v: f64) -> BranchAngles {
    let mut phi_plus = ((e + Complex64::new(0.0, v)) / 2.0).acos();
    if phi_plus.im > 0.0 {
        phi_plus = -phi_plus;
    }
    let mut phi_minus = ((e - Complex64::new(0.0, v)) / 2.0).acos();
    if phi_minus.im > 0.0 {
        phi_minus = -phi_minus;
    }
    BranchAngles {
        phi_plus,
        phi_minus,
    }
}

/// Branch condition at energy `e`: the ordering Im(phi_+) < Im(phi_-) < 0
/// and, when `two_eps_tol` is given (on-curve queries), the gap identity
/// |Im(phi_- - phi_+) - 2 eps| < tol. Pass `None` for off-curve queries.
pub fn branch_condition(
    e: Complex64,
    epsilon: f64,
    v: f64,
    two_eps_tol: Option<f64>,
) -> (BranchAngles, bool) {
    let angles = branch_angles(e, v);
    let mut valid = angles.ordering_valid();
    if let Some(tol) = two_eps_tol {
        valid = valid && (angles.im_gap() - 2.0 * epsilon).abs() < tol;
    }
    (angles, valid)
}

/// Samples the spectral curve over omega in [0, pi], flags branch validity,
/// groups contiguous valid runs into arcs (circularly: E(0) = E(pi)), and
/// counts the loops: 1 below eps_1, 2 between the thresholds, 0 above eps_2.
///
/// The sampler doubles the resolution (up to three times) if the run
/// structure looks under-resolved (more than two arcs, or an arc thinner
/// than three samples).
pub fn point_spectrum_loops(epsilon: f64, v: f64, resolution: usize) -> Result<LoopSet> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be > 0".into()));
    }
    if resolution < 256 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be >= 256, got {resolution}"
        )));
    }

    let mut res = resolution;
    let mut last_err = None;
    for _ in 0..4 {
        match sample_loops(epsilon, v, res) {
            Ok(set) => {
                let suspicious = set.arcs.len() > 2
                    || set.arcs.iter().any(|a| a.len() < 3 && set.arcs.len() > 1);
                if !suspicious {
                    return Ok(set);
                }
                last_err = Some(Error::ResolutionTooCoarse {
                    transitions: 2 * set.arcs.len(),
                    samples: res,
                });
            }
            Err(e) => last_err = Some(e),
        }
        res *= 2;
    }
    Err(last_err.unwrap())
}

fn sample_loops(epsilon: f64, v: f64, resolution: usize) -> Result<LoopSet> {
    let n = resolution;
    // raw energies, ambiguous points deferred
    let mut energies: Vec<Option<(Complex64, f64)>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let omega = PI * k as f64 / n as f64;
        let (e, resid) = curve_point_raw(omega, epsilon, v);
        if e.im.abs() < BRANCH_IM_TOL {
            energies.push(None);
        } else {
            energies.push(Some((e, resid)));
        }
    }
    // resolve ambiguous samples by continuity with the nearest resolved
    // neighbor (both signs are real there; pick the closer one)
    let resolved: Vec<(Complex64, f64)> = {
        let mut out = vec![None; n + 1];
        let mut prev: Option<Complex64> = None;
        for k in 0..=n {
            match energies[k] {
                Some((e, r)) => {
                    out[k] = Some((e, r));
                    prev = Some(e);
                }
                None => {
                    let omega = PI * k as f64 / n as f64;
                    let (e, r) = curve_point_raw(omega, epsilon, v);
                    if let Some(p) = prev {
                        let pick = if (e - p).norm() <= (-e - p).norm() {
                            e
                        } else {
                            -e
                        };
                        out[k] = Some((pick, r));
                        prev = Some(pick);
                    } else {
                        out[k] = Some((e, r)); // revisited below
                    }
                }
            }
        }
        // back-fill any leading ambiguous run from the right
        let mut next: Option<Complex64> = None;
        for k in (0..=n).rev() {
            if energies[k].is_some() {
                next = Some(out[k].unwrap().0);
            } else if let Some(nx) = next {
                let (e, r) = out[k].unwrap();
                let pick = if (e - nx).norm() <= (-e - nx).norm() {
                    e
                } else {
                    -e
                };
                out[k] = Some((pick, r));
                next = Some(pick);
            }
        }
        if out.iter().any(|o| o.is_none()) {
            return Err(Error::BranchAmbiguity { omega: 0.0 });
        }
        out.into_iter().map(Option::unwrap).collect()
    };

    let samples: Vec<CurveSample> = resolved
        .iter()
        .enumerate()
        .map(|(k, &(e, resid))| {
            let omega = PI * k as f64 / n as f64;
            let (_, valid) = branch_condition(e, epsilon, v, Some(TWO_EPS_TOL));
            CurveSample {
                omega,
                energy: e,
                branch_valid: valid,
                self_test: resid,
            }
        })
        .collect();

    // group circularly over k = 0..n (sample at pi duplicates omega = 0)
    let flags: Vec<bool> = samples[..n].iter().map(|s| s.branch_valid).collect();
    let arcs_idx = circular_runs(&flags);
    let arcs: Vec<Vec<CurveSample>> = arcs_idx
        .iter()
        .map(|run| run.iter().map(|&k| samples[k]).collect())
        .collect();

    let loop_count = arcs.len();
    let phase_label = match loop_count {
        0 => PhaseLabel::Delocalized,
        1 => PhaseLabel::Localized,
        _ => PhaseLabel::MobilityEdge,
    };
    Ok(LoopSet {
        samples,
        arcs,
        loop_count,
        phase_label,
    })
}

/// Indices of maximal circular runs of `true`.
fn circular_runs(flags: &[bool]) -> Vec<Vec<usize>> {
    let n = flags.len();
    if flags.iter().all(|&f| f) {
        return vec![(0..n).collect()];
    }
    if flags.iter().all(|&f| !f) {
        return Vec::new();
    }
    // start scanning right after a false sample so runs never straddle the seam
    let start = flags.iter().position(|&f| !f).unwrap();
    let mut runs = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    for i in 0..n {
        let k = (start + 1 + i) % n;
        if flags[k] {
            cur.push(k);
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

/// Mobility-edge boundary on the segment: `cos w0 = cosh(2e) sqrt(1 - V^2/sinh^2(2e))`.
///
/// Returns the window marker directly: empty below eps_1, the full segment
/// above eps_2, and the partial window (w0, E0 = 2 cos w0) in between.
pub fn mobility_edge_omega0(epsilon: f64, v: f64) -> ExtendedWindow {
    debug_assert!(epsilon >= 0.0 && v >= 0.0);
    let s = (2.0 * epsilon).sinh();
    if s <= 0.0 {
        return ExtendedWindow::Empty;
    }
    let disc = 1.0 - (v * v) / (s * s);
    if disc < 0.0 {
        return ExtendedWindow::Empty;
    }
    let c = (2.0 * epsilon).cosh() * disc.sqrt();
    if c >= 1.0 {
        ExtendedWindow::Full
    } else {
        ExtendedWindow::Partial {
            omega0: c.acos(),
            e0: 2.0 * c,
        }
    }
}

/// Solvability integral `(1/2pi) \oint log|g(x)| dx` by periodic trapezoid
/// quadrature; vanishes exactly on the branch-valid part of the curve and
/// equals `Im(phi_- - phi_+) - 2 eps` analytically.
pub fn solvability_residual(
    e: Complex64,
    epsilon: f64,
    v: f64,
    quadrature_points: usize,
) -> Result<f64> {
    if quadrature_points < 64 {
        return Err(Error::InvalidParameter(format!(
            "quadrature_points must be >= 64, got {quadrature_points}"
        )));
    }
    let n = quadrature_points;
    let iv = Complex64::new(0.0, v);
    let mut acc = 0.0;
    let mut min_abs_minus = f64::INFINITY;
    let mut min_abs_plus = f64::INFINITY;
    for j in 0..n {
        let x = 2.0 * PI * j as f64 / n as f64;
        let two_cos = 2.0 * x.cos();
        // |1 ± iW| = |E ± iV - 2 cos x| / V
        let ap = (e + iv - two_cos).norm();
        let am = (e - iv - two_cos).norm();
        min_abs_plus = min_abs_plus.min(ap / v);
        min_abs_minus = min_abs_minus.min(am / v);
        acc += ap.ln() - am.ln();
    }
    let min_abs = min_abs_minus.min(min_abs_plus);
    if min_abs < 1e-10 {
        return Err(Error::SingularIntegrand { min_abs });
    }
    Ok(-2.0 * epsilon + acc / n as f64)
}

/// Distance from `e` to the analytic curve at (epsilon, V): coarse scan
/// plus golden-section refinement of the nearest parameter. Robust across
/// square-root branch flips (both signs are considered).
pub fn distance_to_curve(e: Complex64, epsilon: f64, v: f64, coarse: usize) -> f64 {
    let both = |omega: f64| -> f64 {
        let (ec, _) = curve_point_raw(omega, epsilon, v);
        (ec - e).norm().min((-ec - e).norm())
    };
    let n = coarse.max(64);
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let d = both(PI * k as f64 / n as f64);
        if d < best {
            best = d;
            best_k = k;
        }
    }
    let mut a = PI * best_k.saturating_sub(1) as f64 / n as f64;
    let mut b = PI * (best_k + 1).min(n) as f64 / n as f64;
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    for _ in 0..80 {
        if both(c) < both(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    both(0.5 * (a + b)).min(best)
}
