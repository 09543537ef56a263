//! Model parameters, rational approximants and the complex potential.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default guard distance from a tangent pole, used only at eps = 0.
pub const DEFAULT_POLE_GUARD: f64 = 1e-8;

/// Physical parameters of the chain (hopping amplitude fixed to 1).
///
/// `theta` is stored reduced modulo pi: the tangent potential is pi-periodic
/// in its phase argument, and the flux integral for winding numbers runs
/// over `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    v: f64,
    epsilon: f64,
    theta: f64,
    alpha: f64,
}

impl ModelParams {
    /// Validates `v >= 0`, `epsilon >= 0`, `alpha` in (0, 1); reduces
    /// `theta` modulo pi.
    pub fn new(v: f64, epsilon: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!("V must be >= 0, got {v}")));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be >= 0, got {epsilon}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            v,
            epsilon,
            theta: theta.rem_euclid(std::f64::consts::PI),
            alpha,
        })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Potential phase, reduced to `[0, pi)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Target irrational frequency.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same parameters with a different non-Hermiticity strength.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.v, epsilon, self.theta, self.alpha)
    }

    /// Same parameters with a different potential phase.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.v, self.epsilon, theta, self.alpha)
    }

    /// Quasi energy of the equivalent kicked problem, mu = -2(theta + i eps).
    pub fn quasi_energy(&self) -> Complex64 {
        -2.0 * Complex64::new(self.theta, self.epsilon)
    }
}

/// Coprime truncation p/q of the irrational frequency; fixes the ring size
/// L = q for finite-lattice work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalApproximant {
    p: u64,
    q: u64,
}

impl RationalApproximant {
    /// Requires `0 < p < q` and `gcd(p, q) = 1`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || p >= q {
            return Err(Error::InvalidParameter(format!(
                "approximant requires 0 < p < q, got {p}/{q}"
            )));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidParameter(format!(
                "approximant {p}/{q} is not in lowest terms"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Ring size L = q.
    pub fn ring_size(&self) -> usize {
        self.q as usize
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl std::fmt::Display for RationalApproximant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// First `count` consecutive Fibonacci ratios 1/2, 2/3, 3/5, 5/8, ...
/// converging to the inverse golden mean.
pub fn fibonacci_approximants(count: usize) -> Result<Vec<RationalApproximant>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    let (mut p, mut q) = (1u64, 2u64);
    for _ in 0..count {
        out.push(RationalApproximant::new(p, q)?);
        let next = q.checked_add(p).ok_or_else(|| {
            Error::InvalidParameter(format!("Fibonacci denominator overflow past {q}"))
        })?;
        p = q;
        q = next;
    }
    Ok(out)
}

/// tan of a complex argument, evaluated as
/// `(sin 2x / cosh 2y + i tanh 2y) / (cos 2x / cosh 2y + 1)`
/// with exponentially scaled hyperbolics, stable for |Im z| up to ~10^3.
pub fn complex_tan(z: Complex64) -> Complex64 {
    let (x2, y2) = (2.0 * z.re, 2.0 * z.im);
    let t = (-y2.abs()).exp();
    let t2 = t * t;
    let sech = 2.0 * t / (1.0 + t2);
    // 1 - t^2 via expm1 keeps precision for small |y|
    let tanh = y2.signum() * (-(-2.0 * y2.abs()).exp_m1()) / (1.0 + t2);
    let den = x2.cos() * sech + 1.0;
    Complex64::new(x2.sin() * sech / den, tanh / den)
}

/// On-site potential `V tan(pi*alpha_eff*n + theta_arg + i*eps)` with an
/// explicit phase argument (`theta_arg` is either theta or theta/L,
/// depending on the caller's flux convention).
pub fn potential_value_with_phase(
    params: &ModelParams,
    alpha_eff: f64,
    n: i64,
    theta_arg: f64,
    pole_guard: f64,
) -> Result<Complex64> {
    let arg = std::f64::consts::PI * alpha_eff * n as f64 + theta_arg;
    if params.epsilon == 0.0 {
        // distance of arg to pi/2 mod pi
        let r = (arg - std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
        let dist = r.min(std::f64::consts::PI - r);
        if dist < pole_guard {
            return Err(Error::PoleProximity { distance: dist });
        }
    }
    Ok(params.v * complex_tan(Complex64::new(arg, params.epsilon)))
}

/// On-site potential with the plain phase convention `theta_arg = theta`.
pub fn potential_value(params: &ModelParams, alpha_eff: f64, n: i64) -> Result<Complex64> {
    potential_value_with_phase(params, alpha_eff, n, params.theta, DEFAULT_POLE_GUARD)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}
