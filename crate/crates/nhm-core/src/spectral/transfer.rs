//! 2x2 transfer matrices and the numerical Lyapunov estimator.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{complex_tan, ModelParams};

/// Dense 2x2 complex matrix for transfer-matrix products.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// One-step transfer matrix [[e - v, -1], [1, 0]].
    #[inline]
    pub fn step(e: Complex64, v: Complex64) -> Self {
        Self {
            a: e - v,
            b: Complex64::new(-1.0, 0.0),
            c: Complex64::new(1.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        }
    }

    /// self * rhs.
    #[inline]
    pub fn mul(&self, rhs: &Mat2) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    #[inline]
    pub fn scale(&mut self, s: f64) {
        self.a /= s;
        self.b /= s;
        self.c /= s;
        self.d /= s;
    }
}

/// Renormalization interval for running transfer products.
const RENORM_INTERVAL: usize = 16;

/// Numerical Lyapunov exponent from renormalized transfer-matrix products,
/// averaged over `phase_samples` equispaced potential phases. Converges to
/// the closed form as `steps` grows and is epsilon-independent.
pub fn transfer_matrix_lyapunov(
    e: Complex64,
    params: &ModelParams,
    steps: usize,
    phase_samples: usize,
) -> Result<f64> {
    if steps < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "steps must be >= 10^4, got {steps}"
        )));
    }
    if phase_samples == 0 {
        return Err(Error::InvalidParameter("phase_samples must be >= 1".into()));
    }
    let (v, eps, alpha) = (params.v(), params.epsilon(), params.alpha());
    let mut total = 0.0;
    for j in 0..phase_samples {
        let theta = PI * j as f64 / phase_samples as f64;
        let mut m = Mat2::identity();
        let mut log_acc = 0.0f64;
        if eps > 0.0 {
            for n in 1..=steps {
                let arg = PI * alpha * n as f64 + theta;
                let vn = v * complex_tan(Complex64::new(arg, eps));
                m = Mat2::step(e, vn).mul(&m);
                if n % RENORM_INTERVAL == 0 {
                    let s = m.frobenius();
                    m.scale(s);
                    log_acc += s.ln();
                }
            }
        } else {
            // Hermitian limit: per-step pole guard
            for n in 1..=steps {
                let vn = crate::model::potential_value_with_phase(
                    params,
                    alpha,
                    n as i64,
                    theta,
                    crate::model::DEFAULT_POLE_GUARD,
                )?;
                m = Mat2::step(e, vn).mul(&m);
                if n % RENORM_INTERVAL == 0 {
                    let s = m.frobenius();
                    m.scale(s);
                    log_acc += s.ln();
                }
            }
        }
        log_acc += m.frobenius().ln();
        total += log_acc / steps as f64;
    }
    Ok(total / phase_samples as f64)
}
