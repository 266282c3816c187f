use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::quad::gauss_kronrod;

/// A radial function `f(|x|)` on `[0, s_max]`, taken as zero beyond.
#[derive(Clone)]
pub struct RadialProfile {
    rule: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    s_max: f64,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("s_max", &self.s_max)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        s_max: f64,
        rule: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(s_max > 0.0) || !s_max.is_finite() {
            return Err(Error::Domain(format!(
                "profile support {s_max} must be positive"
            )));
        }
        Ok(Self {
            rule: Arc::new(rule),
            s_max,
        })
    }

    /// `exp(-s^2 / 2)`, truncated where it is below `1e-40`.
    pub fn gaussian() -> Self {
        Self::new(14.0, |s| Complex64::new((-0.5 * s * s).exp(), 0.0)).expect("valid support")
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        (self.rule)(s)
    }
}

/// Length of the trailing window whose contribution must be negligible.
fn tail_window(p: &RadialProfile) -> f64 {
    0.05 * p.s_max
}

/// Two-dimensional radial Fourier transform `int_0^inf f(s) J_0(rs) s ds`.
///
/// Panels are at most `pi / r` long so each holds half an oscillation of
/// `J_0(rs)`. Fails if the last 5% of the support carries more than
/// `1e-10` of the total.
pub fn radial_hat(p: &RadialProfile, r: f64) -> Result<Complex64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius {r} must be >= 0")));
    }
    let len = if r > 0.0 { (PI / r).min(1.0) } else { 1.0 };
    let tail_start = p.s_max - tail_window(p);
    let mut body = Complex64::new(0.0, 0.0);
    let mut tail = Complex64::new(0.0, 0.0);
    let integrand = |s: f64| p.eval(s) * libm::j0(r * s) * s;
    let mut a = 0.0;
    for end in [tail_start, p.s_max] {
        while a < end {
            let b = (a + len).min(end);
            let piece = gauss_kronrod(integrand, a, b, 1e-15, 1e-13)?.value;
            if end == tail_start {
                body += piece;
            } else {
                tail += piece;
            }
            a = b;
        }
    }
    let total = body + tail;
    if tail.norm() > 1e-10 * total.norm() {
        return Err(Error::Quadrature(format!(
            "profile tail on [{tail_start}, {}] contributes {:.3e} of {:.3e}; not integrable at this support",
            p.s_max,
            tail.norm(),
            total.norm()
        )));
    }
    Ok(total)
}
