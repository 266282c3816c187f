//! Oscillatory integrals `int_a^b exp(i lambda f) psi` against the
//! second-derivative bound `C lambda^(-1/2) (|psi(b)| + ||psi'||_1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::quad::{adaptive_breaks, gauss_kronrod_real, GlRule};

/// Constant of the second-derivative bound (the classical value for
/// `|f''| >= 1`).
pub const VDC_CONSTANT: f64 = 8.0;

const SAMPLES: usize = 201;

/// Per-`lambda` values of the check.
#[derive(Debug, Clone, PartialEq)]
pub struct VdcReport {
    pub lambdas: Vec<f64>,
    /// `|int_a^b exp(i lambda f) psi|`.
    pub integrals: Vec<f64>,
    /// `C lambda^(-1/2) (|psi(b)| + ||psi'||_1)`.
    pub bounds: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `lambda^(1/2) |I(lambda)|`.
    pub normalized: Vec<f64>,
    pub max_ratio: f64,
}

fn central_diff(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn second_diff(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Evaluates the oscillatory integral and its bound for every `lambda`.
pub fn van_der_corput_check(
    phase: &dyn Fn(f64) -> f64,
    amplitude: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    lambdas: &[f64],
) -> Result<VdcReport> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}] must be finite and proper"
        )));
    }
    if lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::Domain("lambda values must be positive".into()));
    }
    let h = 1e-4 * (b - a);
    let mut max_slope: f64 = 0.0;
    for i in 0..SAMPLES {
        let x = a + (b - a) * i as f64 / (SAMPLES - 1) as f64;
        let f2 = second_diff(phase, x, h);
        if f2.abs() < 1.0 {
            return Err(Error::Precondition(format!(
                "|f''({x})| = {:.4} is below 1",
                f2.abs()
            )));
        }
        max_slope = max_slope.max(central_diff(phase, x, h).abs());
    }

    let dpsi_l1 = gauss_kronrod_real(|x| central_diff(amplitude, x, h).abs(), a, b, 1e-12, 1e-10)?;
    let psi_scale = amplitude(b).abs() + dpsi_l1;
    let rule = GlRule::new(10);

    let mut report = VdcReport {
        lambdas: lambdas.to_vec(),
        integrals: Vec::new(),
        bounds: Vec::new(),
        ratios: Vec::new(),
        normalized: Vec::new(),
        max_ratio: 0.0,
    };
    for &lambda in lambdas {
        let freq = lambda * (max_slope + 1.0);
        let breaks = adaptive_breaks(a, b, |_| (std::f64::consts::PI / freq).min(b - a));
        let value = rule
            .integrate_panels(&breaks, |x| {
                Complex64::from_polar(amplitude(x), lambda * phase(x))
            })
            .norm();
        let bound = VDC_CONSTANT * lambda.powf(-0.5) * psi_scale;
        let ratio = if bound > 0.0 { value / bound } else { 0.0 };
        report.integrals.push(value);
        report.bounds.push(bound);
        report.ratios.push(ratio);
        report.normalized.push(lambda.sqrt() * value);
        report.max_ratio = report.max_ratio.max(ratio);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_phase_is_rejected() {
        let r = van_der_corput_check(&|x| 0.25 * x * x, &|_| 1.0, 0.0, 1.0, &[10.0]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn fresnel_limit() {
        let rep = van_der_corput_check(&|x| x * x, &|_| 1.0, 0.0, 1.0, &[1e4, 1e5]).unwrap();
        let limit = std::f64::consts::PI.sqrt() / 2.0;
        assert!((rep.normalized[1] - limit).abs() < 5e-3);
        assert!(rep.max_ratio < 1.0);
    }
}
