//! Bessel functions from their integral representations and the
//! non-oscillatory Hankel envelope `h(r) = exp(-ir) H_0^(1)(r)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::fit::log_log_fit;
use super::quad::gauss_kronrod_real;

const ABS_TOL: f64 = 1e-13;

/// `J_m(r)` for `m > -1/2`, `r >= 0`, by quadrature of
/// `(r/2)^m / (Gamma(m + 1/2) sqrt(pi)) int_{-1}^{1} exp(irs) (1 - s^2)^(m - 1/2) ds`.
///
/// The substitution `s = sin(theta)` removes the endpoint singularity;
/// the angle range is split into panels of roughly two radians of phase.
/// Once the prefactor exceeds `POISSON_LIMIT` the integral cancels to far
/// below its integrand and Schlafli's integral is used instead.
pub fn bessel_j(m: f64, r: f64) -> Result<f64> {
    if !(m > -0.5) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel order m = {m} must exceed -1/2"
        )));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument r = {r} must be >= 0"
        )));
    }
    if r == 0.0 {
        return Ok(if m == 0.0 { 1.0 } else { 0.0 });
    }
    let prefactor = (m * (0.5 * r).ln() - libm::lgamma(m + 0.5)).exp() / PI.sqrt();
    if prefactor > POISSON_LIMIT {
        return schlafli_j(m, r);
    }
    let panels = (r / 2.0).ceil().max(1.0) as usize;
    let width = FRAC_PI_2 / panels as f64;
    let tol = ABS_TOL / panels as f64;
    let mut integral = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        integral += gauss_kronrod_real(
            |th| (r * th.sin()).cos() * th.cos().powf(2.0 * m),
            a,
            a + width,
            tol,
            1e-14,
        )?;
    }
    Ok(prefactor * 2.0 * integral)
}

const POISSON_LIMIT: f64 = 4.0;

/// `(1/pi) int_0^pi cos(m t - r sin t) dt - sin(m pi)/pi int_0^inf exp(-r sinh t - m t) dt`.
fn schlafli_j(m: f64, r: f64) -> Result<f64> {
    let panels = (r / 2.0).ceil().max(1.0) as usize;
    let width = PI / panels as f64;
    let mut osc = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        osc += gauss_kronrod_real(
            |th| (m * th - r * th.sin()).cos(),
            a,
            a + width,
            ABS_TOL / panels as f64,
            1e-14,
        )?;
    }
    let weight = (m * PI).sin();
    if weight.abs() < 1e-15 {
        return Ok(osc / PI);
    }
    let mut end = 1.0;
    while r * f64::sinh(end) + m * end < 40.0 {
        end *= 2.0;
    }
    let tail = gauss_kronrod_real(|t| (-r * t.sinh() - m * t).exp(), 0.0, end, ABS_TOL, 1e-14)?;
    Ok((osc - weight * tail) / PI)
}

/// `Y_0(r)` for `r > 0` from
/// `(1/pi) int_0^pi sin(r sin t) dt - (2/pi) int_0^inf exp(-r sinh t) dt`.
pub fn bessel_y0(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("Y_0 needs r > 0, got {r}")));
    }
    let panels = (r / 2.0).ceil().max(1.0) as usize;
    let width = PI / panels as f64;
    let mut osc = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        osc += gauss_kronrod_real(
            |th| (r * th.sin()).sin(),
            a,
            a + width,
            ABS_TOL / panels as f64,
            1e-14,
        )?;
    }
    // exp(-r sinh t) < 1e-17 beyond this point
    let t_end = (40.0 / r).asinh();
    let tail = gauss_kronrod_real(|t| (-r * t.sinh()).exp(), 0.0, t_end, ABS_TOL, 1e-14)?;
    Ok(osc / PI - 2.0 * tail / PI)
}

/// `h(r) = exp(-ir) (J_0(r) + i Y_0(r))`, with `J_0(r) = Re(exp(ir) h(r))`.
pub fn hankel_envelope(r: f64) -> Result<Complex64> {
    let j = bessel_j(0.0, r)?;
    let y = bessel_y0(r)?;
    Ok(Complex64::from_polar(1.0, -r) * Complex64::new(j, y))
}

/// Step of the finite differences used for `d^k h / dr^k`.
const FD_STEP: f64 = 0.5;

/// `d^k h / dr^k` for `k` in `0..=2` (fourth-order central differences).
pub fn hankel_envelope_derivative(k: u32, r: f64) -> Result<Complex64> {
    let h = FD_STEP;
    let at = |x: f64| hankel_envelope(x);
    match k {
        0 => at(r),
        1 => {
            let (a, b, c, d) = (at(r - 2.0 * h)?, at(r - h)?, at(r + h)?, at(r + 2.0 * h)?);
            Ok((a - b * 8.0 + c * 8.0 - d) / (12.0 * h))
        }
        2 => {
            let (a, b, c, d, e) = (
                at(r - 2.0 * h)?,
                at(r - h)?,
                at(r)?,
                at(r + h)?,
                at(r + 2.0 * h)?,
            );
            Ok((-a + b * 16.0 - c * 30.0 + d * 16.0 - e) / (12.0 * h * h))
        }
        _ => Err(Error::Domain(format!("derivative order {k} not in 0..=2"))),
    }
}

/// Envelope-decay fit of `|d^k h / dr^k|` on a grid of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub k: u32,
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub fitted_exponent: f64,
    pub exponent_stderr: f64,
    /// `-1/2 - k`.
    pub expected_exponent: f64,
}

/// Fits the power-law decay of `|d^k h|` over `r_grid` (all `r >= 1`).
pub fn h_envelope_check(k: u32, r_grid: &[f64]) -> Result<EnvelopeReport> {
    if k > 2 {
        return Err(Error::Domain(format!("derivative order {k} not in 0..=2")));
    }
    if r_grid.len() < 2 {
        return Err(Error::Precondition("need at least two radii".into()));
    }
    let min = r_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= 1.0) {
        return Err(Error::Domain(format!(
            "envelope radii must be >= 1 (asymptotic regime), got {min}"
        )));
    }
    let magnitudes = r_grid
        .iter()
        .map(|&r| hankel_envelope_derivative(k, r).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?;
    let fit = log_log_fit(r_grid, &magnitudes)?;
    Ok(EnvelopeReport {
        k,
        radii: r_grid.to_vec(),
        magnitudes,
        fitted_exponent: fit.slope,
        exponent_stderr: fit.stderr,
        expected_exponent: -0.5 - k as f64,
    })
}
