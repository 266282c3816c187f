//! The radial kernel `K(r, t) = int_0^inf s^beta exp(it(s^3 + s)) J_0(rs) s ds`
//! of `D^beta` applied to the linear group, and its decay in `t`.
//!
//! The integral only converges as an oscillatory limit. It is evaluated
//! with a smooth cutoff `W(s)` that equals one up to `S` and vanishes from
//! `1.6 S` on, where `S` lies well past every stationary point of the
//! phase, so the cutoff only meets non-stationary oscillation. Each sup is
//! re-evaluated with a 1.5x larger cutoff as a convergence check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::fit::log_log_fit;
use super::quad::{adaptive_breaks, gauss_kronrod, GlRule};

/// Tuning of kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Smallest accepted time.
    pub t_min: f64,
    /// Points of the uniform part of the `r`-grid.
    pub r_points: usize,
    /// Gauss-Legendre points per half-oscillation panel.
    pub gl_points: usize,
    /// Accepted change of the sup under the larger cutoff, relative.
    pub cutoff_tolerance: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            t_min: 1.0,
            r_points: 300,
            gl_points: 8,
            cutoff_tolerance: 1e-6,
        }
    }
}

/// Largest stationary point of `t(s^3 + s) - rs`.
fn stationary_point(t: f64, r: f64) -> f64 {
    ((r / t - 1.0).max(0.0) / 3.0).sqrt()
}

/// Default cutoff radius: past the stationary point and far enough out
/// that `t s^3` oscillates many times across the transition.
pub fn default_cutoff(t: f64, r: f64) -> f64 {
    (2.0 * stationary_point(t, r) + 1.0)
        .max(2.0)
        .max(6.0 * t.powf(-1.0 / 3.0))
}

fn bump(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 below `s0`, 0 above `s1`.
fn cutoff_weight(s: f64, s0: f64, s1: f64) -> f64 {
    let x = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
    let a = bump(1.0 - x);
    a / (a + bump(x))
}

fn kernel_with_cutoff(t: f64, beta: f64, r: f64, cutoff: f64, rule: &GlRule) -> Result<Complex64> {
    let s_end = 1.6 * cutoff;
    let breaks = adaptive_breaks(0.0, s_end, |s| {
        std::f64::consts::PI / (t * (3.0 * s * s + 1.0) + r)
    });
    let integrand = |s: f64| {
        let w = cutoff_weight(s, cutoff, s_end);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let amp = s.powf(beta + 1.0) * libm::j0(r * s) * w;
        Complex64::from_polar(amp, t * (s * s * s + s))
    };
    // s^(beta + 1) is not smooth at the origin for fractional beta
    let first = gauss_kronrod(integrand, breaks[0], breaks[1], 1e-15, 1e-13)?.value;
    Ok(first + rule.integrate_panels(&breaks[1..], integrand))
}

fn check_args(t: f64, beta: f64, opts: &KernelOptions) -> Result<()> {
    if !(t >= opts.t_min) || !t.is_finite() {
        return Err(Error::Precondition(format!(
            "kernel time t = {t} is below t_min = {}",
            opts.t_min
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} must lie in [0, 1]")));
    }
    Ok(())
}

/// `K(r, t)` with the default cutoff.
pub fn kernel_value(t: f64, beta: f64, r: f64, opts: &KernelOptions) -> Result<Complex64> {
    check_args(t, beta, opts)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius {r} must be >= 0")));
    }
    let rule = GlRule::new(opts.gl_points);
    kernel_with_cutoff(t, beta, r, default_cutoff(t, r), &rule)
}

/// The sampled radii: uniform on `[0, r_max]`, with double density where
/// the stationary set reaches `s = 0` (`|r - t| <= 2 t^(1/3)`).
fn r_grid(t: f64, r_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let h = r_max / (n - 1) as f64;
    let window = 2.0 * t.cbrt();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let r = i as f64 * h;
        out.push(r);
        let mid = r + 0.5 * h;
        if i + 1 < n && (mid - t).abs() <= window {
            out.push(mid);
        }
    }
    out
}

/// Location and value of a sup over radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSup {
    pub r: f64,
    pub value: f64,
}

/// `sup_{0 <= r <= r_max} |K(r, t)|`, grid search plus golden-section
/// polishing around the best sample.
pub fn kernel_sup(t: f64, beta: f64, r_max: f64, opts: &KernelOptions) -> Result<KernelSup> {
    check_args(t, beta, opts)?;
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::Domain(format!("r_max = {r_max} must be positive")));
    }
    let rule = GlRule::new(opts.gl_points);
    let abs_k =
        |r: f64| kernel_with_cutoff(t, beta, r, default_cutoff(t, r), &rule).map(|k| k.norm());
    let radii = r_grid(t, r_max, opts.r_points);
    let values: Vec<f64> = radii.par_iter().map(|&r| abs_k(r)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
    let lo = radii[best.saturating_sub(1)];
    let hi = radii[(best + 1).min(radii.len() - 1)];
    let (mut r, mut value) = (radii[best], values[best]);
    let (pr, pv) = golden_max(&|r| abs_k(r).unwrap_or(0.0), lo, hi, 30);
    if pv > value {
        r = pr;
        value = pv;
    }

    let wider = kernel_with_cutoff(t, beta, r, 1.5 * default_cutoff(t, r), &rule)?.norm();
    if (wider - value).abs() > opts.cutoff_tolerance * value.max(1e-300) {
        return Err(Error::Quadrature(format!(
            "kernel at t = {t}, beta = {beta}, r = {r} moved from {value:.6e} to {wider:.6e} \
             when the cutoff grew by 1.5x"
        )));
    }
    Ok(KernelSup { r, value })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Default radial range for time `t`: `max(8t, 12 t^(1/3))`.
pub fn default_r_max(t: f64) -> f64 {
    (8.0 * t).max(12.0 * t.cbrt())
}

/// Power-law fit of the kernel sup against time.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFitReport {
    pub beta: f64,
    pub times: Vec<f64>,
    pub sup_values: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
}

impl DecayFitReport {
    /// `-(2 + beta) / 3`.
    pub fn expected_slope(&self) -> f64 {
        -(2.0 + self.beta) / 3.0
    }
}

/// Least-squares slope of `ln sup_r |K(r, t)|` against `ln t`.
pub fn decay_fit(beta: f64, t_grid: &[f64], opts: &KernelOptions) -> Result<DecayFitReport> {
    if t_grid.len() < 4 {
        return Err(Error::Precondition(format!(
            "decay fit needs at least 4 times, got {}",
            t_grid.len()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(
            "times must be strictly increasing".into(),
        ));
    }
    let sup_values = t_grid
        .iter()
        .map(|&t| kernel_sup(t, beta, default_r_max(t), opts).map(|s| s.value))
        .collect::<Result<Vec<_>>>()?;
    let fit = log_log_fit(t_grid, &sup_values)?;
    Ok(DecayFitReport {
        beta,
        times: t_grid.to_vec(),
        sup_values,
        fitted_slope: fit.slope,
        slope_stderr: fit.stderr,
    })
}
