//! Duhamel fixed-point iteration for the differentiated system.
//!
//! Iterates are stored on `nt + 1` uniform slices. In the interaction
//! picture `y(t) = U(-t) w(t)` the map reads
//! `y(t) = w0 + int_0^t U(-s) F(U(s) y(s)) ds`, and the integral is
//! accumulated slice by slice with Simpson-type weights.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::reformulations::{State, StateW};
use crate::spectral::Branch;

use super::stepper::{linear_flow, phase_table, Dynamics, WSystem};
use super::trajectory::{Trajectory, TrajectoryMeta};
use super::{require_closed, step_count};

/// Outcome of a fixed-point solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub iterate_count: usize,
    /// Sup-over-time L2 distance between consecutive iterates.
    pub successive_diffs: Vec<f64>,
    pub converged: bool,
    /// Ratio of the last two successive differences.
    pub contraction_ratio_estimate: f64,
}

impl PicardReport {
    fn new(diffs: Vec<f64>, converged: bool) -> Self {
        let n = diffs.len();
        let ratio = if n >= 2 && diffs[n - 2] > 0.0 {
            diffs[n - 1] / diffs[n - 2]
        } else {
            0.0
        };
        Self {
            iterate_count: n,
            successive_diffs: diffs,
            converged,
            contraction_ratio_estimate: ratio,
        }
    }
}

/// Running integrals `I_j = int_0^{t_j} f` of uniformly sampled `f`.
///
/// Even slices use composite Simpson; odd slices past the first finish
/// with the 3/8 rule on the last three intervals. The first slice uses
/// the quadratic interpolant through `f_0, f_1, f_2`.
pub(crate) fn cumulative_simpson<S: State>(f: &[S], h: f64) -> Vec<S> {
    let n = f.len();
    let grid = f[0].grid().clone();
    let mut out: Vec<S> = Vec::with_capacity(n);
    out.push(S::zeros(&grid));
    let comb = |base: Option<&S>, terms: &[(f64, &S)]| {
        let mut acc = match base {
            Some(b) => b.clone(),
            None => S::zeros(&grid),
        };
        for (c, s) in terms {
            for (a, x) in acc.fields_mut().into_iter().zip(s.fields()) {
                a.axpy(Complex64::new(*c, 0.0), x);
            }
        }
        acc
    };
    for j in 1..n {
        let next = if j % 2 == 0 {
            let w = h / 3.0;
            comb(
                Some(&out[j - 2]),
                &[(w, &f[j - 2]), (4.0 * w, &f[j - 1]), (w, &f[j])],
            )
        } else if j == 1 {
            let w = h / 12.0;
            comb(None, &[(5.0 * w, &f[0]), (8.0 * w, &f[1]), (-w, &f[2])])
        } else {
            let w = 3.0 * h / 8.0;
            comb(
                Some(&out[j - 3]),
                &[
                    (w, &f[j - 3]),
                    (3.0 * w, &f[j - 2]),
                    (3.0 * w, &f[j - 1]),
                    (w, &f[j]),
                ],
            )
        };
        out.push(next);
    }
    out
}

/// Fixed-point solve of the differentiated system on `[0, T]` with `nt`
/// (even) time intervals.
pub fn picard_solve(
    w0: &StateW,
    t_final: f64,
    nt: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Trajectory<StateW>, PicardReport)> {
    picard_solve_with(&WSystem::default(), w0, t_final, nt, max_iter, tol)
}

pub fn picard_solve_with(
    system: &WSystem,
    w0: &StateW,
    t_final: f64,
    nt: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Trajectory<StateW>, PicardReport)> {
    if nt < 2 || !nt.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "nt = {nt} must be even and at least 2"
        )));
    }
    if max_iter == 0 {
        return Err(Error::Domain("max_iter must be positive".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tol = {tol} must be non-negative")));
    }
    let h = t_final / nt as f64;
    step_count(t_final, h)?;
    require_closed(w0)?;

    let grid = w0.grid().clone();
    let w0 = w0.map_fields(|f| f.to_fourier());
    let branches = system.branches();
    let times: Vec<f64> = (0..=nt).map(|j| j as f64 * h).collect();
    let tables = |t: f64| {
        [
            phase_table(&grid, Branch::Minus, t),
            phase_table(&grid, Branch::Plus, t),
        ]
    };
    let forward: Vec<_> = times.iter().map(|&t| tables(t)).collect();
    let backward: Vec<_> = times.iter().map(|&t| tables(-t)).collect();

    let mut current: Vec<StateW> = forward
        .iter()
        .map(|e| linear_flow(&w0, branches, e))
        .collect();
    let mut diffs = Vec::new();
    let mut converged = false;

    for _ in 0..max_iter {
        let integrand = current
            .par_iter()
            .zip(backward.par_iter())
            .map(|(w, back)| Ok(linear_flow(&system.nonlinear(w)?, branches, back)))
            .collect::<Result<Vec<_>>>()?;
        let integral = cumulative_simpson(&integrand, h);
        let next: Vec<StateW> = integral
            .iter()
            .zip(&forward)
            .map(|(i, fwd)| {
                let mut y = w0.clone();
                for (a, b) in y.w.iter_mut().zip(&i.w) {
                    *a += b;
                }
                linear_flow(&y, branches, fwd)
            })
            .collect();
        if let Some(j) = next.iter().position(|s| !s.is_finite()) {
            return Err(Error::BlowUp {
                time: times[j],
                last_healthy: if j == 0 { 0.0 } else { times[j - 1] },
            });
        }
        let diff = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.l2_distance(b))
            .fold(0.0, f64::max);
        diffs.push(diff);
        current = next;
        if diff <= tol {
            converged = true;
            break;
        }
    }

    let report = PicardReport::new(diffs, converged);
    if !converged {
        return Err(Error::NonConvergence(Box::new(report)));
    }
    let meta = TrajectoryMeta {
        stepper: "picard-simpson".into(),
        dt: h,
        dealias_fraction: grid.spec().dealias_fraction,
    };
    Ok((Trajectory::new(times, current, meta)?, report))
}
