//! Time evolution: right-hand sides, the integrating-factor stepper, the
//! Duhamel fixed-point solver and the residual check on the original system.

mod nonlinear;
mod picard;
mod residual;
mod stepper;
mod trajectory;

pub use nonlinear::{nonlinearity_uv, rhs_etaphi, rhs_uv, rhs_w};
pub use picard::{picard_solve, picard_solve_with, PicardReport};
pub use residual::{etaphi_trajectory, residual_original};
pub use stepper::{linear_solution, step_ifrk4, Dynamics, IfRk4, UvSystem, WSystem};
pub use trajectory::{Monitor, Trajectory, TrajectoryMeta};

use crate::error::{Error, Result};
use crate::reformulations::{
    curl_residual, reconstruct_from_w, undiagonalize, State, StateW, CLOSEDNESS_TOLERANCE,
};

/// Number of steps of size `dt` covering `[0, T]`, requiring `dt | T`.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::Domain(format!(
            "final time {t_final} must be positive"
        )));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt = {dt} must be positive")));
    }
    let n = (t_final / dt).round();
    if n < 1.0 || (n * dt - t_final).abs() > 1e-9 * t_final {
        return Err(Error::Domain(format!(
            "dt = {dt} does not divide T = {t_final}"
        )));
    }
    Ok(n as usize)
}

pub(crate) fn require_closed(w: &StateW) -> Result<()> {
    let (a, b) = curl_residual(w);
    let residual = a.max(b);
    let tolerance = CLOSEDNESS_TOLERANCE * w.l2_norm().max(1.0);
    if residual > tolerance {
        return Err(Error::NotClosed {
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// Curl, reality and conjugation monitors of one `w` state.
pub fn monitor(time: f64, w: &StateW) -> Result<Monitor> {
    let (curl_u, curl_v) = curl_residual(w);
    let etaphi = undiagonalize(&reconstruct_from_w(w)?)?;
    Ok(Monitor {
        time,
        curl_u,
        curl_v,
        reality_defect: etaphi.reality_defect(),
        conjugation_defect: w.conjugation_defect(),
        l2_norm: w.l2_norm(),
    })
}

/// Integrates `system` from `s0` over `[0, T]` with fixed step `dt`,
/// storing every step.
pub fn simulate_system<D: Dynamics>(
    system: &D,
    s0: &D::S,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory<D::S>> {
    let n = step_count(t_final, dt)?;
    let stepper = IfRk4::new(system, s0.grid(), dt);
    let mut states = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    states.push(s0.map_fields(|f| f.to_fourier()));
    times.push(0.0);
    for i in 1..=n {
        let next = stepper.step(&states[i - 1])?;
        let t = i as f64 * dt;
        if !next.is_finite() {
            return Err(Error::BlowUp {
                time: t,
                last_healthy: times[i - 1],
            });
        }
        states.push(next);
        times.push(t);
    }
    let meta = TrajectoryMeta {
        stepper: system.name().to_string(),
        dt,
        dealias_fraction: s0.grid().spec().dealias_fraction,
    };
    Trajectory::new(times, states, meta)
}

/// Evolves the differentiated system from closed data `w0` up to `T`.
pub fn simulate(w0: &StateW, t_final: f64, dt: f64) -> Result<Trajectory<StateW>> {
    simulate_with(&WSystem::default(), w0, t_final, dt)
}

/// [`simulate`] with an explicit system, e.g. the linear-only hook.
pub fn simulate_with(
    system: &WSystem,
    w0: &StateW,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory<StateW>> {
    require_closed(w0)?;
    let mut traj = simulate_system(system, w0, t_final, dt)?;
    traj.monitors = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, w)| monitor(t, w))
        .collect::<Result<_>>()?;
    Ok(traj)
}
