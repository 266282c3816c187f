use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::reformulations::{reconstruct_from_w, undiagonalize, StateEtaPhi, StateW};

use super::nonlinear::rhs_etaphi;
use super::trajectory::Trajectory;

/// Fourth-order finite-difference weights (times `12 h`) for the time
/// derivative at slice `k` of `n + 1` slices, with the stencil start.
fn stencil(k: usize, n: usize) -> (usize, [f64; 5]) {
    const FORWARD0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const FORWARD1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    let flip = |w: [f64; 5]| {
        let mut r = [0.0; 5];
        for i in 0..5 {
            r[i] = -w[4 - i];
        }
        r
    };
    match k {
        0 => (0, FORWARD0),
        1 => (0, FORWARD1),
        _ if k == n => (n - 4, flip(FORWARD0)),
        _ if k + 1 == n => (n - 4, flip(FORWARD1)),
        _ => (k - 2, CENTRAL),
    }
}

fn time_derivative(fields: &[&Field], k: usize, h: f64) -> Field {
    let n = fields.len() - 1;
    let (start, w) = stencil(k, n);
    let mut out = Field::zeros(fields[0].grid(), crate::field::Representation::Fourier);
    for (i, c) in w.iter().enumerate() {
        if *c != 0.0 {
            out.axpy(
                Complex64::new(c / (12.0 * h), 0.0),
                &fields[start + i].to_fourier(),
            );
        }
    }
    out
}

/// Discrete-L2 size of `d_t (eta, Phi) - rhs` at every stored time.
///
/// The zero mode of the `Phi` residual is discarded: stored potentials are
/// mean-zero while `Phi_t` has mean `-<|grad Phi|^2>/2`, which only shifts
/// `Phi` by a function of time.
pub fn residual_original(traj: &Trajectory<StateEtaPhi>) -> Result<Vec<f64>> {
    let n = traj.len();
    if n < 5 {
        return Err(Error::Precondition(format!(
            "need at least 5 time slices for fourth-order differencing, got {n}"
        )));
    }
    let h = traj.dt();
    let etas: Vec<&Field> = traj.states().iter().map(|s| &s.eta).collect();
    let phis: Vec<&Field> = traj.states().iter().map(|s| &s.phi).collect();
    traj.states()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let (eta_rhs, phi_rhs) = rhs_etaphi(s)?;
            let r_eta = &time_derivative(&etas, k, h) - &eta_rhs;
            let r_phi = (&time_derivative(&phis, k, h) - &phi_rhs).project_mean_zero();
            Ok((r_eta.l2_norm().powi(2) + r_phi.l2_norm().powi(2)).sqrt())
        })
        .collect()
}

/// Maps a `w` trajectory to `(eta, Phi)` by reconstruction and
/// undiagonalization.
pub fn etaphi_trajectory(traj: &Trajectory<StateW>) -> Result<Trajectory<StateEtaPhi>> {
    traj.try_map(|w| undiagonalize(&reconstruct_from_w(w)?))
}
