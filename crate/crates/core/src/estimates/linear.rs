//! Ratio experiments for the linear group `U(t) = exp(i t phi(D))` on the
//! grid. Slices are generated one at a time and reduced on the fly.

use num_complex::Complex64;

use crate::dynamics::step_count;
use crate::error::{Error, Result};
use crate::field::{Field, Representation};
use crate::norms::{sobolev_norm, CubeEnergy, CubeSup};
use crate::spectral::phi_symbol;

/// Phases are advanced by multiplication and recomputed exactly every
/// `RESYNC` slices.
const RESYNC: usize = 32;

/// Calls `visit(t, D^order U(t) w0)` on `t = 0, dt, ..., T`, with the slice
/// in physical representation.
fn linear_slices(
    w0: &Field,
    order: f64,
    t_final: f64,
    dt: f64,
    mut visit: impl FnMut(f64, &Field),
) -> Result<()> {
    let n = step_count(t_final, dt)?;
    let spectrum = crate::spectral::fractional_derivative(&w0.to_fourier(), order)?;
    let grid = spectrum.grid().clone();
    let phi: Vec<f64> = grid.kabs().iter().map(|&k| phi_symbol(k)).collect();
    let advance: Vec<Complex64> = phi
        .iter()
        .map(|p| Complex64::from_polar(1.0, dt * p))
        .collect();
    let mut phase = vec![Complex64::new(1.0, 0.0); phi.len()];
    for i in 0..=n {
        let t = i as f64 * dt;
        if i % RESYNC == 0 {
            for (z, p) in phase.iter_mut().zip(&phi) {
                *z = Complex64::from_polar(1.0, t * p);
            }
        } else {
            for (z, a) in phase.iter_mut().zip(&advance) {
                *z *= a;
            }
        }
        let data = spectrum
            .data()
            .iter()
            .zip(&phase)
            .map(|(c, z)| c * z)
            .collect();
        let slice = Field::from_data(&grid, Representation::Fourier, data)?;
        visit(t, &slice.into_physical());
    }
    Ok(())
}

fn data_norm(w0: &Field) -> Result<f64> {
    let n = w0.l2_norm();
    if n == 0.0 {
        return Err(Error::Precondition("ratio undefined for zero data".into()));
    }
    Ok(n)
}

/// Strichartz exponent `q = 3 / (1 + delta)`.
pub fn strichartz_exponent(delta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::Domain(format!(
            "delta = {delta} must lie in [0, 1/2)"
        )));
    }
    Ok(3.0 / (1.0 + delta))
}

/// `|| D^delta U w0 ||_{L^q_T L^inf_x} / ||w0||_2` with `q = 3 / (1 + delta)`.
pub fn strichartz_ratio(w0: &Field, delta: f64, t_final: f64, dt: f64) -> Result<f64> {
    let q = strichartz_exponent(delta)?;
    let norm = data_norm(w0)?;
    let mut sups = Vec::new();
    linear_slices(w0, delta, t_final, dt, |_, g| sups.push(g.max_abs()))?;
    let last = sups.len() - 1;
    let terms: Vec<f64> = sups
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let w = if i == 0 || i == last { 0.5 * dt } else { dt };
            w * s.powf(q)
        })
        .collect();
    Ok(crate::field::pairwise_sum(&terms).powf(1.0 / q) / norm)
}

/// Local smoothing ratio `sup_cube ||D U w0||_{L^2(cube x [0, T])} / ||w0||_2`.
pub fn smoothing_ratio(w0: &Field, t_final: f64, dt: f64) -> Result<f64> {
    let norm = data_norm(w0)?;
    let mut acc = CubeEnergy::new(w0.spec())?;
    linear_slices(w0, 1.0, t_final, dt, |t, g| acc.push(t, g))?;
    Ok(acc.sup_root() / norm)
}

/// Maximal ratio `maximal_norm(U w0) / ((1 + T^(1/4)) ||w0||_{H^s})`, `s > 3/2`.
pub fn maximal_ratio(w0: &Field, s: f64, t_final: f64, dt: f64) -> Result<f64> {
    if !(s > 1.5) {
        return Err(Error::Domain(format!(
            "maximal estimate needs s > 3/2, got {s}"
        )));
    }
    data_norm(w0)?;
    let mut acc = CubeSup::new(w0.spec())?;
    linear_slices(w0, 0.0, t_final, dt, |_, g| acc.push(g))?;
    Ok(acc.l2_of_sups() / ((1.0 + t_final.powf(0.25)) * sobolev_norm(w0, s)))
}
