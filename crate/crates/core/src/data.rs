//! Initial data: Gaussian bumps, finite mode sums and seeded random
//! ensembles.
//!
//! Random data is driven by SplitMix64 (64-bit state) so a seed reproduces
//! the same fields on any platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::field::{Field, Representation};
use crate::grid::Grid;
use crate::reformulations::{diagonalize, differentiate_to_w, StateEtaPhi, StateW};

/// The portable seeded generator used for every random ensemble.
pub type DataRng = SplitMix64;

pub fn rng_from_seed(seed: u64) -> DataRng {
    SplitMix64::seed_from_u64(seed)
}

/// Periodic Gaussian bump in both `eta` and `Phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub center: (f64, f64),
    pub width: f64,
    pub amplitude: f64,
}

/// One cosine mode `amplitude * cos(k . x + phase)` of `eta` or `Phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerm {
    pub jx: i64,
    pub jy: i64,
    pub eta: f64,
    pub phi: f64,
    pub phase: f64,
}

/// Displacement from `c` to `x` on a circle of length `l`, in `[-l/2, l/2)`.
fn wrap(x: f64, c: f64, l: f64) -> f64 {
    (x - c + 0.5 * l).rem_euclid(l) - 0.5 * l
}

impl Gaussian {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Domain(format!(
                "gaussian needs positive width and finite amplitude, got {self:?}"
            )));
        }
        Ok(())
    }

    /// The bump as a real field, with its mean removed.
    pub fn field(&self, grid: &Grid) -> Field {
        let spec = *grid.spec();
        let g = *self;
        Field::from_real_fn(grid, move |x, y| {
            let dx = wrap(x, g.center.0, spec.lx);
            let dy = wrap(y, g.center.1, spec.ly);
            g.amplitude * (-(dx * dx + dy * dy) / (2.0 * g.width * g.width)).exp()
        })
        .project_mean_zero()
    }

    pub fn etaphi(&self, grid: &Grid) -> Result<StateEtaPhi> {
        self.validate()?;
        let f = self.field(grid);
        Ok(StateEtaPhi {
            eta: f.clone(),
            phi: f,
        })
    }
}

/// Real `(eta, Phi)` built from a list of cosine modes.
pub fn mode_sum(grid: &Grid, terms: &[ModeTerm]) -> StateEtaPhi {
    let spec = *grid.spec();
    let tau = std::f64::consts::TAU;
    let wave = |t: &ModeTerm, x: f64, y: f64| {
        let kx = tau * t.jx as f64 / spec.lx;
        let ky = tau * t.jy as f64 / spec.ly;
        (kx * x + ky * y + t.phase).cos()
    };
    let build = |pick: fn(&ModeTerm) -> f64| {
        Field::from_real_fn(grid, |x, y| {
            terms.iter().map(|t| pick(t) * wave(t, x, y)).sum()
        })
        .project_mean_zero()
    };
    StateEtaPhi {
        eta: build(|t| t.eta),
        phi: build(|t| t.phi),
    }
}

/// `w` data obtained from real `(eta, Phi)`.
pub fn w_from_etaphi(s: &StateEtaPhi) -> Result<StateW> {
    differentiate_to_w(&diagonalize(s)?)
}

/// Random real mean-zero field with Gaussian Fourier coefficients on
/// `0 < |j| <= jmax` (indices in grid units), weighted by `(1 + |j|^2)^-1`.
pub fn random_real_field(grid: &Grid, rng: &mut DataRng, jmax: f64) -> Field {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let jx = crate::grid::GridSpec::signed_index(ix, nx) as f64;
            let jy = crate::grid::GridSpec::signed_index(iy, ny) as f64;
            let j2 = jx * jx + jy * jy;
            // draw for every mode so the stream does not depend on jmax
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            if j2 > 0.0 && j2 <= jmax * jmax {
                data[iy * nx + ix] = Complex64::new(re, im) / (1.0 + j2);
            }
        }
    }
    let f = Field::from_data(grid, Representation::Fourier, data).expect("grid-sized buffer");
    let real = f.to_physical().map(|z| Complex64::new(z.re, 0.0));
    let n = real.l2_norm();
    let real = if n > 0.0 {
        real.scaled(Complex64::new(1.0 / n, 0.0))
    } else {
        real
    };
    real.into_fourier().project_mean_zero()
}

/// Random real mean-zero `(eta, Phi)` with unit-size components.
pub fn random_etaphi(grid: &Grid, rng: &mut DataRng, jmax: f64) -> StateEtaPhi {
    StateEtaPhi {
        eta: random_real_field(grid, rng, jmax),
        phi: random_real_field(grid, rng, jmax),
    }
}

/// Sum of one to three modulated Gaussian packets placed in the middle of
/// the box, with complex normal amplitudes.
pub fn random_wave_packets(grid: &Grid, rng: &mut DataRng) -> Field {
    let spec = *grid.spec();
    let count = rng.random_range(1..=3);
    let packets: Vec<_> = (0..count)
        .map(|_| {
            let cx = rng.random_range(0.3 * spec.lx..0.7 * spec.lx);
            let cy = rng.random_range(0.3 * spec.ly..0.7 * spec.ly);
            let width = rng.random_range(1.0..2.0);
            let k = rng.random_range(0.0..1.5);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (cx, cy, width, k, theta, Complex64::new(re, im))
        })
        .collect();
    Field::from_fn(grid, |x, y| {
        packets
            .iter()
            .map(|&(cx, cy, w, k, th, a)| {
                let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                let phase = k * (th.cos() * x + th.sin() * y);
                a * (-r2 / (2.0 * w * w)).exp() * Complex64::from_polar(1.0, phase)
            })
            .sum()
    })
}
