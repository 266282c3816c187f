//! Integrating-factor RK4 for the diagonal and differentiated systems.
//!
//! Each component obeys `d_t z = s i phi(D) z + F(z)` with `s = -1` for the
//! `u` family (`w1`, `w2`) and `s = +1` for the `v` family (`w3`, `w4`).
//! The stepper integrates the interaction variable `exp(-s i t phi) z`
//! with classical RK4, so the linear flow is reproduced exactly.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::Grid;
use crate::reformulations::{State, StateUV, StateW};
use crate::spectral::{phi_symbol, Branch};

use super::nonlinear::{rhs_uv, rhs_w};

/// A semilinear system with diagonal dispersive linear part.
pub trait Dynamics: Sync {
    type S: State;

    /// Linear group branch of each component.
    fn branches(&self) -> &'static [Branch];

    /// Nonlinear part of the right-hand side, in Fourier representation.
    fn nonlinear(&self, s: &Self::S) -> Result<Self::S>;

    fn name(&self) -> &'static str;
}

/// The four-field system for `w = grad(u), grad(v)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WSystem {
    /// Drop the nonlinearity (linear flow only).
    pub linear_only: bool,
}

/// The diagonal `(u, v)` system.
#[derive(Debug, Clone, Copy, Default)]
pub struct UvSystem {
    pub linear_only: bool,
}

const W_BRANCHES: [Branch; 4] = [Branch::Minus, Branch::Minus, Branch::Plus, Branch::Plus];
const UV_BRANCHES: [Branch; 2] = [Branch::Minus, Branch::Plus];

impl Dynamics for WSystem {
    type S = StateW;

    fn branches(&self) -> &'static [Branch] {
        &W_BRANCHES
    }

    fn nonlinear(&self, s: &StateW) -> Result<StateW> {
        if self.linear_only {
            return Ok(StateW::zeros(s.grid()));
        }
        Ok(StateW { w: rhs_w(s)? })
    }

    fn name(&self) -> &'static str {
        if self.linear_only {
            "ifrk4-w-linear"
        } else {
            "ifrk4-w"
        }
    }
}

impl Dynamics for UvSystem {
    type S = StateUV;

    fn branches(&self) -> &'static [Branch] {
        &UV_BRANCHES
    }

    fn nonlinear(&self, s: &StateUV) -> Result<StateUV> {
        if self.linear_only {
            return Ok(StateUV::zeros(s.grid()));
        }
        let (u, v) = rhs_uv(s)?;
        Ok(StateUV { u, v })
    }

    fn name(&self) -> &'static str {
        if self.linear_only {
            "ifrk4-uv-linear"
        } else {
            "ifrk4-uv"
        }
    }
}

/// Tabulated `exp(s i phi tau)` for one branch.
pub(crate) fn phase_table(grid: &Grid, branch: Branch, tau: f64) -> Vec<Complex64> {
    grid.kabs()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, branch.sign() * tau * phi_symbol(k)))
        .collect()
}

/// Applies the linear group for time `tau` to every component.
pub(crate) fn linear_flow<S: State>(s: &S, branches: &[Branch], tables: &[Vec<Complex64>]) -> S {
    let mut out = s.map_fields(|f| f.to_fourier());
    for (f, (b, _)) in out.fields_mut().into_iter().zip(branches.iter().zip(0..)) {
        let t = &tables[table_index(*b)];
        for (z, e) in f.data_mut().iter_mut().zip(t) {
            *z *= e;
        }
    }
    out
}

fn table_index(b: Branch) -> usize {
    match b {
        Branch::Minus => 0,
        Branch::Plus => 1,
    }
}

/// One fixed-step integrating-factor RK4 integrator.
pub struct IfRk4<'a, D: Dynamics> {
    system: &'a D,
    dt: f64,
    half: [Vec<Complex64>; 2],
    full: [Vec<Complex64>; 2],
}

impl<'a, D: Dynamics> IfRk4<'a, D> {
    pub fn new(system: &'a D, grid: &Grid, dt: f64) -> Self {
        Self {
            system,
            dt,
            half: [
                phase_table(grid, Branch::Minus, 0.5 * dt),
                phase_table(grid, Branch::Plus, 0.5 * dt),
            ],
            full: [
                phase_table(grid, Branch::Minus, dt),
                phase_table(grid, Branch::Plus, dt),
            ],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn e_half(&self, s: &D::S) -> D::S {
        linear_flow(s, self.system.branches(), &self.half)
    }

    fn e_full(&self, s: &D::S) -> D::S {
        linear_flow(s, self.system.branches(), &self.full)
    }

    /// Advances `s` by one step of size `dt`.
    pub fn step(&self, s: &D::S) -> Result<D::S> {
        let dt = self.dt;
        let s = s.map_fields(|f| f.to_fourier());
        let k1 = self.system.nonlinear(&s)?;
        let a = self.e_half(&axpy(&s, 0.5 * dt, &k1));
        let k2 = self.system.nonlinear(&a)?;
        let e_s = self.e_half(&s);
        let b = axpy(&e_s, 0.5 * dt, &k2);
        let k3 = self.system.nonlinear(&b)?;
        let e2_s = self.e_full(&s);
        let c = axpy(&e2_s, dt, &self.e_half(&k3));
        let k4 = self.system.nonlinear(&c)?;

        // E^2 s + dt/6 (E^2 k1 + 2 E (k2 + k3) + k4)
        let mut acc = self.e_full(&k1);
        let mid = self.e_half(&axpy(&k2, 1.0, &k3));
        acc = axpy(&acc, 2.0, &mid);
        acc = axpy(&acc, 1.0, &k4);
        Ok(axpy(&e2_s, dt / 6.0, &acc))
    }
}

/// `x + a y`, componentwise.
pub(crate) fn axpy<S: State>(x: &S, a: f64, y: &S) -> S {
    let mut out = x.clone();
    for (f, g) in out.fields_mut().into_iter().zip(y.fields()) {
        f.axpy(Complex64::new(a, 0.0), g);
    }
    out
}

/// One IF-RK4 step of the differentiated system.
pub fn step_ifrk4(s: &StateW, dt: f64) -> Result<StateW> {
    if !(dt > 0.0) {
        return Err(crate::Error::Domain(format!("dt = {dt} must be positive")));
    }
    let sys = WSystem::default();
    IfRk4::new(&sys, s.grid(), dt).step(s)
}

/// Applies the exact linear flow of `system` for time `t`.
pub fn linear_solution<D: Dynamics>(system: &D, s: &D::S, t: f64) -> D::S {
    let grid = s.grid().clone();
    let tables = [
        phase_table(&grid, Branch::Minus, t),
        phase_table(&grid, Branch::Plus, t),
    ];
    linear_flow(s, system.branches(), &tables)
}
