//! Norm functionals on fields and on scalar trajectories.
//!
//! Space integrals are cell-weighted Riemann sums, time integrals use the
//! trapezoid rule on the stored slices, and every `sup`/`L^inf` is a max
//! over grid points and stored times.

use std::borrow::Cow;
use std::fmt;

use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, pairwise_sum_by, Field, Representation};
use crate::grid::GridSpec;
use crate::spectral::{apply_multiplier, Axis, Symbol};

/// Integrability exponent of a Lebesgue norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// `f64::INFINITY` maps to [`Exponent::Infinity`]; exponents below 1
    /// are rejected.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::Domain(format!("Lebesgue exponent {p} must be >= 1")))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Which integral of a mixed norm is taken last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    TimeOuter,
    SpaceOuter,
}

/// Regularity `s` with the derived `m = s - 1`, `delta = 2 - s` and the
/// Strichartz exponent `q_delta = 3 / (1 + delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevIndices {
    pub s: f64,
    pub m: f64,
    pub delta: f64,
    pub q_delta: f64,
}

impl SobolevIndices {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 1.5 && s < 2.0) {
            return Err(Error::Domain(format!(
                "regularity s = {s} must lie in (3/2, 2)"
            )));
        }
        let delta = 2.0 - s;
        Ok(Self {
            s,
            m: s - 1.0,
            delta,
            q_delta: 3.0 / (1.0 + delta),
        })
    }
}

/// Partition of the box into unit squares.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeMesh {
    cols: usize,
    rows: usize,
    cube_of: Vec<usize>,
    /// Grid indices grouped by cube; cube `c` owns `members[starts[c]..starts[c + 1]]`.
    members: Vec<usize>,
    starts: Vec<usize>,
}

impl CubeMesh {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        if !spec.has_integer_sides() {
            return Err(Error::Mesh(format!(
                "box {} x {} is not tiled by unit cubes",
                spec.lx, spec.ly
            )));
        }
        let cols = spec.lx.round() as usize;
        let rows = spec.ly.round() as usize;
        let mut cube_of = Vec::with_capacity(spec.len());
        for iy in 0..spec.ny {
            let row = iy * rows / spec.ny;
            for ix in 0..spec.nx {
                cube_of.push(row * cols + ix * cols / spec.nx);
            }
        }
        let mut starts = vec![0; cols * rows + 1];
        for &c in &cube_of {
            starts[c + 1] += 1;
        }
        for c in 0..cols * rows {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut members = vec![0; cube_of.len()];
        for (idx, &c) in cube_of.iter().enumerate() {
            members[fill[c]] = idx;
            fill[c] += 1;
        }
        Ok(Self {
            cols,
            rows,
            cube_of,
            members,
            starts,
        })
    }

    pub fn count(&self) -> usize {
        self.cols * self.rows
    }

    /// Cube index `row * cols + col` of grid point `idx`.
    pub fn cube_of(&self, idx: usize) -> usize {
        self.cube_of[idx]
    }

    /// Grid indices inside cube `c`, in storage order.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[self.starts[c]..self.starts[c + 1]]
    }

    /// Integer corner `(col, row)` of cube `c`.
    pub fn corner(&self, c: usize) -> (usize, usize) {
        (c % self.cols, c / self.cols)
    }
}

/// `(sum (1 + |xi|^2)^s |f^(xi)|^2 cell)^(1/2)`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    let g = f.to_fourier();
    let grid = g.grid().clone();
    let weighted: Vec<f64> = g
        .data()
        .iter()
        .zip(grid.kabs())
        .map(|(z, k)| (1.0 + k * k).powf(s) * z.norm_sqr())
        .collect();
    (grid.cell() * pairwise_sum(&weighted)).sqrt()
}

/// `|| D f ||_{H^(s-1)}` for mean-zero `f`.
pub fn vs_norm(f: &Field, s: f64) -> Result<f64> {
    if !f.is_mean_zero() {
        return Err(Error::Precondition(format!(
            "V^s norm needs a mean-zero field, mean is {:.3e}",
            f.mean()
        )));
    }
    let g = f.to_fourier();
    let grid = g.grid().clone();
    let weighted: Vec<f64> = g
        .data()
        .iter()
        .zip(grid.kabs())
        .map(|(z, k)| k * k * (1.0 + k * k).powf(s - 1.0) * z.norm_sqr())
        .collect();
    Ok((grid.cell() * pairwise_sum(&weighted)).sqrt())
}

/// Trapezoid weights on the stored times.
fn time_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = times[i] - times[i - 1];
        w[i - 1] += 0.5 * h;
        w[i] += 0.5 * h;
    }
    w
}

fn lebesgue(values: &[f64], weights: impl Fn(usize) -> f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => values.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let terms: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(i, v)| weights(i) * v.powf(p))
                .collect();
            pairwise_sum(&terms).powf(1.0 / p)
        }
    }
}

/// Moduli of the physical samples of `f` after the optional multiplier.
fn moduli(f: &Field, op: Option<&Symbol>) -> Result<Vec<f64>> {
    let g = match op {
        Some(m) => apply_multiplier(f, m, Representation::Physical)?,
        None => f.to_physical(),
    };
    Ok(g.data().iter().map(|z| z.norm()).collect())
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn physical(g: &Field) -> Cow<'_, Field> {
    match g.repr() {
        Representation::Physical => Cow::Borrowed(g),
        Representation::Fourier => Cow::Owned(g.to_physical()),
    }
}

/// Streaming `int_0^T int_cube |g|^2` for every unit cube, fed one time
/// slice at a time (trapezoid in time).
#[derive(Debug, Clone)]
pub struct CubeEnergy {
    mesh: CubeMesh,
    cell: f64,
    totals: Vec<Compensated>,
    previous: Option<(f64, Vec<f64>)>,
}

impl CubeEnergy {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let mesh = CubeMesh::new(spec)?;
        Ok(Self {
            totals: vec![Compensated::default(); mesh.count()],
            cell: spec.cell(),
            mesh,
            previous: None,
        })
    }

    /// Adds the slice `g` at time `t`; times must increase.
    pub fn push(&mut self, t: f64, g: &Field) {
        let g = physical(g);
        let data = g.data();
        let energy: Vec<f64> = (0..self.mesh.count())
            .map(|c| self.cell * pairwise_sum_by(self.mesh.members(c), |&i| data[i].norm_sqr()))
            .collect();
        if let Some((t0, e0)) = &self.previous {
            let h = 0.5 * (t - t0);
            for ((tot, a), b) in self.totals.iter_mut().zip(e0).zip(&energy) {
                tot.add(h * (a + b));
            }
        }
        self.previous = Some((t, energy));
    }

    /// Square root of the largest cube total.
    pub fn sup_root(&self) -> f64 {
        self.totals
            .iter()
            .map(|c| c.value().max(0.0).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Streaming per-cube `sup |g|` over slices and grid points.
#[derive(Debug, Clone)]
pub struct CubeSup {
    mesh: CubeMesh,
    sup: Vec<f64>,
}

impl CubeSup {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let mesh = CubeMesh::new(spec)?;
        Ok(Self {
            sup: vec![0.0; mesh.count()],
            mesh,
        })
    }

    pub fn push(&mut self, g: &Field) {
        let g = physical(g);
        for (idx, z) in g.data().iter().enumerate() {
            let c = self.mesh.cube_of(idx);
            self.sup[c] = self.sup[c].max(z.norm());
        }
    }

    /// `(sum_cubes sup^2)^(1/2)`.
    pub fn l2_of_sups(&self) -> f64 {
        pairwise_sum_by(&self.sup, |v| v * v).sqrt()
    }
}

/// `L^q_T L^p_x` norm (time exponent `q`, space exponent `p`) with the
/// integrals nested as `order` says.
pub fn mixed_norm(traj: &Trajectory<Field>, q: Exponent, p: Exponent, order: NormOrder) -> f64 {
    mixed_of(traj, None, q, p, order).expect("no multiplier")
}

fn mixed_of(
    traj: &Trajectory<Field>,
    op: Option<&Symbol>,
    q: Exponent,
    p: Exponent,
    order: NormOrder,
) -> Result<f64> {
    let cell = traj.grid().cell();
    let tw = time_weights(traj.times());
    match order {
        NormOrder::TimeOuter => {
            let inner = traj
                .states()
                .par_iter()
                .map(|f| Ok(lebesgue(&moduli(f, op)?, |_| cell, p)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(lebesgue(&inner, |i| tw[i], q))
        }
        NormOrder::SpaceOuter => {
            let slices = traj
                .states()
                .par_iter()
                .map(|f| moduli(f, op))
                .collect::<Result<Vec<_>>>()?;
            let inner: Vec<f64> = (0..slices[0].len())
                .map(|x| {
                    let column: Vec<f64> = slices.iter().map(|s| s[x]).collect();
                    lebesgue(&column, |i| tw[i], q)
                })
                .collect();
            Ok(lebesgue(&inner, |_| cell, p))
        }
    }
}

fn strichartz_type(traj: &Trajectory<Field>, op: &Symbol, q: Exponent) -> Result<f64> {
    mixed_of(traj, Some(op), q, Exponent::Infinity, NormOrder::TimeOuter)
}

/// `sup_cube ( int_0^T int_cube |g|^2 )^(1/2)` of the slices `g = op f`.
fn cube_l2_sup(traj: &Trajectory<Field>, op: &Symbol) -> Result<f64> {
    let mut acc = CubeEnergy::new(traj.grid())?;
    for (t, f) in traj.times().iter().zip(traj.states()) {
        acc.push(*t, &apply_multiplier(f, op, Representation::Physical)?);
    }
    Ok(acc.sup_root())
}

/// Local smoothing functional: the largest space-time L2 norm of `D f`
/// over unit cubes times `[0, T]`.
pub fn cube_smoothing_norm(traj: &Trajectory<Field>) -> Result<f64> {
    cube_l2_sup(traj, &Symbol::abs_pow(1.0))
}

/// Maximal-function functional: l2 over unit cubes of `sup |f|` on each
/// cube times `[0, T]`.
pub fn maximal_norm(traj: &Trajectory<Field>) -> Result<f64> {
    let mut acc = CubeSup::new(traj.grid())?;
    for f in traj.states() {
        acc.push(f);
    }
    Ok(acc.l2_of_sups())
}

/// `op` and its Riesz copies `op R_1`, `op R_2`.
fn with_riesz(ops: Vec<Symbol>) -> Vec<Symbol> {
    let mut out = ops.clone();
    for axis in Axis::BOTH {
        out.extend(ops.iter().map(|o| o.then(&Symbol::riesz(axis))));
    }
    out
}

fn grad_ops(base: &Symbol) -> Vec<Symbol> {
    Axis::BOTH
        .iter()
        .map(|&a| Symbol::partial(a).then(base))
        .collect()
}

/// Contraction functional `j` (1 to 5) of a scalar trajectory.
pub fn omega(traj: &Trajectory<Field>, idx: &SobolevIndices, j: usize) -> Result<f64> {
    let sum = |vals: Vec<f64>| pairwise_sum(&vals);
    match j {
        1 => Ok(traj
            .states()
            .iter()
            .map(|f| sobolev_norm(f, idx.s))
            .fold(0.0, f64::max)),
        2 => {
            let mut ops = vec![Symbol::identity()];
            ops.extend(grad_ops(&Symbol::identity()));
            ops.push(Symbol::abs_pow(1.0));
            let q = Exponent::Finite(3.0);
            with_riesz(ops)
                .iter()
                .map(|o| strichartz_type(traj, o, q))
                .collect::<Result<Vec<_>>>()
                .map(sum)
        }
        3 => {
            let q = Exponent::new(idx.q_delta)?;
            with_riesz(grad_ops(&Symbol::abs_pow(1.0)))
                .iter()
                .map(|o| strichartz_type(traj, o, q))
                .collect::<Result<Vec<_>>>()
                .map(sum)
        }
        4 => with_riesz(grad_ops(&Symbol::abs_pow(1.0 + idx.m)))
            .iter()
            .map(|o| cube_l2_sup(traj, o))
            .collect::<Result<Vec<_>>>()
            .map(sum),
        5 => maximal_norm(traj),
        _ => Err(Error::Domain(format!("functional index {j} not in 1..=5"))),
    }
}

/// Largest of the five contraction functionals.
pub fn omega_t(traj: &Trajectory<Field>, idx: &SobolevIndices) -> Result<f64> {
    (1..=5).try_fold(0.0_f64, |acc, j| Ok(acc.max(omega(traj, idx, j)?)))
}

/// Named values of the norm functionals of one scalar trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub grid: GridSpec,
    pub final_time: f64,
    pub dt: f64,
    pub entries: Vec<(String, f64)>,
}

impl NormReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

/// Evaluates every functional on `traj`. Sobolev-type norms are those of
/// the initial slice; `mixed` lists extra `(q, p)` pairs, time outer.
pub fn norm_report(
    traj: &Trajectory<Field>,
    idx: &SobolevIndices,
    mixed: &[(Exponent, Exponent)],
) -> Result<NormReport> {
    let first = &traj.states()[0];
    let mut entries = vec![
        ("H^s".to_string(), sobolev_norm(first, idx.s)),
        ("V^s".to_string(), vs_norm(first, idx.s)?),
    ];
    let mut big = 0.0_f64;
    for j in 1..=5 {
        let v = omega(traj, idx, j)?;
        big = big.max(v);
        entries.push((format!("omega{j}"), v));
    }
    entries.push(("omega_T".into(), big));
    entries.push(("cube-smoothing".into(), cube_smoothing_norm(traj)?));
    entries.push(("maximal".into(), maximal_norm(traj)?));
    for &(q, p) in mixed {
        entries.push((
            format!("mixed({q},{p})"),
            mixed_norm(traj, q, p, NormOrder::TimeOuter),
        ));
    }
    Ok(NormReport {
        grid: *traj.grid(),
        final_time: traj.final_time(),
        dt: traj.dt(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TrajectoryMeta;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn meta() -> TrajectoryMeta {
        TrajectoryMeta {
            stepper: "test".into(),
            dt: 0.5,
            dealias_fraction: 1.0,
        }
    }

    fn constant_traj(f: &Field, n: usize, dt: f64) -> Trajectory<Field> {
        let times = (0..n).map(|i| i as f64 * dt).collect();
        Trajectory::new(times, vec![f.clone(); n], meta()).unwrap()
    }

    #[test]
    fn sobolev_of_unit_mode() {
        let g = Grid::new(GridSpec::square(16, 2.0 * PI)).unwrap();
        let mut f = Field::plane_wave(&g, 1, 0);
        f *= 1.0 / f.l2_norm();
        for s in [0.0, 0.5, 1.6] {
            assert!((sobolev_norm(&f, s) - 2f64.powf(s / 2.0)).abs() < 1e-13);
            assert!((vs_norm(&f, s).unwrap() - 2f64.powf((s - 1.0) / 2.0)).abs() < 1e-13);
        }
        assert!((sobolev_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn vs_rejects_mean() {
        let g = Grid::new(GridSpec::square(8, 1.0)).unwrap();
        let f = Field::from_real_fn(&g, |_, _| 1.0);
        assert!(matches!(vs_norm(&f, 1.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn indices_are_derived() {
        let i = SobolevIndices::new(1.6).unwrap();
        assert!((i.m - 0.6).abs() < 1e-15 && (i.delta - 0.4).abs() < 1e-15);
        assert!((i.q_delta - 3.0 / 1.4).abs() < 1e-15);
        assert!(SobolevIndices::new(1.5).is_err());
        assert!(SobolevIndices::new(2.0).is_err());
    }

    #[test]
    fn mesh_needs_integer_sides() {
        let spec = GridSpec::square(16, 4.0);
        let mesh = CubeMesh::new(&spec).unwrap();
        assert_eq!(mesh.count(), 16);
        // x = 1.0 sits on the left edge of cube column 1
        assert_eq!(mesh.cube_of(4), 1);
        assert_eq!(mesh.cube_of(3), 0);
        assert_eq!(mesh.corner(mesh.cube_of(16 * 15 + 15)), (3, 3));
        assert!(matches!(
            CubeMesh::new(&GridSpec::square(16, 2.0 * PI)),
            Err(Error::Mesh(_))
        ));
    }

    #[test]
    fn mixed_norm_basics() {
        let g = Grid::new(GridSpec::square(8, 2.0)).unwrap();
        let f = Field::from_real_fn(&g, |x, y| (PI * x).sin() + (PI * y).cos());
        let traj = constant_traj(&f, 5, 0.5);
        let two = Exponent::Finite(2.0);
        let a = mixed_norm(&traj, two, two, NormOrder::TimeOuter);
        let b = mixed_norm(&traj, two, two, NormOrder::SpaceOuter);
        assert!((a - b).abs() < 1e-13 * a);
        assert!((a - f.l2_norm() * 2f64.sqrt()).abs() < 1e-13);
        let c = mixed_norm(&traj, Exponent::Infinity, two, NormOrder::TimeOuter);
        assert!((c - f.l2_norm()).abs() < 1e-13);
        assert!(Exponent::new(0.5).is_err());
        assert_eq!(Exponent::new(f64::INFINITY).unwrap(), Exponent::Infinity);
    }

    #[test]
    fn zero_trajectory_has_zero_functionals() {
        let g = Grid::new(GridSpec::square(16, 4.0)).unwrap();
        let traj = constant_traj(&Field::zeros(&g, Representation::Fourier), 3, 0.5);
        let idx = SobolevIndices::new(1.6).unwrap();
        for j in 1..=5 {
            assert_eq!(omega(&traj, &idx, j).unwrap(), 0.0);
        }
        assert!(omega(&traj, &idx, 6).is_err());
    }
}
