use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::reformulations::State;

/// Relative tolerance on the uniformity of the time grid.
const SPACING_TOLERANCE: f64 = 1e-14;

impl State for Field {
    const NAME: &'static str = "scalar";
    const COMPONENTS: usize = 1;

    fn fields(&self) -> Vec<&Field> {
        vec![self]
    }

    fn fields_mut(&mut self) -> Vec<&mut Field> {
        vec![self]
    }

    fn from_fields(fields: Vec<Field>) -> Result<Self> {
        let n = fields.len();
        let mut it = fields.into_iter();
        match (it.next(), n) {
            (Some(f), 1) => Ok(f),
            _ => Err(Error::Structure(format!(
                "scalar state needs 1 field, got {n}"
            ))),
        }
    }
}

/// How a trajectory was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub stepper: String,
    pub dt: f64,
    pub dealias_fraction: f64,
}

/// Invariant monitors recorded at one stored time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitor {
    pub time: f64,
    pub curl_u: f64,
    pub curl_v: f64,
    /// Relative imaginary part of the reconstructed `(eta, Phi)`.
    pub reality_defect: f64,
    /// Relative distance between `v`-type and conjugated `u`-type components.
    pub conjugation_defect: f64,
    pub l2_norm: f64,
}

/// States at uniformly spaced times `0, dt, ..., T`.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    grid: GridSpec,
    meta: TrajectoryMeta,
    pub monitors: Vec<Monitor>,
}

impl<S: State> Trajectory<S> {
    /// Builds a trajectory, checking the time grid and that all states
    /// share one grid.
    pub fn new(times: Vec<f64>, states: Vec<S>, meta: TrajectoryMeta) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::Structure(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Structure(format!(
                "trajectory starts at {}",
                times[0]
            )));
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            let scale = times[times.len() - 1].abs().max(1.0);
            for pair in times.windows(2) {
                let step = pair[1] - pair[0];
                if !(step > 0.0) || (step - dt).abs() > SPACING_TOLERANCE * scale {
                    return Err(Error::Structure(format!(
                        "non-uniform time step {step} (expected {dt})"
                    )));
                }
            }
        }
        let grid = *states[0].grid().spec();
        for s in &states[1..] {
            s.fields()[0].ensure_same_grid(states[0].fields()[0])?;
        }
        Ok(Self {
            times,
            states,
            grid,
            meta,
            monitors: Vec::new(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn into_states(self) -> Vec<S> {
        self.states
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Spacing of the time grid (0 for a single state).
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Applies a fallible map to every state, keeping times and metadata.
    pub fn try_map<T: State>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Trajectory<T>> {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        let mut out = Trajectory::new(self.times.clone(), states, self.meta.clone())?;
        out.monitors = self.monitors.clone();
        Ok(out)
    }

    /// The scalar trajectory of component `j`.
    pub fn component(&self, j: usize) -> Result<Trajectory<Field>> {
        if j >= S::COMPONENTS {
            return Err(Error::Structure(format!(
                "{} has {} components, asked for {j}",
                S::NAME,
                S::COMPONENTS
            )));
        }
        self.try_map(|s| Ok(s.fields()[j].clone()))
    }

    /// Largest L2 distance between corresponding states.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Structure(format!(
                "trajectories have {} and {} states",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.l2_distance(b))
            .fold(0.0, f64::max))
    }
}
