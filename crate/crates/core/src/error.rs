use thiserror::Error;

use crate::dynamics::PicardReport;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent sizes or grids between operands.
    #[error("structural error: {0}")]
    Structure(String),

    /// A parameter outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side precondition that does not hold (e.g. nonzero mean).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A multiplier returned a non-finite value.
    #[error("symbol `{label}` is not finite at wavevector ({kx}, {ky})")]
    NonFiniteSymbol { label: String, kx: f64, ky: f64 },

    /// The curl of a gradient-type vector field is above tolerance.
    #[error("vector field is not closed: curl residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotClosed { residual: f64, tolerance: f64 },

    /// The evolution produced non-finite values.
    #[error("non-finite state at t = {time}; last healthy time {last_healthy}")]
    BlowUp { time: f64, last_healthy: f64 },

    /// Fixed-point iteration did not reach the tolerance.
    #[error("Picard iteration did not converge after {} iterations", .0.iterate_count)]
    NonConvergence(Box<PicardReport>),

    /// An adaptive or oscillatory quadrature failed to converge.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// The mesh of unit cubes cannot tile the box.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// The pointwise product inequality was violated with a vanishing right-hand side.
    #[error("defect: {0}")]
    Defect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
