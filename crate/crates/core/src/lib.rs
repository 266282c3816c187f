//! Spectral tools for a two-dimensional Boussinesq-type system on a
//! periodic box.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod field;
pub mod grid;
pub mod norms;
pub mod reformulations;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Field, Representation};
pub use grid::{Grid, GridSpec};
