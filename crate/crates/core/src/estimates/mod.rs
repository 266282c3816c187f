//! Quadrature-based checks of the linear estimates on the plane, plus grid
//! ratio experiments for the periodic linear flow.

mod bessel;
mod fit;
mod kernel;
mod leibniz;
mod linear;
pub mod quad;
mod radial;
mod vdc;

pub use bessel::{
    bessel_j, bessel_y0, h_envelope_check, hankel_envelope, hankel_envelope_derivative,
    EnvelopeReport,
};
pub use fit::{log_log_fit, LineFit};
pub use kernel::{
    decay_fit, default_cutoff, default_r_max, kernel_sup, kernel_value, DecayFitReport,
    KernelOptions, KernelSup,
};
pub use leibniz::frac_leibniz_defect;
pub use linear::{maximal_ratio, smoothing_ratio, strichartz_exponent, strichartz_ratio};
pub use radial::{radial_hat, RadialProfile};
pub use vdc::{van_der_corput_check, VdcReport, VDC_CONSTANT};
