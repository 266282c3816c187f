//! Fourier multipliers on periodic fields.
//!
//! Every operator here acts diagonally on Fourier coefficients. Symbols
//! with `|xi|` in a denominator (Riesz transforms, inverse half-Laplacian)
//! vanish at `xi = 0`, which matches the mean-zero convention used for the
//! potentials.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Representation};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coordinate direction of a partial derivative or Riesz transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X1, Axis::X2];

    fn pick(self, kx: f64, ky: f64) -> f64 {
        match self {
            Axis::X1 => kx,
            Axis::X2 => ky,
        }
    }
}

/// Branch of the linear group: `U^+` multiplies by `exp(+i t phi)`,
/// `U^-` by `exp(-i t phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Dispersion relation `phi(xi) = |xi|^3 + |xi|`, as a function of `|xi|`.
pub fn phi_symbol(k: f64) -> f64 {
    k * k * k + k
}

/// `|grad phi(xi)| = 3|xi|^2 + 1`.
pub fn phi_gradient_magnitude(k: f64) -> f64 {
    3.0 * k * k + 1.0
}

type Rule = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A labelled Fourier multiplier `xi -> m(xi)`.
#[derive(Clone)]
pub struct Symbol {
    label: String,
    rule: Arc<Rule>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.label)
    }
}

impl Symbol {
    pub fn new(
        label: impl Into<String>,
        rule: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, kx: f64, ky: f64) -> Complex64 {
        (self.rule)(kx, ky)
    }

    pub fn identity() -> Self {
        Self::new("1", |_, _| Complex64::new(1.0, 0.0))
    }

    /// `|xi|^s`, zero at the origin for `s > 0`.
    pub fn abs_pow(s: f64) -> Self {
        Self::new(format!("|xi|^{s}"), move |kx, ky| {
            Complex64::new(abs_pow(kx.hypot(ky), s), 0.0)
        })
    }

    /// Bessel potential `(1 + |xi|^2)^(s/2)`.
    pub fn bessel_potential(s: f64) -> Self {
        Self::new(format!("(1+|xi|^2)^({s}/2)"), move |kx, ky| {
            Complex64::new((1.0 + kx * kx + ky * ky).powf(0.5 * s), 0.0)
        })
    }

    /// Riesz transform `-i xi_l / |xi|`.
    pub fn riesz(axis: Axis) -> Self {
        Self::new(format!("R{}", axis_number(axis)), move |kx, ky| {
            riesz_symbol(axis, kx, ky)
        })
    }

    /// Partial derivative `i xi_l`.
    pub fn partial(axis: Axis) -> Self {
        Self::new(format!("d{}", axis_number(axis)), move |kx, ky| {
            I * axis.pick(kx, ky)
        })
    }

    pub fn phi() -> Self {
        Self::new("phi", |kx, ky| {
            Complex64::new(phi_symbol(kx.hypot(ky)), 0.0)
        })
    }

    /// `exp(+- i t phi(xi))`.
    pub fn propagator(t: f64, branch: Branch) -> Self {
        Self::new(format!("U{:+}({t})", branch.sign()), move |kx, ky| {
            Complex64::from_polar(1.0, branch.sign() * t * phi_symbol(kx.hypot(ky)))
        })
    }

    /// Pointwise product of two symbols.
    pub fn then(&self, other: &Symbol) -> Symbol {
        let (a, b) = (self.rule.clone(), other.rule.clone());
        Symbol::new(format!("{}*{}", self.label, other.label), move |kx, ky| {
            a(kx, ky) * b(kx, ky)
        })
    }
}

fn axis_number(axis: Axis) -> u8 {
    match axis {
        Axis::X1 => 1,
        Axis::X2 => 2,
    }
}

fn abs_pow(k: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if k == 0.0 {
        0.0
    } else {
        k.powf(s)
    }
}

fn riesz_symbol(axis: Axis, kx: f64, ky: f64) -> Complex64 {
    let k = kx.hypot(ky);
    if k == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -I * (axis.pick(kx, ky) / k)
    }
}

/// Multiplies every Fourier coefficient of `f` by `m(xi)`.
///
/// The result is returned in `out`. A non-finite symbol value is reported
/// with the offending wavevector.
pub fn apply_multiplier(f: &Field, m: &Symbol, out: Representation) -> Result<Field> {
    let mut g = f.to_fourier();
    let grid = g.grid().clone();
    for (i, z) in g.data_mut().iter_mut().enumerate() {
        let (kx, ky) = grid.wavevector_at(i);
        let v = m.eval(kx, ky);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFiniteSymbol {
                label: m.label().to_string(),
                kx,
                ky,
            });
        }
        *z *= v;
    }
    Ok(g.into_repr(out))
}

/// Applies a multiplier given per coefficient as a function of the storage
/// index. Keeps the representation of `f`.
fn map_spectrum(f: &Field, m: impl Fn(usize) -> Complex64) -> Field {
    let repr = f.repr();
    let mut g = f.to_fourier();
    for (i, z) in g.data_mut().iter_mut().enumerate() {
        *z *= m(i);
    }
    g.into_repr(repr)
}

/// Riesz transform `R_l`; the zero mode is sent to zero.
pub fn riesz(f: &Field, axis: Axis) -> Field {
    let grid = f.grid().clone();
    map_spectrum(f, |i| {
        let (kx, ky) = grid.wavevector_at(i);
        riesz_symbol(axis, kx, ky)
    })
}

/// Spectral partial derivative.
pub fn derivative(f: &Field, axis: Axis) -> Field {
    let grid = f.grid().clone();
    map_spectrum(f, |i| {
        let (kx, ky) = grid.wavevector_at(i);
        I * axis.pick(kx, ky)
    })
}

/// `D^s = (-Delta)^(s/2)`, multiplier `|xi|^s`.
pub fn fractional_derivative(f: &Field, s: f64) -> Result<Field> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "fractional order s = {s} must be >= 0"
        )));
    }
    let grid = f.grid().clone();
    Ok(map_spectrum(f, |i| {
        Complex64::new(abs_pow(grid.kabs()[i], s), 0.0)
    }))
}

/// The linear group `U^+-(t)`.
pub fn propagator(f: &Field, t: f64, branch: Branch) -> Field {
    let grid = f.grid().clone();
    let sgn = branch.sign();
    map_spectrum(f, |i| {
        Complex64::from_polar(1.0, sgn * t * phi_symbol(grid.kabs()[i]))
    })
}

/// Zeroes every coefficient with a frequency index above the dealiasing
/// fraction of the Nyquist index.
pub fn dealias(f: &Field) -> Field {
    let grid = f.grid().clone();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    map_spectrum(f, |i| if grid.dealias_mask()[i] { one } else { zero })
}

/// In-place dealiasing of Fourier data.
pub(crate) fn dealias_in_place(f: &mut Field) {
    debug_assert_eq!(f.repr(), Representation::Fourier);
    let grid = f.grid().clone();
    for (z, &keep) in f.data_mut().iter_mut().zip(grid.dealias_mask()) {
        if !keep {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}
