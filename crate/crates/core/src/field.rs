//! Complex scalar fields sampled on a [`Grid`].

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which space the samples of a [`Field`] live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Fourier,
}

/// A complex scalar field on a periodic grid.
///
/// Physical data are point values; Fourier data are unitary DFT
/// coefficients, so the discrete sum of squares is the same in both
/// representations.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    repr: Representation,
    data: Vec<Complex64>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.repr == other.repr && self.data == other.data
    }
}

impl Field {
    pub fn zeros(grid: &Grid, repr: Representation) -> Self {
        Self {
            grid: grid.clone(),
            repr,
            data: vec![ZERO; grid.len()],
        }
    }

    pub fn from_data(grid: &Grid, repr: Representation, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Structure(format!(
                "data length {} does not match grid {}",
                data.len(),
                grid.spec()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            repr,
            data,
        })
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let spec = *grid.spec();
        let mut data = Vec::with_capacity(spec.len());
        for iy in 0..spec.ny {
            for ix in 0..spec.nx {
                let (x, y) = spec.point(ix, iy);
                data.push(f(x, y));
            }
        }
        Self {
            grid: grid.clone(),
            repr: Representation::Physical,
            data,
        }
    }

    /// Real-valued samples of `f(x, y)`.
    pub fn from_real_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    /// Fourier coefficients given as a function of the wavevector.
    pub fn from_spectrum(grid: &Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let data = (0..grid.len())
            .map(|i| {
                let (kx, ky) = grid.wavevector_at(i);
                f(kx, ky)
            })
            .collect();
        Self {
            grid: grid.clone(),
            repr: Representation::Fourier,
            data,
        }
    }

    /// The plane wave `exp(i (jx * 2pi x / lx + jy * 2pi y / ly))`.
    pub fn plane_wave(grid: &Grid, jx: i64, jy: i64) -> Self {
        let spec = *grid.spec();
        let kx = 2.0 * std::f64::consts::PI * jx as f64 / spec.lx;
        let ky = 2.0 * std::f64::consts::PI * jy as f64 / spec.ly;
        Self::from_fn(grid, |x, y| Complex64::from_polar(1.0, kx * x + ky * y))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &GridSpec {
        self.grid.spec()
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn into_fourier(mut self) -> Self {
        if self.repr == Representation::Physical {
            self.grid.forward(&mut self.data);
            self.repr = Representation::Fourier;
        }
        self
    }

    pub fn into_physical(mut self) -> Self {
        if self.repr == Representation::Fourier {
            self.grid.inverse(&mut self.data);
            self.repr = Representation::Physical;
        }
        self
    }

    pub fn to_fourier(&self) -> Self {
        self.clone().into_fourier()
    }

    pub fn to_physical(&self) -> Self {
        self.clone().into_physical()
    }

    pub fn into_repr(self, repr: Representation) -> Self {
        match repr {
            Representation::Physical => self.into_physical(),
            Representation::Fourier => self.into_fourier(),
        }
    }

    pub fn ensure_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Structure(format!(
                "grid mismatch: {} vs {}",
                self.spec(),
                other.spec()
            )));
        }
        Ok(())
    }

    /// Square root of the plain sum of squares (representation independent).
    pub fn discrete_l2(&self) -> f64 {
        sum_sq(&self.data).sqrt()
    }

    /// Riemann-sum approximation of the continuum L2 norm.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell() * sum_sq(&self.data)).sqrt()
    }

    /// Largest modulus of the physical samples.
    pub fn max_abs(&self) -> f64 {
        let phys;
        let data = match self.repr {
            Representation::Physical => &self.data,
            Representation::Fourier => {
                phys = self.to_physical();
                &phys.data
            }
        };
        data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spatial average of the field.
    pub fn mean(&self) -> Complex64 {
        match self.repr {
            Representation::Fourier => self.data[0] / (self.grid.len() as f64).sqrt(),
            Representation::Physical => {
                self.data.iter().sum::<Complex64>() / self.grid.len() as f64
            }
        }
    }

    /// True when the zero mode is negligible relative to the field.
    pub fn is_mean_zero(&self) -> bool {
        let m = self.mean().norm() * (self.grid.len() as f64).sqrt();
        m <= 1e-12 * self.discrete_l2() || m <= 1e-300
    }

    /// Removes the spatial mean, leaving the representation unchanged.
    pub fn project_mean_zero(mut self) -> Self {
        match self.repr {
            Representation::Fourier => self.data[0] = ZERO,
            Representation::Physical => {
                let m = self.mean();
                for z in &mut self.data {
                    *z -= m;
                }
            }
        }
        self
    }

    /// Relative violation of the Hermitian symmetry `f(-xi) = conj(f(xi))`.
    pub fn hermitian_defect(&self) -> f64 {
        let f = self.to_fourier();
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut num = 0.0;
        for jy in 0..ny {
            let my = (ny - jy) % ny;
            for jx in 0..nx {
                let mx = (nx - jx) % nx;
                num += (f.data[jy * nx + jx] - f.data[my * nx + mx].conj()).norm_sqr();
            }
        }
        let den = sum_sq(&f.data);
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Discrete L2 norm of the imaginary part of the physical samples.
    pub fn imag_l2(&self) -> f64 {
        let p = self.to_physical();
        (self.grid.cell() * p.data.iter().map(|z| z.im * z.im).sum::<f64>()).sqrt()
    }

    pub fn conj(&self) -> Self {
        let phys = self.to_physical();
        Self {
            grid: self.grid.clone(),
            repr: Representation::Physical,
            data: phys.data.iter().map(|z| z.conj()).collect(),
        }
        .into_repr(self.repr)
    }

    /// Pointwise product, returned in physical representation.
    pub fn mul_pointwise(&self, other: &Field) -> Result<Field> {
        self.ensure_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
        Ok(Self {
            grid: self.grid.clone(),
            repr: Representation::Physical,
            data,
        })
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex64, other: &Field) {
        assert!(self.grid == other.grid, "axpy on different grids");
        let other = if other.repr == self.repr {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.clone().into_repr(self.repr))
        };
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        let mut out = self.clone();
        out *= a;
        out
    }

    /// Distance `||self - other||` in the continuum L2 sense.
    pub fn l2_distance(&self, other: &Field) -> f64 {
        (self - other).l2_norm()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            repr: self.repr,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn sum_sq(data: &[Complex64]) -> f64 {
    pairwise_sum_by(data, |z| z.norm_sqr())
}

/// Pairwise summation, so results do not depend on accumulation order.
pub(crate) fn pairwise_sum_by<T>(data: &[T], f: impl Fn(&T) -> f64 + Copy) -> f64 {
    if data.len() <= 64 {
        data.iter().map(f).sum()
    } else {
        let (a, b) = data.split_at(data.len() / 2);
        pairwise_sum_by(a, f) + pairwise_sum_by(b, f)
    }
}

pub(crate) fn pairwise_sum(data: &[f64]) -> f64 {
    pairwise_sum_by(data, |x| *x)
}

impl<'a> Add<&'a Field> for &'a Field {
    type Output = Field;
    fn add(self, rhs: &'a Field) -> Field {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Field> for &'a Field {
    type Output = Field;
    fn sub(self, rhs: &'a Field) -> Field {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Field> for Field {
    fn add_assign(&mut self, rhs: &Field) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&Field> for Field {
    fn sub_assign(&mut self, rhs: &Field) {
        self.axpy(Complex64::new(-1.0, 0.0), rhs);
    }
}

impl MulAssign<Complex64> for Field {
    fn mul_assign(&mut self, a: Complex64) {
        for z in &mut self.data {
            *z *= a;
        }
    }
}

impl MulAssign<f64> for Field {
    fn mul_assign(&mut self, a: f64) {
        for z in &mut self.data {
            *z *= a;
        }
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, a: f64) -> Field {
        let mut out = self.clone();
        out *= a;
        out
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(GridSpec::new(16, 8, 2.0, 1.0)).unwrap()
    }

    #[test]
    fn cosine_has_two_coefficients() {
        let g = grid();
        let f = Field::from_real_fn(&g, |x, _| (2.0 * PI * x / 2.0).cos()).into_fourier();
        let nonzero: Vec<usize> = f
            .data()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero, vec![1, 15]);
        let (kx, ky) = g.wavevector_at(1);
        assert!((kx - PI).abs() < 1e-14 && ky == 0.0);
        assert!((g.wavevector_at(15).0 + PI).abs() < 1e-14);
    }

    #[test]
    fn mean_and_projection() {
        let g = grid();
        let f = Field::from_real_fn(&g, |x, y| 3.0 + (PI * x).sin() * (2.0 * PI * y).cos());
        assert!((f.mean().re - 3.0).abs() < 1e-14);
        assert!((f.to_fourier().mean().re - 3.0).abs() < 1e-14);
        assert!(!f.is_mean_zero());
        let p = f.project_mean_zero();
        assert!(p.is_mean_zero());
        assert!(p.to_fourier().is_mean_zero());
    }

    #[test]
    fn hermitian_defect_of_real_and_complex_fields() {
        let g = grid();
        let real = Field::from_real_fn(&g, |x, y| (x * y).sin() + x);
        assert!(real.hermitian_defect() < 1e-14);
        let wave = Field::plane_wave(&g, 1, 1);
        assert!(wave.hermitian_defect() > 1.0);
    }

    #[test]
    fn from_data_checks_length() {
        let g = grid();
        assert!(matches!(
            Field::from_data(&g, Representation::Physical, vec![ZERO; 3]),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn mismatched_grids_are_structural_errors() {
        let a = Field::zeros(&grid(), Representation::Physical);
        let other = Grid::new(GridSpec::square(8, 1.0)).unwrap();
        let b = Field::zeros(&other, Representation::Physical);
        assert!(matches!(a.mul_pointwise(&b), Err(Error::Structure(_))));
    }
}
