//! Periodic computational box and its Fourier layout.
//!
//! Samples are stored row-major with `x` varying fastest: the sample at
//! `(ix, iy)` lives at `iy * nx + ix`. Fourier coefficients use the same
//! layout, with signed frequency index `j' = j` for `j < n/2` and
//! `j' = j - n` otherwise, so the Nyquist index maps to `-n/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Parameters of the periodic box `[0, lx) x [0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    /// Fraction of the Nyquist index kept by [`crate::spectral::dealias`].
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        Self {
            nx,
            ny,
            lx,
            ly,
            dealias_fraction: 2.0 / 3.0,
        }
    }

    pub fn square(n: usize, l: f64) -> Self {
        Self::new(n, n, l, l)
    }

    pub fn with_dealias(mut self, fraction: f64) -> Self {
        self.dealias_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::Domain(format!("{name} = {n} must be even and >= 8")));
            }
        }
        for (name, l) in [("lx", self.lx), ("ly", self.ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Domain(format!("{name} = {l} must be positive")));
            }
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Domain(format!(
                "dealias_fraction = {} must lie in (0, 1]",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Area of one grid cell.
    pub fn cell(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Signed frequency index for storage index `j` on an axis with `n` points.
    pub fn signed_index(j: usize, n: usize) -> i64 {
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Storage index for a signed frequency index.
    pub fn storage_index(signed: i64, n: usize) -> usize {
        signed.rem_euclid(n as i64) as usize
    }

    /// Wavevector of the Fourier coefficient stored at `(jx, jy)`.
    pub fn wavevector(&self, jx: usize, jy: usize) -> (f64, f64) {
        (
            2.0 * PI * Self::signed_index(jx, self.nx) as f64 / self.lx,
            2.0 * PI * Self::signed_index(jy, self.ny) as f64 / self.ly,
        )
    }

    /// Physical coordinates of the sample stored at `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (ix as f64 * self.dx(), iy as f64 * self.dy())
    }

    pub fn has_integer_sides(&self) -> bool {
        self.lx.fract() == 0.0 && self.ly.fract() == 0.0
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} on [0,{})x[0,{}) dealias {:.4}",
            self.nx, self.ny, self.lx, self.ly, self.dealias_fraction
        )
    }
}

struct GridInner {
    spec: GridSpec,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
    /// |xi| per coefficient.
    kabs: Vec<f64>,
    /// Coefficients kept by the dealiasing filter.
    keep: Vec<bool>,
}

/// A validated grid together with its FFT plans and wavenumber tables.
///
/// Cloning is cheap; all clones share the same tables.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Grid").field(&self.inner.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut planner = FftPlanner::<f64>::new();
        let fft_x = planner.plan_fft_forward(spec.nx);
        let ifft_x = planner.plan_fft_inverse(spec.nx);
        let fft_y = planner.plan_fft_forward(spec.ny);
        let ifft_y = planner.plan_fft_inverse(spec.ny);
        let kx: Vec<f64> = (0..spec.nx).map(|j| spec.wavevector(j, 0).0).collect();
        let ky: Vec<f64> = (0..spec.ny).map(|j| spec.wavevector(0, j).1).collect();
        let mut kabs = Vec::with_capacity(spec.len());
        let mut keep = Vec::with_capacity(spec.len());
        let cut_x = spec.dealias_fraction * (spec.nx / 2) as f64;
        let cut_y = spec.dealias_fraction * (spec.ny / 2) as f64;
        for (jy, &ky_j) in ky.iter().enumerate() {
            let sy = GridSpec::signed_index(jy, spec.ny).unsigned_abs() as f64;
            for (jx, &kx_j) in kx.iter().enumerate() {
                let sx = GridSpec::signed_index(jx, spec.nx).unsigned_abs() as f64;
                kabs.push(kx_j.hypot(ky_j));
                keep.push(sx <= cut_x && sy <= cut_y);
            }
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                spec,
                fft_x,
                ifft_x,
                fft_y,
                ifft_y,
                kx,
                ky,
                kabs,
                keep,
            }),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.inner.spec
    }

    pub fn nx(&self) -> usize {
        self.inner.spec.nx
    }

    pub fn ny(&self) -> usize {
        self.inner.spec.ny
    }

    pub fn len(&self) -> usize {
        self.inner.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self) -> f64 {
        self.inner.spec.cell()
    }

    /// Wavenumbers along x, indexed by storage index.
    pub fn kx(&self) -> &[f64] {
        &self.inner.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.inner.ky
    }

    /// |xi| for every coefficient in storage order.
    pub fn kabs(&self) -> &[f64] {
        &self.inner.kabs
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.keep
    }

    /// Wavevector at flat storage index.
    pub fn wavevector_at(&self, idx: usize) -> (f64, f64) {
        let nx = self.nx();
        (self.inner.kx[idx % nx], self.inner.ky[idx / nx])
    }

    /// In-place unitary forward transform of row-major data.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.fft_x, &self.inner.fft_y);
    }

    /// In-place unitary inverse transform of row-major data.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.ifft_x, &self.inner.ifft_y);
    }

    fn transform(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.nx(), self.ny());
        debug_assert_eq!(data.len(), nx * ny);
        fx.process(data);
        let mut column = vec![Complex64::new(0.0, 0.0); ny];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fy.get_inplace_scratch_len()];
        for ix in 0..nx {
            for iy in 0..ny {
                column[iy] = data[iy * nx + ix];
            }
            fy.process_with_scratch(&mut column, &mut scratch);
            for iy in 0..ny {
                data[iy * nx + ix] = column[iy];
            }
        }
        let scale = 1.0 / ((nx * ny) as f64).sqrt();
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}
