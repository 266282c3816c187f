//! The three equivalent formulations and the exact maps between them.
//!
//! `(eta, Phi)` is the surface elevation and velocity potential, `(u, v)` the
//! diagonal variables with decoupled linear parts, and `w = (u_x1, u_x2,
//! v_x1, v_x2)` the differentiated four-field system. All potentials are
//! kept mean-zero; zero modes are pinned to 0 by every map here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Representation};
use crate::grid::Grid;
use crate::spectral::{derivative, Axis};

/// Largest curl residual accepted by [`reconstruct_from_w`], relative to
/// the size of the state once that exceeds one.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A fixed-size tuple of fields sharing one grid.
pub trait State: Clone + Sized {
    const NAME: &'static str;
    const COMPONENTS: usize;

    fn fields(&self) -> Vec<&Field>;
    fn fields_mut(&mut self) -> Vec<&mut Field>;
    fn from_fields(fields: Vec<Field>) -> Result<Self>;

    fn grid(&self) -> &Grid {
        self.fields()[0].grid()
    }

    /// Root-sum-square of the component L2 norms.
    fn l2_norm(&self) -> f64 {
        self.fields()
            .iter()
            .map(|f| f.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn l2_distance(&self, other: &Self) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|(a, b)| a.l2_distance(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.is_finite())
    }

    fn map_fields(&self, f: impl Fn(&Field) -> Field) -> Self {
        Self::from_fields(self.fields().into_iter().map(f).collect())
            .expect("component count preserved")
    }

    fn zeros(grid: &Grid) -> Self {
        Self::from_fields(
            (0..Self::COMPONENTS)
                .map(|_| Field::zeros(grid, Representation::Fourier))
                .collect(),
        )
        .expect("component count preserved")
    }
}

fn check_fields(name: &str, fields: &[Field], n: usize) -> Result<()> {
    if fields.len() != n {
        return Err(Error::Structure(format!(
            "{name} needs {n} fields, got {}",
            fields.len()
        )));
    }
    for f in &fields[1..] {
        fields[0].ensure_same_grid(f)?;
    }
    Ok(())
}

/// Surface elevation and velocity potential.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEtaPhi {
    pub eta: Field,
    pub phi: Field,
}

/// Diagonal variables `u`, `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateUV {
    pub u: Field,
    pub v: Field,
}

/// Gradients `(u_x1, u_x2, v_x1, v_x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateW {
    pub w: [Field; 4],
}

impl State for StateEtaPhi {
    const NAME: &'static str = "eta-phi";
    const COMPONENTS: usize = 2;

    fn fields(&self) -> Vec<&Field> {
        vec![&self.eta, &self.phi]
    }

    fn fields_mut(&mut self) -> Vec<&mut Field> {
        vec![&mut self.eta, &mut self.phi]
    }

    fn from_fields(fields: Vec<Field>) -> Result<Self> {
        check_fields(Self::NAME, &fields, 2)?;
        let mut it = fields.into_iter();
        Ok(Self {
            eta: it.next().unwrap(),
            phi: it.next().unwrap(),
        })
    }
}

impl State for StateUV {
    const NAME: &'static str = "uv";
    const COMPONENTS: usize = 2;

    fn fields(&self) -> Vec<&Field> {
        vec![&self.u, &self.v]
    }

    fn fields_mut(&mut self) -> Vec<&mut Field> {
        vec![&mut self.u, &mut self.v]
    }

    fn from_fields(fields: Vec<Field>) -> Result<Self> {
        check_fields(Self::NAME, &fields, 2)?;
        let mut it = fields.into_iter();
        Ok(Self {
            u: it.next().unwrap(),
            v: it.next().unwrap(),
        })
    }
}

impl State for StateW {
    const NAME: &'static str = "w";
    const COMPONENTS: usize = 4;

    fn fields(&self) -> Vec<&Field> {
        self.w.iter().collect()
    }

    fn fields_mut(&mut self) -> Vec<&mut Field> {
        self.w.iter_mut().collect()
    }

    fn from_fields(fields: Vec<Field>) -> Result<Self> {
        check_fields(Self::NAME, &fields, 4)?;
        let w: [Field; 4] = fields
            .try_into()
            .map_err(|_| Error::Structure("w state needs exactly four fields".into()))?;
        Ok(Self { w })
    }
}

impl StateEtaPhi {
    /// Largest relative imaginary part of `eta` and `Phi`.
    pub fn reality_defect(&self) -> f64 {
        [&self.eta, &self.phi]
            .iter()
            .map(|f| {
                let n = f.l2_norm();
                if n == 0.0 {
                    0.0
                } else {
                    f.imag_l2() / n
                }
            })
            .fold(0.0, f64::max)
    }
}

impl StateUV {
    /// Relative distance between `v` and `conj(u)`.
    pub fn conjugation_defect(&self) -> f64 {
        let d = self.v.l2_distance(&self.u.conj());
        let n = self.u.l2_norm().max(self.v.l2_norm());
        if n == 0.0 {
            0.0
        } else {
            d / n
        }
    }
}

impl StateW {
    /// Relative distance between `(w3, w4)` and `(conj w1, conj w2)`.
    pub fn conjugation_defect(&self) -> f64 {
        let d = (self.w[2].l2_distance(&self.w[0].conj()).powi(2)
            + self.w[3].l2_distance(&self.w[1].conj()).powi(2))
        .sqrt();
        let n = self.l2_norm();
        if n == 0.0 {
            0.0
        } else {
            d / n
        }
    }
}

fn require_mean_zero(name: &str, f: &Field) -> Result<()> {
    if !f.is_mean_zero() {
        return Err(Error::Precondition(format!(
            "{name} has nonzero mean {:.3e}; project it first",
            f.mean()
        )));
    }
    Ok(())
}

/// `u = -i/(2|D|) eta + Phi/2`, `v = +i/(2|D|) eta + Phi/2`.
pub fn diagonalize(s: &StateEtaPhi) -> Result<StateUV> {
    s.eta.ensure_same_grid(&s.phi)?;
    require_mean_zero("eta", &s.eta)?;
    require_mean_zero("Phi", &s.phi)?;
    let eta = s.eta.to_fourier();
    let phi = s.phi.to_fourier();
    let grid = eta.grid().clone();
    let mut u = Field::zeros(&grid, Representation::Fourier);
    let mut v = Field::zeros(&grid, Representation::Fourier);
    let (ud, vd) = (u.data_mut(), v.data_mut());
    for (i, &k) in grid.kabs().iter().enumerate() {
        if k == 0.0 {
            ud[i] = ZERO;
            vd[i] = ZERO;
            continue;
        }
        let a = Complex64::new(0.0, 0.5 / k) * eta.data()[i];
        let b = 0.5 * phi.data()[i];
        ud[i] = b - a;
        vd[i] = b + a;
    }
    Ok(StateUV { u, v })
}

/// `eta = i|D|(u - v)`, `Phi = u + v`.
pub fn undiagonalize(s: &StateUV) -> Result<StateEtaPhi> {
    s.u.ensure_same_grid(&s.v)?;
    let u = s.u.to_fourier();
    let v = s.v.to_fourier();
    let grid = u.grid().clone();
    let mut eta = Field::zeros(&grid, Representation::Fourier);
    let mut phi = Field::zeros(&grid, Representation::Fourier);
    let (ed, pd) = (eta.data_mut(), phi.data_mut());
    for (i, &k) in grid.kabs().iter().enumerate() {
        if k == 0.0 {
            continue;
        }
        ed[i] = Complex64::new(0.0, k) * (u.data()[i] - v.data()[i]);
        pd[i] = u.data()[i] + v.data()[i];
    }
    Ok(StateEtaPhi { eta, phi })
}

/// `w = (d1 u, d2 u, d1 v, d2 v)` by spectral differentiation.
pub fn differentiate_to_w(s: &StateUV) -> Result<StateW> {
    s.u.ensure_same_grid(&s.v)?;
    let u = s.u.to_fourier();
    let v = s.v.to_fourier();
    Ok(StateW {
        w: [
            derivative(&u, Axis::X1),
            derivative(&u, Axis::X2),
            derivative(&v, Axis::X1),
            derivative(&v, Axis::X2),
        ],
    })
}

/// L2 norms of `d2 w1 - d1 w2` and `d2 w3 - d1 w4`.
pub fn curl_residual(s: &StateW) -> (f64, f64) {
    let curl = |a: &Field, b: &Field| {
        let c = &derivative(&a.to_fourier(), Axis::X2) - &derivative(&b.to_fourier(), Axis::X1);
        c.l2_norm()
    };
    (curl(&s.w[0], &s.w[1]), curl(&s.w[2], &s.w[3]))
}

/// Recovers the mean-zero potentials of the closed fields `(w1, w2)` and
/// `(w3, w4)` by solving the gradient system in Fourier space.
pub fn reconstruct_from_w(s: &StateW) -> Result<StateUV> {
    let (c1, c2) = curl_residual(s);
    let residual = c1.max(c2);
    let tolerance = CLOSEDNESS_TOLERANCE * s.l2_norm().max(1.0);
    if residual > tolerance {
        return Err(Error::NotClosed {
            residual,
            tolerance,
        });
    }
    let potential = |a: &Field, b: &Field| {
        let a = a.to_fourier();
        let b = b.to_fourier();
        let grid = a.grid().clone();
        let mut out = Field::zeros(&grid, Representation::Fourier);
        for (i, z) in out.data_mut().iter_mut().enumerate() {
            let (kx, ky) = grid.wavevector_at(i);
            let k2 = kx * kx + ky * ky;
            if k2 > 0.0 {
                *z = Complex64::new(0.0, -1.0) * (kx * a.data()[i] + ky * b.data()[i]) / k2;
            }
        }
        out
    };
    Ok(StateUV {
        u: potential(&s.w[0], &s.w[1]),
        v: potential(&s.w[2], &s.w[3]),
    })
}
