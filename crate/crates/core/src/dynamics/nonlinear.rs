//! Nonlinear terms of the three formulations (quadratic case, p = 1).
//!
//! All results are returned as Fourier-representation fields. Products
//! are formed in physical space and dealiased after transforming back.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::Field;
use crate::reformulations::{StateEtaPhi, StateUV, StateW};
use crate::spectral::{dealias_in_place, derivative, fractional_derivative, riesz, Axis};

fn product(a: &Field, b: &Field) -> Result<Field> {
    let mut p = a.mul_pointwise(b)?.into_fourier();
    dealias_in_place(&mut p);
    Ok(p)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Shared quadratic pieces: `g = D(u - v)` and `h_l = d_l (u + v)`, with
/// `L1 = g h1`, `L2 = g h2`, `L3 = h1^2 + h2^2`.
struct Quadratics {
    l1: Field,
    l2: Field,
    l3: Field,
}

fn quadratics(g: &Field, h1: &Field, h2: &Field) -> Result<Quadratics> {
    let g = g.to_physical();
    let h1 = h1.to_physical();
    let h2 = h2.to_physical();
    let l1 = product(&g, &h1)?;
    let l2 = product(&g, &h2)?;
    let mut l3 = product(&h1, &h1)?;
    l3 += &product(&h2, &h2)?;
    Ok(Quadratics { l1, l2, l3 })
}

/// `R1 L1 + R2 L2`.
fn riesz_pair(q: &Quadratics) -> Field {
    let mut r = riesz(&q.l1, Axis::X1);
    r += &riesz(&q.l2, Axis::X2);
    r
}

/// `(N1, N2)` for the diagonal system.
///
/// `N1 = (2|D|)^-1 [d1(g h1) + d2(g h2)]` is evaluated as
/// `-(R1(g h1) + R2(g h2)) / 2`, using `|D|^-1 d_l = -R_l`, which removes
/// the singular zero mode. `N2 = (h1^2 + h2^2) / 4`.
pub fn nonlinearity_uv(s: &StateUV) -> Result<(Field, Field)> {
    s.u.ensure_same_grid(&s.v)?;
    let u = s.u.to_fourier();
    let v = s.v.to_fourier();
    let g = fractional_derivative(&(&u - &v), 1.0)?;
    let sum = &u + &v;
    let q = quadratics(&g, &derivative(&sum, Axis::X1), &derivative(&sum, Axis::X2))?;
    let n1 = riesz_pair(&q).scaled(c(-0.5));
    let n2 = q.l3.scaled(c(0.25));
    Ok((n1, n2))
}

/// Nonlinear right-hand side of the `(u, v)` system: `(-N1 - N2, N1 - N2)`.
pub fn rhs_uv(s: &StateUV) -> Result<(Field, Field)> {
    let (n1, n2) = nonlinearity_uv(s)?;
    let fu = -&(&n1 + &n2);
    let fv = &n1 - &n2;
    Ok((fu, fv))
}

/// Nonlinear right-hand sides `F_1..F_4` of the differentiated system.
///
/// With `G = (R1 L1 + R2 L2)/2 - L3/4` and `H = -(R1 L1 + R2 L2)/2 - L3/4`,
/// `F = (d1 G, d2 G, d1 H, d2 H)`. The linear part is left to the
/// integrating factor. The input is assumed closed.
pub fn rhs_w(s: &StateW) -> Result<[Field; 4]> {
    let w: Vec<Field> = s.w.iter().map(|f| f.to_fourier()).collect();
    for f in &w[1..] {
        w[0].ensure_same_grid(f)?;
    }
    let mut g = riesz(&(&w[0] - &w[2]), Axis::X1);
    g += &riesz(&(&w[1] - &w[3]), Axis::X2);
    let q = quadratics(&g, &(&w[0] + &w[2]), &(&w[1] + &w[3]))?;
    let rr = riesz_pair(&q);
    let quarter = q.l3.scaled(c(0.25));
    let big_g = &rr.scaled(c(0.5)) - &quarter;
    let big_h = &rr.scaled(c(-0.5)) - &quarter;
    Ok([
        derivative(&big_g, Axis::X1),
        derivative(&big_g, Axis::X2),
        derivative(&big_h, Axis::X1),
        derivative(&big_h, Axis::X2),
    ])
}

/// Full right-hand side `(eta_t, Phi_t)` of the original system:
///
/// `eta_t = -Delta Phi + Delta^2 Phi - div(eta grad Phi)`,
/// `Phi_t = -eta + Delta eta - |grad Phi|^2 / 2`.
pub fn rhs_etaphi(s: &StateEtaPhi) -> Result<(Field, Field)> {
    s.eta.ensure_same_grid(&s.phi)?;
    let eta = s.eta.to_fourier();
    let phi = s.phi.to_fourier();
    let grid = eta.grid().clone();

    let p1 = derivative(&phi, Axis::X1);
    let p2 = derivative(&phi, Axis::X2);
    let e = eta.to_physical();
    let flux1 = product(&e, &p1.to_physical())?;
    let flux2 = product(&e, &p2.to_physical())?;
    let mut div = derivative(&flux1, Axis::X1);
    div += &derivative(&flux2, Axis::X2);
    let p1 = p1.to_physical();
    let p2 = p2.to_physical();
    let mut grad_sq = product(&p1, &p1)?;
    grad_sq += &product(&p2, &p2)?;

    let mut eta_t = -&div;
    let mut phi_t = grad_sq.scaled(c(-0.5));
    for (i, &k) in grid.kabs().iter().enumerate() {
        let k2 = k * k;
        eta_t.data_mut()[i] += (k2 + k2 * k2) * phi.data()[i];
        phi_t.data_mut()[i] -= (1.0 + k2) * eta.data()[i];
    }
    Ok((eta_t, phi_t))
}
