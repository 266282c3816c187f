use crate::error::{Error, Result};
use crate::field::pairwise_sum_by;
use crate::field::Field;
use crate::spectral::fractional_derivative;

fn lp_norm(f: &Field, p: f64) -> f64 {
    let phys = f.to_physical();
    let cell = phys.grid().cell();
    (cell * pairwise_sum_by(phys.data(), |z| z.norm().powf(p))).powf(1.0 / p)
}

/// Ratio `||D^m(fg) - f D^m g - g D^m f||_p / (||g||_inf ||D^m f||_p)` on the
/// grid, with `m` in `(0, 1)` and `p` in `(1, inf)`.
///
/// Products are taken pointwise without dealiasing. A vanishing right-hand
/// side is only accepted together with a vanishing left-hand side.
pub fn frac_leibniz_defect(f: &Field, g: &Field, m: f64, p: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!("order m = {m} must lie in (0, 1)")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!(
            "exponent p = {p} must lie in (1, inf)"
        )));
    }
    f.ensure_same_grid(g)?;
    let fg = f.mul_pointwise(g)?;
    let dm_f = fractional_derivative(f, m)?.into_physical();
    let dm_g = fractional_derivative(g, m)?.into_physical();
    let mut defect = fractional_derivative(&fg, m)?.into_physical();
    defect -= &f.mul_pointwise(&dm_g)?;
    defect -= &g.mul_pointwise(&dm_f)?;

    let lhs = lp_norm(&defect, p);
    let rhs = g.max_abs() * lp_norm(&dm_f, p);
    let tol = 1e-12 * f.max_abs().max(g.max_abs()).max(1.0).powi(2);
    if rhs == 0.0 {
        if lhs <= tol {
            return Ok(0.0);
        }
        return Err(Error::Defect(format!(
            "left side {lhs:.3e} is nonzero while the right side vanishes"
        )));
    }
    Ok(lhs / rhs)
}
