//! For an A-invariant surface the translator equation at fixed `s` is a
//! polynomial identity in the fiber parameter `t`.
//!
//! With `Phi^2 = (x' + 2 t theta')^2 + x'^2` and `k = x' theta'' - theta' x''`,
//! the polynomial returned here is `P(t) = Phi^3 (H - <N, X>) / 2`.

use crate::error::{Error, Result};
use crate::families::{Family, GeneratingCurve};
use crate::geometry::KillingFieldKind;

/// Coefficients of `P(t)` in ascending powers of `t`.
pub fn a_family_poly_coeffs(
    field: KillingFieldKind,
    curve: &GeneratingCurve,
    s: f64,
) -> Result<Vec<f64>> {
    if curve.family() != Family::A {
        return Err(Error::InvalidParameter(format!(
            "{} is not an A-family curve",
            curve.name()
        )));
    }
    let speed = curve.speed(s)?;
    if !(speed > 1e-12) {
        return Err(Error::Regularity { s, speed });
    }
    let j = curve.jet(s)?;
    let (x, dx, ddx, dth, ddth) = (j.value[0], j.d1[0], j.d2[0], j.d1[1], j.d2[1]);
    let k = dx * ddth - dth * ddx;
    Ok(match field {
        KillingFieldKind::Dx => vec![dx * dx * dth, 2.0 * dx * dth * dth, k + 2.0 * dth.powi(3)],
        KillingFieldKind::Dtheta => {
            vec![-dx.powi(3), -2.0 * dx * dx * dth, k - 2.0 * dx * dth * dth]
        }
        KillingFieldKind::V => vec![
            x * dth * dx * dx,
            2.0 * x * dx * dth * dth,
            k + 2.0 * x * dth.powi(3),
        ],
        KillingFieldKind::W => vec![
            0.5 * dth * x * x * dx * dx,
            x * x * dx * dth * dth,
            k + x * x * dth.powi(3) - 0.5 * dth * dx * dx,
            -dx * dth * dth,
            -dth.powi(3),
        ],
    })
}

pub fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// True when every coefficient stays below `tol` at all `samples`.
pub fn is_a_family_degenerate(
    field: KillingFieldKind,
    curve: &GeneratingCurve,
    samples: &[f64],
    tol: f64,
) -> Result<bool> {
    for &s in samples {
        if a_family_poly_coeffs(field, curve, s)?
            .iter()
            .any(|c| c.abs() >= tol)
        {
            return Ok(false);
        }
    }
    Ok(true)
}
