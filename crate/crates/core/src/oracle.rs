//! Family-agnostic mean curvature of a parametrized surface.
//!
//! Works only from the coordinate jet of `Psi(s, t)`: the induced metric, a
//! unit normal from the frame cross product, and the second fundamental form
//! via the Levi-Civita connection in coordinates. Nothing here knows which
//! invariant family produced the surface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, InvariantSurface, Orientation};
use crate::geometry::{
    christoffels_at, coord_to_frame, covariant_derivative, metric_at, metric_inner, CoordVector,
    FrameVector, Sl2Point,
};

/// Surfaces with `EG - F^2` below this are rejected as degenerate.
pub const DISCRIMINANT_TOL: f64 = 1e-14;

/// Position and first/second partial derivatives of `Psi(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub position: Sl2Point,
    pub d_s: CoordVector,
    pub d_t: CoordVector,
    pub d_ss: CoordVector,
    pub d_st: CoordVector,
    pub d_tt: CoordVector,
}

/// First (`e, f, g`) and second (`l, m, n`) fundamental forms with the unit
/// normal used for the latter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub normal: FrameVector,
}

impl FundamentalForms {
    pub fn discriminant(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    pub fn mean_curvature(&self) -> f64 {
        (self.e * self.n - 2.0 * self.f * self.m + self.g * self.l) / (2.0 * self.discriminant())
    }

    /// Extrinsic (shape operator) determinant `(LN - M^2)/(EG - F^2)`.
    pub fn extrinsic_curvature(&self) -> f64 {
        (self.l * self.n - self.m * self.m) / self.discriminant()
    }
}

/// Exact jet of an invariant surface from its curve jet.
pub fn jet_analytic(surface: &InvariantSurface, s: f64, t: f64) -> Result<SurfaceJet> {
    let position = surface.point(s, t)?;
    let j = surface.curve.jet(s)?;
    let z = CoordVector::ZERO;
    let ([d1a, d1b], [d2a, d2b]) = (j.d1, j.d2);
    let (d_s, d_t, d_ss) = match surface.family {
        Family::N => (
            CoordVector::new(0.0, d1a, d1b),
            CoordVector::new(1.0, 0.0, 0.0),
            CoordVector::new(0.0, d2a, d2b),
        ),
        Family::A => (
            CoordVector::new(d1a, 0.0, d1b),
            CoordVector::new(0.0, 1.0, 0.0),
            CoordVector::new(d2a, 0.0, d2b),
        ),
        Family::K => (
            CoordVector::new(d1a, d1b, 0.0),
            CoordVector::new(0.0, 0.0, 1.0),
            CoordVector::new(d2a, d2b, 0.0),
        ),
    };
    Ok(SurfaceJet {
        position,
        d_s,
        d_t,
        d_ss,
        d_st: z,
        d_tt: z,
    })
}

/// Default finite-difference step, scaled with the parameter magnitude.
pub fn default_step(s: f64, t: f64) -> f64 {
    1e-4 * 1f64.max(s.abs()).max(t.abs())
}

/// Central-difference jet of an arbitrary immersion.
pub fn jet_finite_difference(
    psi: impl Fn(f64, f64) -> Result<Sl2Point>,
    s: f64,
    t: f64,
    h: f64,
) -> Result<SurfaceJet> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {h}"
        )));
    }
    let p = |ds: f64, dt: f64| -> Result<[f64; 3]> { Ok(psi(s + ds * h, t + dt * h)?.coords()) };
    let c = p(0.0, 0.0)?;
    let (sp, sm, tp, tm) = (p(1.0, 0.0)?, p(-1.0, 0.0)?, p(0.0, 1.0)?, p(0.0, -1.0)?);
    let (pp, pm, mp, mm) = (p(1.0, 1.0)?, p(1.0, -1.0)?, p(-1.0, 1.0)?, p(-1.0, -1.0)?);
    let v = |f: &dyn Fn(usize) -> f64| CoordVector::new(f(0), f(1), f(2));
    let h2 = h * h;
    Ok(SurfaceJet {
        position: Sl2Point::from_coords(c)?,
        d_s: v(&|i| (sp[i] - sm[i]) / (2.0 * h)),
        d_t: v(&|i| (tp[i] - tm[i]) / (2.0 * h)),
        d_ss: v(&|i| (sp[i] - 2.0 * c[i] + sm[i]) / h2),
        d_st: v(&|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h2)),
        d_tt: v(&|i| (tp[i] - 2.0 * c[i] + tm[i]) / h2),
    })
}

/// Fundamental forms at a jet. The normal is `d_s x d_t` (frame cross
/// product) normalized and multiplied by the orientation sign.
pub fn fundamental_forms(jet: &SurfaceJet, orientation: Orientation) -> Result<FundamentalForms> {
    let p = &jet.position;
    let g = metric_at(p)?;
    let e = metric_inner(&g, &jet.d_s, &jet.d_s);
    let f = metric_inner(&g, &jet.d_s, &jet.d_t);
    let gg = metric_inner(&g, &jet.d_t, &jet.d_t);
    let disc = e * gg - f * f;
    if !(disc >= DISCRIMINANT_TOL) {
        return Err(Error::Degenerate { discriminant: disc });
    }
    let a = coord_to_frame(p, &jet.d_s)?;
    let b = coord_to_frame(p, &jet.d_t)?;
    let cross = a.cross(&b);
    let normal = cross * (orientation.sign() / cross.norm());
    let gamma = christoffels_at(p)?;
    let second = |u: &CoordVector, v: &CoordVector, dv: &CoordVector| -> Result<f64> {
        Ok(coord_to_frame(p, &covariant_derivative(&gamma, u, v, dv))?.dot(&normal))
    };
    Ok(FundamentalForms {
        e,
        f,
        g: gg,
        l: second(&jet.d_s, &jet.d_s, &jet.d_ss)?,
        m: second(&jet.d_s, &jet.d_t, &jet.d_st)?,
        n: second(&jet.d_t, &jet.d_t, &jet.d_tt)?,
        normal,
    })
}

/// Oracle normal and mean curvature of an invariant surface, oriented to
/// agree with the family's closed forms.
pub fn oracle_normal_and_h(
    surface: &InvariantSurface,
    s: f64,
    t: f64,
) -> Result<(FrameVector, f64)> {
    let ff = fundamental_forms(&jet_analytic(surface, s, t)?, surface.oracle_orientation())?;
    Ok((ff.normal, ff.mean_curvature()))
}

/// Same as [`oracle_normal_and_h`] but from a finite-difference jet of the
/// immersion, with step `h` (default [`default_step`]).
pub fn oracle_normal_and_h_fd(
    surface: &InvariantSurface,
    s: f64,
    t: f64,
    h: Option<f64>,
) -> Result<(FrameVector, f64)> {
    let h = h.unwrap_or_else(|| default_step(s, t));
    let jet = jet_finite_difference(|a, b| surface.point(a, b), s, t, h)?;
    let ff = fundamental_forms(&jet, surface.oracle_orientation())?;
    Ok((ff.normal, ff.mean_curvature()))
}

/// Gaussian curvature of the induced metric from the Brioschi formula, with
/// `E, F, G` differentiated by central differences of step `h`.
pub fn gauss_curvature_induced(
    jet: impl Fn(f64, f64) -> Result<SurfaceJet>,
    s: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    let efg = |a: f64, b: f64| -> Result<[f64; 3]> {
        let j = jet(a, b)?;
        let g = metric_at(&j.position)?;
        Ok([
            metric_inner(&g, &j.d_s, &j.d_s),
            metric_inner(&g, &j.d_s, &j.d_t),
            metric_inner(&g, &j.d_t, &j.d_t),
        ])
    };
    let c = efg(s, t)?;
    let (sp, sm) = (efg(s + h, t)?, efg(s - h, t)?);
    let (tp, tm) = (efg(s, t + h)?, efg(s, t - h)?);
    let (pp, pm, mp, mm) = (
        efg(s + h, t + h)?,
        efg(s + h, t - h)?,
        efg(s - h, t + h)?,
        efg(s - h, t - h)?,
    );
    let ds = |i: usize| (sp[i] - sm[i]) / (2.0 * h);
    let dt = |i: usize| (tp[i] - tm[i]) / (2.0 * h);
    let dss = |i: usize| (sp[i] - 2.0 * c[i] + sm[i]) / (h * h);
    let dtt = |i: usize| (tp[i] - 2.0 * c[i] + tm[i]) / (h * h);
    let dst = |i: usize| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
    let [e, f, g] = c;
    let (e_s, e_t, f_s, f_t, g_s, g_t) = (ds(0), dt(0), ds(1), dt(1), ds(2), dt(2));
    let (e_tt, f_st, g_ss) = (dtt(0), dst(1), dss(2));
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = det3([
        [-0.5 * e_tt + f_st - 0.5 * g_ss, 0.5 * e_s, f_s - 0.5 * e_t],
        [f_t - 0.5 * g_s, e, f],
        [0.5 * g_t, f, g],
    ]);
    let b = det3([
        [0.0, 0.5 * e_t, 0.5 * g_s],
        [0.5 * e_t, e, f],
        [0.5 * g_s, f, g],
    ]);
    let disc = e * g - f * f;
    if !(disc >= DISCRIMINANT_TOL) {
        return Err(Error::Degenerate { discriminant: disc });
    }
    Ok((a - b) / (disc * disc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        closed_form_normal_and_h, sigma_theta0, sigma_x0, sigma_y0, trig_curve, TrigCoordinate,
    };
    use approx::assert_abs_diff_eq;

    fn wiggly(family: Family) -> InvariantSurface {
        let a = TrigCoordinate {
            c0: 0.2,
            c1: 0.8,
            amp: 0.3,
            freq: 1.7,
            phase: 0.4,
            positive: false,
        };
        let b = TrigCoordinate {
            c0: -0.1,
            c1: 0.2,
            amp: 0.4,
            freq: 0.9,
            phase: 1.1,
            positive: true,
        };
        match family {
            Family::N => InvariantSurface::new(trig_curve(family, b, a)),
            _ => InvariantSurface::new(trig_curve(family, a, b)),
        }
    }

    #[test]
    fn special_surfaces_first_forms_and_curvature() {
        let st = sigma_theta0(0.0);
        let a = st.member(Family::A).unwrap();
        let ff =
            fundamental_forms(&jet_analytic(a, 0.0, 1.0).unwrap(), a.oracle_orientation()).unwrap();
        assert_abs_diff_eq!(ff.e, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ff.f, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ff.g, 0.25, epsilon = 1e-15);

        for (sp, k) in [
            (sigma_x0(0.5), 0.0),
            (sigma_y0(2.0).unwrap(), 0.0),
            (sigma_theta0(0.0), -4.0),
        ] {
            for m in &sp.members {
                let (s, t) = (0.7, 1.2);
                let (n, h) = oracle_normal_and_h(m, s, t).unwrap();
                assert!(
                    n.max_abs_diff(&sp.expected_normal) < 1e-12,
                    "{} {:?}",
                    sp.name,
                    m.family
                );
                assert_abs_diff_eq!(h, sp.expected_h, epsilon = 1e-12);
                let kg = gauss_curvature_induced(|a, b| jet_analytic(m, a, b), s, t, 2e-4).unwrap();
                assert_abs_diff_eq!(kg, k, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn oracle_matches_closed_forms() {
        for fam in Family::ALL {
            let surf = wiggly(fam);
            for (s, t) in [(0.1, 0.5), (-0.8, 1.7), (1.3, 0.2)] {
                let (n0, h0) = closed_form_normal_and_h(&surf, s, t).unwrap();
                let (n1, h1) = oracle_normal_and_h(&surf, s, t).unwrap();
                assert!(n0.max_abs_diff(&n1) < 1e-12, "{fam}");
                assert_abs_diff_eq!(h0, h1, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn finite_difference_jet_converges_quadratically() {
        let surf = wiggly(Family::A);
        let (s, t) = (0.3, 0.9);
        let (_, exact) = oracle_normal_and_h(&surf, s, t).unwrap();
        let e1 = (oracle_normal_and_h_fd(&surf, s, t, Some(1e-2)).unwrap().1 - exact).abs();
        let e2 = (oracle_normal_and_h_fd(&surf, s, t, Some(5e-3)).unwrap().1 - exact).abs();
        let order = (e1 / e2).log2();
        assert!((1.9..=2.1).contains(&order), "order {order}");
    }

    #[test]
    fn orientation_flip_negates() {
        let surf = wiggly(Family::K);
        let (n, h) = oracle_normal_and_h(&surf, 0.4, 0.0).unwrap();
        let (nf, hf) = oracle_normal_and_h(&surf.flipped(), 0.4, 0.0).unwrap();
        assert!(n.max_abs_diff(&(-nf)) < 1e-15);
        assert_abs_diff_eq!(h, -hf, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_immersion_rejected() {
        let jet = SurfaceJet {
            position: Sl2Point::new(0.0, 1.0, 0.0).unwrap(),
            d_s: CoordVector::new(1.0, 0.0, 0.0),
            d_t: CoordVector::new(2.0, 0.0, 0.0),
            d_ss: CoordVector::ZERO,
            d_st: CoordVector::ZERO,
            d_tt: CoordVector::ZERO,
        };
        assert!(matches!(
            fundamental_forms(&jet, Orientation::Positive),
            Err(Error::Degenerate { .. })
        ));
        assert!(jet_finite_difference(|a, b| Sl2Point::new(a, 1.0, b), 0.0, 0.0, 0.0).is_err());
    }
}
