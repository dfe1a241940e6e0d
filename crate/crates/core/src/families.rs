//! Surfaces invariant under one of the Iwasawa subgroups.
//!
//! Each family is swept out by a planar generating curve `alpha(s)` and a
//! group parameter `t`:
//!
//! | family | curve            | immersion `(x, y, theta)` | `t` domain |
//! |--------|------------------|---------------------------|------------|
//! | `N`    | `(y(s), theta(s))` | `(t, y(s), theta(s))`   | all reals  |
//! | `A`    | `(x(s), theta(s))` | `(x(s), t, theta(s))`   | `t > 0`    |
//! | `K`    | `(x(s), y(s))`     | `(x(s), y(s), t)`       | all reals  |

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_dual::{Dual2_64, DualNum};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{FrameVector, Sl2Point};
use crate::ode::{integrate, Event, FnSystem, IntegratorConfig, Termination, Trajectory};

/// Integration stops when `y` falls to this floor.
pub const Y_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    N,
    A,
    K,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::N, Family::A, Family::K];

    /// Sign relating the oracle normal (normalized cross product of `d_s` and
    /// `d_t`) to the closed-form normal of the family.
    pub fn closed_form_alignment(&self) -> Orientation {
        match self {
            Family::N | Family::A => Orientation::Positive,
            Family::K => Orientation::Negative,
        }
    }

    pub fn check_fiber(&self, t: f64) -> Result<()> {
        if !t.is_finite() || (*self == Family::A && !(t > 0.0)) {
            return domain(format!(
                "fiber parameter t = {t} outside the {self}-family domain"
            ));
        }
        Ok(())
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "N" | "n" => Some(Family::N),
            "A" | "a" => Some(Family::A),
            "K" | "k" => Some(Family::K),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::N => "N",
            Family::A => "A",
            Family::K => "K",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(&self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flip(&self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn compose(&self, other: Orientation) -> Self {
        if *self == other {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }
}

/// Value, first and second derivative of the two curve coordinates at `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveJet {
    pub value: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

type JetFn = Arc<dyn Fn(f64) -> Result<CurveJet> + Send + Sync>;
type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A generating curve with exact (or ODE-consistent) derivative jets on a
/// closed validity interval.
#[derive(Clone)]
pub struct GeneratingCurve {
    family: Family,
    name: String,
    domain: (f64, f64),
    jet: JetFn,
    phi: Option<PhiFn>,
}

impl fmt::Debug for GeneratingCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingCurve")
            .field("family", &self.family)
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("angle_form", &self.phi.is_some())
            .finish()
    }
}

impl GeneratingCurve {
    pub fn new(
        family: Family,
        name: impl Into<String>,
        domain: (f64, f64),
        jet: impl Fn(f64) -> Result<CurveJet> + Send + Sync + 'static,
    ) -> Self {
        Self {
            family,
            name: name.into(),
            domain,
            jet: Arc::new(jet),
            phi: None,
        }
    }

    /// Curve given by closed forms; derivatives come from second-order
    /// forward-mode differentiation, so they are exact to round-off.
    pub fn from_dual(
        family: Family,
        name: impl Into<String>,
        domain: (f64, f64),
        f: impl Fn(Dual2_64) -> [Dual2_64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self::new(family, name, domain, move |s| Ok(dual_jet(&f, s)))
    }

    pub fn with_phi(mut self, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.phi = Some(Arc::new(phi));
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.domain.0 && s <= self.domain.1
    }

    pub fn jet(&self, s: f64) -> Result<CurveJet> {
        if !self.contains(s) {
            return domain(format!(
                "s = {s} outside the validity interval [{}, {}] of {}",
                self.domain.0, self.domain.1, self.name
            ));
        }
        let j = (self.jet)(s)?;
        let all = j.value.iter().chain(&j.d1).chain(&j.d2);
        if all.clone().any(|v| !v.is_finite()) {
            return domain(format!("non-finite jet of {} at s = {s}", self.name));
        }
        if self.family != Family::A
            && !(j.value[if self.family == Family::N { 0 } else { 1 }] > 0.0)
        {
            return domain(format!("{} has y <= 0 at s = {s}", self.name));
        }
        Ok(j)
    }

    /// Angle function, for curves built in angle form.
    pub fn phi(&self, s: f64) -> Option<f64> {
        self.phi.as_ref().map(|p| p(s))
    }

    /// Family-specific speed: `sqrt(y'^2 + 2 y^2 theta'^2)` for `N`,
    /// `sqrt(x'^2 + theta'^2)` for `A` (non-zero iff the surface speed is),
    /// `sqrt(x'^2 + y'^2)` for `K`.
    pub fn speed(&self, s: f64) -> Result<f64> {
        let j = self.jet(s)?;
        Ok(match self.family {
            Family::N => (j.d1[0].powi(2) + 2.0 * (j.value[0] * j.d1[1]).powi(2)).sqrt(),
            Family::A | Family::K => j.d1[0].hypot(j.d1[1]),
        })
    }

    /// The curve `s -> alpha(k s)`.
    pub fn reparametrized(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reparametrization factor {k}"
            )));
        }
        let inner = self.clone();
        let (a, b) = (self.domain.0 / k, self.domain.1 / k);
        let dom = (a.min(b), a.max(b));
        let mut out = Self::new(
            self.family,
            format!("{}(s*{k})", self.name),
            dom,
            move |s| {
                let j = inner.jet(k * s)?;
                Ok(CurveJet {
                    value: j.value,
                    d1: [k * j.d1[0], k * j.d1[1]],
                    d2: [k * k * j.d2[0], k * k * j.d2[1]],
                })
            },
        );
        if let Some(p) = self.phi.clone() {
            out.phi = Some(Arc::new(move |s| p(k * s)));
        }
        Ok(out)
    }
}

pub(crate) fn dual_jet(f: &impl Fn(Dual2_64) -> [Dual2_64; 2], s: f64) -> CurveJet {
    let r = f(Dual2_64::from_re(s).derivative());
    CurveJet {
        value: [r[0].re, r[1].re],
        d1: [r[0].v1, r[1].v1],
        d2: [r[0].v2, r[1].v2],
    }
}

/// Jet of an angle-form curve from its position, `phi` and `phi'`.
///
/// `N`: `y' = sqrt2 y cos phi`, `theta' = sin phi`.
/// `K`: `x' = 2 y cos phi`, `y' = 2 y sin phi`.
pub fn angle_form_jet(family: Family, value: [f64; 2], phi: f64, dphi: f64) -> Result<CurveJet> {
    let (sp, cp) = phi.sin_cos();
    match family {
        Family::N => {
            let y = value[0];
            let dy = SQRT_2 * y * cp;
            Ok(CurveJet {
                value,
                d1: [dy, sp],
                d2: [SQRT_2 * (dy * cp - y * sp * dphi), cp * dphi],
            })
        }
        Family::K => {
            let y = value[1];
            let dy = 2.0 * y * sp;
            Ok(CurveJet {
                value,
                d1: [2.0 * y * cp, dy],
                d2: [
                    2.0 * (dy * cp - y * sp * dphi),
                    2.0 * (dy * sp + y * cp * dphi),
                ],
            })
        }
        Family::A => Err(Error::Unsupported(
            "A-family curves have no angle form".into(),
        )),
    }
}

/// `H = -phi'/sqrt2 + sin phi` for angle-form `N`-curves.
pub fn n_angle_mean_curvature(phi: f64, dphi: f64) -> f64 {
    -dphi / SQRT_2 + phi.sin()
}

/// `H = phi'/2 + cos phi` for angle-form rotational curves.
pub fn k_angle_mean_curvature(phi: f64, dphi: f64) -> f64 {
    0.5 * dphi + phi.cos()
}

/// Integrates the angle-form system of `family` for a prescribed
/// `phi(s) -> (phi, phi')`, starting from `initial` at `s0` and covering
/// `span` on both sides of `s0` until the ends or the `y` floor.
pub fn curve_from_phi(
    family: Family,
    phi: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    s0: f64,
    initial: [f64; 2],
    span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<GeneratingCurve> {
    if !(span.0 <= s0 && s0 <= span.1) {
        return Err(Error::InvalidParameter(format!(
            "s0 = {s0} outside {span:?}"
        )));
    }
    let yi = match family {
        Family::N => 0,
        Family::K => 1,
        Family::A => {
            return Err(Error::Unsupported(
                "A-family curves have no angle form".into(),
            ))
        }
    };
    if !(initial[yi] > 0.0) {
        return domain(format!("initial y = {} is not positive", initial[yi]));
    }
    let phi = Arc::new(phi);
    let rhs_phi = phi.clone();
    let system = FnSystem::with_domain(
        2,
        move |s, u: &[f64], du: &mut [f64]| {
            let (sp, cp) = rhs_phi(s).0.sin_cos();
            match family {
                Family::N => {
                    du[0] = SQRT_2 * u[0] * cp;
                    du[1] = sp;
                }
                _ => {
                    du[0] = 2.0 * u[1] * cp;
                    du[1] = 2.0 * u[1] * sp;
                }
            }
        },
        move |u: &[f64]| u[yi] > 0.0,
    );
    let events = [Event::lower_bound("left domain y>0", yi, Y_FLOOR)];
    let fwd = integrate(&system, &initial, (s0, span.1), config, &events)?;
    let bwd = integrate(&system, &initial, (s0, span.0), config, &events)?;
    for t in [&fwd, &bwd] {
        if let Termination::StepFailure(m) = t.termination() {
            return Err(Error::Integrator(m.clone()));
        }
    }
    let traj = Arc::new(Trajectory::stitch(bwd, fwd));
    let dom = traj.span();
    let jet_phi = phi.clone();
    let curve = GeneratingCurve::new(family, format!("{family}-curve from phi"), dom, move |s| {
        let u = traj
            .interpolate(s)
            .ok_or_else(|| Error::Domain(format!("s = {s} outside the integrated range")))?;
        let (p, dp) = jet_phi(s);
        angle_form_jet(family, [u[0], u[1]], p, dp)
    });
    Ok(curve.with_phi(move |s| phi(s).0))
}

#[derive(Debug, Clone)]
pub struct InvariantSurface {
    pub family: Family,
    pub curve: GeneratingCurve,
    /// Orientation relative to the family's closed-form normal.
    pub orientation: Orientation,
}

impl InvariantSurface {
    pub fn new(curve: GeneratingCurve) -> Self {
        Self {
            family: curve.family(),
            curve,
            orientation: Orientation::Positive,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn flipped(&self) -> Self {
        self.clone().with_orientation(self.orientation.flip())
    }

    pub fn name(&self) -> &str {
        self.curve.name()
    }

    /// Orientation to pass to the oracle so that its normal matches the
    /// closed-form one.
    pub fn oracle_orientation(&self) -> Orientation {
        self.orientation
            .compose(self.family.closed_form_alignment())
    }

    pub fn point(&self, s: f64, t: f64) -> Result<Sl2Point> {
        self.family.check_fiber(t)?;
        let j = self.curve.jet(s)?;
        let [a, b] = j.value;
        match self.family {
            Family::N => Sl2Point::new(t, a, b),
            Family::A => Sl2Point::new(a, t, b),
            Family::K => Sl2Point::new(a, b, t),
        }
    }
}

/// Closed-form unit normal (frame components) and mean curvature.
pub fn closed_form_normal_and_h(
    surface: &InvariantSurface,
    s: f64,
    t: f64,
) -> Result<(FrameVector, f64)> {
    surface.family.check_fiber(t)?;
    let j = surface.curve.jet(s)?;
    let ([u, v], [du, dv], [ddu, ddv]) = (j.value, j.d1, j.d2);
    let irregular = |phi: f64| !(phi > 1e-12) || !phi.is_finite();
    let (n, h) = match surface.family {
        Family::N => {
            let (y, dy, ddy, dth, ddth) = (u, du, ddu, dv, ddv);
            let phi = (dy * dy + 2.0 * y * y * dth * dth).sqrt();
            if irregular(phi) {
                return Err(Error::Regularity { s, speed: phi });
            }
            let n1 = dy / (SQRT_2 * phi);
            let n = FrameVector::new(n1, SQRT_2 * y * dth / phi, -n1);
            let h = SQRT_2 * y * y / phi.powi(3) * (dth * ddy - dy * ddth + 2.0 * y * dth.powi(3));
            (n, h)
        }
        Family::A => {
            let (dx, ddx, dth, ddth) = (du, ddu, dv, ddv);
            let w = dx + 2.0 * t * dth;
            let phi = w.hypot(dx);
            if irregular(phi) {
                return Err(Error::Regularity { s, speed: phi });
            }
            let n = FrameVector::new(-w / phi, 0.0, dx / phi);
            let h = 2.0 * t * t / phi.powi(3) * (dx * ddth - dth * ddx);
            (n, h)
        }
        Family::K => {
            let (y, dx, dy, ddx, ddy) = (v, du, dv, ddu, ddv);
            let phi = dx.hypot(dy);
            if irregular(phi) {
                return Err(Error::Regularity { s, speed: phi });
            }
            let n = FrameVector::new(-dy / phi, dx / phi, 0.0);
            let h = (y * (dx * ddy - ddx * dy) + dx * phi * phi) / phi.powi(3);
            (n, h)
        }
    };
    let sg = surface.orientation.sign();
    Ok((n * sg, h * sg))
}

/// A surface with one coordinate fixed, as a member of every family it
/// belongs to, with its expected normal and mean curvature.
#[derive(Debug, Clone)]
pub struct SpecialSurface {
    pub name: String,
    pub members: Vec<InvariantSurface>,
    pub expected_normal: FrameVector,
    pub expected_h: f64,
}

impl SpecialSurface {
    pub fn member(&self, family: Family) -> Option<&InvariantSurface> {
        self.members.iter().find(|m| m.family == family)
    }
}

/// `x = x0`: A-member `(x0, t, s)`, K-member `(x0, e^{2s}, t)`.
pub fn sigma_x0(x0: f64) -> SpecialSurface {
    let inf = f64::INFINITY;
    let a =
        GeneratingCurve::from_dual(Family::A, format!("sigma-x0:{x0}"), (-inf, inf), move |s| {
            [Dual2_64::from_re(x0), s]
        });
    let k =
        GeneratingCurve::from_dual(Family::K, format!("sigma-x0:{x0}"), (-inf, inf), move |s| {
            [Dual2_64::from_re(x0), (s * 2.0).exp()]
        })
        .with_phi(|_| FRAC_PI_2);
    SpecialSurface {
        name: format!("sigma-x0:{x0}"),
        members: vec![InvariantSurface::new(a), InvariantSurface::new(k)],
        expected_normal: FrameVector::new(-1.0, 0.0, 0.0),
        expected_h: 0.0,
    }
}

/// `y = y0`: N-member `(t, y0, s)`, K-member `(2 y0 s, y0, t)`.
pub fn sigma_y0(y0: f64) -> Result<SpecialSurface> {
    if !(y0 > 0.0 && y0.is_finite()) {
        return domain(format!("sigma-y0 needs y0 > 0, got {y0}"));
    }
    let inf = f64::INFINITY;
    let n =
        GeneratingCurve::from_dual(Family::N, format!("sigma-y0:{y0}"), (-inf, inf), move |s| {
            [Dual2_64::from_re(y0), s]
        });
    let k =
        GeneratingCurve::from_dual(Family::K, format!("sigma-y0:{y0}"), (-inf, inf), move |s| {
            [s * (2.0 * y0), Dual2_64::from_re(y0)]
        })
        .with_phi(|_| 0.0);
    Ok(SpecialSurface {
        name: format!("sigma-y0:{y0}"),
        members: vec![InvariantSurface::new(n), InvariantSurface::new(k)],
        expected_normal: FrameVector::new(0.0, 1.0, 0.0),
        expected_h: 1.0,
    })
}

/// `theta = theta0`: N-member `(t, s, theta0)` for `s > 0`, A-member
/// `(s, t, theta0)`. The A-member carries orientation `-1` so both report
/// the normal `(e1 - e3)/sqrt2`.
pub fn sigma_theta0(theta0: f64) -> SpecialSurface {
    let inf = f64::INFINITY;
    let n = GeneratingCurve::from_dual(
        Family::N,
        format!("sigma-theta0:{theta0}"),
        (0.0, inf),
        move |s| [s, Dual2_64::from_re(theta0)],
    );
    let a = GeneratingCurve::from_dual(
        Family::A,
        format!("sigma-theta0:{theta0}"),
        (-inf, inf),
        move |s| [s, Dual2_64::from_re(theta0)],
    );
    let r = 1.0 / SQRT_2;
    SpecialSurface {
        name: format!("sigma-theta0:{theta0}"),
        members: vec![
            InvariantSurface::new(n),
            InvariantSurface::new(a).with_orientation(Orientation::Negative),
        ],
        expected_normal: FrameVector::new(r, 0.0, -r),
        expected_h: 0.0,
    }
}

/// Generic closed-form curve helper used by the samplers and tests:
/// each coordinate is `c0 + c1 s + a sin(w s + d)`, exponentiated for the
/// coordinate that must stay positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigCoordinate {
    pub c0: f64,
    pub c1: f64,
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
    /// Evaluate `exp(...)` instead, keeping the coordinate positive.
    pub positive: bool,
}

impl TrigCoordinate {
    pub fn eval(&self, s: Dual2_64) -> Dual2_64 {
        let v = (s * self.freq + self.phase).sin() * self.amp + s * self.c1 + self.c0;
        if self.positive {
            v.exp()
        } else {
            v
        }
    }
}

pub fn trig_curve(
    family: Family,
    first: TrigCoordinate,
    second: TrigCoordinate,
) -> GeneratingCurve {
    let inf = f64::INFINITY;
    GeneratingCurve::from_dual(family, format!("trig-{family}"), (-inf, inf), move |s| {
        [first.eval(s), second.eval(s)]
    })
}
