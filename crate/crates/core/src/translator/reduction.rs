//! First-order reductions of the translator equation.
//!
//! State layouts:
//! - K-family (all fields): `[x, y, phi]` with `x' = 2y cos phi`,
//!   `y' = 2y sin phi` and a field-specific `phi'`.
//! - `(N, dtheta)`: `[y, theta, phi]` with `y' = sqrt2 y cos phi`,
//!   `theta' = sin phi`, `phi' = cos phi + sqrt2 sin phi`.
//! - `(N, dx)`: `[y, theta, y']` for the minimal equation `y'' + 2y = 0`
//!   with `theta = s`.
//! - `(N, v)`: `[y, theta, f]` with `f = y'/y`, `2f' + f^2 + 2 = 0`,
//!   `theta = s`.

use std::f64::consts::SQRT_2;

use crate::error::{domain, Error, Result};
use crate::families::{angle_form_jet, CurveJet, Family, Y_FLOOR};
use crate::geometry::KillingFieldKind;
use crate::ode::{integrate, Event, IntegratorConfig, OdeSystem, Trajectory};

use super::TranslatorProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// `[x, y, phi]`
    KAngle,
    /// `[y, theta, phi]`
    NAngle,
    /// `[y, theta, y']`
    NMinimal,
    /// `[y, theta, f]`, `f = y'/y`
    NRiccati,
}

impl ReductionKind {
    pub fn of(problem: &TranslatorProblem) -> Result<Self> {
        use KillingFieldKind::*;
        match (problem.family, problem.field) {
            (Family::K, _) => Ok(Self::KAngle),
            (Family::N, Dtheta) => Ok(Self::NAngle),
            (Family::N, Dx) => Ok(Self::NMinimal),
            (Family::N, V) => Ok(Self::NRiccati),
            _ => Err(Error::Unsupported(format!(
                "no reduction ODE for {problem}"
            ))),
        }
    }

    /// Index of `y` in the state vector.
    pub fn y_index(&self) -> usize {
        match self {
            Self::KAngle => 1,
            _ => 0,
        }
    }

    /// Names of the state components, for initial-condition parsing.
    pub fn state_names(&self) -> [&'static str; 3] {
        match self {
            Self::KAngle => ["x", "y", "phi"],
            Self::NAngle => ["y", "theta", "phi"],
            Self::NMinimal => ["y", "theta", "dy"],
            Self::NRiccati => ["y", "theta", "f"],
        }
    }
}

fn k_phi_prime(field: KillingFieldKind, x: f64, y: f64, phi: f64) -> f64 {
    let (sp, cp) = phi.sin_cos();
    match field {
        KillingFieldKind::Dx => -(sp + 2.0 * y * cp) / y,
        KillingFieldKind::Dtheta => -2.0 * cp,
        KillingFieldKind::V => -(y * cp + x * sp) / y,
        KillingFieldKind::W => (x - 2.0) * cp - (x * x - y * y) * sp / (2.0 * y),
    }
}

/// Derivative of the reduced state for `problem` at `state`.
pub fn reduction_rhs(problem: &TranslatorProblem, state: &[f64]) -> Result<[f64; 3]> {
    let kind = ReductionKind::of(problem)?;
    if state.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "state of length {} (expected 3)",
            state.len()
        )));
    }
    let y = state[kind.y_index()];
    if !(y > 0.0) {
        return domain(format!("y = {y} is not positive"));
    }
    Ok(match kind {
        ReductionKind::KAngle => {
            let (x, phi) = (state[0], state[2]);
            let (sp, cp) = phi.sin_cos();
            [
                2.0 * y * cp,
                2.0 * y * sp,
                k_phi_prime(problem.field, x, y, phi),
            ]
        }
        ReductionKind::NAngle => {
            let (sp, cp) = state[2].sin_cos();
            [SQRT_2 * y * cp, sp, cp + SQRT_2 * sp]
        }
        ReductionKind::NMinimal => [state[2], 1.0, -2.0 * y],
        ReductionKind::NRiccati => {
            let f = state[2];
            [f * y, 1.0, -(f * f + 2.0) / 2.0]
        }
    })
}

/// The autonomous `(y, phi)` system of the `(K, dx)` reduction:
/// `y' = 2y sin phi`, `phi' = -sin(phi)/y - 2 cos phi`.
pub fn autonomous_rhs(state: [f64; 2]) -> Result<[f64; 2]> {
    let [y, phi] = state;
    if !(y > 0.0) {
        return domain(format!("y = {y} is not positive"));
    }
    let (sp, cp) = phi.sin_cos();
    Ok([2.0 * y * sp, -sp / y - 2.0 * cp])
}

#[derive(Debug, Clone, Copy)]
pub struct ReductionSystem {
    problem: TranslatorProblem,
    kind: ReductionKind,
}

impl ReductionSystem {
    pub fn new(problem: TranslatorProblem) -> Result<Self> {
        Ok(Self {
            problem,
            kind: ReductionKind::of(&problem)?,
        })
    }

    pub fn kind(&self) -> ReductionKind {
        self.kind
    }
}

impl OdeSystem for ReductionSystem {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, _s: f64, u: &[f64], du: &mut [f64]) {
        match reduction_rhs(&self.problem, u) {
            Ok(d) => du.copy_from_slice(&d),
            Err(_) => du.fill(f64::NAN),
        }
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u[self.kind.y_index()] > 0.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AutonomousSystem;

impl OdeSystem for AutonomousSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _s: f64, u: &[f64], du: &mut [f64]) {
        match autonomous_rhs([u[0], u[1]]) {
            Ok(d) => du.copy_from_slice(&d),
            Err(_) => du.fill(f64::NAN),
        }
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u[0] > 0.0
    }
}

/// Generating-curve jet of a reduced state.
pub fn state_jet(problem: &TranslatorProblem, state: &[f64]) -> Result<CurveJet> {
    let kind = ReductionKind::of(problem)?;
    let d = reduction_rhs(problem, state)?;
    match kind {
        ReductionKind::KAngle => angle_form_jet(Family::K, [state[0], state[1]], state[2], d[2]),
        ReductionKind::NAngle => angle_form_jet(Family::N, [state[0], state[1]], state[2], d[2]),
        ReductionKind::NMinimal => Ok(CurveJet {
            value: [state[0], state[1]],
            d1: [state[2], 1.0],
            d2: [d[2], 0.0],
        }),
        ReductionKind::NRiccati => {
            let (y, f) = (state[0], state[2]);
            Ok(CurveJet {
                value: [y, state[1]],
                d1: [f * y, 1.0],
                d2: [(d[2] + f * f) * y, 0.0],
            })
        }
    }
}

/// Direction angle of the curve in the angle-form convention of its family.
pub fn state_phi(problem: &TranslatorProblem, state: &[f64]) -> Result<f64> {
    Ok(match ReductionKind::of(problem)? {
        ReductionKind::KAngle | ReductionKind::NAngle => state[2],
        ReductionKind::NMinimal | ReductionKind::NRiccati => {
            let j = state_jet(problem, state)?;
            j.d1[1].atan2(j.d1[0] / (SQRT_2 * j.value[0]))
        }
    })
}

/// Integrates the reduction of `problem` from `initial` at `s0` across
/// `span`, in both directions when `s0` is interior. Integration stops at
/// the `y` floor.
pub fn solve_reduction(
    problem: &TranslatorProblem,
    initial: [f64; 3],
    s0: f64,
    span: (f64, f64),
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let system = ReductionSystem::new(*problem)?;
    if !(span.0 <= s0 && s0 <= span.1) {
        return Err(Error::InvalidParameter(format!(
            "s0 = {s0} outside {span:?}"
        )));
    }
    if !system.in_domain(&initial) {
        return domain("initial state outside y > 0".to_string());
    }
    let events = [Event::lower_bound(
        "left domain y>0",
        system.kind.y_index(),
        Y_FLOOR,
    )];
    let fwd = integrate(&system, &initial, (s0, span.1), config, &events)?;
    if s0 == span.0 {
        return Ok(fwd);
    }
    let bwd = integrate(&system, &initial, (s0, span.0), config, &events)?;
    if s0 == span.1 {
        return Ok(bwd);
    }
    Ok(Trajectory::stitch(bwd, fwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        closed_form_normal_and_h, k_angle_mean_curvature, n_angle_mean_curvature, GeneratingCurve,
        InvariantSurface,
    };
    use crate::geometry::{killing_at, Sl2Point};
    use approx::assert_abs_diff_eq;

    #[test]
    fn autonomous_values() {
        let d = autonomous_rhs([1.0, 0.0]).unwrap();
        assert_eq!(d, [0.0, -2.0]);
        let d = autonomous_rhs([2.0, std::f64::consts::PI]).unwrap();
        assert_abs_diff_eq!(d[0], 0.0, epsilon = 1e-15);
        assert!(autonomous_rhs([0.0, 0.0]).is_err());
    }

    #[test]
    fn ntheta_phi_prime() {
        let p = TranslatorProblem::new(Family::N, KillingFieldKind::Dtheta);
        let d = reduction_rhs(&p, &[1.0, 0.0, 2f64.sqrt().atan()]).unwrap();
        assert_abs_diff_eq!(d[2], 3f64.sqrt(), epsilon = 1e-15);
        let d = reduction_rhs(&p, &[1.0, 0.0, (-1.0 / SQRT_2).atan()]).unwrap();
        assert_abs_diff_eq!(d[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unsupported_problems() {
        for (f, k) in [
            (Family::N, KillingFieldKind::W),
            (Family::A, KillingFieldKind::Dx),
        ] {
            assert!(reduction_rhs(&TranslatorProblem::new(f, k), &[1.0, 1.0, 1.0]).is_err());
        }
    }

    /// Along the reduction the translator equation holds pointwise.
    #[test]
    fn reduced_states_are_translators() {
        let states: [(Family, KillingFieldKind, [f64; 3]); 7] = [
            (Family::K, KillingFieldKind::Dx, [0.3, 1.2, 0.4]),
            (Family::K, KillingFieldKind::Dtheta, [-0.5, 0.7, 2.0]),
            (Family::K, KillingFieldKind::V, [1.1, 0.9, -0.6]),
            (Family::K, KillingFieldKind::W, [0.4, 1.6, 1.0]),
            (Family::N, KillingFieldKind::Dtheta, [1.3, 0.2, 0.5]),
            (Family::N, KillingFieldKind::Dx, [0.8, 0.1, -0.7]),
            (Family::N, KillingFieldKind::V, [1.5, 0.0, 0.3]),
        ];
        for (fam, field, st) in states {
            let p = TranslatorProblem::new(fam, field);
            let jet = state_jet(&p, &st).unwrap();
            let curve = GeneratingCurve::new(fam, "state", (-1.0, 1.0), move |_| Ok(jet));
            let surf = InvariantSurface::new(curve);
            for t in [-0.5, 0.0, 0.8] {
                let (n, h) = closed_form_normal_and_h(&surf, 0.0, t).unwrap();
                let pt: Sl2Point = surf.point(0.0, t).unwrap();
                let r = h - n.dot(&killing_at(field, &pt).unwrap());
                assert!(r.abs() < 1e-12, "{fam} {field} t={t}: {r}");
            }
            if fam == Family::K {
                let d = reduction_rhs(&p, &st).unwrap();
                let (_, h) = closed_form_normal_and_h(&surf, 0.0, 0.0).unwrap();
                assert_abs_diff_eq!(h, k_angle_mean_curvature(st[2], d[2]), epsilon = 1e-12);
            }
            if (fam, field) == (Family::N, KillingFieldKind::Dtheta) {
                let d = reduction_rhs(&p, &st).unwrap();
                let (_, h) = closed_form_normal_and_h(&surf, 0.0, 0.0).unwrap();
                assert_abs_diff_eq!(h, n_angle_mean_curvature(st[2], d[2]), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn solve_both_directions() {
        let p = TranslatorProblem::new(Family::N, KillingFieldKind::Dx);
        let tr = solve_reduction(
            &p,
            [1.0, 0.0, 0.0],
            0.0,
            (-0.5, 0.5),
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(tr.span(), (-0.5, 0.5));
        let u = tr.interpolate(0.5).unwrap();
        assert_abs_diff_eq!(u[0], (SQRT_2 * 0.5).cos(), epsilon = 1e-8);
        assert_abs_diff_eq!(tr.coverage((-0.5, 0.5)), 1.0);
    }
}
