//! Closed-form solution families of the reduced translator equations, and
//! the rotational CMC curves used to refute rotational `W`-translators.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use num_dual::{Dual2_64, DualNum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, GeneratingCurve, InvariantSurface};
use crate::geometry::KillingFieldKind;
use crate::ode::PlaneGrid;

use super::TranslatorProblem;

type D = Dual2_64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    /// Minimal `(N, dx)` translators: `y = c1 cos(sqrt2 s) + c2 sin(sqrt2 s)`, `theta = s`.
    NxMinimal,
    /// The constant-angle `(N, dtheta)` translator `y = c1 e^{2s/sqrt3}`, `theta = -s/sqrt3 + c2`.
    NthetaCmc,
    /// The general `(N, dtheta)` translator with `phi = atan(sqrt2) + 2 atan(tanh(sqrt3 s/2))`.
    NthetaGeneral,
    /// `(N, V)` translators `y = c (1 + cos(sqrt2 (s - s0)))`, `theta = s`.
    Nv,
    /// Rotational curve with `phi = 0`: `(2 c2 s + c1, c2)`.
    RotLineH,
    /// Rotational curve with `phi = pi/2`: `(c1, c2 e^{2s})`.
    RotLineV,
    /// Rotational constant mean curvature `H` curve with `phi(0) = 0`.
    RotCmc,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 7] = [
        Self::NxMinimal,
        Self::NthetaCmc,
        Self::NthetaGeneral,
        Self::Nv,
        Self::RotLineH,
        Self::RotLineV,
        Self::RotCmc,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Self::NxMinimal => "nx-minimal",
            Self::NthetaCmc => "ntheta-cmc",
            Self::NthetaGeneral => "ntheta-general",
            Self::Nv => "nv",
            Self::RotLineH => "rot-line-h",
            Self::RotLineV => "rot-line-v",
            Self::RotCmc => "rot-cmc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == s)
    }

    pub fn family(&self) -> Family {
        match self {
            Self::NxMinimal | Self::NthetaCmc | Self::NthetaGeneral | Self::Nv => Family::N,
            Self::RotLineH | Self::RotLineV | Self::RotCmc => Family::K,
        }
    }

    /// The translator problem the solution is associated with.
    pub fn problem(&self) -> TranslatorProblem {
        let field = match self {
            Self::NxMinimal | Self::RotLineH => KillingFieldKind::Dx,
            Self::NthetaCmc | Self::NthetaGeneral | Self::RotLineV => KillingFieldKind::Dtheta,
            Self::Nv => KillingFieldKind::V,
            Self::RotCmc => KillingFieldKind::W,
        };
        TranslatorProblem::new(self.family(), field)
    }

    /// Whether the solution solves [`SolutionKind::problem`] (the horizontal
    /// line and the CMC curves are the refuted cases).
    pub fn expects_translator(&self) -> bool {
        !matches!(self, Self::RotLineH | Self::RotCmc)
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::NxMinimal => "minimal N-invariant dx-translator, y = c1 cos(sqrt2 s) + c2 sin(sqrt2 s), theta = s",
            Self::NthetaCmc => "N-invariant dtheta-translator of constant angle, H = -1/sqrt3",
            Self::NthetaGeneral => "N-invariant dtheta-translator, phi = atan(sqrt2) + 2 atan(tanh(sqrt3 s/2))",
            Self::Nv => "N-invariant V-translator, y = c (1 + cos(sqrt2 (s - s0))), theta = s",
            Self::RotLineH => "rotational surface over a horizontal line, phi = 0, H = 1",
            Self::RotLineV => "rotational surface over a vertical line, phi = pi/2, minimal",
            Self::RotCmc => "rotational surface of constant mean curvature H, not a W-translator",
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Choice of `psi(s)` in the general `(N, dtheta)` solution
/// `y = c1 exp(2 sqrt2/3 Lambda + 2/3 psi)`, `theta = 2 sqrt2/3 Lambda - psi/3 + c2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiVariant {
    /// `psi(s) = -log cosh(sqrt3 s)`
    Corrected,
    /// `psi(s) = log cosh(sqrt3)`, a constant
    Literal,
    /// `psi(s) = +log cosh(sqrt3 s)`
    PositiveLogCosh,
}

impl PsiVariant {
    pub const ALL: [PsiVariant; 3] = [Self::Corrected, Self::Literal, Self::PositiveLogCosh];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Corrected => "-log cosh(sqrt3 s)",
            Self::Literal => "log cosh(sqrt3)",
            Self::PositiveLogCosh => "+log cosh(sqrt3 s)",
        }
    }

    fn eval(&self, s: D) -> D {
        let r3 = 3f64.sqrt();
        match self {
            Self::Corrected => -(s * r3).cosh().ln(),
            Self::Literal => D::from_re(r3.cosh().ln()),
            Self::PositiveLogCosh => (s * r3).cosh().ln(),
        }
    }
}

/// Parameters of an explicit solution; each kind reads the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionParams {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub s0: f64,
    /// Mean curvature, for [`SolutionKind::RotCmc`].
    pub h: f64,
    pub psi: PsiVariant,
}

impl Default for SolutionParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            c1: 1.0,
            c2: 0.0,
            s0: 0.0,
            h: 1.0,
            psi: PsiVariant::Corrected,
        }
    }
}

impl SolutionParams {
    /// Sensible defaults for `kind`. Rotational CMC curves with `H < 1` need
    /// `c < 0` for `y = c (H - cos phi)` to be positive.
    pub fn defaults(kind: SolutionKind, h: f64) -> Self {
        let mut p = Self {
            h,
            ..Self::default()
        };
        match kind {
            SolutionKind::RotLineH | SolutionKind::RotLineV => {
                p.c1 = 0.0;
                p.c2 = 1.0;
            }
            SolutionKind::RotCmc if h < 1.0 => p.c = -1.0,
            _ => {}
        }
        p
    }

    /// Names accepted by [`SolutionParams::set`].
    pub const KEYS: [&'static str; 5] = ["c", "c1", "c2", "s0", "H"];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "c" => self.c = value,
            "c1" => self.c1 = value,
            "c2" => self.c2 = value,
            "s0" => self.s0 = value,
            "H" | "h" => self.h = value,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown solution parameter {key}"
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSolution {
    pub kind: SolutionKind,
    pub params: SolutionParams,
    /// Validity interval in `s`; `y > 0` strictly inside it.
    pub interval: (f64, f64),
}

fn require(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

/// Builds an explicit solution after checking its parameter ranges.
pub fn explicit_solution(kind: SolutionKind, params: SolutionParams) -> Result<ExplicitSolution> {
    let p = params;
    let finite = [p.c, p.c1, p.c2, p.s0, p.h].iter().all(|v| v.is_finite());
    require(finite, "non-finite solution parameter")?;
    let inf = f64::INFINITY;
    let interval = match kind {
        SolutionKind::NxMinimal => {
            require(
                p.c1 != 0.0 || p.c2 != 0.0,
                "nx-minimal needs (c1, c2) != (0, 0)",
            )?;
            let delta = p.c2.atan2(p.c1);
            ((delta - FRAC_PI_2) / SQRT_2, (delta + FRAC_PI_2) / SQRT_2)
        }
        SolutionKind::NthetaCmc | SolutionKind::NthetaGeneral => {
            require(p.c1 > 0.0, "c1 must be positive")?;
            (-inf, inf)
        }
        SolutionKind::Nv => {
            require(p.c > 0.0, "nv needs c > 0")?;
            (p.s0 - PI / SQRT_2, p.s0 + PI / SQRT_2)
        }
        SolutionKind::RotLineH | SolutionKind::RotLineV => {
            require(p.c2 > 0.0, "rotational lines need c2 > 0")?;
            (-inf, inf)
        }
        SolutionKind::RotCmc => {
            require(p.h >= 0.0, "rot-cmc needs H >= 0")?;
            if p.h < 1.0 {
                require(p.c < 0.0, "rot-cmc with H < 1 needs c < 0")?;
                (-inf, inf)
            } else {
                require(p.c > 0.0, "rot-cmc with H >= 1 needs c > 0")?;
                if p.h == 1.0 {
                    (-inf, inf)
                } else {
                    let b = PI / (2.0 * (p.h * p.h - 1.0).sqrt());
                    (-b, b)
                }
            }
        }
    };
    Ok(ExplicitSolution {
        kind,
        params,
        interval,
    })
}

impl ExplicitSolution {
    pub fn family(&self) -> Family {
        self.kind.family()
    }

    pub fn name(&self) -> String {
        let p = &self.params;
        match self.kind {
            SolutionKind::NxMinimal | SolutionKind::NthetaCmc => {
                format!("{}:c1={},c2={}", self.kind, p.c1, p.c2)
            }
            SolutionKind::NthetaGeneral => {
                format!("{}:c1={},c2={},psi={}", self.kind, p.c1, p.c2, p.psi.name())
            }
            SolutionKind::Nv => format!("{}:c={},s0={}", self.kind, p.c, p.s0),
            SolutionKind::RotLineH | SolutionKind::RotLineV => {
                format!("{}:c1={},c2={}", self.kind, p.c1, p.c2)
            }
            SolutionKind::RotCmc => format!("{}:H={},c={}", self.kind, p.h, p.c),
        }
    }

    /// Curve coordinates and, for angle-form kinds, `phi`.
    fn eval(&self, s: D) -> ([D; 2], Option<D>) {
        let p = &self.params;
        let (r2, r3) = (SQRT_2, 3f64.sqrt());
        match self.kind {
            SolutionKind::NxMinimal => {
                let y = (s * r2).cos() * p.c1 + (s * r2).sin() * p.c2;
                ([y, s], None)
            }
            SolutionKind::NthetaCmc => {
                let y = (s * (2.0 / r3)).exp() * p.c1;
                let th = s * (-1.0 / r3) + p.c2;
                ([y, th], Some(D::from_re(-(1.0 / r2).atan())))
            }
            SolutionKind::NthetaGeneral => {
                let lam = (s * (r3 / 2.0)).tanh().atan();
                let psi = p.psi.eval(s);
                let k = 2.0 * r2 / 3.0;
                let y = (lam * k + psi * (2.0 / 3.0)).exp() * p.c1;
                let th = lam * k - psi / 3.0 + p.c2;
                ([y, th], Some(lam * 2.0 + r2.atan()))
            }
            SolutionKind::Nv => {
                let y = (((s - p.s0) * r2).cos() + 1.0) * p.c;
                ([y, s], None)
            }
            SolutionKind::RotLineH => (
                [s * (2.0 * p.c2) + p.c1, D::from_re(p.c2)],
                Some(D::from_re(0.0)),
            ),
            SolutionKind::RotLineV => (
                [D::from_re(p.c1), (s * 2.0).exp() * p.c2],
                Some(D::from_re(FRAC_PI_2)),
            ),
            SolutionKind::RotCmc => {
                let (h, c) = (p.h, p.c);
                if h < 1.0 {
                    let w = (1.0 - h * h).sqrt();
                    let phi = -((s * w).tanh() * ((1.0 - h) / w)).atan() * 2.0;
                    let x = -(s * (2.0 * w)).sinh() * (c * w) / ((s * (2.0 * w)).cosh() + h);
                    let y = (-phi.cos() + h) * c;
                    ([x, y], Some(phi))
                } else if h == 1.0 {
                    let a = -(s * 2.0).atan() + FRAC_PI_2;
                    let phi = -a * 2.0;
                    let x = -(a * 2.0).sin() * (c / 2.0);
                    let y = (s * s * 4.0 + 1.0).recip() * c;
                    ([x, y], Some(phi))
                } else {
                    let w = (h * h - 1.0).sqrt();
                    let phi = ((s * w).tan() * ((h - 1.0) / w)).atan() * 2.0;
                    let x = (s * (2.0 * w)).sin() * (c * w) / ((s * (2.0 * w)).cos() + h);
                    let y = (-phi.cos() + h) * c;
                    ([x, y], Some(phi))
                }
            }
        }
    }

    fn eval_at(&self, s: f64) -> ([D; 2], Option<D>) {
        self.eval(D::from_re(s).derivative())
    }

    pub fn curve(&self) -> GeneratingCurve {
        let me = self.clone();
        let curve =
            GeneratingCurve::from_dual(self.family(), self.name(), self.interval, move |s| {
                me.eval(s).0
            });
        match self.kind {
            SolutionKind::NxMinimal | SolutionKind::Nv => curve,
            _ => {
                let me = self.clone();
                curve.with_phi(move |s| me.eval_at(s).1.map_or(f64::NAN, |p| p.re))
            }
        }
    }

    pub fn surface(&self) -> InvariantSurface {
        InvariantSurface::new(self.curve())
    }

    /// `(phi, phi')` for angle-form kinds.
    pub fn phi(&self, s: f64) -> Option<(f64, f64)> {
        self.eval_at(s).1.map(|p| (p.re, p.v1))
    }

    /// Constant mean curvature the solution is known to have, if any.
    pub fn expected_h(&self) -> Option<f64> {
        match self.kind {
            SolutionKind::NxMinimal | SolutionKind::RotLineV => Some(0.0),
            SolutionKind::NthetaCmc => Some(-1.0 / 3f64.sqrt()),
            SolutionKind::RotLineH => Some(1.0),
            SolutionKind::RotCmc => Some(self.params.h),
            _ => None,
        }
    }

    /// Closed-form `<N, W>` along a rotational CMC curve.
    pub fn normal_w_closed_form(&self, s: f64) -> Option<f64> {
        if self.kind != SolutionKind::RotCmc {
            return None;
        }
        let (h, c) = (self.params.h, self.params.c);
        Some(if h < 1.0 {
            let w = (1.0 - h * h).sqrt();
            -0.25 * c * w * (2.0 * w * s).sinh()
        } else if h == 1.0 {
            0.0
        } else {
            let w = (h * h - 1.0).sqrt();
            0.25 * c * w * (2.0 * w * s).sin()
        })
    }

    /// Max violation of the defining ODE at `s` (angle-form relations plus
    /// the kind's equation for `phi'` or `y''`).
    pub fn ode_residual(&self, s: f64) -> Result<f64> {
        if !(s > self.interval.0 && s < self.interval.1) {
            return Err(Error::Domain(format!(
                "s = {s} outside the validity interval of {}",
                self.name()
            )));
        }
        let ([a, b], phi) = self.eval_at(s);
        let r2 = SQRT_2;
        let comps: Vec<f64> = match self.kind {
            SolutionKind::NxMinimal => vec![a.v2 + 2.0 * a.re, b.v1 - 1.0],
            SolutionKind::Nv => {
                let y = a;
                vec![
                    (y.v1 * y.v1 - 2.0 * y.re * (y.v2 + y.re)) / (self.params.c * self.params.c),
                    b.v1 - 1.0,
                ]
            }
            SolutionKind::NthetaCmc | SolutionKind::NthetaGeneral => {
                let p = phi.expect("angle-form kind");
                let (sp, cp) = p.re.sin_cos();
                vec![
                    (a.v1 - r2 * a.re * cp) / a.re,
                    b.v1 - sp,
                    p.v1 - (cp + r2 * sp),
                ]
            }
            SolutionKind::RotLineH | SolutionKind::RotLineV | SolutionKind::RotCmc => {
                let p = phi.expect("angle-form kind");
                let (sp, cp) = p.re.sin_cos();
                let y = b.re;
                let want = if self.kind == SolutionKind::RotCmc {
                    2.0 * (self.params.h - cp)
                } else {
                    0.0
                };
                vec![
                    (a.v1 - 2.0 * y * cp) / y,
                    (b.v1 - 2.0 * y * sp) / y,
                    p.v1 - want,
                ]
            }
        };
        Ok(comps.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// A window inside the validity interval: 5% margins on finite ends,
    /// clipped to `[-2, 2]`.
    pub fn window(&self) -> (f64, f64) {
        let (lo, hi) = self.interval;
        if lo.is_finite() && hi.is_finite() {
            let m = 0.05 * (hi - lo);
            ((lo + m).max(-2.0), (hi - m).min(2.0))
        } else {
            (lo.max(-2.0), hi.min(2.0))
        }
    }

    /// `ns x nt` grid over [`ExplicitSolution::window`] times `t in [-1, 1]`.
    pub fn default_grid(&self, ns: usize, nt: usize) -> Result<PlaneGrid> {
        let (lo, hi) = self.window();
        PlaneGrid::new((lo, hi, ns), (-1.0, 1.0, nt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::closed_form_normal_and_h;
    use crate::geometry::killing_at;
    use crate::translator::{certify, residual, CLOSED_FORM_TOL};
    use approx::assert_abs_diff_eq;

    fn dense(sol: &ExplicitSolution) -> Vec<f64> {
        let (lo, hi) = sol.window();
        (0..=200)
            .map(|i| lo + (hi - lo) * i as f64 / 200.0)
            .collect()
    }

    fn all_solutions() -> Vec<ExplicitSolution> {
        let mut v = Vec::new();
        for k in SolutionKind::ALL {
            if k == SolutionKind::RotCmc {
                for h in [0.0, 0.5, 1.0, 2.0] {
                    v.push(explicit_solution(k, SolutionParams::defaults(k, h)).unwrap());
                }
            } else {
                v.push(explicit_solution(k, SolutionParams::defaults(k, 1.0)).unwrap());
            }
        }
        let p = SolutionParams {
            c1: 0.7,
            c2: -1.3,
            ..Default::default()
        };
        v.push(explicit_solution(SolutionKind::NxMinimal, p).unwrap());
        let p = SolutionParams {
            c: 0.4,
            s0: 0.6,
            ..Default::default()
        };
        v.push(explicit_solution(SolutionKind::Nv, p).unwrap());
        v
    }

    #[test]
    fn every_solution_satisfies_its_ode() {
        for sol in all_solutions() {
            for s in dense(&sol) {
                let r = sol.ode_residual(s).unwrap();
                assert!(r < 1e-9, "{} at s={s}: {r}", sol.name());
                let j = sol.curve().jet(s).unwrap();
                let y = if sol.family() == Family::N {
                    j.value[0]
                } else {
                    j.value[1]
                };
                assert!(y > 0.0);
            }
        }
    }

    #[test]
    fn translators_certify_and_refutations_fail() {
        for sol in all_solutions() {
            let grid = sol.default_grid(12, 5).unwrap();
            let rep = certify(&sol.kind.problem(), &sol.surface(), &grid, CLOSED_FORM_TOL).unwrap();
            assert!(rep.consistent, "{}", sol.name());
            assert_eq!(
                rep.is_translator(),
                sol.kind.expects_translator(),
                "{}: {}",
                sol.name(),
                rep.max_abs_residual
            );
        }
    }

    #[test]
    fn known_mean_curvatures() {
        for sol in all_solutions() {
            if let Some(h) = sol.expected_h() {
                for s in dense(&sol).into_iter().step_by(20) {
                    let (_, got) = closed_form_normal_and_h(&sol.surface(), s, 0.3).unwrap();
                    assert_abs_diff_eq!(got, h, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn rot_cmc_normal_w_matches() {
        for h in [0.0, 0.5, 1.0, 2.0] {
            let sol = explicit_solution(
                SolutionKind::RotCmc,
                SolutionParams::defaults(SolutionKind::RotCmc, h),
            )
            .unwrap();
            let surf = sol.surface();
            for s in dense(&sol).into_iter().step_by(10) {
                let (n, _) = closed_form_normal_and_h(&surf, s, 0.0).unwrap();
                let nw =
                    n.dot(&killing_at(KillingFieldKind::W, &surf.point(s, 0.0).unwrap()).unwrap());
                assert_abs_diff_eq!(nw, sol.normal_w_closed_form(s).unwrap(), epsilon = 1e-10);
                let r = residual(&sol.kind.problem(), &surf, s, 0.0).unwrap();
                assert_abs_diff_eq!(r, h - nw, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rot_cmc_h1_closed_forms() {
        let c = 1.5;
        let sol = explicit_solution(
            SolutionKind::RotCmc,
            SolutionParams {
                h: 1.0,
                c,
                ..Default::default()
            },
        )
        .unwrap();
        for s in [-1.0, 0.2, 0.9] {
            let j = sol.curve().jet(s).unwrap();
            let acot = (1.0 / (2.0 * s)).atan().rem_euclid(PI);
            assert_abs_diff_eq!(j.value[0], -(c / 2.0) * (2.0 * acot).sin(), epsilon = 1e-14);
            assert_abs_diff_eq!(j.value[1], c / (4.0 * s * s + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn parameter_ranges() {
        let bad = [
            (
                SolutionKind::NxMinimal,
                SolutionParams {
                    c1: 0.0,
                    c2: 0.0,
                    ..Default::default()
                },
            ),
            (
                SolutionKind::Nv,
                SolutionParams {
                    c: -1.0,
                    ..Default::default()
                },
            ),
            (
                SolutionKind::NthetaCmc,
                SolutionParams {
                    c1: 0.0,
                    ..Default::default()
                },
            ),
            (
                SolutionKind::RotCmc,
                SolutionParams {
                    h: -0.5,
                    ..Default::default()
                },
            ),
            (
                SolutionKind::RotCmc,
                SolutionParams {
                    h: 0.5,
                    c: 1.0,
                    ..Default::default()
                },
            ),
            (
                SolutionKind::RotLineV,
                SolutionParams {
                    c2: 0.0,
                    ..Default::default()
                },
            ),
        ];
        for (k, p) in bad {
            assert!(explicit_solution(k, p).is_err(), "{k}");
        }
        let sol = explicit_solution(SolutionKind::Nv, SolutionParams::default()).unwrap();
        assert!(sol.ode_residual(10.0).is_err());
        assert!(sol.curve().jet(10.0).is_err());
    }

    #[test]
    fn literal_psi_breaks_the_ode() {
        let p = SolutionParams {
            psi: PsiVariant::Literal,
            ..Default::default()
        };
        let sol = explicit_solution(SolutionKind::NthetaGeneral, p).unwrap();
        assert!(sol.ode_residual(1.0).unwrap() > 0.1);
    }

    #[test]
    fn tags_round_trip() {
        for k in SolutionKind::ALL {
            assert_eq!(SolutionKind::parse(k.tag()), Some(k));
        }
    }
}
