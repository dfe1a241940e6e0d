//! Numerical consistency checks: rotational `V`-translators of constant
//! mean curvature, and the choice of `psi` in the general `(N, dtheta)`
//! solution.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::Y_FLOOR;
use crate::ode::{integrate, Event, FnSystem, IntegratorConfig, Trajectory};

use super::explicit::{explicit_solution, PsiVariant, SolutionKind, SolutionParams};

/// Sup residual below which a trajectory counts as consistent.
pub const CMC_CONSISTENT_TOL: f64 = 1e-8;

/// Number of initial angles swept by [`cmc_consistency_check`].
pub const CMC_SWEEP: usize = 72;

/// `3H - (1 + 2H^2) cos phi`, which must vanish along a rotational
/// `V`-translator of constant mean curvature `H`.
pub fn cmc_compatibility(h: f64, phi: f64) -> f64 {
    3.0 * h - (1.0 + 2.0 * h * h) * phi.cos()
}

/// Integrates the rotational CMC system `x' = 2y cos phi`, `y' = 2y sin phi`,
/// `phi' = 2(H - cos phi)` from `(x0, y0, phi0)` over `s in [0, length]` and
/// returns the sup over the trajectory of
/// `|2H - cos phi + (x/y) sin phi|`, the gap between that `phi'` and the
/// one forced by the `(K, V)` reduction.
pub fn cmc_trajectory_residual(h: f64, initial: [f64; 3], length: f64) -> Result<f64> {
    let traj = cmc_trajectory(h, initial, length)?;
    Ok(traj
        .samples()
        .map(|(_, u)| (2.0 * h - u[2].cos() + u[0] / u[1] * u[2].sin()).abs())
        .fold(0.0, f64::max))
}

fn cmc_trajectory(h: f64, initial: [f64; 3], length: f64) -> Result<Trajectory> {
    if !(initial[1] > 0.0) {
        return Err(Error::Domain(format!(
            "initial y = {} is not positive",
            initial[1]
        )));
    }
    let system = FnSystem::with_domain(
        3,
        move |_s, u: &[f64], du: &mut [f64]| {
            let (sp, cp) = u[2].sin_cos();
            du[0] = 2.0 * u[1] * cp;
            du[1] = 2.0 * u[1] * sp;
            du[2] = 2.0 * (h - cp);
        },
        |u: &[f64]| u[1] > 0.0,
    );
    let cfg = IntegratorConfig::with_tolerances(1e-11, 1e-13);
    let events = [Event::lower_bound("left domain y>0", 1, Y_FLOOR)];
    integrate(&system, &initial, (0.0, length), &cfg, &events)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmcVerdict {
    pub h: f64,
    /// Some sampled trajectory satisfies both `phi'` equations.
    pub consistent: bool,
    /// Smallest sup-residual over the sweep.
    pub min_residual: f64,
    /// Initial angles of the consistent trajectories.
    pub witnesses: Vec<f64>,
    /// Max of `|3H - (1 + 2H^2) cos phi|` along the witnesses.
    pub witness_compatibility: f64,
}

impl CmcVerdict {
    /// Only the vertical solutions (`phi = +-pi/2`) are consistent.
    pub fn only_vertical(&self) -> bool {
        self.consistent && self.witnesses.iter().all(|p| p.cos().abs() < 1e-12)
    }
}

/// Sweeps initial angles `phi0 = -pi + k pi/36` (`k = 1..=72`) from
/// `y0 = 1`, choosing `x0` so that both `phi'` equations agree at `s = 0`
/// (or `x0 in {-1, 0, 1}` when `sin phi0 = 0`), integrates over `s in [0, 2]`
/// and reports whether any trajectory keeps them in agreement.
pub fn cmc_consistency_check(h: f64) -> Result<CmcVerdict> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "H = {h} must be finite and >= 0"
        )));
    }
    let mut min_residual = f64::INFINITY;
    let mut witnesses = Vec::new();
    let mut witness_compatibility = 0.0f64;
    for k in 1..=CMC_SWEEP {
        let phi0 = -PI + k as f64 * 2.0 * PI / CMC_SWEEP as f64;
        let (sp, cp) = phi0.sin_cos();
        let starts: Vec<f64> = if sp.abs() < 1e-12 {
            vec![-1.0, 0.0, 1.0]
        } else {
            vec![(cp - 2.0 * h) / sp]
        };
        for x0 in starts {
            let traj = cmc_trajectory(h, [x0, 1.0, phi0], 2.0)?;
            let sup = traj
                .samples()
                .map(|(_, u)| (2.0 * h - u[2].cos() + u[0] / u[1] * u[2].sin()).abs())
                .fold(0.0, f64::max);
            min_residual = min_residual.min(sup);
            if sup < CMC_CONSISTENT_TOL {
                witnesses.push(phi0);
                for (_, u) in traj.samples() {
                    witness_compatibility =
                        witness_compatibility.max(cmc_compatibility(h, u[2]).abs());
                }
            }
        }
    }
    Ok(CmcVerdict {
        h,
        consistent: !witnesses.is_empty(),
        min_residual,
        witnesses,
        witness_compatibility,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiComparison {
    pub variant: PsiVariant,
    pub sup_error: f64,
}

/// Sup distance on `[-span, span]` between the `(y, theta)` of the general
/// `(N, dtheta)` solution with the given `psi` and a direct integration of
/// `y' = sqrt2 y cos phi`, `theta' = sin phi` with the closed-form `phi(s)`,
/// started from the variant's own values at `s = 0`.
pub fn psi_variant_error(variant: PsiVariant, c1: f64, c2: f64, span: f64) -> Result<f64> {
    let params = SolutionParams {
        c1,
        c2,
        psi: variant,
        ..SolutionParams::default()
    };
    let sol = explicit_solution(SolutionKind::NthetaGeneral, params)?;
    let curve = sol.curve();
    let phi = move |s: f64| {
        let lam = (s * 3f64.sqrt() / 2.0).tanh().atan();
        SQRT_2.atan() + 2.0 * lam
    };
    let system = FnSystem::new(2, move |s, u: &[f64], du: &mut [f64]| {
        let (sp, cp) = phi(s).sin_cos();
        du[0] = SQRT_2 * u[0] * cp;
        du[1] = sp;
    });
    let start = curve.jet(0.0)?.value;
    let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    let fwd = integrate(&system, &start, (0.0, span), &cfg, &[])?;
    let bwd = integrate(&system, &start, (0.0, -span), &cfg, &[])?;
    let traj = Trajectory::stitch(bwd, fwd);
    let mut sup = 0.0f64;
    for (s, u) in traj.samples() {
        let v = curve.jet(s)?.value;
        sup = sup.max((v[0] - u[0]).abs()).max((v[1] - u[1]).abs());
    }
    Ok(sup)
}

/// [`psi_variant_error`] for every variant with `c1 = 1`, `c2 = 0` on `[-3, 3]`.
pub fn compare_psi_variants() -> Result<Vec<PsiComparison>> {
    PsiVariant::ALL
        .iter()
        .map(|&variant| {
            Ok(PsiComparison {
                variant,
                sup_error: psi_variant_error(variant, 1.0, 0.0, 3.0)?,
            })
        })
        .collect()
}
