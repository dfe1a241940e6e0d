//! Translating solitons: the residual `H - <N, X>` for every
//! (family, Killing field) pair, together with the reductions, explicit
//! solutions and polynomial systems used to classify them.

mod cmc;
mod explicit;
mod poly;
mod reduction;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{closed_form_normal_and_h, Family, InvariantSurface, Orientation};
use crate::geometry::{killing_at, KillingFieldKind};
use crate::ode::PlaneGrid;
use crate::oracle::oracle_normal_and_h;

pub use cmc::{
    cmc_compatibility, cmc_consistency_check, cmc_trajectory_residual, compare_psi_variants,
    psi_variant_error, CmcVerdict, PsiComparison,
};
pub use explicit::{explicit_solution, ExplicitSolution, PsiVariant, SolutionKind, SolutionParams};
pub use poly::{a_family_poly_coeffs, is_a_family_degenerate, poly_eval};
pub use reduction::{
    autonomous_rhs, reduction_rhs, solve_reduction, state_jet, state_phi, AutonomousSystem,
    ReductionKind, ReductionSystem,
};

/// Default tolerance for certifying a translator from closed forms.
pub const CLOSED_FORM_TOL: f64 = 1e-7;
/// Default tolerance for certifying from finite-difference oracle jets.
pub const ORACLE_FD_TOL: f64 = 1e-4;
/// Closed-form and oracle residuals must agree to this on every sample.
pub const CONSISTENCY_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TranslatorProblem {
    pub family: Family,
    pub field: KillingFieldKind,
    pub orientation: Orientation,
}

impl TranslatorProblem {
    pub fn new(family: Family, field: KillingFieldKind) -> Self {
        Self {
            family,
            field,
            orientation: Orientation::Positive,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// All twelve (family, field) combinations with positive orientation.
    pub fn all() -> Vec<Self> {
        Family::ALL
            .iter()
            .flat_map(|&f| KillingFieldKind::ALL.iter().map(move |&k| Self::new(f, k)))
            .collect()
    }

    fn oriented(&self, surface: &InvariantSurface) -> Result<InvariantSurface> {
        if surface.family != self.family {
            return Err(Error::InvalidParameter(format!(
                "{}-family surface passed to a {}-family problem",
                surface.family, self.family
            )));
        }
        Ok(surface
            .clone()
            .with_orientation(surface.orientation.compose(self.orientation)))
    }
}

impl fmt::Display for TranslatorProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.family, self.field)
    }
}

/// `H - <N, X>` from the closed-form normal and mean curvature.
pub fn residual(
    problem: &TranslatorProblem,
    surface: &InvariantSurface,
    s: f64,
    t: f64,
) -> Result<f64> {
    let surf = problem.oriented(surface)?;
    let (n, h) = closed_form_normal_and_h(&surf, s, t)?;
    let x = killing_at(problem.field, &surf.point(s, t)?)?;
    Ok(h - n.dot(&x))
}

/// `H - <N, X>` from the family-agnostic oracle.
pub fn oracle_residual(
    problem: &TranslatorProblem,
    surface: &InvariantSurface,
    s: f64,
    t: f64,
) -> Result<f64> {
    let surf = problem.oriented(surface)?;
    let (n, h) = oracle_normal_and_h(&surf, s, t)?;
    let x = killing_at(problem.field, &surf.point(s, t)?)?;
    Ok(h - n.dot(&x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub s: f64,
    pub t: f64,
    pub closed_form: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub problem: TranslatorProblem,
    pub surface: String,
    pub tolerance: f64,
    pub samples: Vec<ResidualSample>,
    /// Max `|H - <N,X>|` over the grid (closed forms).
    pub max_abs_residual: f64,
    pub max_abs_oracle_residual: f64,
    /// Max difference between the closed-form and oracle residuals.
    pub max_disagreement: f64,
    /// Closed forms and oracle agree within [`CONSISTENCY_TOL`].
    pub consistent: bool,
    /// Orientation (relative to the problem's) under which the surface is
    /// certified, if any.
    pub certifying_orientation: Option<Orientation>,
}

impl ResidualReport {
    pub fn is_translator(&self) -> bool {
        self.consistent && self.certifying_orientation.is_some()
    }
}

/// Evaluates the residual on every grid point (row-major in `(s, t)`) and
/// certifies the surface when `max |residual| < tol` under either sign of
/// the normal.
pub fn certify(
    problem: &TranslatorProblem,
    surface: &InvariantSurface,
    grid: &PlaneGrid,
    tol: f64,
) -> Result<ResidualReport> {
    let points = grid.points();
    let samples = points
        .par_iter()
        .map(|&[s, t]| {
            Ok(ResidualSample {
                s,
                t,
                closed_form: residual(problem, surface, s, t)?,
                oracle: oracle_residual(problem, surface, s, t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: &dyn Fn(&ResidualSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let max_abs_residual = max_of(&|r| r.closed_form.abs());
    let max_abs_oracle_residual = max_of(&|r| r.oracle.abs());
    let max_disagreement = max_of(&|r| (r.closed_form - r.oracle).abs());
    let flipped = problem.with_orientation(problem.orientation.flip());
    let certifying_orientation = if max_abs_residual < tol {
        Some(Orientation::Positive)
    } else {
        let mut worst = 0.0f64;
        for &[s, t] in &points {
            worst = worst.max(residual(&flipped, surface, s, t)?.abs());
        }
        (worst < tol).then_some(Orientation::Negative)
    };
    Ok(ResidualReport {
        problem: *problem,
        surface: surface.name().to_string(),
        tolerance: tol,
        samples,
        max_abs_residual,
        max_abs_oracle_residual,
        max_disagreement,
        consistent: max_disagreement < CONSISTENCY_TOL,
        certifying_orientation,
    })
}

/// Certifies an explicit solution against `problem` on `grid`.
pub fn verify_solution(
    solution: &ExplicitSolution,
    problem: &TranslatorProblem,
    grid: &PlaneGrid,
    tol: f64,
) -> Result<ResidualReport> {
    certify(problem, &solution.surface(), grid, tol)
}
