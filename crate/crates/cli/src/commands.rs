//! Subcommand implementations. Each returns the process exit code on
//! success; usage errors come back as [`CliError`] with code 2.

use std::path::PathBuf;

use serde::Serialize;
use sl2r_core::families::closed_form_normal_and_h;
use sl2r_core::geometry::{classify_matrix, decompose_nak};
use sl2r_core::ode::{sample_direction_field, IntegratorConfig, Termination, Trajectory};
use sl2r_core::suites::{run_suite, Bound, Check, SUITES};
use sl2r_core::translator::{
    certify, residual, solve_reduction, state_jet, state_phi, AutonomousSystem, ReductionKind,
    CLOSED_FORM_TOL,
};
use sl2r_core::{
    CurveJet, Family, GeneratingCurve, InvariantSurface, SolutionKind, TranslatorProblem,
};

use crate::output::{self, csv_cell, float, Format};
use crate::parse;
use crate::CliError;

pub struct VerifyOpts {
    pub suite: String,
    pub json: bool,
}

#[derive(Serialize)]
struct SuiteResult {
    suite: String,
    checks: Vec<Check>,
}

pub fn verify(opts: &VerifyOpts) -> Result<u8, CliError> {
    let names: Vec<&str> = if opts.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&opts.suite.as_str()) {
        vec![opts.suite.as_str()]
    } else {
        return Err(CliError::usage(format!(
            "unknown suite {:?}; known: all, {}",
            opts.suite,
            SUITES.join(", ")
        )));
    };
    let mut results = Vec::new();
    for name in names {
        let checks = run_suite(name).map_err(CliError::internal)?;
        results.push(SuiteResult {
            suite: name.to_string(),
            checks,
        });
    }
    let all_passed = results.iter().all(|r| r.checks.iter().all(|c| c.passed));
    let text = if opts.json {
        output::json(&results)?
    } else {
        verify_table(&results)
    };
    output::emit(&text, None)?;
    Ok(if all_passed { 0 } else { 1 })
}

fn verify_table(results: &[SuiteResult]) -> String {
    let mut out = format!(
        "{:<17} {:<58} {:>12} {:>11}  {}\n",
        "suite", "check", "value", "tolerance", "result"
    );
    let (mut total, mut passed) = (0, 0);
    for r in results {
        for c in &r.checks {
            total += 1;
            passed += c.passed as usize;
            let op = match c.bound {
                Bound::Below => '<',
                Bound::Above => '>',
            };
            out.push_str(&format!(
                "{:<17} {:<58} {:>12.3e} {op} {:>9.1e}  {}",
                r.suite,
                c.name,
                c.value,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            ));
            if let Some(e) = &c.error {
                out.push_str(&format!(" ({e})"));
            }
            out.push('\n');
        }
    }
    out.push_str(&format!("{passed}/{total} checks passed\n"));
    out
}

pub struct SolveOpts {
    pub problem: TranslatorProblem,
    pub ic: String,
    pub s_range: (f64, f64),
    pub s0: Option<f64>,
    pub config: IntegratorConfig,
    pub samples: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub s: f64,
    pub x: Option<f64>,
    pub y: f64,
    pub theta: Option<f64>,
    pub phi: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub residual: f64,
}

impl SolveRecord {
    fn cells(&self) -> Vec<String> {
        vec![
            float(self.s),
            csv_cell(self.x),
            float(self.y),
            csv_cell(self.theta),
            float(self.phi),
            float(self.h),
            float(self.residual),
        ]
    }
}

pub const SOLVE_COLUMNS: [&str; 7] = ["s", "x", "y", "theta", "phi", "H", "residual"];

#[derive(Serialize)]
struct SolveConfigMeta {
    ic: serde_json::Map<String, serde_json::Value>,
    s_range: [f64; 2],
    s0: f64,
    integrator: IntegratorConfig,
    samples: Option<usize>,
}

#[derive(Serialize)]
struct SolveMeta {
    problem: TranslatorProblem,
    state: [&'static str; 3],
    config: SolveConfigMeta,
    termination: Termination,
    coverage: f64,
}

#[derive(Serialize)]
struct SolveJson<'a> {
    metadata: SolveMeta,
    records: &'a [SolveRecord],
}

/// Initial state from `k=v` pairs. `x` and `theta` default to 0; for the
/// first-order `N` reductions `phi` may replace `dy` or `f`.
fn initial_state(kind: ReductionKind, given: &[(String, f64)]) -> Result<[f64; 3], CliError> {
    let names = kind.state_names();
    for (k, _) in given {
        if !names.contains(&k.as_str()) && !(k == "phi" && names[2] != "phi") {
            return Err(CliError::usage(format!(
                "ic: unknown key {k} (expected {})",
                names.join(", ")
            )));
        }
    }
    let get = |k: &str| given.iter().find(|(n, _)| n == k).map(|kv| kv.1);
    if names[2] != "phi" && get(names[2]).is_some() && get("phi").is_some() {
        return Err(CliError::usage(format!(
            "ic: give either {} or phi",
            names[2]
        )));
    }
    let mut state = [0.0; 3];
    for (i, name) in names.iter().enumerate() {
        state[i] = match (get(name), *name) {
            (Some(v), _) => v,
            (None, "x" | "theta") => 0.0,
            (None, "dy" | "f") => {
                let phi =
                    get("phi").ok_or_else(|| CliError::usage(format!("ic: need {name} or phi")))?;
                let y = get("y").unwrap_or(f64::NAN);
                // y' = sqrt2 y cos(phi) / sin(phi) once theta' = 1.
                if phi.sin().abs() < 1e-12 {
                    return Err(CliError::usage(format!(
                        "ic: phi = {phi} has theta' = 0, which the theta' = 1 reduction cannot start from; give {name} instead"
                    )));
                }
                let dy = std::f64::consts::SQRT_2 * y / phi.tan();
                if *name == "dy" {
                    dy
                } else {
                    dy / y
                }
            }
            (None, _) => return Err(CliError::usage(format!("ic: missing {name}"))),
        };
    }
    if !(state[kind.y_index()] > 0.0) {
        return Err(CliError::usage("ic: y must be positive"));
    }
    if state.iter().any(|v| !v.is_finite()) {
        return Err(CliError::usage("ic: initial state is not finite"));
    }
    Ok(state)
}

/// Mean curvature and translator residual of the invariant surface through
/// a reduced state, on the fiber `t = 0`.
pub fn state_residual(
    problem: &TranslatorProblem,
    s: f64,
    jet: CurveJet,
) -> sl2r_core::Result<(f64, f64)> {
    let curve = GeneratingCurve::new(problem.family, "state", (s, s), move |_| Ok(jet));
    let surface = InvariantSurface::new(curve);
    let (_, h) = closed_form_normal_and_h(&surface, s, 0.0)?;
    Ok((h, residual(problem, &surface, s, 0.0)?))
}

pub fn solve_records(
    problem: &TranslatorProblem,
    traj: &Trajectory,
    samples: Option<usize>,
) -> sl2r_core::Result<Vec<SolveRecord>> {
    let kind = ReductionKind::of(problem)?;
    let points: Vec<(f64, Vec<f64>)> = match samples {
        None => traj.samples().map(|(s, u)| (s, u.to_vec())).collect(),
        Some(n) => {
            let (a, b) = traj.span();
            (0..n)
                .map(|i| {
                    let s = if n == 1 {
                        a
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    };
                    (
                        s,
                        traj.interpolate(s).expect("s inside the trajectory span"),
                    )
                })
                .collect()
        }
    };
    points
        .into_iter()
        .map(|(s, u)| {
            let jet = state_jet(problem, &u)?;
            let (h, r) = state_residual(problem, s, jet)?;
            let phi = state_phi(problem, &u)?;
            let (x, y, theta) = match kind {
                ReductionKind::KAngle => (Some(u[0]), u[1], None),
                _ => (None, u[0], Some(u[1])),
            };
            Ok(SolveRecord {
                s,
                x,
                y,
                theta,
                phi,
                h,
                residual: r,
            })
        })
        .collect()
}

pub fn solve(opts: &SolveOpts) -> Result<u8, CliError> {
    let problem = opts.problem;
    let kind = ReductionKind::of(&problem).map_err(|e| CliError::usage(e.to_string()))?;
    let given = parse::assignments("ic", &opts.ic)?;
    let initial = initial_state(kind, &given)?;
    let (lo, hi) = opts.s_range;
    let s0 = opts
        .s0
        .unwrap_or(if lo <= 0.0 && 0.0 <= hi { 0.0 } else { lo });
    if !(lo <= s0 && s0 <= hi) {
        return Err(CliError::usage(format!("s0 = {s0} outside {lo}:{hi}")));
    }
    opts.config
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    if matches!(opts.samples, Some(n) if n < 2) {
        return Err(CliError::usage("samples must be at least 2"));
    }
    let traj = solve_reduction(&problem, initial, s0, opts.s_range, &opts.config)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let coverage = traj.coverage(opts.s_range);
    let records = solve_records(&problem, &traj, opts.samples).map_err(CliError::internal)?;
    let text = match opts.format {
        Format::Csv => output::csv(&SOLVE_COLUMNS, records.iter().map(SolveRecord::cells)),
        Format::Json => output::json(&SolveJson {
            metadata: SolveMeta {
                problem,
                state: kind.state_names(),
                config: SolveConfigMeta {
                    ic: given.into_iter().map(|(k, v)| (k, v.into())).collect(),
                    s_range: [lo, hi],
                    s0,
                    integrator: opts.config,
                    samples: opts.samples,
                },
                termination: traj.termination().clone(),
                coverage,
            },
            records: &records,
        })?,
    };
    output::emit(&text, opts.out.as_deref())?;
    if traj.failed() && coverage < 0.1 {
        eprintln!(
            "integration failed after {:.1}% of the range: {:?}",
            100.0 * coverage,
            traj.termination()
        );
        return Ok(1);
    }
    Ok(0)
}

pub struct ResidualOpts {
    pub family: Option<Family>,
    pub field: sl2r_core::KillingFieldKind,
    pub surface: String,
    pub grid: Option<String>,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

pub fn residual_report(opts: &ResidualOpts) -> Result<u8, CliError> {
    let resolved = parse::surface(&opts.surface, opts.family)?;
    let grid = match &opts.grid {
        Some(g) => parse::grid(g)?,
        None => resolved.default_grid,
    };
    let problem = TranslatorProblem::new(resolved.surface.family, opts.field);
    let report = certify(&problem, &resolved.surface, &grid, opts.tol)
        .map_err(|e| CliError::usage(format!("cannot evaluate on this grid: {e}")))?;
    output::emit(&output::json(&report)?, opts.out.as_deref())?;
    Ok(if report.is_translator() { 0 } else { 1 })
}

pub struct PortraitOpts {
    pub grid: String,
    pub out: Option<PathBuf>,
}

pub fn portrait(opts: &PortraitOpts) -> Result<u8, CliError> {
    let grid = parse::grid(&opts.grid)?;
    let samples = sample_direction_field(&AutonomousSystem, &grid).map_err(CliError::internal)?;
    let rows = samples.iter().map(|d| {
        vec![
            float(d.state[0]),
            float(d.state[1]),
            float(d.direction[0]),
            float(d.direction[1]),
        ]
    });
    output::emit(
        &output::csv(&["y", "phi", "dy", "dphi"], rows),
        opts.out.as_deref(),
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct Decomposition {
    x: f64,
    y: f64,
    theta: f64,
    trace: f64,
    class: String,
}

pub fn decompose(matrix: &str, json: bool) -> Result<u8, CliError> {
    let m = parse::matrix(matrix)?;
    let p = decompose_nak(&m).map_err(|e| CliError::usage(format!("matrix: {e}")))?;
    let d = Decomposition {
        x: p.x,
        y: p.y,
        theta: p.theta + 0.0,
        trace: m.trace(),
        class: classify_matrix(&m).to_string(),
    };
    let text = if json {
        output::json(&d)?
    } else {
        format!(
            "x = {}\ny = {}\ntheta = {}\ntrace = {}\nclass = {}\n",
            float(d.x),
            float(d.y),
            float(d.theta),
            float(d.trace),
            d.class
        )
    };
    output::emit(&text, None)?;
    Ok(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: &'static str,
    pub families: Vec<Family>,
    pub description: String,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    let surface = |name: &str, families: Vec<Family>, description: &str| CatalogEntry {
        name: name.to_string(),
        kind: "surface",
        families,
        description: description.to_string(),
    };
    let mut out = vec![
        surface(
            "sigma-x0",
            vec![Family::A, Family::K],
            "the surface x = x0 (argument x0, default 0); minimal, flat, translator for dtheta, and for V when x0 = 0",
        ),
        surface(
            "sigma-y0",
            vec![Family::N, Family::K],
            "the surface y = y0 (argument y0 > 0, default 1); H = 1, flat, translator for no Killing field",
        ),
        surface(
            "sigma-theta0",
            vec![Family::N, Family::A],
            "the surface theta = theta0 (argument theta0, default 0); minimal with curvature -4, translator for V and W",
        ),
    ];
    let solution = |name: String, kind: SolutionKind, description: String| CatalogEntry {
        name,
        kind: "solution",
        families: vec![kind.family()],
        description,
    };
    for kind in SolutionKind::ALL {
        if kind == SolutionKind::RotCmc {
            for (h, label) in [(0.5, "H < 1"), (1.0, "H = 1"), (2.0, "H > 1")] {
                out.push(solution(
                    format!("{kind}:H={h}"),
                    kind,
                    format!("{} ({label})", kind.description()),
                ));
            }
        } else {
            out.push(solution(
                kind.tag().to_string(),
                kind,
                kind.description().to_string(),
            ));
        }
    }
    out
}

pub fn catalog(json: bool) -> Result<u8, CliError> {
    let entries = catalog_entries();
    let text = if json {
        output::json(&entries)?
    } else {
        let mut t = String::new();
        for e in &entries {
            let fams: Vec<String> = e.families.iter().map(|f| f.to_string()).collect();
            t.push_str(&format!(
                "{:<14} {:<8} {:<4} {}\n",
                e.name,
                e.kind,
                fams.join(","),
                e.description
            ));
        }
        t
    };
    output::emit(&text, None)?;
    Ok(0)
}

/// Default residual tolerance on the CLI.
pub const DEFAULT_TOL: f64 = CLOSED_FORM_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use sl2r_core::KillingFieldKind;

    #[test]
    fn initial_states() {
        let k = ReductionKind::KAngle;
        let ic = parse::assignments("ic", "y=1,phi=0").unwrap();
        assert_eq!(initial_state(k, &ic).unwrap(), [0.0, 1.0, 0.0]);
        let bad = parse::assignments("ic", "y=1,phi=0,z=3").unwrap();
        assert!(initial_state(k, &bad).is_err());
        let neg = parse::assignments("ic", "y=-1,phi=0").unwrap();
        assert!(initial_state(k, &neg).is_err());
        let r = ReductionKind::NRiccati;
        let ic = parse::assignments("ic", "y=2,phi=0.5").unwrap();
        let u = initial_state(r, &ic).unwrap();
        assert!((u[2] - 2f64.sqrt() / 0.5f64.tan()).abs() < 1e-15);
        let both = parse::assignments("ic", "y=2,phi=0.5,f=1").unwrap();
        assert!(initial_state(r, &both).is_err());
        let none = parse::assignments("ic", "y=2").unwrap();
        assert!(initial_state(r, &none).is_err());
    }

    #[test]
    fn catalog_has_twelve_resolvable_entries() {
        let entries = catalog_entries();
        assert_eq!(entries.len(), 12);
        for e in &entries {
            for &f in &e.families {
                assert!(parse::surface(&e.name, Some(f)).is_ok(), "{}", e.name);
            }
        }
    }

    #[test]
    fn state_residual_vanishes_on_solutions() {
        let p = TranslatorProblem::new(Family::K, KillingFieldKind::Dx);
        let traj = solve_reduction(
            &p,
            [0.0, 1.0, 0.0],
            0.0,
            (-1.0, 1.0),
            &IntegratorConfig::default(),
        )
        .unwrap();
        for r in solve_records(&p, &traj, None).unwrap() {
            assert!(r.residual.abs() < 1e-12, "{r:?}");
            assert!(r.theta.is_none() && r.x.is_some());
        }
    }
}
