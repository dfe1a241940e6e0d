//! Parsers for flag values: numbers, ranges, grids, assignments, matrices,
//! and surface names.

use sl2r_core::families::{sigma_theta0, sigma_x0, sigma_y0, SpecialSurface};
use sl2r_core::ode::PlaneGrid;
use sl2r_core::suites::special_grid;
use sl2r_core::translator::{explicit_solution, SolutionParams};
use sl2r_core::{Family, InvariantSurface, KillingFieldKind, Sl2Matrix, SolutionKind};

use crate::CliError;

pub fn number(what: &str, text: &str) -> Result<f64, CliError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{what}: cannot parse {text:?} as a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{what}: {text} is not finite")));
    }
    Ok(v)
}

pub fn family(text: &str) -> Result<Family, CliError> {
    Family::parse(text.trim())
        .ok_or_else(|| CliError::usage(format!("unknown family {text:?} (expected N, A or K)")))
}

pub fn field(text: &str) -> Result<KillingFieldKind, CliError> {
    KillingFieldKind::parse(text.trim()).ok_or_else(|| {
        CliError::usage(format!(
            "unknown field {text:?} (expected dx, dtheta, v or w)"
        ))
    })
}

/// `lo:hi` with `lo < hi`.
pub fn range(what: &str, text: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("{what}: expected lo:hi, got {text:?}")))?;
    let (a, b) = (number(what, a)?, number(what, b)?);
    if !(a < b) {
        return Err(CliError::usage(format!("{what}: empty range {text}")));
    }
    Ok((a, b))
}

fn axis(what: &str, text: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "{what}: expected lo:hi:n, got {text:?}"
        )));
    }
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{what}: bad point count {:?}", parts[2])))?;
    Ok((number(what, parts[0])?, number(what, parts[1])?, n))
}

/// `lo:hi:n,lo:hi:n`, first axis varying slowest.
pub fn grid(text: &str) -> Result<PlaneGrid, CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::usage(format!("grid: expected two axes, got {text:?}")))?;
    PlaneGrid::new(axis("grid", a)?, axis("grid", b)?)
        .map_err(|e| CliError::usage(format!("grid: {e}")))
}

/// `k=v,k=v` with numeric values, in the given order.
pub fn assignments(what: &str, text: &str) -> Result<Vec<(String, f64)>, CliError> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{what}: expected key=value, got {item:?}")))?;
        let k = k.trim().to_string();
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(CliError::usage(format!("{what}: {k} given twice")));
        }
        let v = number(what, v)?;
        out.push((k, v));
    }
    Ok(out)
}

pub fn matrix(text: &str) -> Result<Sl2Matrix, CliError> {
    let v = text
        .split(',')
        .map(|p| number("matrix", p))
        .collect::<Result<Vec<_>, _>>()?;
    let [a, b, c, d] = v[..] else {
        return Err(CliError::usage(format!(
            "matrix: expected a,b,c,d, got {text:?}"
        )));
    };
    Sl2Matrix::with_tolerance(a, b, c, d, 1e-9).map_err(|e| CliError::usage(format!("matrix: {e}")))
}

/// A surface picked from the catalog, with its default evaluation grid.
pub struct ResolvedSurface {
    pub surface: InvariantSurface,
    pub default_grid: PlaneGrid,
}

/// Resolves `name[:args]`. Special surfaces take one number (`sigma-y0:2`);
/// explicit solutions take assignments (`rot-cmc:H=2,c=1`). `family` selects
/// the member of a special surface and must match an explicit solution.
pub fn surface(spec: &str, family: Option<Family>) -> Result<ResolvedSurface, CliError> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let special = |default: f64, build: &dyn Fn(f64) -> Result<SpecialSurface, CliError>| {
        let value = match args {
            Some(a) => number(name, a)?,
            None => default,
        };
        let sp = build(value)?;
        let member = match family {
            Some(f) => sp.member(f).ok_or_else(|| {
                CliError::usage(format!("{} has no {f}-invariant description", sp.name))
            })?,
            None => &sp.members[0],
        };
        Ok(ResolvedSurface {
            surface: member.clone(),
            default_grid: special_grid(member.curve.family()).map_err(CliError::internal)?,
        })
    };
    match name {
        "sigma-x0" => special(0.0, &|v| Ok(sigma_x0(v))),
        "sigma-y0" => special(1.0, &|v| {
            sigma_y0(v).map_err(|e| CliError::usage(format!("sigma-y0: {e}")))
        }),
        "sigma-theta0" => special(0.0, &|v| Ok(sigma_theta0(v))),
        _ => {
            let kind = SolutionKind::parse(name)
                .ok_or_else(|| CliError::usage(format!("unknown surface {name:?}")))?;
            if let Some(f) = family {
                if f != kind.family() {
                    return Err(CliError::usage(format!(
                        "{name} is {}-invariant, not {f}-invariant",
                        kind.family()
                    )));
                }
            }
            let given = match args {
                Some(a) => assignments(name, a)?,
                None => Vec::new(),
            };
            let h = given.iter().find(|(k, _)| k == "H").map_or(1.0, |kv| kv.1);
            let mut params = SolutionParams::defaults(kind, h);
            for (k, v) in &given {
                params
                    .set(k, *v)
                    .map_err(|e| CliError::usage(format!("{name}: {e}")))?;
            }
            let sol = explicit_solution(kind, params)
                .map_err(|e| CliError::usage(format!("{name}: {e}")))?;
            Ok(ResolvedSurface {
                surface: sol.surface(),
                default_grid: sol.default_grid(30, 30).map_err(CliError::internal)?,
            })
        }
    }
}
