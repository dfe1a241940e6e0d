use serde::{Deserialize, Serialize};

use super::OdeSystem;
use crate::error::{Error, Result};

/// Inclusive tensor grid over a 2-D state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneGrid {
    pub first: (f64, f64, usize),
    pub second: (f64, f64, usize),
}

impl PlaneGrid {
    pub fn new(first: (f64, f64, usize), second: (f64, f64, usize)) -> Result<Self> {
        for (lo, hi, n) in [first, second] {
            if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && !(hi > lo)) {
                return Err(Error::InvalidParameter(format!(
                    "bad grid axis {lo}:{hi}:{n}"
                )));
            }
        }
        Ok(Self { first, second })
    }

    fn axis((lo, hi, n): (f64, f64, usize)) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
    }

    /// Row-major: the first coordinate indexes rows.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let cols: Vec<f64> = Self::axis(self.second).collect();
        Self::axis(self.first)
            .flat_map(|a| cols.iter().map(move |&b| [a, b]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub state: [f64; 2],
    /// Unit vector along the vector field, or zero at equilibria.
    pub direction: [f64; 2],
}

/// Normalized vector field of an autonomous planar system on a grid,
/// skipping points outside the system's domain.
pub fn sample_direction_field(
    system: &dyn OdeSystem,
    grid: &PlaneGrid,
) -> Result<Vec<DirectionSample>> {
    if system.dim() != 2 {
        return Err(Error::InvalidParameter(
            "direction fields need a planar system".into(),
        ));
    }
    let mut out = Vec::new();
    let mut du = [0.0; 2];
    for p in grid.points() {
        if !system.in_domain(&p) {
            continue;
        }
        system.rhs(0.0, &p, &mut du);
        let n = du[0].hypot(du[1]);
        if !n.is_finite() {
            continue;
        }
        let direction = if n > 0.0 {
            [du[0] / n, du[1] / n]
        } else {
            [0.0, 0.0]
        };
        out.push(DirectionSample {
            state: p,
            direction,
        });
    }
    Ok(out)
}
