//! Explicit integrators for the reduction ODEs.
//!
//! Two methods are available: classical fixed-step RK4 (kept for convergence
//! studies) and adaptive Dormand-Prince 5(4) with PI step control. Terminal
//! events are located by bisection on fresh single steps from the last
//! accepted point, so their accuracy is set by the local error, not by the
//! dense-output interpolant.

mod dopri;
mod portrait;

pub use portrait::{sample_direction_field, DirectionSample, PlaneGrid};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-hand side `u' = f(s, u)` together with a domain predicate.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, s: f64, u: &[f64], du: &mut [f64]);

    fn in_domain(&self, _u: &[f64]) -> bool {
        true
    }
}

/// Closure-backed [`OdeSystem`].
pub struct FnSystem<F, D = fn(&[f64]) -> bool> {
    dim: usize,
    f: F,
    domain: Option<D>,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            f,
            domain: None,
        }
    }
}

impl<F, D> FnSystem<F, D>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
    D: Fn(&[f64]) -> bool + Sync,
{
    pub fn with_domain(dim: usize, f: F, domain: D) -> Self {
        Self {
            dim,
            f,
            domain: Some(domain),
        }
    }
}

impl<F, D> OdeSystem for FnSystem<F, D>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
    D: Fn(&[f64]) -> bool + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, s: f64, u: &[f64], du: &mut [f64]) {
        (self.f)(s, u, du)
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        self.domain.as_ref().is_none_or(|d| d(u))
    }
}

pub type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + Sync + 'a>;

/// Terminal event: integration stops where `g` changes from positive to
/// non-positive.
pub struct Event<'a> {
    pub name: String,
    pub g: EventFn<'a>,
}

impl<'a> Event<'a> {
    pub fn new(name: impl Into<String>, g: impl Fn(f64, &[f64]) -> f64 + Sync + 'a) -> Self {
        Self {
            name: name.into(),
            g: Box::new(g),
        }
    }

    /// Stops when component `index` falls to `floor`.
    pub fn lower_bound(name: impl Into<String>, index: usize, floor: f64) -> Self {
        Self::new(name, move |_, u| u[index] - floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed { step: f64 },
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub event_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45,
            initial_step: None,
            max_step: None,
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 1_000_000,
            event_tol: 1e-9,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::Rk4Fixed { step },
            ..Self::default()
        }
    }

    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.event_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        if let Method::Rk4Fixed { step } = self.method {
            if !(step > 0.0) {
                return bad("RK4 step must be positive");
            }
        }
        if matches!(self.initial_step, Some(h) if !(h > 0.0))
            || matches!(self.max_step, Some(h) if !(h > 0.0))
        {
            return bad("step bounds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    Event(String),
    StepFailure(String),
}

/// Accepted samples of a solution, strictly monotone in `s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    s: Vec<f64>,
    states: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
    termination: Termination,
}

impl Trajectory {
    fn start(s0: f64, u0: Vec<f64>, f0: Vec<f64>) -> Self {
        Self {
            s: vec![s0],
            states: vec![u0],
            derivs: vec![f0],
            termination: Termination::ReachedEnd,
        }
    }

    fn push(&mut self, s: f64, u: Vec<f64>, f: Vec<f64>) {
        self.s.push(s);
        self.states.push(u);
        self.derivs.push(f);
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.s
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.s
            .iter()
            .copied()
            .zip(self.states.iter().map(|v| v.as_slice()))
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    pub fn first(&self) -> (f64, &[f64]) {
        (self.s[0], &self.states[0])
    }

    pub fn last(&self) -> (f64, &[f64]) {
        let n = self.s.len() - 1;
        (self.s[n], &self.states[n])
    }

    /// Covered parameter interval `(lo, hi)` regardless of direction.
    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.s[0], self.s[self.s.len() - 1]);
        (a.min(b), a.max(b))
    }

    /// Cubic Hermite dense output; `None` outside the covered interval.
    pub fn interpolate(&self, s: f64) -> Option<Vec<f64>> {
        let (lo, hi) = self.span();
        if !(s >= lo && s <= hi) {
            return None;
        }
        let forward = self.s.len() < 2 || self.s[1] > self.s[0];
        let idx = if forward {
            self.s.partition_point(|&v| v <= s)
        } else {
            self.s.partition_point(|&v| v >= s)
        };
        let i = idx.clamp(1, self.s.len().max(2) - 1);
        if self.s.len() == 1 {
            return Some(self.states[0].clone());
        }
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let h = s1 - s0;
        let tau = (s - s0) / h;
        let (h00, h10, h01, h11) = hermite_basis(tau);
        let (u0, u1, f0, f1) = (
            &self.states[i - 1],
            &self.states[i],
            &self.derivs[i - 1],
            &self.derivs[i],
        );
        Some(
            (0..u0.len())
                .map(|k| h00 * u0[k] + h10 * h * f0[k] + h01 * u1[k] + h11 * h * f1[k])
                .collect(),
        )
    }

    /// Fraction of `span` covered by the trajectory.
    pub fn coverage(&self, span: (f64, f64)) -> f64 {
        let (a, b) = self.span();
        if span.1 > span.0 {
            (b - a) / (span.1 - span.0)
        } else {
            1.0
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self.termination(), Termination::StepFailure(_))
    }

    /// Joins a backward and a forward trajectory sharing their initial point
    /// into one ascending trajectory. The termination reason of the forward
    /// leg is kept unless the backward leg failed.
    pub fn stitch(backward: Trajectory, forward: Trajectory) -> Trajectory {
        let mut out = Trajectory {
            s: Vec::with_capacity(backward.len() + forward.len()),
            states: Vec::new(),
            derivs: Vec::new(),
            termination: forward.termination.clone(),
        };
        if let Termination::StepFailure(_) = backward.termination {
            out.termination = backward.termination.clone();
        }
        for i in (1..backward.len()).rev() {
            out.push(
                backward.s[i],
                backward.states[i].clone(),
                backward.derivs[i].clone(),
            );
        }
        for i in 0..forward.len() {
            out.push(
                forward.s[i],
                forward.states[i].clone(),
                forward.derivs[i].clone(),
            );
        }
        out
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Integrates from `span.0` to `span.1` (either direction).
pub fn integrate(
    system: &dyn OdeSystem,
    initial: &[f64],
    span: (f64, f64),
    config: &IntegratorConfig,
    events: &[Event<'_>],
) -> Result<Trajectory> {
    config.validate()?;
    if initial.len() != system.dim() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} components, system has {}",
            initial.len(),
            system.dim()
        )));
    }
    if !system.in_domain(initial) || initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "initial state {initial:?} outside the system domain"
        )));
    }
    if !(span.0.is_finite() && span.1.is_finite()) {
        return Err(Error::InvalidParameter(
            "non-finite integration range".into(),
        ));
    }
    match config.method {
        Method::Rk4Fixed { step } => Ok(rk4_fixed(system, initial, span, step, events)),
        Method::Rk45 => Ok(dopri::integrate(system, initial, span, config, events)),
    }
}

fn eval(system: &dyn OdeSystem, s: f64, u: &[f64]) -> Vec<f64> {
    let mut du = vec![0.0; u.len()];
    system.rhs(s, u, &mut du);
    du
}

fn rk4_step(system: &dyn OdeSystem, s: f64, u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let k1 = eval(system, s, u);
    let tmp: Vec<f64> = (0..n).map(|i| u[i] + 0.5 * h * k1[i]).collect();
    let k2 = eval(system, s + 0.5 * h, &tmp);
    let tmp: Vec<f64> = (0..n).map(|i| u[i] + 0.5 * h * k2[i]).collect();
    let k3 = eval(system, s + 0.5 * h, &tmp);
    let tmp: Vec<f64> = (0..n).map(|i| u[i] + h * k3[i]).collect();
    let k4 = eval(system, s + h, &tmp);
    (0..n)
        .map(|i| u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn rk4_fixed(
    system: &dyn OdeSystem,
    initial: &[f64],
    span: (f64, f64),
    step: f64,
    events: &[Event<'_>],
) -> Trajectory {
    let (s0, s1) = span;
    let nsteps = ((s1 - s0).abs() / step).ceil().max(1.0) as usize;
    let h = (s1 - s0) / nsteps as f64;
    let mut traj = Trajectory::start(s0, initial.to_vec(), eval(system, s0, initial));
    if s0 == s1 {
        return traj;
    }
    let mut u = initial.to_vec();
    for k in 0..nsteps {
        let s = s0 + k as f64 * h;
        let s_next = if k + 1 == nsteps {
            s1
        } else {
            s0 + (k + 1) as f64 * h
        };
        let next = rk4_step(system, s, &u, s_next - s);
        if next.iter().any(|v| !v.is_finite()) || !system.in_domain(&next) {
            traj.termination = Termination::StepFailure(format!("left the domain near s = {s}"));
            return traj;
        }
        for ev in events {
            if (ev.g)(s, &u) > 0.0 && (ev.g)(s_next, &next) <= 0.0 {
                // Fixed-step mode keeps the grid; the event is reported at the step end.
                traj.push(s_next, next.clone(), eval(system, s_next, &next));
                traj.termination = Termination::Event(ev.name.clone());
                return traj;
            }
        }
        let f = eval(system, s_next, &next);
        traj.push(s_next, next.clone(), f);
        u = next;
    }
    traj
}
