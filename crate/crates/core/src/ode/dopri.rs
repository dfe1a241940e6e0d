//! Dormand-Prince 5(4) with FSAL and a PI step-size controller.

use super::{eval, Event, IntegratorConfig, OdeSystem, Termination, Trajectory};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Step {
    u: Vec<f64>,
    err: Vec<f64>,
    f_end: Vec<f64>,
}

fn step(system: &dyn OdeSystem, s: f64, u: &[f64], k1: &[f64], h: f64) -> Step {
    let n = u.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(k1.to_vec());
    let mut tmp = vec![0.0; n];
    for stage in 1..7 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += A[stage][j] * kj[i];
            }
            tmp[i] = u[i] + h * acc;
        }
        k.push(eval(system, s + C[stage] * h, &tmp));
    }
    // Stage 7 is evaluated at the 5th order solution (FSAL).
    let unew = tmp;
    let err = (0..n)
        .map(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>())
        .collect();
    Step {
        u: unew,
        err,
        f_end: k.pop().unwrap(),
    }
}

fn error_norm(cfg: &IntegratorConfig, u: &[f64], unew: &[f64], err: &[f64]) -> f64 {
    let n = u.len() as f64;
    let sum: f64 = (0..u.len())
        .map(|i| {
            let sc = cfg.atol + cfg.rtol * u[i].abs().max(unew[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step(
    system: &dyn OdeSystem,
    s: f64,
    u: &[f64],
    f0: &[f64],
    dir: f64,
    total: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let n = u.len() as f64;
    let sc: Vec<f64> = u.iter().map(|v| cfg.atol + cfg.rtol * v.abs()).collect();
    let rms = |v: &[f64]| (v.iter().zip(&sc).map(|(a, b)| (a / b).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = rms(u);
    let d1 = rms(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(total);
    let u1: Vec<f64> = u.iter().zip(f0).map(|(a, b)| a + dir * h0 * b).collect();
    if !system.in_domain(&u1) || u1.iter().any(|v| !v.is_finite()) {
        return h0;
    }
    let f1 = eval(system, s + dir * h0, &u1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / m).powf(0.2)
    };
    (100.0 * h0).min(h1).min(total)
}

pub(super) fn integrate(
    system: &dyn OdeSystem,
    initial: &[f64],
    span: (f64, f64),
    cfg: &IntegratorConfig,
    events: &[Event<'_>],
) -> Trajectory {
    let (s0, s1) = span;
    let f0 = eval(system, s0, initial);
    let mut traj = Trajectory::start(s0, initial.to_vec(), f0.clone());
    if s0 == s1 {
        return traj;
    }
    let dir = (s1 - s0).signum();
    let total = (s1 - s0).abs();
    let max_step = cfg.max_step.unwrap_or(f64::INFINITY);

    let mut s = s0;
    let mut u = initial.to_vec();
    let mut k1 = f0;
    let mut h = cfg
        .initial_step
        .unwrap_or_else(|| initial_step(system, s, &u, &k1, dir, total, cfg))
        .min(max_step);
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;
    let mut steps = 0usize;

    loop {
        let remaining = (s1 - s).abs();
        if remaining <= 1e-14 * s1.abs().max(1.0) {
            break;
        }
        if steps >= cfg.max_steps {
            traj.termination = Termination::StepFailure(format!(
                "max steps ({}) exceeded at s = {s}",
                cfg.max_steps
            ));
            return traj;
        }
        steps += 1;
        let last = h >= remaining;
        let hh = h.min(remaining).min(max_step);
        if hh < 1e-14 * s.abs().max(1.0) {
            traj.termination = Termination::StepFailure(format!("step size underflow at s = {s}"));
            return traj;
        }
        let st = step(system, s, &u, &k1, dir * hh);
        let finite = st.u.iter().chain(&st.f_end).all(|v| v.is_finite());
        if !finite || !system.in_domain(&st.u) {
            h = hh * 0.25;
            rejected = true;
            continue;
        }
        let e = error_norm(cfg, &u, &st.u, &st.err);
        if e <= 1.0 {
            let s_new = if last && hh == remaining {
                s1
            } else {
                s + dir * hh
            };
            if let Some((name, tau)) =
                locate_event(system, events, cfg, s, &u, &k1, s_new, &st.u, dir, hh)
            {
                let ue = if tau == hh {
                    st.u.clone()
                } else {
                    step(system, s, &u, &k1, dir * tau).u
                };
                let se = if tau == hh { s_new } else { s + dir * tau };
                let fe = eval(system, se, &ue);
                traj.push(se, ue, fe);
                traj.termination = Termination::Event(name);
                return traj;
            }
            traj.push(s_new, st.u.clone(), st.f_end.clone());
            s = s_new;
            u = st.u;
            k1 = st.f_end;
            let mut fac = SAFETY * e.max(1e-10).powf(-ALPHA) * err_old.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected {
                fac = fac.min(1.0);
            }
            err_old = e.max(1e-4);
            rejected = false;
            h = (hh * fac).min(max_step);
        } else {
            h = hh * FAC_MIN.max(SAFETY * e.powf(-ALPHA));
            rejected = true;
        }
    }
    traj
}

#[allow(clippy::too_many_arguments)]
fn locate_event(
    system: &dyn OdeSystem,
    events: &[Event<'_>],
    cfg: &IntegratorConfig,
    s: f64,
    u: &[f64],
    k1: &[f64],
    s_new: f64,
    u_new: &[f64],
    dir: f64,
    hh: f64,
) -> Option<(String, f64)> {
    let mut best: Option<(String, f64)> = None;
    for ev in events {
        if !((ev.g)(s, u) > 0.0 && (ev.g)(s_new, u_new) <= 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, hh);
        while hi - lo > cfg.event_tol {
            let mid = 0.5 * (lo + hi);
            let um = step(system, s, u, k1, dir * mid).u;
            let ok = um.iter().all(|v| v.is_finite()) && system.in_domain(&um);
            if ok && (ev.g)(s + dir * mid, &um) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best.as_ref().is_none_or(|(_, t)| hi < *t) {
            best = Some((ev.name.clone(), hi));
        }
    }
    best
}
