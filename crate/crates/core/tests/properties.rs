use std::f64::consts::PI;

use proptest::prelude::*;
use sl2r_core::families::{closed_form_normal_and_h, trig_curve, TrigCoordinate};
use sl2r_core::geometry::{
    classify_matrix, compose_nak, decompose_nak, frame_at, metric_at, metric_inner,
};
use sl2r_core::ode::{integrate, Event, FnSystem, IntegratorConfig, Termination};
use sl2r_core::oracle::oracle_normal_and_h;
use sl2r_core::translator::{
    a_family_poly_coeffs, explicit_solution, poly_eval, residual, AutonomousSystem, SolutionParams,
};
use sl2r_core::{
    Family, GeneratingCurve, InvariantSurface, KillingFieldKind, MatrixClass, Orientation,
    Sl2Matrix, Sl2Point, SolutionKind, TranslatorProblem,
};

fn point() -> impl Strategy<Value = Sl2Point> {
    (-3.0..3.0f64, 0.1..4.0f64, -PI..PI).prop_map(|(x, y, t)| Sl2Point::new(x, y, t).unwrap())
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::N), Just(Family::A), Just(Family::K)]
}

fn field() -> impl Strategy<Value = KillingFieldKind> {
    prop_oneof![
        Just(KillingFieldKind::Dx),
        Just(KillingFieldKind::Dtheta),
        Just(KillingFieldKind::V),
        Just(KillingFieldKind::W),
    ]
}

/// A regular trig curve: the free coordinate is strictly monotone.
fn curve(fam: Family) -> impl Strategy<Value = GeneratingCurve> {
    (
        -0.5..0.5f64,
        0.6..1.5f64,
        0.0..0.4f64,
        0.5..1.2f64,
        0.0..6.3f64,
        (
            -0.3..0.3f64,
            -0.3..0.3f64,
            0.0..0.5f64,
            0.5..2.0f64,
            0.0..6.3f64,
        ),
    )
        .prop_map(move |(c0, c1, amp, freq, phase, o)| {
            let free = TrigCoordinate {
                c0,
                c1,
                amp,
                freq,
                phase,
                positive: false,
            };
            let other = TrigCoordinate {
                c0: o.0,
                c1: o.1,
                amp: o.2,
                freq: o.3,
                phase: o.4,
                positive: fam != Family::A,
            };
            match fam {
                Family::N => trig_curve(fam, other, free),
                _ => trig_curve(fam, free, other),
            }
        })
}

fn surface_sample() -> impl Strategy<Value = (InvariantSurface, f64, f64)> {
    family().prop_flat_map(|fam| {
        let t = if fam == Family::A {
            0.3..2.5f64
        } else {
            -2.0..2.0f64
        };
        (curve(fam).prop_map(InvariantSurface::new), -1.0..1.0f64, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_is_orthonormal(p in point()) {
        let g = metric_at(&p).unwrap();
        let e = frame_at(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((metric_inner(&g, &e[i], &e[j]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nak_round_trip(p in point()) {
        let m = compose_nak(&p).unwrap();
        prop_assert!((m.det() - 1.0).abs() < 1e-12);
        let q = decompose_nak(&m).unwrap();
        prop_assert!((q.x - p.x).abs() < 1e-10 && (q.y - p.y).abs() < 1e-10);
        prop_assert!(compose_nak(&q).unwrap().max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn classification_follows_the_trace(a in 0.2..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
        let m = Sl2Matrix::new(a, b, c, (1.0 + b * c) / a).unwrap();
        let tr = m.trace().abs();
        let class = classify_matrix(&m);
        if tr < 2.0 - 1e-9 {
            prop_assert_eq!(class, MatrixClass::Elliptic);
        } else if tr > 2.0 + 1e-9 {
            prop_assert_eq!(class, MatrixClass::Hyperbolic);
        }
    }

    #[test]
    fn oracle_agrees_with_closed_forms((surf, s, t) in surface_sample()) {
        let (n_cf, h_cf) = closed_form_normal_and_h(&surf, s, t).unwrap();
        let (n_or, h_or) = oracle_normal_and_h(&surf, s, t).unwrap();
        prop_assert!((h_cf - h_or).abs() < 1e-9 * (1.0 + h_cf.abs()));
        prop_assert!(n_cf.max_abs_diff(&n_or) < 1e-10);
        prop_assert!((n_cf.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_is_odd_under_flip((surf, s, t) in surface_sample(), k in field()) {
        let p = TranslatorProblem::new(surf.family, k);
        let r = residual(&p, &surf, s, t).unwrap();
        let flipped = residual(&p.with_orientation(Orientation::Negative), &surf, s, t).unwrap();
        prop_assert!((r + flipped).abs() < 1e-12 * (1.0 + r.abs()));
        let r2 = residual(&p, &surf.flipped(), s, t).unwrap();
        prop_assert!((r + r2).abs() < 1e-12 * (1.0 + r.abs()));
    }

    #[test]
    fn mean_curvature_ignores_speed((surf, s, t) in surface_sample(), k in 0.3..3.0f64) {
        let re = InvariantSurface::new(surf.curve.reparametrized(k).unwrap());
        let (n0, h0) = closed_form_normal_and_h(&surf, s, t).unwrap();
        let (n1, h1) = closed_form_normal_and_h(&re, s / k, t).unwrap();
        prop_assert!((h0 - h1).abs() < 1e-9 * (1.0 + h0.abs()));
        prop_assert!(n0.max_abs_diff(&n1) < 1e-12);
    }

    #[test]
    fn a_polynomial_is_scaled_residual(c in curve(Family::A), k in field(), s in -1.0..1.0f64, t in 0.2..3.0f64) {
        let j = c.jet(s).unwrap();
        let phi = (j.d1[0] + 2.0 * t * j.d1[1]).hypot(j.d1[0]);
        let surf = InvariantSurface::new(c.clone());
        let r = residual(&TranslatorProblem::new(Family::A, k), &surf, s, t).unwrap();
        let want = phi.powi(3) * r / 2.0;
        let got = poly_eval(&a_family_poly_coeffs(k, &c, s).unwrap(), t);
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn explicit_translators_for_random_parameters(
        c1 in 0.2..3.0f64, c2 in -2.0..2.0f64, c in 0.2..3.0f64, s0 in -1.0..1.0f64,
        s in 0.0..1.0f64, t in -2.0..2.0f64,
    ) {
        for (kind, params) in [
            (SolutionKind::NxMinimal, SolutionParams { c1, c2, ..Default::default() }),
            (SolutionKind::NthetaCmc, SolutionParams { c1, c2, ..Default::default() }),
            (SolutionKind::NthetaGeneral, SolutionParams { c1, c2, ..Default::default() }),
            (SolutionKind::Nv, SolutionParams { c, s0, ..Default::default() }),
            (SolutionKind::RotLineV, SolutionParams { c1: c2, c2: c, ..Default::default() }),
        ] {
            let sol = explicit_solution(kind, params).unwrap();
            let (lo, hi) = sol.window();
            let ss = lo + (hi - lo) * s;
            let r = residual(&kind.problem(), &sol.surface(), ss, t).unwrap();
            prop_assert!(r.abs() < 1e-9, "{} at s = {}: {}", kind, ss, r);
            prop_assert!(sol.ode_residual(ss).unwrap() < 1e-9);
        }
    }

    #[test]
    fn autonomous_trajectories_stay_in_the_half_plane(y0 in 0.1..3.0f64, phi0 in -PI..PI) {
        let traj = integrate(
            &AutonomousSystem,
            &[y0, phi0],
            (0.0, 10.0),
            &IntegratorConfig::default(),
            &[],
        )
        .unwrap();
        prop_assert!(traj.samples().all(|(_, u)| u[0] > 0.0));
    }

    #[test]
    fn rk45_error_tracks_tolerance(omega in 0.5..3.0f64, exp in 6..12i32) {
        let tol = 10f64.powi(-exp);
        let sys = FnSystem::new(2, move |_s, u: &[f64], du: &mut [f64]| {
            du[0] = u[1];
            du[1] = -omega * omega * u[0];
        });
        let cfg = IntegratorConfig::with_tolerances(tol, tol);
        let traj = integrate(&sys, &[1.0, 0.0], (0.0, 5.0), &cfg, &[]).unwrap();
        let worst = traj
            .samples()
            .map(|(s, u)| (u[0] - (omega * s).cos()).abs())
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e3 * tol, "error {} at tol {}", worst, tol);
        prop_assert_eq!(traj.termination(), &Termination::ReachedEnd);
    }

    #[test]
    fn events_are_located(rate in 0.2..5.0f64, floor in 0.01..0.9f64) {
        let sys = FnSystem::new(1, move |_s, u: &[f64], du: &mut [f64]| du[0] = -rate * u[0]);
        let cfg = IntegratorConfig::default();
        let ev = [Event::lower_bound("floor", 0, floor)];
        let traj = integrate(&sys, &[1.0], (0.0, 50.0), &cfg, &ev).unwrap();
        let hit = -floor.ln() / rate;
        prop_assert!(matches!(traj.termination(), Termination::Event(_)));
        prop_assert!((traj.last().0 - hit).abs() < 1e-7, "{} vs {}", traj.last().0, hit);
    }
}

#[test]
fn integration_is_deterministic() {
    let run = || {
        integrate(
            &AutonomousSystem,
            &[1.0, 0.3],
            (0.0, 20.0),
            &IntegratorConfig::default(),
            &[],
        )
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.params(), b.params());
    assert_eq!(a.states(), b.states());
}
