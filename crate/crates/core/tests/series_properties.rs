use std::f64::consts::PI;

use radpulse::oracles::{fd_run, FdGrid, Scheme};
use radpulse::series::{
    concentration, exit_flow, holdup, normalized_exit_flow, normalized_exit_flow_derivative, two_term_exit_flow,
    two_term_exit_flow_derivative, uniform_grid,
};
use radpulse::{EigenBasis, ModelParams, PecletNumber, Truncation};

fn basis(pe: f64, n: usize) -> EigenBasis {
    EigenBasis::with_terms(PecletNumber::new(pe).unwrap(), n).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn reaction_factors_out_of_the_normalized_flow() {
    let tr = Truncation::default();
    let mut worst: f64 = 0.0;
    for pe in linspace(-1.9, 10.0, 20) {
        let b = basis(pe, 2000);
        for kappa in linspace(0.0, 5.0, 20) {
            for tau in linspace(0.01, 3.0, 20) {
                let jk = normalized_exit_flow(&b, kappa, tau, &tr).unwrap();
                let j0 = normalized_exit_flow(&b, 0.0, tau, &tr).unwrap();
                let expected = (-kappa * tau).exp() * j0;
                worst = worst.max(((jk - expected) / expected).abs());
            }
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn outflow_plus_holdup_loss_balances() {
    let tr = Truncation::default();
    for pe in [-1.5, 0.0, 1.0, 4.0, 8.0] {
        let b = basis(pe, 5000);
        for kappa_d in [0.0, 0.5, 2.0] {
            for (t_d, length, x0) in [(1.0, 1.0, 0.0), (3.0, 2.0, 0.2)] {
                let p = ModelParams::from_dimensionless(pe, kappa_d, t_d, 1.5, length, x0).unwrap();
                for s in linspace(0.05, 2.0, 40) {
                    let t = s * t_d;
                    let h = 1e-5 * t_d;
                    let di = (holdup(&p, &b, t + h, &tr).unwrap() - holdup(&p, &b, t - h, &tr).unwrap()) / (2.0 * h);
                    let i = holdup(&p, &b, t, &tr).unwrap();
                    let j = exit_flow(&p, &b, t, &tr).unwrap();
                    let residual = j + di + p.rate_k * i;
                    assert!(
                        residual.abs() <= 1e-6 * j.abs(),
                        "Pe={pe} κ={kappa_d} t={t}: {residual} vs {j}"
                    );
                }
            }
        }
    }
}

#[test]
fn outflow_is_positive() {
    let tr = Truncation::default();
    for pe in [-1.9, -1.0, 0.0, 0.5, 2.0, 5.0, 10.0] {
        let b = basis(pe, 5000);
        for x0 in [0.0, 0.01] {
            let p = ModelParams::from_dimensionless(pe, 0.3, 1.0, 1.0, 1.0, x0).unwrap();
            for t in linspace(0.05, 20.0, 400) {
                assert!(exit_flow(&p, &b, t, &tr).unwrap() > 0.0, "Pe={pe} x0={x0} t={t}");
            }
        }
    }
}

#[test]
fn doubling_the_term_cap_is_invisible() {
    for pe in [-1.5, 0.0, 4.0, 10.0] {
        let b = basis(pe, 5000);
        let small = Truncation::default().with_max_terms(2500).unwrap();
        let big = Truncation::default();
        let taus: Vec<f64> = (0..=60).map(|i| 1e-4 * 10f64.powf(i as f64 / 15.0)).collect();
        for tau in taus {
            for kappa in [0.0, 1.0] {
                let a = normalized_exit_flow(&b, kappa, tau, &small).unwrap();
                let c = normalized_exit_flow(&b, kappa, tau, &big).unwrap();
                assert!((a - c).abs() < big.tail_tol, "Pe={pe} τ={tau}");
            }
        }
    }
}

#[test]
fn no_reaction_returns_the_pulse() {
    let tr = Truncation::default();
    let b = basis(0.0, 5000);
    let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    let body =
        radpulse::quad::adaptive_simpson(|t| exit_flow(&p, &b, t.max(1e-4), &tr).unwrap(), 1e-4, 10.0, 1e-10, 40);
    let tail = holdup(&p, &b, 10.0, &tr).unwrap();
    assert!((body + tail - 1.0).abs() < 1e-6, "{}", body + tail);
}

#[test]
fn holdup_limits() {
    let tr = Truncation::default();
    let b = basis(0.0, 5000);
    let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 2.0, 1.0, 0.0).unwrap();
    let early = holdup(&p, &b, 1e-4, &tr).unwrap();
    assert!((early - 2.0).abs() < 0.02, "{early}");
    let b4 = basis(4.0, 5000);
    let p4 = ModelParams::from_dimensionless(4.0, 0.0, 1.0, 2.0, 1.0, 0.0).unwrap();
    assert!(holdup(&p4, &b4, 10.0, &tr).unwrap() < 1e-15 * 2.0);
}

#[test]
fn closed_inlet_flow_peak_value() {
    let tr = Truncation::default();
    let b = basis(0.0, 100);
    let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    assert!((exit_flow(&p, &b, 0.167, &tr).unwrap() - 1.850).abs() < 1e-3);
    assert!((normalized_exit_flow(&b, 0.0, 0.1669, &tr).unwrap() - 1.850).abs() < 0.01);
    assert!((two_term_exit_flow(&b, 0.0, 0.167).unwrap() - 1.850).abs() < 1e-3);
}

#[test]
fn neumann_series_closed_form() {
    let tr = Truncation::default();
    let b = basis(0.0, 400);
    for tau in [0.01, 0.1, 0.5, 2.0] {
        let direct: f64 = (1..=400)
            .map(|n| {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                let k = n as f64 - 0.5;
                PI * sign * (2 * n - 1) as f64 * (-k * k * PI * PI * tau).exp()
            })
            .sum();
        let j = normalized_exit_flow(&b, 0.0, tau, &tr).unwrap();
        assert!((j - direct).abs() < 1e-12 * direct.abs().max(1.0), "τ={tau}");
    }
}

#[test]
fn derivative_matches_central_difference() {
    let tr = Truncation::default();
    for pe in [0.0, 2.0, -1.0] {
        let b = basis(pe, 2000);
        let h = 1e-5;
        let fd = (normalized_exit_flow(&b, 0.4, 0.3 + h, &tr).unwrap()
            - normalized_exit_flow(&b, 0.4, 0.3 - h, &tr).unwrap())
            / (2.0 * h);
        let dj = normalized_exit_flow_derivative(&b, 0.4, 0.3, &tr).unwrap();
        assert!((fd - dj).abs() < 1e-6, "Pe={pe}: {fd} vs {dj}");
    }
}

#[test]
fn single_peak_then_decay() {
    let tr = Truncation::default();
    let b = basis(0.0, 100);
    let tau_max = 3.0 * 3f64.ln() / (2.0 * PI * PI);
    assert!(two_term_exit_flow_derivative(&b, 0.0, tau_max).unwrap().abs() < 1e-10);
    for tau in linspace(tau_max + 0.01, 2.0, 200) {
        assert!(normalized_exit_flow_derivative(&b, 0.0, tau, &tr).unwrap() < 0.0);
    }
}

#[test]
fn two_modes_suffice_past_the_peak_rise() {
    let tr = Truncation::fixed_terms(100).unwrap();
    let b = basis(0.0, 100);
    let rel = |tau: f64| {
        let full = normalized_exit_flow(&b, 0.0, tau, &tr).unwrap();
        (two_term_exit_flow(&b, 0.0, tau).unwrap() - full) / full
    };
    // at τ = 0.1 the third mode still contributes about 2%
    assert!((rel(0.1) + 0.0224).abs() < 5e-4, "{}", rel(0.1));
    for tau in linspace(0.115, 3.0, 100) {
        assert!(rel(tau).abs() < 0.01, "τ={tau}");
        let capped = normalized_exit_flow(&b, 0.0, tau, &Truncation::fixed_terms(2).unwrap()).unwrap();
        assert_eq!(capped, two_term_exit_flow(&b, 0.0, tau).unwrap());
    }
}

#[test]
fn stronger_advection_gives_earlier_higher_peaks() {
    let tr = Truncation::default();
    let times = uniform_grid(0.001, 2.0, 2000);
    let peaks: Vec<(f64, f64)> = [0.0, 1.0, 2.0, 4.0]
        .iter()
        .map(|&pe| {
            let b = basis(pe, 5000);
            let p = ModelParams::from_dimensionless(pe, 0.0, 1.0, 1.0, 1.0, 0.01).unwrap();
            times
                .iter()
                .map(|&t| (t, exit_flow(&p, &b, t, &tr).unwrap()))
                .fold((0.0, f64::MIN), |acc, s| if s.1 > acc.1 { s } else { acc })
        })
        .collect();
    for w in peaks.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 > w[0].1, "{peaks:?}");
    }
}

#[test]
fn interior_profile_decays() {
    let tr = Truncation::default();
    let b = basis(4.0, 5000);
    let p = ModelParams::from_dimensionless(4.0, 1.0, 1.0, 1.0, 1.0, 0.01).unwrap();
    let xs = linspace(0.0, 1.0, 201);
    let maxima: Vec<f64> = [0.05, 0.1, 0.2, 0.4, 0.8]
        .iter()
        .map(|&t| {
            let c: Vec<f64> = xs.iter().map(|&x| concentration(&p, &b, x, t, &tr).unwrap()).collect();
            assert!(c[200].abs() < 1e-12);
            c.into_iter().fold(f64::MIN, f64::max)
        })
        .collect();
    assert!(maxima.windows(2).all(|w| w[1] < w[0]), "{maxima:?}");
}

#[test]
fn concentration_agrees_with_finite_differences() {
    let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
    let grid = FdGrid::new(999, 5e-5, 0.2, 0.01, Scheme::CrankNicolson)
        .unwrap()
        .step_check(false);
    let sol = fd_run(&p, &grid).unwrap();
    let (x, c_fd) = sol.profile[500];
    assert!((x - 0.5).abs() < 1e-12);
    let c = concentration(&p, &basis(0.0, 5000), 0.5, 0.2, &Truncation::default()).unwrap();
    assert!(((c_fd - c) / c).abs() < 1e-3, "{c_fd} vs {c}");
}

mod randomized {
    use proptest::prelude::*;
    use radpulse::series::normalized_exit_flow;
    use radpulse::{Curve, CurveKind, CurveMeta, EigenBasis, PecletNumber, Truncation};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factorization_at_random_points(pe in -1.99f64..10.0, kappa in 0.0f64..5.0, tau in 1e-3f64..4.0) {
            let b = EigenBasis::with_terms(PecletNumber::new(pe).unwrap(), 2000).unwrap();
            let tr = Truncation::default();
            let jk = normalized_exit_flow(&b, kappa, tau, &tr).unwrap();
            let j0 = normalized_exit_flow(&b, 0.0, tau, &tr).unwrap();
            let expected = (-kappa * tau).exp() * j0;
            prop_assert!(((jk - expected) / expected).abs() < 1e-12);
        }

        #[test]
        fn curve_csv_round_trip(
            steps in prop::collection::vec(1e-6f64..1.0, 1..50),
            values in prop::collection::vec(-1e6f64..1e6, 50),
            pe in -1.9f64..10.0,
            t_d in 1e-3f64..1e3,
        ) {
            let mut t = 0.0;
            let samples: Vec<(f64, f64)> = steps.iter().zip(&values).map(|(dt, &y)| { t += dt; (t, y) }).collect();
            let meta = CurveMeta { pe, kappa_d: 0.5, t_d, x0: 0.01, a: 2.0, terms: Some(100) };
            let c = Curve::new(CurveKind::Holdup, samples, Some(meta)).unwrap();
            prop_assert_eq!(Curve::from_csv(&c.to_csv()).unwrap(), c);
        }
    }
}
