use std::f64::consts::PI;

use radpulse::eigen::{bracket_interval, characteristic, eigenfunction_value, required_bisections, solve_eigenvalue};
use radpulse::quad::simpson;
use radpulse::{EigenBasis, PecletNumber, RadError};

const PECLET_GRID: [f64; 9] = [-1.99, -1.5, -0.5, 1e-6, 0.5, 1.0, 4.0, 7.5, 10.0];

fn pe(v: f64) -> PecletNumber {
    PecletNumber::new(v).unwrap()
}

#[test]
fn orthonormal_under_simpson() {
    let basis = EigenBasis::with_terms(pe(4.0), 10).unwrap();
    for m in 1..=10 {
        for n in m..=10 {
            let f = |xi: f64| eigenfunction_value(&basis, m, xi).unwrap() * eigenfunction_value(&basis, n, xi).unwrap();
            let integral = simpson(f, 0.0, 1.0, 2000);
            let expected = if m == n { 1.0 } else { 0.0 };
            assert!((integral - expected).abs() < 1e-6, "<{m},{n}> = {integral}");
        }
    }
}

#[test]
fn endpoints_bracket_a_sign_change() {
    for &p in &PECLET_GRID {
        for n in 1..=200 {
            let (lo, hi) = bracket_interval::<f64>(n);
            assert!(characteristic(lo, p) * characteristic(hi, p) < 0.0, "Pe={p} n={n}");
        }
        for n in 2..=200 {
            let (a, b) = ((n - 1) as f64 * PI, n as f64 * PI);
            assert!(characteristic(a, p) * characteristic(b, p) < 0.0, "Pe={p} n={n}");
        }
    }
}

#[test]
fn one_root_per_bracket() {
    for &p in &PECLET_GRID {
        let basis = EigenBasis::with_terms(pe(p), 500).unwrap();
        let mu = basis.mu();
        for (i, &m) in mu.iter().enumerate() {
            let n = i + 1;
            assert!(m > (n - 1) as f64 * PI && m < n as f64 * PI, "Pe={p} n={n} μ={m}");
            assert!(characteristic(m, p).abs() <= 1e-8 * m.max(1.0));
        }
        assert!(mu.windows(2).all(|w| w[1] > w[0]));
        // μ cot μ decreases across each bracket, so g has no second sign change
        for n in [1usize, 2, 7, 50] {
            let (lo, hi) = bracket_interval::<f64>(n);
            let samples: Vec<f64> = (0..=4000)
                .map(|i| characteristic(lo + (hi - lo) * i as f64 / 4000.0, p))
                .collect();
            let changes = samples.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
            assert_eq!(changes, 1, "Pe={p} n={n}");
        }
    }
}

#[test]
fn weights_positive() {
    for &p in &PECLET_GRID {
        let basis = EigenBasis::with_terms(pe(p), 300).unwrap();
        assert!(basis.norm_weight().iter().all(|&w| w > 0.0));
    }
}

#[test]
fn neumann_limit_is_continuous() {
    let near = EigenBasis::with_terms(pe(1e-6), 5).unwrap();
    for n in 1..=5 {
        let limit = (n as f64 - 0.5) * PI;
        // first-order shift is Pe/(2 μ) which is below 1e-6 for every n
        assert!((near.eigenvalue(n).unwrap() - limit).abs() < 1e-6, "n={n}");
    }
    let exact = EigenBasis::with_terms(PecletNumber::zero(), 100).unwrap();
    for n in 1..=100 {
        assert!((exact.eigenvalue(n).unwrap() - (n as f64 - 0.5) * PI).abs() <= 1e-12);
    }
}

#[test]
fn offset_from_asymptote_shrinks() {
    for p in [0.5, 1.0, 4.0, 10.0] {
        let basis = EigenBasis::with_terms(pe(p), 100).unwrap();
        let gaps: Vec<f64> = basis
            .mu()
            .iter()
            .enumerate()
            .map(|(i, &m)| (m - (i as f64 + 0.5) * PI).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "Pe={p}");
    }
    let basis = EigenBasis::with_terms(pe(4.0), 100).unwrap();
    let ratios: Vec<f64> = (10..=100)
        .map(|n| basis.eigenvalue(n).unwrap() / ((n as f64 - 0.5) * PI))
        .collect();
    assert!(ratios[0] > 1.0 && ratios[0] < 1.005, "{}", ratios[0]);
    assert!(ratios.windows(2).all(|w| w[1] < w[0] && w[1] > 1.0));
}

#[test]
fn bisection_budget() {
    assert_eq!(required_bisections(PI, 1e-8), 29);
    assert!(solve_eigenvalue(3, pe(4.0), 1e-30).is_err());
    assert!(matches!(PecletNumber::new(-2.0), Err(RadError::InvalidPeclet(_))));
    assert!(matches!(PecletNumber::new(10.5), Err(RadError::InvalidPeclet(_))));
}

#[test]
fn single_precision_tracks_double() {
    let b32 = radpulse::f32::EigenBasis::with_terms(radpulse::eigen::PecletNumber::new(4.0f32).unwrap(), 14).unwrap();
    let b64 = EigenBasis::with_terms(pe(4.0), 14).unwrap();
    for (a, b) in b32.mu().iter().zip(b64.mu()) {
        assert!((*a as f64 - b).abs() < 1e-4 * b);
    }
}
