//! Eigenfunction-series evaluation of concentration, exit flow and holdup.
//!
//! All sums are accumulated from the smallest term up with compensation and
//! are cut off once the analytic envelope of the next term falls below
//! [`Truncation::tail_tol`], after the envelope has passed its maximum. The
//! basis size and [`Truncation::max_terms`] act as hard caps.
//!
//! Dimensional results use `j = (aD/L²)·J(t/t_d)` and `c = (a/L)·ρ`, the
//! forms that keep `∫ j dt = a` for any reactor length.

use rayon::prelude::*;

use crate::curve::{Curve, CurveKind, CurveMeta};
use crate::eigen::EigenBasis;
use crate::error::{RadError, Result};
use crate::params::{ModelParams, Truncation};
use crate::scalar::{sum_descending, Scalar};

/// Runs the truncated sum. `term(i)` returns the i-th (0-based) term and an
/// upper bound on its magnitude.
fn truncated_sum<T: Scalar>(n_max: usize, tail_tol: T, mut term: impl FnMut(usize) -> (T, T)) -> T {
    let mut terms = Vec::with_capacity(n_max.min(256));
    let mut prev_bound = T::infinity();
    for i in 0..n_max {
        let (value, bound) = term(i);
        terms.push(value);
        if bound < tail_tol && bound <= prev_bound {
            break;
        }
        prev_bound = bound;
    }
    sum_descending(&terms)
}

fn check_basis<T: Scalar>(params: &ModelParams<T>, basis: &EigenBasis<T>) -> Result<()> {
    let a = basis.pe().value().as_f64();
    let b = params.peclet().value().as_f64();
    if (a - b).abs() > 1e-10 * b.abs().max(1.0) {
        return Err(RadError::BasisMismatch { basis: a, params: b });
    }
    Ok(())
}

fn check_tau<T: Scalar>(tau: T, trunc: &Truncation<T>, scale: T) -> Result<()> {
    if !tau.is_finite() || tau < trunc.min_time {
        return Err(RadError::TimeTooSmall {
            t: (tau * scale).as_f64(),
            floor: (trunc.min_time * scale).as_f64(),
        });
    }
    Ok(())
}

fn check_kappa<T: Scalar>(kappa_d: T) -> Result<()> {
    if !(kappa_d >= T::zero()) || !kappa_d.is_finite() {
        return Err(RadError::param("kappa_d", "must be finite and non-negative"));
    }
    Ok(())
}

fn n_max<T: Scalar>(basis: &EigenBasis<T>, trunc: &Truncation<T>) -> usize {
    basis.count().min(trunc.max_terms)
}

/// Normalised exit flow for injection at `ξ0`, without range checks.
pub(crate) fn exit_flow_series<T: Scalar>(
    basis: &EigenBasis<T>,
    kappa_d: T,
    tau: T,
    xi0: T,
    trunc: &Truncation<T>,
) -> T {
    let pe = basis.pe().value();
    let half = T::lit(0.5);
    let (mu, w) = (basis.mu(), basis.norm_weight());
    let sum = truncated_sum(n_max(basis, trunc), trunc.tail_tol, |i| {
        let decay = (-mu[i] * mu[i] * tau).exp();
        let amp = mu[i] / w[i];
        let s = if xi0 == T::zero() {
            basis.sin_mu()[i]
        } else {
            (mu[i] * (T::one() - xi0)).sin()
        };
        (amp * s * decay, amp * decay)
    });
    (pe * half * (T::one() - xi0) - (pe * pe / T::lit(4.0) + kappa_d) * tau).exp() * sum
}

fn holdup_series<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T, tau: T, xi0: T, trunc: &Truncation<T>) -> T {
    let pe = basis.pe().value();
    let half = T::lit(0.5);
    let (mu, w) = (basis.mu(), basis.norm_weight());
    let sum = truncated_sum(n_max(basis, trunc), trunc.tail_tol, |i| {
        let r = pe * half / mu[i];
        let denom = mu[i] * w[i] * (T::one() + r * r);
        let decay = (-mu[i] * mu[i] * tau).exp() / denom;
        let s = (mu[i] * (T::one() - xi0)).sin();
        (s * decay, decay.abs())
    });
    (pe * half * (T::one() - xi0) - (pe * pe / T::lit(4.0) + kappa_d) * tau).exp() * sum
}

/// Concentration `c(x, t)` for a delta pulse at `x0`.
pub fn concentration<T: Scalar>(
    params: &ModelParams<T>,
    basis: &EigenBasis<T>,
    x: T,
    t: T,
    trunc: &Truncation<T>,
) -> Result<T> {
    check_basis(params, basis)?;
    let l = params.length;
    if !(x >= T::zero() && x <= l) {
        return Err(RadError::param("x", "position must lie in [0, L]"));
    }
    let t_d = params.diffusion_time();
    let tau = t / t_d;
    check_tau(tau, trunc, t_d)?;
    let pe = params.peclet().value();
    let (xi, xi0) = (x / l, params.injection_x0 / l);
    let (mu, w) = (basis.mu(), basis.norm_weight());
    let sum = truncated_sum(n_max(basis, trunc), trunc.tail_tol, |i| {
        let decay = (-mu[i] * mu[i] * tau).exp() / w[i];
        let modes = (mu[i] * (T::one() - xi0)).sin() * (mu[i] * (T::one() - xi)).sin();
        (modes * decay, decay)
    });
    let growth = pe * T::lit(0.5) * (xi - xi0) - (pe * pe / T::lit(4.0) + params.kappa_d()) * tau;
    Ok(params.pulse_amount / l * growth.exp() * sum)
}

/// Exit flow `j(L, t) = -D c_x(L, t)`.
pub fn exit_flow<T: Scalar>(params: &ModelParams<T>, basis: &EigenBasis<T>, t: T, trunc: &Truncation<T>) -> Result<T> {
    check_basis(params, basis)?;
    let t_d = params.diffusion_time();
    let tau = t / t_d;
    check_tau(tau, trunc, t_d)?;
    let l = params.length;
    let xi0 = params.injection_x0 / l;
    let scale = params.pulse_amount * params.diffusivity / (l * l);
    Ok(scale * exit_flow_series(basis, params.kappa_d(), tau, xi0, trunc))
}

/// Amount of gas still inside the reactor, `I(t) = ∫ c dx`.
pub fn holdup<T: Scalar>(params: &ModelParams<T>, basis: &EigenBasis<T>, t: T, trunc: &Truncation<T>) -> Result<T> {
    check_basis(params, basis)?;
    let t_d = params.diffusion_time();
    let tau = t / t_d;
    check_tau(tau, trunc, t_d)?;
    let xi0 = params.injection_x0 / params.length;
    Ok(params.pulse_amount * holdup_series(basis, params.kappa_d(), tau, xi0, trunc))
}

/// `J(τ_d) = j(L, t)/(aD/L²)` as a function of `τ_d = t/t_d`, injection at 0.
pub fn normalized_exit_flow<T: Scalar>(
    basis: &EigenBasis<T>,
    kappa_d: T,
    tau_d: T,
    trunc: &Truncation<T>,
) -> Result<T> {
    check_kappa(kappa_d)?;
    check_tau(tau_d, trunc, T::one())?;
    Ok(exit_flow_series(basis, kappa_d, tau_d, T::zero(), trunc))
}

/// `dJ/dτ_d`, differentiated term by term.
pub fn normalized_exit_flow_derivative<T: Scalar>(
    basis: &EigenBasis<T>,
    kappa_d: T,
    tau_d: T,
    trunc: &Truncation<T>,
) -> Result<T> {
    check_kappa(kappa_d)?;
    check_tau(tau_d, trunc, T::one())?;
    Ok(derivative_series(basis, kappa_d, tau_d, trunc))
}

pub(crate) fn derivative_series<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T, tau_d: T, trunc: &Truncation<T>) -> T {
    let pe = basis.pe().value();
    let shift = pe * pe / T::lit(4.0) + kappa_d;
    let (mu, w, s) = (basis.mu(), basis.norm_weight(), basis.sin_mu());
    let sum = truncated_sum(n_max(basis, trunc), trunc.tail_tol, |i| {
        let amp = mu[i] / w[i] * (shift + mu[i] * mu[i]) * (-mu[i] * mu[i] * tau_d).exp();
        (amp * s[i], amp)
    });
    -(pe * T::lit(0.5) - shift * tau_d).exp() * sum
}

fn two_terms<T: Scalar>(basis: &EigenBasis<T>) -> Result<()> {
    if basis.count() < 2 {
        return Err(RadError::BasisTooSmall {
            needed: 2,
            available: basis.count(),
        });
    }
    Ok(())
}

/// `J(τ_d)` from the first two modes only.
pub fn two_term_exit_flow<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T, tau_d: T) -> Result<T> {
    two_terms(basis)?;
    check_kappa(kappa_d)?;
    let trunc = Truncation::new(2, T::min_positive_value(), T::min_positive_value())?;
    Ok(exit_flow_series(basis, kappa_d, tau_d, T::zero(), &trunc))
}

/// Two-mode `J'(τ_d)`.
pub fn two_term_exit_flow_derivative<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T, tau_d: T) -> Result<T> {
    two_terms(basis)?;
    let trunc = Truncation::new(2, T::min_positive_value(), T::min_positive_value())?;
    normalized_exit_flow_derivative(basis, kappa_d, tau_d, &trunc)
}

/// `n` uniformly spaced times on `[lo, hi]`; both ends are exact.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let mut g: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
            g[n - 1] = hi;
            g
        }
    }
}

/// `n` logarithmically spaced times on `[lo, hi]`, `lo > 0`; both ends are
/// exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = uniform_grid(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(first) = g.first_mut() {
        *first = lo;
    }
    if n > 1 {
        g[n - 1] = hi;
    }
    g
}

fn meta_for(params: &ModelParams<f64>, basis: &EigenBasis<f64>, trunc: &Truncation<f64>) -> CurveMeta {
    CurveMeta {
        pe: params.peclet().value(),
        kappa_d: params.kappa_d(),
        t_d: params.diffusion_time(),
        x0: params.injection_x0,
        a: params.pulse_amount,
        terms: Some(basis.count().min(trunc.max_terms)),
    }
}

fn sample(times: &[f64], f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<(f64, f64)>> {
    times.par_iter().map(|&t| f(t).map(|y| (t, y))).collect()
}

/// Samples `j(L, t)` on the given times.
pub fn exit_flow_curve(
    params: &ModelParams<f64>,
    basis: &EigenBasis<f64>,
    times: &[f64],
    trunc: &Truncation<f64>,
) -> Result<Curve> {
    let samples = sample(times, |t| exit_flow(params, basis, t, trunc))?;
    Curve::new(CurveKind::ExitFlow, samples, Some(meta_for(params, basis, trunc)))
}

/// Samples `I(t)` on the given times.
pub fn holdup_curve(
    params: &ModelParams<f64>,
    basis: &EigenBasis<f64>,
    times: &[f64],
    trunc: &Truncation<f64>,
) -> Result<Curve> {
    let samples = sample(times, |t| holdup(params, basis, t, trunc))?;
    Curve::new(CurveKind::Holdup, samples, Some(meta_for(params, basis, trunc)))
}

/// Samples `c(x, t)` at a fixed position.
pub fn concentration_curve(
    params: &ModelParams<f64>,
    basis: &EigenBasis<f64>,
    x: f64,
    times: &[f64],
    trunc: &Truncation<f64>,
) -> Result<Curve> {
    let samples = sample(times, |t| concentration(params, basis, x, t, trunc))?;
    Curve::new(CurveKind::Concentration, samples, Some(meta_for(params, basis, trunc)))
}

/// Samples `J(τ_d)` on dimensionless times.
pub fn normalized_exit_flow_curve(
    basis: &EigenBasis<f64>,
    kappa_d: f64,
    taus: &[f64],
    trunc: &Truncation<f64>,
) -> Result<Curve> {
    let samples = sample(taus, |tau| normalized_exit_flow(basis, kappa_d, tau, trunc))?;
    let meta = CurveMeta {
        pe: basis.pe().value(),
        kappa_d,
        t_d: 1.0,
        x0: 0.0,
        a: 1.0,
        terms: Some(basis.count().min(trunc.max_terms)),
    };
    Curve::new(CurveKind::NormalizedExitFlow, samples, Some(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::PecletNumber;
    use std::f64::consts::PI;

    fn basis(pe: f64, n: usize) -> EigenBasis<f64> {
        EigenBasis::with_terms(PecletNumber::new(pe).unwrap(), n).unwrap()
    }

    #[test]
    fn dirichlet_outlet() {
        let p = ModelParams::from_dimensionless(4.0, 1.0, 1.0, 1.0, 1.0, 0.01).unwrap();
        let b = basis(4.0, 500);
        for t in [0.01, 0.1, 1.0] {
            let c = concentration(&p, &b, 1.0, t, &Truncation::default()).unwrap();
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_closed_form() {
        let b = basis(0.0, 200);
        let tr = Truncation::default();
        for tau in [0.05, 0.167, 0.5, 1.3] {
            let direct: f64 = (1..200)
                .map(|n| {
                    let nf = n as f64;
                    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                    PI * sign * (2.0 * nf - 1.0) * (-(nf - 0.5).powi(2) * PI * PI * tau).exp()
                })
                .sum();
            let j = normalized_exit_flow(&b, 0.0, tau, &tr).unwrap();
            assert!(
                (j - direct).abs() < 1e-11 * direct.abs().max(1.0),
                "{tau}: {j} vs {direct}"
            );
        }
    }

    #[test]
    fn peak_value_near_1_850() {
        let b = basis(0.0, 200);
        let j = normalized_exit_flow(&b, 0.0, 0.1669, &Truncation::default()).unwrap();
        assert!((j - 1.850).abs() < 0.01);
        let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let jd = exit_flow(&p, &b, 0.167, &Truncation::default()).unwrap();
        assert!((jd - 1.850).abs() < 0.01);
    }

    #[test]
    fn reaction_factorizes() {
        let b = basis(0.0, 200);
        let tr = Truncation::default();
        let j2 = normalized_exit_flow(&b, 2.0, 0.5, &tr).unwrap();
        let j0 = normalized_exit_flow(&b, 0.0, 0.5, &tr).unwrap();
        assert!((j2 - (-1.0f64).exp() * j0).abs() < 1e-14);
    }

    #[test]
    fn two_term_matches_closed_form() {
        let b = basis(0.0, 10);
        let tau = 0.167;
        let expected = PI * ((-PI * PI * tau / 4.0).exp() - 3.0 * (-9.0 * PI * PI * tau / 4.0).exp());
        let j = two_term_exit_flow(&b, 0.0, tau).unwrap();
        assert!((j - expected).abs() < 1e-13);
        let fixed = normalized_exit_flow(&b, 0.0, tau, &Truncation::fixed_terms(2).unwrap()).unwrap();
        assert_eq!(j, fixed);
        assert!(two_term_exit_flow(&basis(0.0, 1), 0.0, tau).is_err());
    }

    #[test]
    fn floor_and_mismatch_errors() {
        let p = ModelParams::from_dimensionless(1.0, 0.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        let tr = Truncation::default();
        assert!(matches!(
            exit_flow(&p, &basis(1.0, 50), 1e-5, &tr),
            Err(RadError::TimeTooSmall { .. })
        ));
        assert!(matches!(
            exit_flow(&p, &basis(2.0, 50), 0.5, &tr),
            Err(RadError::BasisMismatch { .. })
        ));
        assert!(normalized_exit_flow(&basis(1.0, 50), -1.0, 0.5, &tr).is_err());
        assert!(concentration(&p, &basis(1.0, 50), 1.5, 0.5, &tr).is_err());
    }

    #[test]
    fn holdup_vanishes_late() {
        let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let i = holdup(&p, &basis(0.0, 100), 10.0, &Truncation::default()).unwrap();
        // only the slowest mode survives: (4/π) e^{-π²τ/4}
        let slowest = 4.0 / PI * (-PI * PI / 4.0 * 10.0).exp();
        assert!(slowest < 1e-10);
        assert!((i - slowest).abs() < 1e-12 * slowest);
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let g = log_grid(1e-3, 1.0, 4);
        assert!((g[1] - 1e-2).abs() < 1e-15 && (g[3] - 1.0).abs() < 1e-15);
    }
}
