//! Scalar signatures of the exit flow: raw moments, the peak number and the
//! transport time scales.
//!
//! Moments go through the auxiliary integrals
//!
//! ```text
//! G_m = ∫ τ^m I(τ)/a dτ
//!     = e^{Pe(1-ξ0)/2} Σ sin(μ_n(1-ξ0)) m! / (μ_n w_n (1 + (Pe/2μ_n)²) (κ_d + Pe²/4 + μ_n²)^{m+1})
//! ```
//!
//! and the conservation law `j = -I' - kI`, which gives
//! `M_0 = a(1 - κ_d G_0)` and `M_m = a t_d^m (m G_{m-1} - κ_d G_m)`.

use rayon::prelude::*;

use crate::curve::fmt_f64;
use crate::eigen::{bisect, EigenBasis, PecletNumber};
use crate::error::{RadError, Result};
use crate::params::{ModelParams, Truncation};
use crate::scalar::{sum_descending, Scalar};
use crate::series::{derivative_series, exit_flow_series, two_term_exit_flow};

/// Highest moment order supported.
pub const MAX_MOMENT_ORDER: usize = 6;

/// Right end of the search window for the exit-flow maximum.
pub const PEAK_SEARCH_MAX: f64 = 5.0;

/// Basis size the full-series peak search insists on.
pub const FULL_SERIES_MIN_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakMethod {
    TwoTerm,
    FullSeries,
}

/// Location and height of the normalised exit-flow maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult<T> {
    pub tau_max: T,
    pub j_max: T,
    /// `tau_max * j_max`
    pub peak_number: T,
    pub method: PeakMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureSet<T> {
    /// `M_0..=M_m` in amount·time^m.
    pub moments: Vec<T>,
    pub g_values: Vec<T>,
    pub t_mean: T,
    /// `M_1/M_0`, NaN when `M_0` is not positive.
    pub t_moments: T,
    pub peak: PeakResult<T>,
}

fn factorial<T: Scalar>(m: usize) -> T {
    (1..=m).fold(T::one(), |acc, i| acc * T::from_usize_lossy(i))
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_MOMENT_ORDER {
        return Err(RadError::OrderTooHigh(m));
    }
    Ok(())
}

fn check_kappa<T: Scalar>(kappa_d: T) -> Result<()> {
    if !(kappa_d >= T::zero()) || !kappa_d.is_finite() {
        return Err(RadError::param("kappa_d", "must be finite and non-negative"));
    }
    Ok(())
}

fn g_series<T: Scalar>(m: usize, basis: &EigenBasis<T>, kappa_d: T, xi0: T, trunc: &Truncation<T>) -> T {
    let pe = basis.pe().value();
    let half = T::lit(0.5);
    let shift = kappa_d + pe * pe / T::lit(4.0);
    let fact: T = factorial(m);
    let power = (m + 1) as i32;
    let n_max = basis.count().min(trunc.max_terms);
    let (mu, w) = (basis.mu(), basis.norm_weight());
    let mut terms = Vec::with_capacity(n_max);
    for i in 0..n_max {
        let r = pe * half / mu[i];
        let bound = fact / (mu[i] * w[i] * (T::one() + r * r) * (shift + mu[i] * mu[i]).powi(power));
        terms.push((mu[i] * (T::one() - xi0)).sin() * bound);
        if bound < trunc.tail_tol {
            break;
        }
    }
    (pe * half * (T::one() - xi0)).exp() * sum_descending(&terms)
}

/// `G_m(Pe, κ_d)` with injection at the closed end.
pub fn moment_g<T: Scalar>(m: usize, basis: &EigenBasis<T>, kappa_d: T, trunc: &Truncation<T>) -> Result<T> {
    check_order(m)?;
    check_kappa(kappa_d)?;
    Ok(g_series(m, basis, kappa_d, T::zero(), trunc))
}

/// Raw moment `M_m = ∫ t^m j(L, t) dt`, honouring the injection point of
/// `params`.
pub fn moment_m<T: Scalar>(
    m: usize,
    params: &ModelParams<T>,
    basis: &EigenBasis<T>,
    trunc: &Truncation<T>,
) -> Result<T> {
    check_order(m)?;
    let pe_b = basis.pe().value().as_f64();
    let pe_p = params.peclet().value().as_f64();
    if (pe_b - pe_p).abs() > 1e-10 * pe_p.abs().max(1.0) {
        return Err(RadError::BasisMismatch {
            basis: pe_b,
            params: pe_p,
        });
    }
    let kappa_d = params.kappa_d();
    let xi0 = params.injection_x0 / params.length;
    let a = params.pulse_amount;
    let t_d = params.diffusion_time();
    let g = |order: usize| g_series(order, basis, kappa_d, xi0, trunc);
    if m == 0 {
        return Ok(a * (T::one() - g(0) * kappa_d));
    }
    let mf = T::from_usize_lossy(m);
    let g_m = if kappa_d == T::zero() { T::zero() } else { g(m) };
    Ok(a * t_d.powi(m as i32) * (mf * g(m - 1) - kappa_d * g_m))
}

/// Closed-form maximiser of the two-mode exit flow.
pub fn two_term_tau_max<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T) -> Result<T> {
    if basis.count() < 2 {
        return Err(RadError::BasisTooSmall {
            needed: 2,
            available: basis.count(),
        });
    }
    check_kappa(kappa_d)?;
    let pe = basis.pe().value();
    let shift = pe * pe / T::lit(4.0) + kappa_d;
    let (mu, w, s) = (basis.mu(), basis.norm_weight(), basis.sin_mu());
    let term = |i: usize| mu[i] * s[i] / w[i] * (shift + mu[i] * mu[i]);
    let arg = -term(1) / term(0);
    if !(arg > T::zero()) || !arg.is_finite() {
        return Err(RadError::DegenerateRatio(arg.as_f64()));
    }
    let tau = arg.ln() / (mu[1] * mu[1] - mu[0] * mu[0]);
    if !(tau > T::zero()) {
        return Err(RadError::DegenerateRatio(arg.as_f64()));
    }
    Ok(tau)
}

/// Peak time, peak height and their product for the normalised exit flow.
///
/// The full-series variant brackets the sign change of `J'` around the
/// two-term estimate, inside `[min_time, 5]`, and bisects it.
pub fn peak_characteristic<T: Scalar>(
    basis: &EigenBasis<T>,
    kappa_d: T,
    trunc: &Truncation<T>,
    method: PeakMethod,
) -> Result<PeakResult<T>> {
    check_kappa(kappa_d)?;
    let (tau_max, j_max) = match method {
        PeakMethod::TwoTerm => {
            let tau = two_term_tau_max(basis, kappa_d)?;
            (tau, two_term_exit_flow(basis, kappa_d, tau)?)
        }
        PeakMethod::FullSeries => {
            if basis.count().min(trunc.max_terms) < FULL_SERIES_MIN_TERMS {
                return Err(RadError::BasisTooSmall {
                    needed: FULL_SERIES_MIN_TERMS,
                    available: basis.count().min(trunc.max_terms),
                });
            }
            let tau = full_series_peak(basis, kappa_d, trunc)?;
            (tau, exit_flow_series(basis, kappa_d, tau, T::zero(), trunc))
        }
    };
    Ok(PeakResult {
        tau_max,
        j_max,
        peak_number: tau_max * j_max,
        method,
    })
}

fn full_series_peak<T: Scalar>(basis: &EigenBasis<T>, kappa_d: T, trunc: &Truncation<T>) -> Result<T> {
    let floor = trunc.min_time;
    let ceil = T::lit(PEAK_SEARCH_MAX);
    let not_bracketed = || RadError::RootNotBracketed {
        lo: floor.as_f64(),
        hi: PEAK_SEARCH_MAX,
    };
    let dj = |tau: T| derivative_series(basis, kappa_d, tau, trunc);
    let seed = two_term_tau_max(basis, kappa_d)
        .unwrap_or(T::lit(0.1))
        .max(floor)
        .min(ceil);
    let (shrink, grow) = (T::lit(0.7), T::lit(1.3));
    let mut lo = seed;
    while !(dj(lo) > T::zero()) {
        if lo == floor {
            return Err(not_bracketed());
        }
        lo = (lo * shrink).max(floor);
    }
    let mut hi = seed;
    while !(dj(hi) < T::zero()) {
        if hi == ceil {
            return Err(not_bracketed());
        }
        hi = (hi * grow).min(ceil);
    }
    let tol = T::lit(64.0) * T::epsilon() * hi;
    Ok(bisect(lo, hi, tol, dj))
}

/// Mean first-passage time from the closed end,
/// `t_mean = t_d (e^{-Pe} - 1 + Pe)/Pe²`, with a Taylor expansion near 0.
pub fn mean_exit_time<T: Scalar>(pe: PecletNumber<T>, t_d: T) -> Result<T> {
    if !(t_d > T::zero()) || !t_d.is_finite() {
        return Err(RadError::param("t_d", "must be positive and finite"));
    }
    let p = pe.value();
    let ratio = if p.abs() < T::lit(1e-4) {
        // 1/2 - p/6 + p²/24 - p³/120 + p⁴/720
        let c = [1.0 / 2.0, -1.0 / 6.0, 1.0 / 24.0, -1.0 / 120.0, 1.0 / 720.0];
        c.iter().rev().fold(T::zero(), |acc, &ci| acc * p + T::lit(ci))
    } else {
        ((-p).exp_m1() + p) / (p * p)
    };
    Ok(t_d * ratio)
}

/// `t_moments / t_mean` for pure transport.
pub fn moment_time_ratio<T: Scalar>(
    params: &ModelParams<T>,
    basis: &EigenBasis<T>,
    trunc: &Truncation<T>,
) -> Result<T> {
    if params.rate_k != T::zero() {
        return Err(RadError::RequiresPureTransport(params.rate_k.as_f64()));
    }
    let m0 = moment_m(0, params, basis, trunc)?;
    let m1 = moment_m(1, params, basis, trunc)?;
    Ok(m1 / m0 / mean_exit_time(params.peclet(), params.diffusion_time())?)
}

/// Moments up to `m_max`, time scales and the peak characteristic.
pub fn signature_set<T: Scalar>(
    params: &ModelParams<T>,
    basis: &EigenBasis<T>,
    trunc: &Truncation<T>,
    m_max: usize,
    method: PeakMethod,
) -> Result<SignatureSet<T>> {
    check_order(m_max)?;
    let moments = (0..=m_max)
        .map(|m| moment_m(m, params, basis, trunc))
        .collect::<Result<Vec<_>>>()?;
    let xi0 = params.injection_x0 / params.length;
    let g_values = (0..=m_max)
        .map(|m| g_series(m, basis, params.kappa_d(), xi0, trunc))
        .collect();
    let t_moments = match moments.get(1) {
        Some(&m1) if moments[0] > T::zero() => m1 / moments[0],
        _ => T::nan(),
    };
    Ok(SignatureSet {
        moments,
        g_values,
        t_mean: mean_exit_time(params.peclet(), params.diffusion_time())?,
        t_moments,
        peak: peak_characteristic(basis, params.kappa_d(), trunc, method)?,
    })
}

/// One row of a `(Pe, κ_d)` signature sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureRow {
    pub pe: f64,
    pub kappa_d: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub tau_max: f64,
    pub j_max: f64,
    pub peak_number: f64,
    pub t_mean: f64,
    pub t_moments: f64,
}

pub const SIGNATURE_HEADER: &str = "Pe,kappa_d,M0,M1,M2,tau_max,J_max,peak_number,t_mean,t_moments";

impl SignatureRow {
    pub fn to_csv_line(&self) -> String {
        [
            self.pe,
            self.kappa_d,
            self.m0,
            self.m1,
            self.m2,
            self.tau_max,
            self.j_max,
            self.peak_number,
            self.t_mean,
            self.t_moments,
        ]
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Signatures over the Cartesian product of `pe_values` and `kappa_values`
/// (Pe-major order), with injection at the closed end.
pub fn signature_grid(
    pe_values: &[f64],
    kappa_values: &[f64],
    pulse_amount: f64,
    t_d: f64,
    n_terms: usize,
    trunc: &Truncation<f64>,
    method: PeakMethod,
) -> Result<Vec<SignatureRow>> {
    let per_pe = pe_values
        .par_iter()
        .map(|&pe| {
            let basis = EigenBasis::with_terms(PecletNumber::new(pe)?, n_terms)?;
            kappa_values
                .iter()
                .map(|&kappa_d| {
                    let params = ModelParams::from_dimensionless(pe, kappa_d, t_d, pulse_amount, 1.0, 0.0)?;
                    let s = signature_set(&params, &basis, trunc, 2, method)?;
                    Ok(SignatureRow {
                        pe,
                        kappa_d,
                        m0: s.moments[0],
                        m1: s.moments[1],
                        m2: s.moments[2],
                        tau_max: s.peak.tau_max,
                        j_max: s.peak.j_max,
                        peak_number: s.peak.peak_number,
                        t_mean: s.t_mean,
                        t_moments: s.t_moments,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_pe.into_iter().flatten().collect())
}

pub fn signature_csv(rows: &[SignatureRow]) -> String {
    let mut out = String::from(SIGNATURE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}
