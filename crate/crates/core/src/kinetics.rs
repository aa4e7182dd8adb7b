//! Parameter extraction from exit-flow data.
//!
//! A first-order reaction only multiplies the transport curve by `e^{-kt}`,
//! so `-ln(j_k/j_0)` is a straight line through the origin with slope `k`.
//! The Péclet number is recovered from the first-moment time `M_1/M_0`,
//! which for pure transport equals `t_d G_0(Pe, 0)` and falls monotonically
//! with Pe.

use crate::curve::Curve;
use crate::eigen::{EigenBasis, PecletNumber};
use crate::error::{RadError, Result};
use crate::params::Truncation;
use crate::signatures::{moment_g, peak_characteristic, PeakMethod};

/// Lower end of the Péclet search interval.
pub const PECLET_SEARCH_MIN: f64 = -1.9;
pub const PECLET_SEARCH_MAX: f64 = 10.0;

/// Eigenvalues used per forward evaluation during the Péclet search.
const SEARCH_TERMS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Weights proportional to the baseline `j_0(t)`.
    #[default]
    Baseline,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Non-negative estimate; see `clamped`.
    pub k_hat: f64,
    pub stderr: f64,
    /// Slope before clamping at zero.
    pub raw_slope: f64,
    /// Set when the raw slope was negative and `k_hat` was clamped to 0.
    pub clamped: bool,
    pub n_points_used: usize,
    pub time_window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PecletMethod {
    MomentRatio,
    PeakNumber,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PecletEstimate {
    pub pe_hat: f64,
    pub residual: f64,
    pub method: PecletMethod,
}

fn same_grid(a: &Curve, b: &Curve) -> bool {
    a.len() == b.len()
        && a.times()
            .zip(b.times())
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300))
}

/// Weighted least-squares slope of `-ln(j_k/j_0)` against `t`, through the
/// origin, over samples with `t` in `window`.
///
/// Samples where the reactive curve is not positive carry no information on
/// the log scale and are skipped; the count actually used is reported.
pub fn extract_rate_constant(
    curve_k: &Curve,
    curve_0: &Curve,
    window: (f64, f64),
    weighting: Weighting,
) -> Result<RateEstimate> {
    if !same_grid(curve_k, curve_0) {
        return Err(RadError::GridMismatch);
    }
    let (t_lo, t_hi) = window;
    let mut points = Vec::new();
    for (&(t, jk), &(_, j0)) in curve_k.samples().iter().zip(curve_0.samples()) {
        if t < t_lo || t > t_hi {
            continue;
        }
        if !(j0 > 0.0) {
            return Err(RadError::NonPositiveBaseline(t));
        }
        if jk > 0.0 {
            let w = match weighting {
                Weighting::Baseline => j0,
                Weighting::Uniform => 1.0,
            };
            points.push((t, -(jk / j0).ln(), w));
        }
    }
    let n = points.len();
    if n < 3 {
        return Err(RadError::WindowTooNarrow(n));
    }
    let stt: f64 = points.iter().map(|&(t, _, w)| w * t * t).sum();
    let sty: f64 = points.iter().map(|&(t, y, w)| w * t * y).sum();
    let slope = sty / stt;
    let rss: f64 = points
        .iter()
        .map(|&(t, y, w)| {
            let r = y - slope * t;
            w * r * r
        })
        .sum();
    let stderr = (rss / (n - 1) as f64 / stt).sqrt();
    Ok(RateEstimate {
        k_hat: slope.max(0.0),
        stderr,
        raw_slope: slope,
        clamped: slope < 0.0,
        n_points_used: n,
        time_window: window,
    })
}

/// `(M_0, M_1)` of a sampled exit-flow curve: trapezoidal body plus an
/// exponential tail fitted to the last two samples.
///
/// Curves that stop near `2 t_d` still hold about 1% of the pulse at Pe = 0,
/// which is the whole tolerance of [`estimate_peclet`].
pub fn observed_moments(curve: &Curve) -> Result<(f64, f64)> {
    let s = curve.samples();
    if s.len() < 3 {
        return Err(RadError::WindowTooNarrow(s.len()));
    }
    let (body0, body1) = (curve.trapezoid_moment(0), curve.trapezoid_moment(1));
    let (t1, y1) = s[s.len() - 2];
    let (t2, y2) = s[s.len() - 1];
    let (tail0, tail1) = if y1 > 0.0 && y2 > 0.0 && y2 < y1 {
        let rate = (y1 / y2).ln() / (t2 - t1);
        (y2 / rate, y2 * (t2 / rate + 1.0 / (rate * rate)))
    } else {
        (0.0, 0.0)
    };
    Ok((body0 + tail0, body1 + tail1))
}

/// First-moment time `t_d G_0(Pe, 0)` predicted for pure transport.
pub fn predicted_moment_time(pe: f64, t_d: f64) -> Result<f64> {
    let basis = EigenBasis::with_terms(PecletNumber::new(pe)?, SEARCH_TERMS)?;
    Ok(t_d * moment_g(0, &basis, 0.0, &Truncation::default())?)
}

fn bisect_monotone(target: f64, lo: f64, hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (f_lo, f_hi) = (f(lo)? - target, f(hi)? - target);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RadError::OutOfRange {
            observed: target,
            lo,
            hi,
        });
    }
    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 1e-12 || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)? - target;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Péclet number whose pure-transport first-moment time matches `m1/m0`.
pub fn estimate_peclet(m0: f64, m1: f64, t_d: f64, a: f64) -> Result<PecletEstimate> {
    if !(m0 > 0.0 && m1 > 0.0) {
        return Err(RadError::param("moments", "M0 and M1 must be positive"));
    }
    if !(t_d > 0.0 && a > 0.0) {
        return Err(RadError::param("t_d/a", "must be positive"));
    }
    let deviation = (m0 - a).abs() / a;
    if deviation > 0.01 {
        return Err(RadError::NotPureTransport(deviation));
    }
    let observed = m1 / m0;
    let pe_hat = bisect_monotone(observed, PECLET_SEARCH_MIN, PECLET_SEARCH_MAX, |pe| {
        predicted_moment_time(pe, t_d)
    })
    .map_err(|e| match e {
        RadError::OutOfRange { lo, hi, .. } => RadError::OutOfRange { observed, lo, hi },
        other => other,
    })?;
    Ok(PecletEstimate {
        pe_hat,
        residual: (predicted_moment_time(pe_hat, t_d)? - observed).abs(),
        method: PecletMethod::MomentRatio,
    })
}

/// Péclet number whose two-term peak number (no reaction) matches
/// `peak_number`.
pub fn estimate_peclet_from_peak(peak_number: f64) -> Result<PecletEstimate> {
    let forward = |pe: f64| -> Result<f64> {
        let basis = EigenBasis::with_terms(PecletNumber::new(pe)?, 2)?;
        Ok(peak_characteristic(&basis, 0.0, &Truncation::default(), PeakMethod::TwoTerm)?.peak_number)
    };
    let pe_hat = bisect_monotone(peak_number, PECLET_SEARCH_MIN, PECLET_SEARCH_MAX, forward)?;
    Ok(PecletEstimate {
        pe_hat,
        residual: (forward(pe_hat)? - peak_number).abs(),
        method: PecletMethod::PeakNumber,
    })
}

/// Converted fraction `1 - M_0/a = κ_d G_0(Pe, κ_d)`.
pub fn conversion(basis: &EigenBasis<f64>, kappa_d: f64, trunc: &Truncation<f64>) -> Result<f64> {
    Ok(kappa_d * moment_g(0, basis, kappa_d, trunc)?)
}
