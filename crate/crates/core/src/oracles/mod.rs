//! Independent solvers used to cross-check the eigenfunction series.

pub mod fd;
pub mod mc;

pub use fd::{fd_run, fd_solve, FdGrid, FdSolution, Scheme};
pub use mc::{ks_critical_1pct, ks_statistic, mc_exit_times, mc_positions, McConfig, McExitTimes};

use crate::curve::Curve;
use crate::eigen::EigenBasis;
use crate::error::{RadError, Result};
use crate::params::{ModelParams, Truncation};
use crate::quad::cumulative_trapezoid;
use crate::series::{derivative_series, exit_flow_series};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub sup_norm_error: f64,
    /// Time at which the largest deviation occurs.
    pub at_time: f64,
    /// Overlap of the requested window with both curves.
    pub window: (f64, f64),
    pub samples_compared: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sup-norm difference of two curves over `window`.
///
/// The coarser curve is interpolated linearly onto the sample times of the
/// finer one.
pub fn compare_curves(a: &Curve, b: &Curve, window: (f64, f64), tolerance: f64) -> Result<OracleReport> {
    let (fine, coarse) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let (fa, fb) = fine.t_range();
    let (ca, cb) = coarse.t_range();
    let lo = window.0.max(fa).max(ca);
    let hi = window.1.min(fb).min(cb);
    if !(lo <= hi) {
        return Err(RadError::DisjointWindows);
    }
    let mut worst = (0.0, lo);
    let mut count = 0;
    for &(t, y) in fine.samples().iter().filter(|s| s.0 >= lo && s.0 <= hi) {
        let other = coarse.interpolate(t).ok_or(RadError::DisjointWindows)?;
        let err = (y - other).abs();
        if err > worst.0 || count == 0 {
            worst = (err, t);
        }
        count += 1;
    }
    if count == 0 {
        return Err(RadError::DisjointWindows);
    }
    Ok(OracleReport {
        sup_norm_error: worst.0,
        at_time: worst.1,
        window: (lo, hi),
        samples_compared: count,
        tolerance,
        pass: worst.0 <= tolerance,
    })
}

/// Leading-order effect of spreading the injection uniformly over `[0, εL]`
/// on the normalized exit flow: `(ε²/6) max |J' + κ_d J|` over `taus`.
pub fn pulse_width_error_estimate(
    basis: &EigenBasis<f64>,
    kappa_d: f64,
    epsilon: f64,
    taus: &[f64],
    trunc: &Truncation<f64>,
) -> f64 {
    let worst = taus
        .iter()
        .map(|&tau| {
            let j = exit_flow_series(basis, kappa_d, tau, 0.0, trunc);
            let dj = derivative_series(basis, kappa_d, tau, trunc);
            (dj + kappa_d * j).abs()
        })
        .fold(0.0, f64::max);
    epsilon * epsilon / 6.0 * worst
}

/// Exit-time distribution `∫₀ᵗ j dt / M_0` for pure transport, tabulated by
/// trapezoidal quadrature of the series.
#[derive(Debug, Clone)]
pub struct ExitTimeCdf {
    times: Vec<f64>,
    cdf: Vec<f64>,
}

impl ExitTimeCdf {
    const TAU_START: f64 = 1e-3;
    const TAU_STEP: f64 = 5e-4;

    /// Tabulates up to `tau_end · t_d`; requires `k = 0`.
    pub fn new(params: &ModelParams<f64>, basis: &EigenBasis<f64>, tau_end: f64) -> Result<Self> {
        if params.rate_k != 0.0 {
            return Err(RadError::RequiresPureTransport(params.rate_k));
        }
        if !(tau_end > Self::TAU_START) {
            return Err(RadError::param("tau_end", "must exceed the tabulation start"));
        }
        let trunc = Truncation::default();
        let xi0 = params.injection_x0 / params.length;
        let t_d = params.diffusion_time();
        let n = ((tau_end - Self::TAU_START) / Self::TAU_STEP).ceil() as usize + 1;
        let mut samples = Vec::with_capacity(n + 1);
        // the density is below 1e-100 before TAU_START for any supported Pe
        samples.push((0.0, 0.0));
        samples.extend((0..n).map(|i| {
            let tau = Self::TAU_START + i as f64 * Self::TAU_STEP;
            (tau, exit_flow_series(basis, 0.0, tau, xi0, &trunc))
        }));
        let cdf = cumulative_trapezoid(&samples);
        Ok(Self {
            times: samples.iter().map(|s| s.0 * t_d).collect(),
            cdf,
        })
    }

    /// Linear interpolation in the table; 1 past its end.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let idx = self.times.partition_point(|&x| x < t);
        if idx >= self.times.len() {
            return 1.0;
        }
        if idx == 0 {
            return self.cdf[0];
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        (c0 + (c1 - c0) * (t - t0) / (t1 - t0)).min(1.0)
    }

    /// Total tabulated mass; should be 1 to quadrature accuracy.
    pub fn total(&self) -> f64 {
        *self.cdf.last().unwrap_or(&0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveKind;
    use crate::eigen::PecletNumber;

    fn line(slope: f64, n: usize, t_hi: f64) -> Curve {
        let samples = (0..n).map(|i| {
            let t = t_hi * i as f64 / (n - 1) as f64;
            (t, slope * t)
        });
        Curve::new(CurveKind::ExitFlow, samples.collect(), None).unwrap()
    }

    #[test]
    fn compare_linear_curves() {
        let r = compare_curves(&line(1.0, 11, 1.0), &line(1.1, 101, 2.0), (0.0, 5.0), 0.05).unwrap();
        assert_eq!(r.window, (0.0, 1.0));
        assert_eq!(r.samples_compared, 51);
        assert!((r.sup_norm_error - 0.1).abs() < 1e-12);
        assert!((r.at_time - 1.0).abs() < 1e-12);
        assert!(!r.pass);
        assert_eq!(
            compare_curves(&line(1.0, 11, 1.0), &line(1.0, 11, 1.0), (2.0, 3.0), 1.0),
            Err(RadError::DisjointWindows)
        );
    }

    #[test]
    fn cdf_has_unit_mass() {
        let basis = EigenBasis::with_terms(PecletNumber::new(4.0).unwrap(), 400).unwrap();
        let p = ModelParams::from_dimensionless(4.0, 0.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        let cdf = ExitTimeCdf::new(&p, &basis, 30.0).unwrap();
        assert!((cdf.total() - 1.0).abs() < 1e-6, "{}", cdf.total());
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert_eq!(cdf.eval(1e9), 1.0);
        assert!(cdf.eval(0.2) < cdf.eval(0.4));
    }
}
