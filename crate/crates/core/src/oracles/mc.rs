//! Monte Carlo first-passage times for `dX = v dt + √(2D) dW`, reflected at
//! 0 and absorbed at `L`.
//!
//! Paths advance by Euler–Maruyama steps with the mirror rule `x ← |x|` at
//! the inlet. Absorption is tested on the end point and, between end points,
//! with the Brownian-bridge crossing probability
//! `exp(-(L - x)(L - x')/(D dt))`; a crossing is dated at the step midpoint.
//! Every path owns a ChaCha stream selected by its index, so results depend
//! only on the seed, never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{RadError, Result};
use crate::params::ModelParams;

/// Paths running past `t_cap` may not exceed this fraction.
pub const MAX_CENSORED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub t_cap: f64,
}

impl McConfig {
    /// Defaults scaled to the problem: `dt = 2·10⁻⁴ t_d`, `t_cap = 50 t_d`.
    pub fn for_params(params: &ModelParams<f64>, n_paths: usize, seed: u64) -> Self {
        let t_d = params.diffusion_time();
        Self {
            n_paths,
            dt: 2e-4 * t_d,
            seed,
            t_cap: 50.0 * t_d,
        }
    }

    fn validate(&self, params: &ModelParams<f64>) -> Result<()> {
        if self.n_paths < 1000 {
            return Err(RadError::param("n_paths", "at least 1000 paths are required"));
        }
        let t_d = params.diffusion_time();
        if !(self.dt > 0.0 && self.dt <= 1e-3 * t_d * (1.0 + 1e-12)) {
            return Err(RadError::param("dt", "time step must lie in (0, 1e-3 t_d]"));
        }
        if !(self.t_cap > 0.0) || !self.t_cap.is_finite() {
            return Err(RadError::param("t_cap", "must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McExitTimes {
    /// Absorption times of the paths that exited, in path order.
    pub times: Vec<f64>,
    pub censored: usize,
    pub config: McConfig,
}

impl McExitTimes {
    pub fn mean(&self) -> f64 {
        self.times.iter().sum::<f64>() / self.times.len() as f64
    }

    pub fn std_error(&self) -> f64 {
        std_error(&self.times)
    }

    /// `# seed,n_paths,dt` header, then one exit time per line.
    pub fn to_csv(&self) -> String {
        use crate::curve::fmt_f64;
        let mut out = String::with_capacity(26 * (self.times.len() + 4));
        out.push_str("# seed,n_paths,dt\n");
        out.push_str(&format!(
            "# {},{},{}\n",
            self.config.seed,
            self.config.n_paths,
            fmt_f64(self.config.dt)
        ));
        out.push_str("exit_time\n");
        for &t in &self.times {
            out.push_str(&fmt_f64(t));
            out.push('\n');
        }
        out
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Exit time of one path, `None` when censored.
fn simulate_path(params: &ModelParams<f64>, cfg: &McConfig, path: usize) -> Option<f64> {
    let mut rng = path_rng(cfg.seed, path);
    let (d, v, l) = (params.diffusivity, params.velocity, params.length);
    let dt = cfg.dt;
    let drift = v * dt;
    let sigma = (2.0 * d * dt).sqrt();
    let bridge_scale = d * dt;
    // bridge probabilities below e^-40 are not worth a uniform draw
    let bridge_cutoff = 40.0 * bridge_scale;
    let max_steps = (cfg.t_cap / dt).ceil() as u64;
    let mut x = params.injection_x0;
    for step in 0..max_steps {
        let z: f64 = rng.sample(StandardNormal);
        let next = (x + drift + sigma * z).abs();
        let exit_at = (step as f64 + 0.5) * dt;
        if next >= l {
            return Some(exit_at);
        }
        let gap = (l - x) * (l - next);
        if gap < bridge_cutoff && rng.gen::<f64>() < (-gap / bridge_scale).exp() {
            return Some(exit_at);
        }
        x = next;
    }
    None
}

/// Simulates `cfg.n_paths` independent exit times. Requires `k = 0`.
pub fn mc_exit_times(params: &ModelParams<f64>, cfg: &McConfig) -> Result<McExitTimes> {
    if params.rate_k != 0.0 {
        return Err(RadError::RequiresPureTransport(params.rate_k));
    }
    cfg.validate(params)?;
    let outcomes: Vec<Option<f64>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| simulate_path(params, cfg, i))
        .collect();
    let censored = outcomes.iter().filter(|o| o.is_none()).count();
    if censored as f64 >= MAX_CENSORED_FRACTION * cfg.n_paths as f64 {
        return Err(RadError::TooManyCensored {
            censored,
            total: cfg.n_paths,
        });
    }
    Ok(McExitTimes {
        times: outcomes.into_iter().flatten().collect(),
        censored,
        config: *cfg,
    })
}

/// Positions at `horizon` of paths started at `x0` and reflected at 0, with
/// no outlet.
///
/// Used to check the drift and reflection parts of the stepper in isolation;
/// without an outlet there is no Péclet range to respect.
pub fn mc_positions(diffusivity: f64, velocity: f64, x0: f64, cfg: &McConfig, horizon: f64) -> Vec<f64> {
    let steps = (horizon / cfg.dt).round() as usize;
    let drift = velocity * cfg.dt;
    let sigma = (2.0 * diffusivity * cfg.dt).sqrt();
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let mut x = x0;
            for _ in 0..steps {
                let z: f64 = rng.sample(StandardNormal);
                x = (x + drift + sigma * z).abs();
            }
            x
        })
        .collect()
}

pub fn std_error(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic, `1.6276/√n`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    (-(0.005f64).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pe: f64) -> ModelParams<f64> {
        ModelParams::from_dimensionless(pe, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(2.0);
        let cfg = McConfig {
            n_paths: 1000,
            dt: 1e-3,
            seed: 7,
            t_cap: 50.0,
        };
        let a = mc_exit_times(&p, &cfg).unwrap();
        let b = mc_exit_times(&p, &cfg).unwrap();
        assert_eq!(a, b);
        let c = mc_exit_times(&p, &McConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.times, c.times);
    }

    #[test]
    fn config_guards() {
        let p = params(0.0);
        let mut cfg = McConfig::for_params(&p, 999, 1);
        assert!(mc_exit_times(&p, &cfg).is_err());
        cfg.n_paths = 1000;
        cfg.dt = 2e-3;
        assert!(mc_exit_times(&p, &cfg).is_err());
        let reactive = ModelParams::from_dimensionless(0.0, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            mc_exit_times(&reactive, &McConfig::for_params(&reactive, 1000, 1)),
            Err(RadError::RequiresPureTransport(_))
        ));
    }

    #[test]
    fn censoring_is_reported() {
        let p = params(-1.9);
        let cfg = McConfig {
            n_paths: 1000,
            dt: 1e-3,
            seed: 3,
            t_cap: 0.05,
        };
        assert!(matches!(mc_exit_times(&p, &cfg), Err(RadError::TooManyCensored { .. })));
    }

    #[test]
    fn ks_against_uniform() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&xs, |x| x.clamp(0.0, 1.0)) <= 0.0005 + 1e-12);
        assert!((ks_critical_1pct(100) - 0.16276).abs() < 1e-4);
    }
}
