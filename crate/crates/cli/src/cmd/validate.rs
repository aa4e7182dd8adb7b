use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use radpulse::oracles::{
    compare_curves, fd_solve, ks_critical_1pct, ks_statistic, mc_exit_times, pulse_width_error_estimate, ExitTimeCdf,
    FdGrid, McConfig, Scheme,
};
use radpulse::series::{exit_flow_curve, uniform_grid};
use radpulse::signatures::moment_m;
use radpulse::{EigenBasis, ModelParams, Truncation};

use crate::model::ModelArgs;
use crate::output::emit;
use crate::Outcome;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Fd,
    Mc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeArg {
    Cn,
    Ie,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub oracle: Oracle,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Pulse width as a fraction of L (fd)
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Interior grid points (fd) [default: max(1000, 2/eps)]
    #[arg(long)]
    pub nx: Option<usize>,
    /// Time step in units of t_d (fd: 1e-4, mc: 2e-4)
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Cn)]
    pub scheme: SchemeArg,
    /// Skip the half-step stability rerun (fd)
    #[arg(long)]
    pub no_step_check: bool,
    /// Series terms of the analytic reference (fd)
    #[arg(long, default_value_t = 100)]
    pub terms: usize,
    /// Comparison window end, in units of t_d (fd)
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Monte Carlo paths (mc)
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Random seed (mc)
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Pass threshold on the sup-norm error (fd) [default: from the pulse-width estimate]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the FD exit-flow curve or the MC exit times here
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    /// Output report CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &ValidateArgs) -> anyhow::Result<Outcome> {
    let params = args.model.resolve(0.0)?;
    match args.oracle {
        Oracle::Fd => run_fd(args, &params),
        Oracle::Mc => run_mc(args, &params),
    }
}

fn write_samples(args: &ValidateArgs, body: &str) -> anyhow::Result<()> {
    if let Some(path) = &args.samples_out {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Ok
    } else {
        Outcome::ValidationFailed
    }
}

fn run_fd(args: &ValidateArgs, params: &ModelParams) -> anyhow::Result<Outcome> {
    let t_d = params.diffusion_time();
    let nx = args.nx.unwrap_or_else(|| ((2.0 / args.eps).ceil() as usize).max(1000));
    let scheme = match args.scheme {
        SchemeArg::Cn => Scheme::CrankNicolson,
        SchemeArg::Ie => Scheme::ImplicitEuler,
    };
    let dt = args.dt.unwrap_or(1e-4) * t_d;
    let t_end = args.t_max * t_d;
    let grid = FdGrid::new(nx, dt, t_end, args.eps, scheme)?.step_check(!args.no_step_check);
    let fd = fd_solve(params, &grid)?;

    let basis = EigenBasis::with_terms(params.peclet(), args.terms)?;
    let trunc = Truncation::fixed_terms(args.terms)?;
    let t_floor = 1e-3 * t_d;
    let times: Vec<f64> = fd.times().filter(|&t| t >= t_floor).collect();
    let series = exit_flow_curve(params, &basis, &times, &trunc)?;

    // j = (a D / L²) J
    let scale = params.pulse_amount / t_d;
    let tol = match args.tol {
        Some(t) => t,
        None => {
            let taus = uniform_grid(t_floor / t_d, args.t_max, 2000);
            let wide = EigenBasis::with_terms(params.peclet(), 2000)?;
            let est = pulse_width_error_estimate(&wide, params.kappa_d(), args.eps, &taus, &Truncation::default());
            scale * (1.25 * est + 1e-4)
        }
    };
    let r = compare_curves(&fd, &series, (0.0, t_end), tol)?;
    write_samples(args, &fd.to_csv())?;

    let mut body = String::from("oracle,eps,nx,dt,sup_norm_error,at_time,t_lo,t_hi,samples_compared,tolerance,pass\n");
    writeln!(
        body,
        "fd,{:?},{},{:?},{:?},{:?},{:?},{:?},{},{:?},{}",
        args.eps, nx, dt, r.sup_norm_error, r.at_time, r.window.0, r.window.1, r.samples_compared, r.tolerance, r.pass
    )?;
    let summary = format!(
        "validate oracle=fd eps={:?} nx={} dt={:?} sup_norm_error={:?} at_time={:?} tolerance={:?} pass={}",
        args.eps, nx, dt, r.sup_norm_error, r.at_time, r.tolerance, r.pass
    );
    emit(args.out.as_deref(), &body, &summary)?;
    Ok(outcome(r.pass))
}

fn run_mc(args: &ValidateArgs, params: &ModelParams) -> anyhow::Result<Outcome> {
    let t_d = params.diffusion_time();
    let mut cfg = McConfig::for_params(params, args.paths, args.seed);
    if let Some(dt) = args.dt {
        cfg.dt = dt * t_d;
    }
    let mc = mc_exit_times(params, &cfg)?;
    write_samples(args, &mc.to_csv())?;

    let basis = EigenBasis::with_terms(params.peclet(), 2000)?;
    let trunc = Truncation::default();
    let expected = moment_m(1, params, &basis, &trunc)? / moment_m(0, params, &basis, &trunc)?;
    let (mean, se) = (mc.mean(), mc.std_error());
    let z = (mean - expected) / se;
    let cdf = ExitTimeCdf::new(params, &basis, 20.0)?;
    let ks = ks_statistic(&mc.times, |t| cdf.eval(t));
    let crit = ks_critical_1pct(mc.times.len());
    let pass = z.abs() < 3.0 && ks < crit;

    let mut body =
        String::from("oracle,n_paths,seed,dt,censored,mean,std_error,expected_mean,z,ks_statistic,ks_critical,pass\n");
    writeln!(
        body,
        "mc,{},{},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{}",
        cfg.n_paths, cfg.seed, cfg.dt, mc.censored, mean, se, expected, z, ks, crit, pass
    )?;
    let summary = format!(
        "validate oracle=mc n_paths={} seed={} mean={:?} std_error={:?} expected_mean={:?} z={:?} ks_statistic={:?} ks_critical={:?} pass={}",
        cfg.n_paths, cfg.seed, mean, se, expected, z, ks, crit, pass
    );
    emit(args.out.as_deref(), &body, &summary)?;
    Ok(outcome(pass))
}
