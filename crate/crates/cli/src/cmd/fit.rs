use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use radpulse::kinetics::{estimate_peclet, extract_rate_constant, observed_moments, Weighting};
use radpulse::{Curve, CurveKind};

use crate::output::emit;
use crate::{Outcome, UsageError};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightArg {
    Baseline,
    Uniform,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Exit-flow curve with reaction
    #[arg(long)]
    pub curve_k: Option<PathBuf>,
    /// Exit-flow curve without reaction (same time grid)
    #[arg(long = "curve-0")]
    pub curve_0: PathBuf,
    /// Window start [default: 0.05 t_d]
    #[arg(long)]
    pub t_lo: Option<f64>,
    /// Window end [default: 2 t_d]
    #[arg(long)]
    pub t_hi: Option<f64>,
    #[arg(long, value_enum, default_value_t = WeightArg::Baseline)]
    pub weighting: WeightArg,
    /// Diffusion time, required when the curve carries no metadata
    #[arg(long)]
    pub td: Option<f64>,
    /// Pulse amount, required for the Péclet estimate without metadata
    #[arg(long)]
    pub a: Option<f64>,
    /// Also estimate Pe from the moments of the non-reactive curve
    #[arg(long)]
    pub peclet: bool,
    /// Output report [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_curve(path: &Path) -> anyhow::Result<Curve> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let curve = Curve::from_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
    match curve.kind() {
        CurveKind::ExitFlow | CurveKind::NormalizedExitFlow => Ok(curve),
        other => Err(UsageError(format!(
            "{}: expected an exit-flow curve, found {other}",
            path.display()
        ))
        .into()),
    }
}

fn required(flag: Option<f64>, meta: Option<f64>, name: &str) -> Result<f64, UsageError> {
    flag.or(meta)
        .ok_or_else(|| UsageError(format!("--{name} is required when the curve has no metadata header")))
}

pub fn run(args: &FitArgs) -> anyhow::Result<Outcome> {
    let c0 = read_curve(&args.curve_0)?;
    let meta = c0.meta().copied();
    let mut report = String::new();
    let mut summary = String::from("fit");

    if args.curve_k.is_none() && !args.peclet {
        return Err(UsageError("nothing to fit: give --curve-k and/or --peclet".into()).into());
    }
    if let Some(path) = &args.curve_k {
        let ck = read_curve(path)?;
        let t_d = match (args.t_lo, args.t_hi) {
            (Some(_), Some(_)) => f64::NAN,
            _ => required(args.td, meta.map(|m| m.t_d), "td")?,
        };
        let window = (args.t_lo.unwrap_or(0.05 * t_d), args.t_hi.unwrap_or(2.0 * t_d));
        let weighting = match args.weighting {
            WeightArg::Baseline => Weighting::Baseline,
            WeightArg::Uniform => Weighting::Uniform,
        };
        let est = extract_rate_constant(&ck, &c0, window, weighting)?;
        writeln!(report, "k_hat={:?}", est.k_hat)?;
        writeln!(report, "stderr={:?}", est.stderr)?;
        writeln!(report, "raw_slope={:?}", est.raw_slope)?;
        writeln!(report, "clamped={}", est.clamped)?;
        writeln!(report, "n_points_used={}", est.n_points_used)?;
        writeln!(report, "window={:?},{:?}", window.0, window.1)?;
        writeln!(
            report,
            "weighting={}",
            args.weighting
                .to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        )?;
        write!(
            summary,
            " k_hat={:?} stderr={:?} clamped={}",
            est.k_hat, est.stderr, est.clamped
        )?;
    }
    if args.peclet {
        let t_d = required(args.td, meta.map(|m| m.t_d), "td")?;
        let a = required(args.a, meta.map(|m| m.a), "a")?;
        let (m0, m1) = observed_moments(&c0)?;
        let est = estimate_peclet(m0, m1, t_d, a)?;
        writeln!(report, "m0={m0:?}")?;
        writeln!(report, "m1={m1:?}")?;
        writeln!(report, "pe_hat={:?}", est.pe_hat)?;
        writeln!(report, "pe_residual={:?}", est.residual)?;
        write!(summary, " pe_hat={:?} pe_residual={:?}", est.pe_hat, est.residual)?;
    }
    emit(args.out.as_deref(), &report, &summary)?;
    Ok(Outcome::Ok)
}
