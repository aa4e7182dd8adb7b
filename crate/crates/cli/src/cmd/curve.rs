use std::path::PathBuf;

use clap::{Args, ValueEnum};
use radpulse::series::{
    concentration_curve, exit_flow_curve, holdup_curve, log_grid, normalized_exit_flow_curve, uniform_grid,
};
use radpulse::{CurveKind, EigenBasis, RadError, Truncation};

use crate::model::ModelArgs;
use crate::output::emit;
use crate::Outcome;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    ExitFlow,
    NormalizedExitFlow,
    Concentration,
    Holdup,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Uniform,
    Log,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Kind::ExitFlow)]
    pub kind: Kind,
    /// Position for the concentration curve [default: L/2]
    #[arg(long)]
    pub x: Option<f64>,
    /// Series term cap
    #[arg(long, default_value_t = radpulse::params::MAX_SERIES_TERMS)]
    pub terms: usize,
    /// Tail tolerance of the series
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
    /// Smallest evaluable time, in units of t_d
    #[arg(long, default_value_t = 1e-4)]
    pub min_time: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Grid start, in units of t_d
    #[arg(long, default_value_t = 0.001)]
    pub t_min: f64,
    /// Grid end, in units of t_d
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    #[arg(long, value_enum, default_value_t = Grid::Uniform)]
    pub grid: Grid,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn time_grid(lo: f64, hi: f64, points: usize, grid: Grid) -> radpulse::Result<Vec<f64>> {
    if points < 2 || lo.is_nan() || hi.is_nan() || lo <= 0.0 || hi <= lo {
        return Err(RadError::InvalidParameter {
            name: "grid",
            reason: "need at least 2 points and 0 < t_min < t_max".into(),
        });
    }
    Ok(match grid {
        Grid::Uniform => uniform_grid(lo, hi, points),
        Grid::Log => log_grid(lo, hi, points),
    })
}

pub fn run(args: &CurveArgs) -> anyhow::Result<Outcome> {
    let params = args.model.resolve(0.01)?;
    let t_d = params.diffusion_time();
    let trunc = Truncation::new(args.terms, args.tail_tol, args.min_time)?;
    let basis = EigenBasis::with_terms(params.peclet(), args.terms)?;
    let taus = time_grid(args.t_min, args.t_max, args.points, args.grid)?;
    let times: Vec<f64> = taus.iter().map(|s| s * t_d).collect();
    let curve = match args.kind {
        Kind::ExitFlow => exit_flow_curve(&params, &basis, &times, &trunc)?,
        Kind::Holdup => holdup_curve(&params, &basis, &times, &trunc)?,
        Kind::Concentration => {
            let x = args.x.unwrap_or(0.5 * params.length);
            concentration_curve(&params, &basis, x, &times, &trunc)?
        }
        Kind::NormalizedExitFlow => normalized_exit_flow_curve(&basis, params.kappa_d(), &taus, &trunc)?,
    };
    let (t_peak, y_peak) =
        curve
            .samples()
            .iter()
            .copied()
            .fold((f64::NAN, f64::MIN), |acc, s| if s.1 > acc.1 { s } else { acc });
    let summary = format!(
        "curve kind={} pe={:?} kappa_d={:?} t_d={:?} x0={:?} points={} t_peak={:?} y_peak={:?}",
        CurveKind::from(args.kind),
        params.peclet().value(),
        params.kappa_d(),
        t_d,
        params.injection_x0,
        curve.len(),
        t_peak,
        y_peak
    );
    emit(args.out.as_deref(), &curve.to_csv(), &summary)?;
    Ok(Outcome::Ok)
}

impl From<Kind> for CurveKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::ExitFlow => CurveKind::ExitFlow,
            Kind::NormalizedExitFlow => CurveKind::NormalizedExitFlow,
            Kind::Concentration => CurveKind::Concentration,
            Kind::Holdup => CurveKind::Holdup,
        }
    }
}
