use std::path::PathBuf;

use clap::{Args, ValueEnum};
use radpulse::series::uniform_grid;
use radpulse::signatures::{signature_csv, signature_grid, PeakMethod};
use radpulse::{RadError, Truncation};

use crate::output::emit;
use crate::Outcome;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Full,
    TwoTerm,
}

#[derive(Args, Debug)]
pub struct SignatureArgs {
    /// Explicit Péclet values (comma separated); overrides the Pe grid
    #[arg(long, value_delimiter = ',')]
    pub pe: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub pe_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub pe_max: f64,
    #[arg(long, default_value_t = 51)]
    pub pe_steps: usize,
    /// Explicit kappa_d values (comma separated); overrides the kappa_d grid
    #[arg(long = "kappa-d", value_delimiter = ',')]
    pub kappa_d: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub kappa_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = 51)]
    pub kappa_steps: usize,
    /// Pulse amount
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Diffusion time
    #[arg(long, default_value_t = 1.0)]
    pub td: f64,
    /// Eigenvalues per Péclet number
    #[arg(long, default_value_t = 2000)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
    /// Peak search floor, in units of t_d
    #[arg(long, default_value_t = 1e-4)]
    pub min_time: f64,
    #[arg(long, value_enum, default_value_t = Method::Full)]
    pub method: Method,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn axis(explicit: &[f64], lo: f64, hi: f64, steps: usize, name: &'static str) -> radpulse::Result<Vec<f64>> {
    if !explicit.is_empty() {
        return Ok(explicit.to_vec());
    }
    match steps {
        0 => Err(RadError::InvalidParameter {
            name,
            reason: "grid needs at least one step".into(),
        }),
        1 => Ok(vec![lo]),
        _ if hi < lo => Err(RadError::InvalidParameter {
            name,
            reason: "grid maximum below its minimum".into(),
        }),
        _ => Ok(uniform_grid(lo, hi, steps)),
    }
}

pub fn run(args: &SignatureArgs) -> anyhow::Result<Outcome> {
    let pes = axis(&args.pe, args.pe_min, args.pe_max, args.pe_steps, "pe")?;
    let kappas = axis(
        &args.kappa_d,
        args.kappa_min,
        args.kappa_max,
        args.kappa_steps,
        "kappa_d",
    )?;
    let trunc = Truncation::new(args.terms, args.tail_tol, args.min_time)?;
    let method = match args.method {
        Method::Full => PeakMethod::FullSeries,
        Method::TwoTerm => PeakMethod::TwoTerm,
    };
    let rows = signature_grid(&pes, &kappas, args.a, args.td, args.terms, &trunc, method)?;
    let (lo, hi) = rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| {
        (lo.min(r.peak_number), hi.max(r.peak_number))
    });
    let summary = format!(
        "signatures rows={} pe_values={} kappa_values={} method={} peak_number_min={:?} peak_number_max={:?}",
        rows.len(),
        pes.len(),
        kappas.len(),
        args.method
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default(),
        lo,
        hi
    );
    emit(args.out.as_deref(), &signature_csv(&rows), &summary)?;
    Ok(Outcome::Ok)
}
