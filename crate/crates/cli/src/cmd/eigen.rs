use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use radpulse::curve::fmt_f64;
use radpulse::eigen::{build_basis, DEFAULT_TOL};
use radpulse::PecletNumber;

use crate::output::emit;
use crate::Outcome;

#[derive(Args, Debug)]
pub struct EigenArgs {
    /// Péclet number in (-2, 10]
    #[arg(long, default_value_t = 0.0)]
    pub pe: f64,
    /// Number of eigenvalues
    #[arg(long, default_value_t = 14)]
    pub n: usize,
    /// Absolute root tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &EigenArgs) -> anyhow::Result<Outcome> {
    let basis = build_basis(PecletNumber::new(args.pe)?, args.n, args.tol)?;
    let mut body = String::from("n,mu,w\n");
    for (i, (mu, w)) in basis.mu().iter().zip(basis.norm_weight()).enumerate() {
        writeln!(body, "{},{},{}", i + 1, fmt_f64(*mu), fmt_f64(*w))?;
    }
    let summary = format!(
        "eigen pe={:?} n={} tol={:?} mu_1={:?} mu_n={:?}",
        args.pe,
        args.n,
        args.tol,
        basis.mu()[0],
        basis.mu()[args.n - 1]
    );
    emit(args.out.as_deref(), &body, &summary)?;
    Ok(Outcome::Ok)
}
