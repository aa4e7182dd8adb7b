//! Model flags shared by the curve and validate commands.

use clap::Args;
use radpulse::ModelParams;

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Péclet number vL/D
    #[arg(long)]
    pub pe: Option<f64>,
    /// Second Damköhler number k·t_d
    #[arg(long = "kappa-d", conflicts_with = "k")]
    pub kappa_d: Option<f64>,
    /// Diffusion time L²/D [default: 1]
    #[arg(long)]
    pub td: Option<f64>,
    /// Diffusivity; switches to dimensional mode
    #[arg(long = "D", conflicts_with_all = ["pe", "td"])]
    pub diffusivity: Option<f64>,
    /// Velocity (dimensional mode) [default: 0]
    #[arg(long = "v", requires = "diffusivity")]
    pub velocity: Option<f64>,
    /// Reactor length [default: 1]
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Rate constant k in 1/time
    #[arg(long)]
    pub k: Option<f64>,
    /// Pulse amount [default: 1]
    #[arg(long)]
    pub a: Option<f64>,
    /// Injection point [default depends on the command]
    #[arg(long)]
    pub x0: Option<f64>,
}

impl ModelArgs {
    /// `default_x0` is a fraction of `L`.
    pub fn resolve(&self, default_x0: f64) -> radpulse::Result<ModelParams> {
        let length = self.length.unwrap_or(1.0);
        let a = self.a.unwrap_or(1.0);
        let x0 = self.x0.unwrap_or(default_x0 * length);
        match self.diffusivity {
            Some(d) => {
                let p = ModelParams::new(d, self.velocity.unwrap_or(0.0), 0.0, length, a, x0)?;
                let k = match (self.k, self.kappa_d) {
                    (Some(k), _) => k,
                    (None, Some(kd)) => kd / p.diffusion_time(),
                    (None, None) => 0.0,
                };
                p.with_rate(k)
            }
            None => {
                let t_d = self.td.unwrap_or(1.0);
                let kappa_d = match (self.kappa_d, self.k) {
                    (Some(kd), _) => kd,
                    (None, Some(k)) => k * t_d,
                    (None, None) => 0.0,
                };
                ModelParams::from_dimensionless(self.pe.unwrap_or(0.0), kappa_d, t_d, a, length, x0)
            }
        }
    }
}
