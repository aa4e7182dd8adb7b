//! Finite-difference solution of the RAD equation for a square initial pulse.
//!
//! Nodes `x_i = i h`, `h = L/(nx + 1)`, unknowns at `i = 0..=nx`; node
//! `nx + 1` is the Dirichlet outlet. The Robin inlet uses a ghost node, so
//! every row of the operator is second order. Crank–Nicolson starts with two
//! implicit-Euler half steps to damp the discontinuity of the initial data.

use crate::curve::{Curve, CurveKind, CurveMeta};
use crate::error::{RadError, Result};
use crate::params::ModelParams;

/// Step-halving discrepancy above which a run is rejected.
pub const STEP_CHECK_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    CrankNicolson,
    ImplicitEuler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    /// Interior node count.
    pub nx: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Pulse width as a fraction of `L`; the pulse occupies `[0, εL]`.
    pub epsilon: f64,
    pub scheme: Scheme,
    /// Record the outlet flux every this many steps.
    pub sample_every: usize,
    /// Repeat the run with `dt/2` and reject it if the curves disagree.
    pub step_check: bool,
}

impl FdGrid {
    pub fn new(nx: usize, dt: f64, t_end: f64, epsilon: f64, scheme: Scheme) -> Result<Self> {
        let g = Self {
            nx,
            dt,
            t_end,
            epsilon,
            scheme,
            sample_every: 1,
            step_check: true,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }

    pub fn step_check(mut self, on: bool) -> Self {
        self.step_check = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 50 {
            return Err(RadError::param("nx", "at least 50 interior points are required"));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(RadError::param("dt", "time step and horizon must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(RadError::param("epsilon", "pulse width must lie in (0, 0.5]"));
        }
        if self.epsilon < 2.0 / self.nx as f64 {
            return Err(RadError::param(
                "epsilon",
                "pulse must span at least two cells (epsilon >= 2/nx)",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FdSolution {
    pub exit_flow: Curve,
    pub holdup: Curve,
    /// `(x, c)` at `t_end`, including both boundary nodes.
    pub profile: Vec<(f64, f64)>,
    /// Sup-norm gap to the half-step run, when it was performed.
    pub step_error: Option<f64>,
}

/// Pre-factored tridiagonal system (Thomas algorithm).
struct Tridiagonal {
    lower: Vec<f64>,
    upper_mod: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        let mut upper_mod = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = diag[i] - if i > 0 { lower[i] * prev } else { 0.0 };
            inv_pivot[i] = 1.0 / pivot;
            prev = if i + 1 < n { upper[i] * inv_pivot[i] } else { 0.0 };
            upper_mod[i] = prev;
        }
        Self {
            lower: lower.to_vec(),
            upper_mod,
            inv_pivot,
        }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}

/// Semi-discrete operator `dc/dt = A c` in tridiagonal form.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Operator {
    fn new(p: &ModelParams<f64>, nx: usize) -> Self {
        let n = nx + 1;
        let h = p.length / (nx + 1) as f64;
        let (d, v, k) = (p.diffusivity, p.velocity, p.rate_k);
        let diff = d / (h * h);
        let adv = v / (2.0 * h);
        let mut lower = vec![0.0; n];
        let mut diag = vec![-2.0 * diff - k; n];
        let mut upper = vec![0.0; n];
        for i in 1..n {
            lower[i] = diff + adv;
            upper[i - 1] = diff - adv;
        }
        // ghost node c_{-1} = c_1 - 2h (v/D) c_0
        diag[0] = -2.0 * diff - 2.0 * v / h - v * v / d - k;
        upper[0] = 2.0 * diff;
        Self { lower, diag, upper }
    }

    /// `out = c + s A c`.
    fn explicit(&self, c: &[f64], s: f64, out: &mut [f64]) {
        let n = c.len();
        for i in 0..n {
            let mut ac = self.diag[i] * c[i];
            if i > 0 {
                ac += self.lower[i] * c[i - 1];
            }
            if i + 1 < n {
                ac += self.upper[i] * c[i + 1];
            }
            out[i] = c[i] + s * ac;
        }
    }

    /// Factorisation of `I - s A`.
    fn implicit(&self, s: f64) -> Tridiagonal {
        let lower: Vec<f64> = self.lower.iter().map(|x| -s * x).collect();
        let diag: Vec<f64> = self.diag.iter().map(|x| 1.0 - s * x).collect();
        let upper: Vec<f64> = self.upper.iter().map(|x| -s * x).collect();
        Tridiagonal::factor(&lower, &diag, &upper)
    }
}

/// Cell-averaged square pulse of mass `a` on `[0, εL]`.
fn initial_profile(p: &ModelParams<f64>, nx: usize, epsilon: f64) -> Vec<f64> {
    let h = p.length / (nx + 1) as f64;
    let width = epsilon * p.length;
    let density = p.pulse_amount / width;
    (0..=nx)
        .map(|i| {
            let x = i as f64 * h;
            let (lo, hi) = ((x - 0.5 * h).max(0.0), x + 0.5 * h);
            let overlap = (hi.min(width) - lo).max(0.0);
            density * overlap / (hi - lo)
        })
        .collect()
}

struct Run {
    exit_flow: Vec<(f64, f64)>,
    holdup: Vec<(f64, f64)>,
    last: Vec<f64>,
}

fn march(p: &ModelParams<f64>, grid: &FdGrid, steps: usize, sample_every: usize) -> Run {
    let nx = grid.nx;
    let h = p.length / (nx + 1) as f64;
    let dt = grid.t_end / steps as f64;
    let op = Operator::new(p, nx);
    let outlet = |c: &[f64]| p.diffusivity * (4.0 * c[nx] - c[nx - 1]) / (2.0 * h);
    let mass = |c: &[f64]| h * (0.5 * c[0] + c[1..].iter().sum::<f64>());

    let mut c = initial_profile(p, nx, grid.epsilon);
    let mut rhs = vec![0.0; c.len()];
    let mut exit_flow = vec![(0.0, outlet(&c))];
    let mut holdup = vec![(0.0, mass(&c))];

    let half_ie = op.implicit(0.5 * dt);
    let main = match grid.scheme {
        Scheme::CrankNicolson => op.implicit(0.5 * dt),
        Scheme::ImplicitEuler => op.implicit(dt),
    };
    for step in 1..=steps {
        match grid.scheme {
            Scheme::CrankNicolson if step == 1 => {
                half_ie.solve(&mut c);
                half_ie.solve(&mut c);
            }
            Scheme::CrankNicolson => {
                op.explicit(&c, 0.5 * dt, &mut rhs);
                main.solve(&mut rhs);
                std::mem::swap(&mut c, &mut rhs);
            }
            Scheme::ImplicitEuler => main.solve(&mut c),
        }
        if step % sample_every == 0 || step == steps {
            let t = step as f64 * dt;
            exit_flow.push((t, outlet(&c)));
            holdup.push((t, mass(&c)));
        }
    }
    Run {
        exit_flow,
        holdup,
        last: c,
    }
}

/// Full solution with outlet flux, holdup and final profile.
pub fn fd_run(params: &ModelParams<f64>, grid: &FdGrid) -> Result<FdSolution> {
    grid.validate()?;
    let steps = ((grid.t_end / grid.dt).round() as usize).max(1);
    let base = march(params, grid, steps, grid.sample_every);

    let step_error = if grid.step_check {
        let fine = march(params, grid, 2 * steps, 2 * grid.sample_every);
        let err = base
            .exit_flow
            .iter()
            .zip(&fine.exit_flow)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        if !(err <= STEP_CHECK_LIMIT) {
            return Err(RadError::UnstableConfig(err));
        }
        Some(err)
    } else {
        None
    };

    let meta = CurveMeta {
        pe: params.peclet().value(),
        kappa_d: params.kappa_d(),
        t_d: params.diffusion_time(),
        x0: 0.5 * grid.epsilon * params.length,
        a: params.pulse_amount,
        terms: None,
    };
    let h = params.length / (grid.nx + 1) as f64;
    let mut profile: Vec<(f64, f64)> = base.last.iter().enumerate().map(|(i, &c)| (i as f64 * h, c)).collect();
    profile.push((params.length, 0.0));
    Ok(FdSolution {
        exit_flow: Curve::new(CurveKind::ExitFlow, base.exit_flow, Some(meta))?,
        holdup: Curve::new(CurveKind::Holdup, base.holdup, Some(meta))?,
        profile,
        step_error,
    })
}

/// Outlet flux `j(L, t)` for the square-pulse initial condition.
pub fn fd_solve(params: &ModelParams<f64>, grid: &FdGrid) -> Result<Curve> {
    Ok(fd_run(params, grid)?.exit_flow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3 5 3] -> x = [1 1 1]
        let t = Tridiagonal::factor(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0]);
        let mut rhs = vec![3.0, 5.0, 3.0];
        t.solve(&mut rhs);
        for x in rhs {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_mass_is_exact() {
        let p = ModelParams::from_dimensionless(2.0, 0.0, 1.0, 3.0, 2.0, 0.0).unwrap();
        for (nx, eps) in [(99, 0.1), (1000, 0.013), (50, 0.5)] {
            let c = initial_profile(&p, nx, eps);
            let h = p.length / (nx + 1) as f64;
            let m = h * (0.5 * c[0] + c[1..].iter().sum::<f64>());
            assert!((m - 3.0).abs() < 1e-12, "{nx} {eps}: {m}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(FdGrid::new(49, 1e-3, 1.0, 0.1, Scheme::CrankNicolson).is_err());
        assert!(FdGrid::new(100, 1e-3, 1.0, 0.01, Scheme::CrankNicolson).is_err());
        assert!(FdGrid::new(100, 1e-3, 1.0, 0.6, Scheme::CrankNicolson).is_err());
        assert!(FdGrid::new(100, 0.0, 1.0, 0.1, Scheme::CrankNicolson).is_err());
        assert!(FdGrid::new(100, 1e-3, 1.0, 0.02, Scheme::CrankNicolson).is_ok());
    }

    #[test]
    fn huge_step_is_rejected() {
        let p = ModelParams::from_dimensionless(0.0, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let grid = FdGrid::new(200, 0.2, 2.0, 0.1, Scheme::CrankNicolson).unwrap();
        assert!(matches!(fd_run(&p, &grid), Err(RadError::UnstableConfig(_))));
    }
}
