use crate::eigen::PecletNumber;
use crate::error::{RadError, Result};
use crate::scalar::Scalar;

/// Upper bound on the number of series terms any evaluation may use.
pub const MAX_SERIES_TERMS: usize = 5000;

/// Dimensional description of a pulse-response experiment.
///
/// Units only have to be consistent: lengths in one unit, times in another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Diffusivity `D` (length²/time).
    pub diffusivity: T,
    /// Advection velocity `v` (length/time), may be negative.
    pub velocity: T,
    /// First-order rate constant `k` (1/time).
    pub rate_k: T,
    /// Reactor length `L`.
    pub length: T,
    /// Injected amount `a`.
    pub pulse_amount: T,
    /// Injection point `x0`, in `[0, L)`.
    pub injection_x0: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(diffusivity: T, velocity: T, rate_k: T, length: T, pulse_amount: T, injection_x0: T) -> Result<Self> {
        let p = Self {
            diffusivity,
            velocity,
            rate_k,
            length,
            pulse_amount,
            injection_x0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the dimensionless groups, with `D = L²/t_d`,
    /// `v = Pe·D/L` and `k = κ_d/t_d`.
    pub fn from_dimensionless(pe: T, kappa_d: T, t_d: T, pulse_amount: T, length: T, injection_x0: T) -> Result<Self> {
        if !(t_d > T::zero()) || !t_d.is_finite() {
            return Err(RadError::param("t_d", "must be positive and finite"));
        }
        let diffusivity = length * length / t_d;
        let velocity = pe * diffusivity / length;
        Self::new(diffusivity, velocity, kappa_d / t_d, length, pulse_amount, injection_x0)
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.diffusivity,
            self.velocity,
            self.rate_k,
            self.length,
            self.pulse_amount,
            self.injection_x0,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(RadError::param("params", "all parameters must be finite"));
        }
        if !(self.diffusivity > T::zero()) {
            return Err(RadError::param("D", "diffusivity must be positive"));
        }
        if !(self.length > T::zero()) {
            return Err(RadError::param("L", "length must be positive"));
        }
        if self.rate_k < T::zero() {
            return Err(RadError::param("k", "rate constant must be non-negative"));
        }
        if !(self.pulse_amount > T::zero()) {
            return Err(RadError::param("a", "pulse amount must be positive"));
        }
        if self.injection_x0 < T::zero() || self.injection_x0 >= self.length {
            return Err(RadError::param("x0", "injection point must lie in [0, L)"));
        }
        PecletNumber::new(self.velocity * self.length / self.diffusivity)?;
        Ok(())
    }

    pub fn peclet(&self) -> PecletNumber<T> {
        PecletNumber::new(self.velocity * self.length / self.diffusivity).expect("validated at construction")
    }

    /// `t_d = L²/D`.
    pub fn diffusion_time(&self) -> T {
        self.length * self.length / self.diffusivity
    }

    /// `κ_d = k t_d`.
    pub fn kappa_d(&self) -> T {
        self.rate_k * self.diffusion_time()
    }

    pub fn with_rate(&self, rate_k: T) -> Result<Self> {
        Self::new(
            self.diffusivity,
            self.velocity,
            rate_k,
            self.length,
            self.pulse_amount,
            self.injection_x0,
        )
    }

    pub fn with_injection(&self, injection_x0: T) -> Result<Self> {
        Self::new(
            self.diffusivity,
            self.velocity,
            self.rate_k,
            self.length,
            self.pulse_amount,
            injection_x0,
        )
    }

    pub fn with_amount(&self, pulse_amount: T) -> Result<Self> {
        Self::new(
            self.diffusivity,
            self.velocity,
            self.rate_k,
            self.length,
            pulse_amount,
            self.injection_x0,
        )
    }
}

/// Controls how the infinite eigenfunction sums are cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation<T> {
    pub max_terms: usize,
    /// Stop once the analytic bound on the next term drops below this.
    pub tail_tol: T,
    /// Smallest admissible dimensionless time `t/t_d`.
    pub min_time: T,
}

impl<T: Scalar> Default for Truncation<T> {
    fn default() -> Self {
        Self {
            max_terms: MAX_SERIES_TERMS,
            tail_tol: T::lit(1e-12),
            min_time: T::lit(1e-4),
        }
    }
}

impl<T: Scalar> Truncation<T> {
    pub fn new(max_terms: usize, tail_tol: T, min_time: T) -> Result<Self> {
        if max_terms == 0 || max_terms > MAX_SERIES_TERMS {
            return Err(RadError::param(
                "max_terms",
                format!("must lie in 1..={MAX_SERIES_TERMS}"),
            ));
        }
        if !(tail_tol > T::zero()) {
            return Err(RadError::param("tail_tol", "must be positive"));
        }
        if !(min_time > T::zero()) {
            return Err(RadError::param("min_time", "must be positive"));
        }
        Ok(Self {
            max_terms,
            tail_tol,
            min_time,
        })
    }

    /// Exactly the first `n` terms, no tail cut-off.
    pub fn fixed_terms(n: usize) -> Result<Self> {
        Self::new(n, T::min_positive_value(), T::lit(1e-4))
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        Self::new(max_terms, self.tail_tol, self.min_time)
    }
}
