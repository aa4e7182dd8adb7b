//! Eigenvalues of the Robin–Dirichlet Sturm–Liouville problem
//!
//! After the exponential substitution that removes advection and reaction,
//! the spatial modes solve `Φ'' = -μ² Φ` on `[0, 1]` with `Φ(1) = 0` and
//! `Φ(0)/2 - Φ'(0)/Pe = 0`. With `Φ(ξ) = sin(μ(1 - ξ))` the eigenvalues are
//! the positive roots of
//!
//! ```text
//! g(μ) = μ cos μ + (Pe/2) sin μ
//! ```
//!
//! which is pole free and well defined at `Pe = 0`. For `Pe > -2` the
//! function `μ cot μ` is strictly decreasing on every `((n-1)π, nπ)`, so each
//! such interval holds exactly one root and plain bisection finds it.

use crate::error::{RadError, Result};
use crate::scalar::Scalar;

/// Offset keeping bracket endpoints away from the zeros of `sin`.
pub const BRACKET_OFFSET: f64 = 1e-12;

/// Default absolute tolerance for eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Looser preset giving eight correct decimals.
pub const EIGHT_DECIMALS_TOL: f64 = 1e-8;

pub const PECLET_MIN_EXCLUSIVE: f64 = -2.0;
pub const PECLET_MAX: f64 = 10.0;

/// Péclet number `vL/D`, restricted to `(-2, 10]`.
///
/// At or below `-2` the first mode turns hyperbolic and the real
/// eigenfunction expansion is no longer complete.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PecletNumber<T>(T);

impl<T: Scalar> PecletNumber<T> {
    pub fn new(value: T) -> Result<Self> {
        let v = value.as_f64();
        if !(v > PECLET_MIN_EXCLUSIVE && v <= PECLET_MAX) {
            return Err(RadError::InvalidPeclet(v));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// `g(μ) = μ cos μ + (Pe/2) sin μ`.
#[inline]
pub fn characteristic<T: Scalar>(mu: T, pe: T) -> T {
    mu * mu.cos() + pe * T::lit(0.5) * mu.sin()
}

/// Interval holding the `n`-th eigenvalue (1-based).
pub fn bracket_interval<T: Scalar>(n: usize) -> (T, T) {
    assert!(n >= 1, "eigenvalue index is 1-based");
    let pi = T::PI();
    let delta = T::lit(BRACKET_OFFSET);
    let nn = T::from_usize_lossy(n);
    if n == 1 {
        (delta, pi - delta)
    } else {
        ((nn - T::one()) * pi + delta, nn * pi - delta)
    }
}

/// Number of halvings that shrink a bracket of width `width` below `tol`.
pub fn required_bisections(width: f64, tol: f64) -> u32 {
    (width / tol).log2().ceil().max(0.0) as u32
}

/// Eigenvalue `μ_n` for the given Péclet number, to absolute tolerance `tol`.
///
/// `Pe = 0` is the Neumann case and returns `(n - 1/2)π` without iterating.
pub fn solve_eigenvalue<T: Scalar>(n: usize, pe: PecletNumber<T>, tol: T) -> Result<T> {
    if n == 0 {
        return Err(RadError::IndexOutOfRange { index: 0, count: 0 });
    }
    let (lo, hi) = bracket_interval::<T>(n);
    let width = hi - lo;
    let min_tol = T::lit(4.0) * T::epsilon() * width;
    if !(tol > T::zero()) || tol < min_tol {
        return Err(RadError::ToleranceTooSmall {
            tol: tol.as_f64(),
            min: min_tol.as_f64(),
        });
    }
    let pe = pe.value();
    if pe == T::zero() {
        return Ok((T::from_usize_lossy(n) - T::lit(0.5)) * T::PI());
    }
    Ok(bisect(lo, hi, tol, |mu| characteristic(mu, pe)))
}

/// Bisection on a sign-changing bracket. Stops once the bracket is narrower
/// than `2 tol` or cannot be split further in the working precision.
pub(crate) fn bisect<T: Scalar>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> T {
    let two = T::lit(2.0);
    let mut f_lo = f(lo);
    let steps = required_bisections(hi.as_f64() - lo.as_f64(), tol.as_f64());
    for _ in 0..=steps {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= two * tol {
            break;
        }
    }
    (lo + hi) / two
}

/// First `count` eigenvalues with their normalisation weights
/// `w_n = 1/2 + (Pe/4)(sin μ_n / μ_n)²`, so that `Φ_n = sin(μ_n(1-ξ))/√w_n`
/// is orthonormal on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis<T> {
    pe: PecletNumber<T>,
    mu: Vec<T>,
    sin_mu: Vec<T>,
    norm_weight: Vec<T>,
}

impl<T: Scalar> EigenBasis<T> {
    /// Solves for `n_terms` eigenvalues at absolute tolerance `tol`.
    pub fn build(pe: PecletNumber<T>, n_terms: usize, tol: T) -> Result<Self> {
        if n_terms == 0 {
            return Err(RadError::param("n_terms", "at least one eigenvalue is required"));
        }
        let mu = (1..=n_terms)
            .map(|n| solve_eigenvalue(n, pe, tol))
            .collect::<Result<Vec<_>>>()?;
        let p = pe.value();
        let sin_mu: Vec<T> = mu.iter().map(|m| m.sin()).collect();
        let norm_weight = mu
            .iter()
            .zip(&sin_mu)
            .map(|(&m, &s)| T::lit(0.5) + p / T::lit(4.0) * (s / m) * (s / m))
            .collect();
        Ok(Self {
            pe,
            mu,
            sin_mu,
            norm_weight,
        })
    }

    /// Basis with the default tolerance.
    pub fn with_terms(pe: PecletNumber<T>, n_terms: usize) -> Result<Self> {
        Self::build(
            pe,
            n_terms,
            T::lit(DEFAULT_TOL).max(T::lit(8.0) * T::epsilon() * T::PI()),
        )
    }

    pub fn pe(&self) -> PecletNumber<T> {
        self.pe
    }

    pub fn count(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn norm_weight(&self) -> &[T] {
        &self.norm_weight
    }

    pub(crate) fn sin_mu(&self) -> &[T] {
        &self.sin_mu
    }

    /// `μ_n` for 1-based `n`.
    pub fn eigenvalue(&self, n: usize) -> Result<T> {
        self.check_index(n)?;
        Ok(self.mu[n - 1])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.count() {
            return Err(RadError::IndexOutOfRange {
                index: n,
                count: self.count(),
            });
        }
        Ok(())
    }
}

/// Convenience wrapper around [`EigenBasis::build`].
pub fn build_basis<T: Scalar>(pe: PecletNumber<T>, n_terms: usize, tol: T) -> Result<EigenBasis<T>> {
    EigenBasis::build(pe, n_terms, tol)
}

/// Orthonormal eigenfunction `Φ_n(ξ) = sin(μ_n(1 - ξ))/√w_n`.
pub fn eigenfunction_value<T: Scalar>(basis: &EigenBasis<T>, n: usize, xi: T) -> Result<T> {
    basis.check_index(n)?;
    if !(xi >= T::zero() && xi <= T::one()) {
        return Err(RadError::param("xi", format!("{xi} outside [0, 1]")));
    }
    let mu = basis.mu[n - 1];
    Ok((mu * (T::one() - xi)).sin() / basis.norm_weight[n - 1].sqrt())
}
