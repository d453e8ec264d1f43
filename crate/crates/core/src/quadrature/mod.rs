//! Singular quadrature: adaptive Gauss-Kronrod integration, principal values
//! by excision and Richardson extrapolation, power-law tail bounds and
//! lattice sums.

mod adaptive;
mod far_field;
mod gauss;
mod lattice_sum;
mod pv;
mod sphere;
mod tail;

pub use adaptive::{integrate, integrate_power_both, integrate_power_left, integrate_with_err, Tolerance};
pub use far_field::integrate_far_field;
pub use gauss::{gauss_legendre, GaussRule};
pub use lattice_sum::{lattice_sum, LatticeWeight};
pub use pv::{pv_integrate, pv_integrate_line, richardson_table};
pub use sphere::{ball_volume, fibonacci_sphere, sphere_area, uniform_circle};
pub use tail::{osc_power_tail, power_tail_bound, TailTerm};

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};

/// Ambient dimension and fractional order shared by every kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrder {
    dim: usize,
    alpha: f64,
}

impl FracOrder {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim < 2 {
            return Err(FracError::InvalidParameter(format!("dimension {dim} < 2")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FracError::InvalidParameter(format!(
                "alpha = {alpha} outside the open interval (0, 1)"
            )));
        }
        Ok(Self { dim, alpha })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// N + alpha, the exponent of the solid kernel.
    pub fn kernel_exponent(&self) -> f64 {
        self.dim as f64 + self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.dim, alpha)
    }

    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(dim, self.alpha)
    }
}

/// Tolerances and limits for every singular integral in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Strictly decreasing excision radii used for principal values.
    pub pv_excision: Vec<f64>,
    pub trunc_radius: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self::with_schedule(1e-6, 1e-9, 0.1, 6, 50.0)
    }
}

impl QuadSpec {
    /// Geometric schedule `eps0 * 2^-k`, `k = 0..levels`.
    pub fn with_schedule(rel_tol: f64, abs_tol: f64, eps0: f64, levels: usize, trunc_radius: f64) -> Self {
        let pv_excision = (0..levels).map(|k| eps0 * 0.5f64.powi(k as i32)).collect();
        Self {
            rel_tol,
            abs_tol,
            pv_excision,
            trunc_radius,
            max_subdivisions: 4000,
        }
    }

    /// A tighter spec used where results feed Newton solvers or
    /// finite differences.
    pub fn precise() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-12,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.rel_tol) || !finite_pos(self.abs_tol) {
            return Err(FracError::InvalidParameter("tolerances must be finite and positive".into()));
        }
        if !finite_pos(self.trunc_radius) {
            return Err(FracError::InvalidParameter("trunc_radius must be positive".into()));
        }
        if self.pv_excision.len() < 3 {
            return Err(FracError::InvalidParameter("excision schedule needs at least 3 radii".into()));
        }
        for w in self.pv_excision.windows(2) {
            if !(w[1] < w[0]) {
                return Err(FracError::InvalidParameter("excision radii must strictly decrease".into()));
            }
        }
        if !self.pv_excision.iter().all(|&e| e > 0.0 && e < self.trunc_radius) {
            return Err(FracError::InvalidParameter(
                "excision radii must be positive and below trunc_radius".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(FracError::InvalidParameter("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// A value with an estimated quadrature error and a bound on truncated mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub quad_err: f64,
    pub tail_err: f64,
}

impl EvalResult {
    pub fn new(value: f64, quad_err: f64, tail_err: f64) -> Self {
        debug_assert!(quad_err >= 0.0 && tail_err >= 0.0);
        Self {
            value,
            quad_err: quad_err.abs(),
            tail_err: tail_err.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    pub fn total_err(&self) -> f64 {
        self.quad_err + self.tail_err
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.quad_err * factor.abs(), self.tail_err * factor.abs())
    }

    pub fn add(self, other: EvalResult) -> Self {
        Self::new(
            self.value + other.value,
            self.quad_err + other.quad_err,
            self.tail_err + other.tail_err,
        )
    }

    pub fn sub(self, other: EvalResult) -> Self {
        self.add(other.scale(-1.0))
    }
}

impl std::iter::Sum for EvalResult {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(EvalResult::exact(0.0), EvalResult::add)
    }
}
