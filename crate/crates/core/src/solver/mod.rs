//! Spectral linearization and Newton continuation for surfaces of constant
//! nonlocal mean curvature: the bifurcation radius of straight cylinders,
//! the unduloid branch, and corrections of periodic sphere arrays.

mod cylinder;
mod laplacian;
mod lattice;
mod newton;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::geometry::SphereFunction;

pub use cylinder::{
    bifurcation_radius, branch_residual, half_period_defect, linearized_cylinder_operator, resume_continuation, unduloid_continuation,
    SOLVER_TOL,
};
pub use laplacian::spherical_frac_laplacian;
pub use lattice::{lattice_correction, LatticeCorrection};

/// Function space of a [`ModeVector`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeBasis {
    /// `sum_k c[k] cos(k t)` on a period cell.
    Cosine,
    /// `sum_j c[j] Y_(2j)` where `Y_l` depends only on the angle `t` from
    /// `axis`: `cos(l t)` on S^1, `P_l(cos t)` on S^2.
    EvenZonal { axis: Vec<f64> },
}

/// Coefficients of a truncated expansion; the symmetry of the problem is
/// built into the basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeVector {
    pub basis: ModeBasis,
    coefficients: Vec<f64>,
}

impl ModeVector {
    pub fn cosine(coefficients: Vec<f64>) -> Result<Self> {
        Self::checked(ModeBasis::Cosine, coefficients)
    }

    pub fn even_zonal(axis: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&axis.len()) {
            return Err(FracError::Unsupported(format!("even harmonics on S^{}", axis.len().saturating_sub(1))));
        }
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(FracError::InvalidParameter("axis must be a nonzero vector".into()));
        }
        let axis = axis.iter().map(|x| x / norm).collect();
        Self::checked(ModeBasis::EvenZonal { axis }, coefficients)
    }

    fn checked(basis: ModeBasis, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(FracError::InvalidParameter("mode vector needs at least one coefficient".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(FracError::InvalidParameter("non-finite mode coefficient".into()));
        }
        Ok(Self { basis, coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Truncation order `K`: the highest frequency or degree represented.
    pub fn order(&self) -> usize {
        match self.basis {
            ModeBasis::Cosine => self.coefficients.len() - 1,
            ModeBasis::EvenZonal { .. } => 2 * (self.coefficients.len() - 1),
        }
    }

    /// Value at angle `t` (period variable, or angle from the axis).
    pub fn eval(&self, t: f64) -> f64 {
        match &self.basis {
            ModeBasis::Cosine => self.coefficients.iter().enumerate().map(|(k, c)| c * (k as f64 * t).cos()).sum(),
            ModeBasis::EvenZonal { axis } => {
                if axis.len() == 2 {
                    self.coefficients.iter().enumerate().map(|(j, c)| c * (2.0 * j as f64 * t).cos()).sum()
                } else {
                    self.to_sphere_function().map_or(f64::NAN, |f| f.zonal_profile(t.cos()).0)
                }
            }
        }
    }

    /// The average over the period cell or the sphere.
    pub fn mean(&self) -> f64 {
        self.coefficients[0]
    }

    /// The even-zonal function as a [`SphereFunction`] in global coordinates.
    pub fn to_sphere_function(&self) -> Result<SphereFunction> {
        let ModeBasis::EvenZonal { axis } = &self.basis else {
            return Err(FracError::InvalidParameter("a cosine mode vector is not a function on the sphere".into()));
        };
        let deg = self.order();
        if axis.len() == 2 {
            let t0 = axis[1].atan2(axis[0]);
            let mut cos = vec![0.0; deg + 1];
            let mut sin = vec![0.0; deg];
            for (j, c) in self.coefficients.iter().enumerate() {
                let l = 2 * j;
                let (s, co) = (l as f64 * t0).sin_cos();
                cos[l] = c * co;
                if l > 0 {
                    sin[l - 1] = c * s;
                }
            }
            Ok(SphereFunction::Fourier { cos, sin })
        } else {
            let mut coeffs = vec![0.0; deg + 1];
            for (j, c) in self.coefficients.iter().enumerate() {
                coeffs[2 * j] = *c;
            }
            SphereFunction::zonal([axis[0], axis[1], axis[2]], coeffs)
        }
    }
}

/// One solution on the unduloid branch, `u(s) = R + (a / lambda) w(lambda s)`
/// with `w = cos + v` and `v` orthogonal to `cos`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub amplitude: f64,
    pub lambda: f64,
    /// `w` in the cosine basis; the `cos(t)` coefficient is 1.
    pub profile: ModeVector,
    pub residual: f64,
    /// The constant value of the nonlocal mean curvature.
    pub nmc: f64,
    pub radius: f64,
}

impl BranchPoint {
    pub fn height(&self, s: f64) -> f64 {
        self.radius + self.amplitude / self.lambda * self.profile.eval(self.lambda * s)
    }

    /// Coefficients of `v`, the profile with its `cos(t)` mode removed.
    pub fn v_coefficients(&self) -> Vec<f64> {
        let mut v = self.profile.coefficients().to_vec();
        if v.len() > 1 {
            v[1] = 0.0;
        }
        v
    }

    /// `(int_(-pi)^pi v^2)^(1/2)`.
    pub fn v_norm(&self) -> f64 {
        let v = self.v_coefficients();
        let pi = std::f64::consts::PI;
        let mut s = 2.0 * pi * v[0] * v[0];
        s += v.iter().skip(1).map(|c| pi * c * c).sum::<f64>();
        s.sqrt()
    }

    /// `int_(-pi)^pi v(t) cos(t) dt` by the trapezoid rule, exact for the
    /// truncated series.
    pub fn orthogonality_defect(&self) -> f64 {
        let v = self.v_coefficients();
        let m = 4 * v.len() + 4;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        (0..m)
            .map(|i| {
                let t = -std::f64::consts::PI + i as f64 * h;
                let vt: f64 = v.iter().enumerate().map(|(k, c)| c * (k as f64 * t).cos()).sum();
                vt * t.cos() * h
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_vectors_validate_and_evaluate() {
        assert!(ModeVector::cosine(vec![]).is_err());
        assert!(ModeVector::cosine(vec![f64::NAN]).is_err());
        let m = ModeVector::cosine(vec![0.5, 1.0, 0.25]).unwrap();
        assert_eq!(m.order(), 2);
        assert!((m.eval(0.3) - (0.5 + 0.3f64.cos() + 0.25 * 0.6f64.cos())).abs() < 1e-15);
        let z = ModeVector::even_zonal(vec![0.0, 2.0], vec![0.1, 0.2]).unwrap();
        assert_eq!(z.order(), 2);
        let f = z.to_sphere_function().unwrap();
        // angle t from the axis e2
        let t = 0.4f64;
        let w = [-t.sin(), t.cos()];
        assert!((f.value(&w) - z.eval(t)).abs() < 1e-14);
        let z3 = ModeVector::even_zonal(vec![1.0, 0.0, 0.0], vec![0.1, 0.2]).unwrap();
        let f3 = z3.to_sphere_function().unwrap();
        assert!((f3.value(&[t.cos(), t.sin(), 0.0]) - z3.eval(t)).abs() < 1e-14);
        assert!((z3.eval(0.0) - 0.3).abs() < 1e-15);
    }
}
