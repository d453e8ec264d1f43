use std::f64::consts::PI;

use crate::error::{FracError, Result};
use crate::geometry::{dot, SphereFunction};
use crate::nmc::orthonormal_complement;
use crate::quadrature::{integrate_power_left, integrate_with_err, EvalResult, FracOrder, QuadSpec};

/// `PV int_S (psi(theta) - psi(sigma)) |theta - sigma|^(-N - alpha) dV(sigma)`.
///
/// The integrand is symmetrized about `theta` so the principal value becomes
/// an absolutely convergent integral with an `r^-alpha` endpoint.
pub fn spherical_frac_laplacian(psi: &SphereFunction, theta: &[f64], fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    let n = fo.dim();
    if psi.dim() != n || theta.len() != n {
        return Err(FracError::InvalidParameter(format!(
            "function on S^{} evaluated at a point of length {} for dim {n}",
            psi.dim() - 1,
            theta.len()
        )));
    }
    if !psi.is_finite() {
        return Err(FracError::IntegrabilityFailure("non-finite coefficients".into()));
    }
    if (dot(theta, theta).sqrt() - 1.0).abs() > 1e-10 {
        return Err(FracError::InvalidParameter("theta must be a unit vector".into()));
    }
    let a = fo.alpha();
    let tol = q.tolerance();
    let r = match psi {
        SphereFunction::Fourier { cos, sin } => {
            let t0 = theta[1].atan2(theta[0]);
            // psi at theta per mode
            let modes: Vec<f64> = (1..cos.len().max(sin.len() + 1))
                .map(|k| {
                    let (s, c) = (k as f64 * t0).sin_cos();
                    cos.get(k).unwrap_or(&0.0) * c + sin.get(k - 1).unwrap_or(&0.0) * s
                })
                .collect();
            integrate_power_left(
                |s| {
                    let folded: f64 = modes
                        .iter()
                        .enumerate()
                        .map(|(j, m)| 4.0 * (0.5 * (j + 1) as f64 * s).sin().powi(2) * m)
                        .sum();
                    Ok((folded * (2.0 * (0.5 * s).sin()).powf(-2.0 - a), 0.0))
                },
                0.0,
                PI,
                a,
                tol,
            )?
        }
        SphereFunction::Zonal { axis, .. } => {
            let basis = orthonormal_complement(theta);
            let z0 = dot(axis, theta);
            let (a1, a2) = (dot(axis, &basis[0]), dot(axis, &basis[1]));
            let d0 = psi.zonal_profile(z0).1;
            let inner_tol = tol.scaled(0.1);
            let ring = |phi: f64| -> Result<(f64, f64)> {
                let sp = phi.sin();
                let half = 2.0 * (0.5 * phi).sin().powi(2);
                let r = integrate_with_err(
                    |chi| {
                        let (sc, cc) = chi.sin_cos();
                        let dz = -half * z0 + sp * (cc * a1 + sc * a2);
                        // the part linear in sigma - theta averages out over the ring
                        Ok((-(psi.zonal_remainder(z0, dz) - d0 * z0 * half), 0.0))
                    },
                    &[0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI],
                    inner_tol,
                )?;
                Ok((r.value * sp * (2.0 * (0.5 * phi).sin()).powf(-3.0 - a), 0.0))
            };
            integrate_power_left(ring, 0.0, PI, a, tol)?
        }
    };
    if !r.value.is_finite() {
        return Err(FracError::NonConvergent("spherical fractional Laplacian".into()));
    }
    Ok(r)
}
