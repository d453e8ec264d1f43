use std::f64::consts::PI;

use super::orthonormal_complement;
use crate::error::{FracError, Result};
use crate::geometry::{dot, SphereFunction, SphereGraph};
use crate::quadrature::{integrate_power_left, integrate_with_err, EvalResult, FracOrder, QuadSpec};

/// Nonlocal mean curvature of `{r w : r < psi(w)}` at the boundary point
/// `psi(theta) theta`, from three absolutely convergent integrals over the
/// sphere.
pub fn nmc_sphere_graph(sgr: &SphereGraph, theta: &[f64], fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    let n = fo.dim();
    if sgr.dim() != n || theta.len() != n {
        return Err(FracError::InvalidParameter(format!(
            "radial graph on S^{} evaluated at a point of length {} for dim {n}",
            sgr.dim() - 1,
            theta.len()
        )));
    }
    if (dot(theta, theta).sqrt() - 1.0).abs() > 1e-10 {
        return Err(FracError::InvalidParameter("theta must be a unit vector".into()));
    }
    let a = fo.alpha();
    let tol = q.tolerance();
    let psi = sgr.psi();
    let h = match psi {
        SphereFunction::Fourier { .. } => {
            let t0 = theta[1].atan2(theta[0]);
            let (p0, _, _) = psi.angular(t0);
            let g = |t: f64, s: f64| {
                let (ps, d1, _) = psi.angular(t);
                let dpsi = -psi.angular_difference(t0, t);
                let chord = 2.0 * (0.5 * s).sin();
                let bracket = dpsi - (t0 - t).sin() * d1;
                terms(p0, ps, dpsi, bracket, chord, 2, a)
            };
            integrate_power_left(|s| Ok((g(t0 + s, s) + g(t0 - s, s), 0.0)), 0.0, PI, a, tol)?
        }
        SphereFunction::Zonal { axis, .. } => {
            let basis = orthonormal_complement(theta);
            let (e1, e2) = (&basis[0], &basis[1]);
            let z0 = dot(axis, theta);
            let (a1, a2) = (dot(axis, e1), dot(axis, e2));
            let (p0, _) = psi.zonal_profile(z0);
            let inner_tol = tol.scaled(0.1);
            let ring = |phi: f64| -> Result<(f64, f64)> {
                let (sp, _) = phi.sin_cos();
                let half = 2.0 * (0.5 * phi).sin().powi(2);
                let chord = 2.0 * (0.5 * phi).sin();
                let r = integrate_with_err(
                    |chi| {
                        let (sc, cc) = chi.sin_cos();
                        let dz = -half * z0 + sp * (cc * a1 + sc * a2);
                        let zs = z0 + dz;
                        let (ps, d1) = psi.zonal_profile(zs);
                        let dpsi = -psi.zonal_difference(z0, zs);
                        // psi(theta) - psi(sigma) - (theta - sigma) . grad psi(sigma)
                        let bracket = psi.zonal_remainder(zs, -dz) - d1 * zs * half;
                        Ok((terms(p0, ps, dpsi, bracket, chord, 3, a), 0.0))
                    },
                    &[0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI],
                    inner_tol,
                )?;
                Ok((r.value * sp, 0.0))
            };
            integrate_power_left(ring, 0.0, PI, a, tol)?
        }
    };
    Ok(h.scale(2.0 / a))
}

/// The three integrands at one pair `(theta, sigma)`.
fn terms(p0: f64, ps: f64, dpsi: f64, bracket: f64, chord: f64, n: usize, a: f64) -> f64 {
    if chord == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let k = ((dpsi / chord).powi(2) + ps * p0).powf(-0.5 * (nf + a));
    let kern = chord.powf(-nf - a);
    let w = ps.powi(n as i32 - 2);
    (-p0 * bracket + dpsi * dpsi) * kern * w * k + 0.5 * p0 * ps.powi(n as i32 - 1) * chord.powf(2.0 - nf - a) * k
}
