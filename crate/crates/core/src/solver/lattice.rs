use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::newton::newton;
use super::ModeVector;
use crate::error::{FracError, Result};
use crate::geometry::{dot, Lattice, SphereFunction, SphereGraph};
use crate::nmc::{nmc_sphere_graph, orthonormal_complement, sphere_nmc_exact};
use crate::quadrature::{gauss_legendre, FracOrder, QuadSpec};

/// Images closer than this many lattice steps are integrated in full.
const NEAR_IMAGES: i64 = 32;
const FAR_IMAGES: i64 = 4096;

/// The converged perturbation of the central sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCorrection {
    /// `phi_r`, the sphere being `{(1 + phi_r(w)) w}`.
    pub phi: ModeVector,
    /// The nonlocal mean curvature of the unit sphere, matched everywhere.
    pub h_target: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Nodes `(sigma, weight)` on the sphere adapted to functions zonal about `axis`.
fn sphere_nodes(axis: &[f64], resolution: usize) -> Vec<(Vec<f64>, f64)> {
    let m = 4 * resolution;
    if axis.len() == 2 {
        let t0 = axis[1].atan2(axis[0]);
        let h = 2.0 * PI / m as f64;
        return (0..m)
            .map(|i| {
                let t = t0 + i as f64 * h;
                (vec![t.cos(), t.sin()], h)
            })
            .collect();
    }
    let basis = orthonormal_complement(axis);
    let rule = gauss_legendre(resolution);
    let h = 2.0 * PI / m as f64;
    let mut out = Vec::with_capacity(rule.nodes.len() * m);
    for (z, wz) in rule.nodes.iter().zip(&rule.weights) {
        let s = (1.0 - z * z).sqrt();
        for i in 0..m {
            let (sc, cc) = (i as f64 * h).sin_cos();
            let v = (0..3).map(|c| z * axis[c] + s * (cc * basis[0][c] + sc * basis[1][c])).collect();
            out.push((v, wz * h));
        }
    }
    out
}

/// A star-shaped body about the origin, discretized for smooth integrands
/// `int_E f(y) dy` with `f` varying on scales much larger than `E`.
struct Body {
    /// `(sigma, psi(sigma), weight)`.
    nodes: Vec<(Vec<f64>, f64, f64)>,
    volume: f64,
}

impl Body {
    fn new(psi: &SphereFunction, axis: &[f64], resolution: usize) -> Self {
        let n = axis.len() as i32;
        let nodes: Vec<(Vec<f64>, f64, f64)> = sphere_nodes(axis, resolution)
            .into_iter()
            .map(|(s, w)| {
                let r = psi.value(&s);
                (s, r, w)
            })
            .collect();
        let volume = nodes.iter().map(|(_, r, w)| r.powi(n) * w).sum::<f64>() / n as f64;
        Self { nodes, volume }
    }

    /// `int_(c + E) |x - y|^-beta dy`.
    fn potential(&self, x: &[f64], c: &[f64], beta: f64) -> f64 {
        let rule = gauss_legendre(16);
        let n = x.len() as i32;
        let rel: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
        self.nodes
            .iter()
            .map(|(s, r, w)| {
                let radial: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(u, wu)| {
                        let rho = 0.5 * r * (1.0 + u);
                        let d2: f64 = rel.iter().zip(s).map(|(a, b)| (a - rho * b).powi(2)).sum();
                        wu * rho.powi(n - 1) * d2.powf(-0.5 * beta)
                    })
                    .sum();
                0.5 * r * radial * w
            })
            .sum()
    }
}

/// `sum_(k != 0) int_(E + k d e) |x - y|^-beta dy`.
fn image_sum(body: &Body, x: &[f64], e: &[f64], d: f64, beta: f64) -> f64 {
    let center = |k: i64| -> Vec<f64> { e.iter().map(|v| v * d * k as f64).collect() };
    let mut acc = 0.0;
    for k in 1..=NEAR_IMAGES {
        acc += body.potential(x, &center(k), beta) + body.potential(x, &center(-k), beta);
    }
    let mut far = 0.0;
    for k in (NEAR_IMAGES + 1..=FAR_IMAGES).rev() {
        for c in [center(k), center(-k)] {
            let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            far += r2.powf(-0.5 * beta);
        }
    }
    // midpoint comparison for the remaining monopoles
    let tail = 2.0 * d.powf(-beta) * (FAR_IMAGES as f64 + 0.5).powf(1.0 - beta) / (beta - 1.0);
    acc + body.volume * (far + tail)
}

/// Newton solve for the even, axially symmetric `phi_r` making every sphere
/// of `S_phi + r L` carry the nonlocal mean curvature of the unit sphere.
/// `k` is the highest (even) harmonic degree.
pub fn lattice_correction(lattice: &Lattice, r: f64, fo: &FracOrder, q: &QuadSpec, k: usize) -> Result<LatticeCorrection> {
    let n = fo.dim();
    if lattice.dim() != n || !(2..=3).contains(&n) {
        return Err(FracError::InvalidParameter(format!(
            "lattice in R^{} with order of dim {n}",
            lattice.dim()
        )));
    }
    if lattice.rank() != 1 {
        return Err(FracError::Unsupported(format!("lattices of rank {}", lattice.rank())));
    }
    if k < 4 || k % 2 == 1 {
        return Err(FracError::InvalidParameter(format!("need an even degree K >= 4, got {k}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(FracError::InvalidParameter(format!("scale r = {r} must be positive")));
    }
    let scaled = lattice.with_spacing(lattice.spacing() * r)?;
    scaled.check_disjoint(1.0)?;
    let b0 = &lattice.basis()[0];
    let len = dot(b0, b0).sqrt();
    let axis: Vec<f64> = b0.iter().map(|x| x / len).collect();
    let d = scaled.spacing() * len;
    let perp = orthonormal_complement(&axis).remove(0);
    let j_max = k / 2;
    let thetas: Vec<Vec<f64>> = (0..=j_max)
        .map(|i| {
            let t = 0.5 * PI * i as f64 / j_max as f64;
            axis.iter().zip(&perp).map(|(a, p)| t.cos() * a + t.sin() * p).collect()
        })
        .collect();
    let a = fo.alpha();
    let beta = n as f64 + a;
    let h_target = sphere_nmc_exact(fo, 1.0);
    let resolution = (128.0 / (d - 2.0).max(0.5)).ceil().clamp(16.0, 256.0) as usize;
    let residual = |c: &[f64]| -> Result<Vec<f64>> {
        let phi = ModeVector::even_zonal(axis.clone(), c.to_vec())?;
        let psi = phi.to_sphere_function()?.affine(1.0, 1.0);
        let top = psi.sup_bound();
        if psi.sampled_min() <= 0.0 || 2.0 * top >= d {
            return Err(FracError::Overlap(d));
        }
        let graph = SphereGraph::new(psi.clone())?;
        let body = Body::new(&psi, &axis, resolution);
        thetas
            .iter()
            .map(|th| {
                let own = nmc_sphere_graph(&graph, th, fo, q)?.value;
                let rad = psi.value(th);
                let x: Vec<f64> = th.iter().map(|v| rad * v).collect();
                Ok(own - 2.0 * image_sum(&body, &x, &axis, d, beta) - h_target)
            })
            .collect()
    };
    let tol = 10.0 * q.abs_tol.max(q.rel_tol * h_target);
    let s = newton(residual, vec![0.0; j_max + 1], tol)?;
    Ok(LatticeCorrection {
        phi: ModeVector::even_zonal(axis, s.x)?,
        h_target,
        residual: s.residual,
        iterations: s.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sphere_lattice_surface;
    use crate::nmc::nmc_solid;
    use crate::quadrature::{integrate, Tolerance};

    #[test]
    fn image_potential_matches_adaptive_quadrature() {
        let psi = SphereFunction::fourier(vec![1.0, 0.0, 0.1], vec![]);
        let body = Body::new(&psi, &[1.0, 0.0], 16);
        let beta = 2.5;
        let (x, c) = ([0.9, 0.3], [6.0, 0.0]);
        let tol = Tolerance::new(1e-12, 1e-15);
        let oracle = integrate(
            |t| {
                let r = psi.angular(t).0;
                integrate(
                    |rho| {
                        let y = [c[0] + rho * t.cos(), c[1] + rho * t.sin()];
                        rho * ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).powf(-0.5 * beta)
                    },
                    0.0,
                    r,
                    tol,
                )
                .unwrap()
                .value
            },
            0.0,
            2.0 * PI,
            tol,
        )
        .unwrap()
        .value;
        let v = body.potential(&x, &c, beta);
        assert!((v - oracle).abs() < 1e-11 * oracle, "{v} vs {oracle}");
        assert!((body.volume - PI * (1.0 + 0.5 * 0.01)).abs() < 1e-13);
    }

    #[test]
    fn unperturbed_array_matches_solid_form() {
        // H of the periodic union of unit disks, by images and by rays
        let fo = FracOrder::new(2, 0.5).unwrap();
        let d = 4.0;
        let one = SphereFunction::constant(2, 1.0);
        let body = Body::new(&one, &[1.0, 0.0], 64);
        let th = [0.6, 0.8];
        let images = sphere_nmc_exact(&fo, 1.0) - 2.0 * image_sum(&body, &th, &[1.0, 0.0], d, 2.5);
        let set = sphere_lattice_surface(&Lattice::axis(2, d).unwrap(), &one, 4000.0).unwrap();
        let solid = nmc_solid(&set, &th, &fo, &QuadSpec::default()).unwrap();
        assert!((images - solid.value).abs() < 1e-5 * images.abs() + solid.total_err(), "{images} vs {}", solid.value);
    }

    #[test]
    fn rejects_bad_inputs() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let q = QuadSpec::default();
        let l = Lattice::axis(2, 1.0).unwrap();
        assert!(matches!(lattice_correction(&l, 1.5, &fo, &q, 4), Err(FracError::Overlap(_))));
        assert!(lattice_correction(&l, 8.0, &fo, &q, 3).is_err());
        let sq = Lattice::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], 1.0).unwrap();
        assert!(matches!(lattice_correction(&sq, 8.0, &fo, &q, 4), Err(FracError::Unsupported(_))));
    }

    #[test]
    fn sparse_array_shrinks_the_spheres() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let l = Lattice::new(vec![vec![0.0, 1.0]], 1.0).unwrap();
        let c = lattice_correction(&l, 8.0, &fo, &QuadSpec::precise(), 6).unwrap();
        let co = c.phi.coefficients();
        assert!(co[0] < 0.0, "{co:?}");
        assert!(co[1].abs() > 10.0 * co[2].abs().max(co[3].abs()), "{co:?}");
        assert!(c.residual < 1e-9);
    }
}
