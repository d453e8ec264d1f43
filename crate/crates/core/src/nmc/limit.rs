use rayon::prelude::*;

use super::boundary::nmc_boundary;
use crate::error::{FracError, Result};
use crate::geometry::Surface;
use crate::quadrature::{ball_volume, sphere_area, EvalResult, FracOrder, QuadSpec};

/// `|S^(N-2)|`, the measure normalizing `(1 - alpha) H_alpha` in R^N.
pub fn omega_prime(dim: usize) -> f64 {
    sphere_area(dim - 1)
}

/// `omega_(N-1)`, the volume of the unit ball of R^(N-1).
pub fn omega_lower(dim: usize) -> f64 {
    ball_volume(dim - 1)
}

/// `(1 - alpha) / |S^(N-2)| * H_alpha(surf; x)` for each alpha.
pub fn classical_limit_check(surf: &Surface, x: &[f64], alphas: &[f64], q: &QuadSpec) -> Result<Vec<f64>> {
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FracError::InvalidParameter("alpha list must be strictly increasing".into()));
    }
    let dim = x.len();
    let fos = alphas.iter().map(|&a| FracOrder::new(dim, a)).collect::<Result<Vec<_>>>()?;
    let w = omega_prime(dim);
    fos.par_iter()
        .map(|fo| Ok((1.0 - fo.alpha()) / w * nmc_boundary(surf, x, fo, q)?.value))
        .collect()
}

/// Polynomial extrapolation of `values` sampled at `alphas` to `alpha = 1`,
/// as a function of `1 - alpha` (Neville).
pub fn extrapolate_to_one(alphas: &[f64], values: &[f64]) -> Result<f64> {
    if alphas.is_empty() || alphas.len() != values.len() {
        return Err(FracError::InvalidParameter("need matching, nonempty alpha and value lists".into()));
    }
    let t: Vec<f64> = alphas.iter().map(|a| 1.0 - a).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            let (ti, tk) = (t[i], t[i + k]);
            if ti == tk {
                return Err(FracError::InvalidParameter("repeated alpha in extrapolation".into()));
            }
            // evaluate at t = 0
            p[i] = (tk * p[i] - ti * p[i + 1]) / (tk - ti);
        }
    }
    Ok(p[0])
}

/// Evaluates `f` on every item in parallel; results keep the input order.
pub fn evaluate_batch<T, F>(items: &[T], f: F) -> Vec<Result<EvalResult>>
where
    T: Sync,
    F: Fn(&T) -> Result<EvalResult> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// [`nmc_boundary`] at many points.
pub fn nmc_boundary_batch(surf: &Surface, points: &[Vec<f64>], fo: &FracOrder, q: &QuadSpec) -> Vec<Result<EvalResult>> {
    evaluate_batch(points, |x| nmc_boundary(surf, x, fo, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classical_mc_rotational, RotationalProfile};

    #[test]
    fn unit_sphere_in_r3_tends_to_one() {
        let alphas = [0.9, 0.95, 0.99];
        let v = classical_limit_check(&Surface::unit_sphere(3), &[0.0, 0.0, 1.0], &alphas, &QuadSpec::default()).unwrap();
        assert!(v.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()));
        let lim = extrapolate_to_one(&alphas, &v).unwrap();
        assert!((lim - 1.0).abs() < 0.02, "{lim}");
    }

    #[test]
    fn hyperplane_is_zero() {
        let s = Surface::Hyperplane {
            point: vec![0.0; 3],
            normal: vec![0.0, 0.0, 1.0],
        };
        let v = classical_limit_check(&s, &[0.3, 0.1, 0.0], &[0.5, 0.9], &QuadSpec::default()).unwrap();
        assert!(v.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn cylinder_tends_to_classical_value() {
        let h = 2.0;
        let classical = classical_mc_rotational(&RotationalProfile::Cylinder { radius: 1.0 / h }, 0.0).unwrap();
        let alphas = [0.9, 0.95, 0.97, 0.99];
        let s = Surface::Cylinder { dim: 3, radius: 1.0 / h };
        let v = classical_limit_check(&s, &[0.0, 1.0 / h, 0.0], &alphas, &QuadSpec::default()).unwrap();
        let lim = extrapolate_to_one(&alphas, &v).unwrap();
        assert!((lim - classical).abs() < 0.05 * classical, "{lim} vs {classical}");
    }

    #[test]
    fn batch_keeps_order() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let pts: Vec<Vec<f64>> = (0..16).map(|k| {
            let t = 0.4 * k as f64;
            vec![2.0 * t.cos(), 2.0 * t.sin()]
        }).collect();
        let s = Surface::Sphere { center: vec![0.0, 0.0], radius: 2.0 };
        let out = nmc_boundary_batch(&s, &pts, &fo, &QuadSpec::default());
        let exact = super::super::sphere_nmc_exact(&fo, 2.0);
        for r in out {
            assert!((r.unwrap().value - exact).abs() < 1e-12 * exact);
        }
        assert_eq!(extrapolate_to_one(&[0.5, 0.75], &[1.0, 2.0]).unwrap(), 3.0);
    }
}
