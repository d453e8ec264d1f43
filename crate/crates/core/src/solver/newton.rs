use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{FracError, Result};

pub(crate) const FD_STEP: f64 = 1e-6;
const MAX_ITER: usize = 25;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 12;

#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Forward-difference Jacobian; columns are evaluated concurrently and
/// assembled in index order.
pub(crate) fn fd_jacobian<F>(g: &F, x: &[f64], gx: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let n = x.len();
    let cols: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let h = FD_STEP * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            xp[j] += h;
            let gp = g(&xp)?;
            Ok(gp.iter().zip(gx).map(|(a, b)| (a - b) / h).collect())
        })
        .collect();
    let mut jac = DMatrix::zeros(gx.len(), n);
    for (j, c) in cols.into_iter().enumerate() {
        for (i, v) in c?.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    Ok(jac)
}

/// Damped Newton iteration for the square system `g(x) = 0`, stopping once
/// the sup-norm residual is at most `tol`.
pub(crate) fn newton<F>(g: F, x0: Vec<f64>, tol: f64) -> Result<Solved>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let mut x = x0;
    let mut gx = g(&x)?;
    let mut res = sup(&gx);
    let fail = |iterations, residual, x: &[f64]| FracError::NewtonDiverged {
        iterations,
        residual,
        last_iterate: x.to_vec(),
    };
    for it in 0..MAX_ITER {
        if !res.is_finite() {
            return Err(fail(it, res, &x));
        }
        if res <= tol {
            return Ok(Solved {
                x,
                residual: res,
                iterations: it,
            });
        }
        let jac = fd_jacobian(&g, &x, &gx)?;
        let delta = jac
            .lu()
            .solve(&DVector::from_column_slice(&gx))
            .ok_or_else(|| fail(it, res, &x))?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a - t * d).collect();
            // trial points outside the admissible set count as rejected
            if let Ok(gt) = g(&trial) {
                let rt = sup(&gt);
                if rt.is_finite() && rt <= (1.0 - ARMIJO * t) * res {
                    accepted = Some((trial, gt, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, gn, rn)) = accepted else {
            return Err(fail(it + 1, res, &x));
        };
        x = xn;
        gx = gn;
        res = rn;
    }
    if res <= tol {
        return Ok(Solved {
            x,
            residual: res,
            iterations: MAX_ITER,
        });
    }
    Err(fail(MAX_ITER, res, &x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_nonlinear_system() {
        let g = |x: &[f64]| Ok(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1].exp() + 1.0]);
        let s = newton(g, vec![2.0, 0.5], 1e-12).unwrap();
        let r = g(&s.x).unwrap();
        assert!(r.iter().all(|v| v.abs() <= 1e-12));
        assert!(s.iterations < 10);
    }

    #[test]
    fn reports_the_last_iterate_on_failure() {
        // no real root
        let g = |x: &[f64]| Ok(vec![x[0] * x[0] + 1.0]);
        match newton(g, vec![0.3], 1e-12) {
            Err(FracError::NewtonDiverged { last_iterate, .. }) => assert_eq!(last_iterate.len(), 1),
            other => panic!("{other:?}"),
        }
    }
}
