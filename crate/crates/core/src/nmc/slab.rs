use std::f64::consts::PI;

use super::graph::truncation;
use crate::error::{FracError, Result};
use crate::geometry::SlabGraph;
use crate::quadrature::{integrate_far_field, integrate_power_left, integrate_with_err, EvalResult, FracOrder, QuadSpec, Tolerance};

/// Nonlocal mean curvature of `{(s, z) : |z| < u(s)}` at the boundary point
/// over `s` (for `n = 2` the point `(s, u(s), 0)`), from the absolutely
/// convergent representation.
pub fn nmc_slab(sg: &SlabGraph, s: f64, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    if fo.dim() != sg.dim() {
        return Err(FracError::InvalidParameter(format!(
            "slab lives in R^{} but the order has dim {}",
            sg.dim(),
            fo.dim()
        )));
    }
    let u = sg.profile();
    let (t0, cell) = truncation(&[u], s, q.trunc_radius)?;
    let tol = q.tolerance();
    let a = fo.alpha();
    let beta = 0.5 * fo.kernel_exponent();
    let (u0, _, _) = u.jet(s);
    // tau = s - sigma; the own sheet carries the singular part
    let pieces = |tau: f64| {
        let (u1, d1, _) = u.jet(s - tau);
        let du = u.increment(s, -tau);
        let own = du + tau * d1;
        (u1, d1, du, own)
    };
    let raw = if sg.codim() == 1 {
        let g = |tau: f64| {
            let (u1, d1, du, own) = pieces(tau);
            let sum = u0 + u1;
            own * (tau * tau + du * du).powf(-beta) + (sum + tau * d1) * (tau * tau + sum * sum).powf(-beta)
        };
        half_line(|t| g(t) + g(-t), a, cell, t0, tol)?
    } else {
        let inner_tol = tol.scaled(0.1);
        let ring = |tau: f64| -> Result<f64> {
            let (u1, _, du, own) = pieces(tau);
            let base = tau * tau + du * du;
            let h = |phi: f64| {
                let chord2 = 4.0 * (0.5 * phi).sin().powi(2);
                let d = (base + u0 * u1 * chord2).powf(-beta);
                u1 * own * d + 0.5 * u0 * chord2 * u1 * d
            };
            let mut pts = vec![0.0];
            let mut b = tau.abs().max(1e-300);
            while b < PI {
                pts.push(b);
                b *= 4.0;
            }
            pts.push(PI);
            Ok(2.0 * integrate_with_err(|phi| Ok((h(phi), 0.0)), &pts, inner_tol)?.value)
        };
        let g = |t: f64| ring(t).and_then(|p| Ok(p + ring(-t)?));
        // the ring integrals never fail for admissible data; surface any failure
        let probe = g(cell)?;
        if !probe.is_finite() {
            return Err(FracError::NonConvergent("slab ring integral".into()));
        }
        half_line(|t| g(t).unwrap_or(f64::NAN), a, cell, t0, tol)?
    };
    if !raw.value.is_finite() {
        return Err(FracError::NonConvergent("slab integral produced a non-finite value".into()));
    }
    Ok(raw.scale(2.0 / a))
}

/// `int_0^inf f` for `f ~ t^-gamma` at the origin and a tail expanding in
/// powers `t^-(1 + gamma)`, `t^-(2 + gamma)`, ... along whole cells.
fn half_line<F: Fn(f64) -> f64>(f: F, gamma: f64, cell: f64, t0: f64, tol: Tolerance) -> Result<EvalResult> {
    let head = integrate_power_left(|t| Ok((f(t), 0.0)), 0.0, cell, gamma, tol)?;
    let mut pts = vec![cell];
    let mut t = 2.0 * cell;
    while t < t0 - 1e-9 * cell {
        pts.push(t);
        t += cell;
    }
    pts.push(t0);
    let body = integrate_with_err(|t| Ok((f(t), 0.0)), &pts, tol)?;
    let tail = integrate_far_field(&f, t0, 2.0 * t0, cell, 1.0 + gamma, tol)?;
    Ok(head.add(body).add(tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Profile1d, Surface};
    use crate::nmc::nmc_boundary;

    #[test]
    fn parallel_lines_match_boundary_form() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let sg = SlabGraph::new(Profile1d::constant(0.7), 1).unwrap();
        let q = QuadSpec::precise();
        let h = nmc_slab(&sg, 0.3, &fo, &q).unwrap();
        let b = nmc_boundary(&Surface::Cylinder { dim: 2, radius: 0.7 }, &[0.3, 0.7], &fo, &q).unwrap();
        assert!(h.value > 0.0);
        assert!((h.value - b.value).abs() < 1e-8, "{} vs {}", h.value, b.value);
    }

    #[test]
    fn round_cylinder_matches_boundary_form() {
        let fo = FracOrder::new(3, 0.4).unwrap();
        let sg = SlabGraph::new(Profile1d::constant(1.3), 2).unwrap();
        let q = QuadSpec::precise();
        let h = nmc_slab(&sg, 0.0, &fo, &q).unwrap();
        let b = nmc_boundary(&Surface::Cylinder { dim: 3, radius: 1.3 }, &[0.0, 1.3, 0.0], &fo, &q).unwrap();
        assert!((h.value - b.value).abs() < 1e-7 * b.value, "{} vs {}", h.value, b.value);
    }

    #[test]
    fn slab_scaling() {
        let fo = FracOrder::new(2, 0.3).unwrap();
        let q = QuadSpec::precise();
        let u = |m: f64| Profile1d::Trig {
            period: 2.0 * PI * m,
            cos: vec![m, 0.3 * m],
            sin: vec![],
        };
        let h1 = nmc_slab(&SlabGraph::new(u(1.0), 1).unwrap(), 0.5, &fo, &q).unwrap().value;
        let h2 = nmc_slab(&SlabGraph::new(u(2.0), 1).unwrap(), 1.0, &fo, &q).unwrap().value;
        assert!((h2 - 2f64.powf(-0.3) * h1).abs() < 1e-8 * h1.abs(), "{h1} {h2}");
    }

    #[test]
    fn neck_curves_more_than_bulge() {
        let fo = FracOrder::new(3, 0.5).unwrap();
        let q = QuadSpec::default();
        let sg = SlabGraph::new(Profile1d::cosine(1.0, 0.2, 1.0).unwrap(), 2).unwrap();
        let bulge = nmc_slab(&sg, 0.0, &fo, &q).unwrap().value;
        let neck = nmc_slab(&sg, PI, &fo, &q).unwrap().value;
        assert!(neck > bulge);
    }
}
