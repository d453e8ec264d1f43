use std::f64::consts::PI;

use super::orthonormal_complement;
use crate::error::{FracError, Result};
use crate::geometry::{dot, IndicatorSet};
use crate::quadrature::{integrate_with_err, pv_integrate, sphere_area, EvalResult, FracOrder, QuadSpec, Tolerance};

/// `PV int tau_E(y) |y - x|^-(N + alpha) dy` at a boundary point `x`, with
/// `tau_E = +1` outside and `-1` inside `E`.
///
/// Along each ray from `x` the radial integral is exact (the far field
/// included); the directions are integrated adaptively and the excision
/// radius is extrapolated to zero.
pub fn nmc_solid(set: &IndicatorSet, x: &[f64], fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    let frame = Frame::at(set, x, fo)?;
    let a = fo.alpha();
    let area = sphere_area(fo.dim());
    let tol = q.tolerance();
    pv_integrate(
        |eps| {
            let inside = frame.integrate(set, x, eps, |_, segs| -2.0 / a * radial_sum(segs, eps, a), tol)?;
            Ok(inside.add(EvalResult::exact(area * eps.powf(-a) / a)))
        },
        q,
        1.0 - a,
    )
}

/// `-(N + alpha) PV int tau_E(y) |x - y|^-(N + 2 + alpha) (x - y) . v dy`,
/// the derivative of [`nmc_solid`] along a unit tangent `v` at `x`.
pub fn nmc_tangential_derivative(set: &IndicatorSet, x: &[f64], v: &[f64], fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    let frame = Frame::at(set, x, fo)?;
    if v.len() != x.len() || (dot(v, v).sqrt() - 1.0).abs() > 1e-10 {
        return Err(FracError::InvalidParameter("tangent direction must be a unit vector".into()));
    }
    let normal_part = dot(v, &frame.normal);
    if normal_part.abs() > 1e-10 {
        return Err(FracError::NotTangent(normal_part));
    }
    let a = fo.alpha();
    let n_a = fo.kernel_exponent();
    let tol = q.tolerance();
    pv_integrate(
        |eps| {
            frame
                .integrate(
                    set,
                    x,
                    eps,
                    |w, segs| -2.0 / (1.0 + a) * dot(w, v) * radial_sum(segs, eps, 1.0 + a),
                    tol,
                )
                .map(|r| r.scale(n_a))
        },
        q,
        1.0 - a,
    )
}

/// `sum over inside segments (a, b) of (max(a, eps)^-s - b^-s)_+`.
fn radial_sum(segs: &[(f64, f64)], eps: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for &(lo, hi) in segs {
        if hi <= eps {
            continue;
        }
        let far = if hi.is_finite() { hi.powf(-s) } else { 0.0 };
        acc += lo.max(eps).powf(-s) - far;
    }
    acc
}

/// Directions at `x` in coordinates adapted to the outward normal, so that
/// the tangent plane sits on a breakpoint of the angular quadrature.
struct Frame {
    normal: Vec<f64>,
    tangents: Vec<Vec<f64>>,
}

impl Frame {
    fn at(set: &IndicatorSet, x: &[f64], fo: &FracOrder) -> Result<Self> {
        let n = fo.dim();
        if set.dim() != n || x.len() != n {
            return Err(FracError::InvalidParameter(format!(
                "set in R^{} with point of length {} at order dim {n}",
                set.dim(),
                x.len()
            )));
        }
        if n > 3 {
            return Err(FracError::Unsupported(format!("solid evaluation in R^{n}")));
        }
        let d = set.boundary_distance(x);
        if d > 1e-8 * dot(x, x).sqrt().max(1.0) {
            return Err(FracError::InvalidParameter(format!("point lies {d:e} away from the boundary")));
        }
        let normal = set.outward_normal(x).unwrap_or_else(|| {
            let mut e = vec![0.0; n];
            e[n - 1] = 1.0;
            e
        });
        let tangents = orthonormal_complement(&normal);
        Ok(Self { normal, tangents })
    }

    /// Integral over the unit sphere of `f(w)`, where `f` is evaluated from
    /// the inside segments of the ray in direction `w`. Rays leaving `x`
    /// inward stay inside over a chord that shrinks to zero at the tangent
    /// plane; the angle where the chord equals `eps` is a kink of every
    /// excised integrand and is located and used as a breakpoint.
    fn integrate<F>(&self, set: &IndicatorSet, x: &[f64], eps: f64, f: F, tol: Tolerance) -> Result<EvalResult>
    where
        F: Fn(&[f64], &[(f64, f64)]) -> f64,
    {
        let nu = &self.normal;
        if nu.len() == 2 {
            let t = &self.tangents[0];
            let dir = |th: f64| {
                let (s, c) = th.sin_cos();
                [c * nu[0] + s * t[0], c * nu[1] + s * t[1]]
            };
            let mut pts: Vec<f64> = (0..=4).map(|k| 0.5 * PI * k as f64).collect();
            for (tan, deep) in [(0.5 * PI, PI), (1.5 * PI, PI)] {
                if let Some(k) = chord_kink(|th| set.ray_segments(x, &dir(th)), tan, deep, eps) {
                    pts.push(k);
                }
            }
            pts.sort_by(f64::total_cmp);
            return integrate_with_err(
                |th| {
                    let w = dir(th);
                    Ok((f(&w, &set.ray_segments(x, &w)), 0.0))
                },
                &pts,
                tol,
            );
        }
        let (e1, e2) = (&self.tangents[0], &self.tangents[1]);
        let outer_pts: Vec<f64> = (0..=4).map(|k| 0.5 * PI * k as f64).collect();
        let inner_tol = tol.scaled(0.1);
        integrate_with_err(
            |ph| {
                let (sp, cp) = ph.sin_cos();
                let dir = |th: f64| {
                    let (st, ct) = th.sin_cos();
                    [0, 1, 2].map(|i| ct * nu[i] + st * (cp * e1[i] + sp * e2[i]))
                };
                let mut pts = vec![0.0, 0.5 * PI, PI];
                if let Some(k) = chord_kink(|th| set.ray_segments(x, &dir(th)), 0.5 * PI, PI, eps) {
                    pts.insert(2, k);
                }
                let meridian = integrate_with_err(
                    |th| {
                        let w = dir(th);
                        Ok((f(&w, &set.ray_segments(x, &w)) * th.sin(), 0.0))
                    },
                    &pts,
                    inner_tol,
                )?;
                Ok((meridian.value, meridian.quad_err))
            },
            &outer_pts,
            tol,
        )
    }
}

/// Angle between the tangent direction `tan` and the inward direction
/// `deep` at which the chord through `x` reaches length `eps`.
fn chord_kink<R>(rays: R, tan: f64, deep: f64, eps: f64) -> Option<f64>
where
    R: Fn(f64) -> Vec<(f64, f64)>,
{
    let reaches = |th: f64| rays(th).iter().any(|&(lo, hi)| lo < 1e-3 * eps && hi > eps);
    if !reaches(deep) || reaches(tan) {
        return None;
    }
    let (mut lo, mut hi) = (tan, deep);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmc::sphere_nmc_exact;

    #[test]
    fn half_space_vanishes() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let h = IndicatorSet::half_space(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let r = nmc_solid(&h, &[0.3, 0.0], &fo, &QuadSpec::default()).unwrap();
        assert!(r.value.abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn disk_matches_closed_form() {
        for a in [0.3, 0.5, 0.7] {
            let fo = FracOrder::new(2, a).unwrap();
            let r = nmc_solid(&IndicatorSet::unit_ball(2), &[0.6, 0.8], &fo, &QuadSpec::precise()).unwrap();
            let exact = sphere_nmc_exact(&fo, 1.0);
            assert!((r.value - exact).abs() < 1e-6, "alpha {a}: {} vs {exact}", r.value);
            assert!((r.value - exact).abs() <= r.total_err() + 1e-9, "err {}", r.total_err());
        }
    }

    #[test]
    fn ball_in_space_matches_closed_form() {
        let fo = FracOrder::new(3, 0.5).unwrap();
        let x = [0.0, 0.6, 0.8];
        let r = nmc_solid(&IndicatorSet::unit_ball(3), &x, &fo, &QuadSpec::default()).unwrap();
        let exact = sphere_nmc_exact(&fo, 1.0);
        assert!((r.value - exact).abs() < 1e-5 * exact, "{} vs {exact}", r.value);
    }

    #[test]
    fn ball_derivative_vanishes_and_is_odd() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let b = IndicatorSet::unit_ball(2);
        let q = QuadSpec::default();
        let d = nmc_tangential_derivative(&b, &[1.0, 0.0], &[0.0, 1.0], &fo, &q).unwrap();
        assert!(d.value.abs() < 1e-6, "{}", d.value);
        assert!(matches!(
            nmc_tangential_derivative(&b, &[1.0, 0.0], &[1.0, 0.0], &fo, &q),
            Err(FracError::NotTangent(_))
        ));
    }

    #[test]
    fn derivative_matches_finite_difference_on_ellipse() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let (a, b) = (1.3, 0.9);
        let e = IndicatorSet::Ellipsoid {
            center: vec![0.0, 0.0],
            semi_axes: vec![a, b],
        };
        let q = QuadSpec::precise();
        let t0 = 0.7f64;
        let at = |t: f64| [a * t.cos(), b * t.sin()];
        let speed = (a * a * t0.sin().powi(2) + b * b * t0.cos().powi(2)).sqrt();
        let v = [-a * t0.sin() / speed, b * t0.cos() / speed];
        let d = nmc_tangential_derivative(&e, &at(t0), &v, &fo, &q).unwrap();
        let h = 1e-3;
        let hp = nmc_solid(&e, &at(t0 + h), &fo, &q).unwrap().value;
        let hm = nmc_solid(&e, &at(t0 - h), &fo, &q).unwrap().value;
        let fd = (hp - hm) / (2.0 * h * speed);
        assert!((d.value - fd).abs() < 1e-3 * d.value.abs().max(1.0), "{} vs {fd}", d.value);
        let neg = nmc_tangential_derivative(&e, &at(t0), &[-v[0], -v[1]], &fo, &q).unwrap();
        assert_eq!(neg.value, -d.value);
    }
}
