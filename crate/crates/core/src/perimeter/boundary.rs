use std::f64::consts::PI;

use super::lines::quad;
use crate::error::{FracError, Result};
use crate::geometry::{ClosedCurve, Surface};
use crate::quadrature::{integrate_power_left, sphere_area, EvalResult, FracOrder, QuadSpec, Tolerance};

/// Fractional perimeter of the set bounded by `surf` as the double surface
/// integral `1 / (alpha (N + alpha - 2)) int int nu(x) . nu(y) |x - y|^(2 - N - alpha)`.
pub fn frac_perimeter_boundary(surf: &Surface, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    surf.validate()?;
    let n = fo.dim();
    if surf.dim() != n {
        return Err(FracError::InvalidParameter(format!(
            "surface lives in R^{} but the order has dim {n}",
            surf.dim()
        )));
    }
    let a = fo.alpha();
    let pref = 1.0 / (a * (n as f64 + a - 2.0));
    let tol = q.tolerance();
    if let Surface::Sphere { radius, .. } = surf {
        if n > 2 {
            let nf = n as f64;
            let shell = integrate_power_left(
                |phi| {
                    let chord = 2.0 * (0.5 * phi).sin();
                    Ok((phi.cos() * chord.powf(2.0 - nf - a) * phi.sin().powi(n as i32 - 2), 0.0))
                },
                0.0,
                PI,
                a,
                tol,
            )?;
            let w = sphere_area(n) * sphere_area(n - 1) * radius.powf(nf - a);
            return Ok(shell.scale(pref * w));
        }
    }
    let curves = plane_components(surf)?;
    let mut total = EvalResult::exact(0.0);
    for (i, ci) in curves.iter().enumerate() {
        for (j, cj) in curves.iter().enumerate() {
            let part = if i == j { self_term(ci, a, tol)? } else { cross_term(ci, cj, a, tol)? };
            total = total.add(part);
        }
    }
    Ok(total.scale(pref))
}

fn plane_components(surf: &Surface) -> Result<Vec<ClosedCurve>> {
    match surf {
        Surface::Curve(c) => Ok(vec![c.clone()]),
        Surface::Sphere { center, radius } if center.len() == 2 => Ok(vec![ClosedCurve::Circle {
            center: [center[0], center[1]],
            radius: *radius,
        }]),
        Surface::Union(parts) => {
            let mut out = vec![];
            for p in parts {
                out.extend(plane_components(p)?);
            }
            Ok(out)
        }
        Surface::Hyperplane { .. } | Surface::Cylinder { .. } => {
            Err(FracError::InvalidParameter("boundary perimeter needs a bounded set".into()))
        }
        Surface::Sphere { .. } => Err(FracError::Unsupported("unions of spheres in R^3".into())),
    }
}

fn speed(c: &ClosedCurve, t: f64) -> f64 {
    let d = c.jet(t)[1];
    d[0].hypot(d[1])
}

fn self_term(c: &ClosedCurve, a: f64, tol: Tolerance) -> Result<EvalResult> {
    let inner = tol.scaled(0.1);
    quad(
        |t0| {
            let n0 = c.normal(t0);
            let g = |t: f64| {
                let d = c.chord(t0, t);
                let n1 = c.normal(t);
                (n0[0] * n1[0] + n0[1] * n1[1]) * d[0].hypot(d[1]).powf(-a) * speed(c, t)
            };
            let r = integrate_power_left(|s| Ok((g(t0 + s) + g(t0 - s), 0.0)), 0.0, PI, a, inner)?;
            Ok(r.value * speed(c, t0))
        },
        &[0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI],
        tol,
    )
}

fn cross_term(ci: &ClosedCurve, cj: &ClosedCurve, a: f64, tol: Tolerance) -> Result<EvalResult> {
    let inner = tol.scaled(0.1);
    let pts = [0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI];
    quad(
        |t0| {
            let (x, n0) = (ci.point(t0), ci.normal(t0));
            let r = quad(
                |t| {
                    let (y, n1) = (cj.point(t), cj.normal(t));
                    let dist = (x[0] - y[0]).hypot(x[1] - y[1]);
                    Ok((n0[0] * n1[0] + n0[1] * n1[1]) * dist.powf(-a) * speed(cj, t))
                },
                &pts,
                inner,
            )?;
            Ok(r.value * speed(ci, t0))
        },
        &pts,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{IndicatorSet, SphereFunction};
    use crate::perimeter::frac_perimeter;

    #[test]
    fn solid_and_boundary_forms_agree() {
        let q = QuadSpec::default();
        for (n, a) in [(2, 0.5), (3, 0.5), (2, 0.3)] {
            let fo = FracOrder::new(n, a).unwrap();
            let b = frac_perimeter_boundary(&Surface::unit_sphere(n), &fo, &q).unwrap();
            let s = frac_perimeter(&IndicatorSet::unit_ball(n), &fo, &q).unwrap();
            assert!(b.value > 0.0);
            assert!((b.value - s.value()).abs() < 1e-5 * s.value(), "N={n}: {} vs {}", b.value, s.value());
        }
    }

    #[test]
    fn star_and_two_disks() {
        let fo = FracOrder::new(2, 0.4).unwrap();
        let q = QuadSpec::default();
        let psi = SphereFunction::fourier(vec![1.0, 0.0, 0.2], vec![0.0, 0.0, 0.0, 0.05]);
        let star = ClosedCurve::Star {
            center: [0.0, 0.0],
            psi,
        };
        let b = frac_perimeter_boundary(&Surface::Curve(star.clone()), &fo, &q).unwrap().value;
        let s = frac_perimeter(&star.to_region(), &fo, &q).unwrap().value();
        assert!((b - s).abs() < 1e-5 * s, "{b} vs {s}");
        let pair = Surface::Union(vec![
            Surface::Sphere { center: vec![0.0, 0.0], radius: 1.0 },
            Surface::Curve(ClosedCurve::Circle { center: [3.0, 0.0], radius: 1.0 }),
        ]);
        let b = frac_perimeter_boundary(&pair, &fo, &q).unwrap().value;
        let region = IndicatorSet::union(vec![
            IndicatorSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
            IndicatorSet::ball(vec![3.0, 0.0], 1.0).unwrap(),
        ]);
        let s = frac_perimeter(&region, &fo, &q).unwrap().value();
        assert!((b - s).abs() < 1e-5 * s, "{b} vs {s}");
    }
}
