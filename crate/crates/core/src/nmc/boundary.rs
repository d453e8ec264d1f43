use std::f64::consts::PI;

use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use crate::error::{FracError, Result};
use crate::geometry::{dot, ClosedCurve, Surface};
use crate::quadrature::{integrate_power_left, integrate_with_err, power_tail_bound, sphere_area, EvalResult, FracOrder, QuadSpec, Tolerance};

const ON_SURFACE: f64 = 1e-9;

/// `(2/alpha) int_S (y - x) . nu(y) |y - x|^-(N + alpha) dV(y)` at a point
/// `x` of the surface.
pub fn nmc_boundary(surf: &Surface, x: &[f64], fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    q.validate()?;
    surf.validate()?;
    if x.len() != surf.dim() || surf.dim() != fo.dim() {
        return Err(FracError::InvalidParameter(format!(
            "point of length {} for a surface in R^{} at order dim {}",
            x.len(),
            surf.dim(),
            fo.dim()
        )));
    }
    integrability_gate(surf, fo, q)?;
    let tol = q.tolerance();
    let raw = match surf {
        Surface::Union(parts) => {
            let own = surf.component_of(x);
            let mut acc = own_contribution(&parts[own], x, fo, tol)?;
            for (j, p) in parts.iter().enumerate() {
                if j != own {
                    acc = acc.add(remote_contribution(p, x, fo, tol)?);
                }
            }
            acc
        }
        _ => own_contribution(surf, x, fo, tol)?,
    };
    Ok(raw.scale(2.0 / fo.alpha()))
}

fn integrability_gate(surf: &Surface, fo: &FracOrder, q: &QuadSpec) -> Result<()> {
    let growth = match surf {
        Surface::Hyperplane { point, .. } => point.len() - 1,
        Surface::Cylinder { .. } => 1,
        Surface::Union(parts) => {
            for p in parts {
                integrability_gate(p, fo, q)?;
            }
            return Ok(());
        }
        _ => return Ok(()),
    };
    power_tail_bound(growth, fo.kernel_exponent() - 1.0, q.trunc_radius)
        .map(|_| ())
        .map_err(|e| FracError::IntegrabilityFailure(e.to_string()))
}

fn off_surface(d: f64) -> FracError {
    FracError::InvalidParameter(format!("evaluation point lies {d:e} away from the surface"))
}

/// The closed form for a round sphere of radius `r` in R^N:
/// `(2/alpha) |S^(N-2)| r^-alpha 2^(-1-alpha) B((1 - alpha)/2, (N - 1)/2)`.
pub fn sphere_nmc_exact(fo: &FracOrder, radius: f64) -> f64 {
    let (n, a) = (fo.dim() as f64, fo.alpha());
    2.0 / a * sphere_area(fo.dim() - 1) * radius.powf(-a) * 2f64.powf(-1.0 - a) * beta(0.5 * (1.0 - a), 0.5 * (n - 1.0))
}

/// The integral (without the `2/alpha` factor) over the component that
/// carries `x`.
fn own_contribution(surf: &Surface, x: &[f64], fo: &FracOrder, tol: Tolerance) -> Result<EvalResult> {
    let scale = |r: f64| ON_SURFACE * r.max(1.0);
    match surf {
        Surface::Sphere { radius, .. } => {
            let d = surf.distance(x);
            if d > scale(*radius) {
                return Err(off_surface(d));
            }
            let v = 0.5 * fo.alpha() * sphere_nmc_exact(fo, *radius);
            Ok(EvalResult::new(v, 1e-15 * v.abs(), 0.0))
        }
        Surface::Hyperplane { .. } => {
            let d = surf.distance(x);
            if d > scale(dot(x, x).sqrt()) {
                return Err(off_surface(d));
            }
            Ok(EvalResult::exact(0.0))
        }
        Surface::Cylinder { dim, radius } => {
            let d = surf.distance(x);
            if d > scale(*radius) {
                return Err(off_surface(d));
            }
            let a = fo.alpha();
            let v = if *dim == 2 {
                // the opposite line at distance 2R; the own line is flat
                2.0 * radius * line_kernel_integral(2.0 * radius, 1.0 + 0.5 * a)
            } else {
                let k = PI.sqrt() * gamma(1.0 + 0.5 * a) / gamma(1.5 + 0.5 * a);
                k * (2.0 * radius).powf(-a) * beta(0.5 * (1.0 - a), 0.5)
            };
            Ok(EvalResult::new(v, 1e-15 * v.abs(), 0.0))
        }
        Surface::Curve(c) => {
            let (t0, d) = c.locate(x);
            if d > scale(c.bounding_radius()) {
                return Err(off_surface(d));
            }
            curve_singular(c, t0, fo, tol)
        }
        Surface::Union(_) => Err(FracError::InvalidParameter("nested surface unions".into())),
    }
}

/// `int_R (t^2 + c^2)^-beta dt = c^(1 - 2 beta) sqrt(pi) Gamma(beta - 1/2) / Gamma(beta)`.
fn line_kernel_integral(c: f64, beta_exp: f64) -> f64 {
    c.powf(1.0 - 2.0 * beta_exp) * PI.sqrt() * gamma(beta_exp - 0.5) / gamma(beta_exp)
}

fn curve_singular(c: &ClosedCurve, t0: f64, fo: &FracOrder, tol: Tolerance) -> Result<EvalResult> {
    let a = fo.alpha();
    let g = |t: f64| {
        let d = c.chord(t0, t);
        let v = c.jet(t)[1];
        // outward normal times |c'|
        let num = d[0] * v[1] - d[1] * v[0];
        let r2 = d[0] * d[0] + d[1] * d[1];
        if r2 == 0.0 {
            0.0
        } else {
            num * r2.powf(-0.5 * (2.0 + a))
        }
    };
    integrate_power_left(|s| Ok((g(t0 + s) + g(t0 - s), 0.0)), 0.0, PI, a, tol)
}

/// The smooth integral over a component not containing `x`.
fn remote_contribution(surf: &Surface, x: &[f64], fo: &FracOrder, tol: Tolerance) -> Result<EvalResult> {
    let n = fo.dim();
    let beta_exp = 0.5 * fo.kernel_exponent();
    match surf {
        Surface::Sphere { center, radius } => {
            let rel: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
            let d = dot(&rel, &rel).sqrt();
            let r = *radius;
            let ring = sphere_area(n - 1) * r.powi(n as i32 - 1);
            let pts: Vec<f64> = (0..=8).map(|k| PI * k as f64 / 8.0).collect();
            integrate_with_err(
                |phi| {
                    let (s, c) = phi.sin_cos();
                    let dist2 = r * r + d * d - 2.0 * r * d * c;
                    Ok(((r - d * c) * dist2.powf(-beta_exp) * ring * s.powi(n as i32 - 2), 0.0))
                },
                &pts,
                tol,
            )
        }
        Surface::Curve(c) => {
            let pts: Vec<f64> = (0..=16).map(|k| 2.0 * PI * k as f64 / 16.0).collect();
            integrate_with_err(
                |t| {
                    let j = c.jet(t);
                    let d = [j[0][0] - x[0], j[0][1] - x[1]];
                    let num = d[0] * j[1][1] - d[1] * j[1][0];
                    Ok((num * (d[0] * d[0] + d[1] * d[1]).powf(-beta_exp), 0.0))
                },
                &pts,
                tol,
            )
        }
        Surface::Hyperplane { point, normal } => {
            let nn = dot(normal, normal).sqrt();
            let h: f64 = point.iter().zip(x).zip(normal).map(|((p, y), v)| (p - y) * v).sum::<f64>() / nn;
            let a = fo.alpha();
            let radial = 0.5 * beta(0.5 * (n as f64 - 1.0), 0.5 * (1.0 + a));
            let v = h.signum() * sphere_area(n - 1) * h.abs().powf(-a) * radial;
            Ok(EvalResult::new(v, 1e-15 * v.abs(), 0.0))
        }
        Surface::Cylinder { .. } => Err(FracError::Unsupported("cylinder as a remote union component".into())),
        Surface::Union(_) => Err(FracError::InvalidParameter("nested surface unions".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_power_both;

    fn spec() -> QuadSpec {
        QuadSpec::precise()
    }

    #[test]
    fn sphere_closed_form_matches_angle_integral() {
        for (n, a) in [(2usize, 0.5), (3, 0.3), (4, 0.7)] {
            let fo = FracOrder::new(n, a).unwrap();
            let area = sphere_area(n - 1);
            // x = e_1 on the unit sphere, y at polar angle phi
            let integral = integrate_power_left(
                |phi: f64| {
                    let s = (0.5 * phi).sin();
                    Ok((2.0 * s * s * (2.0 * s).powf(-(n as f64) - a) * area * phi.sin().powi(n as i32 - 2), 0.0))
                },
                0.0,
                PI,
                a,
                Tolerance::new(1e-13, 1e-14),
            )
            .unwrap()
            .value;
            let exact = sphere_nmc_exact(&fo, 1.0);
            assert!((2.0 / a * integral - exact).abs() < 1e-9 * exact, "N={n}: {exact}");
        }
        let fo = FracOrder::new(3, 0.4).unwrap();
        let expect = 2.0 * PI * 2f64.powf(0.6) / (0.4 * 0.6);
        assert!((sphere_nmc_exact(&fo, 1.0) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn circle_curve_matches_sphere() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let circle = Surface::Curve(ClosedCurve::Circle {
            center: [0.3, -0.2],
            radius: 1.5,
        });
        let exact = sphere_nmc_exact(&fo, 1.5);
        for x in circle.sample_points(5) {
            let r = nmc_boundary(&circle, &x, &fo, &spec()).unwrap();
            assert!((r.value - exact).abs() < 1e-8, "{} vs {exact}", r.value);
            assert!(r.total_err() < 1e-6);
        }
    }

    #[test]
    fn hyperplane_is_flat() {
        let fo = FracOrder::new(3, 0.5).unwrap();
        let plane = Surface::Hyperplane {
            point: vec![0.0; 3],
            normal: vec![0.0, 0.0, 1.0],
        };
        assert_eq!(nmc_boundary(&plane, &[1.0, 2.0, 0.0], &fo, &spec()).unwrap().value, 0.0);
        assert!(nmc_boundary(&plane, &[1.0, 2.0, 0.5], &fo, &spec()).is_err());
    }

    #[test]
    fn cylinder_matches_direct_quadrature() {
        let a = 0.6;
        let fo = FracOrder::new(3, a).unwrap();
        let cyl = Surface::Cylinder { dim: 3, radius: 0.8 };
        let v = nmc_boundary(&cyl, &[0.0, 0.8, 0.0], &fo, &spec()).unwrap().value;
        // theta integral with the closed t-integral kept symbolic only in t
        let r = 0.8;
        let k = PI.sqrt() * gamma(1.0 + 0.5 * a) / gamma(1.5 + 0.5 * a);
        let th = 2.0 * integrate_power_both(
            |t: f64| {
                let s = (0.5 * t).sin();
                Ok((2.0 * r * s * s * r * (2.0 * r * s).powf(-2.0 - a) * k, 0.0))
            },
            0.0,
            PI,
            a,
            0.0,
            Tolerance::new(1e-13, 1e-14),
        )
        .unwrap()
        .value;
        assert!((v - 2.0 / a * th).abs() < 1e-9 * v);
    }

    #[test]
    fn two_disks_raise_each_other() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let one = Surface::Curve(ClosedCurve::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        });
        let two = Surface::Union(vec![
            one.clone(),
            Surface::Curve(ClosedCurve::Circle {
                center: [4.0, 0.0],
                radius: 1.0,
            }),
        ]);
        let alone = nmc_boundary(&one, &[1.0, 0.0], &fo, &spec()).unwrap().value;
        let near = nmc_boundary(&two, &[1.0, 0.0], &fo, &spec()).unwrap().value;
        let far = nmc_boundary(&two, &[-1.0, 0.0], &fo, &spec()).unwrap().value;
        // the other disk removes mass from the complement: curvature drops
        assert!(near < far && far < alone);
        // remote sphere branch agrees with the remote curve branch
        let as_sphere = Surface::Union(vec![
            one,
            Surface::Sphere {
                center: vec![4.0, 0.0],
                radius: 1.0,
            },
        ]);
        let alt = nmc_boundary(&as_sphere, &[1.0, 0.0], &fo, &spec()).unwrap().value;
        assert!((alt - near).abs() < 1e-9);
    }

    #[test]
    fn remote_half_plane_closed_form() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let tol = Tolerance::new(1e-13, 1e-15);
        let plane = Surface::Hyperplane {
            point: vec![0.0, -2.0],
            normal: vec![0.0, 1.0],
        };
        let v = remote_contribution(&plane, &[0.0, 0.0], &fo, tol).unwrap().value;
        // int_R (y - x) . e_2 |y - x|^-2.5 dy over the line y_2 = -2: -2 * int (t^2+4)^-1.25
        let direct = -2.0 * 2.0 * integrate_power_left(|t: f64| Ok(((t * t + 4.0).powf(-1.25), 0.0)), 0.0, 1e6, 0.0, tol).unwrap().value;
        assert!((v - direct).abs() < 1e-6, "{v} {direct}");
    }

    #[test]
    fn scaling_homogeneity_on_ellipse() {
        let fo = FracOrder::new(2, 0.3).unwrap();
        let e = Surface::Curve(ClosedCurve::Ellipse {
            center: [0.0, 0.0],
            a: 1.2,
            b: 0.8,
        });
        let x = e.sample_points(7)[3].clone();
        let h1 = nmc_boundary(&e, &x, &fo, &spec()).unwrap().value;
        let h2 = nmc_boundary(&e.scaled(2.0), &[2.0 * x[0], 2.0 * x[1]], &fo, &spec()).unwrap().value;
        assert!((h2 - 2f64.powf(-0.3) * h1).abs() < 1e-8 * h1);
    }
}
