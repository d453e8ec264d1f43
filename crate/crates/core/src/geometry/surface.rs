use std::f64::consts::PI;

use super::dot;
use super::region::IndicatorSet;
use super::sphere_graph::SphereFunction;
use crate::error::{FracError, Result};
use crate::quadrature::fibonacci_sphere;

/// A closed, counter-clockwise, embedded plane curve `t -> c(t)`, `t` in
/// `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedCurve {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// `center + psi(t) (cos t, sin t)` with `psi` a Fourier series.
    Star { center: [f64; 2], psi: SphereFunction },
}

/// `c, c', c'', c'''` at a parameter value.
pub type CurveJet = [[f64; 2]; 4];

impl ClosedCurve {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ClosedCurve::Circle { radius, .. } => *radius > 0.0,
            ClosedCurve::Ellipse { a, b, .. } => *a > 0.0 && *b > 0.0,
            ClosedCurve::Star { psi, .. } => psi.dim() == 2 && psi.sampled_min() > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(FracError::InvalidParameter("curve radii must be positive".into()))
        }
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        match self {
            ClosedCurve::Circle { center, radius } => ellipse_jet(center, *radius, *radius, t),
            ClosedCurve::Ellipse { center, a, b } => ellipse_jet(center, *a, *b, t),
            ClosedCurve::Star { center, psi } => {
                let (p, p1, p2) = psi.angular(t);
                let p3 = angular_third(psi, t);
                let (s, c) = t.sin_cos();
                let e = [c, s];
                let ep = [-s, c];
                let comb = |u: f64, v: f64| [u * e[0] + v * ep[0], u * e[1] + v * ep[1]];
                let c0 = comb(p, 0.0);
                [
                    [center[0] + c0[0], center[1] + c0[1]],
                    comb(p1, p),
                    comb(p2 - p, 2.0 * p1),
                    comb(p3 - 3.0 * p1, 3.0 * p2 - p),
                ]
            }
        }
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        self.jet(t)[0]
    }

    /// `c(t) - c(t0)`, free of cancellation when `t` is close to `t0`.
    pub fn chord(&self, t0: f64, t: f64) -> [f64; 2] {
        let (m, h) = (0.5 * (t + t0), 0.5 * (t - t0));
        let sh = h.sin();
        // cos t - cos t0 and sin t - sin t0
        let dc = -2.0 * m.sin() * sh;
        let ds = 2.0 * m.cos() * sh;
        match self {
            ClosedCurve::Circle { radius, .. } => [radius * dc, radius * ds],
            ClosedCurve::Ellipse { a, b, .. } => [a * dc, b * ds],
            ClosedCurve::Star { psi, .. } => {
                let dp = psi.angular_difference(t0, t);
                let p0 = psi.angular(t0).0;
                let (s, c) = t.sin_cos();
                [dp * c + p0 * dc, dp * s + p0 * ds]
            }
        }
    }

    /// Outward unit normal.
    pub fn normal(&self, t: f64) -> [f64; 2] {
        let d = self.jet(t)[1];
        let n = d[0].hypot(d[1]);
        [d[1] / n, -d[0] / n]
    }

    /// Parameter of the curve point closest to `x`, and the distance.
    pub fn locate(&self, x: &[f64]) -> (f64, f64) {
        let n = 1024;
        let dist2 = |t: f64| {
            let p = self.point(t);
            (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)
        };
        let mut best = 0.0;
        let mut bd = f64::INFINITY;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let d = dist2(t);
            if d < bd {
                bd = d;
                best = t;
            }
        }
        // Newton on g(t) = (c(t) - x) . c'(t)
        let mut t = best;
        for _ in 0..30 {
            let j = self.jet(t);
            let r = [j[0][0] - x[0], j[0][1] - x[1]];
            let g = r[0] * j[1][0] + r[1] * j[1][1];
            let dg = j[1][0] * j[1][0] + j[1][1] * j[1][1] + r[0] * j[2][0] + r[1] * j[2][1];
            if dg <= 0.0 {
                break;
            }
            let step = g / dg;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let t = t.rem_euclid(2.0 * PI);
        (t, dist2(t).sqrt())
    }

    pub fn to_region(&self) -> IndicatorSet {
        match self {
            ClosedCurve::Circle { center, radius } => IndicatorSet::Ball {
                center: center.to_vec(),
                radius: *radius,
            },
            ClosedCurve::Ellipse { center, a, b } => IndicatorSet::Ellipsoid {
                center: center.to_vec(),
                semi_axes: vec![*a, *b],
            },
            ClosedCurve::Star { center, psi } => IndicatorSet::StarShaped {
                center: center.to_vec(),
                psi: psi.clone(),
            },
        }
    }

    pub fn bounding_radius(&self) -> f64 {
        match self {
            ClosedCurve::Circle { radius, .. } => *radius,
            ClosedCurve::Ellipse { a, b, .. } => a.max(*b),
            ClosedCurve::Star { psi, .. } => psi.max_value(),
        }
    }

    pub fn center(&self) -> [f64; 2] {
        match self {
            ClosedCurve::Circle { center, .. } | ClosedCurve::Ellipse { center, .. } | ClosedCurve::Star { center, .. } => {
                *center
            }
        }
    }
}

fn ellipse_jet(center: &[f64; 2], a: f64, b: f64, t: f64) -> CurveJet {
    let (s, c) = t.sin_cos();
    [
        [center[0] + a * c, center[1] + b * s],
        [-a * s, b * c],
        [-a * c, -b * s],
        [a * s, -b * c],
    ]
}

fn angular_third(psi: &SphereFunction, t: f64) -> f64 {
    match psi {
        SphereFunction::Fourier { cos, sin } => {
            let mut d3 = 0.0;
            for (k, c) in cos.iter().enumerate() {
                let kf = k as f64;
                d3 += c * kf.powi(3) * (kf * t).sin();
            }
            for (j, c) in sin.iter().enumerate() {
                let kf = (j + 1) as f64;
                d3 -= c * kf.powi(3) * (kf * t).cos();
            }
            d3
        }
        SphereFunction::Zonal { .. } => panic!("star curves use Fourier radial functions"),
    }
}

/// A hypersurface given through its geometry, with outward normals.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    Curve(ClosedCurve),
    Sphere { center: Vec<f64>, radius: f64 },
    Hyperplane { point: Vec<f64>, normal: Vec<f64> },
    /// Boundary of `{|(y_2, ..., y_N)| < radius}`, N in {2, 3}.
    Cylinder { dim: usize, radius: f64 },
    /// Pairwise disjoint components.
    Union(Vec<Surface>),
}

impl Surface {
    pub fn unit_sphere(dim: usize) -> Self {
        Surface::Sphere {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Surface::Curve(c) => c.validate(),
            Surface::Sphere { center, radius } => {
                if center.len() < 2 || !(*radius > 0.0) {
                    return Err(FracError::InvalidParameter("sphere needs dim >= 2 and radius > 0".into()));
                }
                Ok(())
            }
            Surface::Hyperplane { point, normal } => {
                if point.len() != normal.len() || !(dot(normal, normal) > 0.0) {
                    return Err(FracError::InvalidParameter("hyperplane normal must be nonzero".into()));
                }
                Ok(())
            }
            Surface::Cylinder { dim, radius } => {
                if !(*dim == 2 || *dim == 3) || !(*radius > 0.0) {
                    return Err(FracError::InvalidParameter("cylinder needs dim 2 or 3 and radius > 0".into()));
                }
                Ok(())
            }
            Surface::Union(parts) => {
                if parts.is_empty() {
                    return Err(FracError::InvalidParameter("empty surface union".into()));
                }
                let d = parts[0].dim();
                for p in parts {
                    p.validate()?;
                    if p.dim() != d {
                        return Err(FracError::InvalidParameter("mixed dimensions in union".into()));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Surface::Curve(_) => 2,
            Surface::Sphere { center, .. } => center.len(),
            Surface::Hyperplane { point, .. } => point.len(),
            Surface::Cylinder { dim, .. } => *dim,
            Surface::Union(parts) => parts.first().map(|p| p.dim()).unwrap_or(2),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Surface::Curve(_) | Surface::Sphere { .. } => true,
            Surface::Hyperplane { .. } | Surface::Cylinder { .. } => false,
            Surface::Union(parts) => parts.iter().all(|p| p.is_bounded()),
        }
    }

    /// Distance from `x` to the surface.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Surface::Curve(c) => c.locate(x).1,
            Surface::Sphere { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                (dot(&d, &d).sqrt() - radius).abs()
            }
            Surface::Hyperplane { point, normal } => {
                let d: Vec<f64> = x.iter().zip(point).map(|(a, b)| a - b).collect();
                dot(&d, normal).abs() / dot(normal, normal).sqrt()
            }
            Surface::Cylinder { radius, .. } => (dot(&x[1..], &x[1..]).sqrt() - radius).abs(),
            Surface::Union(parts) => parts.iter().map(|p| p.distance(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Index of the component carrying `x`, for unions.
    pub fn component_of(&self, x: &[f64]) -> usize {
        match self {
            Surface::Union(parts) => parts
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.distance(x).total_cmp(&b.1.distance(x)))
                .map(|(i, _)| i)
                .unwrap_or(0),
            _ => 0,
        }
    }

    pub fn outward_normal(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Surface::Curve(c) => c.normal(c.locate(x).0).to_vec(),
            Surface::Sphere { center, radius } => x.iter().zip(center).map(|(a, b)| (a - b) / radius).collect(),
            Surface::Hyperplane { normal, .. } => {
                let n = dot(normal, normal).sqrt();
                normal.iter().map(|v| v / n).collect()
            }
            Surface::Cylinder { .. } => {
                let mut v = x.to_vec();
                v[0] = 0.0;
                let n = dot(&v, &v).sqrt();
                v.iter().map(|c| c / n).collect()
            }
            Surface::Union(parts) => parts[self.component_of(x)].outward_normal(x),
        }
    }

    /// `n` deterministic sample points spread over the surface (over the
    /// bounded cross-section for cylinders, a unit patch for hyperplanes).
    pub fn sample_points(&self, n: usize) -> Vec<Vec<f64>> {
        match self {
            Surface::Curve(c) => (0..n).map(|i| c.point(2.0 * PI * i as f64 / n as f64).to_vec()).collect(),
            Surface::Sphere { center, radius } => {
                let dirs: Vec<Vec<f64>> = match center.len() {
                    2 => (0..n)
                        .map(|i| {
                            let t = 2.0 * PI * i as f64 / n as f64;
                            vec![t.cos(), t.sin()]
                        })
                        .collect(),
                    _ => fibonacci_sphere(n).iter().map(|p| p.to_vec()).collect(),
                };
                dirs.iter()
                    .map(|w| w.iter().zip(center).map(|(a, c)| c + radius * a).collect())
                    .collect()
            }
            Surface::Hyperplane { point, normal } => {
                // points along a direction orthogonal to the normal
                let mut t = vec![0.0; point.len()];
                let k = if normal[0].abs() < 0.9 { 0 } else { 1 };
                t[k] = 1.0;
                let nn = dot(normal, normal);
                let c = dot(&t, normal) / nn;
                let t: Vec<f64> = t.iter().zip(normal).map(|(a, b)| a - c * b).collect();
                let tn = dot(&t, &t).sqrt();
                (0..n)
                    .map(|i| {
                        let s = -1.0 + 2.0 * i as f64 / n.max(1) as f64;
                        point.iter().zip(&t).map(|(p, d)| p + s * d / tn).collect()
                    })
                    .collect()
            }
            Surface::Cylinder { dim, radius } => (0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    if *dim == 2 {
                        let side = if i % 2 == 0 { 1.0 } else { -1.0 };
                        vec![t, side * radius]
                    } else {
                        vec![0.3 * t, radius * t.cos(), radius * t.sin()]
                    }
                })
                .collect(),
            Surface::Union(parts) => {
                let k = parts.len();
                let mut out = Vec::with_capacity(n);
                for (j, p) in parts.iter().enumerate() {
                    let m = n / k + usize::from(j < n % k);
                    out.extend(p.sample_points(m));
                }
                out
            }
        }
    }

    /// The enclosed (or lower) solid set.
    pub fn to_region(&self) -> IndicatorSet {
        match self {
            Surface::Curve(c) => c.to_region(),
            Surface::Sphere { center, radius } => IndicatorSet::Ball {
                center: center.clone(),
                radius: *radius,
            },
            Surface::Hyperplane { point, normal } => {
                let n = dot(normal, normal).sqrt();
                IndicatorSet::HalfSpace {
                    point: point.clone(),
                    normal: normal.iter().map(|v| v / n).collect(),
                }
            }
            Surface::Cylinder { dim, radius } => IndicatorSet::Cylinder {
                dim: *dim,
                radius: *radius,
            },
            Surface::Union(parts) => IndicatorSet::union(parts.iter().map(|p| p.to_region()).collect()),
        }
    }

    /// The surface scaled by `lambda` about the origin.
    pub fn scaled(&self, lambda: f64) -> Surface {
        let sc = |v: &[f64]| v.iter().map(|x| x * lambda).collect::<Vec<f64>>();
        match self {
            Surface::Curve(ClosedCurve::Circle { center, radius }) => Surface::Curve(ClosedCurve::Circle {
                center: [center[0] * lambda, center[1] * lambda],
                radius: radius * lambda,
            }),
            Surface::Curve(ClosedCurve::Ellipse { center, a, b }) => Surface::Curve(ClosedCurve::Ellipse {
                center: [center[0] * lambda, center[1] * lambda],
                a: a * lambda,
                b: b * lambda,
            }),
            Surface::Curve(ClosedCurve::Star { center, psi }) => Surface::Curve(ClosedCurve::Star {
                center: [center[0] * lambda, center[1] * lambda],
                psi: psi.affine(lambda, 0.0),
            }),
            Surface::Sphere { center, radius } => Surface::Sphere {
                center: sc(center),
                radius: radius * lambda,
            },
            Surface::Hyperplane { point, normal } => Surface::Hyperplane {
                point: sc(point),
                normal: normal.clone(),
            },
            Surface::Cylinder { dim, radius } => Surface::Cylinder {
                dim: *dim,
                radius: radius * lambda,
            },
            Surface::Union(parts) => Surface::Union(parts.iter().map(|p| p.scaled(lambda)).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_jet_matches_finite_differences() {
        let c = ClosedCurve::Star {
            center: [0.1, -0.2],
            psi: SphereFunction::fourier(vec![1.0, 0.0, 0.1], vec![0.05, 0.0, 0.02]),
        };
        let t = 1.1;
        let h = 1e-5;
        let (a, b) = (c.jet(t - h), c.jet(t + h));
        let j = c.jet(t);
        for k in 0..3 {
            for i in 0..2 {
                let fd = (b[k][i] - a[k][i]) / (2.0 * h);
                assert!((j[k + 1][i] - fd).abs() < 1e-8, "order {} comp {}", k + 1, i);
            }
        }
    }

    #[test]
    fn locate_recovers_parameter() {
        let e = ClosedCurve::Ellipse {
            center: [0.0, 0.0],
            a: 2.0,
            b: 0.5,
        };
        let p = e.point(2.3);
        let (t, d) = e.locate(&p);
        assert!((t - 2.3).abs() < 1e-10 && d < 1e-12);
    }

    #[test]
    fn orientation_agrees_with_region() {
        let shapes = [
            Surface::Curve(ClosedCurve::Ellipse {
                center: [0.5, 0.0],
                a: 1.2,
                b: 0.8,
            }),
            Surface::unit_sphere(3),
            Surface::Cylinder { dim: 3, radius: 0.7 },
        ];
        for s in &shapes {
            let r = s.to_region();
            for x in s.sample_points(10) {
                let n = s.outward_normal(&x);
                let out: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a + 1e-6 * b).collect();
                let inn: Vec<f64> = x.iter().zip(&n).map(|(a, b)| a - 1e-6 * b).collect();
                assert!(!r.contains(&out) && r.contains(&inn));
            }
        }
    }
}
