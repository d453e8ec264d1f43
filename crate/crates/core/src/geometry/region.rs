use std::f64::consts::PI;

use super::dot;
use super::lattice::Lattice;
use super::sphere_graph::SphereFunction;
use crate::error::{FracError, Result};

/// A solid set `E` in R^N, queried through its indicator contrast
/// `tau_E = 1_{R^N \ E} - 1_E` and through the segments it cuts on rays.
#[derive(Debug, Clone, PartialEq)]
pub enum IndicatorSet {
    Empty {
        dim: usize,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{y : (y - point) . normal < 0}`, normal pointing out of the set.
    HalfSpace {
        point: Vec<f64>,
        normal: Vec<f64>,
    },
    /// Axis-aligned ellipsoid.
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
    /// Convex polytope `{y : n_i . y < d_i}` with unit normals.
    Polytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// `{y : |(y_2, ..., y_N)| < radius}`: a band for N = 2, a round
    /// cylinder about the first axis for N = 3.
    Cylinder {
        dim: usize,
        radius: f64,
    },
    /// `{center + rho w : rho < psi(w)}`.
    StarShaped {
        center: Vec<f64>,
        psi: SphereFunction,
    },
    /// Copies of a star-shaped set centred on `spacing * L`, restricted to
    /// `|spacing * p| <= cutoff` when cutting rays.
    PeriodicSpheres {
        lattice: Lattice,
        psi: SphereFunction,
        cutoff: f64,
    },
    Union {
        parts: Vec<IndicatorSet>,
    },
    Intersection {
        parts: Vec<IndicatorSet>,
    },
    Complement {
        inner: Box<IndicatorSet>,
    },
}

/// Sorted, disjoint `(t0, t1)` intervals with `0 <= t0 < t1 <= inf`.
pub type Segments = Vec<(f64, f64)>;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Roots of `a t^2 + 2 b t + c` as an interval clipped to `t >= 0`.
fn quadratic_interval(a: f64, b: f64, c: f64) -> Segments {
    let disc = b * b - a * c;
    if disc <= 0.0 || a <= 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // stable roots
    let q = -(b + b.signum() * sq);
    let (mut t0, mut t1) = if q != 0.0 { (q / a, c / q) } else { (-sq / a, sq / a) };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    clip(vec![(t0, t1)])
}

fn clip(segs: Segments) -> Segments {
    segs.into_iter()
        .filter(|&(_, b)| b > 0.0)
        .map(|(a, b)| (a.max(0.0), b))
        .filter(|&(a, b)| b > a)
        .collect()
}

fn union_segments(mut all: Segments) -> Segments {
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Segments = Vec::new();
    for s in all {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 => last.1 = last.1.max(s.1),
            _ => out.push(s),
        }
    }
    out
}

fn intersect_segments(a: &Segments, b: &Segments) -> Segments {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn complement_segments(a: &Segments) -> Segments {
    let mut out = Vec::new();
    let mut start = 0.0;
    for &(lo, hi) in a {
        if lo > start {
            out.push((start, lo));
        }
        start = hi;
    }
    if start < f64::INFINITY {
        out.push((start, f64::INFINITY));
    }
    out
}

impl IndicatorSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.len() < 2 {
            return Err(FracError::InvalidParameter(format!("ball radius {radius} must be positive")));
        }
        Ok(IndicatorSet::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        IndicatorSet::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn half_space(point: Vec<f64>, normal: Vec<f64>) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0) || point.len() != normal.len() {
            return Err(FracError::InvalidParameter("half-space normal must be nonzero".into()));
        }
        Ok(IndicatorSet::HalfSpace {
            point,
            normal: normal.iter().map(|x| x / n).collect(),
        })
    }

    /// Axis-aligned cube `[c - h, c + h]^N`.
    pub fn cube(center: Vec<f64>, half_side: f64) -> Result<Self> {
        if !(half_side > 0.0) {
            return Err(FracError::InvalidParameter("cube side must be positive".into()));
        }
        let n = center.len();
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                offsets.push(s * center[i] + half_side);
                normals.push(e);
            }
        }
        Ok(IndicatorSet::Polytope { normals, offsets })
    }

    pub fn union(parts: Vec<IndicatorSet>) -> Self {
        IndicatorSet::Union { parts }
    }

    pub fn intersection(parts: Vec<IndicatorSet>) -> Self {
        IndicatorSet::Intersection { parts }
    }

    pub fn complement(self) -> Self {
        IndicatorSet::Complement { inner: Box::new(self) }
    }

    pub fn dim(&self) -> usize {
        match self {
            IndicatorSet::Empty { dim } | IndicatorSet::Cylinder { dim, .. } => *dim,
            IndicatorSet::Ball { center, .. }
            | IndicatorSet::Ellipsoid { center, .. }
            | IndicatorSet::StarShaped { center, .. } => center.len(),
            IndicatorSet::HalfSpace { point, .. } => point.len(),
            IndicatorSet::Polytope { normals, .. } => normals[0].len(),
            IndicatorSet::PeriodicSpheres { lattice, .. } => lattice.dim(),
            IndicatorSet::Union { parts } | IndicatorSet::Intersection { parts } => {
                parts.first().map(|p| p.dim()).unwrap_or(2)
            }
            IndicatorSet::Complement { inner } => inner.dim(),
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            IndicatorSet::Empty { .. } => false,
            IndicatorSet::Ball { center, radius } => norm(&sub(y, center)) < *radius,
            IndicatorSet::HalfSpace { point, normal } => dot(&sub(y, point), normal) < 0.0,
            IndicatorSet::Ellipsoid { center, semi_axes } => ellipsoid_level(y, center, semi_axes) < 1.0,
            IndicatorSet::Polytope { normals, offsets } => {
                normals.iter().zip(offsets).all(|(n, d)| dot(n, y) < *d)
            }
            IndicatorSet::Cylinder { radius, .. } => norm(&y[1..]) < *radius,
            IndicatorSet::StarShaped { center, psi } => star_level(y, center, psi) < 0.0,
            IndicatorSet::PeriodicSpheres { lattice, psi, .. } => {
                periodic_images_near(lattice, psi, y).iter().any(|c| star_level(y, c, psi) < 0.0)
            }
            IndicatorSet::Union { parts } => parts.iter().any(|p| p.contains(y)),
            IndicatorSet::Intersection { parts } => parts.iter().all(|p| p.contains(y)),
            IndicatorSet::Complement { inner } => !inner.contains(y),
        }
    }

    /// A lower bound for the distance from `y` to the boundary (exact for
    /// balls, half-spaces and cylinders).
    pub fn boundary_distance(&self, y: &[f64]) -> f64 {
        match self {
            IndicatorSet::Empty { .. } => f64::INFINITY,
            IndicatorSet::Ball { center, radius } => (norm(&sub(y, center)) - radius).abs(),
            IndicatorSet::HalfSpace { point, normal } => dot(&sub(y, point), normal).abs(),
            IndicatorSet::Ellipsoid { center, semi_axes } => {
                let amin = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
                (ellipsoid_level(y, center, semi_axes) - 1.0).abs() * amin
            }
            IndicatorSet::Polytope { normals, offsets } => {
                let inside = self.contains(y);
                let gaps = normals.iter().zip(offsets).map(|(n, d)| d - dot(n, y));
                if inside {
                    gaps.fold(f64::INFINITY, f64::min)
                } else {
                    // distance to the nearest violated face plane
                    gaps.filter(|g| *g <= 0.0).map(|g| -g).fold(0.0, f64::max)
                }
            }
            IndicatorSet::Cylinder { radius, .. } => (norm(&y[1..]) - radius).abs(),
            IndicatorSet::StarShaped { center, psi } => star_distance(y, center, psi),
            IndicatorSet::PeriodicSpheres { lattice, psi, .. } => periodic_images_near(lattice, psi, y)
                .iter()
                .map(|c| star_distance(y, c, psi))
                .fold(f64::INFINITY, f64::min),
            IndicatorSet::Union { parts } | IndicatorSet::Intersection { parts } => {
                parts.iter().map(|p| p.boundary_distance(y)).fold(f64::INFINITY, f64::min)
            }
            IndicatorSet::Complement { inner } => inner.boundary_distance(y),
        }
    }

    /// Inside intervals of the ray `origin + t dir`, `t >= 0`, `|dir| = 1`.
    pub fn ray_segments(&self, origin: &[f64], dir: &[f64]) -> Segments {
        match self {
            IndicatorSet::Empty { .. } => vec![],
            IndicatorSet::Ball { center, radius } => {
                let o = sub(origin, center);
                quadratic_interval(dot(dir, dir), dot(&o, dir), dot(&o, &o) - radius * radius)
            }
            IndicatorSet::HalfSpace { point, normal } => {
                let s0 = dot(&sub(origin, point), normal);
                let ds = dot(dir, normal);
                if ds == 0.0 {
                    return if s0 < 0.0 { vec![(0.0, f64::INFINITY)] } else { vec![] };
                }
                let t = -s0 / ds;
                if ds < 0.0 {
                    clip(vec![(t, f64::INFINITY)])
                } else {
                    clip(vec![(f64::NEG_INFINITY, t)])
                }
            }
            IndicatorSet::Ellipsoid { center, semi_axes } => {
                let o: Vec<f64> = sub(origin, center).iter().zip(semi_axes).map(|(x, a)| x / a).collect();
                let d: Vec<f64> = dir.iter().zip(semi_axes).map(|(x, a)| x / a).collect();
                quadratic_interval(dot(&d, &d), dot(&o, &d), dot(&o, &o) - 1.0)
            }
            IndicatorSet::Polytope { normals, offsets } => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (n, d) in normals.iter().zip(offsets) {
                    let gap = d - dot(n, origin);
                    let rate = dot(n, dir);
                    if rate == 0.0 {
                        if gap <= 0.0 {
                            return vec![];
                        }
                    } else if rate > 0.0 {
                        hi = hi.min(gap / rate);
                    } else {
                        lo = lo.max(gap / rate);
                    }
                }
                if hi > lo {
                    clip(vec![(lo, hi)])
                } else {
                    vec![]
                }
            }
            IndicatorSet::Cylinder { radius, .. } => {
                let o = &origin[1..];
                let d = &dir[1..];
                let a = dot(d, d);
                if a == 0.0 {
                    return if norm(o) < *radius { vec![(0.0, f64::INFINITY)] } else { vec![] };
                }
                quadratic_interval(a, dot(o, d), dot(o, o) - radius * radius)
            }
            IndicatorSet::StarShaped { center, psi } => star_ray(origin, dir, center, psi),
            IndicatorSet::PeriodicSpheres { lattice, psi, cutoff } => {
                let mut centers = vec![vec![0.0; lattice.dim()]];
                for p in lattice.points_within(cutoff / lattice.spacing()) {
                    centers.push(p.iter().map(|x| x * lattice.spacing()).collect());
                }
                let reach = psi.max_value();
                let all = centers
                    .iter()
                    .filter(|c| {
                        // skip images the ray cannot reach
                        let o = sub(origin, c);
                        let along = dot(&o, dir);
                        let perp2 = dot(&o, &o) - along * along;
                        perp2 < reach * reach && (along < reach)
                    })
                    .flat_map(|c| star_ray(origin, dir, c, psi))
                    .collect();
                union_segments(all)
            }
            IndicatorSet::Union { parts } => {
                union_segments(parts.iter().flat_map(|p| p.ray_segments(origin, dir)).collect())
            }
            IndicatorSet::Intersection { parts } => {
                let mut acc = vec![(0.0, f64::INFINITY)];
                for p in parts {
                    acc = intersect_segments(&acc, &p.ray_segments(origin, dir));
                }
                acc
            }
            IndicatorSet::Complement { inner } => complement_segments(&inner.ray_segments(origin, dir)),
        }
    }

    /// Centre and radius of a ball containing the set, if bounded.
    pub fn bounding_ball(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            IndicatorSet::Empty { dim } => Some((vec![0.0; *dim], 0.0)),
            IndicatorSet::Ball { center, radius } => Some((center.clone(), *radius)),
            IndicatorSet::Ellipsoid { center, semi_axes } => {
                Some((center.clone(), semi_axes.iter().cloned().fold(0.0, f64::max)))
            }
            IndicatorSet::Polytope { normals, offsets } => polytope_bounds(normals, offsets),
            IndicatorSet::StarShaped { center, psi } => Some((center.clone(), psi.max_value())),
            IndicatorSet::HalfSpace { .. } | IndicatorSet::Cylinder { .. } | IndicatorSet::PeriodicSpheres { .. } => {
                None
            }
            IndicatorSet::Union { parts } => {
                let balls: Option<Vec<_>> = parts.iter().map(|p| p.bounding_ball()).collect();
                let balls = balls?;
                let dim = self.dim();
                let mut c = vec![0.0; dim];
                for (bc, _) in &balls {
                    for (ci, x) in c.iter_mut().zip(bc) {
                        *ci += x / balls.len() as f64;
                    }
                }
                let r = balls.iter().map(|(bc, br)| norm(&sub(bc, &c)) + br).fold(0.0, f64::max);
                Some((c, r))
            }
            IndicatorSet::Intersection { parts } => parts
                .iter()
                .filter_map(|p| p.bounding_ball())
                .min_by(|a, b| a.1.total_cmp(&b.1)),
            IndicatorSet::Complement { .. } => None,
        }
    }

    /// Planar sets: offsets `z` (along `n = (-dir_y, dir_x)`, from
    /// `origin`) of the boundary tangent lines parallel to `dir`. Line
    /// integrals over `z` are singular there.
    pub fn tangent_offsets(&self, origin: &[f64], dir: &[f64]) -> Vec<f64> {
        if self.dim() != 2 {
            return vec![];
        }
        let n = [-dir[1], dir[0]];
        let along = |c: &[f64]| (c[0] - origin[0]) * n[0] + (c[1] - origin[1]) * n[1];
        match self {
            IndicatorSet::Ball { center, radius } => vec![along(center) - radius, along(center) + radius],
            IndicatorSet::Ellipsoid { center, semi_axes } => {
                let h = (semi_axes[0] * n[0]).hypot(semi_axes[1] * n[1]);
                vec![along(center) - h, along(center) + h]
            }
            IndicatorSet::StarShaped { center, psi } => {
                let samples = 16 * (psi.effective_degree() + 2);
                // c'(t) x dir for c(t) = center + psi(t) (cos t, sin t)
                let cross = |t: f64| {
                    let (p, p1, _) = psi.angular(t);
                    let (st, ct) = t.sin_cos();
                    (p1 * ct - p * st) * dir[1] - (p1 * st + p * ct) * dir[0]
                };
                let h = 2.0 * PI / samples as f64;
                let mut out = vec![];
                let mut prev = (0.0, cross(0.0));
                for i in 1..=samples {
                    let t = i as f64 * h;
                    let c = cross(t);
                    if (c < 0.0) != (prev.1 < 0.0) {
                        let root = bracketed_root(&cross, prev.0, prev.1, t, c);
                        let r = psi.angular(root).0;
                        out.push(along(&[center[0] + r * root.cos(), center[1] + r * root.sin()]));
                    }
                    prev = (t, c);
                }
                out
            }
            IndicatorSet::Union { parts } | IndicatorSet::Intersection { parts } => {
                parts.iter().flat_map(|p| p.tangent_offsets(origin, dir)).collect()
            }
            IndicatorSet::Complement { inner } => inner.tangent_offsets(origin, dir),
            _ => vec![],
        }
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, x: &[f64]) -> Option<Vec<f64>> {
        let unit = |v: Vec<f64>| {
            let n = norm(&v);
            (n > 0.0).then(|| v.iter().map(|c| c / n).collect::<Vec<f64>>())
        };
        match self {
            IndicatorSet::Empty { .. } => None,
            IndicatorSet::Ball { center, .. } => unit(sub(x, center)),
            IndicatorSet::HalfSpace { normal, .. } => Some(normal.clone()),
            IndicatorSet::Ellipsoid { center, semi_axes } => {
                unit(sub(x, center).iter().zip(semi_axes).map(|(v, a)| v / (a * a)).collect())
            }
            IndicatorSet::Polytope { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .min_by(|a, b| (a.1 - dot(a.0, x)).abs().total_cmp(&(b.1 - dot(b.0, x)).abs()))
                .map(|(n, _)| n.clone()),
            IndicatorSet::Cylinder { .. } => {
                let mut v = x.to_vec();
                v[0] = 0.0;
                unit(v)
            }
            IndicatorSet::StarShaped { center, psi } => star_normal(x, center, psi),
            IndicatorSet::PeriodicSpheres { lattice, psi, .. } => {
                let centers = periodic_images_near(lattice, psi, x);
                let c = centers
                    .iter()
                    .min_by(|a, b| star_distance(x, a, psi).total_cmp(&star_distance(x, b, psi)))?;
                star_normal(x, c, psi)
            }
            IndicatorSet::Union { parts } | IndicatorSet::Intersection { parts } => parts
                .iter()
                .min_by(|a, b| a.boundary_distance(x).total_cmp(&b.boundary_distance(x)))
                .and_then(|p| p.outward_normal(x)),
            IndicatorSet::Complement { inner } => inner.outward_normal(x).map(|n| n.iter().map(|c| -c).collect()),
        }
    }
}

fn ellipsoid_level(y: &[f64], center: &[f64], semi_axes: &[f64]) -> f64 {
    y.iter()
        .zip(center)
        .zip(semi_axes)
        .map(|((v, c), a)| ((v - c) / a).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn polytope_bounds(normals: &[Vec<f64>], offsets: &[f64]) -> Option<(Vec<f64>, f64)> {
    // Bounded only when every coordinate direction is capped; used for cubes.
    let n = normals[0].len();
    let mut lo = vec![f64::NEG_INFINITY; n];
    let mut hi = vec![f64::INFINITY; n];
    for (nv, d) in normals.iter().zip(offsets) {
        let nz: Vec<usize> = (0..n).filter(|&i| nv[i] != 0.0).collect();
        if nz.len() == 1 {
            let i = nz[0];
            if nv[i] > 0.0 {
                hi[i] = hi[i].min(d / nv[i]);
            } else {
                lo[i] = lo[i].max(d / nv[i]);
            }
        }
    }
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return None;
    }
    let c: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let r = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a) * (b - a)).sum::<f64>().sqrt();
    Some((c, r))
}

fn star_level(y: &[f64], center: &[f64], psi: &SphereFunction) -> f64 {
    let v = sub(y, center);
    let r = norm(&v);
    if r == 0.0 {
        return -psi.min_value();
    }
    let w: Vec<f64> = v.iter().map(|x| x / r).collect();
    r - psi.value(&w)
}

fn star_distance(y: &[f64], center: &[f64], psi: &SphereFunction) -> f64 {
    // radial gap scaled by the slope of the boundary
    let v = sub(y, center);
    let r = norm(&v);
    if r == 0.0 {
        return psi.min_value();
    }
    let w: Vec<f64> = v.iter().map(|x| x / r).collect();
    let g = psi.grad(&w);
    let p = psi.value(&w);
    (r - p).abs() / (1.0 + dot(&g, &g) / (p * p)).sqrt()
}

fn star_normal(x: &[f64], center: &[f64], psi: &SphereFunction) -> Option<Vec<f64>> {
    let v = sub(x, center);
    let r = norm(&v);
    if r == 0.0 {
        return None;
    }
    let w: Vec<f64> = v.iter().map(|c| c / r).collect();
    let p = psi.value(&w);
    let g = psi.grad(&w);
    // gradient of |y| - psi(y / |y|) at the boundary
    let n: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - gi / p).collect();
    let m = norm(&n);
    Some(n.iter().map(|c| c / m).collect())
}

fn star_ray(origin: &[f64], dir: &[f64], center: &[f64], psi: &SphereFunction) -> Segments {
    clip(star_line(origin, dir, center, psi))
}

/// Inside intervals of the whole line `origin + t dir`. Within the plane of
/// the line and the centre, the line is `r = b / sin(beta)` and the inside
/// is `b < F(beta) = psi(w(beta)) sin(beta)`, solved on the monotone pieces
/// of `F`.
fn star_line(origin: &[f64], dir: &[f64], center: &[f64], psi: &SphereFunction) -> Segments {
    let o = sub(origin, center);
    let s0 = dot(&o, dir);
    let perp: Vec<f64> = o.iter().zip(dir).map(|(x, d)| x - s0 * d).collect();
    let b = norm(&perp);
    let reach = psi.max_value();
    if b >= reach {
        return vec![];
    }
    if b <= 1e-14 * reach {
        let back: Vec<f64> = dir.iter().map(|d| -d).collect();
        return vec![(-psi.value(&back) - s0, psi.value(dir) - s0)];
    }
    let n: Vec<f64> = perp.iter().map(|x| x / b).collect();
    // psi along the great circle w(beta) = cos(beta) dir + sin(beta) n, with d/d beta
    let jet = |beta: f64| -> (f64, f64) {
        match psi {
            SphereFunction::Fourier { .. } => {
                let turn = (dir[0] * n[1] - dir[1] * n[0]).signum();
                let (p, p1, _) = psi.angular(dir[1].atan2(dir[0]) + turn * beta);
                (p, turn * p1)
            }
            SphereFunction::Zonal { axis, .. } => {
                let (ad, an) = (dot(axis, dir), dot(axis, &n));
                let (sb, cb) = beta.sin_cos();
                let (p, p1) = psi.zonal_profile((cb * ad + sb * an).clamp(-1.0, 1.0));
                (p, p1 * (cb * an - sb * ad))
            }
        }
    };
    let f = |beta: f64| jet(beta).0 * beta.sin();
    let df = |beta: f64| {
        let (sb, cb) = beta.sin_cos();
        let (p, dp) = jet(beta);
        dp * sb + p * cb
    };
    let samples = 8 * (psi.effective_degree() + 2);
    let h = PI / samples as f64;
    let mut knots = vec![0.0];
    let mut prev = (0.0, df(0.0));
    for i in 1..=samples {
        let beta = i as f64 * h;
        let d = df(beta);
        if (d < 0.0) != (prev.1 < 0.0) && d != 0.0 {
            knots.push(bracketed_root(&df, prev.0, prev.1, beta, d));
        }
        prev = (beta, d);
    }
    knots.push(PI);
    let level = |beta: f64| f(beta) - b;
    let mut roots = vec![];
    let mut left = (knots[0], level(knots[0]));
    for &k in &knots[1..] {
        let right = (k, level(k));
        if (left.1 < 0.0) != (right.1 < 0.0) {
            roots.push(bracketed_root(&level, left.0, left.1, right.0, right.1));
        }
        left = right;
    }
    let mut out: Segments = roots
        .chunks_exact(2)
        .map(|p| (b / p[1].tan() - s0, b / p[0].tan() - s0))
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// Illinois variant of regula falsi on a sign-changing bracket.
fn bracketed_root<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut ga: f64, mut b: f64, mut gb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..100 {
        let m = if ga != gb { (a * gb - b * ga) / (gb - ga) } else { 0.5 * (a + b) };
        let m = if m > a.min(b) && m < a.max(b) { m } else { 0.5 * (a + b) };
        if m == a || m == b || (b - a).abs() <= 4.0 * f64::EPSILON * m.abs().max(1e-300) {
            return m;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            gb = gm;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

fn periodic_images_near(lattice: &Lattice, psi: &SphereFunction, y: &[f64]) -> Vec<Vec<f64>> {
    // lattice centres within reach of y
    let r = lattice.spacing();
    let reach = psi.max_value() * 1.000001;
    let mut out = Vec::new();
    for p in lattice.nearby_points(y) {
        let c: Vec<f64> = p.iter().map(|x| x * r).collect();
        if norm(&sub(y, &c)) < reach + 1e-9 {
            out.push(c);
        }
    }
    if out.is_empty() {
        out.push(vec![0.0; y.len()]);
    }
    out
}

/// `tau_E(y)`: `+1` outside, `-1` inside.
pub fn tau_eval(set: &IndicatorSet, y: &[f64]) -> Result<f64> {
    let d = set.boundary_distance(y);
    if d < 1e-12 {
        return Err(FracError::OnBoundary(d));
    }
    Ok(if set.contains(y) { -1.0 } else { 1.0 })
}

/// The periodic union `S_phi + r L` of perturbed unit spheres; rays are cut
/// by images within `cutoff` of the origin.
pub fn sphere_lattice_surface(lattice: &Lattice, phi: &SphereFunction, cutoff: f64) -> Result<IndicatorSet> {
    if lattice.dim() != phi.dim() {
        return Err(FracError::InvalidParameter("lattice and sphere dimensions differ".into()));
    }
    lattice.check_disjoint(phi.max_value())?;
    Ok(IndicatorSet::PeriodicSpheres {
        lattice: lattice.clone(),
        psi: phi.clone(),
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_balls() -> IndicatorSet {
        IndicatorSet::union(vec![
            IndicatorSet::unit_ball(2),
            IndicatorSet::ball(vec![4.0, 0.0], 1.0).unwrap(),
        ])
    }

    #[test]
    fn tau_signs() {
        let b = IndicatorSet::unit_ball(3);
        assert_eq!(tau_eval(&b, &[0.0, 0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(tau_eval(&b, &[2.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(tau_eval(&b, &[1.0, 0.0, 0.0]), Err(FracError::OnBoundary(_))));
        let u = two_balls();
        assert_eq!(tau_eval(&u, &[0.2, 0.1]).unwrap(), -1.0);
        assert_eq!(tau_eval(&u, &[4.2, -0.3]).unwrap(), -1.0);
        assert_eq!(tau_eval(&u, &[2.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn ray_through_two_balls() {
        let s = two_balls().ray_segments(&[-3.0, 0.0], &[1.0, 0.0]);
        assert_eq!(s.len(), 2);
        assert!((s[0].0 - 2.0).abs() < 1e-12 && (s[0].1 - 4.0).abs() < 1e-12);
        assert!((s[1].0 - 6.0).abs() < 1e-12 && (s[1].1 - 8.0).abs() < 1e-12);
        let c = two_balls().complement().ray_segments(&[-3.0, 0.0], &[1.0, 0.0]);
        assert_eq!(c.len(), 3);
        assert_eq!(c[2].1, f64::INFINITY);
    }

    #[test]
    fn cube_and_ellipse_segments() {
        let cube = IndicatorSet::cube(vec![0.0, 0.0], 1.0).unwrap();
        let s = cube.ray_segments(&[0.0, 0.0], &[std::f64::consts::FRAC_1_SQRT_2; 2]);
        assert!((s[0].1 - 2f64.sqrt()).abs() < 1e-12);
        let e = IndicatorSet::Ellipsoid {
            center: vec![0.0, 0.0],
            semi_axes: vec![2.0, 1.0],
        };
        let s = e.ray_segments(&[-5.0, 0.0], &[1.0, 0.0]);
        assert!((s[0].0 - 3.0).abs() < 1e-12 && (s[0].1 - 7.0).abs() < 1e-12);
    }

    #[test]
    fn star_shaped_circle_matches_ball() {
        let psi = SphereFunction::constant(2, 1.0);
        let star = IndicatorSet::StarShaped {
            center: vec![0.0, 0.0],
            psi,
        };
        let s = star.ray_segments(&[1.0, 0.0], &[-0.6, 0.8]);
        let b = IndicatorSet::unit_ball(2).ray_segments(&[1.0, 0.0], &[-0.6, 0.8]);
        assert_eq!(s.len(), 1);
        assert!((s[0].1 - b[0].1).abs() < 1e-12, "{s:?} {b:?}");
    }

    #[test]
    fn normals_point_outward() {
        let sets = [
            IndicatorSet::unit_ball(2),
            IndicatorSet::Ellipsoid {
                center: vec![0.0, 0.0],
                semi_axes: vec![1.5, 0.7],
            },
            IndicatorSet::StarShaped {
                center: vec![0.0, 0.0],
                psi: SphereFunction::fourier(vec![1.0, 0.0, 0.2], vec![0.0, 0.1]),
            },
        ];
        for set in &sets {
            for i in 0..12 {
                let th = i as f64 * 0.5;
                let w = [th.cos(), th.sin()];
                let segs = set.ray_segments(&[0.0, 0.0], &w);
                let x = [segs[0].1 * w[0], segs[0].1 * w[1]];
                let n = set.outward_normal(&x).unwrap();
                let out = [x[0] + 1e-6 * n[0], x[1] + 1e-6 * n[1]];
                let inn = [x[0] - 1e-6 * n[0], x[1] - 1e-6 * n[1]];
                assert!(!set.contains(&out) && set.contains(&inn));
            }
        }
    }

    #[test]
    fn lattice_overlap_is_rejected() {
        let l = Lattice::axis(2, 1.5).unwrap();
        let phi = SphereFunction::constant(2, 1.0);
        assert!(matches!(sphere_lattice_surface(&l, &phi, 20.0), Err(FracError::Overlap(_))));
        let l = Lattice::axis(2, 3.0).unwrap();
        let set = sphere_lattice_surface(&l, &phi, 20.0).unwrap();
        assert_eq!(tau_eval(&set, &[6.0, 0.5]).unwrap(), -1.0);
        assert_eq!(tau_eval(&set, &[4.5, 0.0]).unwrap(), 1.0);
        let s = set.ray_segments(&[-1.5, 0.0], &[1.0, 0.0]);
        assert!((s[0].0 - 0.5).abs() < 1e-9 && (s[1].0 - 3.5).abs() < 1e-9);
    }
}
