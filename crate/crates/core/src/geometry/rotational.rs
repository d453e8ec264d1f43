use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::quadrature::{gauss_legendre, integrate, Tolerance};

/// A plane curve `s -> (x(s), y(s))`, `y > 0`, generating a surface of
/// revolution about the first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationalProfile {
    /// Delaunay unduloid family in Kenmotsu's arclength form.
    Kenmotsu { b: f64, h: f64 },
    Cylinder { radius: f64 },
    /// Meridian of a round sphere, `s` in `(-pi R / 2, pi R / 2)`.
    Sphere { radius: f64 },
}

/// Position and derivatives of a profile curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
    pub ddx: f64,
    pub ddy: f64,
}

fn kenmotsu_dx(b: f64, h: f64, r: f64) -> f64 {
    let s = (h * r).sin();
    (1.0 + b * s) / (1.0 + b * b + 2.0 * b * s).sqrt()
}

/// `x_b(s) = int_0^s (1 + b sin(hr)) / sqrt(1 + b^2 + 2b sin(hr)) dr` using
/// periodicity in `s` with period `2 pi / h`.
fn kenmotsu_x(b: f64, h: f64, s: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-14, 1e-15);
    let period = 2.0 * PI / h;
    let cycles = (s / period).floor();
    let rem = s - cycles * period;
    let per = if cycles != 0.0 {
        kenmotsu_period_length(b, h)?
    } else {
        0.0
    };
    // The integrand has a kink-free but steep dip near sin(hr) = -1 when b -> 1;
    // splitting at the quarter periods keeps the adaptive rule well conditioned.
    let quarter = period / 4.0;
    let mut pts = vec![0.0];
    let mut q = quarter;
    while q < rem {
        pts.push(q);
        q += quarter;
    }
    pts.push(rem);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += integrate(|r| kenmotsu_dx(b, h, r), w[0], w[1], tol)?.value;
    }
    Ok(cycles * per + acc)
}

fn kenmotsu_period_length(b: f64, h: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-14, 1e-15);
    let period = 2.0 * PI / h;
    let mut acc = 0.0;
    for k in 0..4 {
        let a = k as f64 * period / 4.0;
        acc += integrate(|r| kenmotsu_dx(b, h, r), a, a + period / 4.0, tol)?.value;
    }
    Ok(acc)
}

fn check_kenmotsu(b: f64, h: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&b) || !(h > 0.0 && h.is_finite()) {
        return Err(FracError::InvalidParameter(format!(
            "Kenmotsu parameters need 0 <= b <= 1 and h > 0 (got b = {b}, h = {h})"
        )));
    }
    Ok(())
}

/// The Kenmotsu point `(x_b(s), y_b(s))`.
pub fn kenmotsu_profile(b: f64, h: f64, s: f64) -> Result<(f64, f64)> {
    check_kenmotsu(b, h)?;
    let y = (1.0 + b * b + 2.0 * b * (h * s).sin()).max(0.0).sqrt() / h;
    Ok((kenmotsu_x(b, h, s)?, y))
}

impl RotationalProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RotationalProfile::Kenmotsu { b, h } => check_kenmotsu(b, h),
            RotationalProfile::Cylinder { radius } | RotationalProfile::Sphere { radius } => {
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(FracError::InvalidParameter(format!("radius {radius} must be positive")))
                }
            }
        }
    }

    pub fn jet(&self, s: f64) -> Result<ProfileJet> {
        self.validate()?;
        Ok(match *self {
            RotationalProfile::Kenmotsu { b, h } => {
                let (sn, cs) = (h * s).sin_cos();
                let d = 1.0 + b * b + 2.0 * b * sn;
                let sd = d.max(0.0).sqrt();
                let d32 = d.max(0.0).powf(1.5);
                ProfileJet {
                    x: kenmotsu_x(b, h, s)?,
                    y: sd / h,
                    dx: (1.0 + b * sn) / sd,
                    dy: b * cs / sd,
                    ddx: b * b * h * cs * (b + sn) / d32,
                    ddy: -b * h * (sn * d + b * cs * cs) / d32,
                }
            }
            RotationalProfile::Cylinder { radius } => ProfileJet {
                x: s,
                y: radius,
                dx: 1.0,
                dy: 0.0,
                ddx: 0.0,
                ddy: 0.0,
            },
            RotationalProfile::Sphere { radius } => {
                let (sn, cs) = (s / radius).sin_cos();
                ProfileJet {
                    x: radius * sn,
                    y: radius * cs,
                    dx: cs,
                    dy: -sn,
                    ddx: -sn / radius,
                    ddy: -cs / radius,
                }
            }
        })
    }
}

/// The unduloid `Sigma_b` written as a periodic radial graph
/// `phi_b = y_b o x_b^{-1}` over the axis.
#[derive(Debug, Clone)]
pub struct UnduloidGraph {
    b: f64,
    h: f64,
    period: f64,
    knots_s: Arc<Vec<f64>>,
    knots_x: Arc<Vec<f64>>,
    interp_err: f64,
}

impl PartialEq for UnduloidGraph {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b && self.h == other.h
    }
}

const KNOTS: usize = 2048;

/// Inverts `x_b` by a monotone cubic Hermite interpolant on 2048 samples per
/// period, polished by Newton steps on the exact `x_b`.
pub fn profile_to_graph(b: f64, h: f64) -> Result<UnduloidGraph> {
    check_kenmotsu(b, h)?;
    if b >= 1.0 {
        return Err(FracError::NotInvertible(format!(
            "x_b' vanishes where sin(hs) = -1 when b = {b}"
        )));
    }
    let s_period = 2.0 * PI / h;
    let hs = s_period / KNOTS as f64;
    let gl = gauss_legendre(20);
    let mut knots_s = Vec::with_capacity(KNOTS + 1);
    let mut knots_x = Vec::with_capacity(KNOTS + 1);
    let mut x = 0.0;
    for i in 0..=KNOTS {
        let s = i as f64 * hs;
        knots_s.push(s);
        knots_x.push(x);
        x += gl.integrate(s, s + hs, |r| kenmotsu_dx(b, h, r));
    }
    let period = knots_x[KNOTS];
    let mut g = UnduloidGraph {
        b,
        h,
        period,
        knots_s: Arc::new(knots_s),
        knots_x: Arc::new(knots_x),
        interp_err: 0.0,
    };
    // Interpolation error: largest raw Hermite miss at cell midpoints.
    let mut worst = 0.0f64;
    for i in (0..KNOTS).step_by(7) {
        let t = 0.5 * (g.knots_x[i] + g.knots_x[i + 1]);
        let raw = g.hermite(t);
        let exact = g.invert(t);
        worst = worst.max((raw - exact).abs());
    }
    g.interp_err = worst;
    Ok(g)
}

impl UnduloidGraph {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Largest observed miss of the raw monotone interpolant in `s`.
    pub fn interpolation_error(&self) -> f64 {
        self.interp_err
    }

    fn cell(&self, t: f64) -> usize {
        match self.knots_x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(KNOTS - 1),
            Err(i) => i.saturating_sub(1).min(KNOTS - 1),
        }
    }

    fn hermite(&self, t: f64) -> f64 {
        let i = self.cell(t);
        let (x0, x1) = (self.knots_x[i], self.knots_x[i + 1]);
        let (s0, s1) = (self.knots_s[i], self.knots_s[i + 1]);
        // ds/dx = 1 / x_b'(s), positive for b < 1
        let m0 = 1.0 / kenmotsu_dx(self.b, self.h, s0);
        let m1 = 1.0 / kenmotsu_dx(self.b, self.h, s1);
        let dx = x1 - x0;
        let u = (t - x0) / dx;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * s0 + h10 * dx * m0 + h01 * s1 + h11 * dx * m1
    }

    /// `x_b^{-1}(t)` for `t` in one period.
    fn invert(&self, t: f64) -> f64 {
        let i = self.cell(t);
        let gl = gauss_legendre(20);
        let mut s = self.hermite(t);
        for _ in 0..4 {
            let xs = self.knots_x[i] + gl.integrate(self.knots_s[i], s, |r| kenmotsu_dx(self.b, self.h, r));
            let step = (xs - t) / kenmotsu_dx(self.b, self.h, s);
            s -= step;
            if step.abs() < 1e-16 * (1.0 + s.abs()) {
                break;
            }
        }
        s
    }

    /// `(phi, phi', phi'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let tt = t - (t / self.period).floor() * self.period;
        let s = self.invert(tt);
        let b = self.b;
        let h = self.h;
        let (sn, cs) = (h * s).sin_cos();
        let d = 1.0 + b * b + 2.0 * b * sn;
        let sd = d.sqrt();
        let d32 = d.powf(1.5);
        let (y, dx, dy) = (sd / h, (1.0 + b * sn) / sd, b * cs / sd);
        let ddx = b * b * h * cs * (b + sn) / d32;
        let ddy = -b * h * (sn * d + b * cs * cs) / d32;
        (y, dy / dx, (ddy * dx - dy * ddx) / dx.powi(3))
    }
}

/// Classical mean curvature of the surface of revolution, negated so that
/// spheres of radius R give `+1/R` and cylinders `+1/(2R)`.
pub fn classical_mc_rotational(p: &RotationalProfile, s: f64) -> Result<f64> {
    let j = p.jet(s)?;
    if !(j.y > 0.0) {
        return Err(FracError::DegenerateProfile(format!("y({s}) = {} <= 0", j.y)));
    }
    Ok(-0.5 * (-j.dx + j.y * (j.dx * j.ddy - j.ddx * j.dy)) / j.y)
}

/// Arclength defect `|x'^2 + y'^2 - 1|`.
pub fn arclength_defect(p: &RotationalProfile, s: f64) -> Result<f64> {
    let j = p.jet(s)?;
    Ok((j.dx * j.dx + j.dy * j.dy - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_cylinder_at_b_zero() {
        for s in [0.0, 0.7, 3.0] {
            let (x, y) = kenmotsu_profile(0.0, 2.0, s).unwrap();
            assert!((x - s).abs() < 1e-13 && (y - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tangent_sphere_radius_at_b_one() {
        let h = 1.5;
        let (_, y) = kenmotsu_profile(1.0, h, PI / (2.0 * h)).unwrap();
        assert!((y - 2.0 / h).abs() < 1e-14);
        let (_, y0) = kenmotsu_profile(0.4, h, 0.0).unwrap();
        assert!((y0 - (1.0 + 0.16f64).sqrt() / h).abs() < 1e-15);
    }

    #[test]
    fn arclength_identity() {
        for b in [0.0, 0.3, 0.7, 0.99] {
            let p = RotationalProfile::Kenmotsu { b, h: 1.0 };
            for i in 0..40 {
                assert!(arclength_defect(&p, -3.0 + 0.17 * i as f64).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let p = RotationalProfile::Kenmotsu { b: 0.6, h: 1.3 };
        let s = 0.9;
        let e = 1e-5;
        let (a, c) = (p.jet(s - e).unwrap(), p.jet(s + e).unwrap());
        let j = p.jet(s).unwrap();
        assert!((j.ddx - (c.dx - a.dx) / (2.0 * e)).abs() < 1e-8);
        assert!((j.ddy - (c.dy - a.dy) / (2.0 * e)).abs() < 1e-8);
        assert!((j.dx - (c.x - a.x) / (2.0 * e)).abs() < 1e-8);
    }

    #[test]
    fn classical_values() {
        let cyl = RotationalProfile::Cylinder { radius: 0.5 };
        assert!((classical_mc_rotational(&cyl, 0.3).unwrap() - 1.0).abs() < 1e-15);
        let sph = RotationalProfile::Sphere { radius: 2.0 };
        assert!((classical_mc_rotational(&sph, 0.4).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn graph_extremes_and_period() {
        let g = profile_to_graph(0.5, 1.0).unwrap();
        let n = 4000;
        let vals: Vec<f64> = (0..n).map(|i| g.eval(g.period() * i as f64 / n as f64).0).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(0.0, f64::max);
        assert!((lo - 0.5).abs() < 1e-5 && (hi - 1.5).abs() < 1e-5, "{lo} {hi}");
        for t in [0.1, 1.7, 4.0] {
            assert!((g.eval(t).0 - g.eval(t + g.period()).0).abs() < 1e-12);
        }
        assert!(g.interpolation_error() < 1e-8);
    }

    #[test]
    fn graph_matches_parametric_form() {
        let g = profile_to_graph(0.3, 1.0).unwrap();
        for s in [0.2, 1.1, 2.9, 5.0] {
            let (x, y) = kenmotsu_profile(0.3, 1.0, s).unwrap();
            assert!((g.eval(x).0 - y).abs() < 1e-12);
        }
    }

    #[test]
    fn b_one_is_not_invertible() {
        assert!(matches!(profile_to_graph(1.0, 1.0), Err(FracError::NotInvertible(_))));
    }
}
