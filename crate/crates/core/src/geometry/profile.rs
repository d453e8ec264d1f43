use std::f64::consts::PI;

use super::rotational::UnduloidGraph;
use crate::error::{FracError, Result};

/// A smooth function on the line, used as graph height or slab radius.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile1d {
    /// `sum_k cos[k] cos(2 pi k x / period) + sum_k sin[k-1] sin(2 pi k x / period)`.
    Trig { period: f64, cos: Vec<f64>, sin: Vec<f64> },
    Linear { slope: f64, intercept: f64 },
    /// `base + amplitude exp(-x^2 / (2 width^2))`.
    Gaussian { base: f64, amplitude: f64, width: f64 },
    Unduloid(UnduloidGraph),
}

/// Behaviour of a profile away from any compact set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarField {
    Periodic(f64),
    /// `u(x) - (slope x + intercept)` decays faster than any power.
    Affine { slope: f64, intercept: f64 },
}

impl Profile1d {
    pub fn constant(c: f64) -> Self {
        Profile1d::Trig {
            period: 2.0 * PI,
            cos: vec![c],
            sin: vec![],
        }
    }

    pub fn cosine(mean: f64, amplitude: f64, wavenumber: f64) -> Result<Self> {
        if !(wavenumber > 0.0) {
            return Err(FracError::InvalidParameter("wavenumber must be positive".into()));
        }
        Ok(Profile1d::Trig {
            period: 2.0 * PI / wavenumber,
            cos: vec![mean, amplitude],
            sin: vec![],
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(FracError::InvalidParameter(what.to_string()));
        match self {
            Profile1d::Trig { period, cos, sin } => {
                if !(*period > 0.0 && period.is_finite()) {
                    return bad("period must be positive");
                }
                if cos.iter().chain(sin).any(|c| !c.is_finite()) {
                    return bad("non-finite Fourier coefficient");
                }
            }
            Profile1d::Linear { slope, intercept } => {
                if !slope.is_finite() || !intercept.is_finite() {
                    return bad("non-finite linear profile");
                }
            }
            Profile1d::Gaussian { base, amplitude, width } => {
                if !(*width > 0.0) || !base.is_finite() || !amplitude.is_finite() {
                    return bad("gaussian width must be positive");
                }
            }
            Profile1d::Unduloid(_) => {}
        }
        Ok(())
    }

    /// `(u, u', u'')` at `x`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Profile1d::Trig { period, cos, sin } => {
                let w = 2.0 * PI / period;
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for (k, c) in cos.iter().enumerate() {
                    let kw = k as f64 * w;
                    let (s, co) = (kw * x).sin_cos();
                    v += c * co;
                    d1 -= c * kw * s;
                    d2 -= c * kw * kw * co;
                }
                for (j, c) in sin.iter().enumerate() {
                    let kw = (j + 1) as f64 * w;
                    let (s, co) = (kw * x).sin_cos();
                    v += c * s;
                    d1 += c * kw * co;
                    d2 -= c * kw * kw * s;
                }
                (v, d1, d2)
            }
            Profile1d::Linear { slope, intercept } => (slope * x + intercept, *slope, 0.0),
            Profile1d::Gaussian { base, amplitude, width } => {
                let z = x / width;
                let e = (-0.5 * z * z).exp();
                (
                    base + amplitude * e,
                    -amplitude * z * e / width,
                    amplitude * (z * z - 1.0) * e / (width * width),
                )
            }
            Profile1d::Unduloid(g) => g.eval(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).0
    }

    /// `u(x + t) - u(x)` with relative accuracy kept for small `t`.
    pub fn increment(&self, x: f64, t: f64) -> f64 {
        match self {
            Profile1d::Trig { period, cos, sin } => {
                let w = 2.0 * PI / period;
                let mut acc = 0.0;
                for (k, c) in cos.iter().enumerate().skip(1) {
                    let kw = k as f64 * w;
                    acc -= 2.0 * c * (kw * (x + 0.5 * t)).sin() * (0.5 * kw * t).sin();
                }
                for (j, c) in sin.iter().enumerate() {
                    let kw = (j + 1) as f64 * w;
                    acc += 2.0 * c * (kw * (x + 0.5 * t)).cos() * (0.5 * kw * t).sin();
                }
                acc
            }
            Profile1d::Linear { slope, .. } => slope * t,
            Profile1d::Gaussian { amplitude, width, .. } => {
                let s = 2.0 * width * width;
                amplitude * (-x * x / s).exp() * (-t * (2.0 * x + t) / s).exp_m1()
            }
            Profile1d::Unduloid(g) => g.eval(x + t).0 - g.eval(x).0,
        }
    }

    pub fn far_field(&self) -> FarField {
        match self {
            Profile1d::Trig { period, .. } => FarField::Periodic(*period),
            Profile1d::Unduloid(g) => FarField::Periodic(g.period()),
            Profile1d::Linear { slope, intercept } => FarField::Affine {
                slope: *slope,
                intercept: *intercept,
            },
            Profile1d::Gaussian { base, .. } => FarField::Affine {
                slope: 0.0,
                intercept: *base,
            },
        }
    }

    /// Half-width of the window outside which the profile equals its
    /// affine far field to double precision (zero when exact everywhere).
    pub fn core_radius(&self) -> f64 {
        match self {
            Profile1d::Gaussian { width, amplitude, .. } if *amplitude != 0.0 => 9.0 * width,
            _ => 0.0,
        }
    }

    /// Representative sample window: one period or the core.
    fn sample_window(&self) -> (f64, f64) {
        match self.far_field() {
            FarField::Periodic(t) => (0.0, t),
            FarField::Affine { .. } => {
                let r = self.core_radius().max(1.0);
                (-r, r)
            }
        }
    }

    pub fn sampled_min(&self) -> f64 {
        let (a, b) = self.sample_window();
        let tail = match self.far_field() {
            FarField::Affine { slope, .. } if slope != 0.0 => f64::NEG_INFINITY,
            FarField::Affine { intercept, .. } => intercept,
            FarField::Periodic(_) => f64::INFINITY,
        };
        (0..=2048)
            .map(|i| self.value(a + (b - a) * i as f64 / 2048.0))
            .fold(tail, f64::min)
    }

    pub fn sup_slope(&self) -> f64 {
        let (a, b) = self.sample_window();
        (0..=2048)
            .map(|i| self.jet(a + (b - a) * i as f64 / 2048.0).1.abs())
            .fold(0.0, f64::max)
    }

    /// Smallest sampled constant `C` with `|u'(x) - u'(y)| <= C |x - y|^beta`
    /// on the sample grid; a guardrail against under-resolved or rough input.
    pub fn holder_constant(&self, beta: f64) -> f64 {
        let (a, b) = self.sample_window();
        let n = 256;
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let d: Vec<f64> = xs.iter().map(|&x| self.jet(x).1).collect();
        let mut c = 0.0f64;
        for i in 0..xs.len() {
            for j in (i + 1)..xs.len().min(i + 32) {
                c = c.max((d[i] - d[j]).abs() / (xs[j] - xs[i]).powf(beta));
            }
        }
        c
    }
}

/// Subgraph `E_u = {(x, t) : t < u(x)}` in R^2.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanGraph {
    u: Profile1d,
}

impl EuclideanGraph {
    pub fn new(u: Profile1d) -> Result<Self> {
        u.validate()?;
        Ok(Self { u })
    }

    pub fn profile(&self) -> &Profile1d {
        &self.u
    }

    pub fn dim(&self) -> usize {
        2
    }

    /// Hölder seed check of the gradient with exponent `beta > alpha`.
    pub fn check_regularity(&self, beta: f64, bound: f64) -> Result<()> {
        let c = self.u.holder_constant(beta);
        if !c.is_finite() || c > bound {
            return Err(FracError::IntegrabilityFailure(format!(
                "sampled C^(1,{beta}) constant {c:e} exceeds {bound:e}"
            )));
        }
        Ok(())
    }

    /// The same graph scaled by `lambda` about the origin.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let u = match &self.u {
            Profile1d::Trig { period, cos, sin } => Profile1d::Trig {
                period: period * lambda,
                cos: cos.iter().map(|c| c * lambda).collect(),
                sin: sin.iter().map(|c| c * lambda).collect(),
            },
            Profile1d::Linear { slope, intercept } => Profile1d::Linear {
                slope: *slope,
                intercept: intercept * lambda,
            },
            Profile1d::Gaussian { base, amplitude, width } => Profile1d::Gaussian {
                base: base * lambda,
                amplitude: amplitude * lambda,
                width: width * lambda,
            },
            Profile1d::Unduloid(_) => return Err(FracError::Unsupported("scaling an unduloid graph".into())),
        };
        Self::new(u)
    }
}

/// Slab-type set `E_u = {(s, z) in R x R^n : |z| < u(s)}`, `n` in {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabGraph {
    u: Profile1d,
    n: usize,
}

impl SlabGraph {
    pub fn new(u: Profile1d, n: usize) -> Result<Self> {
        u.validate()?;
        if !(n == 1 || n == 2) {
            return Err(FracError::Unsupported(format!("slab codimension n = {n} (supported: 1, 2)")));
        }
        if matches!(u.far_field(), FarField::Affine { slope, .. } if slope != 0.0) {
            return Err(FracError::InvalidParameter("slab radius must stay positive; linear growth is excluded".into()));
        }
        let m = u.sampled_min();
        if !(m > 0.0) {
            return Err(FracError::InvalidParameter(format!("slab radius must be positive (min {m})")));
        }
        Ok(Self { u, n })
    }

    pub fn profile(&self) -> &Profile1d {
        &self.u
    }

    pub fn codim(&self) -> usize {
        self.n
    }

    /// Ambient dimension `1 + n`.
    pub fn dim(&self) -> usize {
        1 + self.n
    }
}
