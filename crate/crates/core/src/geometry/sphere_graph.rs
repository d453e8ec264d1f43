use serde::{Deserialize, Serialize};

use super::dot;
use crate::error::{FracError, Result};
use crate::quadrature::gauss_legendre;

/// A real function on the unit sphere S^{N-1}, N in {2, 3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case", deny_unknown_fields)]
pub enum SphereFunction {
    /// On S^1: `sum_k cos[k] cos(k t) + sum_k sin[k-1] sin(k t)`.
    Fourier { cos: Vec<f64>, sin: Vec<f64> },
    /// On S^2: `sum_l coeffs[l] P_l(axis . w)` with Legendre polynomials.
    Zonal { axis: [f64; 3], coeffs: Vec<f64> },
}

/// `(P_l(z), P_l'(z))` for `l = 0..n`.
fn legendre_all(n: usize, z: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = z;
        dp[1] = 1.0;
    }
    for l in 2..=n {
        let lf = l as f64;
        p[l] = ((2.0 * lf - 1.0) * z * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        // P_l' = l P_{l-1} + z P_{l-1}'
        dp[l] = lf * p[l - 1] + z * dp[l - 1];
    }
    (p, dp)
}

fn zonal_second(coeffs: &[f64], z: f64) -> f64 {
    let (mut p1, mut dp1, mut ddp1) = (z, 1.0, 0.0);
    let mut p0 = 1.0;
    let mut acc = 0.0;
    for (l, c) in coeffs.iter().enumerate().skip(2) {
        let lf = l as f64;
        let p = ((2.0 * lf - 1.0) * z * p1 - (lf - 1.0) * p0) / lf;
        let dp = lf * p1 + z * dp1;
        // P_l'' = (l + 1) P_{l-1}' + z P_{l-1}''
        let ddp = (lf + 1.0) * dp1 + z * ddp1;
        acc += c * ddp;
        (p0, p1, dp1, ddp1) = (p1, p, dp, ddp);
    }
    acc
}

impl SphereFunction {
    pub fn constant(dim: usize, value: f64) -> Self {
        match dim {
            2 => SphereFunction::Fourier {
                cos: vec![value],
                sin: vec![],
            },
            _ => SphereFunction::Zonal {
                axis: [0.0, 0.0, 1.0],
                coeffs: vec![value],
            },
        }
    }

    pub fn fourier(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        SphereFunction::Fourier { cos, sin }
    }

    pub fn zonal(axis: [f64; 3], coeffs: Vec<f64>) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(n > 0.0) {
            return Err(FracError::InvalidParameter("zonal axis must be nonzero".into()));
        }
        Ok(SphereFunction::Zonal {
            axis: [axis[0] / n, axis[1] / n, axis[2] / n],
            coeffs,
        })
    }

    /// Highest mode or Legendre degree present.
    pub fn degree(&self) -> usize {
        match self {
            SphereFunction::Fourier { cos, sin } => cos.len().saturating_sub(1).max(sin.len()),
            SphereFunction::Zonal { coeffs, .. } => coeffs.len().saturating_sub(1),
        }
    }

    /// Highest mode whose curvature contribution `|c_k| k^2` exceeds `1e-6`
    /// of the mean: modes below cannot create new extrema along a circle.
    pub fn effective_degree(&self) -> usize {
        let last = |c: &[f64], shift: usize, mean: f64| {
            c.iter()
                .enumerate()
                .filter(|(k, x)| x.abs() * ((k + shift) as f64).powi(2) > 1e-6 * mean.abs())
                .map(|(k, _)| k + shift)
                .max()
                .unwrap_or(0)
        };
        match self {
            SphereFunction::Fourier { cos, sin } => {
                let m = cos.first().copied().unwrap_or(0.0);
                last(cos, 0, m).max(last(sin, 1, m))
            }
            SphereFunction::Zonal { coeffs, .. } => last(coeffs, 0, coeffs.first().copied().unwrap_or(0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SphereFunction::Fourier { .. } => 2,
            SphereFunction::Zonal { .. } => 3,
        }
    }

    /// Value and first two angular derivatives on S^1.
    pub fn angular(&self, t: f64) -> (f64, f64, f64) {
        match self {
            SphereFunction::Fourier { cos, sin } => {
                let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
                for (k, c) in cos.iter().enumerate() {
                    let kf = k as f64;
                    let (s, co) = (kf * t).sin_cos();
                    v += c * co;
                    d1 -= c * kf * s;
                    d2 -= c * kf * kf * co;
                }
                for (j, c) in sin.iter().enumerate() {
                    let kf = (j + 1) as f64;
                    let (s, co) = (kf * t).sin_cos();
                    v += c * s;
                    d1 += c * kf * co;
                    d2 -= c * kf * kf * s;
                }
                (v, d1, d2)
            }
            SphereFunction::Zonal { .. } => panic!("angular form is only defined on S^1"),
        }
    }

    /// For zonal functions `f(z)` with `z = axis . w`: `(f(z), f'(z))`.
    pub fn zonal_profile(&self, z: f64) -> (f64, f64) {
        match self {
            SphereFunction::Zonal { coeffs, .. } => {
                let (p, dp) = legendre_all(coeffs.len().saturating_sub(1), z);
                let v = coeffs.iter().zip(&p).map(|(c, x)| c * x).sum();
                let d = coeffs.iter().zip(&dp).map(|(c, x)| c * x).sum();
                (v, d)
            }
            SphereFunction::Fourier { .. } => panic!("zonal profile of a Fourier series"),
        }
    }

    /// `f(z + d) - f(z) - f'(z) d` for a zonal function, from the integral
    /// form of the Taylor remainder.
    pub fn zonal_remainder(&self, z: f64, d: f64) -> f64 {
        let SphereFunction::Zonal { coeffs, .. } = self else {
            panic!("zonal remainder of a Fourier series")
        };
        let n = coeffs.len() / 2 + 1;
        d * d * gauss_legendre(n).integrate(0.0, 1.0, |r| (1.0 - r) * zonal_second(coeffs, z + r * d))
    }

    /// `f(z1) - f(z0)` for a zonal function, as `(z1 - z0)` times the mean
    /// of `f'` (Gauss-Legendre, exact for the polynomial `f'`).
    pub fn zonal_difference(&self, z0: f64, z1: f64) -> f64 {
        let SphereFunction::Zonal { coeffs, .. } = self else {
            panic!("zonal difference of a Fourier series")
        };
        let n = coeffs.len() / 2 + 1;
        let dz = z1 - z0;
        dz * gauss_legendre(n).integrate(0.0, 1.0, |r| self.zonal_profile(z0 + r * dz).1)
    }

    /// `psi(t) - psi(t0)` on S^1 through product formulas, accurate for
    /// nearby angles.
    pub fn angular_difference(&self, t0: f64, t: f64) -> f64 {
        match self {
            SphereFunction::Fourier { cos, sin } => {
                let (m, h) = (0.5 * (t + t0), 0.5 * (t - t0));
                let mut acc = 0.0;
                for (k, c) in cos.iter().enumerate().skip(1) {
                    let kf = k as f64;
                    acc -= 2.0 * c * (kf * m).sin() * (kf * h).sin();
                }
                for (j, c) in sin.iter().enumerate() {
                    let kf = (j + 1) as f64;
                    acc += 2.0 * c * (kf * m).cos() * (kf * h).sin();
                }
                acc
            }
            SphereFunction::Zonal { .. } => panic!("angular form is only defined on S^1"),
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        match self {
            SphereFunction::Fourier { .. } => self.angular(w[1].atan2(w[0])).0,
            SphereFunction::Zonal { axis, coeffs } => {
                let z = dot(axis, w).clamp(-1.0, 1.0);
                let (p, _) = legendre_all(coeffs.len().saturating_sub(1), z);
                coeffs.iter().zip(&p).map(|(c, pl)| c * pl).sum()
            }
        }
    }

    /// Tangential gradient at `w`.
    pub fn grad(&self, w: &[f64]) -> Vec<f64> {
        match self {
            SphereFunction::Fourier { .. } => {
                let d = self.angular(w[1].atan2(w[0])).1;
                vec![-d * w[1], d * w[0]]
            }
            SphereFunction::Zonal { axis, coeffs } => {
                let z = dot(axis, w).clamp(-1.0, 1.0);
                let (_, dp) = legendre_all(coeffs.len().saturating_sub(1), z);
                let f1: f64 = coeffs.iter().zip(&dp).map(|(c, d)| c * d).sum();
                (0..3).map(|i| f1 * (axis[i] - z * w[i])).collect()
            }
        }
    }

    fn mean_and_oscillation(&self) -> (f64, f64) {
        match self {
            SphereFunction::Fourier { cos, sin } => {
                let mean = cos.first().copied().unwrap_or(0.0);
                let osc = cos.iter().skip(1).chain(sin).map(|c| c.abs()).sum();
                (mean, osc)
            }
            SphereFunction::Zonal { coeffs, .. } => {
                let mean = coeffs.first().copied().unwrap_or(0.0);
                (mean, coeffs.iter().skip(1).map(|c| c.abs()).sum())
            }
        }
    }

    /// Upper bound `mean + sum |non-constant coefficients|` (|P_l| <= 1).
    pub fn max_value(&self) -> f64 {
        let (m, o) = self.mean_and_oscillation();
        m + o
    }

    /// Lower bound, the counterpart of [`max_value`](Self::max_value).
    pub fn min_value(&self) -> f64 {
        let (m, o) = self.mean_and_oscillation();
        m - o
    }

    /// Sup norm of the non-constant part bound, plus `|mean|`.
    pub fn sup_bound(&self) -> f64 {
        let (m, o) = self.mean_and_oscillation();
        m.abs() + o
    }

    /// Minimum over a dense sample.
    pub fn sampled_min(&self) -> f64 {
        match self {
            SphereFunction::Fourier { .. } => (0..4096)
                .map(|i| self.angular(2.0 * std::f64::consts::PI * i as f64 / 4096.0).0)
                .fold(f64::INFINITY, f64::min),
            SphereFunction::Zonal { .. } => crate::quadrature::fibonacci_sphere(4096)
                .iter()
                .map(|w| self.value(w))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `psi(-w) = psi(w)`: no odd Fourier modes or odd Legendre degrees.
    pub fn is_even(&self) -> bool {
        match self {
            SphereFunction::Fourier { cos, sin } => {
                cos.iter().enumerate().filter(|(k, _)| k % 2 == 1).all(|(_, c)| *c == 0.0)
                    && sin.iter().enumerate().filter(|(j, _)| j % 2 == 0).all(|(_, c)| *c == 0.0)
            }
            SphereFunction::Zonal { coeffs, .. } => {
                coeffs.iter().enumerate().filter(|(l, _)| l % 2 == 1).all(|(_, c)| *c == 0.0)
            }
        }
    }

    /// `lambda * self + shift`.
    pub fn affine(&self, lambda: f64, shift: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            SphereFunction::Fourier { cos, sin } => {
                cos.iter_mut().chain(sin.iter_mut()).for_each(|c| *c *= lambda);
                if cos.is_empty() {
                    cos.push(0.0);
                }
                cos[0] += shift;
            }
            SphereFunction::Zonal { coeffs, .. } => {
                coeffs.iter_mut().for_each(|c| *c *= lambda);
                if coeffs.is_empty() {
                    coeffs.push(0.0);
                }
                coeffs[0] += shift;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SphereFunction::Fourier { cos, sin } => cos.iter().chain(sin).all(|c| c.is_finite()),
            SphereFunction::Zonal { axis, coeffs } => axis.iter().chain(coeffs).all(|c| c.is_finite()),
        }
    }
}

/// A radial graph `Sigma_psi = {psi(w) w : w in S^{N-1}}` over the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGraph {
    psi: SphereFunction,
}

impl SphereGraph {
    pub fn new(psi: SphereFunction) -> Result<Self> {
        if !psi.is_finite() {
            return Err(FracError::InvalidParameter("non-finite sphere-graph coefficient".into()));
        }
        let m = psi.sampled_min();
        if !(m > 0.0) {
            return Err(FracError::InvalidParameter(format!("radial function must be positive (min {m})")));
        }
        Ok(Self { psi })
    }

    /// `psi = 1 + phi` with `|phi|_inf < 1`.
    pub fn perturbation(phi: &SphereFunction) -> Result<Self> {
        if phi.sup_bound() >= 1.0 {
            return Err(FracError::InvalidParameter("perturbation must satisfy |phi| < 1".into()));
        }
        Self::new(phi.affine(1.0, 1.0))
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn psi(&self) -> &SphereFunction {
        &self.psi
    }

    pub fn is_even(&self) -> bool {
        self.psi.is_even()
    }
}
