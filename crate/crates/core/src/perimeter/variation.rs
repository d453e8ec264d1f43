use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::frac_perimeter;
use crate::error::{FracError, Result};
use crate::geometry::{ClosedCurve, IndicatorSet, SphereFunction, SphereGraph, Surface};
use crate::nmc::{evaluate_batch, nmc_boundary, nmc_sphere_graph, orthonormal_complement};
use crate::quadrature::{gauss_legendre, EvalResult, FracOrder, QuadSpec};

/// Both sides of the first-variation identity for a normal perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstVariation {
    /// Central difference of `P_alpha(E_t)` at `t = 0`.
    pub lhs: f64,
    pub lhs_err: f64,
    /// `(N - 1) int H_alpha v dV`.
    pub rhs: f64,
    pub rhs_err: f64,
    /// `int H_alpha v dV` without the dimensional factor.
    pub weighted_curvature: f64,
    /// Central difference of `|E_t|`.
    pub volume_rate: f64,
}

const SAMPLES_2D: usize = 256;
const MODES_2D: usize = 48;
const RHS_2D: usize = 64;
const NODES_3D: usize = 48;
const DEGREE_3D: usize = 24;
const RHS_3D: usize = 24;

type Field<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Moves the boundary of a star-shaped `E` by `t v` along the outward
/// normal (through a radial reparameterization, exact to first order) and
/// compares `d/dt P_alpha(E_t)` with `(N - 1) int H_alpha v dV`. In R^3 the
/// set must be zonal and `v` is read along one meridian.
pub fn first_variation_check(e: &IndicatorSet, v: Field, fo: &FracOrder, q: &QuadSpec, step: f64) -> Result<FirstVariation> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(FracError::InvalidParameter("step must be positive".into()));
    }
    let (center, psi) = match e {
        IndicatorSet::Ball { center, radius } => (center.clone(), SphereFunction::constant(center.len(), *radius)),
        IndicatorSet::StarShaped { center, psi } => (center.clone(), psi.clone()),
        _ => return Err(FracError::Unsupported("first variation of non star-shaped sets".into())),
    };
    if center.len() != fo.dim() {
        return Err(FracError::InvalidParameter("set and order disagree on the dimension".into()));
    }
    match &psi {
        SphereFunction::Fourier { cos, sin } => plane(&center, cos, sin, v, fo, q, step),
        SphereFunction::Zonal { axis, coeffs } => space(&center, axis, coeffs, v, fo, q, step),
    }
}

fn as_set(center: &[f64], psi: SphereFunction) -> IndicatorSet {
    let constant = match &psi {
        SphereFunction::Fourier { cos, sin } => cos.iter().skip(1).chain(sin).all(|c| *c == 0.0).then(|| cos[0]),
        SphereFunction::Zonal { coeffs, .. } => coeffs.iter().skip(1).all(|c| *c == 0.0).then(|| coeffs[0]),
    };
    match constant {
        Some(r) => IndicatorSet::Ball {
            center: center.to_vec(),
            radius: r,
        },
        None => IndicatorSet::StarShaped {
            center: center.to_vec(),
            psi,
        },
    }
}

fn difference(center: &[f64], plus: SphereFunction, minus: SphereFunction, fo: &FracOrder, q: &QuadSpec, step: f64) -> Result<(f64, f64)> {
    let p = frac_perimeter(&as_set(center, plus), fo, q)?.total;
    let m = frac_perimeter(&as_set(center, minus), fo, q)?.total;
    Ok(((p.value - m.value) / (2.0 * step), (p.total_err() + m.total_err()) / (2.0 * step)))
}

fn drop_zeros(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    c
}

#[allow(clippy::too_many_arguments)]
fn plane(center: &[f64], cos: &[f64], sin: &[f64], v: Field, fo: &FracOrder, q: &QuadSpec, step: f64) -> Result<FirstVariation> {
    let psi = SphereFunction::fourier(cos.to_vec(), sin.to_vec());
    let point = |t: f64| {
        let r = psi.angular(t).0;
        [center[0] + r * t.cos(), center[1] + r * t.sin()]
    };
    let speed = |t: f64| {
        let (p, d, _) = psi.angular(t);
        p.hypot(d)
    };
    // radial displacement giving normal displacement v
    let g: Vec<f64> = (0..SAMPLES_2D)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / SAMPLES_2D as f64;
            v(&point(t)) * speed(t) / psi.angular(t).0
        })
        .collect();
    let m = SAMPLES_2D as f64;
    let mut gc = vec![g.iter().sum::<f64>() / m];
    let mut gs = vec![];
    let floor = 1e-14 * gc[0].abs().max(1.0) * m;
    for j in 1..=MODES_2D {
        let (mut a, mut b) = (0.0, 0.0);
        for (k, gk) in g.iter().enumerate() {
            let (s, c) = (2.0 * PI * (j * k) as f64 / m).sin_cos();
            a += gk * c;
            b += gk * s;
        }
        // drop aliasing noise
        let clean = |x: f64| if x.abs() < floor { 0.0 } else { 2.0 * x / m };
        gc.push(clean(a));
        gs.push(clean(b));
    }
    let shifted = |sign: f64| {
        let n = gc.len();
        let mut c: Vec<f64> = cos.iter().cloned().chain(std::iter::repeat(0.0)).take(n.max(cos.len())).collect();
        let mut s: Vec<f64> = sin.iter().cloned().chain(std::iter::repeat(0.0)).take(gs.len().max(sin.len())).collect();
        for (ci, gi) in c.iter_mut().zip(&gc) {
            *ci += sign * step * gi;
        }
        for (si, gi) in s.iter_mut().zip(&gs) {
            *si += sign * step * gi;
        }
        SphereFunction::fourier(drop_zeros(c), drop_zeros(s))
    };
    let (plus, minus) = (shifted(1.0), shifted(-1.0));
    let area = |f: &SphereFunction| match f {
        SphereFunction::Fourier { cos, sin } => {
            PI * (cos[0] * cos[0] + 0.5 * cos.iter().skip(1).chain(sin).map(|c| c * c).sum::<f64>())
        }
        SphereFunction::Zonal { .. } => unreachable!(),
    };
    let volume_rate = (area(&plus) - area(&minus)) / (2.0 * step);
    let (lhs, lhs_err) = difference(center, plus, minus, fo, q, step)?;

    let surf = Surface::Curve(ClosedCurve::Star {
        center: [center[0], center[1]],
        psi: psi.clone(),
    });
    let ts: Vec<f64> = (0..RHS_2D).map(|k| 2.0 * PI * k as f64 / RHS_2D as f64).collect();
    let hs = evaluate_batch(&ts, |&t| nmc_boundary(&surf, &point(t), fo, q));
    let mut acc = EvalResult::exact(0.0);
    for (t, h) in ts.iter().zip(hs) {
        let w = 2.0 * PI / RHS_2D as f64 * v(&point(*t)) * speed(*t);
        acc = acc.add(h?.scale(w));
    }
    Ok(finish(lhs, lhs_err, acc, volume_rate, fo))
}

fn finish(lhs: f64, lhs_err: f64, weighted: EvalResult, volume_rate: f64, fo: &FracOrder) -> FirstVariation {
    let factor = fo.dim() as f64 - 1.0;
    FirstVariation {
        lhs,
        lhs_err,
        rhs: factor * weighted.value,
        rhs_err: factor * weighted.total_err(),
        weighted_curvature: weighted.value,
        volume_rate,
    }
}

fn legendre(n: usize, z: f64) -> Vec<f64> {
    let mut p = vec![1.0, z];
    for l in 2..=n {
        let lf = l as f64;
        p.push(((2.0 * lf - 1.0) * z * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf);
    }
    p.truncate(n + 1);
    p
}

#[allow(clippy::too_many_arguments)]
fn space(center: &[f64], axis: &[f64; 3], coeffs: &[f64], v: Field, fo: &FracOrder, q: &QuadSpec, step: f64) -> Result<FirstVariation> {
    let psi = SphereFunction::zonal(*axis, coeffs.to_vec())?;
    let e = orthonormal_complement(axis)[0].clone();
    let dir = |z: f64| -> Vec<f64> {
        let s = (1.0 - z * z).max(0.0).sqrt();
        (0..3).map(|i| s * e[i] + z * axis[i]).collect()
    };
    let point = |z: f64| -> Vec<f64> {
        let r = psi.zonal_profile(z).0;
        dir(z).iter().zip(center).map(|(w, c)| c + r * w).collect()
    };
    let stretch = |z: f64| {
        let (p, d) = psi.zonal_profile(z);
        (p * p + (1.0 - z * z) * d * d).sqrt()
    };
    let rule = gauss_legendre(NODES_3D);
    let mut proj = vec![0.0; DEGREE_3D + 1];
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let g = v(&point(z)) * stretch(z) / psi.zonal_profile(z).0;
        for (l, pl) in legendre(DEGREE_3D, z).iter().enumerate() {
            proj[l] += (2.0 * l as f64 + 1.0) / 2.0 * w * g * pl;
        }
    }
    for c in proj.iter_mut() {
        if c.abs() < 1e-14 * proj_scale(coeffs) {
            *c = 0.0;
        }
    }
    let shifted = |sign: f64| -> Result<SphereFunction> {
        let n = proj.len().max(coeffs.len());
        let mut c: Vec<f64> = coeffs.iter().cloned().chain(std::iter::repeat(0.0)).take(n).collect();
        for (ci, pi) in c.iter_mut().zip(&proj) {
            *ci += sign * step * pi;
        }
        SphereFunction::zonal(*axis, drop_zeros(c))
    };
    let (plus, minus) = (shifted(1.0)?, shifted(-1.0)?);
    let volume = |f: &SphereFunction| {
        2.0 * PI / 3.0 * rule.integrate(-1.0, 1.0, |z| f.zonal_profile(z).0.powi(3))
    };
    let volume_rate = (volume(&plus) - volume(&minus)) / (2.0 * step);
    let (lhs, lhs_err) = difference(center, plus, minus, fo, q, step)?;

    let sgr = SphereGraph::new(psi.clone())?;
    let gl = gauss_legendre(RHS_3D);
    let nodes: Vec<(f64, f64)> = gl.nodes.iter().cloned().zip(gl.weights.iter().cloned()).collect();
    let hs = evaluate_batch(&nodes, |&(z, _)| nmc_sphere_graph(&sgr, &dir(z), fo, q));
    let mut acc = EvalResult::exact(0.0);
    for (&(z, w), h) in nodes.iter().zip(hs) {
        let weight = 2.0 * PI * w * v(&point(z)) * psi.zonal_profile(z).0 * stretch(z);
        acc = acc.add(h?.scale(weight));
    }
    Ok(finish(lhs, lhs_err, acc, volume_rate, fo))
}

fn proj_scale(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()))
}
