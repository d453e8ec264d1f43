use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::geometry::{IndicatorSet, Segments};
use crate::quadrature::{integrate_with_err, EvalResult, Tolerance};

const PANELS: usize = 8;

pub(crate) fn quad<F: FnMut(f64) -> Result<f64>>(mut f: F, pts: &[f64], tol: Tolerance) -> Result<EvalResult> {
    integrate_with_err(|x| Ok((f(x)?, 0.0)), pts, tol)
}

/// Intervals of the whole line `point + s dir` lying in `set`, with
/// infinite ends where the set is unbounded.
pub(crate) fn line_segments(set: &IndicatorSet, point: &[f64], dir: &[f64]) -> Segments {
    let back: Vec<f64> = dir.iter().map(|d| -d).collect();
    let mut all: Segments = set.ray_segments(point, &back).into_iter().map(|(a, b)| (-b, -a)).collect();
    all.extend(set.ray_segments(point, dir));
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Segments = Vec::with_capacity(all.len());
    for s in all {
        match out.last_mut() {
            Some(last) if s.0 <= last.1 => last.1 = last.1.max(s.1),
            _ => out.push(s),
        }
    }
    out
}

/// Gaps of sorted segments on the whole line.
pub(crate) fn line_complement(segs: &Segments) -> Segments {
    let mut out = Vec::with_capacity(segs.len() + 1);
    let mut start = f64::NEG_INFINITY;
    for &(lo, hi) in segs {
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

/// `int_I int_J |s - t|^(-1 - alpha) ds dt` for intervals meeting at most
/// in an endpoint.
pub(crate) fn pair_weight(i: (f64, f64), j: (f64, f64), alpha: f64) -> Result<f64> {
    let slack = |x: f64| 1e-12 * (1.0 + if x.is_finite() { x.abs() } else { 0.0 });
    let ((a, b), (c, d)) = if i.1 <= j.0 + slack(j.0) {
        (i, j)
    } else if j.1 <= i.0 + slack(i.0) {
        (j, i)
    } else {
        return Err(FracError::DivergentInteraction);
    };
    let p = 1.0 - alpha;
    let pw = |x: f64| x.max(0.0).powf(p);
    let raw = match (a.is_finite(), d.is_finite()) {
        (true, true) => pw(c - a) + pw(d - b) - pw(c - b) - pw(d - a),
        (true, false) => pw(c - a) - pw(c - b),
        (false, true) => pw(d - b) - pw(c - b),
        (false, false) => return Err(FracError::DivergentInteraction),
    };
    Ok(raw / (alpha * p))
}

/// `sum_{I, J} pair_weight(I, J)` over the segments of two sets on a line.
pub(crate) fn line_interaction(a: &Segments, b: &Segments, alpha: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &i in a {
        for &j in b {
            acc += pair_weight(i, j, alpha)?;
        }
    }
    Ok(acc)
}

/// `int over lines meeting B(center, radius) of g(point, dir)`, one line
/// per unordered direction: `int_{S^(N-1)/+-} int_{dir^perp} g`. In the
/// plane, `kinks(center, dir)` lists offsets where `g` is singular.
pub(crate) fn over_lines<G, K>(center: &[f64], radius: f64, g: G, kinks: K, tol: Tolerance) -> Result<EvalResult>
where
    G: Fn(&[f64], &[f64]) -> Result<f64> + Sync,
    K: Fn(&[f64], &[f64]) -> Vec<f64> + Sync,
{
    let dim = center.len();
    let inner = Tolerance {
        abs: tol.abs / PANELS as f64,
        ..tol
    };
    let panel = |k: usize| -> Result<EvalResult> {
        match dim {
            2 => {
                let (lo, hi) = (PI * k as f64 / PANELS as f64, PI * (k + 1) as f64 / PANELS as f64);
                quad(
                    |w| {
                        let (s, c) = w.sin_cos();
                        let dir = [c, s];
                        let mut pts = vec![-radius, radius];
                        pts.extend(kinks(center, &dir).into_iter().filter(|z| z.abs() < radius));
                        pts.sort_by(f64::total_cmp);
                        pts.dedup();
                        quad(|z| g(&[center[0] - z * s, center[1] + z * c], &dir), &pts, inner.scaled(0.1))
                        .map(|r| r.value)
                    },
                    &[lo, hi],
                    inner,
                )
            }
            3 => {
                // polar angle of the direction in [0, pi/2], split in panels
                let (lo, hi) = (0.5 * PI * k as f64 / PANELS as f64, 0.5 * PI * (k + 1) as f64 / PANELS as f64);
                quad(
                    |th| {
                        let (st, ct) = th.sin_cos();
                        quad(
                            |ph| {
                                let (sp, cp) = ph.sin_cos();
                                let dir = [st * cp, st * sp, ct];
                                let e1 = [ct * cp, ct * sp, -st];
                                let e2 = [-sp, cp, 0.0];
                                quad(
                                    |r| {
                                        quad(
                                            |chi| {
                                                let (sc, cc) = chi.sin_cos();
                                                let p: Vec<f64> =
                                                    (0..3).map(|i| center[i] + r * (cc * e1[i] + sc * e2[i])).collect();
                                                g(&p, &dir)
                                            },
                                            &[0.0, PI, 2.0 * PI],
                                            inner.scaled(1e-3),
                                        )
                                        .map(|v| v.value * r)
                                    },
                                    &[0.0, radius],
                                    inner.scaled(1e-2),
                                )
                                .map(|v| v.value)
                            },
                            &[0.0, PI, 2.0 * PI],
                            inner.scaled(0.1),
                        )
                        .map(|v| v.value * st)
                    },
                    &[lo, hi],
                    inner,
                )
            }
            _ => Err(FracError::Unsupported(format!("line integrals in R^{dim}"))),
        }
    };
    let parts: Vec<Result<EvalResult>> = (0..PANELS).into_par_iter().map(panel).collect();
    let mut total = EvalResult::exact(0.0);
    for p in parts {
        total = total.add(p?);
    }
    Ok(total)
}

/// Like [`over_lines`] for a `g` that depends only on the distance of the
/// line from `center`.
pub(crate) fn over_lines_radial<G>(dim: usize, radius: f64, g: G, tol: Tolerance) -> Result<EvalResult>
where
    G: Fn(f64) -> Result<f64>,
{
    use crate::quadrature::sphere_area;
    let weight = 0.5 * sphere_area(dim) * sphere_area(dim - 1);
    let r = quad(|r| Ok(g(r)? * r.powi(dim as i32 - 2)), &[0.0, radius], tol)?;
    Ok(r.scale(weight))
}
