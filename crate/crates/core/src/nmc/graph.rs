use serde::{Deserialize, Serialize};

use super::kernel::{f_odd, q_kernel, q_tilde};
use crate::error::{FracError, Result};
use crate::geometry::{EuclideanGraph, FarField, Profile1d};
use crate::quadrature::{integrate_far_field, integrate_with_err, pv_integrate, EvalResult, FracOrder, QuadSpec};

/// Which of the two equivalent line integrals evaluates a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphForm {
    /// `PV int [F(p) - F(-p)] |x - y|^-(N - 1 + alpha) dy`.
    E1,
    /// `PV int (u(x) - u(y)) |x - y|^-(N + alpha) q(p) dy`.
    E2,
}

/// Nonlocal mean curvature of the subgraph `{t < u(x)}` in R^2 at `(x, u(x))`.
pub fn nmc_graph(g: &EuclideanGraph, x: f64, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    nmc_graph_form(g, x, GraphForm::E1, fo, q)
}

pub fn nmc_graph_form(g: &EuclideanGraph, x: f64, form: GraphForm, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    gate(g, fo)?;
    let u = g.profile();
    let s = 1.0 + fo.alpha();
    // slope of the secant to x + t, for either sign of t
    let secant = |t: f64| u.increment(x, t) / t;
    let folded = |t: f64| match form {
        GraphForm::E1 => (f_odd(secant(t), fo) - f_odd(secant(-t), fo)) * t.powf(-s),
        GraphForm::E2 => {
            let (pp, pm) = (secant(t), secant(-t));
            -(pp * q_kernel(pp, fo) - pm * q_kernel(pm, fo)) * t.powf(-s)
        }
    };
    line_pv(folded, &[u], x, fo, q)
}

/// `H(u) - H(v)` from the single integral with the positive weight
/// `-2 int_0^1 F'(p_v + rho p_(u - v)) d rho`.
pub fn nmc_graph_difference(u: &EuclideanGraph, v: &EuclideanGraph, x: f64, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    gate(u, fo)?;
    gate(v, fo)?;
    let (pu, pv) = (u.profile(), v.profile());
    let s = 1.0 + fo.alpha();
    let side = |t: f64| {
        let dv = pv.increment(x, t) / t.abs();
        let dw = (pu.increment(x, t) - pv.increment(x, t)) / t.abs();
        // (w(x) - w(y)) |x - y|^-(N + alpha) with one power of |x - y| folded into dw
        -dw * q_tilde(dv, dw, fo)
    };
    let folded = |t: f64| (side(t) + side(-t)) * t.powf(-s);
    line_pv(folded, &[pu, pv], x, fo, q)
}

fn gate(g: &EuclideanGraph, fo: &FracOrder) -> Result<()> {
    if fo.dim() != 2 {
        return Err(FracError::Unsupported(format!(
            "graph evaluation in R^{} (graphs are planar)",
            fo.dim()
        )));
    }
    g.check_regularity((fo.alpha() + 0.25).min(1.0), 1e8)
}

/// `PV int_0^inf folded(t) dt` for a folded graph integrand: near part by
/// excision, far part by extrapolation in the truncation radius.
fn line_pv<F>(folded: F, profiles: &[&Profile1d], x: f64, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
{
    let (t0, cell) = truncation(profiles, x, q.trunc_radius)?;
    let tol = q.tolerance();
    let a = fo.alpha();
    let mut near_pts: Vec<f64> = vec![];
    let mut t = cell;
    while t < t0 - 1e-9 * cell {
        near_pts.push(t);
        t += cell;
    }
    near_pts.push(t0);
    let far = integrate_far_field(&folded, t0, 2.0 * t0, cell, 1.0 + a, tol)?;
    let near = pv_integrate(
        |eps| {
            let mut pts = vec![eps];
            pts.extend(near_pts.iter().copied().filter(|&p| p > eps));
            integrate_with_err(|t| Ok((folded(t), 0.0)), &pts, tol)
        },
        q,
        1.0 - a,
    )?;
    Ok(near.add(far))
}

/// Truncation radius and breakpoint spacing shared by all profiles: whole
/// periods for periodic data, a window beyond every core otherwise.
pub(super) fn truncation(profiles: &[&Profile1d], x: f64, trunc: f64) -> Result<(f64, f64)> {
    let mut period: Option<f64> = None;
    let mut reach: f64 = 0.0;
    for p in profiles {
        match p.far_field() {
            FarField::Periodic(t) => match period {
                None => period = Some(t),
                Some(t_prev) => {
                    let ratio = t.max(t_prev) / t.min(t_prev);
                    if (ratio - ratio.round()).abs() > 1e-9 {
                        return Err(FracError::InvalidParameter("incommensurate periods".into()));
                    }
                    period = Some(t.max(t_prev));
                }
            },
            FarField::Affine { .. } => reach = reach.max(p.core_radius()),
        }
    }
    match period {
        Some(t) if reach == 0.0 => {
            let t0 = (trunc / t).ceil().max(1.0) * t;
            Ok((t0, t))
        }
        Some(_) => Err(FracError::Unsupported("mixing periodic and decaying profiles".into())),
        None => {
            let t0 = trunc.max(2.0 * (x.abs() + reach));
            Ok((t0, t0 / 8.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadSpec {
        QuadSpec::precise()
    }

    fn graph(u: Profile1d) -> EuclideanGraph {
        EuclideanGraph::new(u).unwrap()
    }

    #[test]
    fn flat_and_tilted_lines_vanish() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let c = nmc_graph(&graph(Profile1d::constant(0.7)), 0.3, &fo, &q()).unwrap();
        assert_eq!(c.value, 0.0);
        let l = nmc_graph(
            &graph(Profile1d::Linear {
                slope: 0.8,
                intercept: 0.1,
            }),
            1.1,
            &fo,
            &q(),
        )
        .unwrap();
        assert!(l.value.abs() < 1e-14);
    }

    #[test]
    fn two_forms_agree_on_cosine() {
        let fo = FracOrder::new(2, 0.4).unwrap();
        let g = graph(Profile1d::cosine(0.0, 0.3, 1.0).unwrap());
        for k in 0..8 {
            let x = 0.37 * k as f64;
            let e1 = nmc_graph_form(&g, x, GraphForm::E1, &fo, &q()).unwrap();
            let e2 = nmc_graph_form(&g, x, GraphForm::E2, &fo, &q()).unwrap();
            assert!((e1.value - e2.value).abs() <= e1.total_err() + e2.total_err() + 1e-10);
        }
    }

    #[test]
    fn small_cosine_matches_linearization() {
        // H(a cos kx) = 4 a cos(kx) k^(1+alpha) Gamma(-1-alpha) sin(pi alpha / 2) + O(a^3)
        use statrs::function::gamma::gamma;
        let alpha = 0.5;
        let fo = FracOrder::new(2, alpha).unwrap();
        let (a, k) = (1e-3, 1.5);
        let g = graph(Profile1d::cosine(0.0, a, k).unwrap());
        let c = 4.0 * k.powf(1.0 + alpha) * gamma(-1.0 - alpha) * (0.5 * std::f64::consts::PI * alpha).sin();
        for x in [0.0, 0.4, 1.0] {
            let h = nmc_graph(&g, x, &fo, &q()).unwrap().value;
            let lin = a * (k * x).cos() * c;
            assert!((h - lin).abs() < 1e-5 * a * c.abs(), "x={x}: {h} vs {lin}");
        }
    }

    #[test]
    fn gaussian_bump_forms_agree() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let g = graph(Profile1d::Gaussian {
            base: 0.2,
            amplitude: 0.4,
            width: 0.8,
        });
        for x in [0.0, 0.5, 2.0] {
            let e1 = nmc_graph_form(&g, x, GraphForm::E1, &fo, &q()).unwrap();
            let e2 = nmc_graph_form(&g, x, GraphForm::E2, &fo, &q()).unwrap();
            assert!((e1.value - e2.value).abs() < 1e-9, "{} {}", e1.value, e2.value);
        }
        // the top of a bump is convex from below: positive curvature
        assert!(nmc_graph(&g, 0.0, &fo, &q()).unwrap().value > 0.0);
    }

    #[test]
    fn vertical_shift_invariance_and_difference_form() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let u = graph(Profile1d::cosine(1.0, 0.4, 1.0).unwrap());
        let v = graph(Profile1d::cosine(0.0, 0.4, 1.0).unwrap());
        let hu = nmc_graph(&u, 0.9, &fo, &q()).unwrap();
        let hv = nmc_graph(&v, 0.9, &fo, &q()).unwrap();
        assert!((hu.value - hv.value).abs() < 1e-12);
        let d = nmc_graph_difference(&u, &v, 0.9, &fo, &q()).unwrap();
        assert!(d.value.abs() < 1e-12);
        let w = graph(Profile1d::Trig {
            period: 2.0 * std::f64::consts::PI,
            cos: vec![0.0, 0.25, 0.1],
            sin: vec![0.05],
        });
        let hw = nmc_graph(&w, 0.9, &fo, &q()).unwrap();
        let d = nmc_graph_difference(&w, &v, 0.9, &fo, &q()).unwrap();
        assert!((d.value - (hw.value - hv.value)).abs() <= d.total_err() + hw.total_err() + hv.total_err() + 1e-9);
    }

    #[test]
    fn difference_weight_is_positive() {
        let fo = FracOrder::new(2, 0.3).unwrap();
        for i in -10..=10 {
            for j in -10..=10 {
                assert!(q_tilde(0.7 * i as f64, 0.9 * j as f64, &fo) > 0.0);
            }
        }
    }

    #[test]
    fn scaling_of_cosine_graph() {
        let fo = FracOrder::new(2, 0.6).unwrap();
        let g = graph(Profile1d::cosine(0.0, 0.5, 1.0).unwrap());
        let h1 = nmc_graph(&g, 0.4, &fo, &q()).unwrap().value;
        let h2 = nmc_graph(&g.scaled(2.0).unwrap(), 0.8, &fo, &q()).unwrap().value;
        assert!((h2 - 2f64.powf(-0.6) * h1).abs() < 1e-8 * h1.abs());
    }
}
