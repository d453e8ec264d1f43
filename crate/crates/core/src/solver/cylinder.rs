use std::f64::consts::PI;

use rayon::prelude::*;

use super::newton::newton;
use super::{BranchPoint, ModeVector};
use crate::error::{FracError, Result};
use crate::geometry::{Profile1d, SlabGraph};
use crate::nmc::nmc_slab;
use crate::quadrature::{FracOrder, QuadSpec};

/// Sup-norm bound on `H - const` at the collocation points of a branch point.
pub const SOLVER_TOL: f64 = 1e-8;
const FD_EPS: f64 = 1e-5;
const BRACKET: (f64, f64) = (0.01, 10.0);
const MAX_SPLITS: usize = 4;

fn slab_value(u: Profile1d, s: f64, fo: &FracOrder, q: &QuadSpec) -> Result<f64> {
    Ok(nmc_slab(&SlabGraph::new(u, fo.dim() - 1)?, s, fo, q)?.value)
}

/// `d/de H(R + e cos(mu s))` at `s = 0`: central differences at `e` and
/// `e / 2`, combined by one Richardson step.
pub fn linearized_cylinder_operator(r: f64, mu: f64, fo: &FracOrder, q: &QuadSpec) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(FracError::InvalidParameter(format!("cylinder radius must be positive, got {r}")));
    }
    if !mu.is_finite() {
        return Err(FracError::InvalidParameter("wave number must be finite".into()));
    }
    let mu = mu.abs();
    let h = |e: f64| {
        let u = if mu == 0.0 {
            Profile1d::constant(r + e)
        } else {
            Profile1d::Trig {
                period: 2.0 * PI / mu,
                cos: vec![r, e],
                sin: vec![],
            }
        };
        slab_value(u, 0.0, fo, q)
    };
    let d = |e: f64| -> Result<f64> { Ok((h(e)? - h(-e)?) / (2.0 * e)) };
    let (coarse, fine) = (d(FD_EPS)?, d(0.5 * FD_EPS)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// The straight-cylinder radius at which the period-`2 pi` mode is neutral,
/// by bisection to `1e-8`.
pub fn bifurcation_radius(fo: &FracOrder, q: &QuadSpec) -> Result<f64> {
    let f = |r: f64| linearized_cylinder_operator(r, 1.0, fo, q);
    let (mut lo, mut hi) = BRACKET;
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(FracError::NoSignChange { lo, hi });
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Collocation problem on one half period, unknowns `[w_2..w_K, lambda, h]`
/// with `H = H_0 + a h`.
struct Collocation<'a> {
    radius: f64,
    k: usize,
    h0: f64,
    fo: &'a FracOrder,
    q: &'a QuadSpec,
}

impl Collocation<'_> {
    fn nodes(&self) -> Vec<f64> {
        (0..=self.k).map(|j| PI * j as f64 / self.k as f64).collect()
    }

    fn full_profile(&self, x: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0, 1.0];
        w.extend_from_slice(&x[..self.k - 1]);
        w
    }

    /// `H(t_j / lambda) - H_0` at the nodes.
    fn excess(&self, a: f64, lambda: f64, w: &[f64]) -> Result<Vec<f64>> {
        if !(lambda > 0.0) {
            return Err(FracError::InvalidParameter(format!("wavelength parameter {lambda} is not positive")));
        }
        let mut cos = vec![self.radius];
        cos.extend(w.iter().skip(1).map(|c| a / lambda * c));
        let u = Profile1d::Trig {
            period: 2.0 * PI / lambda,
            cos,
            sin: vec![],
        };
        if u.jet(0.0).0.min(u.jet(PI / lambda).0) <= 0.0 {
            return Err(FracError::InvalidParameter("profile leaves the positive half line".into()));
        }
        let out: Vec<Result<f64>> = self
            .nodes()
            .into_par_iter()
            .map(|t| Ok(slab_value(u.clone(), t / lambda, self.fo, self.q)? - self.h0))
            .collect();
        out.into_iter().collect()
    }

    fn scaled_residual(&self, a: f64, x: &[f64]) -> Result<Vec<f64>> {
        let (lambda, h) = (x[self.k - 1], x[self.k]);
        let ex = self.excess(a, lambda, &self.full_profile(x))?;
        Ok(ex.into_iter().map(|e| e / a - h).collect())
    }

    fn point(&self, a: f64, x: &[f64], residual: f64) -> Result<BranchPoint> {
        Ok(BranchPoint {
            amplitude: a,
            lambda: x[self.k - 1],
            profile: ModeVector::cosine(self.full_profile(x))?,
            residual,
            nmc: self.h0 + a * x[self.k],
            radius: self.radius,
        })
    }

    fn unknowns(&self, p: &BranchPoint) -> Vec<f64> {
        let mut x: Vec<f64> = p.profile.coefficients()[2..].to_vec();
        x.push(p.lambda);
        x.push(if p.amplitude == 0.0 { 0.0 } else { (p.nmc - self.h0) / p.amplitude });
        x
    }

    fn solve(&self, a: f64, guess: Vec<f64>) -> Result<(Vec<f64>, f64)> {
        let s = newton(|x| self.scaled_residual(a, x), guess, SOLVER_TOL / a.abs())?;
        Ok((s.x, s.residual * a.abs()))
    }

    /// Secant-predicted step from `(a0, x0)` to `a1`, split in halves when
    /// Newton fails.
    fn step(&self, prev: Option<(f64, &[f64])>, a0: f64, x0: &[f64], a1: f64, depth: usize) -> Result<(Vec<f64>, f64)> {
        let guess: Vec<f64> = match prev {
            Some((ap, xp)) if ap != a0 => {
                let r = (a1 - a0) / (a0 - ap);
                x0.iter().zip(xp).map(|(c, p)| c + r * (c - p)).collect()
            }
            _ => x0.to_vec(),
        };
        match self.solve(a1, guess) {
            Ok(r) => Ok(r),
            Err(FracError::NewtonDiverged { .. }) if depth < MAX_SPLITS => {
                let mid = 0.5 * (a0 + a1);
                let (xm, _) = self.step(prev, a0, x0, mid, depth + 1)?;
                self.step(Some((a0, x0)), mid, &xm, a1, depth + 1)
            }
            Err(FracError::NewtonDiverged { residual, .. }) => Err(FracError::StepTooLarge(format!(
                "no convergence at a = {a1} after {MAX_SPLITS} step halvings (residual {residual:e})"
            ))),
            Err(e) => Err(e),
        }
    }
}

/// Continuation of the unduloid branch from the straight cylinder of radius
/// [`bifurcation_radius`] to amplitude `a_target` in `steps` equal steps.
pub fn unduloid_continuation(a_target: f64, steps: usize, fo: &FracOrder, q: &QuadSpec, k: usize) -> Result<Vec<BranchPoint>> {
    let r = bifurcation_radius(fo, q)?;
    resume_continuation(r, &[], a_target, steps, fo, q, k, &mut |_| Ok(()))
}

/// Continues a branch whose first points (on the grid `a_target i / steps`)
/// are already known; `on_point` sees every new point as it is accepted.
#[allow(clippy::too_many_arguments)]
pub fn resume_continuation(
    radius: f64,
    done: &[BranchPoint],
    a_target: f64,
    steps: usize,
    fo: &FracOrder,
    q: &QuadSpec,
    k: usize,
    on_point: &mut dyn FnMut(&BranchPoint) -> Result<()>,
) -> Result<Vec<BranchPoint>> {
    if k < 8 {
        return Err(FracError::InvalidParameter(format!("need at least 8 modes, got {k}")));
    }
    if steps == 0 || !a_target.is_finite() {
        return Err(FracError::InvalidParameter("need a finite target and at least one step".into()));
    }
    if !(radius > 0.0) || a_target.abs() > 0.2 * radius {
        return Err(FracError::InvalidParameter(format!(
            "target amplitude {a_target} exceeds 0.2 R* = {}",
            0.2 * radius
        )));
    }
    let grid = |i: usize| a_target * i as f64 / steps as f64;
    for (i, p) in done.iter().enumerate() {
        let ok = i <= steps
            && (p.amplitude - grid(i)).abs() <= 1e-12 * a_target.abs()
            && p.profile.order() == k
            && (p.radius - radius).abs() <= 1e-14 * radius;
        if !ok {
            return Err(FracError::InvalidParameter(format!("checkpoint point {i} does not match the requested branch")));
        }
    }
    let h0 = slab_value(Profile1d::constant(radius), 0.0, fo, q)?;
    let prob = Collocation { radius, k, h0, fo, q };
    let mut out = done.to_vec();
    if out.is_empty() {
        let mut x = vec![0.0; k - 1];
        x.extend([1.0, 0.0]);
        let p = prob.point(0.0, &x, 0.0)?;
        on_point(&p)?;
        out.push(p);
    }
    for i in out.len()..=steps {
        let cur = &out[i - 1];
        let x0 = prob.unknowns(cur);
        let prev = (i >= 2).then(|| (out[i - 2].amplitude, prob.unknowns(&out[i - 2])));
        let (x, res) = prob.step(prev.as_ref().map(|(a, x)| (*a, x.as_slice())), cur.amplitude, &x0, grid(i), 0)?;
        let p = prob.point(grid(i), &x, res)?;
        on_point(&p)?;
        out.push(p);
    }
    Ok(out)
}

/// Sup-norm of `H - nmc` at the collocation nodes of `p`, re-evaluated
/// under `q`.
pub fn branch_residual(p: &BranchPoint, fo: &FracOrder, q: &QuadSpec) -> Result<f64> {
    let k = p.profile.order();
    let prob = Collocation {
        radius: p.radius,
        k,
        h0: p.nmc,
        fo,
        q,
    };
    let ex = prob.excess(p.amplitude, p.lambda, p.profile.coefficients())?;
    Ok(ex.iter().fold(0.0, |m, e| m.max(e.abs())))
}

/// `max_s |u_(-a)(s) - u_a(s + pi / lambda(a))|` over one period.
pub fn half_period_defect(plus: &BranchPoint, minus: &BranchPoint) -> f64 {
    let shift = PI / plus.lambda;
    (0..64)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / (64.0 * plus.lambda);
            (minus.height(s) - plus.height(s + shift)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_signs_and_symmetry() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let q = QuadSpec::default();
        let r = 0.8;
        let l0 = linearized_cylinder_operator(r, 0.0, &fo, &q).unwrap();
        // H(R) = R^-alpha H(1)
        let h1 = slab_value(Profile1d::constant(1.0), 0.0, &fo, &q).unwrap();
        let exact = -0.5 * r.powf(-1.5) * h1;
        assert!((l0 - exact).abs() < 1e-6 * exact.abs(), "{l0} vs {exact}");
        let lp = linearized_cylinder_operator(r, 1.3, &fo, &q).unwrap();
        let lm = linearized_cylinder_operator(r, -1.3, &fo, &q).unwrap();
        assert_eq!(lp, lm);
        let scan: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&m| linearized_cylinder_operator(r, m, &fo, &q).unwrap())
            .collect();
        assert!(scan.windows(2).all(|w| w[0] < w[1]), "{scan:?}");
        assert!(linearized_cylinder_operator(0.0, 1.0, &fo, &q).is_err());
    }

    #[test]
    fn neutral_radius_and_simple_crossing() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let q = QuadSpec::default();
        let r = bifurcation_radius(&fo, &q).unwrap();
        assert!(linearized_cylinder_operator(r, 1.0, &fo, &q).unwrap().abs() < 1e-6);
        // only the first mode is neutral
        assert!(linearized_cylinder_operator(r, 2.0, &fo, &q).unwrap() > 1.0);
        let r2 = bifurcation_radius(&FracOrder::new(2, 0.51).unwrap(), &q).unwrap();
        assert!((r - r2).abs() < 0.05 * r, "{r} vs {r2}");
    }

    #[test]
    fn short_branch() {
        let fo = FracOrder::new(2, 0.5).unwrap();
        let q = QuadSpec::default();
        let r = 0.5209443827299401;
        let pts = resume_continuation(r, &[], 0.02, 2, &fo, &q, 8, &mut |_| Ok(())).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].residual, 0.0);
        assert_eq!(pts[0].lambda, 1.0);
        assert!((pts[0].height(1.3) - r).abs() < 1e-15);
        for p in &pts[1..] {
            assert!(p.residual < SOLVER_TOL);
            assert!(p.orthogonality_defect().abs() < 1e-8);
            assert!(p.lambda > 1.0 && p.lambda < 1.01);
        }
        assert!(pts[1].v_norm() < pts[2].v_norm());
        // resuming from the first two points reproduces the third
        let again = resume_continuation(r, &pts[..2], 0.02, 2, &fo, &q, 8, &mut |_| Ok(())).unwrap();
        assert_eq!(again[2], pts[2]);
        assert!(resume_continuation(r, &pts[..2], 0.03, 2, &fo, &q, 8, &mut |_| Ok(())).is_err());
        assert!(resume_continuation(r, &[], 0.5, 2, &fo, &q, 8, &mut |_| Ok(())).is_err());
        assert!(resume_continuation(r, &[], 0.02, 2, &fo, &q, 6, &mut |_| Ok(())).is_err());
    }
}
