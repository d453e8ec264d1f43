//! Fractional perimeter, its relative version in a reference set, the
//! interaction functional, and the first variation against the nonlocal
//! mean curvature.

mod boundary;
mod lines;
mod variation;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::geometry::IndicatorSet;
use crate::quadrature::{EvalResult, FracOrder, QuadSpec};
use lines::{line_complement, line_interaction, line_segments, over_lines, over_lines_radial};

pub use boundary::frac_perimeter_boundary;
pub use variation::{first_variation_check, FirstVariation};

/// A perimeter value, with the three interaction terms for the relative
/// perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterResult {
    pub total: EvalResult,
    /// `L(E & O, E^c & O)`, `L(E & O, E^c \ O)`, `L(E^c & O, E \ O)`.
    pub terms: Option<[EvalResult; 3]>,
}

impl PerimeterResult {
    pub fn value(&self) -> f64 {
        self.total.value
    }
}

fn check_dim(dim: usize, fo: &FracOrder) -> Result<()> {
    if dim != fo.dim() {
        return Err(FracError::InvalidParameter(format!("set lives in R^{dim} but the order has dim {}", fo.dim())));
    }
    if !(2..=3).contains(&dim) {
        return Err(FracError::Unsupported(format!("perimeters in R^{dim}")));
    }
    Ok(())
}

/// `P_alpha(E) = int_E int_(E^c) |x - y|^(-N - alpha)` for bounded `E`.
pub fn frac_perimeter(e: &IndicatorSet, fo: &FracOrder, q: &QuadSpec) -> Result<PerimeterResult> {
    check_dim(e.dim(), fo)?;
    let a = fo.alpha();
    let total = match e {
        IndicatorSet::Empty { .. } => EvalResult::exact(0.0),
        IndicatorSet::Ball { radius, .. } => {
            let r0 = *radius;
            over_lines_radial(
                fo.dim(),
                r0,
                |r| {
                    let len = 2.0 * (r0 * r0 - r * r).max(0.0).sqrt();
                    Ok(2.0 * len.powf(1.0 - a) / (a * (1.0 - a)))
                },
                q.tolerance(),
            )?
        }
        _ => {
            let (center, radius) = e
                .bounding_ball()
                .ok_or_else(|| FracError::InvalidParameter("fractional perimeter needs a bounded set".into()))?;
            over_lines(
                &center,
                radius,
                |p, d| {
                    let s = line_segments(e, p, d);
                    line_interaction(&s, &line_complement(&s), a)
                },
                |c, d| e.tangent_offsets(c, d),
                q.tolerance(),
            )?
        }
    };
    Ok(PerimeterResult { total, terms: None })
}

/// `L(A, B) = int_A int_B |x - y|^(-N - alpha)` for sets meeting in a null
/// set, at least one of them bounded.
pub fn interaction(a: &IndicatorSet, b: &IndicatorSet, fo: &FracOrder, q: &QuadSpec) -> Result<EvalResult> {
    check_dim(a.dim(), fo)?;
    check_dim(b.dim(), fo)?;
    if a == b && !matches!(a, IndicatorSet::Empty { .. }) {
        return Err(FracError::DivergentInteraction);
    }
    let (center, radius) = match (a.bounding_ball(), b.bounding_ball()) {
        (Some(x), Some(y)) => {
            if x.1 <= y.1 {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => {
            return Err(FracError::InvalidParameter("interaction needs one bounded set".into()));
        }
    };
    if radius == 0.0 {
        return Ok(EvalResult::exact(0.0));
    }
    let alpha = fo.alpha();
    over_lines(
        &center,
        radius,
        |p, d| line_interaction(&line_segments(a, p, d), &line_segments(b, p, d), alpha),
        |c, d| {
            let mut k = a.tangent_offsets(c, d);
            k.extend(b.tangent_offsets(c, d));
            k
        },
        q.tolerance(),
    )
}

/// `P_(alpha, O)(E)`: the interactions of `E` with its complement that do
/// not lie entirely outside `O`.
pub fn relative_frac_perimeter(e: &IndicatorSet, omega: &IndicatorSet, fo: &FracOrder, q: &QuadSpec) -> Result<PerimeterResult> {
    if omega.bounding_ball().is_none() {
        return Err(FracError::InvalidParameter("reference set must be bounded".into()));
    }
    let inside = |s: IndicatorSet| IndicatorSet::intersection(vec![s, omega.clone()]);
    let outside = |s: IndicatorSet| IndicatorSet::intersection(vec![s, omega.clone().complement()]);
    let ec = e.clone().complement();
    let terms = [
        interaction(&inside(e.clone()), &inside(ec.clone()), fo, q)?,
        interaction(&inside(e.clone()), &outside(ec.clone()), fo, q)?,
        interaction(&inside(ec), &outside(e.clone()), fo, q)?,
    ];
    let total = terms[0].add(terms[1]).add(terms[2]);
    Ok(PerimeterResult { total, terms: Some(terms) })
}
