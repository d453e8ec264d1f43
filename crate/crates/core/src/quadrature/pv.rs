use super::{integrate_with_err, EvalResult, QuadSpec, Tolerance};
use crate::error::{FracError, Result};

/// Richardson extrapolation of `values[k] ~ L + c_1 eps_k^p + c_2 eps_k^(p + step) + ...`.
///
/// Returns the extrapolated limit, the extrapolation residual (difference of
/// the last two entries of the final column) and the residual one level
/// earlier, which callers use as a contraction check.
pub fn richardson_table(values: &[f64], errors: &[f64], eps: &[f64], base_exponent: f64, step: f64) -> (f64, f64, f64, f64) {
    let n = values.len();
    assert!(n >= 3 && errors.len() == n && eps.len() == n);
    let levels = (n - 2).min(3);
    let mut col: Vec<f64> = values.to_vec();
    let mut col_err: Vec<f64> = errors.to_vec();
    for j in 1..=levels {
        let p = base_exponent + step * (j - 1) as f64;
        let mut next = Vec::with_capacity(col.len() - 1);
        let mut next_err = Vec::with_capacity(col.len() - 1);
        for k in 1..col.len() {
            // col[k] and col[k - 1] carry error terms at adjacent levels
            let fine = k + j - 1;
            let coarse = fine - 1;
            let ratio = (eps[coarse] / eps[fine]).powf(p);
            next.push(col[k] + (col[k] - col[k - 1]) / (ratio - 1.0));
            next_err.push((ratio * col_err[k] + col_err[k - 1]) / (ratio - 1.0));
        }
        col = next;
        col_err = next_err;
    }
    let m = col.len();
    let last = col[m - 1];
    let residual = (col[m - 1] - col[m - 2]).abs();
    let previous = if m >= 3 {
        (col[m - 2] - col[m - 3]).abs()
    } else {
        f64::INFINITY
    };
    (last, residual, previous, col_err[m - 1])
}

/// Principal value as the limit over the excision schedule of `excised(eps)`,
/// which must return the integral over the domain minus `B_eps(x0)`.
///
/// The leading excision error is modelled as `eps^base_exponent`; higher
/// levels remove `eps^(base_exponent + 2j)`, the odd corrections cancelling
/// under symmetric excision at a smooth point.
pub fn pv_integrate<F>(mut excised: F, q: &QuadSpec, base_exponent: f64) -> Result<EvalResult>
where
    F: FnMut(f64) -> Result<EvalResult>,
{
    q.validate()?;
    let mut values = Vec::with_capacity(q.pv_excision.len());
    let mut errors = Vec::with_capacity(q.pv_excision.len());
    let mut tail = 0.0f64;
    for &eps in &q.pv_excision {
        let r = excised(eps)?;
        values.push(r.value);
        errors.push(r.quad_err);
        tail = tail.max(r.tail_err);
    }
    let (value, residual, previous, amplified) = richardson_table(&values, &errors, &q.pv_excision, base_exponent, 2.0);
    // a residual inside the propagated quadrature error is noise, not divergence
    let target = q.abs_tol.max(q.rel_tol * value.abs()).max(10.0 * amplified);
    if !value.is_finite() || (residual > previous && residual > target) {
        return Err(FracError::NonConvergent(format!(
            "excision sequence not contracting: residual {residual:e} after {previous:e}"
        )));
    }
    Ok(EvalResult::new(value, residual + amplified, tail))
}

/// Principal value over `[a, b]` of an integrand singular at an interior
/// point `x0`. The integrand is folded, `f(x0 + t) + f(x0 - t)`, so that the
/// odd part cancels pointwise before excision.
pub fn pv_integrate_line<F>(f: F, a: f64, b: f64, x0: f64, q: &QuadSpec, base_exponent: f64, tol: Tolerance) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
{
    if !(x0 > a && x0 < b) {
        return Err(FracError::SingularityOnBoundary);
    }
    let near = (x0 - a).min(b - x0);
    let schedule_ok = q.pv_excision.iter().all(|&e| e < near);
    if !schedule_ok {
        return Err(FracError::InvalidParameter(format!(
            "excision radii must be smaller than the distance {near} to the boundary"
        )));
    }
    let remainder = if x0 - a > b - x0 {
        integrate_with_err(|x| Ok((f(x), 0.0)), &[a, x0 - near], tol)?
    } else {
        integrate_with_err(|x| Ok((f(x), 0.0)), &[x0 + near, b], tol)?
    };
    let folded = pv_integrate(
        |eps| integrate_with_err(|t| Ok((f(x0 + t) + f(x0 - t), 0.0)), &[eps, near], tol),
        q,
        base_exponent,
    )?;
    Ok(folded.add(remainder))
}
