use super::{integrate_with_err, richardson_table, EvalResult, Tolerance};
use crate::error::Result;

/// `int_a^inf f` for integrands whose remainder beyond `T` expands as
/// `sum_j c_j T^-(p + j)` along the truncations `T_k = t0 2^k`.
///
/// This holds for `f ~ sum_j g_j(t) t^-gamma_j` with `g_j` periodic of a
/// period dividing `t0` (every harmonic then contributes pure powers of `T`)
/// and for integrands with an expansion in powers of `1/t`. The truncated
/// integrals are extrapolated in `1/T`; the extrapolation residual is
/// reported as `tail_err`.
pub fn integrate_far_field<F>(f: F, a: f64, t0: f64, cell: f64, base_exponent: f64, tol: Tolerance) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
{
    assert!(t0 > a && cell > 0.0);
    const LEVELS: usize = 5;
    let breaks = |lo: f64, hi: f64| {
        let mut pts = vec![lo];
        let mut t = (lo / cell).floor() * cell + cell;
        while t < hi - 1e-12 * cell {
            if t > lo + 1e-12 * cell {
                pts.push(t);
            }
            t += cell;
        }
        pts.push(hi);
        pts
    };
    let near = integrate_with_err(|t| Ok((f(t), 0.0)), &breaks(a, t0), tol)?;
    let mut values = Vec::with_capacity(LEVELS);
    let mut errors = Vec::with_capacity(LEVELS);
    let mut eps = Vec::with_capacity(LEVELS);
    let mut acc = near.value;
    let mut acc_err = near.quad_err;
    let mut lo = t0;
    for k in 0..LEVELS {
        let hi = t0 * 2f64.powi(k as i32);
        if k > 0 {
            let piece = integrate_with_err(|t| Ok((f(t), 0.0)), &breaks(lo, hi), tol)?;
            acc += piece.value;
            acc_err += piece.quad_err;
        }
        values.push(acc);
        errors.push(acc_err);
        eps.push(1.0 / hi);
        lo = hi;
    }
    let (value, residual, _, amplified) = richardson_table(&values, &errors, &eps, base_exponent, 1.0);
    Ok(EvalResult::new(value, amplified, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_times_power() {
        // int_1^inf (2 + cos t) t^-2.5 dt: mean part 2/1.5 plus the cosine part
        let f = |t: f64| (2.0 + t.cos()) * t.powf(-2.5);
        let tol = Tolerance::new(1e-13, 1e-15);
        let r = integrate_far_field(f, 1.0, 16.0 * PI, 2.0 * PI, 1.5, tol).unwrap();
        // oracle: the same integral by a long direct sum plus the asymptotic remainder
        let cut = 4000.0 * 2.0 * PI;
        let mut direct = integrate_with_err(
            |t| Ok((f(t), 0.0)),
            &(0..=4000).map(|k| if k == 0 { 1.0 } else { 2.0 * PI * k as f64 }).collect::<Vec<_>>(),
            Tolerance {
                max_subdivisions: 100_000,
                ..tol
            },
        )
        .unwrap()
        .value;
        direct += 2.0 * cut.powf(-1.5) / 1.5 + 2.5 * cut.powf(-3.5);
        assert!((r.value - direct).abs() < 1e-10, "{} vs {direct}", r.value);
        assert!(r.tail_err < 1e-8);
    }

    #[test]
    fn algebraic_tail() {
        // int_0^inf dt / (1 + t^2)^1.25 = sqrt(pi) Gamma(0.75) / (2 Gamma(1.25))
        let exact = 0.5 * PI.sqrt() * statrs::function::gamma::gamma(0.75) / statrs::function::gamma::gamma(1.25);
        let r = integrate_far_field(
            |t| (1.0 + t * t).powf(-1.25),
            0.0,
            20.0,
            2.5,
            1.5,
            Tolerance::new(1e-13, 1e-15),
        )
        .unwrap();
        assert!((r.value - exact).abs() < 1e-9, "{} vs {exact}", r.value);
    }
}
