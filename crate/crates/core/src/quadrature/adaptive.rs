use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::EvalResult;
use crate::error::{FracError, Result};

/// Stopping rule for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self {
            rel,
            abs,
            max_subdivisions: 4000,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rel: self.rel * factor,
            abs: self.abs * factor,
            ..*self
        }
    }

    fn target(&self, value: f64) -> f64 {
        // never ask for less than the rounding floor of the rule
        self.abs.max(self.rel.max(64.0 * f64::EPSILON) * value.abs())
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

struct Cell {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    carried: f64,
    abs: f64,
    index: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // Largest error first; ties broken by the smaller cell index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, ec) = f(c)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    let mut carried = ec.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let (f1, e1) = f(c - dx)?;
        let (f2, e2) = f(c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        carried += WGK[j] * (e1.abs() + e2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hh = h.abs();
    res_abs *= hh;
    res_asc *= hh;
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !res_k.is_finite() {
        return Err(FracError::NonConvergent(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok((res_k * h, err, carried * hh, res_abs))
}

/// Globally adaptive Gauss-Kronrod integration over the partition given by
/// `breakpoints` (sorted, at least two). The integrand returns a value and an
/// error already present in that value (e.g. from an inner integral), which is
/// integrated alongside and reported in `quad_err`.
pub fn integrate_with_err<F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> Result<EvalResult>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut next_index = 0u64;
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in breakpoints.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e, c, m) = kronrod(&mut f, w[0], w[1])?;
        total += v;
        total_err += e;
        total_abs += m;
        heap.push(Cell {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
            carried: c,
            abs: m,
            index: next_index,
        });
        next_index += 1;
    }
    let mut subdivisions = heap.len();
    // cancellation between cells bounds the attainable accuracy by the
    // rounding in the integral of |f|
    while total_err > tol.target(total).max(100.0 * f64::EPSILON * total_abs) {
        let Some(cell) = heap.pop() else { break };
        let mid = 0.5 * (cell.a + cell.b);
        // Cells at floating-point resolution cannot be refined further.
        if (cell.b - cell.a).abs() <= 4.0 * f64::EPSILON * cell.a.abs().max(cell.b.abs()).max(1e-300) || mid == cell.a || mid == cell.b {
            heap.push(Cell { err: 0.0, ..cell });
            total_err = heap.iter().map(|c| c.err).sum();
            if heap.iter().all(|c| c.err == 0.0) {
                break;
            }
            continue;
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(FracError::SubdivisionBudgetExceeded(tol.max_subdivisions));
        }
        let (v1, e1, c1, m1) = kronrod(&mut f, cell.a, mid)?;
        let (v2, e2, c2, m2) = kronrod(&mut f, mid, cell.b)?;
        total += v1 + v2 - cell.value;
        total_err += e1 + e2 - cell.err;
        total_abs += m1 + m2 - cell.abs;
        subdivisions += 1;
        for (a, b, value, err, carried, abs) in [(cell.a, mid, v1, e1, c1, m1), (mid, cell.b, v2, e2, c2, m2)] {
            heap.push(Cell {
                a,
                b,
                value,
                err,
                carried,
                abs,
                index: next_index,
            });
            next_index += 1;
        }
        if subdivisions % 64 == 0 {
            // refresh running sums against drift
            total = heap.iter().map(|c| c.value).sum();
            total_err = heap.iter().map(|c| c.err).sum();
            total_abs = heap.iter().map(|c| c.abs).sum();
        }
    }
    // Deterministic final reduction in interval order.
    let mut cells: Vec<Cell> = heap.into_vec();
    cells.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = cells.iter().map(|c| c.value).sum();
    let err: f64 = cells.iter().map(|c| c.err).sum();
    let carried: f64 = cells.iter().map(|c| c.carried).sum();
    Ok(EvalResult::new(value, err + carried, 0.0))
}

/// Adaptive integration of a plain function over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
{
    integrate_with_err(|x| Ok((f(x), 0.0)), &[a, b], tol)
}

fn power_exponent(gamma: f64) -> f64 {
    if gamma <= 0.0 {
        1.0
    } else {
        (1.0 / (1.0 - gamma)).min(20.0)
    }
}

/// Integrates over `[a, b]` an integrand with an algebraic singularity
/// `|x - a|^-gamma` at the left endpoint, via `x = a + (b - a) w^m`.
pub fn integrate_power_left<F>(mut f: F, a: f64, b: f64, gamma: f64, tol: Tolerance) -> Result<EvalResult>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let m = power_exponent(gamma);
    let len = b - a;
    integrate_with_err(
        |w| {
            if w <= 0.0 {
                return Ok((0.0, 0.0));
            }
            let x = a + len * w.powf(m);
            if x == a {
                return Ok((0.0, 0.0));
            }
            let jac = len * m * w.powf(m - 1.0);
            let (v, e) = f(x)?;
            Ok((v * jac, e * jac.abs()))
        },
        &[0.0, 1.0],
        tol,
    )
}

/// Like [`integrate_power_left`] with singularities at both endpoints.
pub fn integrate_power_both<F>(
    mut f: F,
    a: f64,
    b: f64,
    gamma_a: f64,
    gamma_b: f64,
    tol: Tolerance,
) -> Result<EvalResult>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mid = 0.5 * (a + b);
    let half_tol = tol.scaled(0.5);
    let left = integrate_power_left(&mut f, a, mid, gamma_a, half_tol)?;
    let right = integrate_power_left(&mut f, b, mid, gamma_b, half_tol)?;
    Ok(left.sub(right))
}
