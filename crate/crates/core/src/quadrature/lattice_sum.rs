use super::{sphere_area, EvalResult};
use crate::error::{FracError, Result};
use crate::geometry::Lattice;

/// Direction-dependent factor multiplying `|p|^-exponent`.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeWeight {
    Unit,
    /// `(theta . p)^2`
    DirectionSquared(Vec<f64>),
}

impl LatticeWeight {
    fn eval(&self, p: &[f64]) -> f64 {
        match self {
            LatticeWeight::Unit => 1.0,
            LatticeWeight::DirectionSquared(theta) => {
                let d: f64 = theta.iter().zip(p).map(|(a, b)| a * b).sum();
                d * d
            }
        }
    }

    /// `(W, deg)` with `|w(p)| <= W |p|^deg`.
    fn growth(&self) -> (f64, f64) {
        match self {
            LatticeWeight::Unit => (1.0, 0.0),
            LatticeWeight::DirectionSquared(theta) => (theta.iter().map(|t| t * t).sum(), 2.0),
        }
    }
}

/// `sum_{p in L \ {0}} w(p) |p|^-exponent` over the unscaled lattice, by
/// direct summation over `|p| <= cutoff` plus an integral-comparison bound on
/// the remainder.
///
/// Terms are sorted by `(|p|, coefficient vector)` before summation so the
/// result does not depend on enumeration order.
pub fn lattice_sum(lattice: &Lattice, exponent: f64, weight: &LatticeWeight, cutoff: Option<f64>) -> Result<EvalResult> {
    let rank = lattice.rank();
    let (w_bound, deg) = weight.growth();
    let effective = exponent - deg;
    if effective <= rank as f64 {
        return Err(FracError::DivergentSum { exponent, rank });
    }
    let basis = lattice.basis();
    let norms: Vec<f64> = basis.iter().map(|a| a.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let amax = norms.iter().cloned().fold(0.0, f64::max);
    let cutoff = cutoff.unwrap_or(match rank {
        1 => 2.0e4,
        2 => 400.0,
        _ => 40.0,
    } * amax);
    let dual = lattice.dual_row_norms();
    let bounds: Vec<i64> = dual.iter().map(|d| (cutoff * d).ceil() as i64).collect();

    let mut terms: Vec<(f64, Vec<i64>, f64)> = Vec::new();
    let mut k = bounds.iter().map(|b| -b).collect::<Vec<i64>>();
    let dim = basis[0].len();
    loop {
        if k.iter().any(|&c| c != 0) {
            let mut p = vec![0.0; dim];
            for (c, a) in k.iter().zip(basis) {
                for (pi, ai) in p.iter_mut().zip(a) {
                    *pi += *c as f64 * ai;
                }
            }
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r <= cutoff {
                terms.push((r, k.clone(), weight.eval(&p) * r.powf(-exponent)));
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == rank {
                break;
            }
            k[i] += 1;
            if k[i] > bounds[i] {
                k[i] = -bounds[i];
                i += 1;
            } else {
                break;
            }
        }
        if i == rank {
            break;
        }
    }
    terms.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    // Sum from the smallest terms up to limit rounding.
    let value: f64 = terms.iter().rev().map(|t| t.2).sum();

    let covering = 0.5 * norms.iter().sum::<f64>();
    if cutoff <= 2.0 * covering {
        return Err(FracError::InvalidParameter("lattice cutoff too small for a tail bound".into()));
    }
    let covolume = lattice.covolume();
    let tail = w_bound * (1.0 + covering / cutoff).powf(effective) / covolume * sphere_area_rank(rank)
        * (cutoff - covering).powf(rank as f64 - effective)
        / (effective - rank as f64);
    let rounding = f64::EPSILON * terms.len() as f64 * value.abs();
    Ok(EvalResult::new(value, rounding, tail))
}

fn sphere_area_rank(rank: usize) -> f64 {
    if rank == 1 {
        2.0
    } else {
        sphere_area(rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn brute_zeta(s: f64, n: usize) -> f64 {
        (1..=n).rev().map(|k| (k as f64).powf(-s)).sum::<f64>() * 2.0
    }

    #[test]
    fn integer_lattice_gives_twice_zeta() {
        let l = Lattice::new(vec![vec![1.0, 0.0]], 1.0).unwrap();
        let r = lattice_sum(&l, 4.0, &LatticeWeight::Unit, None).unwrap();
        let oracle = brute_zeta(4.0, 1_000_000);
        assert!((oracle - PI.powi(4) / 45.0).abs() < 1e-13, "{oracle}");
        assert!((r.value - PI.powi(4) / 45.0).abs() <= r.total_err() + 1e-14);
        assert!(r.tail_err < 1e-11);
    }

    #[test]
    fn perpendicular_direction_weight_vanishes() {
        let l = Lattice::new(vec![vec![1.0, 0.0, 0.0]], 1.0).unwrap();
        let r = lattice_sum(&l, 6.0, &LatticeWeight::DirectionSquared(vec![0.0, 1.0, 0.0]), None).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn square_lattice_symmetry_identity() {
        // sum_j sum_p (e_j.p)^2 |p|^-s = sum_p |p|^{2-s}
        let l = Lattice::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 1.0).unwrap();
        let s = 5.5;
        let cut = Some(60.0);
        let w1 = lattice_sum(&l, s, &LatticeWeight::DirectionSquared(vec![1.0, 0.0, 0.0]), cut).unwrap();
        let w2 = lattice_sum(&l, s, &LatticeWeight::DirectionSquared(vec![0.0, 1.0, 0.0]), cut).unwrap();
        let full = lattice_sum(&l, s - 2.0, &LatticeWeight::Unit, cut).unwrap();
        assert!((w1.value - w2.value).abs() < 1e-12);
        assert!((w1.value + w2.value - full.value).abs() < 1e-11);
        // and each direction carries half: (1/M) sum |p|^{2-s} |theta_par|^2
        assert!((w1.value - 0.5 * full.value).abs() < 1e-11);
    }

    #[test]
    fn divergent_sum_is_rejected() {
        let l = Lattice::new(vec![vec![1.0, 0.0]], 1.0).unwrap();
        assert!(matches!(
            lattice_sum(&l, 1.0, &LatticeWeight::Unit, None),
            Err(FracError::DivergentSum { .. })
        ));
    }
}
