use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};

/// Rank-M lattice `L = Z a_1 + ... + Z a_M` in R^N, scaled by `spacing`
/// when used to place spheres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeDoc", into = "LatticeDoc")]
pub struct Lattice {
    basis: Vec<Vec<f64>>,
    spacing: f64,
    gram_inv: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    basis: Vec<Vec<f64>>,
    spacing: f64,
}

impl TryFrom<LatticeDoc> for Lattice {
    type Error = FracError;
    fn try_from(d: LatticeDoc) -> Result<Self> {
        Lattice::new(d.basis, d.spacing)
    }
}

impl From<Lattice> for LatticeDoc {
    fn from(l: Lattice) -> Self {
        LatticeDoc {
            basis: l.basis,
            spacing: l.spacing,
        }
    }
}

impl Lattice {
    pub fn new(basis: Vec<Vec<f64>>, spacing: f64) -> Result<Self> {
        let m = basis.len();
        if m == 0 {
            return Err(FracError::InvalidParameter("lattice needs at least one basis vector".into()));
        }
        let n = basis[0].len();
        if n < 2 || basis.iter().any(|a| a.len() != n) || m > n {
            return Err(FracError::InvalidParameter(format!(
                "lattice basis must be 1..=N vectors of a common dimension N >= 2 (got {m} vectors)"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(FracError::InvalidParameter(format!("lattice spacing {spacing} must be positive")));
        }
        if basis.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FracError::InvalidParameter("non-finite lattice basis entry".into()));
        }
        let gram = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &basis[j]));
        let det = gram.determinant();
        if !(det > 1e-12) {
            return Err(FracError::InvalidParameter(format!(
                "lattice basis is degenerate (Gram determinant {det:e})"
            )));
        }
        let gram_inv = gram.try_inverse().ok_or_else(|| FracError::InvalidParameter("singular Gram matrix".into()))?;
        Ok(Self {
            basis,
            spacing,
            gram_inv,
        })
    }

    /// `Z e_1` in R^dim.
    pub fn axis(dim: usize, spacing: f64) -> Result<Self> {
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        Self::new(vec![e], spacing)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn with_spacing(&self, spacing: f64) -> Result<Self> {
        Self::new(self.basis.clone(), spacing)
    }

    /// `sqrt(det Gram)`, the M-volume of a fundamental cell of the unscaled lattice.
    pub fn covolume(&self) -> f64 {
        (1.0 / self.gram_inv.determinant()).sqrt()
    }

    /// Norms of the rows of `G^-1 A`: `|k_i| <= |p| * dual_row_norms()[i]`
    /// for `p = sum k_i a_i`.
    pub fn dual_row_norms(&self) -> Vec<f64> {
        let m = self.rank();
        (0..m)
            .map(|i| {
                let mut row = vec![0.0; self.dim()];
                for j in 0..m {
                    for (r, a) in row.iter_mut().zip(&self.basis[j]) {
                        *r += self.gram_inv[(i, j)] * a;
                    }
                }
                dot(&row, &row).sqrt()
            })
            .collect()
    }

    /// Nonzero unscaled lattice points with `|p| <= radius`, sorted by
    /// `(|p|, coefficients)`.
    pub fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        let m = self.rank();
        let bounds: Vec<i64> = self.dual_row_norms().iter().map(|d| (radius * d).floor() as i64).collect();
        let mut out: Vec<(f64, Vec<i64>, Vec<f64>)> = Vec::new();
        let mut k: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            if k.iter().any(|&c| c != 0) {
                let p = self.combine(&k);
                let r = dot(&p, &p).sqrt();
                if r <= radius {
                    out.push((r, k.clone(), p));
                }
            }
            let mut i = 0;
            while i < m {
                k[i] += 1;
                if k[i] > bounds[i] {
                    k[i] = -bounds[i];
                    i += 1;
                } else {
                    break;
                }
            }
            if i == m {
                break;
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        out.into_iter().map(|t| t.2).collect()
    }

    fn combine(&self, k: &[i64]) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        for (c, a) in k.iter().zip(&self.basis) {
            for (pi, ai) in p.iter_mut().zip(a) {
                *pi += *c as f64 * ai;
            }
        }
        p
    }

    /// Unscaled lattice points `p` whose scaled copies `spacing * p` are the
    /// nearest candidates to `y` (the enclosing cell corners and their
    /// neighbours).
    pub fn nearby_points(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let m = self.rank();
        let coeff: Vec<f64> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| self.gram_inv[(i, j)] * dot(&self.basis[j], y))
                    .sum::<f64>()
                    / self.spacing
            })
            .collect();
        let base: Vec<i64> = coeff.iter().map(|c| c.floor() as i64).collect();
        let mut out = Vec::new();
        let count = 4usize.pow(m as u32);
        for code in 0..count {
            let mut c = code;
            let k: Vec<i64> = base
                .iter()
                .map(|b| {
                    let off = (c % 4) as i64 - 1;
                    c /= 4;
                    b + off
                })
                .collect();
            out.push(self.combine(&k));
        }
        out
    }

    /// Shortest nonzero vector length of the unscaled lattice.
    pub fn min_norm(&self) -> f64 {
        let shortest_basis = self.basis.iter().map(|a| dot(a, a).sqrt()).fold(f64::INFINITY, f64::min);
        self.points_within(shortest_basis * (1.0 + 1e-12))
            .first()
            .map(|p| dot(p, p).sqrt())
            .unwrap_or(shortest_basis)
    }

    /// Spheres of radius `radius` centred on `spacing * L` are pairwise
    /// disjoint.
    pub fn check_disjoint(&self, radius: f64) -> Result<()> {
        let d = self.spacing * self.min_norm();
        if d > 2.0 * radius {
            Ok(())
        } else {
            Err(FracError::Overlap(d))
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_basis_rejected() {
        assert!(Lattice::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]], 1.0).is_err());
        assert!(Lattice::new(vec![vec![1.0, 0.0]], 0.0).is_err());
    }

    #[test]
    fn hexagonal_min_norm_and_covolume() {
        let l = Lattice::new(vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]], 1.0).unwrap();
        assert!((l.min_norm() - 1.0).abs() < 1e-12);
        assert!((l.covolume() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        // six nearest neighbours
        assert_eq!(l.points_within(1.0 + 1e-9).len(), 6);
    }

    #[test]
    fn disjointness_gate() {
        let l = Lattice::axis(2, 2.5).unwrap();
        assert!(l.check_disjoint(1.0).is_ok());
        assert!(matches!(l.check_disjoint(1.3), Err(FracError::Overlap(_))));
    }

    #[test]
    fn json_roundtrip_validates() {
        let l = Lattice::axis(3, 4.0).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back.spacing(), 4.0);
        assert!(serde_json::from_str::<Lattice>(r#"{"basis":[[1,0]],"spacing":-1}"#).is_err());
        assert!(serde_json::from_str::<Lattice>(r#"{"basis":[[1,0]],"spacing":1,"x":0}"#).is_err());
    }
}
