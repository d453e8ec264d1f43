//! Nonlocal mean curvature operators for every surface representation,
//! plus the classical curvature of surfaces of revolution and the
//! normalized alpha -> 1 limit.

mod boundary;
mod graph;
mod kernel;
mod limit;
mod slab;
mod solid;
mod sphere_graph;

use crate::geometry::dot;

pub use boundary::{nmc_boundary, sphere_nmc_exact};
pub use kernel::{f_kernel, f_kernel_prime, f_odd, q_kernel, q_tilde};
pub use solid::{nmc_solid, nmc_tangential_derivative};
pub use graph::{nmc_graph, nmc_graph_difference, nmc_graph_form, GraphForm};
pub use slab::nmc_slab;
pub use limit::{classical_limit_check, evaluate_batch, extrapolate_to_one, nmc_boundary_batch, omega_lower, omega_prime};
pub use crate::geometry::classical_mc_rotational;
pub use sphere_graph::nmc_sphere_graph;

/// An orthonormal basis of the complement of the unit vector `nu` (N <= 3).
pub(crate) fn orthonormal_complement(nu: &[f64]) -> Vec<Vec<f64>> {
    if nu.len() == 2 {
        return vec![vec![-nu[1], nu[0]]];
    }
    let k = (0..3).min_by(|&i, &j| nu[i].abs().total_cmp(&nu[j].abs())).unwrap_or(0);
    let mut e = vec![0.0; 3];
    e[k] = 1.0;
    let c = dot(&e, nu);
    let mut t1: Vec<f64> = e.iter().zip(nu).map(|(a, b)| a - c * b).collect();
    let m = dot(&t1, &t1).sqrt();
    t1.iter_mut().for_each(|v| *v /= m);
    let t2 = vec![
        nu[1] * t1[2] - nu[2] * t1[1],
        nu[2] * t1[0] - nu[0] * t1[2],
        nu[0] * t1[1] - nu[1] * t1[0],
    ];
    vec![t1, t2]
}
