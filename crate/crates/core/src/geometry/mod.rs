//! Surface and set representations: graphs, rotational profiles, sphere
//! graphs, slabs, lattices and solid regions with their indicator contrast.

mod lattice;
mod profile;
mod region;
mod rotational;
mod sphere_graph;
mod surface;

pub use lattice::Lattice;
pub(crate) use lattice::dot;
pub use profile::{EuclideanGraph, FarField, Profile1d, SlabGraph};
pub use region::{sphere_lattice_surface, tau_eval, IndicatorSet, Segments};
pub use rotational::{
    arclength_defect, classical_mc_rotational, kenmotsu_profile, profile_to_graph, ProfileJet, RotationalProfile,
    UnduloidGraph,
};
pub use sphere_graph::{SphereFunction, SphereGraph};
pub use surface::{ClosedCurve, Surface};
