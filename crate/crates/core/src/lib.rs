//! Nonlocal (fractional) mean curvature and fractional perimeter of
//! hypersurfaces, with spectral Newton continuation of surfaces of constant
//! nonlocal mean curvature.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod nmc;
pub mod perimeter;
pub mod quadrature;
pub mod solver;

pub use error::{FracError, Result};
pub use quadrature::{EvalResult, FracOrder, QuadSpec};
