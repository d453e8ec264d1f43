use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{ClosedCurve, SphereFunction, Surface};

/// JSON form of the surfaces the command line accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceDoc {
    Sphere { center: Vec<f64>, radius: f64 },
    Hyperplane { point: Vec<f64>, normal: Vec<f64> },
    /// `{|x'| = radius}` about the first axis.
    Cylinder { dim: usize, radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// `{psi(w) w}` about `center` in the plane.
    Star { center: [f64; 2], psi: SphereFunction },
    Union { parts: Vec<SurfaceDoc> },
}

impl SurfaceDoc {
    pub fn unit_sphere(dim: usize) -> Self {
        SurfaceDoc::Sphere {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn to_surface(&self) -> Result<Surface> {
        let s = match self {
            SurfaceDoc::Sphere { center, radius } => Surface::Sphere {
                center: center.clone(),
                radius: *radius,
            },
            SurfaceDoc::Hyperplane { point, normal } => Surface::Hyperplane {
                point: point.clone(),
                normal: normal.clone(),
            },
            SurfaceDoc::Cylinder { dim, radius } => Surface::Cylinder { dim: *dim, radius: *radius },
            SurfaceDoc::Ellipse { center, a, b } => Surface::Curve(ClosedCurve::Ellipse {
                center: *center,
                a: *a,
                b: *b,
            }),
            SurfaceDoc::Star { center, psi } => Surface::Curve(ClosedCurve::Star {
                center: *center,
                psi: psi.clone(),
            }),
            SurfaceDoc::Union { parts } => Surface::Union(parts.iter().map(|p| p.to_surface()).collect::<Result<_>>()?),
        };
        s.validate()?;
        Ok(s)
    }
}
