//! Boundary motions, the elastic extension of the boundary displacement into
//! a slab-wise deformation map, and the pullback of derivatives, normals and
//! measures through that map.

mod extension;
mod field;
mod motion;

pub use extension::{prescribed_field, solve_extension, ElasticExtensionProblem, ElasticSettings};
pub use field::{pullback_gradients, surface_measure_factor, transport_normal, transported_normal, DeformationField, MapSample};
pub use motion::{dirichlet_data, ramp_time, BoundaryMotion, CustomMotion, DirichletData};

use crate::geometry::GeometryError;
use crate::mesh::MeshError;
use crate::space::SpaceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeformationError {
    #[error("deformation map is not one-to-one in cell {cell} at t = {time:.6} (det F = {det:.3e}); try a smaller time step")]
    NonBijective { cell: usize, time: f64, det: f64 },
    #[error("singular deformation gradient (det F = {det:.3e})")]
    SingularMap { det: f64 },
    #[error("transported normal vanishes")]
    DegenerateNormal,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}
