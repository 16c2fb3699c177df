//! Cut-cell space-time quadrature, slab assembly of the pulled-back
//! convection-diffusion forms, inter-slab transfer, error norms, condition
//! numbers and the slab marching driver.
//!
//! Scalar space-time unknowns are numbered `node·nq + k`, `k` being the
//! temporal node.

mod condition;
mod march;
mod norms;
mod quadrature;
mod slab;

use std::sync::Arc;

use nalgebra::Matrix2;

pub use condition::{condition_numbers, one_norm_condition};
pub use march::{march, march_with, DeformationMode, MarchResult, MarchSettings, MovingDomain, SlabReport, SlabState};
pub use norms::{slab_errors, NormReport, SlabErrors};
pub use quadrature::{build_quadrature, CutQuadrature, FacetPoint, VolumePoint};
pub use slab::{assemble_slab, eval_solution, jump_coupling, InitialCondition, InitialSample, PreviousSlab, SlabContext, SlabSystem};

use crate::deformation::DeformationError;
use crate::geometry::{GeometryError, Point, Vector};
use crate::mesh::MeshError;
use crate::space::SpaceError;

pub type ScalarFn = Arc<dyn Fn(&Point, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point, f64) -> Vector + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&Point, f64) -> Matrix2<f64> + Send + Sync>;

/// Which parts of the boundary carry Neumann rather than Dirichlet data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NeumannParts {
    pub embedded: bool,
    pub box_sides: bool,
}

/// `∂_t u + w·∇u − μΔu = f` with Dirichlet data `u_D`, Neumann flux `g_N` and
/// initial state `u₀`.
#[derive(Clone)]
pub struct ModelProblem {
    pub mu: f64,
    pub advection: Option<VectorFn>,
    pub source: ScalarFn,
    pub dirichlet: ScalarFn,
    pub neumann: ScalarFn,
    pub initial: ScalarFn,
    pub neumann_parts: NeumannParts,
    /// Penalty constant `c₀` of `β = c₀ p² μ / h_T`.
    pub c0: f64,
}

impl std::fmt::Debug for ModelProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelProblem")
            .field("mu", &self.mu)
            .field("advection", &self.advection.is_some())
            .field("neumann_parts", &self.neumann_parts)
            .field("c0", &self.c0)
            .finish_non_exhaustive()
    }
}

impl ModelProblem {
    /// Homogeneous heat problem with diffusion `mu`.
    pub fn heat(mu: f64) -> Self {
        let zero: ScalarFn = Arc::new(|_, _| 0.0);
        ModelProblem {
            mu,
            advection: None,
            source: zero.clone(),
            dirichlet: zero.clone(),
            neumann: zero.clone(),
            initial: zero,
            neumann_parts: NeumannParts::default(),
            c0: 10.0,
        }
    }

    pub fn penalty(&self, p: usize, h: f64) -> f64 {
        self.c0 * (p * p) as f64 * self.mu / h
    }
}

/// Exact solution with the derivatives needed by the error norms.
#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub hessian: MatrixFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution(..)")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error("ill-posed Neumann boundary: w·n_x + n_t = {value:.3e} < 0")]
    IllPosedNeumann { value: f64 },
    #[error("transfer geometry: a quadrature point of intersection cell {cell} lies outside its parent cell")]
    TransferGeometry { cell: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("slab {slab}, stage '{stage}': {source}")]
    Stage {
        slab: usize,
        stage: &'static str,
        source: Box<AssemblyError>,
    },
}

impl AssemblyError {
    /// The error without its slab/stage wrapper.
    pub fn root(&self) -> &AssemblyError {
        match self {
            AssemblyError::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
