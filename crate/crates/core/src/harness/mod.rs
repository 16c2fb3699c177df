//! Run configuration, the manufactured-solution studies, the moving-body
//! demo, geometry debugging and file output.

mod config;
mod demo;
mod geom;
pub mod io;
mod manufactured;
mod study;

use std::sync::Arc;

pub use config::{
    DataConfig, DeformationKind, DiscretizationConfig, DomainConfig, GradingConfig, MeshConfig, MotionConfig,
    OutputConfig, ProblemConfig, RampConfig, RunConfig, TimeConfig,
};
pub use demo::{demo, DemoOutput, DemoRow};
pub use geom::{geom_classify, geom_clip, geom_intersect, ClassifyOutput, ClipOutput, IntersectOutput, IntersectRow};
pub use manufactured::ManufacturedSolution;
pub use study::{convergence, fit_slope, run, ConvergenceOutput, ReportRow, RunOutput, SlabRow, SlopeRow};

use crate::assembly::{AssemblyError, ExactSolution, ModelProblem, ScalarFn};
use crate::geometry::{GeometryError, Point, Vector};
use crate::mesh::{CartesianMesh, MeshError};

/// Errors surfaced by the harness, grouped by exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status: 2 configuration, 3 geometry, 4 solver, 1 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Geometry(_) => 3,
            HarnessError::Solver(_) => 4,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<GeometryError> for HarnessError {
    fn from(e: GeometryError) -> Self {
        HarnessError::Geometry(e.to_string())
    }
}

impl From<AssemblyError> for HarnessError {
    fn from(e: AssemblyError) -> Self {
        let msg = e.to_string();
        match e.root() {
            AssemblyError::Config(_) | AssemblyError::Mesh(MeshError::InvalidParameter(_)) => HarnessError::Config(msg),
            AssemblyError::Geometry(_) | AssemblyError::Mesh(_) | AssemblyError::TransferGeometry { .. } => {
                HarnessError::Geometry(msg)
            }
            _ => HarnessError::Solver(msg),
        }
    }
}

/// Model problem and, for manufactured data, the exact solution.
pub fn build_problem(cfg: &RunConfig, mesh: &CartesianMesh) -> (ModelProblem, Option<ExactSolution>) {
    let pc = &cfg.problem;
    let w = Vector::new(pc.advection[0], pc.advection[1]);
    let advection = (w != Vector::zeros()).then(|| Arc::new(move |_: &Point, _: f64| w) as _);
    let c0 = cfg.discretization.c0;
    match &pc.data {
        DataConfig::Manufactured { alpha, lengths } => {
            let m = ManufacturedSolution {
                alpha: *alpha,
                t_end: cfg.time.t_end,
                lengths: lengths.unwrap_or(mesh.lengths()),
                mu: pc.mu,
                advection: w,
            };
            (m.problem(c0), Some(m.exact()))
        }
        DataConfig::Constant { value } => {
            let v = *value;
            let f: ScalarFn = Arc::new(move |_, _| v);
            let mut p = ModelProblem::heat(pc.mu);
            p.advection = advection;
            p.dirichlet = f.clone();
            p.initial = f;
            p.c0 = c0;
            (p, None)
        }
        DataConfig::HeatedBody { body, walls } => {
            let (b, wl) = (*body, *walls);
            let bx = mesh.bounds();
            let tol = 1e-9 * bx.diagonal();
            let on_box = move |x: &Point| {
                (x.x - bx.min.x).abs() < tol
                    || (x.x - bx.max.x).abs() < tol
                    || (x.y - bx.min.y).abs() < tol
                    || (x.y - bx.max.y).abs() < tol
            };
            let mut p = ModelProblem::heat(pc.mu);
            p.advection = advection;
            p.dirichlet = Arc::new(move |x, _| if on_box(x) { wl } else { b });
            p.c0 = c0;
            (p, None)
        }
    }
}
