//! Lagrange spaces on the background mesh, temporal bases, space-time tensor
//! products and cell aggregation.
//!
//! Global DOF layout: the order-`p` node lattice has `(nx·p + 1)(ny·p + 1)`
//! nodes, node `(I, J)` having id `J·(nx·p + 1) + I`. A field with `r`
//! components and `nq` temporal nodes stores its value at node `n`,
//! component `c`, time node `k` at `(n·r + c)·nq + k`, so every node owns a
//! contiguous block of `r·nq` entries.

mod aggregation;
mod basis1d;
mod element;
mod reduce;
mod spatial;
mod tensor;

pub use aggregation::{build_aggregates, AggregationMap, NodeRole};
pub use basis1d::ScalarBasis1D;
pub use element::{LagrangeElement, LocalShape};
pub use reduce::{constrain_system, AffineMap, ReducedSystem, TripletMatrix};
pub use spatial::{PhysicalShape, SpatialSpace};
pub use tensor::TensorShapeSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("unsupported polynomial order {0}")]
    InvalidOrder(usize),
    #[error("no interior cell is reachable from cell {cell}")]
    AggregationFailure { cell: usize },
    #[error("the active mesh has no interior cell")]
    NoInteriorCell,
    #[error("singular system: {0}")]
    SingularSystem(String),
}
