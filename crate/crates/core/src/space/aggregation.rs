use std::collections::BTreeMap;

use super::{SpaceError, SpatialSpace};
use crate::geometry::{CellKind, Partition};
use crate::mesh::ActiveMesh;

/// Role of a lattice node in the aggregated space.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeRole {
    /// Touched by an interior cell; carries its own unknown.
    Free,
    /// Value taken from the root cell polynomial: `(master node, coefficient)` pairs.
    Constrained(Vec<(usize, f64)>),
    /// Outside the extended mesh.
    Unused,
}

/// Root cells of the active and extended cells and the induced node constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationMap {
    roots: Vec<Option<usize>>,
    dist: Vec<Option<usize>>,
    roles: Vec<NodeRole>,
    owners: BTreeMap<usize, usize>,
}

// Layered breadth-first search: a cell first reached at layer d + 1 takes the
// smallest root among its layer-d neighbours.
fn grow(
    mesh: &impl Partition,
    allowed: &[bool],
    roots: &mut [Option<usize>],
    dist: &mut [Option<usize>],
) {
    let mut layer: usize = 0;
    loop {
        let frontier: Vec<usize> = (0..roots.len()).filter(|&c| dist[c] == Some(layer)).collect();
        let pending = (0..roots.len()).any(|c| dist[c].is_some_and(|d| d > layer));
        if frontier.is_empty() && !pending {
            break;
        }
        let mut found: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &frontier {
            let r = roots[c].expect("frontier cells have roots");
            for nb in mesh.cell_neighbors(c) {
                if !allowed[nb] || dist[nb].is_some() {
                    continue;
                }
                found.entry(nb).and_modify(|e| *e = (*e).min(r)).or_insert(r);
            }
        }
        for (c, r) in found {
            roots[c] = Some(r);
            dist[c] = Some(layer + 1);
        }
        layer += 1;
    }
}

/// Assigns every active cell the nearest interior cell (face-path distance,
/// lowest id on ties), then every extended-only cell, without changing the
/// assignment of active cells.
pub fn build_aggregates(space: &SpatialSpace, active: &ActiveMesh) -> Result<AggregationMap, SpaceError> {
    let mesh = space.mesh();
    let n = mesh.num_cells();
    let mut roots = vec![None; n];
    let mut dist = vec![None; n];
    for c in 0..n {
        if active.is_active(c) && active.kind(c) == CellKind::Interior {
            roots[c] = Some(c);
            dist[c] = Some(0);
        }
    }
    if roots.iter().all(|r| r.is_none()) {
        return Err(SpaceError::NoInteriorCell);
    }
    grow(mesh, active.active_flags(), &mut roots, &mut dist);
    if let Some(c) = active.active_cells().find(|&c| roots[c].is_none()) {
        return Err(SpaceError::AggregationFailure { cell: c });
    }
    grow(mesh, active.extended_flags(), &mut roots, &mut dist);
    if let Some(c) = active.extended_cells().find(|&c| roots[c].is_none()) {
        return Err(SpaceError::AggregationFailure { cell: c });
    }

    let nn = space.num_nodes();
    // 0 unused, 1 active, 2 extended-only
    let mut reach = vec![0u8; nn];
    let mut free = vec![false; nn];
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; nn];
    for c in active.extended_cells() {
        let is_active = active.is_active(c);
        let interior = is_active && active.kind(c) == CellKind::Interior;
        let key = (dist[c].unwrap_or(usize::MAX), c);
        for node in space.cell_nodes(c) {
            if interior {
                free[node] = true;
            }
            let level = if is_active { 1 } else { 2 };
            if reach[node] == 0 || level < reach[node] {
                reach[node] = level;
                owner[node] = Some(key);
            } else if level == reach[node] && Some(key) < owner[node] {
                owner[node] = Some(key);
            }
        }
    }
    let mut roles = vec![NodeRole::Unused; nn];
    let mut owners = BTreeMap::new();
    for node in 0..nn {
        if free[node] {
            roles[node] = NodeRole::Free;
        } else if let Some((_, cell)) = owner[node] {
            let root = roots[cell].expect("extended cells have roots");
            let vals = space.values_at(root, &space.node_point(node));
            let masters = space.cell_nodes(root);
            let pairs = masters
                .into_iter()
                .zip(vals)
                .filter(|(_, v)| *v != 0.0)
                .collect();
            roles[node] = NodeRole::Constrained(pairs);
            owners.insert(node, cell);
        }
    }
    Ok(AggregationMap {
        roots,
        dist,
        roles,
        owners,
    })
}

impl AggregationMap {
    /// Root interior cell of `cell`, if it was reached.
    pub fn root(&self, cell: usize) -> Option<usize> {
        self.roots[cell]
    }

    pub fn roots(&self) -> &[Option<usize>] {
        &self.roots
    }

    /// Face-path distance from `cell` to its root.
    pub fn distance(&self, cell: usize) -> Option<usize> {
        self.dist[cell]
    }

    pub fn role(&self, node: usize) -> &NodeRole {
        &self.roles[node]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    /// Cell whose root defines the constraint of `node`.
    pub fn owner(&self, node: usize) -> Option<usize> {
        self.owners.get(&node).copied()
    }

    pub fn num_free(&self) -> usize {
        self.roles.iter().filter(|r| matches!(r, NodeRole::Free)).count()
    }

    pub fn num_constrained(&self) -> usize {
        self.owners.len()
    }

    /// Fills constrained entries in place. Each node owns `block` consecutive
    /// entries of `values` and every entry of a block is extended alike.
    pub fn extension_apply(&self, values: &mut [f64], block: usize) {
        for (node, role) in self.roles.iter().enumerate() {
            if let NodeRole::Constrained(pairs) = role {
                for r in 0..block {
                    let v: f64 = pairs.iter().map(|(m, c)| c * values[m * block + r]).sum();
                    values[node * block + r] = v;
                }
            }
        }
    }
}
