use super::{
    bucket::BucketGrid, cell_cap_interior, Aabb, CellClassification, CellKind, ConvexPolygon, DomainTiling,
    GeometryError, Partition,
};

/// A general polygon stored as convex pieces, with its parent cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCell {
    pub pieces: Vec<ConvexPolygon>,
    pub parent_current: usize,
    pub parent_previous: Option<usize>,
    pub measure: f64,
}

impl PolyCell {
    pub fn new(pieces: Vec<ConvexPolygon>, parent_current: usize, parent_previous: Option<usize>) -> Self {
        let measure = pieces.iter().map(|p| p.area()).sum();
        PolyCell {
            pieces,
            parent_current,
            parent_previous,
            measure,
        }
    }
}

/// Common refinement of the current active cells, the deformed previous cells
/// and the current domain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntersectionMesh {
    pub cells: Vec<PolyCell>,
}

impl IntersectionMesh {
    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }
}

/// Triple intersection `T ∩ T₋ ∩ int(B)`.
///
/// `previous` lists deformed previous cells as `(id, polygon)`; they must be
/// straight-sided and pairwise disjoint. Cut cells are first capped by the
/// domain and the caps are clipped by each nearby previous cell; interior cells
/// are clipped directly. Output is ordered by current cell id, then by
/// previous id.
pub fn intersect_triple(
    current: &impl Partition,
    classification: &CellClassification,
    tiling: &DomainTiling,
    previous: &[(usize, ConvexPolygon)],
) -> Result<IntersectionMesh, GeometryError> {
    let boxes: Vec<Aabb> = previous.iter().map(|(_, p)| p.bbox()).collect();
    let grid = BucketGrid::from_boxes(&boxes, current.typical_size());
    let mut cells = Vec::new();
    for k in 0..current.num_cells() {
        let kind = classification.kind(k);
        if !kind.is_active() {
            continue;
        }
        let poly = current.cell_polygon(k);
        let near = grid.query(&poly.bbox().inflate(1e-10 * poly.diameter()));
        let caps = cell_cap_interior(&poly, kind, tiling)?;
        let target: f64 = caps.iter().map(|p| p.area()).sum();
        let mut covered = 0.0;
        for i in near {
            let (id, prev) = &previous[i];
            let pieces: Vec<ConvexPolygon> = match kind {
                CellKind::Cut => caps.iter().map(|c| c.intersect(prev)).filter(|p| !p.is_empty()).collect(),
                _ => {
                    let p = poly.intersect(prev);
                    if p.is_empty() {
                        Vec::new()
                    } else {
                        vec![p]
                    }
                }
            };
            if pieces.is_empty() {
                continue;
            }
            let cell = PolyCell::new(pieces, k, Some(*id));
            covered += cell.measure;
            cells.push(cell);
        }
        let missing = target - covered;
        if missing > 1e-8 * poly.area() {
            return Err(GeometryError::Coverage { cell: k, missing });
        }
    }
    Ok(IntersectionMesh { cells })
}
