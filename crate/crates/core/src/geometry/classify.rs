use std::collections::VecDeque;

use super::{
    bucket::BucketGrid, clip_segment, Aabb, ConvexPolygon, DomainTiling, GeometryError, OrientedBoundary, Point,
    Vector, SNAP_RELATIVE,
};

/// A spatial partition into convex cells with face adjacency.
pub trait Partition {
    fn num_cells(&self) -> usize;
    fn cell_polygon(&self, cell: usize) -> ConvexPolygon;
    /// Cells sharing a face with `cell`.
    fn cell_neighbors(&self, cell: usize) -> Vec<usize>;
    /// Characteristic cell size, used to size bucket grids.
    fn typical_size(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Interior,
    Cut,
    Exterior,
}

impl CellKind {
    pub fn is_active(self) -> bool {
        self != CellKind::Exterior
    }

    pub fn code(self) -> i32 {
        match self {
            CellKind::Interior => 0,
            CellKind::Cut => 1,
            CellKind::Exterior => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellClassification {
    kinds: Vec<CellKind>,
}

impl CellClassification {
    pub fn from_kinds(kinds: Vec<CellKind>) -> Self {
        CellClassification { kinds }
    }

    pub fn kinds(&self) -> &[CellKind] {
        &self.kinds
    }

    pub fn kind(&self, cell: usize) -> CellKind {
        self.kinds[cell]
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// (interior, cut, exterior) counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for k in &self.kinds {
            match k {
                CellKind::Interior => c.0 += 1,
                CellKind::Cut => c.1 += 1,
                CellKind::Exterior => c.2 += 1,
            }
        }
        c
    }
}

/// Classifies cells as interior, cut or exterior.
///
/// A cell is cut when a boundary edge meets the closed cell. The remaining
/// cells are grouped into face-connected components, and each component takes
/// the side of its first cell's centroid.
pub fn classify_cells(mesh: &impl Partition, boundary: &OrientedBoundary) -> Result<CellClassification, GeometryError> {
    let n = mesh.num_cells();
    let h = mesh.typical_size();
    let edge_boxes: Vec<Aabb> = (0..boundary.num_edges())
        .map(|k| {
            let (a, b) = boundary.edge(k);
            Aabb::from_points(&[a, b])
        })
        .collect();
    let edges = BucketGrid::from_boxes(&edge_boxes, h);
    let vertex_boxes: Vec<Aabb> = boundary.vertices().iter().map(|p| Aabb::new(*p, *p)).collect();
    let verts = BucketGrid::from_boxes(&vertex_boxes, h);

    let mut kinds: Vec<Option<CellKind>> = vec![None; n];
    for (c, kind) in kinds.iter_mut().enumerate() {
        let poly = mesh.cell_polygon(c);
        let eps = SNAP_RELATIVE * poly.diameter();
        let bb = poly.bbox().inflate(eps);
        for v in verts.query(&bb) {
            let p = boundary.vertices()[v];
            for q in poly.vertices() {
                let d = (p - q).norm();
                if d > 0.0 && d <= eps {
                    return Err(GeometryError::Tolerance { cell: c, vertex: v });
                }
            }
        }
        let cut = edges.query(&bb).into_iter().any(|k| {
            let (a, b) = boundary.edge(k);
            clip_segment(&a, &b, &poly, eps).is_some()
        });
        if cut {
            *kind = Some(CellKind::Cut);
        }
    }

    let mut queue = VecDeque::new();
    for seed in 0..n {
        if kinds[seed].is_some() {
            continue;
        }
        let side = if boundary.contains(&mesh.cell_polygon(seed).centroid()) {
            CellKind::Interior
        } else {
            CellKind::Exterior
        };
        kinds[seed] = Some(side);
        queue.push_back(seed);
        while let Some(c) = queue.pop_front() {
            for nb in mesh.cell_neighbors(c) {
                if kinds[nb].is_none() {
                    kinds[nb] = Some(side);
                    queue.push_back(nb);
                }
            }
        }
    }
    Ok(CellClassification {
        kinds: kinds.into_iter().map(|k| k.expect("every cell visited")).collect(),
    })
}

/// Convex pieces of `cell ∩ Ω`. Interior cells come back whole, exterior cells empty.
pub fn cell_cap_interior(
    cell: &ConvexPolygon,
    kind: CellKind,
    tiling: &DomainTiling,
) -> Result<Vec<ConvexPolygon>, GeometryError> {
    match kind {
        CellKind::Interior => Ok(vec![cell.clone()]),
        CellKind::Exterior => Ok(Vec::new()),
        CellKind::Cut => {
            let pieces = tiling.clip(cell);
            let total: f64 = pieces.iter().map(|p| p.area()).sum();
            let area = cell.area();
            if pieces.iter().any(|p| p.area() < 0.0) || total > area * (1.0 + 1e-9) {
                return Err(GeometryError::InvalidGeometry(format!(
                    "cut pieces cover {total:.6e} of a cell of area {area:.6e}; boundary orientation is inconsistent"
                )));
            }
            Ok(pieces)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPart {
    /// Piece of boundary edge `edge`.
    Embedded { edge: usize },
    /// Piece of an artificial box side: 0 bottom, 1 right, 2 top, 3 left.
    Artificial { side: usize },
}

/// A straight boundary segment inside one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFacet {
    pub cell: usize,
    pub a: Point,
    pub b: Point,
    /// Outward unit normal of the domain.
    pub normal: Vector,
    pub part: BoundaryPart,
}

impl BoundaryFacet {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }
}

/// Boundary segments per active cell.
///
/// Embedded edges are clipped to each cut cell. A piece lying on a face shared
/// by two cells is kept by the cell on its interior side. When `artificial` is
/// given, the parts of the box sides inside the domain are added as well.
pub fn boundary_facets(
    mesh: &impl Partition,
    classification: &CellClassification,
    caps: &[Vec<ConvexPolygon>],
    boundary: &OrientedBoundary,
    artificial: Option<&Aabb>,
) -> Vec<BoundaryFacet> {
    let h = mesh.typical_size();
    let edge_boxes: Vec<Aabb> = (0..boundary.num_edges())
        .map(|k| {
            let (a, b) = boundary.edge(k);
            Aabb::from_points(&[a, b])
        })
        .collect();
    let edges = BucketGrid::from_boxes(&edge_boxes, h);
    let mut out = Vec::new();
    for c in 0..mesh.num_cells() {
        let kind = classification.kind(c);
        if !kind.is_active() {
            continue;
        }
        let poly = mesh.cell_polygon(c);
        let diam = poly.diameter();
        let eps = SNAP_RELATIVE * diam;
        // intervals are clipped tighter than the snap tolerance so that pieces
        // from neighbouring cells do not overlap
        let tight = 1e-14 * diam;
        if kind == CellKind::Cut {
            for k in edges.query(&poly.bbox().inflate(eps)) {
                let (a, b) = boundary.edge(k);
                let Some((t0, t1)) = clip_segment(&a, &b, &poly, tight) else {
                    continue;
                };
                let (pa, pb) = (a + (b - a) * t0, a + (b - a) * t1);
                if (pb - pa).norm() <= eps {
                    continue;
                }
                let normal = boundary.outward_normal(k);
                let probe = Point::from(0.5 * (pa.coords + pb.coords)) - normal * (1e-7 * diam);
                if !poly.contains(&probe, 0.0) {
                    continue;
                }
                out.push(BoundaryFacet {
                    cell: c,
                    a: pa,
                    b: pb,
                    normal,
                    part: BoundaryPart::Embedded { edge: k },
                });
            }
        }
        if let Some(bx) = artificial {
            let v = poly.vertices();
            let m = v.len();
            for i in 0..m {
                let (p, q) = (v[i], v[(i + 1) % m]);
                let Some(side) = box_side(bx, &p, &q, eps) else {
                    continue;
                };
                let mut intervals: Vec<(f64, f64)> = caps[c]
                    .iter()
                    .filter_map(|piece| clip_segment(&p, &q, piece, tight))
                    .collect();
                intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
                let len = (q - p).norm();
                let mut merged: Vec<(f64, f64)> = Vec::new();
                for (s0, s1) in intervals {
                    match merged.last_mut() {
                        Some(last) if s0 <= last.1 + eps / len => last.1 = last.1.max(s1),
                        _ => merged.push((s0, s1)),
                    }
                }
                let normal = [
                    Vector::new(0.0, -1.0),
                    Vector::new(1.0, 0.0),
                    Vector::new(0.0, 1.0),
                    Vector::new(-1.0, 0.0),
                ][side];
                for (s0, s1) in merged {
                    if (s1 - s0) * len <= eps {
                        continue;
                    }
                    out.push(BoundaryFacet {
                        cell: c,
                        a: p + (q - p) * s0,
                        b: p + (q - p) * s1,
                        normal,
                        part: BoundaryPart::Artificial { side },
                    });
                }
            }
        }
    }
    out
}

fn box_side(bx: &Aabb, p: &Point, q: &Point, eps: f64) -> Option<usize> {
    if (p.y - bx.min.y).abs() <= eps && (q.y - bx.min.y).abs() <= eps {
        Some(0)
    } else if (p.x - bx.max.x).abs() <= eps && (q.x - bx.max.x).abs() <= eps {
        Some(1)
    } else if (p.y - bx.max.y).abs() <= eps && (q.y - bx.max.y).abs() <= eps {
        Some(2)
    } else if (p.x - bx.min.x).abs() <= eps && (q.x - bx.min.x).abs() <= eps {
        Some(3)
    } else {
        None
    }
}
