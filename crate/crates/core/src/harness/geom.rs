//! Geometry debugging: classification, single-cell clipping and the
//! intersection of a mesh with a shifted copy of itself.

use serde::Serialize;

use super::io::PolygonSet;
use super::HarnessError;
use crate::geometry::{
    cell_cap_interior, classify_cells, intersect_triple, signed_area, CellKind, ConvexPolygon, DomainTiling,
    OrientedBoundary, Partition, Point, Vector,
};
use crate::mesh::CartesianMesh;

fn kind_name(k: CellKind) -> &'static str {
    match k {
        CellKind::Interior => "IN",
        CellKind::Cut => "CUT",
        CellKind::Exterior => "OUT",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOutput {
    pub interior: usize,
    pub cut: usize,
    pub exterior: usize,
    /// `IN`, `CUT` or `OUT` per cell.
    pub kinds: Vec<&'static str>,
    #[serde(skip)]
    pub vtk: String,
}

/// Classifies every cell of `mesh` against `boundary`. The VTK output carries
/// the kind code (0 interior, 1 cut, 2 exterior) as cell data.
pub fn geom_classify(boundary: &OrientedBoundary, mesh: &CartesianMesh) -> Result<ClassifyOutput, HarnessError> {
    let cls = classify_cells(mesh, boundary)?;
    let (interior, cut, exterior) = cls.counts();
    let polys = (0..mesh.num_cells()).map(|c| mesh.cell_polygon(c).into_vertices()).collect();
    let codes = cls.kinds().iter().map(|k| k.code() as f64).collect();
    let vtk = PolygonSet::new(polys).with_cell_data("kind", codes).to_unstructured_grid("classification");
    Ok(ClassifyOutput {
        interior,
        cut,
        exterior,
        kinds: cls.kinds().iter().map(|&k| kind_name(k)).collect(),
        vtk,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipOutput {
    pub cell: usize,
    pub kind: &'static str,
    pub cell_area: f64,
    pub pieces: Vec<Vec<[f64; 2]>>,
    /// Area of each piece from its own vertex loop.
    pub areas: Vec<f64>,
    pub total: f64,
    /// Pieces are counterclockwise and their areas agree with the stored measures.
    pub consistent: bool,
    #[serde(skip)]
    pub vtk: String,
}

/// Convex pieces of `cell ∩ Ω`.
pub fn geom_clip(boundary: &OrientedBoundary, mesh: &CartesianMesh, cell: usize) -> Result<ClipOutput, HarnessError> {
    if cell >= mesh.num_cells() {
        return Err(HarnessError::Config(format!(
            "cell {cell} out of range (mesh has {} cells)",
            mesh.num_cells()
        )));
    }
    let cls = classify_cells(mesh, boundary)?;
    let tiling = DomainTiling::new(boundary, &mesh.bounds(), mesh.mean_size());
    let poly = mesh.cell_polygon(cell);
    let kind = cls.kind(cell);
    let pieces = cell_cap_interior(&poly, kind, &tiling)?;
    let cell_area = poly.area();
    let mut areas = Vec::with_capacity(pieces.len());
    let mut consistent = true;
    for p in &pieces {
        let a = signed_area(p.vertices())?;
        consistent &= a >= 0.0 && (a - p.area()).abs() <= 1e-12 * cell_area.max(1.0);
        areas.push(a);
    }
    let total: f64 = areas.iter().sum();
    consistent &= total <= cell_area * (1.0 + 1e-12);
    let vtk = PolygonSet::new(pieces.iter().map(|p| p.vertices().to_vec()).collect())
        .with_cell_data("area", areas.clone())
        .to_polydata(&format!("cell {cell}"));
    Ok(ClipOutput {
        cell,
        kind: kind_name(kind),
        cell_area,
        pieces: pieces.iter().map(|p| p.vertices().iter().map(|v| [v.x, v.y]).collect()).collect(),
        areas,
        total,
        consistent,
        vtk,
    })
}

/// One cell of the intersection mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectRow {
    pub current: usize,
    /// `-1` when the piece has no previous parent.
    pub previous: i64,
    pub pieces: usize,
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectOutput {
    pub shift: [f64; 2],
    pub cells: usize,
    #[serde(skip)]
    pub rows: Vec<IntersectRow>,
    pub total_measure: f64,
    pub domain_area: f64,
    pub relative_gap: f64,
    #[serde(skip)]
    pub vtk: String,
}

/// Rectangles of `mesh` padded by one layer of cells on every side and moved
/// by `shift`.
fn shifted_cells(mesh: &CartesianMesh, shift: &Vector) -> Vec<(usize, ConvexPolygon)> {
    let pad = |c: &[f64]| {
        let n = c.len();
        let mut v = Vec::with_capacity(n + 2);
        v.push(c[0] - (c[1] - c[0]));
        v.extend_from_slice(c);
        v.push(c[n - 1] + (c[n - 1] - c[n - 2]));
        v
    };
    let (xs, ys) = (pad(mesh.coords(0)), pad(mesh.coords(1)));
    let mut out = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let lo = Point::new(xs[i], ys[j]) + shift;
            let hi = Point::new(xs[i + 1], ys[j + 1]) + shift;
            out.push((out.len(), ConvexPolygon::rectangle(lo, hi)));
        }
    }
    out
}

/// Intersects the active cells of `mesh` and the domain with a copy of the
/// mesh moved by `shift`. The pieces must tile the domain, so
/// `total_measure` equals `domain_area` up to roundoff.
pub fn geom_intersect(
    boundary: &OrientedBoundary,
    mesh: &CartesianMesh,
    shift: [f64; 2],
) -> Result<IntersectOutput, HarnessError> {
    let end = |c: &[f64]| (c[1] - c[0]).min(c[c.len() - 1] - c[c.len() - 2]);
    if shift[0].abs() > end(mesh.coords(0)) || shift[1].abs() > end(mesh.coords(1)) {
        return Err(HarnessError::Config("shift must not exceed the boundary cell size".into()));
    }
    let bx = mesh.bounds();
    let cls = classify_cells(mesh, boundary)?;
    let tiling = DomainTiling::new(boundary, &bx, mesh.mean_size());
    let previous = shifted_cells(mesh, &Vector::new(shift[0], shift[1]));
    let im = intersect_triple(mesh, &cls, &tiling, &previous)?;
    let total_measure = im.total_measure();
    let domain_area = boundary.domain_area(&bx);
    let mut polys = Vec::new();
    let mut cur = Vec::new();
    let mut prev = Vec::new();
    for c in &im.cells {
        for p in &c.pieces {
            polys.push(p.vertices().to_vec());
            cur.push(c.parent_current as f64);
            prev.push(c.parent_previous.map_or(-1.0, |k| k as f64));
        }
    }
    let vtk = PolygonSet::new(polys)
        .with_cell_data("current", cur)
        .with_cell_data("previous", prev)
        .to_polydata("intersection");
    let rows = im
        .cells
        .iter()
        .map(|c| IntersectRow {
            current: c.parent_current,
            previous: c.parent_previous.map_or(-1, |k| k as i64),
            pieces: c.pieces.len(),
            measure: c.measure,
        })
        .collect();
    Ok(IntersectOutput {
        shift,
        cells: im.cells.len(),
        rows,
        total_measure,
        domain_area,
        relative_gap: (total_measure - domain_area).abs() / domain_area,
        vtk,
    })
}
