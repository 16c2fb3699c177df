use crate::geometry::{clip_segment, BoundaryPart, ConvexPolygon, CutGeometry, Point, Vector};
use crate::mesh::{ActiveMesh, CartesianMesh};
use crate::quadrature::{gauss_legendre, polygon_rule, reference_triangle_rule};

/// Spatial quadrature point tagged with the simplex of the split holding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumePoint {
    pub simplex: usize,
    pub x: Point,
    pub weight: f64,
}

/// Quadrature point on a boundary facet (reference configuration).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetPoint {
    pub simplex: usize,
    pub x: Point,
    pub weight: f64,
    pub normal: Vector,
    pub part: BoundaryPart,
}

/// Spatial rules per active cell plus the temporal rule on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct CutQuadrature {
    pub cells: Vec<usize>,
    pub volume: Vec<Vec<VolumePoint>>,
    pub facets: Vec<Vec<FacetPoint>>,
    pub time_points: Vec<f64>,
    pub time_weights: Vec<f64>,
    /// Pieces skipped because their area vanished.
    pub dropped: usize,
}

/// Triangles `(simplex id, polygon)` of the split of `cell`.
pub(crate) fn split_simplices(mesh: &CartesianMesh, cell: usize) -> Vec<(usize, ConvexPolygon)> {
    let (o, h) = mesh.rect(cell);
    let v00 = o;
    let v10 = Point::new(o.x + h[0], o.y);
    let v11 = Point::new(o.x + h[0], o.y + h[1]);
    let v01 = Point::new(o.x, o.y + h[1]);
    let q = mesh.quad_index(cell);
    let lower = (2 * q, ConvexPolygon::triangle(v00, v10, v11));
    let upper = (2 * q + 1, ConvexPolygon::triangle(v00, v11, v01));
    if mesh.is_simplex() {
        if cell % 2 == 0 {
            vec![lower]
        } else {
            vec![upper]
        }
    } else {
        vec![lower, upper]
    }
}

/// Number of points per direction of the collapsed triangle rule: exact for
/// products of two shape functions (degree `4p` on quads, `2p + 2` on triangles).
pub(crate) fn spatial_points(mesh: &CartesianMesh, p: usize) -> usize {
    if mesh.is_simplex() {
        p + 2
    } else {
        (2 * p + 1).max(p + 2)
    }
}

/// Fan rules on the cut pieces of every active cell, each piece first split
/// along the quad diagonal so that the piecewise-affine map is smooth on it,
/// and Gauss rules on the boundary facets. Time uses `q + 2` Gauss points.
pub fn build_quadrature(
    mesh: &CartesianMesh,
    active: &ActiveMesh,
    geo: &CutGeometry,
    p: usize,
    q: usize,
) -> CutQuadrature {
    let tri = reference_triangle_rule(spatial_points(mesh, p));
    let (fs, fw) = gauss_legendre(2 * p + 1);
    let (time_points, time_weights) = gauss_legendre(q + 2);
    let mut out = CutQuadrature {
        cells: Vec::new(),
        volume: Vec::new(),
        facets: Vec::new(),
        time_points,
        time_weights,
        dropped: 0,
    };
    for c in active.active_cells() {
        let simplices = split_simplices(mesh, c);
        let mut vol = Vec::new();
        for piece in &geo.caps[c] {
            for (sid, t) in &simplices {
                let sub = if simplices.len() == 1 { piece.clone() } else { piece.intersect(t) };
                if sub.is_empty() || sub.area() <= 0.0 {
                    if simplices.len() == 1 {
                        out.dropped += 1;
                    }
                    continue;
                }
                vol.extend(polygon_rule(&sub, &tri).into_iter().map(|(x, weight)| VolumePoint {
                    simplex: *sid,
                    x,
                    weight,
                }));
            }
        }
        let mut fac = Vec::new();
        for f in geo.facets.iter().filter(|f| f.cell == c) {
            let tight = 1e-14 * f.length().max(1.0);
            for (sid, t) in &simplices {
                let Some((t0, t1)) = clip_segment(&f.a, &f.b, t, tight) else {
                    continue;
                };
                let (a, b) = (f.a + (f.b - f.a) * t0, f.a + (f.b - f.a) * t1);
                let len = (b - a).norm();
                if len <= 0.0 {
                    continue;
                }
                for (s, w) in fs.iter().zip(&fw) {
                    fac.push(FacetPoint {
                        simplex: *sid,
                        x: a + (b - a) * *s,
                        weight: w * len,
                        normal: f.normal,
                        part: f.part,
                    });
                }
            }
        }
        out.cells.push(c);
        out.volume.push(vol);
        out.facets.push(fac);
    }
    out
}

impl CutQuadrature {
    /// Sum of the spatial weights of active cell index `i`.
    pub fn measure(&self, i: usize) -> f64 {
        self.volume[i].iter().map(|p| p.weight).sum()
    }
}
