//! Planar polygon machinery: orientation, half-plane clipping, convex
//! decomposition, cell classification against an oriented boundary and the
//! triple intersection used for inter-slab transfer.
//!
//! All predicates are tolerance based. The snapping tolerance is
//! [`SNAP_RELATIVE`] times the diameter of the polygon being processed; a
//! vertex closer than that to a clip line is projected onto the line.

mod boundary;
mod bucket;
mod classify;
mod cut;
mod decompose;
mod intersect;

pub use boundary::OrientedBoundary;
pub use bucket::{restrict, BucketGrid};
pub use classify::{
    boundary_facets, cell_cap_interior, classify_cells, BoundaryFacet, BoundaryPart, CellClassification, CellKind,
    Partition,
};
pub use cut::CutGeometry;
pub use decompose::{convex_decompose, DomainTiling};
pub use intersect::{intersect_triple, IntersectionMesh, PolyCell};

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;
pub type Vector = Vector2<f64>;

/// Relative snapping tolerance (multiplied by a polygon diameter).
pub const SNAP_RELATIVE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("boundary vertex {vertex} lies within snapping distance of a vertex of cell {cell}")]
    Tolerance { cell: usize, vertex: usize },
    #[error("coverage error: {missing:.3e} of the domain inside current cell {cell} is not covered by previous cells")]
    Coverage { cell: usize, missing: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn new(min: Point, max: Point) -> Self {
        Aabb { min, max }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Aabb { min, max }
    }

    pub fn inflate(&self, margin: f64) -> Self {
        Aabb {
            min: Point::new(self.min.x - margin, self.min.y - margin),
            max: Point::new(self.max.x + margin, self.max.y + margin),
        }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x && other.min.x <= self.max.x && self.min.y <= other.max.y && other.min.y <= self.max.y
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.min.x <= other.min.x && self.min.y <= other.min.y && other.max.x <= self.max.x && other.max.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Counterclockwise corner loop.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

/// 2D cross product of `a` and `b`.
#[inline]
pub fn cross(a: &Vector, b: &Vector) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when counterclockwise.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

fn shoelace(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut sum = 0.0;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        sum += a.x * b.y - b.x * a.y;
    }
    0.5 * sum
}

/// Shoelace area of a vertex loop, positive iff counterclockwise.
pub fn signed_area(poly: &[Point]) -> Result<f64, GeometryError> {
    if poly.len() < 3 {
        return Err(GeometryError::Degenerate(format!(
            "a polygon needs at least 3 vertices, got {}",
            poly.len()
        )));
    }
    Ok(shoelace(poly))
}

fn diameter(points: &[Point]) -> f64 {
    Aabb::from_points(points).diagonal()
}

/// Closed half-plane `{x : normal . x <= offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    normal: Vector,
    offset: f64,
}

impl HalfPlane {
    /// Normalizes `normal` (and scales `offset` accordingly).
    pub fn new(normal: Vector, offset: f64) -> Result<Self, GeometryError> {
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(GeometryError::Degenerate("half-plane normal has zero length".into()));
        }
        Ok(HalfPlane {
            normal: normal / len,
            offset: offset / len,
        })
    }

    /// Half-plane to the left of the directed line `a -> b`.
    pub fn left_of(a: &Point, b: &Point) -> Result<Self, GeometryError> {
        let d = b - a;
        let normal = Vector::new(d.y, -d.x);
        let offset = normal.dot(&a.coords);
        Self::new(normal, offset)
    }

    pub fn normal(&self) -> Vector {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance; negative inside.
    #[inline]
    pub fn distance(&self, p: &Point) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    pub fn flipped(&self) -> Self {
        HalfPlane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

/// Counterclockwise convex vertex loop. An empty polygon is a valid value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Wraps a loop without checking convexity; clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point>) -> Self {
        if vertices.len() >= 3 && shoelace(&vertices) < 0.0 {
            vertices.reverse();
        }
        ConvexPolygon { vertices }
    }

    /// Wraps a loop after checking that it is convex within tolerance.
    pub fn try_new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let poly = Self::new(vertices);
        if poly.vertices.len() < 3 {
            return Err(GeometryError::Degenerate("convex polygon needs 3 vertices".into()));
        }
        if !is_convex(&poly.vertices) {
            return Err(GeometryError::InvalidGeometry("polygon is not convex".into()));
        }
        Ok(poly)
    }

    pub fn empty() -> Self {
        ConvexPolygon { vertices: Vec::new() }
    }

    pub fn rectangle(min: Point, max: Point) -> Self {
        ConvexPolygon {
            vertices: Aabb::new(min, max).corners().to_vec(),
        }
    }

    pub fn triangle(a: Point, b: Point, c: Point) -> Self {
        Self::new(vec![a, b, c])
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            shoelace(&self.vertices)
        }
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let a = self.area();
        if n == 0 {
            return Point::origin();
        }
        if a.abs() < f64::MIN_POSITIVE {
            let s = self.vertices.iter().fold(Vector::zeros(), |acc, p| acc + p.coords);
            return Point::from(s / n as f64);
        }
        let mut c = Vector::zeros();
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            let w = p.x * q.y - q.x * p.y;
            c += (p.coords + q.coords) * w;
        }
        Point::from(c / (6.0 * a))
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    /// Edge half-planes; the polygon is their intersection.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let n = self.vertices.len();
        (0..n)
            .filter_map(|i| HalfPlane::left_of(&self.vertices[i], &self.vertices[(i + 1) % n]).ok())
            .collect()
    }

    /// Closed containment test with an absolute tolerance.
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        !self.is_empty() && self.half_planes().iter().all(|h| h.distance(p) <= tol)
    }

    /// Fan triangulation from the first vertex.
    pub fn fan(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        let v = &self.vertices;
        (1..v.len().saturating_sub(1)).map(move |i| [v[0], v[i], v[i + 1]])
    }

    /// Intersection with another convex polygon.
    pub fn intersect(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let mut out = self.clone();
        for h in other.half_planes() {
            if out.is_empty() {
                break;
            }
            out = clip_convex_by_halfplane(&out, &h);
        }
        out
    }

    pub fn translated(&self, by: &Vector) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|p| p + by).collect(),
        }
    }
}

fn is_convex(vertices: &[Point]) -> bool {
    let n = vertices.len();
    let d = diameter(vertices);
    let tol = SNAP_RELATIVE * d * d;
    (0..n).all(|i| {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let c = &vertices[(i + 2) % n];
        orient(a, b, c) >= -tol
    })
}

/// Clips a convex polygon to `h`. Vertices within the snapping distance of the
/// clip line are projected onto it; slivers collapse to the empty polygon.
pub fn clip_convex_by_halfplane(poly: &ConvexPolygon, h: &HalfPlane) -> ConvexPolygon {
    if poly.is_empty() {
        return ConvexPolygon::empty();
    }
    let verts = poly.vertices();
    let eps = SNAP_RELATIVE * poly.diameter();
    let mut pts: Vec<Point> = Vec::with_capacity(verts.len());
    let mut dist: Vec<f64> = Vec::with_capacity(verts.len());
    for p in verts {
        let d = h.distance(p);
        if d.abs() <= eps {
            pts.push(p - h.normal * d);
            dist.push(0.0);
        } else {
            pts.push(*p);
            dist.push(d);
        }
    }
    if dist.iter().all(|&d| d <= 0.0) {
        return ConvexPolygon { vertices: pts };
    }
    if dist.iter().all(|&d| d >= 0.0) {
        return ConvexPolygon::empty();
    }

    let n = pts.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (di, dj) = (dist[i], dist[j]);
        if di <= 0.0 {
            out.push(pts[i]);
        }
        if (di < 0.0 && dj > 0.0) || (di > 0.0 && dj < 0.0) {
            let s = di / (di - dj);
            out.push(pts[i] + (pts[j] - pts[i]) * s);
        }
    }
    dedup_loop(&mut out, eps);
    let result = ConvexPolygon { vertices: out };
    if result.is_empty() || result.area() <= eps * poly.diameter() {
        ConvexPolygon::empty()
    } else {
        result
    }
}

fn dedup_loop(pts: &mut Vec<Point>, eps: f64) {
    pts.dedup_by(|a, b| (*a - *b).norm() <= eps);
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= eps {
        pts.pop();
    }
}

/// Clips the segment `a -> b` to a convex polygon (closed, with absolute
/// tolerance `tol`). Returns the parameter interval along the segment.
pub fn clip_segment(a: &Point, b: &Point, poly: &ConvexPolygon, tol: f64) -> Option<(f64, f64)> {
    if poly.is_empty() {
        return None;
    }
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for h in poly.half_planes() {
        let da = h.distance(a) - tol;
        let db = h.distance(b) - tol;
        if da > 0.0 && db > 0.0 {
            return None;
        }
        if da <= 0.0 && db <= 0.0 {
            continue;
        }
        let s = da / (da - db);
        if da > 0.0 {
            t0 = t0.max(s);
        } else {
            t1 = t1.min(s);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Whether two closed segments intersect (touching counts).
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point, tol: f64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let scale = ((b - a).norm() + (d - c).norm()).max(f64::MIN_POSITIVE);
    let t = tol * scale;
    if ((d1 > t && d2 < -t) || (d1 < -t && d2 > t)) && ((d3 > t && d4 < -t) || (d3 < -t && d4 > t)) {
        return true;
    }
    let on = |p: &Point, q: &Point, r: &Point, o: f64| -> bool {
        o.abs() <= t
            && r.x >= p.x.min(q.x) - tol
            && r.x <= p.x.max(q.x) + tol
            && r.y >= p.y.min(q.y) - tol
            && r.y <= p.y.max(q.y) + tol
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}
