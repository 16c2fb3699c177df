use super::{
    bucket::BucketGrid, orient, segments_intersect, signed_area, Aabb, ConvexPolygon, GeometryError, OrientedBoundary,
    Point,
};

/// Splits a simple polygon into convex pieces.
///
/// A convex input comes back unchanged as a single piece. Otherwise collinear
/// vertices are dropped, the loop is ear-clipped, and adjacent triangles are
/// greedily merged while the union stays convex (Hertel–Mehlhorn).
pub fn convex_decompose(region: &[Point]) -> Result<Vec<ConvexPolygon>, GeometryError> {
    let area = signed_area(region)?;
    let n = region.len();
    let diam = Aabb::from_points(region).diagonal();
    let tol = 1e-12 * diam;
    for a in 0..n {
        for b in (a + 1)..n {
            if b == a + 1 || (a == 0 && b == n - 1) {
                continue;
            }
            if segments_intersect(&region[a], &region[(a + 1) % n], &region[b], &region[(b + 1) % n], tol) {
                return Err(GeometryError::InvalidGeometry(format!(
                    "polygon edges {a} and {b} intersect"
                )));
            }
        }
    }

    if !(area.abs() > 0.0) {
        return Err(GeometryError::Degenerate("polygon has zero area".into()));
    }
    let mut pts = region.to_vec();
    if area < 0.0 {
        pts.reverse();
    }
    if let Ok(poly) = ConvexPolygon::try_new(pts.clone()) {
        return Ok(vec![poly]);
    }

    let eps = 1e-12 * diam * diam;
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    loop {
        let m = idx.len();
        let drop = (0..m).find(|&k| {
            let (a, b, c) = (pts[idx[(k + m - 1) % m]], pts[idx[k]], pts[idx[(k + 1) % m]]);
            orient(&a, &b, &c).abs() <= eps
        });
        match drop {
            Some(k) if m > 3 => {
                idx.remove(k);
            }
            _ => break,
        }
    }

    let triangles = ear_clip(&pts, idx.clone(), eps)?;
    let mut polys: Vec<Vec<usize>> = triangles.into_iter().map(|t| t.to_vec()).collect();
    'merge: loop {
        for a in 0..polys.len() {
            for b in (a + 1)..polys.len() {
                if let Some(merged) = merge_if_convex(&pts, &polys[a], &polys[b], eps) {
                    polys[a] = merged;
                    polys.swap_remove(b);
                    continue 'merge;
                }
            }
        }
        break;
    }
    Ok(polys
        .into_iter()
        .map(|p| ConvexPolygon::new(p.into_iter().map(|i| pts[i]).collect()))
        .collect())
}

fn ear_clip(pts: &[Point], mut idx: Vec<usize>, eps: f64) -> Result<Vec<[usize; 3]>, GeometryError> {
    let mut out = Vec::with_capacity(idx.len().saturating_sub(2));
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&k| {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if orient(&a, &b, &c) <= eps {
                return false;
            }
            idx.iter().all(|&j| {
                if j == ia || j == ib || j == ic {
                    return true;
                }
                let p = pts[j];
                let inside = orient(&a, &b, &p) >= -eps && orient(&b, &c, &p) >= -eps && orient(&c, &a, &p) >= -eps;
                !inside
            })
        });
        let Some(k) = ear else {
            return Err(GeometryError::InvalidGeometry("ear clipping found no ear".into()));
        };
        out.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
        idx.remove(k);
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

fn merge_if_convex(pts: &[Point], a: &[usize], b: &[usize], eps: f64) -> Option<Vec<usize>> {
    let na = a.len();
    let nb = b.len();
    for i in 0..na {
        let (u, v) = (a[i], a[(i + 1) % na]);
        for j in 0..nb {
            if b[j] == v && b[(j + 1) % nb] == u {
                // a: ..., u, v, ...   b: ..., v, u, ...
                let mut merged = Vec::with_capacity(na + nb - 2);
                for k in 0..na {
                    merged.push(a[(i + 1 + k) % na]);
                }
                // merged starts with v and ends with u; splice b's vertices after u
                for k in 2..nb {
                    merged.push(b[(j + k) % nb]);
                }
                let m = merged.len();
                let convex = (0..m).all(|k| {
                    orient(&pts[merged[k]], &pts[merged[(k + 1) % m]], &pts[merged[(k + 2) % m]]) >= -eps
                });
                return convex.then_some(merged);
            }
        }
    }
    None
}

/// Convex tiling of a domain clipped to the artificial box, by vertical-slab
/// trapezoids. Works for any number of loops, bounded or complement.
#[derive(Debug, Clone)]
pub struct DomainTiling {
    pieces: Vec<ConvexPolygon>,
    grid: BucketGrid,
    bbox: Aabb,
}

impl DomainTiling {
    /// `bucket_size` sizes the restriction grid (usually the cell size).
    pub fn new(boundary: &OrientedBoundary, bx: &Aabb, bucket_size: f64) -> Self {
        let mut segs: Vec<(Point, Point)> = (0..boundary.num_edges()).map(|k| boundary.edge(k)).collect();
        if boundary.is_complement() {
            let c = bx.corners();
            for i in 0..4 {
                segs.push((c[i], c[(i + 1) % 4]));
            }
        }
        let all: Vec<Point> = segs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let bbox = Aabb::from_points(&all);
        let tol = 1e-12 * bbox.diagonal().max(f64::MIN_POSITIVE);

        let mut xs: Vec<f64> = all.iter().map(|p| p.x).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= tol);

        let y_at = |a: &Point, b: &Point, x: f64| -> f64 {
            if x == a.x {
                return a.y;
            }
            if x == b.x {
                return b.y;
            }
            let s = ((x - a.x) / (b.x - a.x)).clamp(0.0, 1.0);
            a.y + s * (b.y - a.y)
        };

        let mut pieces = Vec::new();
        for w in xs.windows(2) {
            let (xa, xb) = (w[0], w[1]);
            if xb - xa <= tol {
                continue;
            }
            let xm = 0.5 * (xa + xb);
            let mut crossing: Vec<(f64, f64, f64, i32)> = segs
                .iter()
                .filter(|(a, b)| (b.x - a.x).abs() > tol && a.x.min(b.x) <= xa + tol && a.x.max(b.x) >= xb - tol)
                .map(|(a, b)| {
                    let dir = if b.x > a.x { 1 } else { -1 };
                    (y_at(a, b, xm), y_at(a, b, xa), y_at(a, b, xb), dir)
                })
                .collect();
            crossing.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut count = 0;
            for i in 0..crossing.len().saturating_sub(1) {
                count += crossing[i].3;
                if count >= 1 {
                    let (lo, hi) = (crossing[i], crossing[i + 1]);
                    let mut v = vec![
                        Point::new(xa, lo.1),
                        Point::new(xb, lo.2),
                        Point::new(xb, hi.2),
                        Point::new(xa, hi.1),
                    ];
                    v.dedup_by(|p, q| (*p - *q).norm() <= tol);
                    if v.len() > 1 && (v[0] - v[v.len() - 1]).norm() <= tol {
                        v.pop();
                    }
                    let poly = ConvexPolygon::new(v);
                    if !poly.is_empty() && poly.area() > tol * bbox.diagonal() {
                        pieces.push(poly);
                    }
                }
            }
        }
        let boxes: Vec<Aabb> = pieces.iter().map(|p| p.bbox()).collect();
        let grid = BucketGrid::from_boxes(&boxes, bucket_size);
        DomainTiling { pieces, grid, bbox }
    }

    pub fn pieces(&self) -> &[ConvexPolygon] {
        &self.pieces
    }

    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|p| p.area()).sum()
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    /// Pieces whose boxes overlap `b`.
    pub fn restrict(&self, b: &Aabb) -> Vec<usize> {
        self.grid.query(b)
    }

    /// Convex pieces of `poly ∩ Ω`.
    pub fn clip(&self, poly: &ConvexPolygon) -> Vec<ConvexPolygon> {
        let b = poly.bbox();
        self.restrict(&b)
            .into_iter()
            .map(|i| poly.intersect(&self.pieces[i]))
            .filter(|p| !p.is_empty())
            .collect()
    }

    /// Whether a convex polygon meets the domain in positive area.
    pub fn meets(&self, poly: &ConvexPolygon) -> bool {
        let b = poly.bbox();
        self.restrict(&b)
            .into_iter()
            .any(|i| !poly.intersect(&self.pieces[i]).is_empty())
    }
}
