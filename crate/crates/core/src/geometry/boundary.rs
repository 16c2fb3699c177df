use super::{orient, segments_intersect, signed_area, Aabb, GeometryError, Point, Vector};

/// Closed polyline boundary. The domain lies to the left of every directed edge.
///
/// A boundary whose loops enclose a negative total area (for instance a single
/// clockwise hole) describes the complement of the enclosed region. Such a
/// domain is open towards the artificial box and is clipped to it wherever a
/// box is supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedBoundary {
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
}

impl OrientedBoundary {
    pub fn new(vertices: Vec<Point>, edges: Vec<(usize, usize)>) -> Result<Self, GeometryError> {
        let b = OrientedBoundary { vertices, edges };
        b.validate()?;
        Ok(b)
    }

    /// Builds a boundary from vertex loops, each listed in traversal order.
    pub fn from_loops(loops: &[Vec<Point>]) -> Result<Self, GeometryError> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for lp in loops {
            let base = vertices.len();
            let n = lp.len();
            vertices.extend_from_slice(lp);
            for i in 0..n {
                edges.push((base + i, base + (i + 1) % n));
            }
        }
        Self::new(vertices, edges)
    }

    /// Counterclockwise axis-aligned rectangle.
    pub fn rectangle(min: Point, max: Point) -> Self {
        Self::from_loops(&[Aabb::new(min, max).corners().to_vec()]).expect("rectangle is a valid loop")
    }

    /// Clockwise square hole of side `side` centred at `center`; the domain is
    /// everything outside it.
    pub fn square_hole(center: Point, side: f64) -> Result<Self, GeometryError> {
        let h = 0.5 * side;
        let mut corners = Aabb::new(
            Point::new(center.x - h, center.y - h),
            Point::new(center.x + h, center.y + h),
        )
        .corners()
        .to_vec();
        corners.reverse();
        Self::from_loops(&[corners])
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let nv = self.vertices.len();
        if nv < 3 || self.edges.len() < 3 {
            return Err(GeometryError::Degenerate(format!(
                "boundary needs at least 3 vertices and 3 edges, got {nv} and {}",
                self.edges.len()
            )));
        }
        if self.vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::InvalidGeometry("non-finite vertex coordinate".into()));
        }
        let mut incoming = vec![0usize; nv];
        let mut outgoing = vec![0usize; nv];
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if i >= nv || j >= nv {
                return Err(GeometryError::InvalidGeometry(format!("edge {k} references a missing vertex")));
            }
            if i == j || (self.vertices[i] - self.vertices[j]).norm() == 0.0 {
                return Err(GeometryError::Degenerate(format!("edge {k} has zero length")));
            }
            outgoing[i] += 1;
            incoming[j] += 1;
        }
        for v in 0..nv {
            if incoming[v] != 1 || outgoing[v] != 1 {
                return Err(GeometryError::InvalidGeometry(format!(
                    "vertex {v} has {} incoming and {} outgoing edges; loops must be closed",
                    incoming[v], outgoing[v]
                )));
            }
        }
        let tol = 1e-12 * self.bbox().diagonal();
        let ne = self.edges.len();
        for a in 0..ne {
            let (a0, a1) = self.edges[a];
            for b in (a + 1)..ne {
                let (b0, b1) = self.edges[b];
                if a0 == b1 || a1 == b0 {
                    continue;
                }
                let (p, q) = (self.vertices[a0], self.vertices[a1]);
                let (r, s) = (self.vertices[b0], self.vertices[b1]);
                if segments_intersect(&p, &q, &r, &s, tol) {
                    return Err(GeometryError::InvalidGeometry(format!("edges {a} and {b} intersect")));
                }
            }
        }
        for lp in self.loops() {
            let pts: Vec<Point> = lp.iter().map(|&v| self.vertices[v]).collect();
            if signed_area(&pts)?.abs() <= tol * tol {
                return Err(GeometryError::Degenerate("loop encloses zero area".into()));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, k: usize) -> (Point, Point) {
        let (i, j) = self.edges[k];
        (self.vertices[i], self.vertices[j])
    }

    /// Outward unit normal of edge `k` (the domain lies on the other side).
    pub fn outward_normal(&self, k: usize) -> Vector {
        let (a, b) = self.edge(k);
        let d = (b - a).normalize();
        Vector::new(d.y, -d.x)
    }

    /// Vertex loops in traversal order.
    pub fn loops(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        let mut next = vec![usize::MAX; nv];
        for &(i, j) in &self.edges {
            next[i] = j;
        }
        let mut seen = vec![false; nv];
        let mut loops = Vec::new();
        for start in 0..nv {
            if seen[start] {
                continue;
            }
            let mut lp = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                lp.push(v);
                v = next[v];
            }
            loops.push(lp);
        }
        loops
    }

    /// Shoelace sum over all edges.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.vertices[i], self.vertices[j]);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
    }

    /// True when the loops enclose negative area, so the domain is unbounded.
    pub fn is_complement(&self) -> bool {
        self.signed_area() < 0.0
    }

    /// Area of the domain clipped to `bx`. Assumes the loops lie inside the box.
    pub fn domain_area(&self, bx: &Aabb) -> f64 {
        let a = self.signed_area();
        if a < 0.0 {
            bx.area() + a
        } else {
            a
        }
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Winding number of the loops around `p`.
    pub fn winding_number(&self, p: &Point) -> i32 {
        let mut w = 0;
        for &(i, j) in &self.edges {
            let (a, b) = (&self.vertices[i], &self.vertices[j]);
            if a.y <= p.y {
                if b.y > p.y && orient(a, b, p) > 0.0 {
                    w += 1;
                }
            } else if b.y <= p.y && orient(a, b, p) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    /// Point-in-domain test. Points on the boundary are undefined.
    pub fn contains(&self, p: &Point) -> bool {
        let base = if self.is_complement() { 1 } else { 0 };
        self.winding_number(p) + base >= 1
    }

    /// Image of the boundary under a vertex map; connectivity is unchanged.
    pub fn mapped(&self, f: impl Fn(&Point) -> Point) -> Result<Self, GeometryError> {
        Self::new(self.vertices.iter().map(f).collect(), self.edges.clone())
    }

    pub fn translated(&self, by: &Vector) -> Self {
        OrientedBoundary {
            vertices: self.vertices.iter().map(|p| p + by).collect(),
            edges: self.edges.clone(),
        }
    }

    /// Parses the plain-text format: `NV NE`, NV lines `x y`, NE lines `i j`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: String| GeometryError::Parse { line, message };

        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `NV NE`".into()))?;
        let counts: Vec<&str> = header.split_whitespace().collect();
        if counts.len() != 2 {
            return Err(parse_err(hline, format!("expected `NV NE`, found `{header}`")));
        }
        let nv: usize = counts[0]
            .parse()
            .map_err(|_| parse_err(hline, format!("bad vertex count `{}`", counts[0])))?;
        let ne: usize = counts[1]
            .parse()
            .map_err(|_| parse_err(hline, format!("bad edge count `{}`", counts[1])))?;

        let mut vertices = Vec::with_capacity(nv);
        for k in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hline + k + 1, format!("expected {nv} vertex lines, file ended")))?;
            let xs: Vec<&str> = l.split_whitespace().collect();
            if xs.len() != 2 {
                return Err(parse_err(ln, format!("expected `x y`, found `{l}`")));
            }
            let x: f64 = xs[0].parse().map_err(|_| parse_err(ln, format!("bad coordinate `{}`", xs[0])))?;
            let y: f64 = xs[1].parse().map_err(|_| parse_err(ln, format!("bad coordinate `{}`", xs[1])))?;
            vertices.push(Point::new(x, y));
        }
        let mut edges = Vec::with_capacity(ne);
        for k in 0..ne {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hline + nv + k + 1, format!("expected {ne} edge lines, file ended")))?;
            let ij: Vec<&str> = l.split_whitespace().collect();
            if ij.len() != 2 {
                return Err(parse_err(ln, format!("expected `i j`, found `{l}`")));
            }
            let i: usize = ij[0].parse().map_err(|_| parse_err(ln, format!("bad index `{}`", ij[0])))?;
            let j: usize = ij[1].parse().map_err(|_| parse_err(ln, format!("bad index `{}`", ij[1])))?;
            if i >= nv || j >= nv {
                return Err(parse_err(ln, format!("edge ({i}, {j}) references a vertex >= {nv}")));
            }
            edges.push((i, j));
        }
        if let Some((ln, l)) = lines.next() {
            return Err(parse_err(ln, format!("unexpected trailing content `{l}`")));
        }
        Self::new(vertices, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertices.len(), self.edges.len());
        for p in &self.vertices {
            s.push_str(&format!("{:.17e} {:.17e}\n", p.x, p.y));
        }
        for &(i, j) in &self.edges {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }
}
