//! Background Cartesian meshes of the artificial box, their simplex split,
//! time partitions, and active/extended cell sets.

use crate::geometry::{Aabb, CellClassification, CellKind, ConvexPolygon, DomainTiling, OrientedBoundary, Partition, Point};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),
    #[error("the active mesh is empty: no cell meets the domain")]
    EmptyActive,
    #[error("the domain at the next slab reaches outside the artificial box ({0})")]
    ArtificialDomainTooSmall(String),
}

/// Per-direction grading `(x̂₀, α)` of a Cartesian mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub x0: f64,
    pub alpha: f64,
}

/// The clustering map on [0, 1]: cells concentrate around `x0` when `alpha < 1`.
pub fn grading_map(x: f64, g: &Grading) -> f64 {
    if x < g.x0 {
        g.x0 * (x / g.x0).powf(g.alpha)
    } else {
        1.0 - (1.0 - g.x0) * ((1.0 - x) / (1.0 - g.x0)).powf(g.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellShape {
    Quad,
    /// Triangle (v00, v10, v11) below the diagonal of its quad.
    TriLower,
    /// Triangle (v00, v11, v01) above the diagonal.
    TriUpper,
}

/// Tensor-product mesh of an axis-aligned box, optionally graded per
/// direction and optionally split into two triangles per quad.
///
/// Quad cells are numbered `iy * nx + ix`; triangles `2 * quad + {0 lower, 1 upper}`.
/// Vertices are numbered `j * (nx + 1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianMesh {
    origin: Point,
    lengths: [f64; 2],
    counts: [usize; 2],
    grading: [Option<Grading>; 2],
    simplex: bool,
    coords: [Vec<f64>; 2],
}

/// Builds the (quad) mesh. Graded coordinates are `origin + L·φ_M(i/n)`.
pub fn build_mesh(
    origin: Point,
    lengths: [f64; 2],
    counts: [usize; 2],
    grading: [Option<Grading>; 2],
) -> Result<CartesianMesh, MeshError> {
    let mut coords: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for d in 0..2 {
        let n = counts[d];
        if n == 0 {
            return Err(MeshError::InvalidParameter(format!("cell count in direction {d} must be >= 1")));
        }
        if !(lengths[d] > 0.0) || !lengths[d].is_finite() {
            return Err(MeshError::InvalidParameter(format!("length in direction {d} must be positive")));
        }
        if let Some(g) = &grading[d] {
            if !(g.alpha > 0.0) {
                return Err(MeshError::InvalidParameter(format!("grading alpha must be > 0, got {}", g.alpha)));
            }
            if g.alpha > 1.0 {
                return Err(MeshError::InvalidParameter(format!("grading alpha must be <= 1, got {}", g.alpha)));
            }
            if !(g.x0 > 0.0 && g.x0 < 1.0) {
                return Err(MeshError::InvalidParameter(format!("grading x0 must lie in (0, 1), got {}", g.x0)));
            }
        }
        let o = if d == 0 { origin.x } else { origin.y };
        let mut c: Vec<f64> = (0..=n)
            .map(|i| {
                let xh = i as f64 / n as f64;
                let m = grading[d].as_ref().map_or(xh, |g| grading_map(xh, g));
                o + lengths[d] * m
            })
            .collect();
        c[n] = o + lengths[d];
        if c.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MeshError::InvalidParameter(format!(
                "graded coordinates in direction {d} are not strictly increasing"
            )));
        }
        coords[d] = c;
    }
    Ok(CartesianMesh {
        origin,
        lengths,
        counts,
        grading,
        simplex: false,
        coords,
    })
}

/// Splits every quad into two counterclockwise triangles along the (v00, v11) diagonal.
pub fn simplexify(mesh: &CartesianMesh) -> CartesianMesh {
    let mut m = mesh.clone();
    m.simplex = true;
    m
}

impl CartesianMesh {
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    pub fn grading(&self) -> [Option<Grading>; 2] {
        self.grading
    }

    pub fn is_simplex(&self) -> bool {
        self.simplex
    }

    pub fn coords(&self, d: usize) -> &[f64] {
        &self.coords[d]
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(
            self.origin,
            Point::new(self.coords[0][self.counts[0]], self.coords[1][self.counts[1]]),
        )
    }

    pub fn num_quads(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn num_cells(&self) -> usize {
        if self.simplex {
            2 * self.num_quads()
        } else {
            self.num_quads()
        }
    }

    pub fn num_vertices(&self) -> usize {
        (self.counts[0] + 1) * (self.counts[1] + 1)
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        j * (self.counts[0] + 1) + i
    }

    pub fn vertex_point(&self, v: usize) -> Point {
        let nx1 = self.counts[0] + 1;
        Point::new(self.coords[0][v % nx1], self.coords[1][v / nx1])
    }

    pub fn quad_index(&self, cell: usize) -> usize {
        if self.simplex {
            cell / 2
        } else {
            cell
        }
    }

    /// `(ix, iy)` of the quad containing `cell`.
    pub fn quad_ij(&self, cell: usize) -> (usize, usize) {
        let q = self.quad_index(cell);
        (q % self.counts[0], q / self.counts[0])
    }

    pub fn shape(&self, cell: usize) -> CellShape {
        if !self.simplex {
            CellShape::Quad
        } else if cell % 2 == 0 {
            CellShape::TriLower
        } else {
            CellShape::TriUpper
        }
    }

    /// Lower-left corner and side lengths of the quad containing `cell`.
    pub fn rect(&self, cell: usize) -> (Point, [f64; 2]) {
        let (i, j) = self.quad_ij(cell);
        let (x0, y0) = (self.coords[0][i], self.coords[1][j]);
        (Point::new(x0, y0), [self.coords[0][i + 1] - x0, self.coords[1][j + 1] - y0])
    }

    /// Nitsche length scale `h_T`: the shorter side of the background quad.
    pub fn cell_size(&self, cell: usize) -> f64 {
        let (_, h) = self.rect(cell);
        h[0].min(h[1])
    }

    /// Area of the cell.
    pub fn cell_area(&self, cell: usize) -> f64 {
        let (_, h) = self.rect(cell);
        if self.simplex {
            0.5 * h[0] * h[1]
        } else {
            h[0] * h[1]
        }
    }

    /// Local coordinates ξ ∈ [0,1]² of `p` within the cell's quad.
    pub fn local_coords(&self, cell: usize, p: &Point) -> [f64; 2] {
        let (o, h) = self.rect(cell);
        [(p.x - o.x) / h[0], (p.y - o.y) / h[1]]
    }

    pub fn global_point(&self, cell: usize, xi: [f64; 2]) -> Point {
        let (o, h) = self.rect(cell);
        Point::new(o.x + xi[0] * h[0], o.y + xi[1] * h[1])
    }

    /// Counterclockwise vertex ids.
    pub fn cell_vertices(&self, cell: usize) -> Vec<usize> {
        let (i, j) = self.quad_ij(cell);
        let v00 = self.vertex(i, j);
        let v10 = self.vertex(i + 1, j);
        let v11 = self.vertex(i + 1, j + 1);
        let v01 = self.vertex(i, j + 1);
        match self.shape(cell) {
            CellShape::Quad => vec![v00, v10, v11, v01],
            CellShape::TriLower => vec![v00, v10, v11],
            CellShape::TriUpper => vec![v00, v11, v01],
        }
    }

    /// Cells of the simplex split covering `cell` (the cell itself when already a triangle).
    pub fn simplex_ids(&self, cell: usize) -> Vec<usize> {
        if self.simplex {
            vec![cell]
        } else {
            vec![2 * cell, 2 * cell + 1]
        }
    }

    /// Simplex cell id containing the point with local coordinates `xi` in quad `q`.
    pub fn simplex_at(&self, q: usize, xi: [f64; 2]) -> usize {
        if xi[1] <= xi[0] {
            2 * q
        } else {
            2 * q + 1
        }
    }

    /// Cells whose closure contains vertex `v`.
    pub fn vertex_cells(&self, v: usize) -> Vec<usize> {
        let nx1 = self.counts[0] + 1;
        let (i, j) = ((v % nx1) as isize, (v / nx1) as isize);
        let mut out = Vec::new();
        for (di, dj) in [(-1isize, -1isize), (0, -1), (-1, 0), (0, 0)] {
            let (qi, qj) = (i + di, j + dj);
            if qi < 0 || qj < 0 || qi >= self.counts[0] as isize || qj >= self.counts[1] as isize {
                continue;
            }
            let q = qj as usize * self.counts[0] + qi as usize;
            for c in if self.simplex { vec![2 * q, 2 * q + 1] } else { vec![q] } {
                if self.cell_vertices(c).contains(&v) {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Mean of the cell side lengths.
    pub fn mean_size(&self) -> f64 {
        0.5 * (self.lengths[0] / self.counts[0] as f64 + self.lengths[1] / self.counts[1] as f64)
    }

    /// Largest cell side length.
    pub fn max_size(&self) -> f64 {
        let m = |c: &[f64]| c.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
        m(&self.coords[0]).max(m(&self.coords[1]))
    }
}

impl Partition for CartesianMesh {
    fn num_cells(&self) -> usize {
        CartesianMesh::num_cells(self)
    }

    fn cell_polygon(&self, cell: usize) -> ConvexPolygon {
        ConvexPolygon::new(self.cell_vertices(cell).into_iter().map(|v| self.vertex_point(v)).collect())
    }

    fn cell_neighbors(&self, cell: usize) -> Vec<usize> {
        let (nx, ny) = (self.counts[0], self.counts[1]);
        let (i, j) = self.quad_ij(cell);
        let q = |i: usize, j: usize| j * nx + i;
        let mut out = Vec::with_capacity(4);
        match self.shape(cell) {
            CellShape::Quad => {
                if i > 0 {
                    out.push(q(i - 1, j));
                }
                if i + 1 < nx {
                    out.push(q(i + 1, j));
                }
                if j > 0 {
                    out.push(q(i, j - 1));
                }
                if j + 1 < ny {
                    out.push(q(i, j + 1));
                }
            }
            CellShape::TriLower => {
                out.push(cell + 1);
                if j > 0 {
                    out.push(2 * q(i, j - 1) + 1);
                }
                if i + 1 < nx {
                    out.push(2 * q(i + 1, j) + 1);
                }
            }
            CellShape::TriUpper => {
                out.push(cell - 1);
                if j + 1 < ny {
                    out.push(2 * q(i, j + 1));
                }
                if i > 0 {
                    out.push(2 * q(i - 1, j));
                }
            }
        }
        out
    }

    fn typical_size(&self) -> f64 {
        self.mean_size()
    }
}

/// Strictly increasing time breakpoints `t¹ < … < t^{N+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    breakpoints: Vec<f64>,
}

impl TimePartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self, MeshError> {
        if breakpoints.len() < 2 {
            return Err(MeshError::InvalidParameter("a time partition needs at least one slab".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(MeshError::InvalidParameter("time breakpoints must be strictly increasing".into()));
        }
        Ok(TimePartition { breakpoints })
    }

    /// `n` equal slabs on `[0, t_end]`.
    pub fn uniform(t_end: f64, n: usize) -> Result<Self, MeshError> {
        if n == 0 {
            return Err(MeshError::InvalidParameter("number of slabs must be >= 1".into()));
        }
        let mut b: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        b[n] = t_end;
        Self::new(b)
    }

    pub fn num_slabs(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `(tⁿ, tⁿ⁺¹)` for 0-based slab `n`.
    pub fn slab(&self, n: usize) -> (f64, f64) {
        (self.breakpoints[n], self.breakpoints[n + 1])
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.breakpoints[n + 1] - self.breakpoints[n]
    }

    pub fn tau_max(&self) -> f64 {
        (0..self.num_slabs()).map(|n| self.tau(n)).fold(0.0, f64::max)
    }
}

/// Classification plus active (non-exterior) and extended cell flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveMesh {
    classification: CellClassification,
    active: Vec<bool>,
    extended: Vec<bool>,
}

/// Removes exterior cells.
pub fn active_mesh(mesh: &CartesianMesh, classification: CellClassification) -> Result<ActiveMesh, MeshError> {
    if classification.len() != mesh.num_cells() {
        return Err(MeshError::InvalidParameter(format!(
            "classification has {} cells, mesh has {}",
            classification.len(),
            mesh.num_cells()
        )));
    }
    let active: Vec<bool> = classification.kinds().iter().map(|k| k.is_active()).collect();
    if !active.iter().any(|&a| a) {
        return Err(MeshError::EmptyActive);
    }
    Ok(ActiveMesh {
        extended: active.clone(),
        active,
        classification,
    })
}

impl ActiveMesh {
    pub fn classification(&self) -> &CellClassification {
        &self.classification
    }

    pub fn kind(&self, cell: usize) -> CellKind {
        self.classification.kind(cell)
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.active[cell]
    }

    pub fn is_extended(&self, cell: usize) -> bool {
        self.extended[cell]
    }

    pub fn active_flags(&self) -> &[bool] {
        &self.active
    }

    pub fn extended_flags(&self) -> &[bool] {
        &self.extended
    }

    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&c| self.active[c])
    }

    pub fn extended_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.extended.len()).filter(|&c| self.extended[c])
    }

    pub fn num_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn num_extended(&self) -> usize {
        self.extended.iter().filter(|&&a| a).count()
    }

    /// Adds cells whose deformed image (bounding box of its deformed vertices)
    /// meets the next domain. `deformed` gives the end-of-slab position of a
    /// mesh vertex.
    pub fn extend_active(
        &self,
        mesh: &CartesianMesh,
        deformed: impl Fn(usize) -> Point,
        next_boundary: &OrientedBoundary,
        next_tiling: &DomainTiling,
    ) -> Result<ActiveMesh, MeshError> {
        let bounds = mesh.bounds();
        let nb = next_boundary.bbox();
        let slack = 1e-10 * bounds.diagonal();
        if !bounds.inflate(slack).contains_box(&nb) {
            return Err(MeshError::ArtificialDomainTooSmall(format!(
                "boundary box [{:.4}, {:.4}] x [{:.4}, {:.4}]",
                nb.min.x, nb.max.x, nb.min.y, nb.max.y
            )));
        }
        let mut extended = self.extended.clone();
        for (c, ext) in extended.iter_mut().enumerate() {
            if *ext {
                continue;
            }
            let pts: Vec<Point> = mesh.cell_vertices(c).into_iter().map(&deformed).collect();
            let bb = Aabb::from_points(&pts);
            if next_tiling.meets(&ConvexPolygon::rectangle(bb.min, bb.max)) {
                *ext = true;
            }
        }
        Ok(ActiveMesh {
            classification: self.classification.clone(),
            active: self.active.clone(),
            extended,
        })
    }
}
