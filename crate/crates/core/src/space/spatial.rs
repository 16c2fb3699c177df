use super::{LagrangeElement, SpaceError};
use crate::geometry::Point;
use crate::mesh::{CartesianMesh, CellShape};

/// Continuous order-`p` Lagrange space on a Cartesian or simplex mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSpace {
    mesh: CartesianMesh,
    p: usize,
    components: usize,
    quad: Option<LagrangeElement>,
    lower: Option<LagrangeElement>,
    upper: Option<LagrangeElement>,
}

/// Shape values with physical gradients and Hessians.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhysicalShape {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

impl SpatialSpace {
    /// `components` is 1 for scalar fields and 2 for displacements.
    pub fn new(mesh: &CartesianMesh, p: usize, components: usize) -> Result<Self, SpaceError> {
        let (quad, lower, upper) = if mesh.is_simplex() {
            (
                None,
                Some(LagrangeElement::new(CellShape::TriLower, p)?),
                Some(LagrangeElement::new(CellShape::TriUpper, p)?),
            )
        } else {
            (Some(LagrangeElement::new(CellShape::Quad, p)?), None, None)
        };
        Ok(SpatialSpace {
            mesh: mesh.clone(),
            p,
            components: components.max(1),
            quad,
            lower,
            upper,
        })
    }

    pub fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Nodes per direction of the global lattice.
    pub fn lattice(&self) -> [usize; 2] {
        let [nx, ny] = self.mesh.counts();
        [nx * self.p + 1, ny * self.p + 1]
    }

    pub fn num_nodes(&self) -> usize {
        let [a, b] = self.lattice();
        a * b
    }

    pub fn num_dofs(&self) -> usize {
        self.num_nodes() * self.components
    }

    pub fn element(&self, cell: usize) -> &LagrangeElement {
        let e = match self.mesh.shape(cell) {
            CellShape::Quad => &self.quad,
            CellShape::TriLower => &self.lower,
            CellShape::TriUpper => &self.upper,
        };
        e.as_ref().expect("element matches the mesh kind")
    }

    /// Global node ids of `cell`, in local shape-function order.
    pub fn cell_nodes(&self, cell: usize) -> Vec<usize> {
        let (ix, iy) = self.mesh.quad_ij(cell);
        let width = self.lattice()[0];
        self.element(cell)
            .nodes()
            .iter()
            .map(|&[a, b]| (iy * self.p + b) * width + ix * self.p + a)
            .collect()
    }

    /// Lattice coordinates `(I, J)` of a node.
    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        let width = self.lattice()[0];
        (node % width, node / width)
    }

    pub fn node_point(&self, node: usize) -> Point {
        let (i, j) = self.node_ij(node);
        let coord = |d: usize, k: usize| {
            let c = self.mesh.coords(d);
            let n = c.len() - 1;
            let cell = (k / self.p).min(n - 1);
            let a = k - cell * self.p;
            c[cell] + (c[cell + 1] - c[cell]) * a as f64 / self.p as f64
        };
        Point::new(coord(0, i), coord(1, j))
    }

    /// True when the node lies on the boundary of the mesh box.
    pub fn is_box_node(&self, node: usize) -> bool {
        let (i, j) = self.node_ij(node);
        let [w, h] = self.lattice();
        i == 0 || j == 0 || i + 1 == w || j + 1 == h
    }

    /// Shape functions of `cell` at local coordinates `xi` with derivatives in x.
    pub fn eval(&self, cell: usize, xi: [f64; 2]) -> PhysicalShape {
        let (_, h) = self.mesh.rect(cell);
        let s = self.element(cell).eval(xi);
        PhysicalShape {
            values: s.values,
            grads: s.grads.iter().map(|g| [g[0] / h[0], g[1] / h[1]]).collect(),
            hessians: s
                .hessians
                .iter()
                .map(|m| {
                    let xy = m[0][1] / (h[0] * h[1]);
                    [[m[0][0] / (h[0] * h[0]), xy], [xy, m[1][1] / (h[1] * h[1])]]
                })
                .collect(),
        }
    }

    /// Shape values of `cell` at physical point `x` (extrapolated outside the cell).
    pub fn values_at(&self, cell: usize, x: &Point) -> Vec<f64> {
        self.element(cell).values(self.mesh.local_coords(cell, x))
    }

    /// Nodal interpolant of `f` (one value per node; scalar spaces).
    pub fn interpolate(&self, f: impl Fn(&Point) -> f64) -> Vec<f64> {
        (0..self.num_nodes()).map(|n| f(&self.node_point(n))).collect()
    }
}
