use nalgebra::DMatrix;

use super::SpaceError;
use crate::mesh::CellShape;

/// Lagrange element in local quad coordinates ξ ∈ [0,1]².
///
/// Nodes sit on the order-`p` lattice `(a/p, b/p)`: all of it for quads,
/// `a >= b` for the lower triangle, `b >= a` for the upper one. Quad shape
/// functions are products of 1D Lagrange factors; triangle shape functions
/// come from inverting the monomial Vandermonde matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeElement {
    shape: CellShape,
    p: usize,
    nodes: Vec<[usize; 2]>,
    exps: Vec<[i32; 2]>,
    // coef[j * n + k]: coefficient of monomial j in shape function k (triangles only)
    coef: Vec<f64>,
}

// Equispaced 1D Lagrange factors on j/p with first and second derivatives,
// accumulated by the product rule over the linear factors.
fn lagrange_1d(p: usize, x: f64) -> [Vec<f64>; 3] {
    let mut out = [vec![0.0; p + 1], vec![0.0; p + 1], vec![0.0; p + 1]];
    for j in 0..=p {
        let (mut v, mut d, mut dd) = (1.0, 0.0, 0.0);
        for m in (0..=p).filter(|&m| m != j) {
            let w = 1.0 / ((j as f64 - m as f64) / p as f64);
            let f = (x - m as f64 / p as f64) * w;
            dd = dd * f + 2.0 * d * w;
            d = d * f + v * w;
            v *= f;
        }
        out[0][j] = v;
        out[1][j] = d;
        out[2][j] = dd;
    }
    out
}

/// Shape values with first and second derivatives in ξ.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalShape {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

impl LagrangeElement {
    pub fn new(shape: CellShape, p: usize) -> Result<Self, SpaceError> {
        if p == 0 || p > 6 {
            return Err(SpaceError::InvalidOrder(p));
        }
        let mut nodes = Vec::new();
        for b in 0..=p {
            for a in 0..=p {
                let keep = match shape {
                    CellShape::Quad => true,
                    CellShape::TriLower => a >= b,
                    CellShape::TriUpper => b >= a,
                };
                if keep {
                    nodes.push([a, b]);
                }
            }
        }
        let mut exps = Vec::new();
        for j in 0..=p as i32 {
            for i in 0..=p as i32 {
                let keep = match shape {
                    CellShape::Quad => true,
                    _ => i + j <= p as i32,
                };
                if keep {
                    exps.push([i, j]);
                }
            }
        }
        let n = nodes.len();
        debug_assert_eq!(n, exps.len());
        if shape == CellShape::Quad {
            return Ok(LagrangeElement {
                shape,
                p,
                nodes,
                exps,
                coef: Vec::new(),
            });
        }
        let v = DMatrix::from_fn(n, n, |i, j| {
            let x = nodes[i][0] as f64 / p as f64;
            let y = nodes[i][1] as f64 / p as f64;
            x.powi(exps[j][0]) * y.powi(exps[j][1])
        });
        let inv = v.try_inverse().ok_or(SpaceError::InvalidOrder(p))?;
        let coef = (0..n * n).map(|idx| inv[(idx / n, idx % n)]).collect();
        Ok(LagrangeElement {
            shape,
            p,
            nodes,
            exps,
            coef,
        })
    }

    pub fn shape(&self) -> CellShape {
        self.shape
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lattice offsets `(a, b)` of the local nodes.
    pub fn nodes(&self) -> &[[usize; 2]] {
        &self.nodes
    }

    pub fn node_coords(&self, k: usize) -> [f64; 2] {
        [self.nodes[k][0] as f64 / self.p as f64, self.nodes[k][1] as f64 / self.p as f64]
    }

    pub fn values(&self, xi: [f64; 2]) -> Vec<f64> {
        if self.shape == CellShape::Quad {
            let (lx, ly) = (lagrange_1d(self.p, xi[0]), lagrange_1d(self.p, xi[1]));
            return self.nodes.iter().map(|&[a, b]| lx[0][a] * ly[0][b]).collect();
        }
        let n = self.nodes.len();
        let m: Vec<f64> = self.exps.iter().map(|e| xi[0].powi(e[0]) * xi[1].powi(e[1])).collect();
        (0..n).map(|k| (0..n).map(|j| m[j] * self.coef[j * n + k]).sum()).collect()
    }

    pub fn eval(&self, xi: [f64; 2]) -> LocalShape {
        if self.shape == CellShape::Quad {
            let (lx, ly) = (lagrange_1d(self.p, xi[0]), lagrange_1d(self.p, xi[1]));
            let mut out = LocalShape::default();
            for &[a, b] in &self.nodes {
                out.values.push(lx[0][a] * ly[0][b]);
                out.grads.push([lx[1][a] * ly[0][b], lx[0][a] * ly[1][b]]);
                let hxy = lx[1][a] * ly[1][b];
                out.hessians.push([[lx[2][a] * ly[0][b], hxy], [hxy, lx[0][a] * ly[2][b]]]);
            }
            return out;
        }
        let n = self.nodes.len();
        let pw = |x: f64, e: i32| if e < 0 { 0.0 } else { x.powi(e) };
        let mut m = vec![0.0; n];
        let mut mx = vec![0.0; n];
        let mut my = vec![0.0; n];
        let mut mxx = vec![0.0; n];
        let mut mxy = vec![0.0; n];
        let mut myy = vec![0.0; n];
        for (j, e) in self.exps.iter().enumerate() {
            let (i0, j0) = (e[0], e[1]);
            let (fi, fj) = (i0 as f64, j0 as f64);
            m[j] = pw(xi[0], i0) * pw(xi[1], j0);
            mx[j] = fi * pw(xi[0], i0 - 1) * pw(xi[1], j0);
            my[j] = fj * pw(xi[0], i0) * pw(xi[1], j0 - 1);
            mxx[j] = fi * (fi - 1.0) * pw(xi[0], i0 - 2) * pw(xi[1], j0);
            mxy[j] = fi * fj * pw(xi[0], i0 - 1) * pw(xi[1], j0 - 1);
            myy[j] = fj * (fj - 1.0) * pw(xi[0], i0) * pw(xi[1], j0 - 2);
        }
        let mut out = LocalShape {
            values: vec![0.0; n],
            grads: vec![[0.0; 2]; n],
            hessians: vec![[[0.0; 2]; 2]; n],
        };
        for k in 0..n {
            let (mut v, mut gx, mut gy, mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for j in 0..n {
                let c = self.coef[j * n + k];
                if c == 0.0 {
                    continue;
                }
                v += c * m[j];
                gx += c * mx[j];
                gy += c * my[j];
                hxx += c * mxx[j];
                hxy += c * mxy[j];
                hyy += c * myy[j];
            }
            out.values[k] = v;
            out.grads[k] = [gx, gy];
            out.hessians[k] = [[hxx, hxy], [hxy, hyy]];
        }
        out
    }
}
