use nalgebra::{Matrix2, Vector2};

use super::DeformationError;
use crate::geometry::{ConvexPolygon, Point, Vector};
use crate::mesh::CartesianMesh;
use crate::space::{ScalarBasis1D, SpatialSpace};

/// Map data at one space-time point of a slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSample {
    /// `φ(x̂, t)`.
    pub phi: Point,
    /// Spatial gradient `F_x`, `(F_x)_ij = ∂φ_i/∂x̂_j`.
    pub fx: Matrix2<f64>,
    /// Deformation velocity `w = ∂_t φ`.
    pub w: Vector2<f64>,
    /// `J = det F = det F_x`.
    pub j: f64,
}

impl MapSample {
    pub fn identity(x: Point) -> Self {
        MapSample {
            phi: x,
            fx: Matrix2::identity(),
            w: Vector2::zeros(),
            j: 1.0,
        }
    }
}

/// `φ(x̂, t) = x̂ + û(x̂, t)` with `û` continuous P1 on the simplex split and
/// nodal in time. Coefficients are stored at `(vertex·2 + component)·nq + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationField {
    space: SpatialSpace,
    time: ScalarBasis1D,
    slab: (f64, f64),
    coef: Vec<f64>,
}

impl DeformationField {
    /// The identity map on `mesh` (split into simplices if it is not already).
    pub fn identity(mesh: &CartesianMesh, slab: (f64, f64), time_order: usize) -> Self {
        let smesh = if mesh.is_simplex() {
            mesh.clone()
        } else {
            crate::mesh::simplexify(mesh)
        };
        let space = SpatialSpace::new(&smesh, 1, 2).expect("P1 is supported");
        let time = ScalarBasis1D::lobatto(time_order.max(1));
        let coef = vec![0.0; space.num_dofs() * time.len()];
        DeformationField {
            space,
            time,
            slab,
            coef,
        }
    }

    /// Builds a field from coefficients in the layout described on the type.
    pub fn from_coefficients(mesh: &CartesianMesh, slab: (f64, f64), time_order: usize, coef: Vec<f64>) -> Self {
        let mut f = Self::identity(mesh, slab, time_order);
        assert_eq!(coef.len(), f.coef.len(), "coefficient vector has the wrong length");
        f.coef = coef;
        f
    }

    /// Nodal interpolation of `d(x̂, t)` at every vertex and temporal node.
    pub fn interpolate(
        mesh: &CartesianMesh,
        slab: (f64, f64),
        time_order: usize,
        d: impl Fn(&Point, f64) -> Vector,
    ) -> Self {
        let mut f = Self::identity(mesh, slab, time_order);
        let nq = f.time.len();
        for v in 0..f.space.num_nodes() {
            let x = f.space.node_point(v);
            for k in 0..nq {
                let u = d(&x, f.time_at(f.time.nodes()[k]));
                f.coef[(v * 2) * nq + k] = u.x;
                f.coef[(v * 2 + 1) * nq + k] = u.y;
            }
        }
        f
    }

    pub fn space(&self) -> &SpatialSpace {
        &self.space
    }

    /// The simplex mesh carrying the field.
    pub fn mesh(&self) -> &CartesianMesh {
        self.space.mesh()
    }

    pub fn time_basis(&self) -> &ScalarBasis1D {
        &self.time
    }

    pub fn slab(&self) -> (f64, f64) {
        self.slab
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn time_at(&self, s: f64) -> f64 {
        self.slab.0 + s * (self.slab.1 - self.slab.0)
    }

    pub fn local_time(&self, t: f64) -> f64 {
        (t - self.slab.0) / (self.slab.1 - self.slab.0)
    }

    /// Displacement of vertex `v` at local time `s ∈ [0, 1]`.
    pub fn vertex_displacement(&self, v: usize, s: f64) -> Vector {
        let nq = self.time.len();
        let b = self.time.eval(s);
        let mut u = Vector::zeros();
        for k in 0..nq {
            u.x += self.coef[(v * 2) * nq + k] * b[k];
            u.y += self.coef[(v * 2 + 1) * nq + k] * b[k];
        }
        u
    }

    pub fn deformed_vertex(&self, v: usize, s: f64) -> Point {
        self.space.node_point(v) + self.vertex_displacement(v, s)
    }

    /// Vertex positions of simplex `cell` at local time `s`.
    pub fn deformed_simplex(&self, cell: usize, s: f64) -> [Point; 3] {
        let vs = self.mesh().cell_vertices(cell);
        [
            self.deformed_vertex(vs[0], s),
            self.deformed_vertex(vs[1], s),
            self.deformed_vertex(vs[2], s),
        ]
    }

    pub fn deformed_polygon(&self, cell: usize, s: f64) -> ConvexPolygon {
        let [a, b, c] = self.deformed_simplex(cell, s);
        ConvexPolygon::triangle(a, b, c)
    }

    /// Evaluates the map at reference point `x` of simplex `cell`, local time `s`.
    pub fn eval(&self, cell: usize, x: &Point, s: f64) -> MapSample {
        let nq = self.time.len();
        let tau = self.slab.1 - self.slab.0;
        let b = self.time.eval(s);
        let db = self.time.deriv(s);
        let sh = self.space.eval(cell, self.mesh().local_coords(cell, x));
        let mut u = Vector2::zeros();
        let mut w = Vector2::zeros();
        let mut g = Matrix2::zeros();
        for (a, node) in self.space.cell_nodes(cell).into_iter().enumerate() {
            for c in 0..2 {
                let base = (node * 2 + c) * nq;
                let (mut val, mut rate) = (0.0, 0.0);
                for k in 0..nq {
                    val += self.coef[base + k] * b[k];
                    rate += self.coef[base + k] * db[k];
                }
                u[c] += val * sh.values[a];
                w[c] += rate * sh.values[a] / tau;
                g[(c, 0)] += val * sh.grads[a][0];
                g[(c, 1)] += val * sh.grads[a][1];
            }
        }
        let fx = Matrix2::identity() + g;
        MapSample {
            phi: x + u,
            fx,
            w,
            j: fx.determinant(),
        }
    }

    /// Evaluates at a point of quad `q` of the underlying Cartesian mesh, picking
    /// the simplex of the split that contains it.
    pub fn eval_in_quad(&self, q: usize, x: &Point, s: f64) -> MapSample {
        let xi = self.mesh().local_coords(2 * q, x);
        self.eval(self.mesh().simplex_at(q, xi), x, s)
    }

    /// Reference point mapped to `y` by the affine map of simplex `cell` at time `s`.
    pub fn pull_back(&self, cell: usize, y: &Point, s: f64) -> Point {
        let [a, b, c] = self.deformed_simplex(cell, s);
        let m = Matrix2::from_columns(&[b - a, c - a]);
        let l = m.try_inverse().map(|mi| mi * (y - a)).unwrap_or_else(Vector2::zeros);
        let vs = self.mesh().cell_vertices(cell);
        let p: Vec<Point> = vs.iter().map(|&v| self.space.node_point(v)).collect();
        p[0] + (p[1] - p[0]) * l.x + (p[2] - p[0]) * l.y
    }

    /// Checks `det F_x > 0` on the listed simplices at a few times per slab.
    pub fn check_bijective(&self, cells: impl IntoIterator<Item = usize>) -> Result<(), DeformationError> {
        let mut times: Vec<f64> = self.time.nodes().to_vec();
        times.extend([0.25, 0.5, 0.75]);
        for c in cells {
            let x = self.mesh().cell_polygon_centroid(c);
            for &s in &times {
                let j = self.eval(c, &x, s).j;
                if !(j > 0.0) {
                    return Err(DeformationError::NonBijective {
                        cell: c,
                        time: self.time_at(s),
                        det: j,
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest entry of `|F_x(t) − I|` over the listed simplices at local time `s`.
    pub fn max_strain(&self, cells: impl IntoIterator<Item = usize>, s: f64) -> f64 {
        cells
            .into_iter()
            .map(|c| {
                let x = self.mesh().cell_polygon_centroid(c);
                (self.eval(c, &x, s).fx - Matrix2::identity()).abs().max()
            })
            .fold(0.0, f64::max)
    }
}

/// Transported spatial gradient and time derivative:
/// `∇_x = F_x⁻ᵀ ∇̂_x`, `∂_t = ∂̂_t − w·∇_x`.
pub fn pullback_gradients(
    m: &MapSample,
    grad_hat: &Vector2<f64>,
    dt_hat: f64,
) -> Result<(Vector2<f64>, f64), DeformationError> {
    let inv = m.fx.try_inverse().ok_or(DeformationError::SingularMap { det: m.j })?;
    let g = inv.transpose() * grad_hat;
    Ok((g, dt_hat - m.w.dot(&g)))
}

// F⁻ᵀ n̂ for the space-time normal (n̂_x, n̂_t).
fn transported(m: &MapSample, nx: &Vector2<f64>, nt: f64) -> Result<(Vector2<f64>, f64), DeformationError> {
    let inv = m.fx.try_inverse().ok_or(DeformationError::SingularMap { det: m.j })?;
    let vx = inv.transpose() * nx;
    Ok((vx, nt - m.w.dot(&vx)))
}

/// Normalized transported space-time normal `(n_x, n_t)`.
pub fn transported_normal(
    m: &MapSample,
    nx: &Vector2<f64>,
    nt: f64,
) -> Result<(Vector2<f64>, f64), DeformationError> {
    let (vx, vt) = transported(m, nx, nt)?;
    let norm = (vx.norm_squared() + vt * vt).sqrt();
    if !(norm > 0.0) {
        return Err(DeformationError::DegenerateNormal);
    }
    Ok((vx / norm, vt / norm))
}

/// Spatial part of the normalized transported space-time normal.
pub fn transport_normal(m: &MapSample, nx: &Vector2<f64>, nt: f64) -> Result<Vector2<f64>, DeformationError> {
    Ok(transported_normal(m, nx, nt)?.0)
}

/// Area factor `J·|F⁻ᵀ n̂|` of the space-time boundary.
pub fn surface_measure_factor(m: &MapSample, nx: &Vector2<f64>, nt: f64) -> Result<f64, DeformationError> {
    let (vx, vt) = transported(m, nx, nt)?;
    Ok(m.j * (vx.norm_squared() + vt * vt).sqrt())
}

trait Centroid {
    fn cell_polygon_centroid(&self, c: usize) -> Point;
}

impl Centroid for CartesianMesh {
    fn cell_polygon_centroid(&self, c: usize) -> Point {
        let vs = self.cell_vertices(c);
        let n = vs.len() as f64;
        let sum = vs.iter().fold(Vector::zeros(), |acc, &v| acc + self.vertex_point(v).coords);
        Point::from(sum / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    fn mesh() -> CartesianMesh {
        build_mesh(Point::origin(), [2.0, 1.0], [4, 2], [None, None]).unwrap()
    }

    #[test]
    fn identity_field() {
        let f = DeformationField::identity(&mesh(), (0.0, 0.5), 1);
        let m = f.eval(3, &Point::new(0.6, 0.1), 0.3);
        assert_eq!(m.fx, Matrix2::identity());
        assert_eq!(m.j, 1.0);
        let (g, dt) = pullback_gradients(&m, &Vector2::new(1.0, 2.0), 3.0).unwrap();
        assert_eq!((g, dt), (Vector2::new(1.0, 2.0), 3.0));
        assert_eq!(surface_measure_factor(&m, &Vector2::new(0.0, 1.0), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn interpolated_affine_map_matches_finite_differences() {
        // affine in space, quadratic in time: represented exactly for order 2
        let d = |x: &Point, t: f64| Vector::new(0.1 * t * x.y + 0.05 * t * t, -0.2 * t * x.x);
        let f = DeformationField::interpolate(&mesh(), (0.0, 0.5), 2, d);
        let x = Point::new(1.3, 0.4);
        let s = 0.37;
        let t = f.time_at(s);
        let m = f.eval_in_quad(6, &x, s);
        let h = 1e-6;
        let phi = |x: Point, t: f64| x + d(&x, t);
        let dx = (phi(x + Vector::new(h, 0.0), t) - phi(x - Vector::new(h, 0.0), t)) / (2.0 * h);
        let dy = (phi(x + Vector::new(0.0, h), t) - phi(x - Vector::new(0.0, h), t)) / (2.0 * h);
        let dt = (phi(x, t + h) - phi(x, t - h)) / (2.0 * h);
        assert!((m.fx.column(0) - dx).norm() < 1e-6);
        assert!((m.fx.column(1) - dy).norm() < 1e-6);
        assert!((m.w - dt).norm() < 1e-6);
        assert!((m.j - m.fx.determinant()).abs() < 1e-12);
    }

    #[test]
    fn ale_derivative_under_translation() {
        let c = Vector::new(0.3, -0.1);
        let f = DeformationField::interpolate(&mesh(), (0.0, 1.0), 1, |_, t| c * t);
        let m = f.eval(5, &Point::new(1.2, 0.3), 0.6);
        let gh = Vector2::new(0.7, -1.9);
        let (g, dt) = pullback_gradients(&m, &gh, 0.4).unwrap();
        assert!((g - gh).norm() < 1e-14);
        assert!((dt - (0.4 - c.dot(&gh))).abs() < 1e-14);
    }

    #[test]
    fn scaling_divides_gradient() {
        let f = DeformationField::interpolate(&mesh(), (0.0, 1.0), 1, |x, _| x.coords);
        let m = f.eval(0, &Point::new(0.2, 0.1), 0.5);
        let (g, _) = pullback_gradients(&m, &Vector2::new(1.0, 3.0), 0.0).unwrap();
        assert!((g - Vector2::new(0.5, 1.5)).norm() < 1e-14);
    }

    #[test]
    fn rotated_normal_and_measure() {
        let th: f64 = 0.4;
        let r = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos());
        let m = MapSample {
            phi: Point::origin(),
            fx: r,
            w: Vector2::zeros(),
            j: 1.0,
        };
        let n = transport_normal(&m, &Vector2::new(1.0, 0.0), 0.0).unwrap();
        assert!((n - r * Vector2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((surface_measure_factor(&m, &Vector2::new(1.0, 0.0), 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stretch_measure_matches_facet_length() {
        // stretch x by 2; a vertical facet keeps its length, a horizontal one doubles
        let m = MapSample {
            phi: Point::origin(),
            fx: Matrix2::new(2.0, 0.0, 0.0, 1.0),
            w: Vector2::zeros(),
            j: 2.0,
        };
        let vertical = surface_measure_factor(&m, &Vector2::new(1.0, 0.0), 0.0).unwrap();
        let horizontal = surface_measure_factor(&m, &Vector2::new(0.0, 1.0), 0.0).unwrap();
        assert!((vertical - 1.0).abs() < 1e-15);
        assert!((horizontal - 2.0).abs() < 1e-15);
    }

    #[test]
    fn moving_normal_is_shorter_than_one() {
        let m = MapSample {
            phi: Point::origin(),
            fx: Matrix2::identity(),
            w: Vector2::new(0.5, 0.0),
            j: 1.0,
        };
        let n = transport_normal(&m, &Vector2::new(1.0, 0.0), 0.0).unwrap();
        assert!(n.norm() < 1.0);
        let n = transport_normal(&m, &Vector2::new(0.0, 1.0), 0.0).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pull_back_inverts_map() {
        let f = DeformationField::interpolate(&mesh(), (0.0, 1.0), 1, |x, t| Vector::new(0.05 * t * x.y, 0.02 * t));
        let x = Point::new(0.8, 0.3);
        let q = 5;
        let m = f.eval_in_quad(q, &x, 1.0);
        let cell = f.mesh().simplex_at(q, f.mesh().local_coords(2 * q, &x));
        assert!((f.pull_back(cell, &m.phi, 1.0) - x).norm() < 1e-14);
    }
}
