use super::{dirichlet_data, BoundaryMotion, DeformationError, DeformationField};
use crate::geometry::{BoundaryPart, CutGeometry, OrientedBoundary, Point};
use crate::mesh::{active_mesh, simplexify, CartesianMesh};
use crate::quadrature::gauss_legendre;
use crate::space::{build_aggregates, constrain_system, AffineMap, ScalarBasis1D, SpatialSpace, TripletMatrix};

/// Material and penalty constants of the extension problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticSettings {
    pub lambda: f64,
    pub mu: f64,
    /// Nitsche constant `c₀` in `τ_D = c₀ p² μ / h_T`.
    pub c0: f64,
}

impl Default for ElasticSettings {
    fn default() -> Self {
        ElasticSettings {
            lambda: 1.0,
            mu: 1.0,
            c0: 10.0,
        }
    }
}

/// Linear elasticity extension of the boundary motion over one slab.
///
/// The reference domain is bounded by `boundary`, the boundary at `t_ref`
/// (the slab start, or an older time when a reference is reused). Mesh
/// vertices on the box are held at zero, the first temporal layer at
/// `initial` (zero when absent), and the boundary displacement is imposed
/// weakly.
#[derive(Debug, Clone)]
pub struct ElasticExtensionProblem<'a> {
    pub mesh: &'a CartesianMesh,
    pub boundary: &'a OrientedBoundary,
    pub motion: &'a BoundaryMotion,
    pub t_ref: f64,
    pub slab: (f64, f64),
    pub time_order: usize,
    /// Vertex displacements at the slab start, stored at `vertex·2 + component`.
    pub initial: Option<&'a [f64]>,
    pub settings: ElasticSettings,
}

/// Interpolates the boundary motion itself at every vertex.
pub fn prescribed_field(
    mesh: &CartesianMesh,
    motion: &BoundaryMotion,
    t_ref: f64,
    slab: (f64, f64),
    time_order: usize,
) -> DeformationField {
    let data = dirichlet_data(motion, t_ref);
    DeformationField::interpolate(mesh, slab, time_order, |x, t| data.eval(x, t))
}

pub fn solve_extension(problem: &ElasticExtensionProblem) -> Result<DeformationField, DeformationError> {
    let smesh = if problem.mesh.is_simplex() {
        problem.mesh.clone()
    } else {
        simplexify(problem.mesh)
    };
    let bx = smesh.bounds();
    let geo = CutGeometry::new(&smesh, problem.boundary, &bx, false)?;
    let act = active_mesh(&smesh, geo.classification.clone())?;
    let space = SpatialSpace::new(&smesh, 1, 2)?;
    let agg = build_aggregates(&space, &act)?;
    let time = ScalarBasis1D::lobatto(problem.time_order.max(1));
    let nq = time.len();
    let tau = problem.slab.1 - problem.slab.0;
    let data = dirichlet_data(problem.motion, problem.t_ref);
    let ElasticSettings { lambda, mu, c0 } = problem.settings;

    // temporal mass ∫ b_k b_l dt
    let (ts, tw) = gauss_legendre(nq + 1);
    let mut mt = vec![vec![0.0; nq]; nq];
    for (s, w) in ts.iter().zip(&tw) {
        let b = time.eval(*s);
        for k in 0..nq {
            for l in 0..nq {
                mt[k][l] += tau * w * b[k] * b[l];
            }
        }
    }

    let ndof = space.num_dofs() * nq;
    let mut a = TripletMatrix::new(ndof);
    let mut rhs = vec![0.0; ndof];
    let dof = |node: usize, c: usize, k: usize| (node * 2 + c) * nq + k;
    let push_st = |a: &mut TripletMatrix, ni: usize, ci: usize, nj: usize, cj: usize, v: f64| {
        for k in 0..nq {
            for l in 0..nq {
                a.push(dof(ni, ci, k), dof(nj, cj, l), v * mt[k][l]);
            }
        }
    };
    // ε(φ_b e_j):σ(φ_a e_i)
    let stiff = |ga: [f64; 2], gb: [f64; 2], i: usize, j: usize| {
        let dot = ga[0] * gb[0] + ga[1] * gb[1];
        lambda * ga[i] * gb[j] + mu * (if i == j { dot } else { 0.0 } + ga[j] * gb[i])
    };
    // component m of σ(φ_b e_j) n
    let traction = |gb: [f64; 2], j: usize, n: [f64; 2], m: usize| {
        let gn = gb[0] * n[0] + gb[1] * n[1];
        lambda * gb[j] * n[m] + mu * (if m == j { gn } else { 0.0 } + gb[m] * n[j])
    };

    for c in act.active_cells() {
        let area = geo.cap_area(c);
        if area <= 0.0 {
            continue;
        }
        let sh = space.eval(c, [0.25, 0.25]);
        let nodes = space.cell_nodes(c);
        for (ia, &na) in nodes.iter().enumerate() {
            for (ib, &nb) in nodes.iter().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        let v = stiff(sh.grads[ia], sh.grads[ib], i, j) * area;
                        push_st(&mut a, na, i, nb, j, v);
                    }
                }
            }
        }
    }

    let (gs, gw) = gauss_legendre(3);
    let (qt, qw) = gauss_legendre(nq + 2);
    for f in geo.facets.iter().filter(|f| matches!(f.part, BoundaryPart::Embedded { .. })) {
        let c = f.cell;
        let len = f.length();
        let n = [f.normal.x, f.normal.y];
        let beta = c0 * mu / smesh.cell_size(c);
        let nodes = space.cell_nodes(c);
        for (s, w) in gs.iter().zip(&gw) {
            let x = f.a + (f.b - f.a) * *s;
            let sh = space.eval(c, smesh.local_coords(c, &x));
            let wl = w * len;
            for (ia, &na) in nodes.iter().enumerate() {
                for (ib, &nb) in nodes.iter().enumerate() {
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut v = 0.0;
                            if i == j {
                                v += beta * sh.values[ia] * sh.values[ib];
                            }
                            v -= sh.values[ia] * traction(sh.grads[ib], j, n, i);
                            v -= traction(sh.grads[ia], i, n, j) * sh.values[ib];
                            push_st(&mut a, na, i, nb, j, v * wl);
                        }
                    }
                }
            }
            for (r, wr) in qt.iter().zip(&qw) {
                let g = data.eval(&x, problem.slab.0 + r * tau);
                let g = [g.x, g.y];
                let b = time.eval(*r);
                for (ia, &na) in nodes.iter().enumerate() {
                    for i in 0..2 {
                        let mut v = beta * sh.values[ia] * g[i];
                        for m in 0..2 {
                            v -= traction(sh.grads[ia], i, n, m) * g[m];
                        }
                        for k in 0..nq {
                            rhs[dof(na, i, k)] += v * wl * wr * tau * b[k];
                        }
                    }
                }
            }
        }
    }

    let initial = problem.initial;
    let map = AffineMap::new(&agg, 2 * nq, |i| {
        let k = i % nq;
        let node = i / nq / 2;
        let comp = (i / nq) % 2;
        if k == 0 {
            Some(initial.map_or(0.0, |u| u[node * 2 + comp]))
        } else if space.is_box_node(node) {
            Some(0.0)
        } else {
            None
        }
    });
    let red = constrain_system(&a, &rhs, &map);
    let y = red.solve()?;
    let mut coef = map.expand(&y);
    for node in 0..space.num_nodes() {
        if map.is_used(node * 2 * nq) {
            continue;
        }
        let x: Point = space.node_point(node);
        for k in 0..nq {
            let u = data.eval(&x, problem.slab.0 + time.nodes()[k] * tau);
            coef[dof(node, 0, k)] = u.x;
            coef[dof(node, 1, k)] = u.y;
        }
    }
    let field = DeformationField::from_coefficients(&smesh, problem.slab, problem.time_order, coef);
    field.check_bijective(act.active_cells())?;
    Ok(field)
}
