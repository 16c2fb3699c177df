use nalgebra::Vector2;

use super::{AssemblyError, CutQuadrature, ModelProblem};
use crate::deformation::{surface_measure_factor, transported_normal, DeformationError, DeformationField, MapSample};
use crate::geometry::{BoundaryPart, IntersectionMesh, Partition, Point, SNAP_RELATIVE};
use crate::mesh::CartesianMesh;
use crate::quadrature::{polygon_rule, reference_triangle_rule};
use crate::space::{ScalarBasis1D, SpatialSpace, TripletMatrix};

use super::quadrature::{spatial_points, split_simplices};

/// The fixed ingredients of one slab.
#[derive(Debug, Clone, Copy)]
pub struct SlabContext<'a> {
    pub mesh: &'a CartesianMesh,
    pub space: &'a SpatialSpace,
    pub time: &'a ScalarBasis1D,
    pub slab: (f64, f64),
    pub quadrature: &'a CutQuadrature,
    pub field: &'a DeformationField,
    pub problem: &'a ModelProblem,
}

/// Previous-slab value at a quadrature point of the initial face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSample {
    /// Current cell containing `x`.
    pub cell: usize,
    pub x: Point,
    /// Quadrature weight including `J_Ω`.
    pub weight: f64,
    pub value: f64,
}

/// Source of the value entering the initial-face term.
#[derive(Debug, Clone, Copy)]
pub enum InitialCondition<'a> {
    /// `u₀ ∘ φ(·, tⁿ)`.
    Function,
    /// Previous end state in the same space (reference reused).
    SameSpace(&'a [f64]),
    /// Values sampled on an intersection mesh.
    Samples(&'a [InitialSample]),
}

/// Full (unreduced) slab system; `mass` and `stiffness` are filled on request.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSystem {
    pub matrix: TripletMatrix,
    pub rhs: Vec<f64>,
    pub mass: Option<TripletMatrix>,
    pub stiffness: Option<TripletMatrix>,
}

fn inverse_transpose(m: &MapSample) -> Result<nalgebra::Matrix2<f64>, DeformationError> {
    m.fx
        .try_inverse()
        .map(|i| i.transpose())
        .ok_or(DeformationError::SingularMap { det: m.j })
}

/// Value at local time `s` of a solution with coefficients `coef` on `cell`.
pub fn eval_solution(space: &SpatialSpace, time: &ScalarBasis1D, coef: &[f64], cell: usize, x: &Point, s: f64) -> f64 {
    let nq = time.len();
    let b = time.eval(s);
    let vals = space.values_at(cell, x);
    space
        .cell_nodes(cell)
        .iter()
        .zip(&vals)
        .map(|(n, v)| v * (0..nq).map(|k| coef[n * nq + k] * b[k]).sum::<f64>())
        .sum()
}

fn scatter(a: &mut TripletMatrix, local: &[f64], dofs: &[usize]) {
    let m = dofs.len();
    for i in 0..m {
        for j in 0..m {
            a.push(dofs[i], dofs[j], local[i * m + j]);
        }
    }
}

/// Assembles the slab bilinear and linear forms on the reference slab.
///
/// With `diagnostics` the space-time mass matrix (weighted by `J_Ω`) and the
/// spatial operator (diffusion, advection and Nitsche terms) are returned as well.
pub fn assemble_slab(
    ctx: &SlabContext,
    initial: &InitialCondition,
    diagnostics: bool,
) -> Result<SlabSystem, AssemblyError> {
    let SlabContext {
        mesh,
        space,
        time,
        slab,
        quadrature: quad,
        field,
        problem,
    } = *ctx;
    let nq = time.len();
    let tau = slab.1 - slab.0;
    let p = space.order();
    let mu = problem.mu;
    let n = space.num_nodes() * nq;
    let mut a = TripletMatrix::new(n);
    let mut rhs = vec![0.0; n];
    let mut mass = diagnostics.then(|| TripletMatrix::new(n));
    let mut stiff = diagnostics.then(|| TripletMatrix::new(n));
    let tq = &quad.time_points;
    let tw = &quad.time_weights;
    let tb: Vec<Vec<f64>> = tq.iter().map(|&s| time.eval(s)).collect();
    let tdb: Vec<Vec<f64>> = tq.iter().map(|&s| time.deriv(s)).collect();
    let b0 = time.eval(0.0);

    for (i, &c) in quad.cells.iter().enumerate() {
        let nodes = space.cell_nodes(c);
        let nl = nodes.len();
        let m = nl * nq;
        let dofs: Vec<usize> = nodes.iter().flat_map(|&nd| (0..nq).map(move |k| nd * nq + k)).collect();
        let mut la = vec![0.0; m * m];
        let mut lb = vec![0.0; m];
        let mut lm = vec![0.0; if diagnostics { m * m } else { 0 }];
        let mut ls = vec![0.0; if diagnostics { m * m } else { 0 }];
        let h = mesh.cell_size(c);
        let beta = problem.penalty(p, h);

        for vp in &quad.volume[i] {
            let sh = space.eval(c, mesh.local_coords(c, &vp.x));
            for r in 0..tq.len() {
                let ms = field.eval(vp.simplex, &vp.x, tq[r]);
                let it = inverse_transpose(&ms)?;
                let gx: Vec<Vector2<f64>> = sh.grads.iter().map(|g| it * Vector2::new(g[0], g[1])).collect();
                let t = slab.0 + tq[r] * tau;
                let wt = vp.weight * tw[r] * tau * ms.j;
                let adv = problem
                    .advection
                    .as_ref()
                    .map_or(Vector2::zeros(), |f| f(&ms.phi, t));
                let f = (problem.source)(&ms.phi, t);
                for ia in 0..nl {
                    for k in 0..nq {
                        let va = sh.values[ia] * tb[r][k];
                        let row = ia * nq + k;
                        lb[row] += wt * va * f;
                        for ib in 0..nl {
                            let wgb = ms.w.dot(&gx[ib]);
                            let agb = adv.dot(&gx[ib]);
                            let gg = gx[ia].dot(&gx[ib]);
                            for l in 0..nq {
                                let dtu = sh.values[ib] * tdb[r][l] / tau - wgb * tb[r][l];
                                let op = mu * gg * tb[r][k] * tb[r][l] + va * agb * tb[r][l];
                                let col = ib * nq + l;
                                la[row * m + col] += wt * (va * dtu + op);
                                if diagnostics {
                                    ls[row * m + col] += wt * op;
                                }
                            }
                        }
                    }
                }
            }
            let m0 = field.eval(vp.simplex, &vp.x, 0.0);
            let w0 = vp.weight * m0.j;
            for ia in 0..nl {
                for k in 0..nq {
                    let va = sh.values[ia] * b0[k];
                    for ib in 0..nl {
                        for l in 0..nq {
                            la[(ia * nq + k) * m + ib * nq + l] += w0 * va * sh.values[ib] * b0[l];
                        }
                    }
                }
            }
            if diagnostics {
                for r in 0..tq.len() {
                    let wm = w0 * tw[r] * tau;
                    for ia in 0..nl {
                        for k in 0..nq {
                            for ib in 0..nl {
                                for l in 0..nq {
                                    lm[(ia * nq + k) * m + ib * nq + l] +=
                                        wm * sh.values[ia] * tb[r][k] * sh.values[ib] * tb[r][l];
                                }
                            }
                        }
                    }
                }
            }
            let g0 = match initial {
                InitialCondition::Function => Some((problem.initial)(&m0.phi, slab.0)),
                InitialCondition::SameSpace(prev) => Some(eval_solution(space, time, prev, c, &vp.x, 1.0)),
                InitialCondition::Samples(_) => None,
            };
            if let Some(g) = g0 {
                for ia in 0..nl {
                    for k in 0..nq {
                        lb[ia * nq + k] += w0 * sh.values[ia] * b0[k] * g;
                    }
                }
            }
        }

        for fp in &quad.facets[i] {
            let sh = space.eval(c, mesh.local_coords(c, &fp.x));
            let neumann = match fp.part {
                BoundaryPart::Embedded { .. } => problem.neumann_parts.embedded,
                BoundaryPart::Artificial { .. } => problem.neumann_parts.box_sides,
            };
            for r in 0..tq.len() {
                let ms = field.eval(fp.simplex, &fp.x, tq[r]);
                let (nx, nt) = transported_normal(&ms, &fp.normal, 0.0)?;
                let factor = surface_measure_factor(&ms, &fp.normal, 0.0)?;
                let t = slab.0 + tq[r] * tau;
                let wt = fp.weight * tw[r] * tau * factor;
                if neumann {
                    let adv = problem
                        .advection
                        .as_ref()
                        .map_or(Vector2::zeros(), |f| f(&ms.phi, t));
                    let inflow = adv.dot(&nx) + nt;
                    if inflow < -1e-10 {
                        return Err(AssemblyError::IllPosedNeumann { value: inflow });
                    }
                    let g = (problem.neumann)(&ms.phi, t);
                    for ia in 0..nl {
                        for k in 0..nq {
                            lb[ia * nq + k] += wt * sh.values[ia] * tb[r][k] * g;
                        }
                    }
                    continue;
                }
                let it = inverse_transpose(&ms)?;
                let dn: Vec<f64> = sh
                    .grads
                    .iter()
                    .map(|g| mu * nx.dot(&(it * Vector2::new(g[0], g[1]))))
                    .collect();
                let g = (problem.dirichlet)(&ms.phi, t);
                for ia in 0..nl {
                    for k in 0..nq {
                        let row = ia * nq + k;
                        lb[row] += wt * (beta * sh.values[ia] - dn[ia]) * tb[r][k] * g;
                        for ib in 0..nl {
                            let s = beta * sh.values[ia] * sh.values[ib] - sh.values[ia] * dn[ib] - dn[ia] * sh.values[ib];
                            for l in 0..nq {
                                let v = wt * s * tb[r][k] * tb[r][l];
                                la[row * m + ib * nq + l] += v;
                                if diagnostics {
                                    ls[row * m + ib * nq + l] += v;
                                }
                            }
                        }
                    }
                }
            }
        }

        scatter(&mut a, &la, &dofs);
        for (d, v) in dofs.iter().zip(&lb) {
            rhs[*d] += v;
        }
        if let Some(mm) = mass.as_mut() {
            scatter(mm, &lm, &dofs);
        }
        if let Some(ss) = stiff.as_mut() {
            scatter(ss, &ls, &dofs);
        }
    }

    if let InitialCondition::Samples(samples) = initial {
        for s in samples.iter() {
            let vals = space.values_at(s.cell, &s.x);
            for (nd, v) in space.cell_nodes(s.cell).iter().zip(&vals) {
                for k in 0..nq {
                    rhs[nd * nq + k] += s.weight * v * b0[k] * s.value;
                }
            }
        }
    }

    Ok(SlabSystem {
        matrix: a,
        rhs,
        mass,
        stiffness: stiff,
    })
}

/// Previous-slab data needed to evaluate its end state.
#[derive(Debug, Clone, Copy)]
pub struct PreviousSlab<'a> {
    pub space: &'a SpatialSpace,
    pub time: &'a ScalarBasis1D,
    pub coefficients: &'a [f64],
    pub field: &'a DeformationField,
}

/// Samples the previous end state on the intersection mesh: each point is
/// pulled back through the affine piece of the previous map and evaluated in
/// the previous cell, then paired with the current cell.
pub fn jump_coupling(
    current: &SlabContext,
    previous: &PreviousSlab,
    intersection: &IntersectionMesh,
) -> Result<Vec<InitialSample>, AssemblyError> {
    let mesh = current.mesh;
    let rule = reference_triangle_rule(spatial_points(mesh, current.space.order()));
    let prev_mesh = previous.space.mesh();
    let mut out = Vec::new();
    for (k, cell) in intersection.cells.iter().enumerate() {
        let sid = cell.parent_previous.ok_or(AssemblyError::TransferGeometry { cell: k })?;
        let prev_cell = if prev_mesh.is_simplex() { sid } else { sid / 2 };
        let prev_tri = previous.field.mesh().cell_polygon(sid);
        let cur = cell.parent_current;
        let cur_poly = mesh.cell_polygon(cur);
        let tol_prev = SNAP_RELATIVE * prev_tri.diameter();
        let tol_cur = SNAP_RELATIVE * cur_poly.diameter();
        let cur_split = split_simplices(mesh, cur);
        for piece in &cell.pieces {
            for (x, w) in polygon_rule(piece, &rule) {
                let xp = previous.field.pull_back(sid, &x, 1.0);
                if !prev_tri.contains(&xp, tol_prev) || !cur_poly.contains(&x, tol_cur) {
                    return Err(AssemblyError::TransferGeometry { cell: k });
                }
                let value = eval_solution(previous.space, previous.time, previous.coefficients, prev_cell, &xp, 1.0);
                let simplex = cur_split
                    .iter()
                    .find(|(_, t)| t.contains(&x, tol_cur))
                    .map_or(cur_split[0].0, |(s, _)| *s);
                let j0 = current.field.eval(simplex, &x, 0.0).j;
                out.push(InitialSample {
                    cell: cur,
                    x,
                    weight: w * j0,
                    value,
                });
            }
        }
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::assembly::build_quadrature;
    use crate::deformation::{prescribed_field, BoundaryMotion};
    use crate::geometry::{intersect_triple, CutGeometry, OrientedBoundary};
    use crate::mesh::{active_mesh, build_mesh, ActiveMesh};
    use crate::space::ScalarBasis1D;

    const SHIFT: f64 = 0.2;

    struct Setup {
        mesh: CartesianMesh,
        space: SpatialSpace,
        time: ScalarBasis1D,
        motion: BoundaryMotion,
        initial: OrientedBoundary,
    }

    fn setup(p: usize, q: usize) -> Setup {
        let mesh = build_mesh(Point::origin(), [3.0, 3.0], [9, 9], [None, None]).unwrap();
        Setup {
            space: SpatialSpace::new(&mesh, p, 1).unwrap(),
            mesh,
            time: ScalarBasis1D::lobatto(q),
            motion: BoundaryMotion::Translation {
                velocity: Vector2::new(SHIFT, 0.05),
            },
            initial: OrientedBoundary::rectangle(Point::new(0.93, 1.04), Point::new(2.01, 1.87)),
        }
    }

    struct Slab {
        geo: CutGeometry,
        active: ActiveMesh,
        field: DeformationField,
        quad: CutQuadrature,
    }

    fn slab(s: &Setup, t: (f64, f64), p: usize, q: usize) -> Slab {
        let b = s.motion.boundary_at(&s.initial, t.0).unwrap();
        let geo = CutGeometry::new(&s.mesh, &b, &s.mesh.bounds(), false).unwrap();
        let base = active_mesh(&s.mesh, geo.classification.clone()).unwrap();
        let field = prescribed_field(&s.mesh, &s.motion, t.0, t, q.max(1));
        let next = s.motion.boundary_at(&s.initial, t.1).unwrap();
        let tiling = crate::geometry::DomainTiling::new(&next, &s.mesh.bounds(), 1.0);
        let active = base
            .extend_active(&s.mesh, |v| field.deformed_vertex(v, 1.0), &next, &tiling)
            .unwrap();
        let quad = build_quadrature(&s.mesh, &active, &geo, p, q);
        Slab {
            geo,
            active,
            field,
            quad,
        }
    }

    fn ctx<'a>(s: &'a Setup, sl: &'a Slab, t: (f64, f64), problem: &'a ModelProblem) -> SlabContext<'a> {
        SlabContext {
            mesh: &s.mesh,
            space: &s.space,
            time: &s.time,
            slab: t,
            quadrature: &sl.quad,
            field: &sl.field,
            problem,
        }
    }

    fn samples(s: &Setup, prev: &Slab, cur: &Slab, coef: &[f64], problem: &ModelProblem) -> Vec<InitialSample> {
        let previous: Vec<_> = prev
            .active
            .extended_cells()
            .flat_map(|c| s.mesh.simplex_ids(c))
            .map(|k| (k, prev.field.deformed_polygon(k, 1.0)))
            .collect();
        let im = intersect_triple(&s.mesh, &cur.geo.classification, &cur.geo.tiling, &previous).unwrap();
        let c = ctx(s, cur, (0.25, 0.5), problem);
        let ps = PreviousSlab {
            space: &s.space,
            time: &s.time,
            coefficients: coef,
            field: &prev.field,
        };
        jump_coupling(&c, &ps, &im).unwrap()
    }

    // Space-time coefficients of a function of the reference point only.
    fn steady(s: &Setup, f: impl Fn(&Point) -> f64) -> Vec<f64> {
        let nq = s.time.len();
        s.space
            .interpolate(f)
            .into_iter()
            .flat_map(|v| std::iter::repeat(v).take(nq))
            .collect()
    }

    #[test]
    fn first_slab_rhs_integrates_initial_state() {
        let s = setup(2, 1);
        let t = (0.0, 0.25);
        let sl = slab(&s, t, 2, 1);
        let mut problem = ModelProblem::heat(1.0);
        problem.initial = Arc::new(|x, _| x.x * x.x + x.y);
        let sys = assemble_slab(&ctx(&s, &sl, t, &problem), &InitialCondition::Function, false).unwrap();
        // Σ_i v_i(·, 0) = 1, so the entries sum to ∫_Ω u₀
        let total: f64 = sys.rhs.iter().sum();
        let (x0, x1, y0, y1) = (0.93f64, 2.01f64, 1.04f64, 1.87f64);
        let exact = (x1.powi(3) - x0.powi(3)) / 3.0 * (y1 - y0) + (x1 - x0) * (y1 * y1 - y0 * y0) / 2.0;
        assert!((total - exact).abs() < 1e-12, "{total} {exact}");
    }

    #[test]
    fn transferred_polynomial_is_exact() {
        for p in [1, 2] {
            let s = setup(p, 1);
            let problem = ModelProblem::heat(1.0);
            let a = slab(&s, (0.0, 0.25), p, 1);
            let b = slab(&s, (0.25, 0.5), p, 1);
            let poly = move |x: &Point| if p == 1 { 1.0 + 2.0 * x.x - x.y } else { x.x * x.y - 0.5 * x.y * x.y + x.x };
            let coef = steady(&s, poly);
            let smp = samples(&s, &a, &b, &coef, &problem);
            assert!(!smp.is_empty());
            let d = Vector2::new(SHIFT, 0.05) * 0.25;
            let worst = smp
                .iter()
                .map(|q| (q.value - poly(&(q.x - d))).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "p = {p}: {worst:e}");
        }
    }

    #[test]
    fn constant_transfer_matches_initial_mass() {
        let s = setup(2, 2);
        let a = slab(&s, (0.0, 0.25), 2, 2);
        let b = slab(&s, (0.25, 0.5), 2, 2);
        let mut problem = ModelProblem::heat(1.0);
        problem.initial = Arc::new(|_, _| 1.0);
        let coef = steady(&s, |_| 1.0);
        let smp = samples(&s, &a, &b, &coef, &problem);
        let c = ctx(&s, &b, (0.25, 0.5), &problem);
        let via_samples = assemble_slab(&c, &InitialCondition::Samples(&smp), false).unwrap();
        let direct = assemble_slab(&c, &InitialCondition::Function, false).unwrap();
        let worst = via_samples
            .rhs
            .iter()
            .zip(&direct.rhs)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");
        assert_eq!(via_samples.matrix, direct.matrix);
    }

    #[test]
    fn samples_lie_in_both_parents() {
        let s = setup(1, 1);
        let a = slab(&s, (0.0, 0.25), 1, 1);
        let b = slab(&s, (0.25, 0.5), 1, 1);
        let coef = steady(&s, |_| 0.0);
        let smp = samples(&s, &a, &b, &coef, &ModelProblem::heat(1.0));
        let area: f64 = smp.iter().map(|q| q.weight).sum();
        assert!((area - b.geo.domain_area()).abs() < 1e-12);
        assert!(smp.iter().all(|q| q.weight > 0.0));
    }

    #[test]
    fn diagnostics_split_matrix() {
        let s = setup(1, 1);
        let t = (0.0, 0.25);
        let sl = slab(&s, t, 1, 1);
        let problem = ModelProblem::heat(1.0);
        let sys = assemble_slab(&ctx(&s, &sl, t, &problem), &InitialCondition::Function, true).unwrap();
        let m = sys.mass.unwrap();
        let a = sys.stiffness.unwrap();
        // the mass matrix integrates 1 over the space-time slab
        let ones = vec![1.0; m.n];
        let total: f64 = m.mul_vec(&ones).iter().sum();
        let vol = sl.geo.domain_area() * 0.25;
        assert!((total - vol).abs() < 1e-12);
        assert!(a.compressed().iter().all(|e| e.2.is_finite()));
    }
}
