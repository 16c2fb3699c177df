use nalgebra::{Matrix2, Vector2};

use super::slab::{eval_solution, InitialCondition, SlabContext};
use super::{AssemblyError, ExactSolution};
use crate::deformation::DeformationError;
use crate::geometry::BoundaryPart;

/// Squared error contributions of one slab.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SlabErrors {
    /// `‖e(tⁿ⁺) − e(tⁿ⁻)‖²` on `Ωⁿ`.
    pub jump: f64,
    /// `∫ μ‖∇e‖²` over the slab.
    pub gradient: f64,
    /// `∫ Σ β_T ‖e‖²` on the Dirichlet boundary over the slab.
    pub boundary: f64,
    /// `∫ Σ μ h_T² |e|²_{H²}` over the slab.
    pub hessian: f64,
    /// `‖e(tⁿ⁺¹)‖²` on the end-of-slab domain.
    pub end_l2: f64,
    /// `‖∇e(tⁿ⁺¹)‖²` on the end-of-slab domain.
    pub end_grad: f64,
}

impl SlabErrors {
    /// Time integral of the squared `V(h)` norm.
    pub fn energy(&self) -> f64 {
        self.gradient + self.boundary + self.hessian
    }
}

/// Accumulated error norms over the slabs marched so far.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormReport {
    pub c_mu: f64,
    pub slabs: Vec<SlabErrors>,
}

impl NormReport {
    pub fn new(c_mu: f64) -> Self {
        NormReport {
            c_mu,
            slabs: Vec::new(),
        }
    }

    pub fn push(&mut self, e: SlabErrors) {
        self.slabs.push(e);
    }

    pub fn jumps(&self) -> f64 {
        self.slabs.iter().map(|e| e.jump).sum()
    }

    pub fn energy(&self) -> f64 {
        self.slabs.iter().map(SlabErrors::energy).sum()
    }

    /// Accumulated DG norm after the last slab.
    pub fn dg(&self) -> f64 {
        let end = self.slabs.last().map_or(0.0, |e| e.end_l2);
        (end + self.jumps() + self.c_mu * self.energy()).sqrt()
    }

    /// Accumulated DG norm after each slab.
    pub fn dg_history(&self) -> Vec<f64> {
        let (mut j, mut v) = (0.0, 0.0);
        self.slabs
            .iter()
            .map(|e| {
                j += e.jump;
                v += e.energy();
                (e.end_l2 + j + self.c_mu * v).sqrt()
            })
            .collect()
    }

    /// `L²` error at the final time.
    pub fn l2(&self) -> f64 {
        self.slabs.last().map_or(0.0, |e| e.end_l2.sqrt())
    }

    /// Full `H¹` error at the final time.
    pub fn h1(&self) -> f64 {
        self.slabs.last().map_or(0.0, |e| (e.end_l2 + e.end_grad).sqrt())
    }
}

struct Local {
    value: f64,
    grad: Vector2<f64>,
    hess: Matrix2<f64>,
}

// u_h and its reference derivatives at local time s.
fn local_solution(ctx: &SlabContext, coef: &[f64], cell: usize, x: &crate::geometry::Point, s: f64) -> Local {
    let nq = ctx.time.len();
    let b = ctx.time.eval(s);
    let sh = ctx.space.eval(cell, ctx.mesh.local_coords(cell, x));
    let mut out = Local {
        value: 0.0,
        grad: Vector2::zeros(),
        hess: Matrix2::zeros(),
    };
    for (a, nd) in ctx.space.cell_nodes(cell).into_iter().enumerate() {
        let c: f64 = (0..nq).map(|k| coef[nd * nq + k] * b[k]).sum();
        out.value += sh.values[a] * c;
        out.grad += Vector2::new(sh.grads[a][0], sh.grads[a][1]) * c;
        let h = sh.hessians[a];
        out.hess += Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]) * c;
    }
    out
}

/// Squared error contributions of the slab solution `coef` against `exact`.
///
/// The jump uses the same initial data as the assembly: `u₀` on the first
/// slab, the reused previous state, or the intersection-mesh samples.
pub fn slab_errors(
    ctx: &SlabContext,
    coef: &[f64],
    exact: &ExactSolution,
    initial: &InitialCondition,
) -> Result<SlabErrors, AssemblyError> {
    let quad = ctx.quadrature;
    let tau = ctx.slab.1 - ctx.slab.0;
    let mu = ctx.problem.mu;
    let p = ctx.space.order();
    let mut e = SlabErrors::default();
    for (i, &c) in quad.cells.iter().enumerate() {
        let h = ctx.mesh.cell_size(c);
        let beta = ctx.problem.penalty(p, h);
        for vp in &quad.volume[i] {
            for (&s, &w) in quad.time_points.iter().zip(&quad.time_weights) {
                let m = ctx.field.eval(vp.simplex, &vp.x, s);
                let it = m
                    .fx
                    .try_inverse()
                    .ok_or(DeformationError::SingularMap { det: m.j })?
                    .transpose();
                let t = ctx.slab.0 + s * tau;
                let uh = local_solution(ctx, coef, c, &vp.x, s);
                let wt = vp.weight * w * tau * m.j;
                let ge = (exact.gradient)(&m.phi, t) - it * uh.grad;
                let he = (exact.hessian)(&m.phi, t) - it * uh.hess * it.transpose();
                e.gradient += wt * mu * ge.norm_squared();
                e.hessian += wt * mu * h * h * he.norm_squared();
            }
            let m1 = ctx.field.eval(vp.simplex, &vp.x, 1.0);
            let it1 = m1
                .fx
                .try_inverse()
                .ok_or(DeformationError::SingularMap { det: m1.j })?
                .transpose();
            let u1 = local_solution(ctx, coef, c, &vp.x, 1.0);
            let w1 = vp.weight * m1.j;
            e.end_l2 += w1 * ((exact.value)(&m1.phi, ctx.slab.1) - u1.value).powi(2);
            e.end_grad += w1 * ((exact.gradient)(&m1.phi, ctx.slab.1) - it1 * u1.grad).norm_squared();

            let prev = match initial {
                InitialCondition::Function => {
                    let m0 = ctx.field.eval(vp.simplex, &vp.x, 0.0);
                    Some(((ctx.problem.initial)(&m0.phi, ctx.slab.0), m0.j))
                }
                InitialCondition::SameSpace(prev) => {
                    let m0 = ctx.field.eval(vp.simplex, &vp.x, 0.0);
                    Some((eval_solution(ctx.space, ctx.time, prev, c, &vp.x, 1.0), m0.j))
                }
                InitialCondition::Samples(_) => None,
            };
            if let Some((g, j0)) = prev {
                let u0 = local_solution(ctx, coef, c, &vp.x, 0.0);
                e.jump += vp.weight * j0 * (u0.value - g).powi(2);
            }
        }
        for fp in &quad.facets[i] {
            let dirichlet = match fp.part {
                BoundaryPart::Embedded { .. } => !ctx.problem.neumann_parts.embedded,
                BoundaryPart::Artificial { .. } => !ctx.problem.neumann_parts.box_sides,
            };
            if !dirichlet {
                continue;
            }
            for (&s, &w) in quad.time_points.iter().zip(&quad.time_weights) {
                let m = ctx.field.eval(fp.simplex, &fp.x, s);
                let it = m
                    .fx
                    .try_inverse()
                    .ok_or(DeformationError::SingularMap { det: m.j })?
                    .transpose();
                let nanson = m.j * (it * fp.normal).norm();
                let t = ctx.slab.0 + s * tau;
                let uh = local_solution(ctx, coef, c, &fp.x, s);
                e.boundary += fp.weight * w * tau * nanson * beta * ((exact.value)(&m.phi, t) - uh.value).powi(2);
            }
        }
    }
    if let InitialCondition::Samples(samples) = initial {
        for smp in samples.iter() {
            let u0 = eval_solution(ctx.space, ctx.time, coef, smp.cell, &smp.x, 0.0);
            e.jump += smp.weight * (u0 - smp.value).powi(2);
        }
    }
    Ok(e)
}
