//! Independent tensor-product space-time heat assembler for a mesh-aligned
//! square, shared by the oracle tests and the acceptance run.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use slabcut::assembly::ModelProblem;
use slabcut::geometry::{OrientedBoundary, Point};

pub const TAU: f64 = 0.1;
pub const C0: f64 = 10.0;

const G3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

fn lagrange(nodes: &[f64], i: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &xj)| (x - xj) / (nodes[i] - xj))
        .product()
}

fn lagrange_d(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for m in 0..nodes.len() {
        if m == i {
            continue;
        }
        let mut t = 1.0 / (nodes[i] - nodes[m]);
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i && j != m {
                t *= (x - xj) / (nodes[i] - xj);
            }
        }
        s += t;
    }
    s
}

fn equispaced(p: usize) -> Vec<f64> {
    (0..=p).map(|i| i as f64 / p as f64).collect()
}

fn lobatto(q: usize) -> Vec<f64> {
    match q {
        0 => vec![0.5],
        1 => vec![0.0, 1.0],
        2 => vec![0.0, 0.5, 1.0],
        _ => unreachable!(),
    }
}

type EdgeParam = Box<dyn Fn(f64) -> (f64, f64)>;

pub struct Oracle {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

// Domain [0.25, 0.75]² on an n×n mesh of the unit square; u₀ = 1, f = 1, u_D = 0.
pub fn oracle(n_cells: usize, p: usize, q: usize) -> Oracle {
    let h = 1.0 / n_cells as f64;
    let (lo, hi) = (n_cells / 4, 3 * n_cells / 4);
    let w = n_cells * p + 1;
    let tn = lobatto(q);
    let nq = tn.len();
    let n = w * w * nq;
    let sn = equispaced(p);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);

    // temporal integrals on [0, 1]
    let mut tmass = vec![vec![0.0; nq]; nq];
    let mut tderiv = vec![vec![0.0; nq]; nq];
    let mut tint = vec![0.0; nq];
    for &(s, ws) in &G3 {
        for k in 0..nq {
            tint[k] += ws * lagrange(&tn, k, s);
            for l in 0..nq {
                tmass[k][l] += ws * lagrange(&tn, k, s) * lagrange(&tn, l, s);
                tderiv[k][l] += ws * lagrange(&tn, k, s) * lagrange_d(&tn, l, s);
            }
        }
    }
    let t0: Vec<f64> = (0..nq).map(|k| lagrange(&tn, k, 0.0)).collect();

    let beta = C0 * (p * p) as f64 / h;
    let local = |ix: usize, iy: usize| -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for bb in 0..=p {
            for aa in 0..=p {
                v.push(((iy * p + bb) * w + ix * p + aa, aa, bb));
            }
        }
        v
    };
    let phi = |aa: usize, bb: usize, x: f64, y: f64| lagrange(&sn, aa, x) * lagrange(&sn, bb, y);
    let grad = |aa: usize, bb: usize, x: f64, y: f64| {
        [
            lagrange_d(&sn, aa, x) * lagrange(&sn, bb, y) / h,
            lagrange(&sn, aa, x) * lagrange_d(&sn, bb, y) / h,
        ]
    };

    for iy in lo..hi {
        for ix in lo..hi {
            let dofs = local(ix, iy);
            let m = dofs.len();
            let mut mass = vec![vec![0.0; m]; m];
            let mut stiff = vec![vec![0.0; m]; m];
            let mut integral = vec![0.0; m];
            for &(x, wx) in &G3 {
                for &(y, wy) in &G3 {
                    let wt = wx * wy * h * h;
                    for (i, &(_, ai, bi)) in dofs.iter().enumerate() {
                        integral[i] += wt * phi(ai, bi, x, y);
                        for (j, &(_, aj, bj)) in dofs.iter().enumerate() {
                            mass[i][j] += wt * phi(ai, bi, x, y) * phi(aj, bj, x, y);
                            let (gi, gj) = (grad(ai, bi, x, y), grad(aj, bj, x, y));
                            stiff[i][j] += wt * (gi[0] * gj[0] + gi[1] * gj[1]);
                        }
                    }
                }
            }
            // domain sides inside this cell: (local edge parameterization, outward normal)
            let mut sides: Vec<(EdgeParam, [f64; 2])> = Vec::new();
            if ix == lo {
                sides.push((Box::new(|s| (0.0, s)), [-1.0, 0.0]));
            }
            if ix == hi - 1 {
                sides.push((Box::new(|s| (1.0, s)), [1.0, 0.0]));
            }
            if iy == lo {
                sides.push((Box::new(|s| (s, 0.0)), [0.0, -1.0]));
            }
            if iy == hi - 1 {
                sides.push((Box::new(|s| (s, 1.0)), [0.0, 1.0]));
            }
            let mut nitsche = vec![vec![0.0; m]; m];
            for (param, nrm) in &sides {
                for &(s, ws) in &G3 {
                    let (x, y) = param(s);
                    let wt = ws * h;
                    for (i, &(_, ai, bi)) in dofs.iter().enumerate() {
                        let gi = grad(ai, bi, x, y);
                        let dni = gi[0] * nrm[0] + gi[1] * nrm[1];
                        for (j, &(_, aj, bj)) in dofs.iter().enumerate() {
                            let gj = grad(aj, bj, x, y);
                            let dnj = gj[0] * nrm[0] + gj[1] * nrm[1];
                            let (vi, vj) = (phi(ai, bi, x, y), phi(aj, bj, x, y));
                            nitsche[i][j] += wt * (beta * vi * vj - vi * dnj - dni * vj);
                        }
                    }
                }
            }
            for (i, &(gi, ..)) in dofs.iter().enumerate() {
                for k in 0..nq {
                    b[gi * nq + k] += integral[i] * (TAU * tint[k] + t0[k]);
                    for (j, &(gj, ..)) in dofs.iter().enumerate() {
                        for l in 0..nq {
                            a[(gi * nq + k, gj * nq + l)] += mass[i][j] * (tderiv[k][l] + t0[k] * t0[l])
                                + (stiff[i][j] + nitsche[i][j]) * TAU * tmass[k][l];
                        }
                    }
                }
            }
        }
    }
    Oracle { matrix: a, rhs: b }
}

pub fn problem() -> ModelProblem {
    let mut pr = ModelProblem::heat(1.0);
    pr.source = Arc::new(|_, _| 1.0);
    pr.initial = Arc::new(|_, _| 1.0);
    pr.c0 = C0;
    pr
}

pub fn square() -> OrientedBoundary {
    OrientedBoundary::rectangle(Point::new(0.25, 0.25), Point::new(0.75, 0.75))
}
