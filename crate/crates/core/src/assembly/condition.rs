use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::space::{constrain_system, AffineMap, TripletMatrix};

fn one_norm(m: &Mat<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖A‖₁ ‖A⁻¹‖₁` through an explicit dense inverse. Singular matrices give
/// `f64::INFINITY`.
pub fn one_norm_condition(a: &TripletMatrix) -> f64 {
    let n = a.n;
    if n == 0 {
        return 1.0;
    }
    let mut d = Mat::<f64>::zeros(n, n);
    for &(i, j, v) in &a.entries {
        d[(i, j)] += v;
    }
    let inv = d.partial_piv_lu().inverse();
    if (0..n).any(|j| (0..n).any(|i| !inv[(i, j)].is_finite())) {
        return f64::INFINITY;
    }
    let mut r = &d * &inv;
    for i in 0..n {
        r[(i, i)] -= 1.0;
    }
    if one_norm(&r) > 1e-3 {
        return f64::INFINITY;
    }
    one_norm(&d) * one_norm(&inv)
}

/// 1-norm condition numbers of the constrained mass and stiffness matrices.
pub fn condition_numbers(mass: &TripletMatrix, stiffness: &TripletMatrix, map: &AffineMap) -> (f64, f64) {
    let zero = vec![0.0; mass.n];
    let m = constrain_system(mass, &zero, map).matrix;
    let a = constrain_system(stiffness, &zero, map).matrix;
    (one_norm_condition(&m), one_norm_condition(&a))
}
