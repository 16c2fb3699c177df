use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use super::{AggregationMap, NodeRole, SpaceError};

/// Square sparse matrix in coordinate form; duplicates are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TripletMatrix {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        TripletMatrix { n, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// Entries with duplicates summed, sorted by (row, column).
    pub fn compressed(&self) -> Vec<(usize, usize, f64)> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(e.len());
        for (i, j, v) in e {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out
    }

    pub fn to_faer(&self) -> SparseColMat<usize, f64> {
        let t: Vec<Triplet<usize, usize, f64>> = self.entries.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &t).expect("indices are in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for &(i, j, v) in &self.entries {
            d[i][j] += v;
        }
        d
    }

    /// Solves `A x = b` with a sparse LU factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SpaceError> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let a = self.to_faer();
        let lu = a
            .sp_lu()
            .map_err(|e| SpaceError::SingularSystem(format!("factorization failed: {e:?}")))?;
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let sol = lu.solve(&rhs);
        let x: Vec<f64> = (0..self.n).map(|i| sol[(i, 0)]).collect();
        let r = self.mul_vec(&x);
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rn = r.iter().zip(b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if x.iter().any(|v| !v.is_finite()) || rn > 1e-6 * bn.max(f64::MIN_POSITIVE) {
            return Err(SpaceError::SingularSystem(format!(
                "relative residual {:.3e} after LU solve of size {}",
                rn / bn.max(f64::MIN_POSITIVE),
                self.n
            )));
        }
        Ok(x)
    }
}

/// `x_full = C·y + g`: each full DOF is a combination of reduced unknowns plus a lift.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    rows: Vec<Vec<(usize, f64)>>,
    lift: Vec<f64>,
    used: Vec<bool>,
    n_reduced: usize,
}

impl AffineMap {
    /// Builds the map for a field with `block` entries per node. `fixed`
    /// returns a prescribed value for a full DOF, if any.
    pub fn new(agg: &AggregationMap, block: usize, fixed: impl Fn(usize) -> Option<f64>) -> Self {
        let roles = agg.roles();
        let n = roles.len() * block;
        let mut rows = vec![Vec::new(); n];
        let mut lift = vec![0.0; n];
        let mut used = vec![false; n];
        let mut n_reduced = 0;
        for (node, role) in roles.iter().enumerate() {
            if *role != NodeRole::Free {
                continue;
            }
            for r in 0..block {
                let i = node * block + r;
                used[i] = true;
                match fixed(i) {
                    Some(v) => lift[i] = v,
                    None => {
                        rows[i] = vec![(n_reduced, 1.0)];
                        n_reduced += 1;
                    }
                }
            }
        }
        for (node, role) in roles.iter().enumerate() {
            let NodeRole::Constrained(pairs) = role else { continue };
            for r in 0..block {
                let i = node * block + r;
                used[i] = true;
                if let Some(v) = fixed(i) {
                    lift[i] = v;
                    continue;
                }
                let mut row = Vec::new();
                let mut g = 0.0;
                for &(m, c) in pairs {
                    let j = m * block + r;
                    g += c * lift[j];
                    row.extend(rows[j].iter().map(|&(k, w)| (k, c * w)));
                }
                rows[i] = row;
                lift[i] = g;
            }
        }
        AffineMap {
            rows,
            lift,
            used,
            n_reduced,
        }
    }

    pub fn num_full(&self) -> usize {
        self.rows.len()
    }

    pub fn num_reduced(&self) -> usize {
        self.n_reduced
    }

    pub fn is_used(&self, i: usize) -> bool {
        self.used[i]
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn lift(&self) -> &[f64] {
        &self.lift
    }

    /// `C·y + g`; unused DOFs are zero.
    pub fn expand(&self, y: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.lift)
            .map(|(row, g)| g + row.iter().map(|&(k, c)| c * y[k]).sum::<f64>())
            .collect()
    }
}

/// Reduced system `CᵀAC y = Cᵀ(b − A g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub matrix: TripletMatrix,
    pub rhs: Vec<f64>,
}

impl ReducedSystem {
    pub fn solve(&self) -> Result<Vec<f64>, SpaceError> {
        self.matrix.solve(&self.rhs)
    }
}

pub fn constrain_system(a: &TripletMatrix, b: &[f64], map: &AffineMap) -> ReducedSystem {
    let ag = a.mul_vec(map.lift());
    let mut m = TripletMatrix::new(map.num_reduced());
    for &(i, j, v) in &a.entries {
        for &(ri, ci) in map.row(i) {
            for &(rj, cj) in map.row(j) {
                m.push(ri, rj, ci * cj * v);
            }
        }
    }
    let mut rhs = vec![0.0; map.num_reduced()];
    for i in 0..a.n {
        let bi = b[i] - ag[i];
        for &(ri, ci) in map.row(i) {
            rhs[ri] += ci * bi;
        }
    }
    ReducedSystem { matrix: m, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CellClassification, CellKind, Point};
    use crate::mesh::{active_mesh, build_mesh};
    use crate::space::{build_aggregates, SpatialSpace};

    fn map_for(kinds: Vec<CellKind>, n: usize) -> AggregationMap {
        let m = build_mesh(Point::origin(), [n as f64, 1.0], [n, 1], [None, None]).unwrap();
        let act = active_mesh(&m, CellClassification::from_kinds(kinds)).unwrap();
        build_aggregates(&SpatialSpace::new(&m, 1, 1).unwrap(), &act).unwrap()
    }

    fn laplacian(n: usize) -> TripletMatrix {
        let mut a = TripletMatrix::new(n);
        for i in 0..n {
            a.push(i, i, 2.0 + i as f64 * 0.1);
            if i + 1 < n {
                a.push(i, i + 1, -1.0);
                a.push(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn empty_constraints_leave_system_unchanged() {
        let agg = map_for(vec![CellKind::Interior; 2], 2);
        let map = AffineMap::new(&agg, 1, |_| None);
        let a = laplacian(6);
        let b: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let red = constrain_system(&a, &b, &map);
        assert_eq!(red.matrix.compressed(), a.compressed());
        assert_eq!(red.rhs, b);
    }

    #[test]
    fn reduced_size_and_symmetry() {
        let agg = map_for(vec![CellKind::Interior, CellKind::Cut, CellKind::Cut], 3);
        let map = AffineMap::new(&agg, 1, |_| None);
        assert_eq!(map.num_reduced(), agg.num_free());
        let a = laplacian(8);
        let red = constrain_system(&a, &[1.0; 8], &map);
        let d = red.matrix.to_dense();
        for i in 0..d.len() {
            for j in 0..d.len() {
                assert!((d[i][j] - d[j][i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lifting_matches_direct_elimination() {
        // fix DOF 0 to 2 and solve the remaining 3x3 by hand
        let agg = map_for(vec![CellKind::Interior], 1);
        let map = AffineMap::new(&agg, 1, |i| (i == 0).then_some(2.0));
        let a = laplacian(4);
        let b = [1.0, 0.0, 0.5, 0.0];
        let y = constrain_system(&a, &b, &map).solve().unwrap();
        let x = map.expand(&y);
        assert_eq!(x[0], 2.0);
        let r = a.mul_vec(&x);
        for i in 1..4 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let mut a = TripletMatrix::new(2);
        a.push(0, 0, 1.0);
        a.push(0, 1, 1.0);
        a.push(1, 0, 1.0);
        a.push(1, 1, 1.0);
        assert!(matches!(a.solve(&[1.0, 0.0]), Err(SpaceError::SingularSystem(_))));
    }
}
