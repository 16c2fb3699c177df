/// Products of spatial and temporal shape functions on a space-time cell.
///
/// Shape `(a, k)` is spatial function `a` times temporal function `k`, stored
/// at `a·nq + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorShapeSet {
    pub n_space: usize,
    pub n_time: usize,
}

impl TensorShapeSet {
    pub fn new(n_space: usize, n_time: usize) -> Self {
        TensorShapeSet { n_space, n_time }
    }

    pub fn len(&self) -> usize {
        self.n_space * self.n_time
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, a: usize, k: usize) -> usize {
        a * self.n_time + k
    }

    /// Values of all products given spatial and temporal values.
    pub fn values(&self, space: &[f64], time: &[f64]) -> Vec<f64> {
        space.iter().flat_map(|s| time.iter().map(move |t| s * t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classify_cells, OrientedBoundary, Point};
    use crate::mesh::{active_mesh, build_mesh, CellShape};
    use crate::space::{build_aggregates, LagrangeElement, ScalarBasis1D, SpatialSpace};

    #[test]
    fn partition_of_unity() {
        let e = LagrangeElement::new(CellShape::TriUpper, 3).unwrap();
        let b = ScalarBasis1D::lobatto(2);
        let t = TensorShapeSet::new(e.len(), b.len());
        for (xi, s) in [([0.1, 0.7], 0.3), ([0.5, 0.5], 0.0), ([0.2, 0.9], 1.0)] {
            let v = t.values(&e.values(xi), &b.eval(s));
            assert_eq!(v.len(), t.len());
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(v[t.index(2, 1)], e.values(xi)[2] * b.eval(s)[1]);
        }
    }

    #[test]
    fn slabwise_extension_equals_layerwise() {
        let m = build_mesh(Point::origin(), [3.0, 3.0], [6, 6], [None, None]).unwrap();
        let hole = OrientedBoundary::square_hole(Point::new(1.5, 1.5), 1.0).unwrap();
        let act = active_mesh(&m, classify_cells(&m, &hole).unwrap()).unwrap();
        let s = SpatialSpace::new(&m, 2, 1).unwrap();
        let agg = build_aggregates(&s, &act).unwrap();
        let nq = 3;
        let nn = s.num_nodes();
        let full: Vec<f64> = (0..nn * nq).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let mut st = full.clone();
        agg.extension_apply(&mut st, nq);
        for k in 0..nq {
            let mut layer: Vec<f64> = (0..nn).map(|n| full[n * nq + k]).collect();
            agg.extension_apply(&mut layer, 1);
            for n in 0..nn {
                assert_eq!(layer[n], st[n * nq + k]);
            }
        }
    }
}
