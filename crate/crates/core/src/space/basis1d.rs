use crate::quadrature::gauss_lobatto_nodes;

/// Nodal Lagrange basis on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarBasis1D {
    nodes: Vec<f64>,
}

impl ScalarBasis1D {
    pub fn new(nodes: Vec<f64>) -> Self {
        assert!(!nodes.is_empty(), "a basis needs at least one node");
        ScalarBasis1D { nodes }
    }

    /// Order-`q` basis on Gauss–Lobatto nodes; `q = 0` uses the midpoint.
    pub fn lobatto(q: usize) -> Self {
        if q == 0 {
            Self::new(vec![0.5])
        } else {
            Self::new(gauss_lobatto_nodes(q + 1))
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (s - self.nodes[j]) / (self.nodes[i] - self.nodes[j]))
                    .product()
            })
            .collect()
    }

    pub fn deriv(&self, s: f64) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                let mut total = 0.0;
                for k in 0..n {
                    if k == i {
                        continue;
                    }
                    let mut term = 1.0 / (self.nodes[i] - self.nodes[k]);
                    for j in 0..n {
                        if j != i && j != k {
                            term *= (s - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                        }
                    }
                    total += term;
                }
                total
            })
            .collect()
    }
}
