//! Gauss rules on the unit interval, collapsed-coordinate rules on triangles
//! and fan rules on convex polygons.

use crate::geometry::{orient, ConvexPolygon, Point};

fn legendre(n: usize, x: f64) -> (f64, f64) {
    // returns (P_n(x), P_n'(x))
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * x.powi(n as i32 + 1)
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule on [0, 1], exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        // map [-1, 1] -> [0, 1], ascending
        x[n - 1 - i] = 0.5 * (z + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// `n`-point Gauss–Lobatto nodes on [0, 1], including both endpoints.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "Lobatto rules need at least two points");
    let m = n - 1;
    let mut out = vec![0.0; n];
    out[n - 1] = 1.0;
    for i in 1..m {
        let mut z = -(std::f64::consts::PI * i as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, z);
            let ddp = (2.0 * z * dp - (m * (m + 1)) as f64 * p) / (1.0 - z * z);
            let dz = dp / ddp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        out[i] = 0.5 * (z + 1.0);
    }
    out
}

/// Collapsed Gauss rule with `m` points per direction on the reference
/// triangle (0,0), (1,0), (0,1). Exact to total degree `2m - 2`; weights sum to 1/2.
pub fn reference_triangle_rule(m: usize) -> Vec<([f64; 2], f64)> {
    let (x, w) = gauss_legendre(m);
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let s = x[i];
            let r = x[j];
            out.push(([s, (1.0 - s) * r], w[i] * w[j] * (1.0 - s)));
        }
    }
    out
}

/// Physical points and weights on triangle `(a, b, c)`; weights carry its area.
pub fn triangle_rule(tri: &[Point; 3], rule: &[([f64; 2], f64)]) -> Vec<(Point, f64)> {
    let [a, b, c] = tri;
    let det = orient(a, b, c).abs();
    rule.iter()
        .map(|(xi, w)| (a + (b - a) * xi[0] + (c - a) * xi[1], w * det))
        .collect()
}

/// Fan rule on a convex polygon built from a reference triangle rule.
pub fn polygon_rule(poly: &ConvexPolygon, rule: &[([f64; 2], f64)]) -> Vec<(Point, f64)> {
    poly.fan().flat_map(|t| triangle_rule(&t, rule)).collect()
}
