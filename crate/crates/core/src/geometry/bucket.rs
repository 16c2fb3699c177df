use super::Aabb;

/// Uniform bucket grid over axis-aligned boxes. Queries return a conservative
/// superset of the inserted ids whose boxes overlap the query box.
#[derive(Debug, Clone)]
pub struct BucketGrid {
    bounds: Aabb,
    nx: usize,
    ny: usize,
    cell: [f64; 2],
    buckets: Vec<Vec<usize>>,
    boxes: Vec<Aabb>,
}

impl BucketGrid {
    /// `bucket_size` is typically the background cell size.
    pub fn new(bounds: Aabb, bucket_size: f64) -> Self {
        let size = if bucket_size > 0.0 && bucket_size.is_finite() {
            bucket_size
        } else {
            bounds.width().max(bounds.height()).max(1.0)
        };
        let nx = ((bounds.width() / size).ceil() as usize).clamp(1, 4096);
        let ny = ((bounds.height() / size).ceil() as usize).clamp(1, 4096);
        let cell = [
            (bounds.width() / nx as f64).max(f64::MIN_POSITIVE),
            (bounds.height() / ny as f64).max(f64::MIN_POSITIVE),
        ];
        BucketGrid {
            bounds,
            nx,
            ny,
            cell,
            buckets: vec![Vec::new(); nx * ny],
            boxes: Vec::new(),
        }
    }

    /// Builds a grid over a list of boxes; ids are the list positions.
    pub fn from_boxes(boxes: &[Aabb], bucket_size: f64) -> Self {
        let bounds = if boxes.is_empty() {
            Aabb::new(Default::default(), Default::default())
        } else {
            let pts: Vec<_> = boxes.iter().flat_map(|b| [b.min, b.max]).collect();
            Aabb::from_points(&pts)
        };
        let mut grid = BucketGrid::new(bounds, bucket_size);
        for b in boxes {
            grid.insert(*b);
        }
        grid
    }

    fn range(&self, b: &Aabb) -> Option<(usize, usize, usize, usize)> {
        if !self.bounds.overlaps(b) {
            return None;
        }
        let clampx = |x: f64| (((x - self.bounds.min.x) / self.cell[0]).floor().max(0.0) as usize).min(self.nx - 1);
        let clampy = |y: f64| (((y - self.bounds.min.y) / self.cell[1]).floor().max(0.0) as usize).min(self.ny - 1);
        Some((clampx(b.min.x), clampx(b.max.x), clampy(b.min.y), clampy(b.max.y)))
    }

    /// Inserts a box and returns its id.
    pub fn insert(&mut self, b: Aabb) -> usize {
        let id = self.boxes.len();
        self.boxes.push(b);
        if let Some((i0, i1, j0, j1)) = self.range(&b) {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    self.buckets[j * self.nx + i].push(id);
                }
            }
        }
        id
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Ids whose boxes overlap `b`, sorted and unique.
    pub fn query(&self, b: &Aabb) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some((i0, i1, j0, j1)) = self.range(b) {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    out.extend(
                        self.buckets[j * self.nx + i]
                            .iter()
                            .copied()
                            .filter(|&id| self.boxes[id].overlaps(b)),
                    );
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Restriction query of Algorithm 1: the entities near a cell's bounding box.
pub fn restrict(grid: &BucketGrid, cell: &Aabb) -> Vec<usize> {
    grid.query(cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn bx(x0: f64, y0: f64, x1: f64, y1: f64) -> Aabb {
        Aabb::new(Point::new(x0, y0), Point::new(x1, y1))
    }

    #[test]
    fn query_matches_brute_force() {
        let boxes: Vec<Aabb> = (0..40)
            .map(|k| {
                let x = (k as f64 * 0.37).sin() * 3.0;
                let y = (k as f64 * 0.91).cos() * 3.0;
                bx(x, y, x + 0.3 + 0.01 * k as f64, y + 0.2)
            })
            .collect();
        let grid = BucketGrid::from_boxes(&boxes, 0.5);
        for q in [bx(-1.0, -1.0, 0.0, 0.0), bx(1.0, 1.0, 1.2, 3.0), bx(-5.0, -5.0, 5.0, 5.0)] {
            let brute: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].overlaps(&q)).collect();
            assert_eq!(restrict(&grid, &q), brute);
        }
    }

    #[test]
    fn far_query_is_empty() {
        let grid = BucketGrid::from_boxes(&[bx(0.0, 0.0, 1.0, 1.0)], 0.25);
        assert!(grid.query(&bx(10.0, 10.0, 11.0, 11.0)).is_empty());
        assert_eq!(grid.query(&bx(0.5, 0.5, 0.6, 0.6)), vec![0]);
    }
}
