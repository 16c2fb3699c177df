use super::{
    boundary_facets, cell_cap_interior, classify_cells, Aabb, BoundaryFacet, CellClassification, ConvexPolygon,
    DomainTiling, GeometryError, OrientedBoundary, Partition,
};

/// Everything the integrators need about one domain on one mesh.
#[derive(Debug, Clone)]
pub struct CutGeometry {
    pub classification: CellClassification,
    pub tiling: DomainTiling,
    /// Convex pieces of `cell ∩ Ω` per cell (empty for exterior cells).
    pub caps: Vec<Vec<ConvexPolygon>>,
    pub facets: Vec<BoundaryFacet>,
}

impl CutGeometry {
    /// Classifies `mesh` against `boundary`, caps the active cells and collects
    /// boundary facets. Box sides inside the domain become facets when
    /// `box_facets` is set.
    pub fn new(
        mesh: &impl Partition,
        boundary: &OrientedBoundary,
        bx: &Aabb,
        box_facets: bool,
    ) -> Result<Self, GeometryError> {
        let classification = classify_cells(mesh, boundary)?;
        let tiling = DomainTiling::new(boundary, bx, mesh.typical_size());
        let caps = (0..mesh.num_cells())
            .map(|c| cell_cap_interior(&mesh.cell_polygon(c), classification.kind(c), &tiling))
            .collect::<Result<Vec<_>, _>>()?;
        let facets = boundary_facets(mesh, &classification, &caps, boundary, box_facets.then_some(bx));
        Ok(CutGeometry {
            classification,
            tiling,
            caps,
            facets,
        })
    }

    /// Area of `cell ∩ Ω`.
    pub fn cap_area(&self, cell: usize) -> f64 {
        self.caps[cell].iter().map(|p| p.area()).sum()
    }

    pub fn domain_area(&self) -> f64 {
        (0..self.caps.len()).map(|c| self.cap_area(c)).sum()
    }
}
