use super::norms::slab_errors;
use super::slab::PreviousSlab;
use super::{
    assemble_slab, build_quadrature, condition_numbers, jump_coupling, AssemblyError, ExactSolution, InitialCondition,
    ModelProblem, NormReport, SlabContext, SlabSystem,
};
use crate::deformation::{prescribed_field, solve_extension, BoundaryMotion, DeformationField, ElasticExtensionProblem, ElasticSettings};
use crate::geometry::{intersect_triple, CutGeometry, DomainTiling, OrientedBoundary};
use crate::mesh::{active_mesh, ActiveMesh, CartesianMesh, TimePartition};
use crate::space::{build_aggregates, constrain_system, AffineMap, ReducedSystem, ScalarBasis1D, SpatialSpace};

/// How the boundary motion is extended into the background mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeformationMode {
    /// Elastic extension with weakly imposed boundary displacement.
    Elastic(ElasticSettings),
    /// The motion itself interpolated at every vertex.
    Prescribed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchSettings {
    pub p: usize,
    pub q: usize,
    pub c_mu: f64,
    pub deformation: DeformationMode,
    /// Keep the previous reference domain while the end-of-slab strain stays below this value.
    pub reuse_threshold: Option<f64>,
    /// Compute 1-norm condition numbers on the first slab.
    pub condition_numbers: bool,
    /// Return the full and reduced systems of the first slab.
    pub keep_first_system: bool,
}

impl Default for MarchSettings {
    fn default() -> Self {
        MarchSettings {
            p: 1,
            q: 1,
            c_mu: 1.0,
            deformation: DeformationMode::Elastic(ElasticSettings::default()),
            reuse_threshold: None,
            condition_numbers: false,
            keep_first_system: false,
        }
    }
}

/// Domain bounded by `initial` at `t = 0` and carried by `motion`.
#[derive(Debug, Clone)]
pub struct MovingDomain {
    pub initial: OrientedBoundary,
    pub motion: BoundaryMotion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabReport {
    pub index: usize,
    pub slab: (f64, f64),
    pub active_cells: usize,
    pub cut_cells: usize,
    pub extended_cells: usize,
    pub free_dofs: usize,
    pub reused: bool,
    pub intersection_cells: usize,
    pub max_strain: f64,
    pub dropped_pieces: usize,
}

/// End state of a slab, enough to continue marching or to export.
#[derive(Debug, Clone)]
pub struct SlabState {
    pub slab: (f64, f64),
    pub t_ref: f64,
    pub boundary_ref: OrientedBoundary,
    pub geometry: CutGeometry,
    /// Active mesh of the reference domain before extension.
    pub base_active: ActiveMesh,
    pub active: ActiveMesh,
    pub field: DeformationField,
    pub coefficients: Vec<f64>,
    pub strain: f64,
}

#[derive(Debug, Clone)]
pub struct MarchResult {
    pub space: SpatialSpace,
    pub time: ScalarBasis1D,
    pub slabs: Vec<SlabReport>,
    pub norms: Option<NormReport>,
    /// `(κ₁(M), κ₁(A))` of the first slab.
    pub condition: Option<(f64, f64)>,
    pub first_system: Option<(SlabSystem, ReducedSystem)>,
    pub last: SlabState,
}

fn stage<T, E: Into<AssemblyError>>(slab: usize, name: &'static str, r: Result<T, E>) -> Result<T, AssemblyError> {
    r.map_err(|e| AssemblyError::Stage {
        slab,
        stage: name,
        source: Box::new(e.into()),
    })
}

/// Solves the model problem slab by slab.
pub fn march(
    mesh: &CartesianMesh,
    time: &TimePartition,
    domain: &MovingDomain,
    problem: &ModelProblem,
    settings: &MarchSettings,
    exact: Option<&ExactSolution>,
) -> Result<MarchResult, AssemblyError> {
    march_with(mesh, time, domain, problem, settings, exact, |_, _, _, _| {})
}

/// [`march`] calling `observer` after every slab solve.
pub fn march_with(
    mesh: &CartesianMesh,
    time: &TimePartition,
    domain: &MovingDomain,
    problem: &ModelProblem,
    settings: &MarchSettings,
    exact: Option<&ExactSolution>,
    mut observer: impl FnMut(&SlabReport, &SlabState, &SpatialSpace, &ScalarBasis1D),
) -> Result<MarchResult, AssemblyError> {
    let space = stage(0, "space", SpatialSpace::new(mesh, settings.p, 1))?;
    let tb = ScalarBasis1D::lobatto(settings.q);
    let nq = tb.len();
    let bx = mesh.bounds();
    let box_facets = domain.initial.is_complement();
    let torder = settings.q.max(1);
    let mut norms = exact.map(|_| NormReport::new(settings.c_mu));
    let mut reports = Vec::new();
    let mut condition = None;
    let mut first_system = None;
    let mut prev: Option<SlabState> = None;

    for n in 0..time.num_slabs() {
        let slab = time.slab(n);
        let reuse = match (&prev, settings.reuse_threshold) {
            (Some(p), Some(th)) => p.strain < th,
            _ => false,
        };
        let (boundary_ref, t_ref, geometry, base_active) = match (&prev, reuse) {
            (Some(p), true) => (p.boundary_ref.clone(), p.t_ref, p.geometry.clone(), p.base_active.clone()),
            _ => {
                let b = stage(n, "geometry", domain.motion.boundary_at(&domain.initial, slab.0))?;
                let g = stage(n, "geometry", CutGeometry::new(mesh, &b, &bx, box_facets))?;
                let a = stage(n, "active mesh", active_mesh(mesh, g.classification.clone()))?;
                (b, slab.0, g, a)
            }
        };

        let initial_disp: Option<Vec<f64>> = match (&prev, reuse) {
            (Some(p), true) => Some(
                (0..mesh.num_vertices())
                    .flat_map(|v| {
                        let d = p.field.vertex_displacement(v, 1.0);
                        [d.x, d.y]
                    })
                    .collect(),
            ),
            _ => None,
        };
        let field = match settings.deformation {
            DeformationMode::Elastic(s) => stage(
                n,
                "deformation",
                solve_extension(&ElasticExtensionProblem {
                    mesh,
                    boundary: &boundary_ref,
                    motion: &domain.motion,
                    t_ref,
                    slab,
                    time_order: torder,
                    initial: initial_disp.as_deref(),
                    settings: s,
                }),
            )?,
            DeformationMode::Prescribed => prescribed_field(mesh, &domain.motion, t_ref, slab, torder),
        };

        let next_boundary = stage(n, "extension", domain.motion.boundary_at(&domain.initial, slab.1))?;
        let next_tiling = DomainTiling::new(&next_boundary, &bx, mesh.mean_size());
        let active = stage(
            n,
            "extension",
            base_active.extend_active(mesh, |v| field.deformed_vertex(v, 1.0), &next_boundary, &next_tiling),
        )?;
        let ext_simplices: Vec<usize> = active.extended_cells().flat_map(|c| mesh.simplex_ids(c)).collect();
        stage(n, "deformation", field.check_bijective(ext_simplices.iter().copied()))?;

        let agg = stage(n, "aggregation", build_aggregates(&space, &active))?;
        let quad = build_quadrature(mesh, &active, &geometry, settings.p, settings.q);

        let ctx = SlabContext {
            mesh,
            space: &space,
            time: &tb,
            slab,
            quadrature: &quad,
            field: &field,
            problem,
        };
        let samples;
        let mut intersection_cells = 0;
        let init = match &prev {
            None => InitialCondition::Function,
            Some(p) if reuse => InitialCondition::SameSpace(&p.coefficients),
            Some(p) => {
                let previous: Vec<_> = p
                    .active
                    .extended_cells()
                    .flat_map(|c| mesh.simplex_ids(c))
                    .map(|s| (s, p.field.deformed_polygon(s, 1.0)))
                    .collect();
                let im = stage(
                    n,
                    "intersection",
                    intersect_triple(mesh, &geometry.classification, &geometry.tiling, &previous),
                )?;
                intersection_cells = im.cells.len();
                let prev_slab = PreviousSlab {
                    space: &space,
                    time: &tb,
                    coefficients: &p.coefficients,
                    field: &p.field,
                };
                samples = stage(n, "transfer", jump_coupling(&ctx, &prev_slab, &im))?;
                InitialCondition::Samples(&samples)
            }
        };

        let want_cond = settings.condition_numbers && n == 0;
        let sys = stage(n, "assembly", assemble_slab(&ctx, &init, want_cond))?;
        let map = AffineMap::new(&agg, nq, |_| None);
        let red = constrain_system(&sys.matrix, &sys.rhs, &map);
        let y = stage(n, "solve", red.solve())?;
        let coefficients = map.expand(&y);
        if want_cond {
            if let (Some(m), Some(a)) = (&sys.mass, &sys.stiffness) {
                condition = Some(condition_numbers(m, a, &map));
            }
        }
        if let (Some(report), Some(ex)) = (norms.as_mut(), exact) {
            report.push(stage(n, "norms", slab_errors(&ctx, &coefficients, ex, &init))?);
        }
        let strain = field.max_strain(ext_simplices.iter().copied(), 1.0);
        let (_, cut, _) = geometry.classification.counts();
        reports.push(SlabReport {
            index: n,
            slab,
            active_cells: active.num_active(),
            cut_cells: cut,
            extended_cells: active.num_extended(),
            free_dofs: map.num_reduced(),
            reused: reuse,
            intersection_cells,
            max_strain: strain,
            dropped_pieces: quad.dropped,
        });
        if settings.keep_first_system && n == 0 {
            first_system = Some((sys, red));
        }
        prev = Some(SlabState {
            slab,
            t_ref,
            boundary_ref,
            geometry,
            base_active,
            active,
            field,
            coefficients,
            strain,
        });
        if let (Some(r), Some(st)) = (reports.last(), prev.as_ref()) {
            observer(r, st, &space, &tb);
        }
    }

    let last = prev.ok_or_else(|| AssemblyError::Config("time partition has no slabs".into()))?;
    Ok(MarchResult {
        space,
        time: tb,
        slabs: reports,
        norms,
        condition,
        first_system,
        last,
    })
}
