use std::path::{Path, PathBuf};

use serde::Serialize;

use super::io::{csv_string, matrix_market, vector_market, write_text, PolygonSet};
use super::{build_problem, HarnessError, RunConfig};
use crate::assembly::{eval_solution, march_with, MarchResult, MovingDomain, SlabReport, SlabState};
use crate::geometry::Point;
use crate::mesh::CartesianMesh;
use crate::space::{ScalarBasis1D, SpatialSpace};

/// One line of the norm report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n_cells: usize,
    pub h: f64,
    pub tau: f64,
    pub p: usize,
    pub q: usize,
    pub dg_err: f64,
    pub l2_err: f64,
    pub h1_err: f64,
    #[serde(rename = "cond_M")]
    pub cond_m: f64,
    #[serde(rename = "cond_A")]
    pub cond_a: f64,
}

/// Per-slab bookkeeping written next to the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabRow {
    pub slab: usize,
    pub t0: f64,
    pub t1: f64,
    pub active_cells: usize,
    pub cut_cells: usize,
    pub extended_cells: usize,
    pub free_dofs: usize,
    pub reused: bool,
    pub intersection_cells: usize,
    pub max_strain: f64,
    pub dg_err: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub row: ReportRow,
    pub slabs: Vec<SlabRow>,
    pub result: MarchResult,
    pub files: Vec<PathBuf>,
}

/// Deformed split triangles of the active cells at the slab end with the
/// solution at their vertices.
pub(crate) fn slab_fields(mesh: &CartesianMesh, st: &SlabState, space: &SpatialSpace, time: &ScalarBasis1D) -> PolygonSet {
    let mut polys = Vec::new();
    let mut vals = Vec::new();
    let mut ids = Vec::new();
    for c in st.active.active_cells() {
        for s in mesh.simplex_ids(c) {
            let tri = st.field.mesh().cell_vertices(s);
            let pts: Vec<Point> = tri.iter().map(|&v| st.field.deformed_vertex(v, 1.0)).collect();
            let v: Vec<f64> = tri
                .iter()
                .map(|&v| eval_solution(space, time, &st.coefficients, c, &mesh.vertex_point(v), 1.0))
                .collect();
            polys.push(pts);
            vals.push(v);
            ids.push(c as f64);
        }
    }
    PolygonSet::new(polys)
        .with_point_data("u", vals)
        .with_cell_data("cell", ids)
}

fn slab_row(r: &SlabReport, dg: f64) -> SlabRow {
    SlabRow {
        slab: r.index,
        t0: r.slab.0,
        t1: r.slab.1,
        active_cells: r.active_cells,
        cut_cells: r.cut_cells,
        extended_cells: r.extended_cells,
        free_dofs: r.free_dofs,
        reused: r.reused,
        intersection_cells: r.intersection_cells,
        max_strain: r.max_strain,
        dg_err: dg,
    }
}

/// Marches `cfg` and writes the report, per-slab table, resolved config and,
/// when enabled, field and matrix dumps into `out`.
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let time = cfg.time_partition()?;
    let domain = MovingDomain {
        initial: cfg.boundary()?,
        motion: cfg.motion(),
    };
    let (problem, exact) = build_problem(cfg, &mesh);
    let settings = cfg.settings();
    let mut files = Vec::new();
    let mut vtk_err = None;
    let vtk_dir = out.filter(|_| cfg.output.vtk);
    let result = march_with(&mesh, &time, &domain, &problem, &settings, exact.as_ref(), |r, st, sp, tb| {
        if let Some(dir) = vtk_dir {
            let path = dir.join(format!("slab_{:04}.vtk", r.index));
            let text = slab_fields(&mesh, st, sp, tb).to_unstructured_grid(&format!("slab {} t = {}", r.index, r.slab.1));
            match write_text(&path, &text) {
                Ok(()) => files.push(path),
                Err(e) => vtk_err = Some(e),
            }
        }
    })?;
    if let Some(e) = vtk_err {
        return Err(e);
    }

    let nan = f64::NAN;
    let (cond_m, cond_a) = result.condition.unwrap_or((nan, nan));
    let norms = result.norms.as_ref();
    let history = norms.map(|n| n.dg_history()).unwrap_or_default();
    let row = ReportRow {
        n_cells: mesh.num_cells(),
        h: mesh.max_size(),
        tau: time.tau_max(),
        p: settings.p,
        q: settings.q,
        dg_err: norms.map_or(nan, |n| n.dg()),
        l2_err: norms.map_or(nan, |n| n.l2()),
        h1_err: norms.map_or(nan, |n| n.h1()),
        cond_m,
        cond_a,
    };
    let slabs: Vec<SlabRow> = result
        .slabs
        .iter()
        .enumerate()
        .map(|(i, r)| slab_row(r, history.get(i).copied().unwrap_or(nan)))
        .collect();

    if let Some(dir) = out {
        let mut put = |name: &str, text: String| -> Result<(), HarnessError> {
            let path = dir.join(name);
            write_text(&path, &text)?;
            files.push(path);
            Ok(())
        };
        put("report.csv", csv_string(std::slice::from_ref(&row))?)?;
        put("slabs.csv", csv_string(&slabs)?)?;
        put("config.resolved.json", cfg.to_json())?;
        if let Some((sys, red)) = &result.first_system {
            put("slab0_matrix.mtx", matrix_market(&sys.matrix))?;
            put("slab0_rhs.mtx", vector_market(&sys.rhs))?;
            put("slab0_reduced_matrix.mtx", matrix_market(&red.matrix))?;
            put("slab0_reduced_rhs.mtx", vector_market(&red.rhs))?;
        }
    }
    Ok(RunOutput {
        row,
        slabs,
        result,
        files,
    })
}

/// Least-squares slope of `log y` against `log x`; `NaN` with fewer than two
/// usable points.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRow {
    pub p: usize,
    pub q: usize,
    pub levels: String,
    pub dg_slope: f64,
    pub l2_slope: f64,
    pub h1_slope: f64,
    #[serde(rename = "cond_M_slope")]
    pub cond_m_slope: f64,
    #[serde(rename = "cond_A_slope")]
    pub cond_a_slope: f64,
    /// All three errors decrease from level to level.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOutput {
    pub rows: Vec<ReportRow>,
    pub slopes: Vec<SlopeRow>,
    pub warnings: Vec<String>,
}

/// Runs `cfg` with `n × n` cells and `n` slabs for every level and order pair
/// and fits error and condition-number slopes against `h`.
pub fn convergence(
    cfg: &RunConfig,
    levels: &[usize],
    orders: &[(usize, usize)],
    out: Option<&Path>,
) -> Result<ConvergenceOutput, HarnessError> {
    if levels.len() < 3 {
        return Err(HarnessError::Config("a convergence study needs at least three levels".into()));
    }
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    let mut warnings = Vec::new();
    for &(p, q) in orders {
        let mut block = Vec::new();
        for &n in levels {
            let mut c = cfg.clone();
            c.mesh.counts = [n, n];
            c.time.slabs = Some(n);
            c.time.tau = None;
            c.discretization.p = p;
            c.discretization.q = q;
            c.discretization.condition_numbers = true;
            c.output.matrix_market = false;
            let sub = out.map(|d| d.join(format!("p{p}_q{q}_n{n}")));
            block.push(run(&c, sub.as_deref())?.row);
        }
        let h: Vec<f64> = block.iter().map(|r| r.h).collect();
        let col = |f: fn(&ReportRow) -> f64| block.iter().map(f).collect::<Vec<f64>>();
        let monotone = block
            .windows(2)
            .all(|w| w[1].dg_err < w[0].dg_err && w[1].l2_err < w[0].l2_err && w[1].h1_err < w[0].h1_err);
        if !monotone {
            warnings.push(format!("p = {p}, q = {q}: errors do not decrease monotonically"));
        }
        slopes.push(SlopeRow {
            p,
            q,
            levels: levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"),
            dg_slope: fit_slope(&h, &col(|r| r.dg_err)),
            l2_slope: fit_slope(&h, &col(|r| r.l2_err)),
            h1_slope: fit_slope(&h, &col(|r| r.h1_err)),
            cond_m_slope: fit_slope(&h, &col(|r| r.cond_m)),
            cond_a_slope: fit_slope(&h, &col(|r| r.cond_a)),
            monotone,
        });
        rows.extend(block);
    }
    if let Some(dir) = out {
        write_text(&dir.join("convergence.csv"), &csv_string(&rows)?)?;
        write_text(&dir.join("slopes.csv"), &csv_string(&slopes)?)?;
        write_text(&dir.join("config.resolved.json"), &cfg.to_json())?;
    }
    Ok(ConvergenceOutput { rows, slopes, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let h = [0.4, 0.2, 0.1];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((fit_slope(&h, &e) - 2.0).abs() < 1e-12);
        assert!(fit_slope(&[1.0], &[1.0]).is_nan());
    }

    #[test]
    fn translating_hole_run_writes_outputs() {
        let dir = std::env::temp_dir().join(format!("slabcut-run-{}", std::process::id()));
        let mut cfg = RunConfig::translating_hole(8, 1, 1);
        cfg.output.matrix_market = true;
        let out = run(&cfg, Some(&dir)).unwrap();
        let r = &out.row;
        assert_eq!((r.n_cells, r.p, r.q), (64, 1, 1));
        assert!(r.dg_err.is_finite() && r.l2_err.is_finite() && r.h1_err.is_finite());
        assert!(r.cond_m > 1.0 && r.cond_a > 1.0);
        assert_eq!(out.slabs.len(), 8);
        for f in ["report.csv", "slabs.csv", "config.resolved.json", "slab_0007.vtk", "slab0_matrix.mtx"] {
            assert!(dir.join(f).exists(), "{f}");
        }
        let resolved = std::fs::read_to_string(dir.join("config.resolved.json")).unwrap();
        assert_eq!(RunConfig::from_json(&resolved).unwrap(), cfg);
        let again = run(&cfg, None).unwrap();
        assert_eq!(
            csv_string(&[again.row]).unwrap(),
            std::fs::read_to_string(dir.join("report.csv")).unwrap()
        );
        std::fs::remove_dir_all(&dir).ok();
    }
}
