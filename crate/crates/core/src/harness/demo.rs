use std::path::Path;

use serde::Serialize;

use super::io::{csv_string, write_text};
use super::study::slab_fields;
use super::{build_problem, HarnessError, RunConfig};
use crate::assembly::{march_with, MarchResult, MovingDomain};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoRow {
    pub slab: usize,
    pub t1: f64,
    pub reused: bool,
    pub intersection_cells: usize,
    pub max_strain: f64,
    /// Extremes of the solution over the active vertices at the slab end.
    pub u_min: f64,
    pub u_max: f64,
}

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub rows: Vec<DemoRow>,
    pub result: MarchResult,
}

/// Marches a moving-body configuration without an exact solution, recording
/// per-slab extremes and writing `demo.csv` plus one field file per slab.
pub fn demo(cfg: &RunConfig, out: Option<&Path>) -> Result<DemoOutput, HarnessError> {
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let time = cfg.time_partition()?;
    let domain = MovingDomain {
        initial: cfg.boundary()?,
        motion: cfg.motion(),
    };
    let (problem, _) = build_problem(cfg, &mesh);
    let settings = cfg.settings();
    let vtk_dir = out.filter(|_| cfg.output.vtk);
    let mut rows = Vec::new();
    let mut err = None;
    let result = march_with(&mesh, &time, &domain, &problem, &settings, None, |r, st, sp, tb| {
        let set = slab_fields(&mesh, st, sp, tb);
        let vals = set.point_data[0].1.iter().flatten();
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        rows.push(DemoRow {
            slab: r.index,
            t1: r.slab.1,
            reused: r.reused,
            intersection_cells: r.intersection_cells,
            max_strain: r.max_strain,
            u_min: lo,
            u_max: hi,
        });
        if let Some(dir) = vtk_dir {
            let text = set.to_unstructured_grid(&format!("demo slab {} t = {}", r.index, r.slab.1));
            if let Err(e) = write_text(&dir.join(format!("demo_{:04}.vtk", r.index)), &text) {
                err = Some(e);
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(dir) = out {
        write_text(&dir.join("demo.csv"), &csv_string(&rows)?)?;
        write_text(&dir.join("config.resolved.json"), &cfg.to_json())?;
    }
    Ok(DemoOutput { rows, result })
}
