//! Legacy ASCII VTK, MatrixMarket and CSV writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::HarnessError;
use crate::geometry::Point;
use crate::space::TripletMatrix;

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io(path, e))
}

/// Polygons with optional per-vertex and per-cell scalars. Vertices are not
/// shared between cells, so discontinuous fields are represented exactly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolygonSet {
    pub polygons: Vec<Vec<Point>>,
    pub point_data: Vec<(String, Vec<Vec<f64>>)>,
    pub cell_data: Vec<(String, Vec<f64>)>,
}

impl PolygonSet {
    pub fn new(polygons: Vec<Vec<Point>>) -> Self {
        PolygonSet {
            polygons,
            ..Self::default()
        }
    }

    pub fn with_cell_data(mut self, name: &str, values: Vec<f64>) -> Self {
        self.cell_data.push((name.to_string(), values));
        self
    }

    pub fn with_point_data(mut self, name: &str, values: Vec<Vec<f64>>) -> Self {
        self.point_data.push((name.to_string(), values));
        self
    }

    fn num_points(&self) -> usize {
        self.polygons.iter().map(Vec::len).sum()
    }

    fn points_block(&self, out: &mut String) {
        let _ = writeln!(out, "POINTS {} double", self.num_points());
        for p in self.polygons.iter().flatten() {
            let _ = writeln!(out, "{:.17e} {:.17e} 0", p.x, p.y);
        }
    }

    fn data_blocks(&self, out: &mut String) {
        if !self.point_data.is_empty() {
            let _ = writeln!(out, "POINT_DATA {}", self.num_points());
            for (name, v) in &self.point_data {
                let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for x in v.iter().flatten() {
                    let _ = writeln!(out, "{x:.17e}");
                }
            }
        }
        if !self.cell_data.is_empty() {
            let _ = writeln!(out, "CELL_DATA {}", self.polygons.len());
            for (name, v) in &self.cell_data {
                let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                for x in v {
                    let _ = writeln!(out, "{x:.17e}");
                }
            }
        }
    }

    /// Unstructured grid of `VTK_POLYGON` cells.
    pub fn to_unstructured_grid(&self, title: &str) -> String {
        let mut out = format!("# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n");
        self.points_block(&mut out);
        let size: usize = self.polygons.iter().map(|p| p.len() + 1).sum();
        let _ = writeln!(out, "CELLS {} {size}", self.polygons.len());
        let mut k = 0;
        for p in &self.polygons {
            let ids: Vec<String> = (k..k + p.len()).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{} {}", p.len(), ids.join(" "));
            k += p.len();
        }
        let _ = writeln!(out, "CELL_TYPES {}", self.polygons.len());
        for _ in &self.polygons {
            out.push_str("7\n");
        }
        self.data_blocks(&mut out);
        out
    }

    /// Polydata with one polygon per entry.
    pub fn to_polydata(&self, title: &str) -> String {
        let mut out = format!("# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET POLYDATA\n");
        self.points_block(&mut out);
        let size: usize = self.polygons.iter().map(|p| p.len() + 1).sum();
        let _ = writeln!(out, "POLYGONS {} {size}", self.polygons.len());
        let mut k = 0;
        for p in &self.polygons {
            let ids: Vec<String> = (k..k + p.len()).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{} {}", p.len(), ids.join(" "));
            k += p.len();
        }
        self.data_blocks(&mut out);
        out
    }
}

/// Coordinate format, 1-based, duplicates summed.
pub fn matrix_market(a: &TripletMatrix) -> String {
    let e = a.compressed();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.n, a.n, e.len());
    for (i, j, v) in e {
        let _ = writeln!(out, "{} {} {v:.17e}", i + 1, j + 1);
    }
    out
}

/// Dense column vector in array format.
pub fn vector_market(v: &[f64]) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", v.len());
    for x in v {
        let _ = writeln!(out, "{x:.17e}");
    }
    out
}

/// CSV with a header taken from the field names of `R`.
pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Io(e.to_string()))
}
