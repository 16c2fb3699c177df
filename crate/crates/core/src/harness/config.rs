use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::assembly::{DeformationMode, MarchSettings};
use crate::deformation::{BoundaryMotion, ElasticSettings};
use crate::geometry::{OrientedBoundary, Point, Vector};
use crate::mesh::{build_mesh, simplexify, CartesianMesh, Grading, TimePartition};

/// Complete description of one run. Unknown keys are rejected everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    pub time: TimeConfig,
    pub domain: DomainConfig,
    #[serde(default)]
    pub motion: MotionConfig,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    #[serde(default)]
    pub origin: [f64; 2],
    pub lengths: [f64; 2],
    pub counts: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<GradingConfig>,
    #[serde(default)]
    pub simplexify: bool,
}

/// Per-direction clustering point (in [0, 1] box coordinates) and exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradingConfig {
    pub x0: [f64; 2],
    pub alpha: [f64; 2],
}

/// Final time and either the slab count or the slab length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slabs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    /// Everything in the box outside an axis-aligned square.
    SquareHole { center: [f64; 2], side: f64 },
    Rectangle { min: [f64; 2], max: [f64; 2] },
    /// A simple polygon given counterclockwise; `hole` makes the domain its complement in the box.
    Polygon {
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        hole: bool,
    },
    /// Boundary file (`NV NE`, vertices, directed edges), relative to the config file.
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampConfig {
    pub gamma: f64,
    pub t_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionConfig {
    #[default]
    None,
    Translation {
        velocity: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ramp: Option<RampConfig>,
    },
    RigidRotationOscillation {
        center: [f64; 2],
        omega: f64,
        amplitude: [f64; 2],
        omega_x: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ramp: Option<RampConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub mu: f64,
    #[serde(default)]
    pub advection: [f64; 2],
    #[serde(default)]
    pub data: DataConfig,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            mu: 1.0,
            advection: [0.0, 0.0],
            data: DataConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// `u = sin(παt/T) Π sin(πx_i/L_i)`; `lengths` default to the box lengths.
    Manufactured {
        #[serde(default = "half")]
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lengths: Option<[f64; 2]>,
    },
    /// `u ≡ value` with matching data.
    Constant { value: f64 },
    /// Zero initial state, `body` on the embedded boundary and `walls` on the box sides.
    HeatedBody { body: f64, walls: f64 },
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::Manufactured {
            alpha: 0.5,
            lengths: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    #[default]
    Elastic,
    Prescribed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub p: usize,
    pub q: usize,
    /// Nitsche penalty constant of the model problem.
    pub c0: f64,
    /// Nitsche penalty constant of the elastic extension; defaults to `c0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deformation_c0: Option<f64>,
    pub c_mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reuse_threshold: Option<f64>,
    #[serde(default)]
    pub deformation: DeformationKind,
    #[serde(default)]
    pub condition_numbers: bool,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig {
            p: 1,
            q: 1,
            c0: 10.0,
            deformation_c0: None,
            c_mu: 1.0,
            reuse_threshold: None,
            deformation: DeformationKind::Elastic,
            condition_numbers: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, overridden by the environment and the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub vtk: bool,
    #[serde(default)]
    pub matrix_market: bool,
}

fn yes() -> bool {
    true
}

fn half() -> f64 {
    0.5
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            vtk: true,
            matrix_market: false,
        }
    }
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

fn finite(name: &str, v: f64) -> Result<(), HarnessError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite")))
    }
}

impl MeshConfig {
    pub fn build(&self) -> Result<CartesianMesh, HarnessError> {
        let grading = match &self.grading {
            None => [None, None],
            Some(g) => [0, 1].map(|d| {
                Some(Grading {
                    x0: g.x0[d],
                    alpha: g.alpha[d],
                })
            }),
        };
        let mesh = build_mesh(pt(self.origin), self.lengths, self.counts, grading).map_err(|e| bad(e.to_string()))?;
        Ok(if self.simplexify { simplexify(&mesh) } else { mesh })
    }
}

impl DomainConfig {
    pub fn boundary(&self) -> Result<OrientedBoundary, HarnessError> {
        let b = match self {
            DomainConfig::SquareHole { center, side } => OrientedBoundary::square_hole(pt(*center), *side)?,
            DomainConfig::Rectangle { min, max } => OrientedBoundary::rectangle(pt(*min), pt(*max)),
            DomainConfig::Polygon { vertices, hole } => {
                let mut v: Vec<Point> = vertices.iter().map(|&a| pt(a)).collect();
                if *hole {
                    v.reverse();
                }
                OrientedBoundary::from_loops(&[v])?
            }
            DomainConfig::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{path}: {e}")))?;
                OrientedBoundary::parse(&text)?
            }
        };
        Ok(b)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; relative boundary paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let mut c = Self::from_json(&text)?;
        if let DomainConfig::File { path: p } = &mut c.domain {
            let base = path.parent().unwrap_or(Path::new("."));
            *p = base.join(&*p).to_string_lossy().into_owned();
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let m = &self.mesh;
        for d in 0..2 {
            finite("mesh.origin", m.origin[d])?;
            if !(m.lengths[d] > 0.0) || !m.lengths[d].is_finite() {
                return Err(bad("mesh.lengths must be positive"));
            }
            if m.counts[d] == 0 {
                return Err(bad("mesh.counts must be at least 1"));
            }
        }
        let t = &self.time;
        if !(t.t_end > 0.0) || !t.t_end.is_finite() {
            return Err(bad("time.t_end must be positive"));
        }
        match (t.slabs, t.tau) {
            (Some(0), _) => return Err(bad("time.slabs must be at least 1")),
            (Some(_), Some(_)) => return Err(bad("give either time.slabs or time.tau, not both")),
            (None, None) => return Err(bad("time needs slabs or tau")),
            (None, Some(tau)) if !(tau > 0.0) || !tau.is_finite() => return Err(bad("time.tau must be positive")),
            _ => {}
        }
        let d = &self.discretization;
        if !(1..=6).contains(&d.p) {
            return Err(bad("discretization.p must lie in 1..=6"));
        }
        if d.q > 6 {
            return Err(bad("discretization.q must lie in 0..=6"));
        }
        if !(d.c0 > 0.0) || !(d.c_mu > 0.0) || d.deformation_c0.is_some_and(|c| !(c > 0.0)) {
            return Err(bad("discretization.c0 and c_mu must be positive"));
        }
        if !(self.problem.mu > 0.0) || !self.problem.mu.is_finite() {
            return Err(bad("problem.mu must be positive"));
        }
        if let DataConfig::Manufactured { alpha, lengths } = &self.problem.data {
            finite("problem.data.alpha", *alpha)?;
            if lengths.is_some_and(|l| !(l[0] > 0.0 && l[1] > 0.0)) {
                return Err(bad("problem.data.lengths must be positive"));
            }
        }
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<CartesianMesh, HarnessError> {
        self.mesh.build()
    }

    pub fn time_partition(&self) -> Result<TimePartition, HarnessError> {
        let t = &self.time;
        let n = match (t.slabs, t.tau) {
            (Some(n), _) => n,
            (None, Some(tau)) => ((t.t_end / tau) - 1e-9).ceil().max(1.0) as usize,
            _ => return Err(bad("time needs slabs or tau")),
        };
        TimePartition::uniform(t.t_end, n).map_err(|e| bad(e.to_string()))
    }

    pub fn boundary(&self) -> Result<OrientedBoundary, HarnessError> {
        self.domain.boundary()
    }

    pub fn motion(&self) -> BoundaryMotion {
        let v = |a: [f64; 2]| Vector::new(a[0], a[1]);
        let (m, ramp) = match &self.motion {
            MotionConfig::None => return BoundaryMotion::identity(),
            MotionConfig::Translation { velocity, ramp } => (BoundaryMotion::Translation { velocity: v(*velocity) }, ramp),
            MotionConfig::RigidRotationOscillation {
                center,
                omega,
                amplitude,
                omega_x,
                ramp,
            } => (
                BoundaryMotion::RigidRotationOscillation {
                    center: pt(*center),
                    omega: *omega,
                    amplitude: v(*amplitude),
                    omega_x: *omega_x,
                },
                ramp,
            ),
        };
        match ramp {
            None => m,
            Some(r) => BoundaryMotion::TimeRamp {
                inner: Box::new(m),
                gamma: r.gamma,
                t_a: r.t_a,
            },
        }
    }

    pub fn settings(&self) -> MarchSettings {
        let d = &self.discretization;
        MarchSettings {
            p: d.p,
            q: d.q,
            c_mu: d.c_mu,
            deformation: match d.deformation {
                DeformationKind::Elastic => DeformationMode::Elastic(ElasticSettings {
                    c0: d.deformation_c0.unwrap_or(d.c0),
                    ..ElasticSettings::default()
                }),
                DeformationKind::Prescribed => DeformationMode::Prescribed,
            },
            reuse_threshold: d.reuse_threshold,
            condition_numbers: d.condition_numbers,
            keep_first_system: self.output.matrix_market,
        }
    }

    /// The true-2D convergence setup: box `[0, 3]²`, unit square hole at the
    /// centre translated with velocity `(0.2, 0)`, `T = 1`, `n` cells and slabs.
    pub fn translating_hole(n: usize, p: usize, q: usize) -> Self {
        RunConfig {
            mesh: MeshConfig {
                origin: [0.0, 0.0],
                lengths: [3.0, 3.0],
                counts: [n, n],
                grading: None,
                simplexify: false,
            },
            time: TimeConfig {
                t_end: 1.0,
                slabs: Some(n),
                tau: None,
            },
            domain: DomainConfig::SquareHole {
                center: [1.5, 1.5],
                side: 1.0,
            },
            motion: MotionConfig::Translation {
                velocity: [0.2, 0.0],
                ramp: None,
            },
            problem: ProblemConfig::default(),
            discretization: DiscretizationConfig {
                p,
                q,
                condition_numbers: true,
                ..DiscretizationConfig::default()
            },
            output: OutputConfig::default(),
        }
    }

    /// Rotating and oscillating body with the startup ramp.
    pub fn rotating_body(n: usize) -> Self {
        let body: Vec<[f64; 2]> = (0..12)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 12.0;
                [2.0 + 0.5 * a.cos(), 2.0 + 0.2 * a.sin()]
            })
            .collect();
        RunConfig {
            mesh: MeshConfig {
                origin: [0.0, 0.0],
                lengths: [4.0, 4.0],
                counts: [n, n],
                grading: None,
                simplexify: false,
            },
            time: TimeConfig {
                t_end: 1.0,
                slabs: Some(20),
                tau: None,
            },
            domain: DomainConfig::Polygon {
                vertices: body,
                hole: true,
            },
            motion: MotionConfig::RigidRotationOscillation {
                center: [2.0, 2.0],
                omega: std::f64::consts::FRAC_PI_2,
                amplitude: [0.0, 0.2],
                omega_x: std::f64::consts::FRAC_PI_2,
                ramp: Some(RampConfig {
                    gamma: 2.0,
                    t_a: 0.125,
                }),
            },
            problem: ProblemConfig {
                mu: 0.1,
                advection: [0.0, 0.0],
                data: DataConfig::HeatedBody { body: 1.0, walls: 0.0 },
            },
            discretization: DiscretizationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = RunConfig::translating_hole(8, 1, 1);
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
        let d = RunConfig::rotating_body(16);
        assert_eq!(d, RunConfig::from_json(&d.to_json()).unwrap());
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&RunConfig::translating_hole(8, 1, 1).to_json()).unwrap();
        v["mesh"]["cells"] = 3.into();
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(HarnessError::Config(_))));
    }

    #[test]
    fn zero_slabs_rejected() {
        let mut c = RunConfig::translating_hole(8, 1, 1);
        c.time.slabs = Some(0);
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let text = r#"{
            "mesh": {"lengths": [3, 3], "counts": [8, 8]},
            "time": {"t_end": 1, "tau": 0.125},
            "domain": {"kind": "square_hole", "center": [1.5, 1.5], "side": 1}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.time_partition().unwrap().num_slabs(), 8);
        assert_eq!(c.discretization.p, 1);
        assert!(c.boundary().unwrap().is_complement());
    }
}
