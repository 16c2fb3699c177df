use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slabcut::geometry::OrientedBoundary;
use slabcut::harness::io::{csv_string, write_text};
use slabcut::harness::{
    convergence, demo, geom_classify, geom_clip, geom_intersect, run, DomainConfig, HarnessError, MeshConfig,
    RunConfig,
};

/// Space-time unfitted finite elements on moving domains.
#[derive(Parser)]
#[command(name = "slabcut", version)]
struct Cli {
    /// Output directory; overrides SLABCUT_OUT and the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March one configuration and write the norm report and field dumps.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Mesh/time refinement study with fitted slopes.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Cells per direction and slab count of each level.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        levels: Vec<usize>,
        /// Order pairs, e.g. `p=1,q=1;p=2,q=2`.
        #[arg(long, default_value = "p=1,q=1")]
        orders: String,
    },
    /// Moving-body transport demo.
    Demo {
        #[arg(long)]
        config: PathBuf,
    },
    /// Geometry debugging dumps.
    Geom {
        #[command(subcommand)]
        sub: GeomCommand,
    },
}

#[derive(clap::Args)]
struct GeomInputs {
    /// Boundary file, or an inline JSON domain description.
    #[arg(long)]
    boundary: String,
    /// Mesh block as inline JSON or a path to a JSON file.
    #[arg(long)]
    mesh: String,
}

#[derive(Subcommand)]
enum GeomCommand {
    /// Count interior, cut and exterior cells.
    Classify {
        #[command(flatten)]
        inputs: GeomInputs,
    },
    /// Convex pieces of one cell inside the domain.
    Clip {
        #[command(flatten)]
        inputs: GeomInputs,
        #[arg(long)]
        cell: usize,
    },
    /// Intersect the mesh with a translated copy of itself.
    Intersect {
        #[command(flatten)]
        inputs: GeomInputs,
        /// Translation `dx,dy`; half a cell in each direction by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        shift: Option<Vec<f64>>,
    },
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn out_dir(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os("SLABCUT_OUT").filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    cfg.and_then(|c| c.output.dir.as_ref())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn parse_orders(text: &str) -> Result<Vec<(usize, usize)>, HarnessError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (mut p, mut q) = (None, None);
            for kv in pair.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| config_err(format!("bad order `{kv}`, expected `p=..,q=..`")))?;
                let v: usize = v.trim().parse().map_err(|_| config_err(format!("bad order value `{v}`")))?;
                match k.trim() {
                    "p" => p = Some(v),
                    "q" => q = Some(v),
                    other => return Err(config_err(format!("unknown order key `{other}`"))),
                }
            }
            match (p, q) {
                (Some(p), Some(q)) => Ok((p, q)),
                _ => Err(config_err(format!("order `{pair}` needs both p and q"))),
            }
        })
        .collect()
}

fn inline_or_file(arg: &str) -> Result<String, HarnessError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| config_err(format!("{arg}: {e}")))
    }
}

fn geom_inputs(g: &GeomInputs) -> Result<(OrientedBoundary, slabcut::mesh::CartesianMesh), HarnessError> {
    let mesh_cfg: MeshConfig =
        serde_json::from_str(&inline_or_file(&g.mesh)?).map_err(|e| config_err(format!("mesh: {e}")))?;
    let mesh = mesh_cfg.build()?;
    let text = inline_or_file(&g.boundary)?;
    let boundary = if text.trim_start().starts_with('{') {
        let d: DomainConfig = serde_json::from_str(&text).map_err(|e| config_err(format!("boundary: {e}")))?;
        d.boundary()?
    } else {
        OrientedBoundary::parse(&text).map_err(|e| HarnessError::Geometry(format!("{}: {e}", g.boundary)))?
    };
    Ok((boundary, mesh))
}

fn summary(v: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(v).expect("summary serializes");
    // a closed pipe is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let flag = cli.out.as_deref();
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_dir(flag, Some(&cfg));
            let out = run(&cfg, Some(&dir))?;
            summary(&out.row);
        }
        Command::Convergence { config, levels, orders } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_dir(flag, Some(&cfg));
            let out = convergence(&cfg, &levels, &parse_orders(&orders)?, Some(&dir))?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            summary(&out.slopes);
        }
        Command::Demo { config } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_dir(flag, Some(&cfg));
            let out = demo(&cfg, Some(&dir))?;
            summary(&out.rows);
        }
        Command::Geom { sub } => {
            let dir = out_dir(flag, None);
            match sub {
                GeomCommand::Classify { inputs } => {
                    let (b, m) = geom_inputs(&inputs)?;
                    let out = geom_classify(&b, &m)?;
                    write_text(&dir.join("classify.vtk"), &out.vtk)?;
                    summary(&serde_json::json!({
                        "interior": out.interior,
                        "cut": out.cut,
                        "exterior": out.exterior,
                        "total": out.kinds.len(),
                    }));
                }
                GeomCommand::Clip { inputs, cell } => {
                    let (b, m) = geom_inputs(&inputs)?;
                    let out = geom_clip(&b, &m, cell)?;
                    write_text(&dir.join(format!("clip_{cell}.vtk")), &out.vtk)?;
                    summary(&out);
                }
                GeomCommand::Intersect { inputs, shift } => {
                    let (b, m) = geom_inputs(&inputs)?;
                    let shift = match shift {
                        Some(s) if s.len() == 2 => [s[0], s[1]],
                        Some(_) => return Err(config_err("--shift takes two values `dx,dy`")),
                        None => [0, 1].map(|d| {
                            let c = m.coords(d);
                            0.5 * (c[1] - c[0])
                        }),
                    };
                    let out = geom_intersect(&b, &m, shift)?;
                    write_text(&dir.join("intersect.vtk"), &out.vtk)?;
                    write_text(&dir.join("intersect.csv"), &csv_string(&out.rows)?)?;
                    summary(&out);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
