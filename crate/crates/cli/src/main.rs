//! Batch front end for the mean-Ricci curvature engine.
//!
//! Every task reads a manifold (by shorthand name or inline JSON spec, or
//! from a JSON run manifest), executes, and writes a deterministic JSON or
//! CSV report. Exit status: 0 when every check passes, 1 when a verification
//! fails, 2 on manifest errors, 3 on task errors.

mod manifest;
mod tasks;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::{ManifestError, OutputSpec, RunManifest, TaskParams, TaskSpec};

#[derive(Parser)]
#[command(name = "ricci-means", version, about = "Subspace mean-Ricci curvature engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    /// Manifold: shorthand name (e.g. `heisenberg`, `s4`, `h3`, `cp2`,
    /// `catenoid`, `s2xs3`) or inline JSON model spec.
    #[arg(long)]
    manifold: Option<String>,
    /// Base point as comma-separated coordinates (defaults to chart center).
    #[arg(long)]
    point: Option<String>,
    /// Plane dimension d.
    #[arg(long)]
    d: Option<usize>,
    /// Plane as frame-axis indices, e.g. `0,1`.
    #[arg(long)]
    plane_axes: Option<String>,
    /// Report path (`-` for stdout).
    #[arg(long, default_value = "-")]
    out: String,
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
    /// RNG seed for sampling tasks.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies every tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON run manifest.
    Run {
        /// Path of the manifest file.
        #[arg(long)]
        manifest: String,
        /// Override the manifest's output path.
        #[arg(long)]
        out: Option<String>,
    },
    /// Metric, Christoffel, and curvature summary at a point.
    Curvature(CommonArgs),
    /// Intrinsic and normal mean Ricci curvatures of a plane.
    Means(CommonArgs),
    /// Weitzenböck pairing of a simple d-vector, three routes.
    Weitz {
        #[command(flatten)]
        common: CommonArgs,
        /// Also emit the dense endomorphism matrix.
        #[arg(long)]
        emit_matrix: bool,
    },
    /// κ_d search over points and planes.
    Kappa {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of random restarts per point.
        #[arg(long)]
        restarts: Option<usize>,
        /// Eigenvalue candidates to compare against κ_d.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Volume-expansion coefficient fits.
    Expand {
        #[command(flatten)]
        common: CommonArgs,
        /// Radius ladder, e.g. `0.2,0.15,0.1,0.075,0.05`.
        #[arg(long)]
        ladder: Option<String>,
    },
    /// Verification suite: the whole catalogue, or one manifold's checks.
    Verify {
        /// Restrict the per-entry checks to this manifold.
        #[arg(long)]
        manifold: Option<String>,
        #[arg(long, default_value = "-")]
        out: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol_scale: Option<f64>,
    },
    /// List the catalogue models with example parameter shapes.
    List,
}

fn init_threads() {
    if let Ok(v) = std::env::var("RICCI_MEANS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn parse_csv_f64(s: &str) -> Result<Vec<f64>, ManifestError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| ManifestError::BadField {
                    field: "number list".into(),
                    detail: format!("cannot parse `{t}`"),
                })
        })
        .collect()
}

fn parse_csv_usize(s: &str) -> Result<Vec<usize>, ManifestError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| ManifestError::BadField {
                    field: "index list".into(),
                    detail: format!("cannot parse `{t}`"),
                })
        })
        .collect()
}

fn manifest_from_args(
    task: TaskSpec,
    common: &CommonArgs,
    extra: impl FnOnce(&mut TaskParams) -> Result<(), ManifestError>,
) -> Result<RunManifest, ManifestError> {
    let manifold = match &common.manifold {
        Some(m) => manifest::parse_manifold(m)?,
        None => {
            return Err(ManifestError::BadField {
                field: "manifold".into(),
                detail: "required for this task".into(),
            })
        }
    };
    let mut task_params = TaskParams {
        d: common.d,
        point: match &common.point {
            Some(p) => Some(parse_csv_f64(p)?),
            None => None,
        },
        plane_axes: match &common.plane_axes {
            Some(p) => Some(parse_csv_usize(p)?),
            None => None,
        },
        plane: None,
        seed: common.seed,
        tol_scale: common.tol_scale,
        ladder: None,
        restarts: None,
        emit_matrix: None,
        lambda_candidates: None,
        quadrature: None,
        verify_single_manifold: None,
    };
    extra(&mut task_params)?;
    Ok(RunManifest {
        schema: 1,
        manifold,
        task,
        task_params,
        output: OutputSpec {
            path: common.out.clone(),
            format: common.format.clone(),
        },
    })
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();

    let manifest = match &cli.command {
        Command::List => {
            for spec in ricci_means::catalogue::catalogue_listing() {
                println!("{}", ricci_means::report::to_json_fixed(&spec));
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { manifest, out } => match manifest::load_manifest(manifest) {
            Ok(mut m) => {
                if let Some(o) = out {
                    m.output.path = o.clone();
                }
                Ok(m)
            }
            Err(e) => Err(e),
        },
        Command::Curvature(c) => manifest_from_args(TaskSpec::Curvature, c, |_| Ok(())),
        Command::Means(c) => manifest_from_args(TaskSpec::Means, c, |_| Ok(())),
        Command::Weitz {
            common,
            emit_matrix,
        } => {
            let em = *emit_matrix;
            manifest_from_args(TaskSpec::Weitz, common, move |p| {
                p.emit_matrix = Some(em);
                Ok(())
            })
        }
        Command::Kappa {
            common,
            restarts,
            lambda,
        } => {
            let r = *restarts;
            let l = lambda.clone();
            manifest_from_args(TaskSpec::Kappa, common, move |p| {
                p.restarts = r;
                if let Some(s) = l {
                    p.lambda_candidates = Some(parse_csv_f64(&s)?);
                }
                Ok(())
            })
        }
        Command::Expand { common, ladder } => {
            let l = ladder.clone();
            manifest_from_args(TaskSpec::Expand, common, move |p| {
                if let Some(s) = l {
                    p.ladder = Some(parse_csv_f64(&s)?);
                }
                Ok(())
            })
        }
        Command::Verify {
            manifold,
            out,
            seed,
            tol_scale,
        } => match manifold
            .as_ref()
            .map(|m| manifest::parse_manifold(m))
            .transpose()
        {
            Ok(target) => Ok(RunManifest {
                schema: 1,
                manifold: target
                    .clone()
                    .unwrap_or(ricci_means::catalogue::ModelSpec::Heisenberg),
                task: TaskSpec::Verify,
                task_params: TaskParams {
                    seed: *seed,
                    tol_scale: *tol_scale,
                    verify_single_manifold: Some(target.is_some()),
                    ..TaskParams::default()
                },
                output: OutputSpec {
                    path: out.clone(),
                    format: "json".into(),
                },
            }),
            Err(e) => Err(e),
        },
    };

    let manifest = match manifest {
        Ok(m) => m,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}})
            );
            return ExitCode::from(2);
        }
    };

    match tasks::run(&manifest) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}})
            );
            ExitCode::from(e.exit_code())
        }
    }
}
