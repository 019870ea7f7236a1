//! Run manifests: the JSON wire format driving every task.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ricci_means::catalogue::ModelSpec;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest `{path}`: {detail}")]
    Io { path: String, detail: String },
    #[error("manifest parse error: {0}")]
    Parse(String),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("invalid field `{field}`: {detail}")]
    BadField { field: String, detail: String },
}

impl ManifestError {
    pub fn code(&self) -> &'static str {
        "manifest_error"
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TaskSpec {
    Curvature,
    Means,
    Weitz,
    Kappa,
    Expand,
    Verify,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// Plane as indices into the entry's distinguished frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_axes: Option<Vec<usize>>,
    /// Plane as explicit coordinate vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_scale: Option<f64>,
    /// Radius ladder for expansion fits (strictly decreasing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_matrix: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_candidates: Option<Vec<f64>>,
    /// Direction-sample count for sphere averages.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<usize>,
    /// Verify only the manifest's manifold instead of the whole catalogue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_single_manifold: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Report path, `-` for stdout.
    #[serde(default = "default_path")]
    pub path: String,
    /// `json` or `csv` (csv only for tabular tasks).
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_path() -> String {
    "-".into()
}

fn default_format() -> String {
    "json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            path: default_path(),
            format: default_format(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub manifold: ModelSpec,
    pub task: TaskSpec,
    #[serde(default)]
    pub task_params: TaskParams,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_schema() -> u32 {
    1
}

pub fn load_manifest(path: &str) -> Result<RunManifest, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Io {
        path: path.to_string(),
        detail: e.to_string(),
    })?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| ManifestError::Parse(e.to_string()))?;
    if m.schema != 1 {
        return Err(ManifestError::Schema(m.schema));
    }
    Ok(m)
}

/// Shorthand names, or an inline JSON model spec.
pub fn parse_manifold(arg: &str) -> Result<ModelSpec, ManifestError> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed).map_err(|e| ManifestError::Parse(e.to_string()));
    }
    let lower = trimmed.to_ascii_lowercase();
    let dim_suffix = |prefix: &str| -> Option<usize> {
        lower
            .strip_prefix(prefix)
            .and_then(|rest| rest.parse().ok())
    };
    if lower == "heisenberg" {
        return Ok(ModelSpec::Heisenberg);
    }
    if lower == "catenoid" {
        return Ok(ModelSpec::SurfaceOfRevolution {
            kind: ricci_means::catalogue::RevolutionKind::Catenoid,
        });
    }
    if lower == "cylinder" {
        return Ok(ModelSpec::SurfaceOfRevolution {
            kind: ricci_means::catalogue::RevolutionKind::Cylinder { radius: 1.0 },
        });
    }
    if lower == "sphere_rev" {
        return Ok(ModelSpec::SurfaceOfRevolution {
            kind: ricci_means::catalogue::RevolutionKind::Sphere { radius: 1.0 },
        });
    }
    if lower == "s2xs3" {
        return Ok(ModelSpec::ProductSpheres {
            a: 2,
            rho_a: 1.0,
            b: 3,
            rho_b: 1.0,
        });
    }
    if let Some(n) = dim_suffix("cp") {
        return Ok(ModelSpec::Cpn { n });
    }
    if let Some(n) = dim_suffix("s") {
        return Ok(ModelSpec::SpaceForm { n, kappa: 1.0 });
    }
    if let Some(n) = dim_suffix("h") {
        return Ok(ModelSpec::SpaceForm { n, kappa: -1.0 });
    }
    if let Some(n) = dim_suffix("e") {
        return Ok(ModelSpec::SpaceForm { n, kappa: 0.0 });
    }
    Err(ManifestError::BadField {
        field: "manifold".into(),
        detail: format!("unknown shorthand `{trimmed}`"),
    })
}
