//! Task execution: each task builds its report and writes it out.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use ricci_means::catalogue::{CatalogueEntry, ModelSpec};
use ricci_means::curvature::AlgebraicCurvature;
use ricci_means::expansion::{self, VolumeQuadrature};
use ricci_means::frame::SubspaceFrame;
use ricci_means::kappa::{self, KappaConfig};
use ricci_means::report::to_json_fixed;
use ricci_means::verify::{run_verify, VerifyConfig};
use ricci_means::{means, weitzenboeck, DEFAULT_SEED};

use crate::manifest::{ManifestError, RunManifest, TaskParams, TaskSpec};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Core(#[from] ricci_means::Error),
    #[error("cannot write report to `{path}`: {detail}")]
    Io { path: String, detail: String },
}

impl TaskError {
    pub fn code(&self) -> String {
        match self {
            TaskError::Manifest(e) => e.code().to_string(),
            TaskError::Core(e) => format!("task_error:{}", e.code()),
            TaskError::Io { .. } => "task_error:io".to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            TaskError::Manifest(_) => 2,
            _ => 3,
        }
    }
}

fn write_output(path: &str, content: &str) -> Result<(), TaskError> {
    if path == "-" {
        if content.ends_with('\n') {
            print!("{content}");
        } else {
            println!("{content}");
        }
        Ok(())
    } else {
        std::fs::write(path, content).map_err(|e| TaskError::Io {
            path: path.to_string(),
            detail: e.to_string(),
        })
    }
}

struct Resolved {
    entry: CatalogueEntry,
    point: Vec<f64>,
    /// Curvature in the distinguished orthonormal frame at `point`.
    tensor: AlgebraicCurvature,
}

fn resolve(manifest: &RunManifest) -> Result<Resolved, TaskError> {
    let entry = CatalogueEntry::from_spec(&manifest.manifold).map_err(|e| {
        ManifestError::BadField {
            field: "manifold".into(),
            detail: e.to_string(),
        }
    })?;
    let point = manifest
        .task_params
        .point
        .clone()
        .unwrap_or_else(|| entry.default_point());
    if point.len() != entry.dim {
        return Err(ManifestError::BadField {
            field: "point".into(),
            detail: format!("expected {} coordinates, got {}", entry.dim, point.len()),
        }
        .into());
    }
    if let Some(chart) = &entry.chart {
        if !chart.contains(&point) {
            return Err(ricci_means::Error::OutOfDomain {
                chart: chart.label().to_string(),
                point,
            }
            .into());
        }
    }
    let tensor = entry.curvature_in_frame(&point)?;
    Ok(Resolved {
        entry,
        point,
        tensor,
    })
}

/// Plane basis in frame components, from explicit vectors or frame axes.
fn resolve_plane(
    res: &Resolved,
    params: &TaskParams,
) -> Result<(usize, SubspaceFrame), TaskError> {
    let n = res.entry.dim;
    let identity = DMatrix::identity(n, n);
    if let Some(vectors) = &params.plane {
        // Explicit chart-coordinate vectors; frame components are Fᵀ g v.
        let spanners: Vec<DVector<f64>> = match &res.entry.chart {
            Some(chart) => {
                let g = chart.metric_at(&res.point)?.metric;
                let f = res.entry.frame_at(&res.point)?;
                vectors
                    .iter()
                    .map(|v| f.transpose() * &g * DVector::from_column_slice(v))
                    .collect()
            }
            None => vectors
                .iter()
                .map(|v| DVector::from_column_slice(v))
                .collect(),
        };
        let frame = SubspaceFrame::build(res.point.clone(), identity, &spanners)?;
        return Ok((frame.dim_plane(), frame));
    }
    let axes: Vec<usize> = match &params.plane_axes {
        Some(a) => a.clone(),
        None => (0..params.d.unwrap_or(2).min(n)).collect(),
    };
    if axes.iter().any(|&a| a >= n) {
        return Err(ManifestError::BadField {
            field: "plane_axes".into(),
            detail: format!("axis out of range for dimension {n}"),
        }
        .into());
    }
    let frame = SubspaceFrame::from_frame_columns(
        res.point.clone(),
        identity.clone(),
        &DMatrix::identity(n, n),
        &axes,
    )?;
    Ok((axes.len(), frame))
}

fn tol_scale(params: &TaskParams) -> f64 {
    params.tol_scale.unwrap_or(1.0)
}

#[derive(Serialize)]
struct SymmetryOut {
    antisymmetry_first: f64,
    antisymmetry_last: f64,
    pair_symmetry: f64,
    first_bianchi: f64,
}

#[derive(Serialize)]
struct CurvatureReport {
    schema: u32,
    manifold: ModelSpec,
    point: Vec<f64>,
    scalar: f64,
    /// Ricci matrix in the distinguished orthonormal frame.
    ricci_frame: Vec<Vec<f64>>,
    /// Sectional curvatures of the frame coordinate planes (i < j).
    frame_sectionals: Vec<(usize, usize, f64)>,
    symmetry_defects: SymmetryOut,
    tolerance: f64,
    passed: bool,
}

fn run_curvature(manifest: &RunManifest) -> Result<bool, TaskError> {
    let res = resolve(manifest)?;
    let r = &res.tensor;
    let n = r.dim();
    let d = r.symmetry_defects();
    let ricci = r.ricci();
    let tol = 1e-10 * tol_scale(&manifest.task_params);
    let passed = d.max() <= tol;
    let report = CurvatureReport {
        schema: 1,
        manifold: manifest.manifold.clone(),
        point: res.point.clone(),
        scalar: r.scalar(),
        ricci_frame: (0..n)
            .map(|i| (0..n).map(|j| ricci[(i, j)]).collect())
            .collect(),
        frame_sectionals: (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, r.frame_sectional(i, j)))
            .collect(),
        symmetry_defects: SymmetryOut {
            antisymmetry_first: d.antisymmetry_first,
            antisymmetry_last: d.antisymmetry_last,
            pair_symmetry: d.pair_symmetry,
            first_bianchi: d.first_bianchi,
        },
        tolerance: tol,
        passed,
    };
    write_output(&manifest.output.path, &to_json_fixed(&report))?;
    Ok(passed)
}

#[derive(Serialize)]
struct MeansReport {
    schema: u32,
    manifold: ModelSpec,
    point: Vec<f64>,
    d: usize,
    intrinsic: Option<f64>,
    normal: Option<f64>,
    intrinsic_sum: f64,
    mixed_sum: f64,
    trace_agreement_residual: f64,
    tolerance: f64,
    sphere_average: means::SphereAverageReport,
    passed: bool,
}

fn run_means(manifest: &RunManifest) -> Result<bool, TaskError> {
    let res = resolve(manifest)?;
    let (d, frame) = resolve_plane(&res, &manifest.task_params)?;
    let direct = means::mean_ricci(&res.tensor, &frame)?;
    let traced = means::mean_ricci_via_traces(&res.tensor, &frame)?;
    let residual = (direct.intrinsic_sum - traced.intrinsic_sum)
        .abs()
        .max((direct.mixed_sum - traced.mixed_sum).abs());
    let quadrature = manifest
        .task_params
        .quadrature
        .unwrap_or(means::DEFAULT_QUADRATURE);
    let seed = manifest.task_params.seed.unwrap_or(DEFAULT_SEED);
    let average = means::sphere_average_check(&res.tensor, &frame, quadrature, seed)?;
    let tol = 1e-10 * tol_scale(&manifest.task_params);
    let passed = residual <= tol;
    let report = MeansReport {
        schema: 1,
        manifold: manifest.manifold.clone(),
        point: res.point.clone(),
        d,
        intrinsic: direct.intrinsic_mean,
        normal: direct.normal_mean,
        intrinsic_sum: direct.intrinsic_sum,
        mixed_sum: direct.mixed_sum,
        trace_agreement_residual: residual,
        tolerance: tol,
        sphere_average: average,
        passed,
    };
    write_output(&manifest.output.path, &to_json_fixed(&report))?;
    Ok(passed)
}

#[derive(Serialize)]
struct WeitzReport {
    schema: u32,
    manifold: ModelSpec,
    point: Vec<f64>,
    d: usize,
    pairing: f64,
    via_mixed_sum: f64,
    via_ricci_minus_2k: f64,
    residual_mixed: f64,
    residual_ricci: f64,
    selfadjoint_defect: f64,
    tolerance: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

fn run_weitz(manifest: &RunManifest) -> Result<bool, TaskError> {
    let res = resolve(manifest)?;
    let (d, frame) = resolve_plane(&res, &manifest.task_params)?;
    let w = weitzenboeck::weitz_matrix(&res.tensor, d)?;
    let simple = weitzenboeck::SimpleDVector::unit(frame.clone());
    let pairing = simple.pair(&w)?;
    let m = means::mean_ricci(&res.tensor, &frame)?;
    let ricci = res.tensor.ricci();
    let mut ric_sum = 0.0;
    for e in frame.plane() {
        ric_sum += (e.transpose() * &ricci * e)[(0, 0)];
    }
    let via_ricci = ric_sum - 2.0 * m.intrinsic_sum;
    let residual_mixed = (pairing - m.mixed_sum).abs();
    let residual_ricci = (pairing - via_ricci).abs();
    let tol = 1e-8 * tol_scale(&manifest.task_params);
    let passed = residual_mixed <= tol && residual_ricci <= tol;

    let matrix = if manifest.task_params.emit_matrix.unwrap_or(false) {
        let e = w.entries();
        Some(
            (0..e.nrows())
                .map(|i| (0..e.ncols()).map(|j| e[(i, j)]).collect())
                .collect(),
        )
    } else {
        None
    };
    let report = WeitzReport {
        schema: 1,
        manifold: manifest.manifold.clone(),
        point: res.point.clone(),
        d,
        pairing,
        via_mixed_sum: m.mixed_sum,
        via_ricci_minus_2k: via_ricci,
        residual_mixed,
        residual_ricci,
        selfadjoint_defect: w.symmetry_defect(),
        tolerance: tol,
        passed,
        matrix,
    };
    if manifest.output.format == "csv" {
        let mut csv = String::from("route,value,residual\n");
        csv.push_str(&format!("weitz_pairing,{pairing:.16e},0e0\n"));
        csv.push_str(&format!(
            "mixed_sum,{:.16e},{residual_mixed:.16e}\n",
            m.mixed_sum
        ));
        csv.push_str(&format!(
            "ricci_minus_2k,{via_ricci:.16e},{residual_ricci:.16e}\n"
        ));
        write_output(&manifest.output.path, &csv)?;
    } else {
        write_output(&manifest.output.path, &to_json_fixed(&report))?;
    }
    Ok(passed)
}

#[derive(Serialize)]
struct KappaOut {
    schema: u32,
    manifold: ModelSpec,
    #[serde(flatten)]
    report: kappa::KappaReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    lichnerowicz: Option<weitzenboeck::LichnerowiczReport>,
}

fn run_kappa(manifest: &RunManifest) -> Result<bool, TaskError> {
    let entry = CatalogueEntry::from_spec(&manifest.manifold).map_err(|e| {
        ManifestError::BadField {
            field: "manifold".into(),
            detail: e.to_string(),
        }
    })?;
    let d = manifest.task_params.d.unwrap_or(2);
    let cfg = KappaConfig {
        restarts: manifest.task_params.restarts.unwrap_or(32),
        seed: manifest.task_params.seed.unwrap_or(DEFAULT_SEED),
        ..KappaConfig::default()
    };
    let report = kappa::kappa_d(&entry, d, &cfg)?;
    let lich = manifest
        .task_params
        .lambda_candidates
        .as_ref()
        .map(|ls| weitzenboeck::lichnerowicz_report(report.kappa_upper_bound, ls));
    let out = KappaOut {
        schema: 1,
        manifold: manifest.manifold.clone(),
        report,
        lichnerowicz: lich,
    };
    write_output(&manifest.output.path, &to_json_fixed(&out))?;
    Ok(true)
}

#[derive(Serialize)]
struct NamedFit {
    name: String,
    c2: f64,
    c4: f64,
    target_c2: Option<f64>,
    c2_error: Option<f64>,
    tolerance: f64,
    fit_residual: f64,
    radii: Vec<f64>,
    densities: Vec<f64>,
    passed: bool,
}

#[derive(Serialize)]
struct ExpandReport {
    schema: u32,
    manifold: ModelSpec,
    point: Vec<f64>,
    fits: Vec<NamedFit>,
    passed: bool,
}

fn named_fit(name: &str, fit: &expansion::ExpansionFit, tol: f64) -> NamedFit {
    let err = fit.c2_error();
    NamedFit {
        name: name.to_string(),
        c2: fit.c2,
        c4: fit.c4,
        target_c2: fit.target_c2,
        c2_error: err,
        tolerance: tol,
        fit_residual: fit.residual,
        radii: fit.radii.clone(),
        densities: fit.densities.clone(),
        passed: err.is_none_or(|e| e <= tol),
    }
}

fn run_expand(manifest: &RunManifest) -> Result<bool, TaskError> {
    let res = resolve(manifest)?;
    let chart = res
        .entry
        .chart
        .as_ref()
        .ok_or_else(|| ricci_means::Error::MissingCapability {
            name: res.entry.name.clone(),
            capability: "chart".into(),
        })?;
    let scale = tol_scale(&manifest.task_params);
    let radii = manifest
        .task_params
        .ladder
        .clone()
        .unwrap_or_else(expansion::default_radii);
    let quad = VolumeQuadrature {
        seed: manifest.task_params.seed.unwrap_or(DEFAULT_SEED),
        ..VolumeQuadrature::default()
    };
    let tol = expansion::default_tol();
    let p = &res.point;
    let mut fits = Vec::new();

    let fit = expansion::sphere_volume_coeff(chart, p, &quad, &radii, tol)?;
    fits.push(named_fit("sphere_volume", &fit, 1e-3 * scale));

    // Radial density along the first frame direction.
    let frame_basis = res.entry.frame_at(p)?;
    let u = frame_basis.column(0).into_owned();
    let fit = expansion::radial_density_coeff(chart, p, &u, &radii, tol)?;
    fits.push(named_fit("radial_density", &fit, 1e-3 * scale));

    if chart.dim() == 2 {
        let fit = expansion::bdp_circumference(chart, p, &quad, &radii, tol)?;
        fits.push(named_fit("bdp_circumference", &fit, 1e-3 * scale));
    }

    // Plane/normal density of the requested plane, in chart coordinates.
    let d = manifest.task_params.d.unwrap_or(2).min(chart.dim());
    if d >= 1 && d < chart.dim() {
        let axes: Vec<usize> = manifest
            .task_params
            .plane_axes
            .clone()
            .unwrap_or_else(|| (0..d).collect());
        let g = chart.metric_at(p)?.metric;
        let frame =
            SubspaceFrame::from_frame_columns(p.clone(), g, &frame_basis, &axes)?;
        let v = frame.plane()[0].clone();
        let fit = expansion::plane_density_coeff(chart, p, &frame, &v, &radii, tol)?;
        fits.push(named_fit("plane_density", &fit, 2e-3 * scale));
        let fit = expansion::normal_density_coeff(chart, p, &frame, &v, &radii, tol)?;
        fits.push(named_fit("normal_density", &fit, 2e-3 * scale));
    }

    let passed = fits.iter().all(|f| f.passed);
    if manifest.output.format == "csv" {
        let mut csv = String::from("fit,radius,density,model,residual\n");
        for f in &fits {
            for (r, rho) in f.radii.iter().zip(&f.densities) {
                let model = 1.0 + f.c2 * r * r + f.c4 * r * r * r * r;
                csv.push_str(&format!(
                    "{},{r:.16e},{rho:.16e},{model:.16e},{:.16e}\n",
                    f.name,
                    (rho - model).abs()
                ));
            }
        }
        write_output(&manifest.output.path, &csv)?;
    } else {
        let report = ExpandReport {
            schema: 1,
            manifold: manifest.manifold.clone(),
            point: res.point.clone(),
            fits,
            passed,
        };
        write_output(&manifest.output.path, &to_json_fixed(&report))?;
    }
    Ok(passed)
}

fn run_verify_task(manifest: &RunManifest) -> Result<bool, TaskError> {
    let single = manifest
        .task_params
        .verify_single_manifold
        .unwrap_or(false);
    let cfg = VerifyConfig {
        seed: manifest.task_params.seed.unwrap_or(DEFAULT_SEED),
        tol_scale: tol_scale(&manifest.task_params),
        entries: single.then(|| vec![manifest.manifold.clone()]),
        ..VerifyConfig::default()
    };
    let report = run_verify(&cfg)?;
    write_output(&manifest.output.path, &to_json_fixed(&report))?;
    Ok(report.passed)
}

/// Executes a manifest; returns whether every check passed.
pub fn run(manifest: &RunManifest) -> Result<bool, TaskError> {
    match manifest.task {
        TaskSpec::Curvature => run_curvature(manifest),
        TaskSpec::Means => run_means(manifest),
        TaskSpec::Weitz => run_weitz(manifest),
        TaskSpec::Kappa => run_kappa(manifest),
        TaskSpec::Expand => run_expand(manifest),
        TaskSpec::Verify => run_verify_task(manifest),
    }
}
