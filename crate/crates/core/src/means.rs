//! Directional and mean intrinsic/normal Ricci curvatures of a d-plane.
//!
//! Two independent computation paths are provided: direct sectional sums and
//! the curvature-operator trace dictionary on Λ², which must agree to 1e-10.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::AlgebraicCurvature;
use crate::error::{Error, Result};
use crate::frame::SubspaceFrame;
use crate::linalg;

/// Default direction-sample count for sphere averages.
pub const DEFAULT_QUADRATURE: usize = 4096;

/// Mean curvatures of a splitting, with the raw sectional sums they came
/// from. The intrinsic mean is absent for d = 1 and the normal mean for
/// d = n, matching the dimensional stratification of the means.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanRicciReport {
    pub dim_total: usize,
    pub dim_plane: usize,
    pub intrinsic_mean: Option<f64>,
    pub normal_mean: Option<f64>,
    /// Σ_{i<j} K(e_i, e_j) over plane pairs.
    pub intrinsic_sum: f64,
    /// Σ_{i,α} K(e_i, n_α) over mixed pairs.
    pub mixed_sum: f64,
}

impl MeanRicciReport {
    fn from_sums(n: usize, d: usize, intrinsic_sum: f64, mixed_sum: f64) -> Self {
        let intrinsic_mean = (d >= 2).then(|| 2.0 / d as f64 * intrinsic_sum);
        let normal_mean = (d < n).then(|| mixed_sum / (d as f64 * (n - d) as f64));
        MeanRicciReport {
            dim_total: n,
            dim_plane: d,
            intrinsic_mean,
            normal_mean,
            intrinsic_sum,
            mixed_sum,
        }
    }
}

fn check_compatible(r: &AlgebraicCurvature, frame: &SubspaceFrame) -> Result<()> {
    if r.dim() != frame.dim_total() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: frame.dim_total(),
        });
    }
    let defect = linalg::max_abs(&(r.frame_metric() - frame.metric()));
    if defect > 1e-9 {
        return Err(Error::FrameMismatch {
            detail: format!("curvature and frame metrics differ by {defect:e}"),
        });
    }
    Ok(())
}

/// Ric_Π(v,v) = Σ K(v, e_i') over an orthonormal completion of Π containing
/// the unit vector `v`. Independent of the chosen completion.
pub fn directional_intrinsic_ricci(
    r: &AlgebraicCurvature,
    frame: &SubspaceFrame,
    v: &DVector<f64>,
) -> Result<f64> {
    check_compatible(r, frame)?;
    let completion = frame.completion_within_plane(v)?;
    let mut sum = 0.0;
    for e in completion.iter().skip(1) {
        sum += r.sectional(v, e)?;
    }
    Ok(sum)
}

/// Ric⊥_Π(u) = Σ_α K(u, n_α) for unit u ∈ Π.
pub fn directional_normal_ricci(
    r: &AlgebraicCurvature,
    frame: &SubspaceFrame,
    u: &DVector<f64>,
) -> Result<f64> {
    check_compatible(r, frame)?;
    let norm = linalg::norm(frame.metric(), u);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit { norm });
    }
    let residual = (u - frame.project_plane(u)).norm();
    if residual > 1e-8 {
        return Err(Error::VectorNotInPlane { residual });
    }
    let mut sum = 0.0;
    for na in frame.normal() {
        sum += r.sectional(u, na)?;
    }
    Ok(sum)
}

/// Mean intrinsic and normal Ricci curvatures by direct sectional sums.
pub fn mean_ricci(r: &AlgebraicCurvature, frame: &SubspaceFrame) -> Result<MeanRicciReport> {
    check_compatible(r, frame)?;
    let plane = frame.plane();
    let mut intrinsic_sum = 0.0;
    for i in 0..plane.len() {
        for j in (i + 1)..plane.len() {
            intrinsic_sum += r.sectional(&plane[i], &plane[j])?;
        }
    }
    let mut mixed_sum = 0.0;
    for e in plane {
        for na in frame.normal() {
            mixed_sum += r.sectional(e, na)?;
        }
    }
    Ok(MeanRicciReport::from_sums(
        frame.dim_total(),
        frame.dim_plane(),
        intrinsic_sum,
        mixed_sum,
    ))
}

/// Coefficients of u∧v in the coordinate wedge basis {∂_a ∧ ∂_b}, a < b.
fn wedge_coefficients(u: &DVector<f64>, v: &DVector<f64>) -> Vec<(usize, usize, f64)> {
    let n = u.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            out.push((a, b, u[a] * v[b] - u[b] * v[a]));
        }
    }
    out
}

/// ⟨𝓡(u∧v), u∧v⟩ through the curvature operator on Λ²: expand the bivector
/// in coordinate wedge coefficients and contract against R.
fn operator_pairing(r: &AlgebraicCurvature, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let c = wedge_coefficients(u, v);
    let mut acc = 0.0;
    for &(a, b, cab) in &c {
        if cab == 0.0 {
            continue;
        }
        for &(p, q, cpq) in &c {
            if cpq == 0.0 {
                continue;
            }
            acc += cab * r.at(a, b, p, q) * cpq;
        }
    }
    acc
}

/// Mean curvatures through the trace dictionary: tr(𝓡|_{Λ²Π}) and
/// tr(𝓡|_{Π∧Π⊥}) from operator pairings of the frame bivectors.
pub fn mean_ricci_via_traces(
    r: &AlgebraicCurvature,
    frame: &SubspaceFrame,
) -> Result<MeanRicciReport> {
    check_compatible(r, frame)?;
    let plane = frame.plane();
    let mut intrinsic_sum = 0.0;
    for i in 0..plane.len() {
        for j in (i + 1)..plane.len() {
            intrinsic_sum += operator_pairing(r, &plane[i], &plane[j]);
        }
    }
    let mut mixed_sum = 0.0;
    for e in plane {
        for na in frame.normal() {
            mixed_sum += operator_pairing(r, e, na);
        }
    }
    Ok(MeanRicciReport::from_sums(
        frame.dim_total(),
        frame.dim_plane(),
        intrinsic_sum,
        mixed_sum,
    ))
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereAverage {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Sphere-average estimates of the two means; each converges to the exact
/// mean at the 1/√N rate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereAverageReport {
    pub intrinsic: Option<SphereAverage>,
    pub normal: Option<SphereAverage>,
}

fn welford(values: impl Iterator<Item = f64>) -> SphereAverage {
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        count += 1;
        let delta = v - mean;
        mean += delta / count as f64;
        m2 += delta * (v - mean);
    }
    let var = if count > 1 { m2 / (count - 1) as f64 } else { 0.0 };
    SphereAverage {
        mean,
        std_error: (var / count.max(1) as f64).sqrt(),
        samples: count,
    }
}

/// Uniform random unit directions in Π: standard Gaussian coefficients in the
/// plane basis, normalized (exactly rotation invariant).
fn sample_plane_directions(frame: &SubspaceFrame, samples: usize, seed: u64) -> Vec<DVector<f64>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = frame.dim_plane();
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let coeffs: Vec<f64> = (0..d)
            .map(|_| {
                // Box-Muller from two uniforms.
                let u1: f64 = rng.random::<f64>().max(1e-16);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        let mut v = DVector::zeros(frame.dim_total());
        for (c, b) in coeffs.iter().zip(frame.plane()) {
            v += b * (*c / norm);
        }
        out.push(v);
    }
    out
}

/// Quadrature check of the integral form of the means: averages the
/// directional curvatures over uniform unit directions in Π.
pub fn sphere_average_check(
    r: &AlgebraicCurvature,
    frame: &SubspaceFrame,
    quadrature_size: usize,
    seed: u64,
) -> Result<SphereAverageReport> {
    check_compatible(r, frame)?;
    let dirs = sample_plane_directions(frame, quadrature_size, seed);
    let d = frame.dim_plane();
    let n = frame.dim_total();
    let intrinsic = if d >= 2 {
        let vals: Result<Vec<f64>> = dirs
            .iter()
            .map(|v| directional_intrinsic_ricci(r, frame, v))
            .collect();
        Some(welford(vals?.into_iter()))
    } else {
        None
    };
    let normal = if d < n {
        // Ric⊥_Π(u) sums n−d mixed curvatures; the mean normal Ricci is the
        // per-pair average, so each sample carries the 1/(n−d) factor.
        let scale = 1.0 / (n - d) as f64;
        let vals: Result<Vec<f64>> = dirs
            .iter()
            .map(|u| directional_normal_ricci(r, frame, u).map(|x| x * scale))
            .collect();
        Some(welford(vals?.into_iter()))
    } else {
        None
    };
    Ok(SphereAverageReport { intrinsic, normal })
}
