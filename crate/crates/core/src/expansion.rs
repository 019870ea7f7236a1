//! Volume-expansion verification: fits the r² defect of geodesic-sphere and
//! subspace-sphere densities computed from Jacobi determinants.
//!
//! Every density is the Gram determinant of Jacobi-field images divided by
//! the Euclidean leading power of r, so accepted fits have the model
//! 1 + c₂ r² + c₄ r⁴ with c₄ a nuisance term absorbing the next order.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use serde::Serialize;

use crate::chart::MetricChart;
use crate::curvature::riemann_at;
use crate::error::{Error, Result};
use crate::frame::SubspaceFrame;
use crate::geodesic::{JacobiFlow, DEFAULT_ODE_TOL};
use crate::linalg;
use crate::means;

/// Default radius ladder (model units), largest first.
pub const DEFAULT_RADII: [f64; 5] = [0.2, 0.15, 0.1, 0.075, 0.05];

/// Residual threshold above which a fit is rejected.
pub const FIT_RESIDUAL_TOL: f64 = 1e-4;

/// Deterministic/stochastic quadrature sizes for direction averages.
#[derive(Clone, Copy, Debug)]
pub struct VolumeQuadrature {
    /// Monte-Carlo sample count for n ≥ 4.
    pub mc_samples: usize,
    pub seed: u64,
    /// Gauss–Legendre nodes in cos θ for n = 3.
    pub polar_nodes: usize,
    /// Uniform azimuth nodes for n = 3.
    pub azimuth_nodes: usize,
    /// Uniform angle nodes for n = 2.
    pub circle_nodes: usize,
}

impl Default for VolumeQuadrature {
    fn default() -> Self {
        VolumeQuadrature {
            mc_samples: 8192,
            seed: crate::DEFAULT_SEED,
            polar_nodes: 16,
            azimuth_nodes: 32,
            circle_nodes: 48,
        }
    }
}

/// A fitted radius ladder: model a·(1 + c₂ r² + c₄ r⁴) with a ≡ 1 after
/// normalizing by the Euclidean leading term.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    pub radii: Vec<f64>,
    pub densities: Vec<f64>,
    pub c0: f64,
    pub c2: f64,
    pub c4: f64,
    /// Max |density − model| over the ladder.
    pub residual: f64,
    /// Expected c₂ from the pointwise curvature, when the op knows it.
    pub target_c2: Option<f64>,
}

impl ExpansionFit {
    /// Least-squares fit of a strictly decreasing ladder.
    pub fn from_ladder(radii: &[f64], densities: &[f64], target_c2: Option<f64>) -> Result<Self> {
        assert_eq!(radii.len(), densities.len());
        if radii.windows(2).any(|w| w[0] <= w[1]) || radii.iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidParameter {
                detail: "radius ladder must be strictly decreasing and positive".into(),
            });
        }
        let values: Vec<f64> = densities.iter().map(|d| d - 1.0).collect();
        let (c2, c4) = linalg::quadratic_quartic_fit(radii, &values);
        let mut residual = 0.0f64;
        for (&r, &rho) in radii.iter().zip(densities) {
            let model = 1.0 + c2 * r * r + c4 * r * r * r * r;
            residual = residual.max((rho - model).abs() / rho.abs().max(1.0));
        }
        if residual > FIT_RESIDUAL_TOL {
            return Err(Error::FitRejected {
                residual,
                threshold: FIT_RESIDUAL_TOL,
            });
        }
        Ok(ExpansionFit {
            radii: radii.to_vec(),
            densities: densities.to_vec(),
            c0: 1.0,
            c2,
            c4,
            residual,
            target_c2,
        })
    }

    /// |c₂ − target| when a target is known.
    pub fn c2_error(&self) -> Option<f64> {
        self.target_c2.map(|t| (self.c2 - t).abs())
    }
}

/// Unit directions and weights (summing to 1) on the Euclidean sphere S^{n−1}.
///
/// Deterministic product rules for n = 2, 3; seeded Gaussian sampling above.
pub fn sphere_rule(n: usize, quad: &VolumeQuadrature) -> Vec<(DVector<f64>, f64)> {
    match n {
        2 => {
            let m = quad.circle_nodes;
            (0..m)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                    (DVector::from_vec(vec![th.cos(), th.sin()]), 1.0 / m as f64)
                })
                .collect()
        }
        3 => {
            let gl = gauss_legendre(quad.polar_nodes);
            let ma = quad.azimuth_nodes;
            let mut out = Vec::with_capacity(gl.len() * ma);
            for &(c, w) in &gl {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for i in 0..ma {
                    let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / ma as f64;
                    out.push((
                        DVector::from_vec(vec![s * phi.cos(), s * phi.sin(), c]),
                        w / 2.0 / ma as f64,
                    ));
                }
            }
            out
        }
        _ => {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(quad.seed);
            let mut out = Vec::with_capacity(quad.mc_samples);
            while out.len() < quad.mc_samples {
                let mut v = DVector::zeros(n);
                for i in 0..n {
                    let u1: f64 = rng.random::<f64>().max(1e-16);
                    let u2: f64 = rng.random();
                    v[i] = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                }
                let norm = v.norm();
                if norm > 1e-8 {
                    out.push((v / norm, 1.0 / quad.mc_samples as f64));
                }
            }
            out
        }
    }
}

/// Gauss–Legendre nodes/weights on [−1, 1] by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gram-determinant density along one geodesic: √det(J(r)ᵀJ(r)) / r^k at
/// each radius (ascending integration over the ladder).
///
/// `w_coords` are the initial Jacobi derivative directions, g-orthonormal
/// and g-orthogonal to `u`.
fn direction_density_ladder(
    chart: &MetricChart,
    p: &[f64],
    u: &DVector<f64>,
    w_coords: &[DVector<f64>],
    radii_desc: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let n = chart.dim();
    let k = w_coords.len();
    if k == 0 {
        return Ok(vec![1.0; radii_desc.len()]);
    }
    let g = chart.metric_at(p)?.metric;

    // Initial J' columns in frame components: ξ_a = E₀ᵀ g w_a.
    let probe = JacobiFlow::new(chart, p, u.as_slice(), DMatrix::zeros(n, 0), tol, None)?;
    let e0 = probe.initial_frame().clone();
    let mut jp0 = DMatrix::zeros(n, k);
    for (a, w) in w_coords.iter().enumerate() {
        let xi = e0.transpose() * &g * w;
        jp0.set_column(a, &xi);
    }
    // Conjugate monitor: det(Ξ₀ᵀ J) starts as t^k · det(Ξ₀ᵀΞ₀) > 0.
    let monitor = jp0.transpose();

    let mut flow = JacobiFlow::new(chart, p, u.as_slice(), jp0, tol, Some(monitor))?;
    let mut radii_asc: Vec<f64> = radii_desc.to_vec();
    radii_asc.reverse();
    let mut densities_asc = Vec::with_capacity(radii_asc.len());
    for &r in &radii_asc {
        let block = flow.advance_to(r)?;
        if block.state.speed_drift > 1e-8 || block.frame_drift > 1e-8 {
            return Err(Error::StepFailure { t: r });
        }
        let gram = block.j.transpose() * &block.j;
        let det = gram.determinant().max(0.0);
        densities_asc.push(det.sqrt() / r.powi(k as i32));
    }
    densities_asc.reverse();
    Ok(densities_asc)
}

/// g-orthonormal frame at p (columns in coordinates) for direction sampling.
fn point_frame(chart: &MetricChart, p: &[f64]) -> Result<DMatrix<f64>> {
    let g = chart.metric_at(p)?.metric;
    linalg::orthonormal_basis_from_metric(&g).ok_or_else(|| Error::SingularMetric {
        point: p.to_vec(),
        detail: "frame construction failed".into(),
    })
}

/// Completion of u inside the full tangent space: n−1 g-orthonormal vectors
/// orthogonal to u.
fn orthogonal_complement(
    chart: &MetricChart,
    p: &[f64],
    u: &DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let g = chart.metric_at(p)?.metric;
    let sub = SubspaceFrame::build(p.to_vec(), g, std::slice::from_ref(u))?;
    Ok(sub.normal().to_vec())
}

/// Geodesic-sphere volume defect: the direction-averaged Jacobi density has
/// c₂ = −Scal(p)/(6n).
pub fn sphere_volume_coeff(
    chart: &MetricChart,
    p: &[f64],
    quad: &VolumeQuadrature,
    radii: &[f64],
    tol: f64,
) -> Result<ExpansionFit> {
    let n = chart.dim();
    let frame = point_frame(chart, p)?;
    let rule = sphere_rule(n, quad);
    let mut acc = vec![0.0; radii.len()];
    for (xi, w) in &rule {
        let u = &frame * xi;
        let comp = orthogonal_complement(chart, p, &u)?;
        let lad = direction_density_ladder(chart, p, &u, &comp, radii, tol)?;
        for (a, v) in acc.iter_mut().zip(&lad) {
            *a += w * v;
        }
    }
    let scal = riemann_at(chart, p)?.scalar;
    ExpansionFit::from_ladder(radii, &acc, Some(-scal / (6.0 * n as f64)))
}

/// Radial density along a fixed unit direction u: c₂ = −Ric(u,u)/6.
pub fn radial_density_coeff(
    chart: &MetricChart,
    p: &[f64],
    u: &DVector<f64>,
    radii: &[f64],
    tol: f64,
) -> Result<ExpansionFit> {
    let comp = orthogonal_complement(chart, p, u)?;
    let lad = direction_density_ladder(chart, p, u, &comp, radii, tol)?;
    let pc = riemann_at(chart, p)?;
    let ric_uu = (u.transpose() * &pc.ricci * u)[(0, 0)];
    ExpansionFit::from_ladder(radii, &lad, Some(-ric_uu / 6.0))
}

/// Intrinsic-pattern density of exp_p(r·S^{d−1}_Π) at direction v ∈ Π:
/// c₂ = −Ric_Π(v,v)/6.
pub fn plane_density_coeff(
    chart: &MetricChart,
    p: &[f64],
    frame: &SubspaceFrame,
    v: &DVector<f64>,
    radii: &[f64],
    tol: f64,
) -> Result<ExpansionFit> {
    let completion = frame.completion_within_plane(v)?;
    let w: Vec<DVector<f64>> = completion[1..].to_vec();
    let lad = direction_density_ladder(chart, p, v, &w, radii, tol)?;
    let pc = riemann_at(chart, p)?;
    let target = means::directional_intrinsic_ricci(&pc.riemann, frame, v)?;
    ExpansionFit::from_ladder(radii, &lad, Some(-target / 6.0))
}

/// Normal-pattern density of the (n−d−1)-sphere machinery for u ∈ Π:
/// c₂ = −Ric⊥_Π(u)/6.
pub fn normal_density_coeff(
    chart: &MetricChart,
    p: &[f64],
    frame: &SubspaceFrame,
    u: &DVector<f64>,
    radii: &[f64],
    tol: f64,
) -> Result<ExpansionFit> {
    let w: Vec<DVector<f64>> = frame.normal().to_vec();
    let lad = direction_density_ladder(chart, p, u, &w, radii, tol)?;
    let pc = riemann_at(chart, p)?;
    let target = means::directional_normal_ricci(&pc.riemann, frame, u)?;
    ExpansionFit::from_ladder(radii, &lad, Some(-target / 6.0))
}

/// Bertrand–Diguet–Puiseux: geodesic-circle circumference on a surface has
/// c₂ = −K(p)/6.
pub fn bdp_circumference(
    chart: &MetricChart,
    p: &[f64],
    quad: &VolumeQuadrature,
    radii: &[f64],
    tol: f64,
) -> Result<ExpansionFit> {
    if chart.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: chart.dim(),
        });
    }
    let frame = point_frame(chart, p)?;
    let rule = sphere_rule(2, quad);
    let mut acc = vec![0.0; radii.len()];
    for (xi, w) in &rule {
        let u = &frame * xi;
        let comp = orthogonal_complement(chart, p, &u)?;
        let lad = direction_density_ladder(chart, p, &u, &comp, radii, tol)?;
        for (a, v) in acc.iter_mut().zip(&lad) {
            *a += w * v;
        }
    }
    let pc = riemann_at(chart, p)?;
    let e0 = DVector::from_vec(vec![1.0, 0.0]);
    let e1 = DVector::from_vec(vec![0.0, 1.0]);
    let k = pc.sectional(&e0, &e1)?;
    ExpansionFit::from_ladder(radii, &acc, Some(-k / 6.0))
}

/// Convenience: default ladder and tolerance.
pub fn default_radii() -> Vec<f64> {
    DEFAULT_RADII.to_vec()
}

pub fn default_tol() -> f64 {
    DEFAULT_ODE_TOL
}
