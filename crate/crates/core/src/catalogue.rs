//! Catalogue of model manifolds: coordinate charts for the numeric pipeline
//! paired with closed-form curvature and mean oracles, so every numeric path
//! has an exact target.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::autodiff::Scalar;
use crate::chart::{MetricChart, SmoothMetric};
use crate::curvature::AlgebraicCurvature;
use crate::error::{Error, Result};
use crate::linalg;

/// Closed-form curvature provider in a distinguished orthonormal frame.
pub trait CurvatureOracle: Send + Sync {
    fn dim(&self) -> usize;
    /// Components at a point (ignored by homogeneous oracles).
    fn curvature(&self, point: &[f64]) -> AlgebraicCurvature;
}

/// Addressable catalogue model, doubling as the chart-manifest wire format.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Constant sectional curvature κ in dimension n.
    SpaceForm { n: usize, kappa: f64 },
    /// 3-dimensional Heisenberg group with its left-invariant metric.
    Heisenberg,
    /// Complex projective space of complex dimension n (real dimension 2n),
    /// Fubini–Study normalized to holomorphic sectional curvature 4.
    Cpn { n: usize },
    /// Surface of revolution in R³.
    SurfaceOfRevolution { kind: RevolutionKind },
    /// Product of round spheres S^a(rho_a) × S^b(rho_b).
    ProductSpheres {
        a: usize,
        rho_a: f64,
        b: usize,
        rho_b: f64,
    },
    /// Warped product over a flat box base: g = g_B + f(x₀)² g_F.
    WarpedProduct {
        base_dim: usize,
        fiber: FiberSpec,
        warp: WarpSpec,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RevolutionKind {
    Cylinder { radius: f64 },
    Sphere { radius: f64 },
    Catenoid,
}

/// Space-form fiber of a warped product.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct FiberSpec {
    pub dim: usize,
    pub kappa: f64,
}

/// Warp profiles with closed-form derivatives, applied along coordinate 0.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarpSpec {
    Constant { value: f64 },
    Cosh,
    Sinh,
    Exp,
    /// c₀ + c₁ t + c₂ t² + c₃ t³.
    Poly { coeffs: Vec<f64> },
}

impl WarpSpec {
    fn eval_generic<S: Scalar>(&self, t: S) -> S {
        match self {
            WarpSpec::Constant { value } => S::from_f64(*value),
            WarpSpec::Cosh => t.cosh(),
            WarpSpec::Sinh => t.sinh(),
            WarpSpec::Exp => t.exp(),
            WarpSpec::Poly { coeffs } => {
                let mut acc = S::zero();
                for &c in coeffs.iter().rev() {
                    acc = acc * t + S::from_f64(c);
                }
                acc
            }
        }
    }

    /// (f, f′, f″) at t.
    pub fn jet(&self, t: f64) -> (f64, f64, f64) {
        match self {
            WarpSpec::Constant { value } => (*value, 0.0, 0.0),
            WarpSpec::Cosh => (t.cosh(), t.sinh(), t.cosh()),
            WarpSpec::Sinh => (t.sinh(), t.cosh(), t.sinh()),
            WarpSpec::Exp => (t.exp(), t.exp(), t.exp()),
            WarpSpec::Poly { coeffs } => {
                let f = |k: usize| coeffs.get(k).copied().unwrap_or(0.0);
                (
                    f(0) + f(1) * t + f(2) * t * t + f(3) * t * t * t,
                    f(1) + 2.0 * f(2) * t + 3.0 * f(3) * t * t,
                    2.0 * f(2) + 6.0 * f(3) * t,
                )
            }
        }
    }
}

/// How the distinguished orthonormal frame at a point is produced.
#[derive(Clone, Copy, Debug)]
enum FrameRule {
    /// Gram–Schmidt of the coordinate axes in the chart metric.
    GramSchmidt,
    /// Left-invariant Heisenberg frame X = ∂x, Y = ∂y + x ∂z, Z = ∂z.
    Heisenberg,
}

/// A catalogue manifold: chart and/or oracle plus bookkeeping flags.
#[derive(Clone)]
pub struct CatalogueEntry {
    pub name: String,
    pub dim: usize,
    pub chart: Option<MetricChart>,
    pub oracle: Option<Arc<dyn CurvatureOracle>>,
    /// Curvature is point-independent in the distinguished frame.
    pub homogeneous: bool,
    /// Chart domain is a box cut out of a non-compact manifold; infima over
    /// it are per-box quantities.
    pub noncompact: bool,
    pub spec: ModelSpec,
    frame_rule: FrameRule,
}

impl std::fmt::Debug for CatalogueEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogueEntry")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("homogeneous", &self.homogeneous)
            .field("spec", &self.spec)
            .finish()
    }
}

impl CatalogueEntry {
    pub fn from_spec(spec: &ModelSpec) -> Result<CatalogueEntry> {
        match spec {
            ModelSpec::SpaceForm { n, kappa } => space_form(*n, *kappa),
            ModelSpec::Heisenberg => Ok(heisenberg()),
            ModelSpec::Cpn { n } => cpn_fubini_study(*n),
            ModelSpec::SurfaceOfRevolution { kind } => surface_of_revolution(*kind),
            ModelSpec::ProductSpheres { a, rho_a, b, rho_b } => {
                product_spheres(*a, *rho_a, *b, *rho_b)
            }
            ModelSpec::WarpedProduct {
                base_dim,
                fiber,
                warp,
            } => warped_product(*base_dim, *fiber, warp.clone()),
        }
    }

    /// Default base point: chart center, or the origin for pure oracles.
    pub fn default_point(&self) -> Vec<f64> {
        match &self.chart {
            Some(c) => c.center(),
            None => vec![0.0; self.dim],
        }
    }

    /// Distinguished orthonormal frame at a point, as columns in chart
    /// coordinates. Oracles express their components in this frame.
    pub fn frame_at(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        match self.frame_rule {
            FrameRule::Heisenberg => {
                let x = point[0];
                Ok(DMatrix::from_column_slice(
                    3,
                    3,
                    &[1.0, 0.0, 0.0, 0.0, 1.0, x, 0.0, 0.0, 1.0],
                ))
            }
            FrameRule::GramSchmidt => {
                let g = match &self.chart {
                    Some(c) => c.metric_at(point)?.metric,
                    None => DMatrix::identity(self.dim, self.dim),
                };
                // Gram–Schmidt of the coordinate axes keeps block-adapted
                // frames adapted (all catalogue charts are block diagonal).
                let mut cols: Vec<DVector<f64>> = Vec::with_capacity(self.dim);
                for a in 0..self.dim {
                    let mut v = DVector::zeros(self.dim);
                    v[a] = 1.0;
                    for b in &cols {
                        let c = linalg::inner(&g, b, &v);
                        v -= b * c;
                    }
                    let norm = linalg::norm(&g, &v);
                    if norm < 1e-12 {
                        return Err(Error::SingularMetric {
                            point: point.to_vec(),
                            detail: "frame construction degenerated".into(),
                        });
                    }
                    cols.push(v / norm);
                }
                Ok(DMatrix::from_columns(&cols))
            }
        }
    }

    /// Oracle curvature in the distinguished frame, when available.
    pub fn oracle_curvature(&self, point: &[f64]) -> Result<AlgebraicCurvature> {
        match &self.oracle {
            Some(o) => Ok(o.curvature(point)),
            None => Err(Error::MissingCapability {
                name: self.name.clone(),
                capability: "oracle".into(),
            }),
        }
    }

    /// Chart-pipeline curvature at a point.
    pub fn chart_curvature(&self, point: &[f64]) -> Result<crate::curvature::PointCurvature> {
        match &self.chart {
            Some(c) => crate::curvature::riemann_at(c, point),
            None => Err(Error::MissingCapability {
                name: self.name.clone(),
                capability: "chart".into(),
            }),
        }
    }

    /// Best curvature source in an orthonormal frame: the oracle if present,
    /// otherwise the chart curvature re-expressed in the distinguished frame.
    pub fn curvature_in_frame(&self, point: &[f64]) -> Result<AlgebraicCurvature> {
        if let Some(o) = &self.oracle {
            return Ok(o.curvature(point));
        }
        let pc = self.chart_curvature(point)?;
        let frame = self.frame_at(point)?;
        let mut r = pc.riemann.change_basis(&frame);
        let defect = linalg::identity_defect(r.frame_metric());
        if defect > 1e-9 {
            return Err(Error::NotOrthonormal { defect });
        }
        *r.frame_metric_mut() = DMatrix::identity(self.dim, self.dim);
        Ok(r)
    }
}

/// Space-form tensor κ(δ_ik δ_jl − δ_il δ_jk) in any orthonormal frame.
pub fn space_form_tensor(n: usize, kappa: f64) -> AlgebraicCurvature {
    AlgebraicCurvature::from_fn(n, DMatrix::identity(n, n), |i, j, k, l| {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
    })
}

struct ConstantCurvatureOracle {
    n: usize,
    kappa: f64,
}

impl CurvatureOracle for ConstantCurvatureOracle {
    fn dim(&self) -> usize {
        self.n
    }
    fn curvature(&self, _point: &[f64]) -> AlgebraicCurvature {
        space_form_tensor(self.n, self.kappa)
    }
}

/// Conformally flat metric λ(x)·δ with λ = 4ρ⁴/(ρ² ± |x|²)²: stereographic
/// chart of S^n(ρ) for the plus sign, Poincaré ball of curvature −1/ρ² for
/// the minus sign.
struct ConformalSpaceForm {
    dim: usize,
    rho: f64,
    positive: bool,
}

impl SmoothMetric for ConformalSpaceForm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        let rho2 = S::from_f64(self.rho * self.rho);
        let mut r2 = S::zero();
        for &xi in x {
            r2 = r2 + xi * xi;
        }
        let denom = if self.positive { rho2 + r2 } else { rho2 - r2 };
        let lam = S::from_f64(4.0) * rho2 * rho2 / (denom * denom);
        for i in 0..self.dim {
            for j in 0..self.dim {
                g[i * self.dim + j] = if i == j { lam } else { S::zero() };
            }
        }
    }
}

/// Space form of curvature κ: flat chart for κ = 0, stereographic sphere
/// chart for κ > 0, Poincaré ball chart for κ < 0.
pub fn space_form(n: usize, kappa: f64) -> Result<CatalogueEntry> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            detail: format!("space form needs n ≥ 2, got {n}"),
        });
    }
    let chart = if kappa == 0.0 {
        crate::chart::euclidean_chart(n, 2.0)
    } else if kappa > 0.0 {
        let rho = 1.0 / kappa.sqrt();
        MetricChart::new(
            format!("sphere_stereo_{n}"),
            vec![(-0.8 * rho, 0.8 * rho); n],
            ConformalSpaceForm {
                dim: n,
                rho,
                positive: true,
            },
        )
    } else {
        let rho = 1.0 / (-kappa).sqrt();
        let w = 0.55 * rho / (n as f64).sqrt();
        MetricChart::new(
            format!("hyperbolic_ball_{n}"),
            vec![(-w, w); n],
            ConformalSpaceForm {
                dim: n,
                rho,
                positive: false,
            },
        )
    };
    Ok(CatalogueEntry {
        name: format!("space_form_{n}_{kappa}"),
        dim: n,
        chart: Some(chart),
        oracle: Some(Arc::new(ConstantCurvatureOracle { n, kappa })),
        homogeneous: true,
        noncompact: kappa <= 0.0,
        spec: ModelSpec::SpaceForm { n, kappa },
        frame_rule: FrameRule::GramSchmidt,
    })
}

/// Closed-form means of a space form: ((d−1)κ, κ) with the usual d-edge
/// absences.
pub fn space_form_means(n: usize, d: usize, kappa: f64) -> (Option<f64>, Option<f64>) {
    let intrinsic = (d >= 2).then_some((d as f64 - 1.0) * kappa);
    let normal = (d < n).then_some(kappa);
    (intrinsic, normal)
}

struct HeisenbergMetric;

impl SmoothMetric for HeisenbergMetric {
    fn dim(&self) -> usize {
        3
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        // dx² + dy² + (dz − x dy)²
        let one = S::one();
        let zero = S::zero();
        let xc = x[0];
        g[0] = one;
        g[1] = zero;
        g[2] = zero;
        g[3] = zero;
        g[4] = one + xc * xc;
        g[5] = -xc;
        g[6] = zero;
        g[7] = -xc;
        g[8] = one;
    }
}

/// Curvature with the given sectional values on distinguished coordinate
/// planes of an orthonormal frame, zero elsewhere.
fn diagonal_plane_tensor(n: usize, planes: &[(usize, usize, f64)]) -> AlgebraicCurvature {
    let mut r = AlgebraicCurvature::zeros_orthonormal(n);
    for &(i, j, k) in planes {
        r.set(i, j, i, j, k);
        r.set(j, i, j, i, k);
        r.set(i, j, j, i, -k);
        r.set(j, i, i, j, -k);
    }
    r
}

struct HeisenbergOracle;

impl CurvatureOracle for HeisenbergOracle {
    fn dim(&self) -> usize {
        3
    }
    fn curvature(&self, _point: &[f64]) -> AlgebraicCurvature {
        // K(X,Y) = −3/4, K(X,Z) = K(Y,Z) = 1/4 in the left-invariant frame.
        diagonal_plane_tensor(3, &[(0, 1, -0.75), (0, 2, 0.25), (1, 2, 0.25)])
    }
}

/// Heisenberg group chart dx² + dy² + (dz − x dy)² with the left-invariant
/// orthonormal frame X = ∂x, Y = ∂y + x∂z, Z = ∂z satisfying [X,Y] = Z.
pub fn heisenberg() -> CatalogueEntry {
    CatalogueEntry {
        name: "heisenberg".into(),
        dim: 3,
        chart: Some(MetricChart::new(
            "heisenberg",
            vec![(-2.0, 2.0); 3],
            HeisenbergMetric,
        )),
        oracle: Some(Arc::new(HeisenbergOracle)),
        homogeneous: true,
        noncompact: true,
        spec: ModelSpec::Heisenberg,
        frame_rule: FrameRule::Heisenberg,
    }
}

/// Heisenberg means for Π = span{X, Y}: (−3/4, 1/4).
pub fn heisenberg_xy_means() -> (f64, f64) {
    (-0.75, 0.25)
}

/// Fubini–Study curvature on R^{2n} with interleaved complex structure
/// J e_{2t} = e_{2t+1}, normalized to holomorphic sectional curvature 4.
pub struct CpnOracle {
    n_complex: usize,
}

impl CpnOracle {
    pub fn new(n_complex: usize) -> Self {
        CpnOracle { n_complex }
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n_complex
    }

    /// J as a matrix: column q holds J e_q.
    pub fn complex_structure(&self) -> DMatrix<f64> {
        let n = self.real_dim();
        let mut j = DMatrix::zeros(n, n);
        for t in 0..self.n_complex {
            j[(2 * t + 1, 2 * t)] = 1.0;
            j[(2 * t, 2 * t + 1)] = -1.0;
        }
        j
    }

    /// Kähler angle φ of span{u, v} for orthonormal u, v: cos φ = |⟨Ju, v⟩|.
    pub fn kaehler_angle(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let j = self.complex_structure();
        let c = (j * u).dot(v).abs().clamp(0.0, 1.0);
        c.acos()
    }

    /// Sectional curvature through the Kähler angle: K = 1 + 3cos²φ.
    pub fn sectional_from_angle(phi: f64) -> f64 {
        1.0 + 3.0 * phi.cos().powi(2)
    }
}

impl CurvatureOracle for CpnOracle {
    fn dim(&self) -> usize {
        self.real_dim()
    }
    fn curvature(&self, _point: &[f64]) -> AlgebraicCurvature {
        let n = self.real_dim();
        let jm = self.complex_structure();
        // Stored so that K(u,v) = R(u,v,u,v) reproduces 1 + 3cos²φ:
        // R[a,b,c,d] = δ_ac δ_bd − δ_ad δ_bc + J_ac J_bd − J_ad J_bc − 2 J_ab J_dc
        // with J_pq = ⟨J e_q, e_p⟩.
        AlgebraicCurvature::from_fn(n, DMatrix::identity(n, n), |a, b, c, d| {
            let del = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
            let j = |p: usize, q: usize| jm[(p, q)];
            del(a, c) * del(b, d) - del(a, d) * del(b, c) + j(c, a) * j(d, b)
                - j(d, a) * j(c, b)
                - 2.0 * j(b, a) * j(c, d)
        })
    }
}

/// ℂP^n as its algebraic curvature oracle (real dimension 2n); a chart is
/// attached only for n = 1, where ℂP¹ is the round sphere of curvature 4.
pub fn cpn_fubini_study(n: usize) -> Result<CatalogueEntry> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            detail: "cpn needs n ≥ 1".into(),
        });
    }
    let chart = if n == 1 {
        // K = 4 sphere: radius 1/2 stereographic chart.
        let rho = 0.5;
        Some(MetricChart::new(
            "cp1_round_sphere",
            vec![(-0.8 * rho, 0.8 * rho); 2],
            ConformalSpaceForm {
                dim: 2,
                rho,
                positive: true,
            },
        ))
    } else {
        None
    };
    Ok(CatalogueEntry {
        name: format!("cpn_{n}"),
        dim: 2 * n,
        chart,
        oracle: Some(Arc::new(CpnOracle::new(n))),
        homogeneous: true,
        noncompact: false,
        spec: ModelSpec::Cpn { n },
        frame_rule: FrameRule::GramSchmidt,
    })
}

/// Means of a complex k-plane in ℂP^n: (2(k+1), 1).
pub fn cpn_complex_plane_means(k: usize) -> (f64, f64) {
    (2.0 * (k as f64 + 1.0), 1.0)
}

/// Normal mean of a totally real d-plane in ℂP^n: 1 + 3/(2n−d).
pub fn cpn_totally_real_normal_mean(n: usize, d: usize) -> f64 {
    1.0 + 3.0 / (2 * n - d) as f64
}

/// Profile functions (r(u), z(u)) of a surface of revolution.
impl RevolutionKind {
    fn r_generic<S: Scalar>(&self, u: S) -> S {
        match self {
            RevolutionKind::Cylinder { radius } => S::from_f64(*radius),
            RevolutionKind::Sphere { radius } => {
                S::from_f64(*radius) * (u / S::from_f64(*radius)).sin()
            }
            RevolutionKind::Catenoid => u.cosh(),
        }
    }

    fn z_prime_generic<S: Scalar>(&self, u: S) -> S {
        match self {
            RevolutionKind::Cylinder { .. } => S::one(),
            RevolutionKind::Sphere { radius } => -(u / S::from_f64(*radius)).sin(),
            RevolutionKind::Catenoid => S::one(),
        }
    }

    /// (r, r′, r″, z′, z″) at u.
    fn jet(&self, u: f64) -> (f64, f64, f64, f64, f64) {
        match self {
            RevolutionKind::Cylinder { radius } => (*radius, 0.0, 0.0, 1.0, 0.0),
            RevolutionKind::Sphere { radius } => {
                let t = u / radius;
                (
                    radius * t.sin(),
                    t.cos(),
                    -t.sin() / radius,
                    -t.sin(),
                    -t.cos() / radius,
                )
            }
            RevolutionKind::Catenoid => (u.cosh(), u.sinh(), u.cosh(), 1.0, 0.0),
        }
    }

    /// Principal curvatures (κ₁ meridian, κ₂ parallel) at u, for the general
    /// (r(u), z(u)) parametrization; they reduce to z″/(1+z′²)^{3/2} and
    /// z′/(r√(1+z′²)) for graph profiles r(u) = u.
    pub fn principal_curvatures(&self, u: f64) -> (f64, f64) {
        let (r, rp, rpp, zp, zpp) = self.jet(u);
        let e = rp * rp + zp * zp;
        let k1 = (rp * zpp - rpp * zp) / e.powf(1.5);
        let k2 = zp / (r * e.sqrt());
        (k1, k2)
    }

    /// Gaussian curvature K = κ₁ κ₂.
    pub fn gauss_curvature(&self, u: f64) -> f64 {
        let (k1, k2) = self.principal_curvatures(u);
        k1 * k2
    }

    fn domain(&self) -> Vec<(f64, f64)> {
        match self {
            RevolutionKind::Cylinder { .. } => vec![(-2.0, 2.0), (-7.0, 7.0)],
            RevolutionKind::Sphere { radius } => {
                vec![(0.2 * radius, (std::f64::consts::PI - 0.2) * radius), (-7.0, 7.0)]
            }
            RevolutionKind::Catenoid => vec![(-1.5, 1.5), (-7.0, 7.0)],
        }
    }

    fn label(&self) -> &'static str {
        match self {
            RevolutionKind::Cylinder { .. } => "cylinder",
            RevolutionKind::Sphere { .. } => "sphere_of_revolution",
            RevolutionKind::Catenoid => "catenoid",
        }
    }
}

struct RevolutionMetric {
    kind: RevolutionKind,
}

impl SmoothMetric for RevolutionMetric {
    fn dim(&self) -> usize {
        2
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        // Induced metric: E = r′² + z′², F = 0, G = r².
        let u = x[0];
        let r = self.kind.r_generic(u);
        let zp = self.kind.z_prime_generic(u);
        let rp = match self.kind {
            RevolutionKind::Cylinder { .. } => S::zero(),
            RevolutionKind::Sphere { radius } => (u / S::from_f64(radius)).cos(),
            RevolutionKind::Catenoid => u.sinh(),
        };
        g[0] = rp * rp + zp * zp;
        g[1] = S::zero();
        g[2] = S::zero();
        g[3] = r * r;
    }
}

struct RevolutionOracle {
    kind: RevolutionKind,
}

impl CurvatureOracle for RevolutionOracle {
    fn dim(&self) -> usize {
        2
    }
    fn curvature(&self, point: &[f64]) -> AlgebraicCurvature {
        diagonal_plane_tensor(2, &[(0, 1, self.kind.gauss_curvature(point[0]))])
    }
}

pub fn surface_of_revolution(kind: RevolutionKind) -> Result<CatalogueEntry> {
    if let RevolutionKind::Cylinder { radius } | RevolutionKind::Sphere { radius } = kind {
        if radius <= 0.0 {
            return Err(Error::InvalidParameter {
                detail: "revolution radius must be positive".into(),
            });
        }
    }
    Ok(CatalogueEntry {
        name: kind.label().into(),
        dim: 2,
        chart: Some(MetricChart::new(
            kind.label(),
            kind.domain(),
            RevolutionMetric { kind },
        )),
        oracle: Some(Arc::new(RevolutionOracle { kind })),
        homogeneous: matches!(kind, RevolutionKind::Cylinder { .. }),
        noncompact: true,
        spec: ModelSpec::SurfaceOfRevolution { kind },
        frame_rule: FrameRule::GramSchmidt,
    })
}

struct ProductSpheresMetric {
    a: usize,
    rho_a: f64,
    b: usize,
    rho_b: f64,
}

impl SmoothMetric for ProductSpheresMetric {
    fn dim(&self) -> usize {
        self.a + self.b
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        let n = self.a + self.b;
        for v in g.iter_mut() {
            *v = S::zero();
        }
        let lam = |x: &[S], rho: f64| {
            let rho2 = S::from_f64(rho * rho);
            let mut r2 = S::zero();
            for &xi in x {
                r2 = r2 + xi * xi;
            }
            S::from_f64(4.0) * rho2 * rho2 / ((rho2 + r2) * (rho2 + r2))
        };
        let la = lam(&x[..self.a], self.rho_a);
        let lb = lam(&x[self.a..], self.rho_b);
        for i in 0..self.a {
            g[i * n + i] = la;
        }
        for i in self.a..n {
            g[i * n + i] = lb;
        }
    }
}

struct ProductSpheresOracle {
    a: usize,
    b: usize,
    kappa_a: f64,
    kappa_b: f64,
}

impl CurvatureOracle for ProductSpheresOracle {
    fn dim(&self) -> usize {
        self.a + self.b
    }
    fn curvature(&self, _point: &[f64]) -> AlgebraicCurvature {
        let (a, n) = (self.a, self.a + self.b);
        let (ka, kb) = (self.kappa_a, self.kappa_b);
        AlgebraicCurvature::from_fn(n, DMatrix::identity(n, n), |i, j, k, l| {
            let del = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
            let block = [i, j, k, l].iter().all(|&p| p < a);
            let fiber = [i, j, k, l].iter().all(|&p| p >= a);
            if block {
                ka * (del(i, k) * del(j, l) - del(i, l) * del(j, k))
            } else if fiber {
                kb * (del(i, k) * del(j, l) - del(i, l) * del(j, k))
            } else {
                0.0
            }
        })
    }
}

/// S^a(ρ_a) × S^b(ρ_b) with the product metric (block stereographic chart).
pub fn product_spheres(a: usize, rho_a: f64, b: usize, rho_b: f64) -> Result<CatalogueEntry> {
    if a < 1 || b < 1 || rho_a <= 0.0 || rho_b <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: "product spheres need a,b ≥ 1 and positive radii".into(),
        });
    }
    let n = a + b;
    let mut domain = vec![(-0.8 * rho_a, 0.8 * rho_a); a];
    domain.extend(vec![(-0.8 * rho_b, 0.8 * rho_b); b]);
    Ok(CatalogueEntry {
        name: format!("s{a}({rho_a})xs{b}({rho_b})"),
        dim: n,
        chart: Some(MetricChart::new(
            format!("product_spheres_{a}_{b}"),
            domain,
            ProductSpheresMetric { a, rho_a, b, rho_b },
        )),
        oracle: Some(Arc::new(ProductSpheresOracle {
            a,
            b,
            kappa_a: 1.0 / (rho_a * rho_a),
            kappa_b: 1.0 / (rho_b * rho_b),
        })),
        homogeneous: true,
        noncompact: false,
        spec: ModelSpec::ProductSpheres { a, rho_a, b, rho_b },
        frame_rule: FrameRule::GramSchmidt,
    })
}

/// Closed-form means of a split plane in a product of space forms:
/// Π = Π_A ⊕ Π_B with dim(Π_A) = d1, dim(Π_B) = d2.
pub fn product_split_means(
    a: usize,
    kappa_a: f64,
    b: usize,
    kappa_b: f64,
    d1: usize,
    d2: usize,
) -> (Option<f64>, Option<f64>) {
    let n = a + b;
    let d = d1 + d2;
    let intrinsic = (d >= 2).then(|| {
        ((d1 * d1.saturating_sub(1)) as f64 * kappa_a + (d2 * d2.saturating_sub(1)) as f64 * kappa_b)
            / d as f64
    });
    let normal = (d < n).then(|| {
        ((d1 * (a - d1)) as f64 * kappa_a + (d2 * (b - d2)) as f64 * kappa_b)
            / (d * (n - d)) as f64
    });
    (intrinsic, normal)
}

struct WarpedMetric {
    base_dim: usize,
    fiber: ConformalSpaceForm,
    warp: WarpSpec,
}

impl SmoothMetric for WarpedMetric {
    fn dim(&self) -> usize {
        self.base_dim + self.fiber.dim
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        let n = self.dim();
        let b = self.base_dim;
        let m = self.fiber.dim;
        for v in g.iter_mut() {
            *v = S::zero();
        }
        for i in 0..b {
            g[i * n + i] = S::one();
        }
        let f = self.warp.eval_generic(x[0]);
        let mut fiber_g = vec![S::zero(); m * m];
        self.fiber.eval(&x[b..], &mut fiber_g);
        for i in 0..m {
            for j in 0..m {
                g[(b + i) * n + (b + j)] = f * f * fiber_g[i * m + j];
            }
        }
    }
}

/// Stereographic / Poincaré fiber factor for κ ≠ 0 (κ = 0 fibers use the
/// dedicated flat-fiber metric below).
fn fiber_metric(dim: usize, kappa: f64) -> (ConformalSpaceForm, Vec<(f64, f64)>) {
    assert!(kappa != 0.0);
    if kappa > 0.0 {
        let rho = 1.0 / kappa.sqrt();
        (
            ConformalSpaceForm {
                dim,
                rho,
                positive: true,
            },
            vec![(-0.8 * rho, 0.8 * rho); dim],
        )
    } else {
        let rho = 1.0 / (-kappa).sqrt();
        let w = 0.55 * rho / (dim as f64).sqrt();
        (
            ConformalSpaceForm {
                dim,
                rho,
                positive: false,
            },
            vec![(-w, w); dim],
        )
    }
}

struct WarpedMetricFlatFiber {
    base_dim: usize,
    fiber_dim: usize,
    warp: WarpSpec,
}

impl SmoothMetric for WarpedMetricFlatFiber {
    fn dim(&self) -> usize {
        self.base_dim + self.fiber_dim
    }
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
        let n = self.dim();
        for v in g.iter_mut() {
            *v = S::zero();
        }
        for i in 0..self.base_dim {
            g[i * n + i] = S::one();
        }
        let f = self.warp.eval_generic(x[0]);
        for i in self.base_dim..n {
            g[i * n + i] = f * f;
        }
    }
}

/// Warped-product curvature in the adapted orthonormal frame over a flat box
/// base: fiber planes carry (κ_F − f′²)/f², mixed planes −Hess f/f (which is
/// −f″/f on the e₀ direction and 0 on the others), base planes are flat.
pub struct WarpedOracle {
    base_dim: usize,
    fiber_dim: usize,
    kappa_f: f64,
    warp: WarpSpec,
}

impl WarpedOracle {
    /// Sectional data at a base coordinate t = x₀.
    pub fn sectional_data(&self, t: f64) -> WarpedSectional {
        let (f, fp, fpp) = self.warp.jet(t);
        WarpedSectional {
            fiber_plane: (self.kappa_f - fp * fp) / (f * f),
            mixed_e0: -fpp / f,
            f,
            fp,
            fpp,
        }
    }
}

/// Closed-form sectional values of a warped product at a point.
#[derive(Clone, Copy, Debug)]
pub struct WarpedSectional {
    /// K(U, V) for fiber planes.
    pub fiber_plane: f64,
    /// K(e₀, U) for the warped base direction; other base directions give 0.
    pub mixed_e0: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
}

impl CurvatureOracle for WarpedOracle {
    fn dim(&self) -> usize {
        self.base_dim + self.fiber_dim
    }
    fn curvature(&self, point: &[f64]) -> AlgebraicCurvature {
        let b = self.base_dim;
        let n = b + self.fiber_dim;
        let s = self.sectional_data(point[0]);
        let cf = s.fiber_plane;
        // Hess f = diag(f″, 0, …, 0) on the flat base.
        let hess = |i: usize, j: usize| {
            if i == 0 && j == 0 {
                s.fpp
            } else {
                0.0
            }
        };
        AlgebraicCurvature::from_fn(n, DMatrix::identity(n, n), |i, j, k, l| {
            let del = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
            let is_f = |p: usize| p >= b;
            match (is_f(i), is_f(j), is_f(k), is_f(l)) {
                // Fiber block: space-form-like with (κ_F − f′²)/f².
                (true, true, true, true) => {
                    cf * (del(i, k) * del(j, l) - del(i, l) * del(j, k))
                }
                // Mixed blocks R[x, u, y, v] = −(Hess f(x,y)/f) δ_uv in all
                // index orders allowed by the symmetries.
                (false, true, false, true) => -hess(i, k) / s.f * del(j, l),
                (true, false, true, false) => -hess(j, l) / s.f * del(i, k),
                (false, true, true, false) => hess(i, l) / s.f * del(j, k),
                (true, false, false, true) => hess(j, k) / s.f * del(i, l),
                // Flat base block and three-one splits vanish.
                _ => 0.0,
            }
        })
    }
}

/// Warped product over a flat box base: g = g_B + f(x₀)² g_F with a
/// space-form fiber. The warp must be positive on the whole base interval.
pub fn warped_product(base_dim: usize, fiber: FiberSpec, warp: WarpSpec) -> Result<CatalogueEntry> {
    if base_dim < 1 || fiber.dim < 1 {
        return Err(Error::InvalidParameter {
            detail: "warped product needs base_dim ≥ 1 and fiber dim ≥ 1".into(),
        });
    }
    let n = base_dim + fiber.dim;
    // Base interval: keep sinh away from 0 so the warp stays positive.
    let base_interval = match warp {
        WarpSpec::Sinh => (0.3, 1.8),
        _ => (-1.0, 1.0),
    };
    let mut domain = vec![base_interval];
    domain.extend(vec![(-1.0, 1.0); base_dim - 1]);

    // Positivity scan of the warp over the base interval.
    for step in 0..=64 {
        let t = base_interval.0 + (base_interval.1 - base_interval.0) * step as f64 / 64.0;
        let (f, _, _) = warp.jet(t);
        if f <= 0.0 {
            return Err(Error::WarpNotPositive {
                value: f,
                point: vec![t],
            });
        }
    }

    let chart = if fiber.kappa == 0.0 {
        MetricChart::new(
            format!("warped_{base_dim}_{}", fiber.dim),
            {
                let mut d = domain.clone();
                d.extend(vec![(-1.0, 1.0); fiber.dim]);
                d
            },
            WarpedMetricFlatFiber {
                base_dim,
                fiber_dim: fiber.dim,
                warp: warp.clone(),
            },
        )
    } else {
        let (fiber_metric, fiber_domain) = fiber_metric(fiber.dim, fiber.kappa);
        MetricChart::new(
            format!("warped_{base_dim}_{}", fiber.dim),
            {
                let mut d = domain.clone();
                d.extend(fiber_domain);
                d
            },
            WarpedMetric {
                base_dim,
                fiber: fiber_metric,
                warp: warp.clone(),
            },
        )
    };

    Ok(CatalogueEntry {
        name: format!("warped_b{base_dim}_f{}k{}", fiber.dim, fiber.kappa),
        dim: n,
        chart: Some(chart),
        oracle: Some(Arc::new(WarpedOracle {
            base_dim,
            fiber_dim: fiber.dim,
            kappa_f: fiber.kappa,
            warp: warp.clone(),
        })),
        homogeneous: false,
        noncompact: true,
        spec: ModelSpec::WarpedProduct {
            base_dim,
            fiber,
            warp,
        },
        frame_rule: FrameRule::GramSchmidt,
    })
}

/// Closed-form warped-product means for a frame-axis split plane.
///
/// `base_axes` are the base frame directions in Π (indices < base_dim) and
/// `fiber_count` is dim(Π_F); the fiber choice does not matter by symmetry.
/// Covers cases (A) pure base, (B) pure fiber, (C) mixed 2-plane, and (D)
/// general splits, over a flat base.
pub fn warped_split_means(
    base_dim: usize,
    fiber_dim: usize,
    kappa_f: f64,
    warp: &WarpSpec,
    t: f64,
    base_axes: &[usize],
    fiber_count: usize,
) -> (Option<f64>, Option<f64>) {
    let (f, fp, fpp) = warp.jet(t);
    let b = base_dim;
    let m = fiber_dim;
    let n = b + m;
    let d1 = base_axes.len();
    let d2 = fiber_count;
    let d = d1 + d2;
    let cf = (kappa_f - fp * fp) / (f * f);
    // Hess f = diag(f″, 0, …); traces depend only on whether axis 0 ∈ Π_B.
    let tr_hess_plane = if base_axes.contains(&0) { fpp } else { 0.0 };
    let tr_hess_base_rest = fpp - tr_hess_plane;

    let intrinsic = (d >= 2).then(|| {
        // Base pairs are flat; fiber pairs carry cf; mixed pairs −Hess/f.
        let fiber_pairs = (d2 * d2.saturating_sub(1) / 2) as f64;
        let sum = fiber_pairs * cf - d2 as f64 / f * tr_hess_plane;
        2.0 / d as f64 * sum
    });
    let normal = (d < n).then(|| {
        let mixed_fiber = (d2 * (m - d2)) as f64 * cf;
        let base_to_fiber = -((m - d2) as f64) / f * tr_hess_plane;
        let fiber_to_base = -(d2 as f64) / f * tr_hess_base_rest;
        (mixed_fiber + base_to_fiber + fiber_to_base) / (d * (n - d)) as f64
    });
    (intrinsic, normal)
}

/// Names of the builtin catalogue models with example parameter shapes.
pub fn catalogue_listing() -> Vec<ModelSpec> {
    vec![
        ModelSpec::SpaceForm { n: 3, kappa: 1.0 },
        ModelSpec::Heisenberg,
        ModelSpec::Cpn { n: 2 },
        ModelSpec::SurfaceOfRevolution {
            kind: RevolutionKind::Catenoid,
        },
        ModelSpec::ProductSpheres {
            a: 2,
            rho_a: 1.0,
            b: 3,
            rho_b: 1.0,
        },
        ModelSpec::WarpedProduct {
            base_dim: 1,
            fiber: FiberSpec { dim: 2, kappa: 0.0 },
            warp: WarpSpec::Exp,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn heisenberg_frame_values() {
        let entry = heisenberg();
        let p = [0.0, 0.0, 0.0];
        // Chart metric at origin is the identity.
        let at = entry.chart.as_ref().unwrap().metric_at(&p).unwrap();
        assert!(linalg::identity_defect(&at.metric) < 1e-15);
        // Numeric chart curvature in the left-invariant frame reproduces the
        // oracle sectional values.
        let r = {
            let pc = entry.chart_curvature(&p).unwrap();
            let frame = entry.frame_at(&p).unwrap();
            pc.riemann.change_basis(&frame)
        };
        assert_relative_eq!(r.frame_sectional(0, 1), -0.75, epsilon = 1e-10);
        assert_relative_eq!(r.frame_sectional(0, 2), 0.25, epsilon = 1e-10);
        assert_relative_eq!(r.frame_sectional(1, 2), 0.25, epsilon = 1e-10);
    }

    #[test]
    fn heisenberg_homogeneity() {
        // Left-invariant frame values are point-independent: 20 random points.
        use rand::{Rng, SeedableRng};
        let entry = heisenberg();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let p: Vec<f64> = (0..3).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            let pc = entry.chart_curvature(&p).unwrap();
            let frame = entry.frame_at(&p).unwrap();
            let r = pc.riemann.change_basis(&frame);
            assert_relative_eq!(r.frame_sectional(0, 1), -0.75, epsilon = 1e-9);
            assert_relative_eq!(r.frame_sectional(0, 2), 0.25, epsilon = 1e-9);
            assert_relative_eq!(r.frame_sectional(1, 2), 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn space_form_chart_matches_oracle() {
        for &(n, kappa) in &[(3usize, 1.0), (3, -1.0), (4, 1.0)] {
            let entry = space_form(n, kappa).unwrap();
            let p = vec![0.11; n];
            let r = entry.chart_curvature(&p).unwrap().riemann;
            let u = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.2 });
            let v = DVector::from_fn(n, |i, _| if i == 1 { 1.0 } else { -0.1 });
            assert_relative_eq!(r.sectional(&u, &v).unwrap(), kappa, epsilon = 1e-9);
        }
    }

    #[test]
    fn cpn_kaehler_angle_formula() {
        let oracle = CpnOracle::new(2);
        let r = oracle.curvature(&[]);
        let n = oracle.real_dim();
        // Holomorphic plane span{e₀, Je₀ = e₁}: K = 4.
        let e0 = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let e1 = DVector::from_fn(n, |i, _| if i == 1 { 1.0 } else { 0.0 });
        assert_relative_eq!(r.sectional(&e0, &e1).unwrap(), 4.0, epsilon = 1e-14);
        // Totally real plane span{e₀, e₂}: K = 1.
        let e2 = DVector::from_fn(n, |i, _| if i == 2 { 1.0 } else { 0.0 });
        assert_relative_eq!(r.sectional(&e0, &e2).unwrap(), 1.0, epsilon = 1e-14);
        // Interpolating plane: K = 1 + 3cos²φ.
        for &t in &[0.3, 0.7, 1.2] {
            let v = &e1 * t.cos() + &e2 * t.sin();
            let k = r.sectional(&e0, &v).unwrap();
            let phi = oracle.kaehler_angle(&e0, &v);
            assert_relative_eq!(k, CpnOracle::sectional_from_angle(phi), epsilon = 1e-12);
            assert_relative_eq!(k, 1.0 + 3.0 * t.cos() * t.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn cpn_ricci_is_einstein() {
        for n in 2..=3 {
            let oracle = CpnOracle::new(n);
            let r = oracle.curvature(&[]);
            let ric = r.ricci();
            let expected = 2.0 * (n as f64 + 1.0);
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let target = if i == j { expected } else { 0.0 };
                    assert!((ric[(i, j)] - target).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cpn_j_invariance() {
        let oracle = CpnOracle::new(2);
        let r = oracle.curvature(&[]);
        let j = oracle.complex_structure();
        let n = oracle.real_dim();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rv = |rng: &mut rand_chacha::ChaCha8Rng| {
                DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5)
            };
            let (x, y, z, w) = (rv(&mut rng), rv(&mut rng), rv(&mut rng), rv(&mut rng));
            let lhs = r.eval(&(&j * &x), &(&j * &y), &(&j * &z), &(&j * &w));
            let rhs = r.eval(&x, &y, &z, &w);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn cp1_chart_is_round_sphere_of_curvature_four() {
        let entry = cpn_fubini_study(1).unwrap();
        let r = entry.chart_curvature(&[0.1, -0.2]).unwrap();
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 1.0]);
        assert_relative_eq!(r.sectional(&u, &v).unwrap(), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn revolution_gauss_curvatures() {
        let cyl = RevolutionKind::Cylinder { radius: 1.3 };
        assert_relative_eq!(cyl.gauss_curvature(0.5), 0.0, epsilon = 1e-15);
        let sph = RevolutionKind::Sphere { radius: 2.0 };
        assert_relative_eq!(sph.gauss_curvature(1.9), 0.25, epsilon = 1e-13);
        let cat = RevolutionKind::Catenoid;
        for &u in &[0.0, 0.8] {
            assert_relative_eq!(
                cat.gauss_curvature(u),
                -1.0 / u.cosh().powi(4),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn revolution_chart_matches_oracle() {
        for kind in [
            RevolutionKind::Cylinder { radius: 1.3 },
            RevolutionKind::Sphere { radius: 1.0 },
            RevolutionKind::Catenoid,
        ] {
            let entry = surface_of_revolution(kind).unwrap();
            let p = entry.default_point();
            let pc = entry.chart_curvature(&p).unwrap();
            let u = DVector::from_vec(vec![1.0, 0.0]);
            let v = DVector::from_vec(vec![0.0, 1.0]);
            let k_chart = pc.sectional(&u, &v).unwrap();
            let k_oracle = kind.gauss_curvature(p[0]);
            assert_relative_eq!(k_chart, k_oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn product_mixed_planes_are_flat() {
        let entry = product_spheres(2, 1.0, 3, 1.0).unwrap();
        let p = entry.default_point();
        let pc = entry.chart_curvature(&p).unwrap();
        // Mixed plane: one direction in each factor.
        let u = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(pc.sectional(&u, &v).unwrap(), 0.0, epsilon = 1e-10);
        // Factor planes carry the factor curvature.
        let w = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(pc.sectional(&u, &w).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn product_oracle_matches_chart_at_random_point() {
        let entry = product_spheres(2, 1.0, 2, 2.0).unwrap();
        let p = vec![0.2, -0.3, 0.15, 0.4];
        let chart_r = entry.chart_curvature(&p).unwrap().riemann;
        let frame = entry.frame_at(&p).unwrap();
        let chart_in_frame = chart_r.change_basis(&frame);
        let oracle_r = entry.oracle_curvature(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = chart_in_frame.frame_sectional(i, j);
                let b = oracle_r.frame_sectional(i, j);
                if i != j {
                    assert_relative_eq!(a, b, epsilon = 1e-9);
                }
            }
        }
        // Oracle mixed planes are exactly flat.
        for i in 0..2 {
            for j in 2..4 {
                assert!(oracle_r.frame_sectional(i, j).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn warped_constant_warp_reduces_to_product() {
        let entry = warped_product(
            1,
            FiberSpec { dim: 2, kappa: 1.0 },
            WarpSpec::Constant { value: 1.0 },
        )
        .unwrap();
        let p = entry.default_point();
        let r = entry.oracle_curvature(&p).unwrap();
        // Mixed planes flat, fiber plane carries κ_F.
        assert_relative_eq!(r.frame_sectional(0, 1), 0.0, epsilon = 1e-14);
        assert_relative_eq!(r.frame_sectional(1, 2), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn warped_hyperbolic_models() {
        // Horospherical model: R ×_{e^t} E² has all sectional curvature −1.
        let horo = warped_product(1, FiberSpec { dim: 2, kappa: 0.0 }, WarpSpec::Exp).unwrap();
        let p = vec![0.3, 0.1, -0.2];
        let pc = horo.chart_curvature(&p).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut u = DVector::zeros(3);
            u[i] = 1.0;
            let mut v = DVector::zeros(3);
            v[j] = 1.0;
            assert_relative_eq!(pc.sectional(&u, &v).unwrap(), -1.0, epsilon = 1e-8);
        }
        // Polar model: (0,∞) ×_{sinh t} S² has all sectional curvature −1.
        let polar = warped_product(1, FiberSpec { dim: 2, kappa: 1.0 }, WarpSpec::Sinh).unwrap();
        let p = vec![0.9, 0.05, -0.1];
        let pc = polar.chart_curvature(&p).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut u = DVector::zeros(3);
            u[i] = 1.0;
            let mut v = DVector::zeros(3);
            v[j] = 1.0;
            assert_relative_eq!(pc.sectional(&u, &v).unwrap(), -1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn warped_oracle_matches_chart() {
        let entry = warped_product(
            2,
            FiberSpec { dim: 2, kappa: 1.0 },
            WarpSpec::Poly {
                coeffs: vec![1.5, 0.3, -0.2, 0.05],
            },
        )
        .unwrap();
        let p = vec![0.4, -0.2, 0.1, 0.3];
        let chart_r = entry.chart_curvature(&p).unwrap().riemann;
        let frame = entry.frame_at(&p).unwrap();
        let chart_in_frame = chart_r.change_basis(&frame);
        let oracle_r = entry.oracle_curvature(&p).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_relative_eq!(
                    chart_in_frame.frame_sectional(i, j),
                    oracle_r.frame_sectional(i, j),
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn warp_positivity_is_enforced() {
        let err = warped_product(
            1,
            FiberSpec { dim: 2, kappa: 0.0 },
            WarpSpec::Poly {
                coeffs: vec![0.1, -1.0],
            },
        )
        .unwrap_err();
        assert_eq!(err.code(), "warp_not_positive");
    }

    #[test]
    fn model_spec_round_trips_via_json() {
        for spec in catalogue_listing() {
            let s = serde_json::to_string(&spec).unwrap();
            let back: ModelSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(spec, back);
            CatalogueEntry::from_spec(&spec).unwrap();
        }
    }
}
