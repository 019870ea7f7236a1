//! The full verification suite: every invariant and cross-path consistency
//! check, run over the standard catalogue, with per-check residuals.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalogue::{
    self, heisenberg, product_spheres, space_form, surface_of_revolution, warped_product,
    CatalogueEntry, FiberSpec, RevolutionKind, WarpSpec,
};
use crate::chart::MetricChart;
use crate::curvature::riemann_at;
use crate::error::Result;
use crate::expansion::{self, VolumeQuadrature};
use crate::fd;
use crate::frame::SubspaceFrame;
use crate::geodesic;
use crate::kappa::{self, KappaConfig};
use crate::linalg;
use crate::means;
use crate::weitzenboeck;

/// One named check with its worst residual and tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub manifold: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub tol_scale: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplies every tolerance (reproducible acceptance runs override it).
    pub tol_scale: f64,
    pub triple_equality_draws: usize,
    pub points_per_chart: usize,
    pub planes_per_entry: usize,
    pub include_expansions: bool,
    pub include_kappa: bool,
    /// Restrict to these models (per-entry checks only); `None` runs the
    /// whole standard catalogue plus the cross-catalogue checks.
    pub entries: Option<Vec<catalogue::ModelSpec>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: crate::DEFAULT_SEED,
            tol_scale: 1.0,
            triple_equality_draws: 300,
            points_per_chart: 100,
            planes_per_entry: 100,
            include_expansions: true,
            include_kappa: true,
            entries: None,
        }
    }
}

/// The standard verification catalogue.
pub fn default_entries() -> Vec<CatalogueEntry> {
    let mut out = vec![
        space_form(3, 1.0).unwrap(),
        space_form(3, 0.0).unwrap(),
        space_form(3, -1.0).unwrap(),
        space_form(4, 1.0).unwrap(),
        space_form(5, -1.0).unwrap(),
        space_form(6, 1.0).unwrap(),
        heisenberg(),
        catalogue::cpn_fubini_study(1).unwrap(),
        catalogue::cpn_fubini_study(2).unwrap(),
        catalogue::cpn_fubini_study(3).unwrap(),
        surface_of_revolution(RevolutionKind::Cylinder { radius: 1.0 }).unwrap(),
        surface_of_revolution(RevolutionKind::Sphere { radius: 1.0 }).unwrap(),
        surface_of_revolution(RevolutionKind::Catenoid).unwrap(),
        product_spheres(2, 1.0, 3, 1.0).unwrap(),
        warped_product(1, FiberSpec { dim: 2, kappa: 0.0 }, WarpSpec::Exp).unwrap(),
        warped_product(1, FiberSpec { dim: 2, kappa: 1.0 }, WarpSpec::Sinh).unwrap(),
    ];
    out.push(
        warped_product(
            2,
            FiberSpec { dim: 2, kappa: 1.0 },
            WarpSpec::Poly {
                coeffs: vec![1.5, 0.3, -0.2, 0.05],
            },
        )
        .unwrap(),
    );
    out
}

struct Ctx {
    rng: ChaCha8Rng,
    checks: Vec<CheckResult>,
    tol_scale: f64,
}

impl Ctx {
    fn record(&mut self, name: &str, manifold: &str, residual: f64, tolerance: f64) {
        let tolerance = tolerance * self.tol_scale;
        self.checks.push(CheckResult {
            name: name.to_string(),
            manifold: manifold.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance && residual.is_finite(),
        });
    }

    fn random_in_domain(&mut self, chart: &MetricChart) -> Vec<f64> {
        chart
            .domain()
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * (0.05 + 0.9 * self.rng.random::<f64>()))
            .collect()
    }

    fn gaussian(&mut self) -> f64 {
        let u1: f64 = self.rng.random::<f64>().max(1e-16);
        let u2: f64 = self.rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn random_vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.gaussian())
    }

    fn random_orthogonal(&mut self, d: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(d, d, |_, _| self.gaussian());
        let qr = m.qr();
        qr.q()
    }

    /// Random g-orthonormal subspace frame at a point.
    fn random_frame(
        &mut self,
        point: &[f64],
        metric: DMatrix<f64>,
        d: usize,
    ) -> Result<SubspaceFrame> {
        let n = metric.nrows();
        loop {
            let spanners: Vec<DVector<f64>> = (0..d).map(|_| self.random_vector(n)).collect();
            match SubspaceFrame::build(point.to_vec(), metric.clone(), &spanners) {
                Ok(f) => return Ok(f),
                Err(crate::Error::DegenerateSpan { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
}

fn chart_points(ctx: &mut Ctx, entry: &CatalogueEntry, count: usize) -> Vec<Vec<f64>> {
    match &entry.chart {
        Some(chart) => (0..count).map(|_| ctx.random_in_domain(chart)).collect(),
        None => vec![entry.default_point()],
    }
}

/// Algebraic symmetries, Christoffel symmetry, and trace consistency on
/// random in-domain points of every chart entry.
fn check_tensor_symmetries(ctx: &mut Ctx, entry: &CatalogueEntry, points: usize) -> Result<()> {
    let Some(chart) = &entry.chart else {
        // Oracle-only entries: check the oracle tensor symmetries instead.
        let r = entry.oracle_curvature(&entry.default_point())?;
        ctx.record(
            "tensor_symmetries",
            &entry.name,
            r.symmetry_defects().max(),
            1e-10,
        );
        return Ok(());
    };
    let mut worst_sym = 0.0f64;
    let mut worst_gamma = 0.0f64;
    let mut worst_trace = 0.0f64;
    for _ in 0..points {
        let p = ctx.random_in_domain(chart);
        let pc = riemann_at(chart, &p)?;
        worst_sym = worst_sym.max(pc.riemann.symmetry_defects().max());
        worst_gamma = worst_gamma.max(pc.christoffel.symmetry_defect());
        let ric = pc.riemann.ricci();
        worst_trace = worst_trace.max(linalg::max_abs(&(&ric - &pc.ricci)));
        worst_trace = worst_trace.max((pc.riemann.scalar() - pc.scalar).abs());
    }
    ctx.record("tensor_symmetries", &entry.name, worst_sym, 1e-10);
    ctx.record("christoffel_symmetry", &entry.name, worst_gamma, 1e-12);
    ctx.record("trace_consistency", &entry.name, worst_trace, 1e-10);
    Ok(())
}

/// Dual-number derivatives against 4th-order central differences.
fn check_ad_vs_fd(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    let Some(chart) = &entry.chart else {
        return Ok(());
    };
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let p = ctx.random_in_domain(chart);
        let ad = riemann_at(chart, &p)?;
        let fd_gamma = fd::fd_christoffel(chart, &p, 1e-4)?;
        let fd_r = fd::fd_riemann(chart, &p, 1e-4)?;
        let n = chart.dim();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let a = ad.christoffel.get(k, i, j);
                    let b = fd_gamma.get(k, i, j);
                    worst = worst.max((a - b).abs() / a.abs().max(1.0));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let a = ad.riemann.at(i, j, k, l);
                        let b = fd_r.at(i, j, k, l);
                        worst = worst.max((a - b).abs() / a.abs().max(1.0));
                    }
                }
            }
        }
    }
    ctx.record("autodiff_vs_fd", &entry.name, worst, 1e-6);
    Ok(())
}

/// Invariance of sectional curvature under GL(2) reparametrization.
fn check_sectional_invariance(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    let p = entry.default_point();
    let r = entry.curvature_in_frame(&p)?;
    let n = r.dim();
    let mut worst = 0.0f64;
    // Orthonormal base pair keeps every reparametrization well conditioned.
    let frame = ctx.random_frame(&p, DMatrix::identity(n, n), 2)?;
    let (u, v) = (frame.plane()[0].clone(), frame.plane()[1].clone());
    let k0 = r.sectional(&u, &v)?;
    let mut done = 0;
    while done < 100 {
        let (a, b, c, d) = (
            ctx.gaussian(),
            ctx.gaussian(),
            ctx.gaussian(),
            ctx.gaussian(),
        );
        if (a * d - b * c).abs() < 0.3 {
            continue;
        }
        let u2 = (&u * a + &v * b).normalize();
        let v2 = (&u * c + &v * d).normalize();
        if let Ok(k) = r.sectional(&u2, &v2) {
            worst = worst.max((k - k0).abs());
            done += 1;
        }
    }
    ctx.record("sectional_gl2_invariance", &entry.name, worst, 1e-10);
    Ok(())
}

/// Chart curvature against the closed-form oracle on random planes.
fn check_chart_oracle_agreement(
    ctx: &mut Ctx,
    entry: &CatalogueEntry,
    planes: usize,
) -> Result<()> {
    let (Some(chart), Some(_)) = (&entry.chart, &entry.oracle) else {
        return Ok(());
    };
    let mut worst = 0.0f64;
    for _ in 0..planes {
        let p = ctx.random_in_domain(chart);
        let pc = riemann_at(chart, &p)?;
        let frame = entry.frame_at(&p)?;
        let oracle = entry.oracle_curvature(&p)?;
        let n = entry.dim;
        let xi1 = ctx.random_vector(n);
        let xi2 = ctx.random_vector(n);
        let (u, v) = (&frame * &xi1, &frame * &xi2);
        match (pc.riemann.sectional(&u, &v), oracle.sectional(&xi1, &xi2)) {
            (Ok(kc), Ok(ko)) => worst = worst.max((kc - ko).abs()),
            _ => continue,
        }
    }
    ctx.record("chart_oracle_agreement", &entry.name, worst, 1e-8);
    Ok(())
}

/// Direct sectional sums against the curvature-operator trace dictionary,
/// plus basis independence, complementarity, and the reduction identities.
fn check_mean_family(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    let p = entry.default_point();
    let r = entry.curvature_in_frame(&p)?;
    let n = r.dim();
    let identity = DMatrix::identity(n, n);

    let mut worst_trace = 0.0f64;
    let mut worst_basis = 0.0f64;
    let mut worst_comp = 0.0f64;
    let mut worst_reduction = 0.0f64;

    for d in 1..=n {
        let frame = ctx.random_frame(&p, identity.clone(), d)?;
        let direct = means::mean_ricci(&r, &frame)?;
        let traced = means::mean_ricci_via_traces(&r, &frame)?;
        worst_trace = worst_trace
            .max((direct.intrinsic_sum - traced.intrinsic_sum).abs())
            .max((direct.mixed_sum - traced.mixed_sum).abs());

        // Random orthogonal remixes of the plane basis and, independently,
        // of the normal basis (100 each at a representative degree).
        let remixes = if d == 2.min(n) { 100 } else { 10 };
        for _ in 0..remixes {
            let q = ctx.random_orthogonal(d);
            let m = means::mean_ricci(&r, &frame.remix_plane(&q))?;
            worst_basis = worst_basis
                .max((m.intrinsic_sum - direct.intrinsic_sum).abs())
                .max((m.mixed_sum - direct.mixed_sum).abs());
            if d < n {
                let qn = ctx.random_orthogonal(n - d);
                let m = means::mean_ricci(&r, &frame.remix_normal(&qn))?;
                worst_basis = worst_basis
                    .max((m.intrinsic_sum - direct.intrinsic_sum).abs())
                    .max((m.mixed_sum - direct.mixed_sum).abs());
            }
        }

        if d < n {
            let comp = means::mean_ricci(&r, &frame.complement())?;
            worst_comp = worst_comp.max((comp.mixed_sum - direct.mixed_sum).abs());
        }

        // Reduction identities of the dimensional stratification.
        if d == 2 {
            let k = r.sectional(&frame.plane()[0].clone(), &frame.plane()[1].clone())?;
            worst_reduction = worst_reduction.max((direct.intrinsic_mean.unwrap() - k).abs());
        }
        if d == 1 {
            let u = frame.plane()[0].clone();
            let ric = r.ricci();
            let ric_uu = (u.transpose() * &ric * &u)[(0, 0)];
            worst_reduction = worst_reduction
                .max((direct.normal_mean.unwrap() * (n as f64 - 1.0) - ric_uu).abs());
        }
        if d == n {
            worst_reduction = worst_reduction
                .max((direct.intrinsic_mean.unwrap() * n as f64 - r.scalar()).abs());
        }
    }
    ctx.record("trace_dictionary", &entry.name, worst_trace, 1e-10);
    ctx.record("basis_independence", &entry.name, worst_basis, 1e-9);
    ctx.record("complementarity", &entry.name, worst_comp, 1e-10);
    ctx.record("reduction_identities", &entry.name, worst_reduction, 1e-10);
    Ok(())
}

/// Self-adjointness of 𝓡_d, the d = 1 Ricci reduction, and the space-form
/// Hodge-duality spectrum check.
fn check_weitzenboeck_family(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    if entry.dim > 8 {
        return Ok(());
    }
    let p = entry.default_point();
    let r = entry.curvature_in_frame(&p)?;
    let n = r.dim();
    let mut worst_sym = 0.0f64;
    for d in 1..=n {
        let w = weitzenboeck::weitz_matrix(&r, d)?;
        worst_sym = worst_sym.max(w.symmetry_defect());
    }
    ctx.record("weitz_selfadjoint", &entry.name, worst_sym, 1e-10);

    let w1 = weitzenboeck::weitz_matrix(&r, 1)?;
    let d1_defect = linalg::max_abs(&(w1.entries() - r.ricci()));
    ctx.record("weitz_d1_is_ricci", &entry.name, d1_defect, 1e-10);

    if let catalogue::ModelSpec::SpaceForm { n, kappa } = entry.spec {
        let mut worst = 0.0f64;
        for d in 1..n {
            let wd = weitzenboeck::weitz_matrix(&r, d)?;
            let wnd = weitzenboeck::weitz_matrix(&r, n - d)?;
            let expected = (d * (n - d)) as f64 * kappa;
            worst = worst
                .max((wd.entries()[(0, 0)] - expected).abs())
                .max((wnd.entries()[(0, 0)] - expected).abs());
        }
        ctx.record("hodge_duality_spectrum", &entry.name, worst, 1e-8);
    }
    Ok(())
}

/// The simple-vector pairing computed three ways on random draws: the
/// endomorphism pairing, the mixed sectional sum, and ΣRic − 2ΣK.
fn check_triple_equality(ctx: &mut Ctx, entry: &CatalogueEntry, draws: usize) -> Result<()> {
    let n = entry.dim;
    let identity = DMatrix::identity(n, n);
    let mut worst = 0.0f64;
    let points = chart_points(ctx, entry, 4.max(draws / 8));
    let mut count = 0;
    'outer: for p in &points {
        let r = entry.curvature_in_frame(p)?;
        let ric = r.ricci();
        for _ in 0..8 {
            if count >= draws {
                break 'outer;
            }
            let d = 1 + (ctx.rng.random::<u32>() as usize) % n;
            let frame = ctx.random_frame(p, identity.clone(), d)?;
            let w = weitzenboeck::weitz_matrix(&r, d)?;
            let plane: Vec<DVector<f64>> = frame.plane().to_vec();
            let pairing = weitzenboeck::pair_simple(&w, &plane)?;
            let m = means::mean_ricci(&r, &frame)?;
            // Route 2: mixed sectional sum = d(n−d)·normal mean.
            worst = worst.max((pairing - m.mixed_sum).abs());
            // Route 3: Σ Ric(e_i,e_i) − 2 Σ_{i<j} K(e_i,e_j).
            let mut ric_sum = 0.0;
            for e in frame.plane() {
                ric_sum += (e.transpose() * &ric * e)[(0, 0)];
            }
            worst = worst.max((pairing - (ric_sum - 2.0 * m.intrinsic_sum)).abs());
            count += 1;
        }
    }
    ctx.record("triple_equality", &entry.name, worst, 1e-8);
    Ok(())
}

/// Bochner bivector identity on random orthonormal pairs.
fn check_bochner_bivector(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    let p = entry.default_point();
    let r = entry.curvature_in_frame(&p)?;
    let n = r.dim();
    let identity = DMatrix::identity(n, n);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let frame = ctx.random_frame(&p, identity.clone(), 2)?;
        let b = weitzenboeck::bochner_bivector(&r, &frame.plane()[0], &frame.plane()[1])?;
        worst = worst.max(b.max_spread());
    }
    ctx.record("bochner_bivector", &entry.name, worst, 1e-10);
    Ok(())
}

/// J(t) = tI − (t³/6)A(0) + O(t⁵) at t = 1e−2, against direct curvature.
fn check_jacobi_small_t(ctx: &mut Ctx, entry: &CatalogueEntry) -> Result<()> {
    let Some(chart) = &entry.chart else {
        return Ok(());
    };
    let n = chart.dim();
    let p = entry.default_point();
    let at = chart.metric_at(&p)?;
    let u_raw = ctx.random_vector(n);
    let u_norm = linalg::norm(&at.metric, &u_raw);
    let u = u_raw / u_norm;
    let t = 1e-2;
    let block = geodesic::jacobi_transport(chart, &p, u.as_slice(), t, 1e-13)?;

    let pc = riemann_at(chart, &p)?;
    let sub = SubspaceFrame::build(p.clone(), at.metric.clone(), std::slice::from_ref(&u))?;
    let mut cols = sub.normal().to_vec();
    cols.push(sub.plane()[0].clone());
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let a0 = pc.riemann.eval(&cols[b], &cols[n - 1], &cols[a], &cols[n - 1]);
            let expected = if a == b { t } else { 0.0 } - t * t * t / 6.0 * a0;
            worst = worst.max((block.j[(a, b)] - expected).abs());
        }
    }
    ctx.record("jacobi_small_t", &entry.name, worst, 1e-6);
    Ok(())
}

/// Volume-expansion fits on the low-dimensional entries.
fn check_expansions(ctx: &mut Ctx) -> Result<()> {
    let radii = expansion::default_radii();
    let quad = VolumeQuadrature {
        seed: ctx.rng.random(),
        ..VolumeQuadrature::default()
    };
    let tol = expansion::default_tol();

    let volume_entries = vec![
        space_form(3, 0.0).unwrap(),
        space_form(3, 1.0).unwrap(),
        space_form(3, -1.0).unwrap(),
        heisenberg(),
    ];
    for entry in &volume_entries {
        let chart = entry.chart.as_ref().unwrap();
        let p = entry.default_point();
        let fit = expansion::sphere_volume_coeff(chart, &p, &quad, &radii, tol)?;
        ctx.record(
            "expansion_sphere_volume",
            &entry.name,
            fit.c2_error().unwrap(),
            1e-3,
        );

        let at = chart.metric_at(&p)?;
        let u_raw = ctx.random_vector(entry.dim);
        let u = &u_raw / linalg::norm(&at.metric, &u_raw);
        let fit = expansion::radial_density_coeff(chart, &p, &u, &radii, tol)?;
        ctx.record(
            "expansion_radial_density",
            &entry.name,
            fit.c2_error().unwrap(),
            1e-3,
        );

        // Intrinsic and normal pattern densities of a random 2-plane.
        let frame = ctx.random_frame(&p, at.metric.clone(), 2)?;
        let v = frame.plane()[0].clone();
        let fit = expansion::plane_density_coeff(chart, &p, &frame, &v, &radii, tol)?;
        ctx.record(
            "expansion_plane_density",
            &entry.name,
            fit.c2_error().unwrap(),
            2e-3,
        );
        let fit = expansion::normal_density_coeff(chart, &p, &frame, &v, &radii, tol)?;
        ctx.record(
            "expansion_normal_density",
            &entry.name,
            fit.c2_error().unwrap(),
            2e-3,
        );
    }

    for kind in [
        RevolutionKind::Cylinder { radius: 1.0 },
        RevolutionKind::Sphere { radius: 1.0 },
        RevolutionKind::Catenoid,
    ] {
        let entry = surface_of_revolution(kind).unwrap();
        let chart = entry.chart.as_ref().unwrap();
        let p = entry.default_point();
        let fit = expansion::bdp_circumference(chart, &p, &quad, &radii, tol)?;
        ctx.record(
            "expansion_bdp_circumference",
            &entry.name,
            fit.c2_error().unwrap(),
            1e-3,
        );
    }
    Ok(())
}

/// Closed-form catalogue means against the numeric pipeline.
fn check_oracle_means(ctx: &mut Ctx) -> Result<()> {
    // Space forms: ((d−1)κ, κ).
    for &(n, kappa) in &[(3usize, 1.0), (4, -1.0), (5, 1.0)] {
        let entry = space_form(n, kappa).unwrap();
        let p = entry.default_point();
        let r = entry.curvature_in_frame(&p)?;
        let mut worst = 0.0f64;
        for d in 1..=n {
            let frame = ctx.random_frame(&p, DMatrix::identity(n, n), d)?;
            let m = means::mean_ricci(&r, &frame)?;
            let (ei, en) = catalogue::space_form_means(n, d, kappa);
            if let (Some(a), Some(b)) = (m.intrinsic_mean, ei) {
                worst = worst.max((a - b).abs());
            }
            if let (Some(a), Some(b)) = (m.normal_mean, en) {
                worst = worst.max((a - b).abs());
            }
        }
        ctx.record("oracle_means", &entry.name, worst, 1e-9);
    }

    // Heisenberg Π = span{X, Y}.
    let entry = heisenberg();
    let p = entry.default_point();
    let pc = entry.chart_curvature(&p)?;
    let frame_basis = entry.frame_at(&p)?;
    let frame =
        SubspaceFrame::from_frame_columns(p.clone(), pc.metric.clone(), &frame_basis, &[0, 1])?;
    let m = means::mean_ricci(&pc.riemann, &frame)?;
    let (ei, en) = catalogue::heisenberg_xy_means();
    let worst = (m.intrinsic_mean.unwrap() - ei)
        .abs()
        .max((m.normal_mean.unwrap() - en).abs());
    ctx.record("oracle_means", "heisenberg", worst, 1e-9);

    // ℂP^n complex k-planes and totally real planes.
    for n in 2..=3 {
        let entry = catalogue::cpn_fubini_study(n).unwrap();
        let r = entry.oracle_curvature(&entry.default_point())?;
        let nn = 2 * n;
        let identity = DMatrix::identity(nn, nn);
        let mut worst = 0.0f64;
        for k in 1..n {
            let axes: Vec<usize> = (0..2 * k).collect();
            let frame = SubspaceFrame::from_frame_columns(
                vec![0.0; nn],
                identity.clone(),
                &DMatrix::identity(nn, nn),
                &axes,
            )?;
            let m = means::mean_ricci(&r, &frame)?;
            let (ei, en) = catalogue::cpn_complex_plane_means(k);
            worst = worst
                .max((m.intrinsic_mean.unwrap() - ei).abs())
                .max((m.normal_mean.unwrap() - en).abs());
        }
        for d in 1..=n {
            // Totally real plane: even-index axes e₀, e₂, e₄, …
            let axes: Vec<usize> = (0..d).map(|i| 2 * i).collect();
            let frame = SubspaceFrame::from_frame_columns(
                vec![0.0; nn],
                identity.clone(),
                &DMatrix::identity(nn, nn),
                &axes,
            )?;
            let m = means::mean_ricci(&r, &frame)?;
            let en = catalogue::cpn_totally_real_normal_mean(n, d);
            worst = worst.max((m.normal_mean.unwrap() - en).abs());
            if d >= 2 {
                worst = worst.max((m.intrinsic_mean.unwrap() - (d as f64 - 1.0)).abs());
            }
        }
        ctx.record("oracle_means", &entry.name, worst, 1e-12);
    }

    // Product of spheres: split-plane formulas on the numeric chart.
    let entry = product_spheres(2, 1.0, 3, 1.0).unwrap();
    let chart = entry.chart.as_ref().unwrap();
    let p = ctx.random_in_domain(chart);
    let pc = riemann_at(chart, &p)?;
    let frame_basis = entry.frame_at(&p)?;
    let mut worst = 0.0f64;
    for d1 in 0..=2usize {
        for d2 in 0..=3usize {
            let d = d1 + d2;
            if d == 0 {
                continue;
            }
            let axes: Vec<usize> = (0..d1).chain(2..2 + d2).collect();
            let frame = SubspaceFrame::from_frame_columns(
                p.clone(),
                pc.metric.clone(),
                &frame_basis,
                &axes,
            )?;
            let m = means::mean_ricci(&pc.riemann, &frame)?;
            let (ei, en) = catalogue::product_split_means(2, 1.0, 3, 1.0, d1, d2);
            if let (Some(a), Some(b)) = (m.intrinsic_mean, ei) {
                worst = worst.max((a - b).abs());
            }
            if let (Some(a), Some(b)) = (m.normal_mean, en) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ctx.record("oracle_means", &entry.name, worst, 1e-8);
    Ok(())
}

/// κ_d sanity on the unit 4-sphere.
fn check_kappa(ctx: &mut Ctx) -> Result<()> {
    let entry = space_form(4, 1.0).unwrap();
    let cfg = KappaConfig {
        restarts: 8,
        seed: ctx.rng.random(),
        ..KappaConfig::default()
    };
    let rep = kappa::kappa_d(&entry, 2, &cfg)?;
    ctx.record(
        "kappa_sphere_sanity",
        &entry.name,
        (rep.kappa_upper_bound - 4.0).abs(),
        1e-4,
    );
    Ok(())
}

/// Runs the complete verification suite.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        checks: Vec::new(),
        tol_scale: cfg.tol_scale,
    };
    let (entries, full_suite) = match &cfg.entries {
        Some(specs) => {
            let entries: Result<Vec<CatalogueEntry>> =
                specs.iter().map(CatalogueEntry::from_spec).collect();
            (entries?, false)
        }
        None => (default_entries(), true),
    };

    for entry in &entries {
        check_tensor_symmetries(&mut ctx, entry, cfg.points_per_chart)?;
        check_ad_vs_fd(&mut ctx, entry)?;
        check_sectional_invariance(&mut ctx, entry)?;
        check_chart_oracle_agreement(&mut ctx, entry, cfg.planes_per_entry)?;
        check_mean_family(&mut ctx, entry)?;
        check_weitzenboeck_family(&mut ctx, entry)?;
        check_triple_equality(&mut ctx, entry, cfg.triple_equality_draws / entries.len().max(1) + 1)?;
        check_bochner_bivector(&mut ctx, entry)?;
        check_jacobi_small_t(&mut ctx, entry)?;
    }
    if full_suite {
        check_oracle_means(&mut ctx)?;
        if cfg.include_expansions {
            check_expansions(&mut ctx)?;
        }
        if cfg.include_kappa {
            check_kappa(&mut ctx)?;
        }
    }

    let passed = ctx.checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        schema: 1,
        seed: cfg.seed,
        tol_scale: cfg.tol_scale,
        checks: ctx.checks,
        passed,
    })
}
