//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p ricci-means --test acceptance -- --nocapture` to
//! see the per-criterion lines and timings.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_means::catalogue::{
    self, cpn_fubini_study, heisenberg, product_spheres, space_form, surface_of_revolution,
    warped_product, CatalogueEntry, FiberSpec, RevolutionKind, WarpSpec,
};
use ricci_means::curvature::riemann_at;
use ricci_means::expansion::{self, VolumeQuadrature};
use ricci_means::frame::SubspaceFrame;
use ricci_means::kappa::{dense_plane_sampling_min, kappa_d, KappaConfig};
use ricci_means::linalg;
use ricci_means::verify::{run_verify, VerifyConfig};
use ricci_means::{means, weitzenboeck};

struct Criterion {
    name: &'static str,
    start: Instant,
}

impl Criterion {
    fn begin(name: &'static str) -> Self {
        Criterion {
            name,
            start: Instant::now(),
        }
    }

    fn finish(self, passed: bool) {
        let secs = self.start.elapsed().as_secs_f64();
        println!(
            "criterion {}: {} ({secs:.2} s)",
            self.name,
            if passed { "PASS" } else { "FAIL" }
        );
        assert!(passed, "criterion {} failed", self.name);
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-16);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

fn random_point(entry: &CatalogueEntry, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match &entry.chart {
        Some(chart) => chart
            .domain()
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * (0.1 + 0.8 * rng.random::<f64>()))
            .collect(),
        None => entry.default_point(),
    }
}

fn random_frame(n: usize, d: usize, point: Vec<f64>, rng: &mut ChaCha8Rng) -> SubspaceFrame {
    loop {
        let spanners: Vec<DVector<f64>> = (0..d).map(|_| random_vector(n, rng)).collect();
        if let Ok(f) = SubspaceFrame::build(point.clone(), DMatrix::identity(n, n), &spanners) {
            return f;
        }
    }
}

/// Criterion 1: Heisenberg means through the full numeric pipeline, < 1 s.
#[test]
fn criterion_1_heisenberg_means() {
    let c = Criterion::begin("1 (heisenberg means)");
    let entry = heisenberg();
    let chart = entry.chart.as_ref().unwrap();
    let p = vec![0.0; 3];
    let pc = riemann_at(chart, &p).unwrap();
    let frame_basis = entry.frame_at(&p).unwrap();
    let frame =
        SubspaceFrame::from_frame_columns(p.clone(), pc.metric.clone(), &frame_basis, &[0, 1])
            .unwrap();
    let m = means::mean_ricci(&pc.riemann, &frame).unwrap();
    let ok_time = c.start.elapsed().as_secs_f64() < 1.0;
    let passed = (m.intrinsic_mean.unwrap() + 0.75).abs() < 1e-9
        && (m.normal_mean.unwrap() - 0.25).abs() < 1e-9
        && ok_time;
    c.finish(passed);
}

/// Criterion 2: Space forms: means ((d−1)κ, κ) within 1e−9 and pairing d(n−d)κ within
/// 1e−8 for n ∈ {3..6}, κ ∈ {−1,0,1}, all d; < 10 s total.
#[test]
fn criterion_2_space_forms() {
    let c = Criterion::begin("2 (space forms)");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut passed = true;
    for n in 3..=6usize {
        for &kappa in &[-1.0, 0.0, 1.0] {
            let entry = space_form(n, kappa).unwrap();
            let p = random_point(&entry, &mut rng);
            // Numeric pipeline: chart curvature re-expressed orthonormally.
            let pc = entry.chart_curvature(&p).unwrap();
            let ortho = pc.riemann.to_orthonormal().unwrap();
            for d in 1..=n {
                let frame = random_frame(n, d, p.clone(), &mut rng);
                let m = means::mean_ricci(&ortho.tensor, &frame).unwrap();
                if d >= 2 {
                    passed &=
                        (m.intrinsic_mean.unwrap() - (d as f64 - 1.0) * kappa).abs() < 1e-9;
                }
                if d < n {
                    passed &= (m.normal_mean.unwrap() - kappa).abs() < 1e-9;
                }
                let w = weitzenboeck::weitz_matrix(&ortho.tensor, d).unwrap();
                let plane: Vec<DVector<f64>> = frame.plane().to_vec();
                let pairing = weitzenboeck::pair_simple(&w, &plane).unwrap();
                passed &= (pairing - (d * (n - d)) as f64 * kappa).abs() < 1e-8;
            }
        }
    }
    let ok_time = c.start.elapsed().as_secs_f64() < 10.0;
    c.finish(passed && ok_time);
}

/// Criterion 3: the three routes to the simple-vector pairing agree over
/// 1000 random draws, < 60 s.
#[test]
fn criterion_3_triple_equality() {
    let c = Criterion::begin("3 (pairing triple equality, 1000 draws)");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ 3);
    let entries: Vec<CatalogueEntry> = vec![
        space_form(3, 1.0).unwrap(),
        space_form(4, -1.0).unwrap(),
        space_form(5, 1.0).unwrap(),
        space_form(6, -1.0).unwrap(),
        heisenberg(),
        cpn_fubini_study(2).unwrap(),
        cpn_fubini_study(3).unwrap(),
        product_spheres(2, 1.0, 3, 1.0).unwrap(),
        product_spheres(2, 1.0, 2, 1.5).unwrap(),
        warped_product(1, FiberSpec { dim: 2, kappa: 0.0 }, WarpSpec::Exp).unwrap(),
        warped_product(
            2,
            FiberSpec { dim: 2, kappa: 1.0 },
            WarpSpec::Poly {
                coeffs: vec![1.5, 0.3, -0.2, 0.05],
            },
        )
        .unwrap(),
        surface_of_revolution(RevolutionKind::Catenoid).unwrap(),
    ];
    let mut worst = 0.0f64;
    for draw in 0..1000 {
        let entry = &entries[draw % entries.len()];
        let n = entry.dim;
        let p = random_point(entry, &mut rng);
        let r = entry.curvature_in_frame(&p).unwrap();
        let d = 1 + (rng.random::<u32>() as usize) % n;
        let frame = random_frame(n, d, p.clone(), &mut rng);
        let w = weitzenboeck::weitz_matrix(&r, d).unwrap();
        let plane: Vec<DVector<f64>> = frame.plane().to_vec();
        let pairing = weitzenboeck::pair_simple(&w, &plane).unwrap();
        let m = means::mean_ricci(&r, &frame).unwrap();
        let ricci = r.ricci();
        let mut ric_sum = 0.0;
        for e in frame.plane() {
            ric_sum += (e.transpose() * &ricci * e)[(0, 0)];
        }
        worst = worst
            .max((pairing - m.mixed_sum).abs())
            .max((pairing - (ric_sum - 2.0 * m.intrinsic_sum)).abs());
    }
    let ok_time = c.start.elapsed().as_secs_f64() < 60.0;
    println!("  worst triple-equality residual: {worst:e}");
    c.finish(worst < 1e-8 && ok_time);
}

/// Criterion 4: ℂP^n oracle: complex k-plane means, totally real normal means, and the
/// Bochner pairing d(2n−d), at algebraic precision.
#[test]
fn criterion_4_cpn_oracle() {
    let c = Criterion::begin("4 (cpn oracle means and pairing)");
    let mut passed = true;
    for n in 2..=3usize {
        let entry = cpn_fubini_study(n).unwrap();
        let r = entry.oracle_curvature(&entry.default_point()).unwrap();
        let nn = 2 * n;
        let identity = DMatrix::identity(nn, nn);

        for k in 1..=n {
            // Complex k-plane: interleaved axes 0..2k.
            let axes: Vec<usize> = (0..2 * k).collect();
            let frame = SubspaceFrame::from_frame_columns(
                vec![0.0; nn],
                identity.clone(),
                &DMatrix::identity(nn, nn),
                &axes,
            )
            .unwrap();
            let m = means::mean_ricci(&r, &frame).unwrap();
            let (ei, en) = catalogue::cpn_complex_plane_means(k);
            passed &= (m.intrinsic_mean.unwrap() - ei).abs() <= 1e-12;
            if k < n {
                passed &= (m.normal_mean.unwrap() - en).abs() <= 1e-12;
            }
            // Bochner pairing d(2n−d) for the simple unit 2k-vector.
            let d = 2 * k;
            let w = weitzenboeck::weitz_matrix(&r, d).unwrap();
            let plane: Vec<DVector<f64>> = frame.plane().to_vec();
            let pairing = weitzenboeck::pair_simple(&w, &plane).unwrap();
            passed &= (pairing - (d * (2 * n - d)) as f64).abs() <= 1e-10;
        }

        for d in 1..=n {
            // Totally real d-plane: even axes.
            let axes: Vec<usize> = (0..d).map(|i| 2 * i).collect();
            let frame = SubspaceFrame::from_frame_columns(
                vec![0.0; nn],
                identity.clone(),
                &DMatrix::identity(nn, nn),
                &axes,
            )
            .unwrap();
            let m = means::mean_ricci(&r, &frame).unwrap();
            let en = catalogue::cpn_totally_real_normal_mean(n, d);
            passed &= (m.normal_mean.unwrap() - en).abs() <= 1e-12;
        }
    }
    c.finish(passed);
}

/// Criterion 5: Volume-expansion coefficients on Euclidean, S³(1),
/// H³(−1), Heisenberg, and the three revolution surfaces; < 5 min.
#[test]
fn criterion_5_expansion_coefficients() {
    let c = Criterion::begin("5 (volume expansion coefficients)");
    let mut passed = true;
    let radii = expansion::default_radii();
    let quad = VolumeQuadrature::default();
    let tol = expansion::default_tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ 5);

    let entries = vec![
        space_form(3, 0.0).unwrap(),
        space_form(3, 1.0).unwrap(),
        space_form(3, -1.0).unwrap(),
        heisenberg(),
    ];
    for entry in &entries {
        let chart = entry.chart.as_ref().unwrap();
        let p = entry.default_point();
        // Geodesic-sphere volume defect.
        let fit = expansion::sphere_volume_coeff(chart, &p, &quad, &radii, tol).unwrap();
        let e = fit.c2_error().unwrap();
        passed &= e < 1e-3;
        println!("  sphere volume {}: c2 error {e:.2e}", entry.name);

        // Radial density along a random unit direction.
        let g = chart.metric_at(&p).unwrap().metric;
        let u_raw = random_vector(3, &mut rng);
        let u = &u_raw / linalg::norm(&g, &u_raw);
        let fit = expansion::radial_density_coeff(chart, &p, &u, &radii, tol).unwrap();
        let e = fit.c2_error().unwrap();
        passed &= e < 1e-3;
        println!("  radial density {}: c2 error {e:.2e}", entry.name);

        // Plane and normal pattern densities of a 2-plane.
        let frame_basis = entry.frame_at(&p).unwrap();
        let frame =
            SubspaceFrame::from_frame_columns(p.clone(), g.clone(), &frame_basis, &[0, 1])
                .unwrap();
        let v = frame.plane()[0].clone();
        let fit = expansion::plane_density_coeff(chart, &p, &frame, &v, &radii, tol).unwrap();
        let e = fit.c2_error().unwrap();
        passed &= e < 2e-3;
        println!("  plane density {}: c2 error {e:.2e}", entry.name);
        let fit = expansion::normal_density_coeff(chart, &p, &frame, &v, &radii, tol).unwrap();
        let e = fit.c2_error().unwrap();
        passed &= e < 2e-3;
        println!("  normal density {}: c2 error {e:.2e}", entry.name);
    }

    // Circumference defect on the three revolution surfaces.
    for kind in [
        RevolutionKind::Cylinder { radius: 1.0 },
        RevolutionKind::Sphere { radius: 1.0 },
        RevolutionKind::Catenoid,
    ] {
        let entry = surface_of_revolution(kind).unwrap();
        let chart = entry.chart.as_ref().unwrap();
        let p = entry.default_point();
        let fit = expansion::bdp_circumference(chart, &p, &quad, &radii, tol).unwrap();
        let e = fit.c2_error().unwrap();
        passed &= e < 1e-3;
        println!("  circumference {}: c2 error {e:.2e}", entry.name);
    }

    let ok_time = c.start.elapsed().as_secs_f64() < 300.0;
    c.finish(passed && ok_time);
}

/// Criterion 6: Product formulas: S²(1)×S³(1), every split (d₁,d₂), numeric means vs
/// the closed forms within 1e−8.
#[test]
fn criterion_6_product_formulas() {
    let c = Criterion::begin("6 (product of spheres splits)");
    let entry = product_spheres(2, 1.0, 3, 1.0).unwrap();
    let chart = entry.chart.as_ref().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ 6);
    let p = random_point(&entry, &mut rng);
    let pc = riemann_at(chart, &p).unwrap();
    let frame_basis = entry.frame_at(&p).unwrap();
    let mut passed = true;
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
            )
            .unwrap();
            let m = means::mean_ricci(&pc.riemann, &frame).unwrap();
            let (ei, en) = catalogue::product_split_means(2, 1.0, 3, 1.0, d1, d2);
            if let Some(expected) = ei {
                passed &= (m.intrinsic_mean.unwrap() - expected).abs() < 1e-8;
            }
            if let Some(expected) = en {
                passed &= (m.normal_mean.unwrap() - expected).abs() < 1e-8;
            }
        }
    }
    c.finish(passed);
}

/// Criterion 7: Warped products: constant-warp reduction, the hyperbolic-space models,
/// and cases (A)–(D) against the numeric pipeline on 50 random splits.
#[test]
fn criterion_7_warped_products() {
    let c = Criterion::begin("7 (warped products)");
    let mut passed = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ 7);

    // f ≡ 1 reduces to the product: mixed planes flat, fiber planes κ_F.
    let entry = warped_product(
        1,
        FiberSpec { dim: 2, kappa: 1.0 },
        WarpSpec::Constant { value: 1.0 },
    )
    .unwrap();
    let p = entry.default_point();
    let pc = entry.chart_curvature(&p).unwrap();
    let frame = entry.frame_at(&p).unwrap();
    let r = pc.riemann.change_basis(&frame);
    passed &= r.frame_sectional(0, 1).abs() < 1e-6;
    passed &= (r.frame_sectional(1, 2) - 1.0).abs() < 1e-6;

    // Hyperbolic space as a warped product, two models, all K = −1.
    for (fiber, warp) in [
        (FiberSpec { dim: 2, kappa: 0.0 }, WarpSpec::Exp),
        (FiberSpec { dim: 2, kappa: 1.0 }, WarpSpec::Sinh),
    ] {
        let entry = warped_product(1, fiber, warp).unwrap();
        let p = random_point(&entry, &mut rng);
        let pc = entry.chart_curvature(&p).unwrap();
        let frame = entry.frame_at(&p).unwrap();
        let r = pc.riemann.change_basis(&frame);
        for i in 0..3 {
            for j in (i + 1)..3 {
                passed &= (r.frame_sectional(i, j) + 1.0).abs() < 1e-6;
            }
        }
    }

    // Cases (A)–(D): closed-form split means vs the numeric pipeline.
    let warps = [
        WarpSpec::Cosh,
        WarpSpec::Exp,
        WarpSpec::Poly {
            coeffs: vec![1.4, 0.2, -0.15, 0.04],
        },
        WarpSpec::Sinh,
    ];
    let mut worst = 0.0f64;
    for cfgi in 0..50usize {
        let base_dim = 1 + cfgi % 2;
        let fiber_dim = 1 + cfgi % 3;
        let kappa_f = [-1.0, 0.0, 1.0][cfgi % 3];
        let warp = warps[cfgi % warps.len()].clone();
        let Ok(entry) = warped_product(base_dim, FiberSpec { dim: fiber_dim, kappa: kappa_f }, warp.clone())
        else {
            continue;
        };
        let n = entry.dim;
        let p = random_point(&entry, &mut rng);
        let pc = entry.chart_curvature(&p).unwrap();
        let frame_basis = entry.frame_at(&p).unwrap();

        // Random split: d1 base axes (case A/D), d2 fiber axes (case B/C/D).
        let d1 = (rng.random::<u32>() as usize) % (base_dim + 1);
        let d2 = (rng.random::<u32>() as usize) % (fiber_dim + 1);
        let d = d1 + d2;
        if d == 0 {
            continue;
        }
        // Sometimes exclude the warped axis 0 from Π_B, so both branches of
        // the Hessian-trace terms are exercised.
        let base_axes: Vec<usize> = if d1 < base_dim && rng.random::<bool>() {
            (1..=d1).collect()
        } else {
            (0..d1).collect()
        };
        let axes: Vec<usize> = base_axes
            .iter()
            .copied()
            .chain(base_dim..base_dim + d2)
            .collect();
        let frame =
            SubspaceFrame::from_frame_columns(p.clone(), pc.metric.clone(), &frame_basis, &axes)
                .unwrap();
        let m = means::mean_ricci(&pc.riemann, &frame).unwrap();
        let (ei, en) = catalogue::warped_split_means(
            base_dim, fiber_dim, kappa_f, &warp, p[0], &base_axes, d2,
        );
        if let (Some(a), Some(b)) = (m.intrinsic_mean, ei) {
            worst = worst.max((a - b).abs());
        }
        if let (Some(a), Some(b)) = (m.normal_mean, en) {
            worst = worst.max((a - b).abs());
        }
        // n kept for clarity of the split bound.
        let _ = n;
    }
    println!("  worst warped-case residual: {worst:e}");
    passed &= worst < 1e-7;
    c.finish(passed);
}

/// Criterion 8: κ_d sanity: d(n−d) on unit spheres with the homogeneity flag, and the
/// ℂP² optimizer against dense sampling of 10⁶ planes.
#[test]
fn criterion_8_kappa_sanity() {
    let c = Criterion::begin("8 (kappa_d search)");
    let mut passed = true;
    for n in 3..=6usize {
        let entry = space_form(n, 1.0).unwrap();
        for d in 2..n {
            let cfg = KappaConfig::default();
            let rep = kappa_d(&entry, d, &cfg).unwrap();
            let expected = (d * (n - d)) as f64;
            passed &= (rep.kappa_upper_bound - expected).abs() < 1e-4;
            passed &= rep.homogeneous;
        }
    }

    let entry = cpn_fubini_study(2).unwrap();
    let p = entry.default_point();
    let dense = dense_plane_sampling_min(&entry, &p, 2, 1_000_000, 0x5EED).unwrap();
    let rep = kappa_d(&entry, 2, &KappaConfig::default()).unwrap();
    println!(
        "  cpn2 optimizer {:.9} vs dense-sampling min {dense:.9}",
        rep.best_normal_mean
    );
    passed &= rep.best_normal_mean <= dense + 1e-4;
    c.finish(passed);
}

/// Criterion 9: Property suites across the catalogue: the verify report passes.
#[test]
fn criterion_9_property_suites() {
    let c = Criterion::begin("9 (full property suite)");
    let report = run_verify(&VerifyConfig::default()).unwrap();
    for check in report.checks.iter().filter(|c| !c.passed) {
        println!(
            "  FAILED {} on {}: residual {:e} > {:e}",
            check.name, check.manifold, check.residual, check.tolerance
        );
    }
    println!("  {} checks", report.checks.len());
    c.finish(report.passed);
}
