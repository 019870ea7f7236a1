//! Finite-difference cross-check oracle for metric derivatives.
//!
//! Fourth-order central stencils provide an independent estimate of ∂g and
//! ∂²g; the Christoffel/Riemann assembly is then shared with the dual-number
//! path, so any disagreement isolates the differentiation itself. Never used
//! as the primary path.

use nalgebra::DMatrix;

use crate::chart::{MetricChart, MetricJet};
use crate::curvature::{assemble_christoffel, assemble_riemann, AlgebraicCurvature, Christoffel};
use crate::error::Result;

fn metric_matrix(chart: &MetricChart, x: &[f64]) -> DMatrix<f64> {
    chart.metric_raw(x)
}

fn shifted(x: &[f64], k: usize, dk: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += dk;
    y
}

/// 4th-order first derivative: (−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h.
fn d1(chart: &MetricChart, x: &[f64], k: usize, h: f64) -> DMatrix<f64> {
    let f2p = metric_matrix(chart, &shifted(x, k, 2.0 * h));
    let f1p = metric_matrix(chart, &shifted(x, k, h));
    let f1m = metric_matrix(chart, &shifted(x, k, -h));
    let f2m = metric_matrix(chart, &shifted(x, k, -2.0 * h));
    (-f2p + f1p * 8.0 - f1m * 8.0 + f2m) / (12.0 * h)
}

/// 4th-order pure second derivative:
/// (−f(2h) + 16f(h) − 30f(0) + 16f(−h) − f(−2h)) / 12h².
fn d2_pure(chart: &MetricChart, x: &[f64], k: usize, h: f64) -> DMatrix<f64> {
    let f0 = metric_matrix(chart, x);
    let f2p = metric_matrix(chart, &shifted(x, k, 2.0 * h));
    let f1p = metric_matrix(chart, &shifted(x, k, h));
    let f1m = metric_matrix(chart, &shifted(x, k, -h));
    let f2m = metric_matrix(chart, &shifted(x, k, -2.0 * h));
    (-f2p + f1p * 16.0 - f0 * 30.0 + f1m * 16.0 - f2m) / (12.0 * h * h)
}

/// Mixed second derivative as a 4th-order first-derivative stencil applied
/// in direction `l` to the 4th-order ∂_k stencil.
fn d2_mixed(chart: &MetricChart, x: &[f64], k: usize, l: usize, h: f64) -> DMatrix<f64> {
    let g = |dl: f64| d1(chart, &shifted(x, l, dl), k, h);
    (-g(2.0 * h) + g(h) * 8.0 - g(-h) * 8.0 + g(-2.0 * h)) / (12.0 * h)
}

/// Metric jet estimated purely from central differences of step `h`.
pub fn fd_metric_jet(chart: &MetricChart, x: &[f64], h: f64) -> Result<MetricJet> {
    let at = chart.metric_at(x)?;
    let n = chart.dim();
    let first: Vec<DMatrix<f64>> = (0..n).map(|k| d1(chart, x, k, h)).collect();
    let mut second = vec![vec![DMatrix::zeros(n, n); n]; n];
    for k in 0..n {
        for l in 0..=k {
            let m = if k == l {
                d2_pure(chart, x, k, h)
            } else {
                d2_mixed(chart, x, k, l, h)
            };
            second[k][l] = m.clone();
            second[l][k] = m;
        }
    }
    Ok(MetricJet {
        metric: at.metric,
        inverse: at.inverse,
        first,
        second,
    })
}

/// Christoffel symbols from the finite-difference jet.
pub fn fd_christoffel(chart: &MetricChart, x: &[f64], h: f64) -> Result<Christoffel> {
    let jet = fd_metric_jet(chart, x, h)?;
    Ok(assemble_christoffel(&jet.inverse, &jet.first))
}

/// Riemann tensor (coordinate frame) from the finite-difference jet.
pub fn fd_riemann(chart: &MetricChart, x: &[f64], h: f64) -> Result<AlgebraicCurvature> {
    let jet = fd_metric_jet(chart, x, h)?;
    let (_, riemann) = assemble_riemann(&jet);
    Ok(riemann)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Scalar;
    use crate::chart::SmoothMetric;
    use crate::curvature::{christoffel, riemann_at};

    struct Heisenberg;

    impl SmoothMetric for Heisenberg {
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

    fn heisenberg_chart() -> MetricChart {
        MetricChart::new("heisenberg", vec![(-2.0, 2.0); 3], Heisenberg)
    }

    #[test]
    fn heisenberg_christoffel_ad_vs_fd() {
        let chart = heisenberg_chart();
        let x = [0.0, 0.0, 0.0];
        let ad = christoffel(&chart, &x).unwrap();
        let fd = fd_christoffel(&chart, &x, 1e-5).unwrap();
        let n = 3;
        let mut nonzero_seen = false;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (ad.get(k, i, j), fd.get(k, i, j));
                    assert!((a - b).abs() < 1e-9, "Γ^{k}_{i}{j}: ad={a} fd={b}");
                    if a.abs() > 0.1 {
                        nonzero_seen = true;
                    }
                }
            }
        }
        assert!(nonzero_seen, "Heisenberg connection should not vanish");
    }

    #[test]
    fn heisenberg_riemann_ad_vs_fd() {
        let chart = heisenberg_chart();
        let x = [0.4, -0.3, 0.8];
        let ad = riemann_at(&chart, &x).unwrap().riemann;
        let fd = fd_riemann(&chart, &x, 1e-4).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let (a, b) = (ad.at(i, j, k, l), fd.at(i, j, k, l));
                        let scale = a.abs().max(1.0);
                        assert!(
                            (a - b).abs() / scale < 1e-6,
                            "R[{i}{j}{k}{l}]: ad={a} fd={b}"
                        );
                    }
                }
            }
        }
    }
}
