//! Coordinate charts: a smooth metric over an axis-aligned box.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::autodiff::{seed_first, seed_second, Scalar, D1, D2, MAX_AD_DIM};
use crate::error::{Error, Result};
use crate::linalg;

/// Metric components as a generic function of the coordinates, so plain
/// values and nested dual numbers evaluate through the same code.
///
/// `g` is a row-major `dim × dim` buffer; implementations must fill every
/// entry symmetrically.
pub trait SmoothMetric: Send + Sync + 'static {
    fn dim(&self) -> usize;
    fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]);
}

/// Object-safe bridge over the scalar types the chart machinery needs.
trait DynMetric: Send + Sync {
    fn eval_f64(&self, x: &[f64], g: &mut [f64]);
    fn eval_d1(&self, x: &[D1], g: &mut [D1]);
    fn eval_d2(&self, x: &[D2], g: &mut [D2]);
}

impl<M: SmoothMetric> DynMetric for M {
    fn eval_f64(&self, x: &[f64], g: &mut [f64]) {
        self.eval(x, g)
    }
    fn eval_d1(&self, x: &[D1], g: &mut [D1]) {
        self.eval(x, g)
    }
    fn eval_d2(&self, x: &[D2], g: &mut [D2]) {
        self.eval(x, g)
    }
}

/// Metric, inverse, and the factorization residual at one point.
#[derive(Clone, Debug)]
pub struct MetricAt {
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub inverse_residual: f64,
}

/// First and second coordinate derivatives of the metric at one point.
///
/// `first[k]` is ∂_k g and `second[k][l]` is ∂_k ∂_l g.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub metric: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub first: Vec<DMatrix<f64>>,
    pub second: Vec<Vec<DMatrix<f64>>>,
}

/// A coordinate domain with a smooth metric-component function.
#[derive(Clone)]
pub struct MetricChart {
    label: String,
    dim: usize,
    domain: Vec<(f64, f64)>,
    metric: Arc<dyn DynMetric>,
}

impl std::fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricChart")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MetricChart {
    /// `domain` is one `(lo, hi)` interval per coordinate.
    pub fn new(
        label: impl Into<String>,
        domain: Vec<(f64, f64)>,
        metric: impl SmoothMetric,
    ) -> Self {
        let dim = metric.dim();
        assert_eq!(dim, domain.len(), "domain box must match metric dimension");
        assert!((1..=MAX_AD_DIM).contains(&dim), "chart dimension out of range");
        assert!(domain.iter().all(|&(lo, hi)| lo < hi));
        MetricChart {
            label: label.into(),
            dim,
            domain,
            metric: Arc::new(metric),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(&self.domain)
                .all(|(&xi, &(lo, hi))| xi >= lo && xi <= hi)
    }

    /// Midpoint of the domain box, the default base point for tasks.
    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if !self.contains(x) {
            return Err(Error::OutOfDomain {
                chart: self.label.clone(),
                point: x.to_vec(),
            });
        }
        Ok(())
    }

    /// Raw metric components without validation (integrator hot path).
    pub(crate) fn metric_raw(&self, x: &[f64]) -> DMatrix<f64> {
        let mut buf = vec![0.0; self.dim * self.dim];
        self.metric.eval_f64(x, &mut buf);
        DMatrix::from_row_slice(self.dim, self.dim, &buf)
    }

    /// Metric and verified inverse at a point of the domain.
    pub fn metric_at(&self, x: &[f64]) -> Result<MetricAt> {
        self.check_domain(x)?;
        let g = self.metric_raw(x);
        let sym_defect = linalg::max_abs(&(&g - g.transpose()));
        if sym_defect > 1e-14 {
            return Err(Error::SingularMetric {
                point: x.to_vec(),
                detail: format!("asymmetric components: defect {sym_defect:e}"),
            });
        }
        let l = linalg::cholesky_with_tolerance(&g).ok_or_else(|| Error::SingularMetric {
            point: x.to_vec(),
            detail: "cholesky pivot below tolerance".into(),
        })?;
        let n = self.dim;
        // inv = L^{-T} L^{-1}
        let linv = l
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::SingularMetric {
                point: x.to_vec(),
                detail: "triangular solve failed".into(),
            })?;
        let inverse = linv.transpose() * &linv;
        let inverse_residual = linalg::identity_defect(&(&g * &inverse));
        if inverse_residual > 1e-10 {
            return Err(Error::SingularMetric {
                point: x.to_vec(),
                detail: format!("inverse residual {inverse_residual:e}"),
            });
        }
        Ok(MetricAt {
            metric: g,
            inverse,
            inverse_residual,
        })
    }

    /// Metric plus first derivatives via one dual-number pass.
    pub fn first_jet(&self, x: &[f64]) -> Result<(MetricAt, Vec<DMatrix<f64>>)> {
        let at = self.metric_at(x)?;
        let n = self.dim;
        let seeds = seed_first(x);
        let mut buf = vec![D1::constant(0.0); n * n];
        self.metric.eval_d1(&seeds, &mut buf);
        let mut first = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in 0..n {
                let e = &buf[i * n + j];
                for k in 0..n {
                    first[k][(i, j)] = e.grad(k);
                }
            }
        }
        Ok((at, first))
    }

    /// Metric plus first and second derivatives via one nested-dual pass.
    pub fn second_jet(&self, x: &[f64]) -> Result<MetricJet> {
        let at = self.metric_at(x)?;
        let n = self.dim;
        let seeds = seed_second(x);
        let mut buf = vec![D2::constant(D1::constant(0.0)); n * n];
        self.metric.eval_d2(&seeds, &mut buf);
        let mut first = vec![DMatrix::zeros(n, n); n];
        let mut second = vec![vec![DMatrix::zeros(n, n); n]; n];
        for i in 0..n {
            for j in 0..n {
                let e = &buf[i * n + j];
                for k in 0..n {
                    first[k][(i, j)] = e.re.grad(k);
                    for l in 0..n {
                        second[k][l][(i, j)] = e.grad(l).grad(k);
                    }
                }
            }
        }
        Ok(MetricJet {
            metric: at.metric,
            inverse: at.inverse,
            first,
            second,
        })
    }
}

/// Euclidean metric in Cartesian coordinates, mostly for tests and defaults.
pub struct EuclideanMetric {
    pub dim: usize,
}

impl SmoothMetric for EuclideanMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<S: Scalar>(&self, _x: &[S], g: &mut [S]) {
        for i in 0..self.dim {
            for j in 0..self.dim {
                g[i * self.dim + j] = if i == j { S::one() } else { S::zero() };
            }
        }
    }
}

/// Chart over a box `[-w, w]^n` with the identity metric.
pub fn euclidean_chart(dim: usize, half_width: f64) -> MetricChart {
    MetricChart::new(
        format!("euclidean_{dim}"),
        vec![(-half_width, half_width); dim],
        EuclideanMetric { dim },
    )
}
