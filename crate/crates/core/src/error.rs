//! Crate-wide error type with machine-readable codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Metric failed the positive-definiteness factorization.
    #[error("metric not positive definite at {point:?}: {detail}")]
    SingularMetric { point: Vec<f64>, detail: String },

    /// Point outside the chart's coordinate box.
    #[error("point {point:?} outside domain of chart `{chart}`")]
    OutOfDomain { chart: String, point: Vec<f64> },

    /// 2-plane span too close to degenerate for a sectional curvature.
    #[error("degenerate 2-plane: gram determinant {gram_det:e}")]
    DegeneratePlane { gram_det: f64 },

    /// Spanning set does not have full rank.
    #[error("spanning set has rank < {expected} (pivot {pivot:e})")]
    DegenerateSpan { expected: usize, pivot: f64 },

    /// A direction that must lie in the plane does not.
    #[error("vector not in plane: projection residual {residual:e}")]
    VectorNotInPlane { residual: f64 },

    /// A direction that must be unit is not.
    #[error("vector not unit: |v| = {norm}")]
    NotUnit { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// d-vector and endomorphism expressed in incompatible frames.
    #[error("frame mismatch: {detail}")]
    FrameMismatch { detail: String },

    #[error("vectors not orthonormal: defect {defect:e}")]
    NotOrthonormal { defect: f64 },

    /// Geodesic integration left the chart box.
    #[error("geodesic left chart domain at t = {t}")]
    ChartExit { t: f64, point: Vec<f64> },

    /// Adaptive integrator step size underflowed.
    #[error("integrator step underflow at t = {t}")]
    StepFailure { t: f64 },

    /// Jacobi determinant vanished before the requested arclength.
    #[error("conjugate point before t = {t}")]
    ConjugatePoint { t: f64 },

    /// Expansion ladder fit exceeded the residual threshold.
    #[error("expansion fit rejected: residual {residual:e} > {threshold:e}")]
    FitRejected { residual: f64, threshold: f64 },

    #[error("warp function not positive: f = {value} at {point:?}")]
    WarpNotPositive { value: f64, point: Vec<f64> },

    /// Catalogue entry lacks the requested capability (chart or oracle).
    #[error("catalogue entry `{name}` has no {capability}")]
    MissingCapability { name: String, capability: String },

    #[error("unknown catalogue model `{name}`")]
    UnknownModel { name: String },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
}

impl Error {
    /// Stable machine-readable code for reports and CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularMetric { .. } => "singular_metric",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::DegeneratePlane { .. } => "degenerate_plane",
            Error::DegenerateSpan { .. } => "degenerate_span",
            Error::VectorNotInPlane { .. } => "vector_not_in_plane",
            Error::NotUnit { .. } => "not_unit",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::FrameMismatch { .. } => "frame_mismatch",
            Error::NotOrthonormal { .. } => "not_orthonormal",
            Error::ChartExit { .. } => "chart_exit",
            Error::StepFailure { .. } => "step_failure",
            Error::ConjugatePoint { .. } => "conjugate_point",
            Error::FitRejected { .. } => "fit_rejected",
            Error::WarpNotPositive { .. } => "warp_not_positive",
            Error::MissingCapability { .. } => "missing_capability",
            Error::UnknownModel { .. } => "unknown_model",
            Error::InvalidParameter { .. } => "invalid_parameter",
        }
    }
}
