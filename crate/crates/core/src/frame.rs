//! g-orthonormal frames adapted to a subspace splitting T_pM = Π ⊕ Π⊥.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Linear-dependence threshold for spanning sets.
pub const SPAN_TOL: f64 = 1e-10;

/// A point together with g-orthonormal bases of a d-plane and its complement.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceFrame {
    pub point: Vec<f64>,
    #[serde(skip)]
    metric: DMatrix<f64>,
    #[serde(serialize_with = "serialize_vectors")]
    plane: Vec<DVector<f64>>,
    #[serde(serialize_with = "serialize_vectors")]
    normal: Vec<DVector<f64>>,
}

fn serialize_vectors<S: serde::Serializer>(
    vs: &[DVector<f64>],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(vs.len()))?;
    for v in vs {
        seq.serialize_element(&v.as_slice().to_vec())?;
    }
    seq.end()
}

/// Modified Gram–Schmidt in the g-inner product with one re-orthogonalization
/// pass. Returns `None` when the next vector is g-dependent on the previous.
fn gram_schmidt_append(
    g: &DMatrix<f64>,
    basis: &mut Vec<DVector<f64>>,
    candidate: &DVector<f64>,
    tol: f64,
) -> Option<()> {
    let original = linalg::norm(g, candidate).max(1.0);
    let mut v = candidate.clone();
    for _pass in 0..2 {
        for b in basis.iter() {
            let c = linalg::inner(g, b, &v);
            v -= b * c;
        }
    }
    let n = linalg::norm(g, &v);
    if n <= tol * original {
        return None;
    }
    basis.push(v / n);
    Some(())
}

impl SubspaceFrame {
    /// Builds the frame from `d` spanning vectors of Π at a point with metric
    /// `g`. The normal basis completes the span from the coordinate axes,
    /// picking the axis with the largest residual g-norm at each step.
    pub fn build(
        point: Vec<f64>,
        metric: DMatrix<f64>,
        spanners: &[DVector<f64>],
    ) -> Result<SubspaceFrame> {
        let n = metric.nrows();
        let d = spanners.len();
        if d == 0 || d > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
        let mut plane: Vec<DVector<f64>> = Vec::with_capacity(d);
        for s in spanners {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
            gram_schmidt_append(&metric, &mut plane, s, SPAN_TOL).ok_or(Error::DegenerateSpan {
                expected: d,
                pivot: SPAN_TOL,
            })?;
        }

        let mut all = plane.clone();
        let mut normal: Vec<DVector<f64>> = Vec::with_capacity(n - d);
        while all.len() < n {
            // Column pivoting: residual g-norm of each coordinate axis.
            let mut best: Option<(f64, DVector<f64>)> = None;
            for a in 0..n {
                let mut v: DVector<f64> = DVector::zeros(n);
                v[a] = 1.0;
                for b in &all {
                    let c = linalg::inner(&metric, b, &v);
                    v -= b * c;
                }
                let r = linalg::norm(&metric, &v);
                if best.as_ref().is_none_or(|(br, _)| r > *br) {
                    let mut axis: DVector<f64> = DVector::zeros(n);
                    axis[a] = 1.0;
                    best = Some((r, axis));
                }
            }
            let (_, axis) = best.expect("n > 0");
            gram_schmidt_append(&metric, &mut all, &axis, SPAN_TOL).ok_or(
                Error::DegenerateSpan {
                    expected: n,
                    pivot: SPAN_TOL,
                },
            )?;
            normal.push(all.last().unwrap().clone());
        }

        Ok(SubspaceFrame {
            point,
            metric,
            plane,
            normal,
        })
    }

    /// Frame whose plane is spanned by the given columns of `frame_basis`
    /// (an n×n matrix of g-orthonormal columns).
    pub fn from_frame_columns(
        point: Vec<f64>,
        metric: DMatrix<f64>,
        frame_basis: &DMatrix<f64>,
        plane_axes: &[usize],
    ) -> Result<SubspaceFrame> {
        let n = metric.nrows();
        let plane: Vec<DVector<f64>> = plane_axes
            .iter()
            .map(|&a| frame_basis.column(a).into_owned())
            .collect();
        let normal: Vec<DVector<f64>> = (0..n)
            .filter(|a| !plane_axes.contains(a))
            .map(|a| frame_basis.column(a).into_owned())
            .collect();
        let f = SubspaceFrame {
            point,
            metric,
            plane,
            normal,
        };
        let defect = f.orthonormality_defect();
        if defect > 1e-10 {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(f)
    }

    pub fn dim_total(&self) -> usize {
        self.metric.nrows()
    }

    pub fn dim_plane(&self) -> usize {
        self.plane.len()
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn plane(&self) -> &[DVector<f64>] {
        &self.plane
    }

    pub fn normal(&self) -> &[DVector<f64>] {
        &self.normal
    }

    /// Worst deviation of the combined basis from g-orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let all: Vec<&DVector<f64>> = self.plane.iter().chain(self.normal.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((linalg::inner(&self.metric, a, b) - target).abs());
            }
        }
        worst
    }

    /// The complementary frame: Π⊥ as the plane, Π as the normal.
    pub fn complement(&self) -> SubspaceFrame {
        SubspaceFrame {
            point: self.point.clone(),
            metric: self.metric.clone(),
            plane: self.normal.clone(),
            normal: self.plane.clone(),
        }
    }

    /// Frame with the plane basis re-mixed by `q` (d×d, assumed orthogonal).
    pub fn remix_plane(&self, q: &DMatrix<f64>) -> SubspaceFrame {
        let d = self.dim_plane();
        assert_eq!(q.nrows(), d);
        let mut plane = Vec::with_capacity(d);
        for c in 0..d {
            let mut v = DVector::zeros(self.dim_total());
            for r in 0..d {
                v += &self.plane[r] * q[(r, c)];
            }
            plane.push(v);
        }
        SubspaceFrame {
            point: self.point.clone(),
            metric: self.metric.clone(),
            plane,
            normal: self.normal.clone(),
        }
    }

    /// Frame with the normal basis re-mixed by `q` ((n−d)×(n−d), orthogonal).
    pub fn remix_normal(&self, q: &DMatrix<f64>) -> SubspaceFrame {
        let m = self.normal.len();
        assert_eq!(q.nrows(), m);
        let mut normal = Vec::with_capacity(m);
        for c in 0..m {
            let mut v = DVector::zeros(self.dim_total());
            for r in 0..m {
                v += &self.normal[r] * q[(r, c)];
            }
            normal.push(v);
        }
        SubspaceFrame {
            point: self.point.clone(),
            metric: self.metric.clone(),
            plane: self.plane.clone(),
            normal,
        }
    }

    /// Projection of `v` onto Π in the g-inner product.
    pub fn project_plane(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut p = DVector::zeros(self.dim_total());
        for b in &self.plane {
            p += b * linalg::inner(&self.metric, b, v);
        }
        p
    }

    /// Requires `v` to be unit and inside Π; returns an orthonormal basis of
    /// Π whose first vector is `v`.
    pub fn completion_within_plane(&self, v: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        let norm = linalg::norm(&self.metric, v);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm });
        }
        let residual = (v - self.project_plane(v)).norm();
        if residual > 1e-8 {
            return Err(Error::VectorNotInPlane { residual });
        }
        let mut basis = vec![v.clone()];
        for b in &self.plane {
            // Skip vectors that have become dependent; d−1 survive.
            let _ = gram_schmidt_append(&self.metric, &mut basis, b, 1e-8);
        }
        if basis.len() != self.dim_plane() {
            return Err(Error::DegenerateSpan {
                expected: self.dim_plane(),
                pivot: 1e-8,
            });
        }
        Ok(basis)
    }
}
