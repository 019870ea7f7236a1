//! The Weitzenböck curvature endomorphism on Λ^d and its pairing with simple
//! d-vectors.
//!
//! The endomorphism acts on a d-form ω by
//!   (𝓡_d ω)_{i₁…i_d} = Σ_s Ric_{i_s}{}^j ω_{i₁…j…i_d}
//!                      − Σ_{s<t} R_{i_s i_t}{}^{jk} ω_{jk i₁…î_s…î_t…i_d},
//! assembled entrywise in the orthonormal wedge basis with explicit
//! permutation-parity bookkeeping, so the matrix is auditable against the
//! two sums separately.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::AlgebraicCurvature;
use crate::error::{Error, Result};
use crate::frame::SubspaceFrame;
use crate::linalg;
use crate::means;
use crate::wedge::MultiIndexBasis;

/// Dimension cap for materializing the dense C(n,d)² matrix.
pub const MAX_WEITZ_DIM: usize = 12;

/// ⟨𝓡_d ω_I, ω_J⟩ in the orthonormal wedge basis of Λ^d.
#[derive(Clone, Debug)]
pub struct WeitzenboeckMatrix {
    basis: MultiIndexBasis,
    entries: DMatrix<f64>,
}

impl WeitzenboeckMatrix {
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Max |W − Wᵀ|: the endomorphism is self-adjoint, so this is roundoff.
    pub fn symmetry_defect(&self) -> f64 {
        linalg::max_abs(&(&self.entries - self.entries.transpose()))
    }

    /// Quadratic pairing ⟨𝓡_d w, w⟩ for wedge coordinates `w`.
    pub fn pair(&self, w: &DVector<f64>) -> f64 {
        (w.transpose() * &self.entries * w)[(0, 0)]
    }
}

/// Builds the endomorphism matrix from curvature in an orthonormal frame.
pub fn weitz_matrix(r: &AlgebraicCurvature, d: usize) -> Result<WeitzenboeckMatrix> {
    let n = r.dim();
    if d < 1 || d > n || n > MAX_WEITZ_DIM {
        return Err(Error::DimensionMismatch {
            expected: n.min(MAX_WEITZ_DIM),
            found: d,
        });
    }
    if !r.is_orthonormal_frame() {
        return Err(Error::FrameMismatch {
            detail: "weitzenböck assembly requires an orthonormal frame".into(),
        });
    }
    let ricci = r.ricci();
    let basis = MultiIndexBasis::new(n, d);
    let mut entries = DMatrix::zeros(basis.len(), basis.len());
    let mut scratch = vec![0usize; d];

    for row in 0..basis.len() {
        let idx = basis.tuple(row).to_vec();

        // (a) Ricci sum: replace one slot i_s by j.
        for s in 0..d {
            for j in 0..n {
                let ric = ricci[(idx[s], j)];
                if ric == 0.0 {
                    continue;
                }
                scratch.copy_from_slice(&idx);
                scratch[s] = j;
                if let Some((col, sign)) = basis.locate(&scratch) {
                    entries[(row, col)] += ric * sign;
                }
            }
        }

        // (b) Riemann sum: substitute (j, k) into the slot pair (s, t), in
        // place. In-place substitution is the parity bookkeeping under which
        // the two orders of (j, k) double the diagonal K-terms instead of
        // cancelling them; moving (j, k) to the front would flip the sign of
        // every non-adjacent slot pair.
        for s in 0..d {
            for t in (s + 1)..d {
                for j in 0..n {
                    for k in 0..n {
                        if j == k {
                            continue;
                        }
                        let rv = r.at(idx[s], idx[t], j, k);
                        if rv == 0.0 {
                            continue;
                        }
                        scratch.copy_from_slice(&idx);
                        scratch[s] = j;
                        scratch[t] = k;
                        if let Some((col, sign)) = basis.locate(&scratch) {
                            entries[(row, col)] -= rv * sign;
                        }
                    }
                }
            }
        }
    }

    Ok(WeitzenboeckMatrix { basis, entries })
}

/// A unit simple d-vector e₁∧…∧e_d spanned by a frame's plane basis.
#[derive(Clone, Debug)]
pub struct SimpleDVector {
    pub frame: SubspaceFrame,
    pub scale: f64,
}

impl SimpleDVector {
    /// Unit simple d-vector of a g-orthonormal subspace frame.
    pub fn unit(frame: SubspaceFrame) -> Self {
        SimpleDVector { frame, scale: 1.0 }
    }

    /// ⟨𝓡_d V, V⟩ against an endomorphism in the same orthonormal frame;
    /// scales quadratically with |V|.
    pub fn pair(&self, w: &WeitzenboeckMatrix) -> Result<f64> {
        pair_simple(w, self.frame.plane()).map(|v| v * self.scale * self.scale)
    }

    /// Wedge coordinates, optionally converting the plane basis into the
    /// orthonormal frame the endomorphism lives in.
    pub fn wedge_coordinates(
        &self,
        basis: &MultiIndexBasis,
        into_frame: Option<&DMatrix<f64>>,
    ) -> DVector<f64> {
        let vectors: Vec<DVector<f64>> = self
            .frame
            .plane()
            .iter()
            .map(|v| match into_frame {
                Some(m) => m * v,
                None => v.clone(),
            })
            .collect();
        basis.wedge_coordinates(&vectors) * self.scale
    }
}

/// ⟨𝓡_d V, V⟩ for plane vectors expressed (orthonormally) in the matrix frame.
pub fn pair_simple(w: &WeitzenboeckMatrix, plane: &[DVector<f64>]) -> Result<f64> {
    let d = w.degree();
    let n = w.n();
    if plane.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: plane.len(),
        });
    }
    let mut defect = 0.0f64;
    for (i, u) in plane.iter().enumerate() {
        if u.len() != n {
            return Err(Error::FrameMismatch {
                detail: format!("plane vector length {} vs frame dimension {n}", u.len()),
            });
        }
        for (j, v) in plane.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((u.dot(v) - target).abs());
        }
    }
    if defect > 1e-8 {
        return Err(Error::NotOrthonormal { defect });
    }
    let coords = w.basis().wedge_coordinates(plane);
    Ok(w.pair(&coords))
}

/// The three independent routes to the Bochner curvature term of a simple
/// unit bivector X∧Y.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BochnerBivector {
    /// Ric(X,X) + Ric(Y,Y) − 2K(span{X,Y}).
    pub via_ricci: f64,
    /// Matrix pairing ⟨𝓡₂(X∧Y), X∧Y⟩.
    pub via_weitz: f64,
    /// Mixed sectional sum Σ_{i,α} K(e_i, n_α) = 2(n−2)·Ric̄⊥.
    pub via_mixed_sum: f64,
}

impl BochnerBivector {
    pub fn value(&self) -> f64 {
        self.via_ricci
    }

    pub fn max_spread(&self) -> f64 {
        let vals = [self.via_ricci, self.via_weitz, self.via_mixed_sum];
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

/// Bochner curvature term of X∧Y for orthonormal X ⊥ Y, with the d = 2
/// Weitzenböck pairing and the mixed-sum route computed alongside.
pub fn bochner_bivector(
    r: &AlgebraicCurvature,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<BochnerBivector> {
    let n = r.dim();
    if !r.is_orthonormal_frame() {
        return Err(Error::FrameMismatch {
            detail: "bochner bivector requires an orthonormal frame".into(),
        });
    }
    let defect = (x.dot(x) - 1.0)
        .abs()
        .max((y.dot(y) - 1.0).abs())
        .max(x.dot(y).abs());
    if defect > 1e-10 {
        return Err(Error::NotOrthonormal { defect });
    }

    let ricci = r.ricci();
    let ric_xx = (x.transpose() * &ricci * x)[(0, 0)];
    let ric_yy = (y.transpose() * &ricci * y)[(0, 0)];
    let k = r.sectional(x, y)?;
    let via_ricci = ric_xx + ric_yy - 2.0 * k;

    let w = weitz_matrix(r, 2)?;
    let via_weitz = pair_simple(&w, &[x.clone(), y.clone()])?;

    let frame = SubspaceFrame::build(
        vec![0.0; n],
        DMatrix::identity(n, n),
        &[x.clone(), y.clone()],
    )?;
    let via_mixed_sum = means::mean_ricci(r, &frame)?.mixed_sum;

    Ok(BochnerBivector {
        via_ricci,
        via_weitz,
        via_mixed_sum,
    })
}

/// Comparison of Hodge-Laplacian eigenvalue candidates against κ_d.
#[derive(Clone, Debug, Serialize)]
pub struct LichnerowiczReport {
    pub kappa: f64,
    pub entries: Vec<LichnerowiczEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LichnerowiczEntry {
    pub lambda: f64,
    pub status: LichnerowiczStatus,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LichnerowiczStatus {
    Satisfied,
    Boundary,
    Violation,
}

/// Flags each candidate eigenvalue against the lower bound κ_d.
pub fn lichnerowicz_report(kappa: f64, lambda_candidates: &[f64]) -> LichnerowiczReport {
    let tol = 1e-9 * kappa.abs().max(1.0);
    let entries = lambda_candidates
        .iter()
        .map(|&lambda| {
            let (status, note) = if (lambda - kappa).abs() <= tol {
                (
                    LichnerowiczStatus::Boundary,
                    "equality ⇒ ∇V ≡ 0 necessary".to_string(),
                )
            } else if lambda > kappa {
                (LichnerowiczStatus::Satisfied, String::new())
            } else {
                (
                    LichnerowiczStatus::Violation,
                    format!("lambda below bound by {:e}", kappa - lambda),
                )
            };
            LichnerowiczEntry {
                lambda,
                status,
                note,
            }
        })
        .collect();
    LichnerowiczReport { kappa, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space_form(n: usize, kappa: f64) -> AlgebraicCurvature {
        AlgebraicCurvature::from_fn(n, DMatrix::identity(n, n), |i, j, k, l| {
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
        })
    }

    fn axis_frame(n: usize, d: usize) -> SubspaceFrame {
        let spanners: Vec<DVector<f64>> = (0..d)
            .map(|i| {
                let mut v = DVector::zeros(n);
                v[i] = 1.0;
                v
            })
            .collect();
        SubspaceFrame::build(vec![0.0; n], DMatrix::identity(n, n), &spanners).unwrap()
    }

    #[test]
    fn flat_endomorphism_is_zero() {
        let r = space_form(5, 0.0);
        let w = weitz_matrix(&r, 3).unwrap();
        assert!(linalg::max_abs(w.entries()) == 0.0);
    }

    #[test]
    fn space_form_is_diagonal_constant() {
        // Brute-force evaluation of the two Weitzenböck sums on the κ-tensor
        // must give d(n−d)κ times the identity on the wedge basis.
        for n in 3..=6 {
            for d in 1..n {
                for &kappa in &[1.0, -1.0] {
                    let r = space_form(n, kappa);
                    let w = weitz_matrix(&r, d).unwrap();
                    let expected = (d * (n - d)) as f64 * kappa;
                    for row in 0..w.entries().nrows() {
                        for col in 0..w.entries().ncols() {
                            let target = if row == col { expected } else { 0.0 };
                            assert!(
                                (w.entries()[(row, col)] - target).abs() < 1e-12,
                                "n={n} d={d} κ={kappa} entry ({row},{col})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_one_reduces_to_ricci() {
        // Classical Bochner on 1-forms: only the Ricci sum survives.
        let n = 4;
        let mut r = space_form(n, 1.0);
        let w = weitz_matrix(&r, 1).unwrap();
        let ricci = r.ricci();
        assert!(linalg::max_abs(&(w.entries() - &ricci)) < 1e-12);
        // Same on an anisotropic tensor (perturb one plane, keep symmetries).
        r.set(0, 1, 0, 1, -0.75);
        r.set(1, 0, 1, 0, -0.75);
        r.set(0, 1, 1, 0, 0.75);
        r.set(1, 0, 0, 1, 0.75);
        let w = weitz_matrix(&r, 1).unwrap();
        assert!(linalg::max_abs(&(w.entries() - &r.ricci())) < 1e-12);
    }

    #[test]
    fn top_degree_pairing_vanishes_on_space_form() {
        let n = 4;
        let r = space_form(n, 1.0);
        let w = weitz_matrix(&r, n).unwrap();
        assert!(linalg::max_abs(w.entries()) < 1e-12);
    }

    #[test]
    fn pairing_routes_agree_on_space_form() {
        let n = 5;
        let d = 2;
        let kappa = 1.0;
        let r = space_form(n, kappa);
        let frame = axis_frame(n, d);
        let w = weitz_matrix(&r, d).unwrap();
        let plane: Vec<DVector<f64>> = frame.plane().to_vec();
        let pairing = pair_simple(&w, &plane).unwrap();
        assert_relative_eq!(pairing, (d * (n - d)) as f64 * kappa, epsilon = 1e-12);

        let m = means::mean_ricci(&r, &frame).unwrap();
        assert_relative_eq!(pairing, m.mixed_sum, epsilon = 1e-12);

        let ricci = r.ricci();
        let mut ric_sum = 0.0;
        for e in frame.plane() {
            ric_sum += (e.transpose() * &ricci * e)[(0, 0)];
        }
        assert_relative_eq!(
            pairing,
            ric_sum - 2.0 * m.intrinsic_sum,
            epsilon = 1e-12
        );
    }

    #[test]
    fn heisenberg_bivector_value() {
        // Ric(X,X) + Ric(Y,Y) − 2K(X,Y) = −1/2 − 1/2 + 3/2 = 1/2, which is
        // also 2(n−2)·Ric̄⊥ = 2·(1/4).
        let mut r = AlgebraicCurvature::zeros_orthonormal(3);
        for &(i, j, k) in &[(0usize, 1usize, -0.75), (0, 2, 0.25), (1, 2, 0.25)] {
            r.set(i, j, i, j, k);
            r.set(j, i, j, i, k);
            r.set(i, j, j, i, -k);
            r.set(j, i, i, j, -k);
        }
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let b = bochner_bivector(&r, &x, &y).unwrap();
        assert_relative_eq!(b.value(), 0.5, epsilon = 1e-14);
        assert!(b.max_spread() < 1e-14);
    }

    #[test]
    fn flat_bivector_vanishes() {
        let r = space_form(4, 0.0);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let b = bochner_bivector(&r, &x, &y).unwrap();
        assert_eq!(b.value(), 0.0);
        assert_eq!(b.max_spread(), 0.0);
    }

    #[test]
    fn space_form_bivector_is_2n_minus_4_kappa() {
        let n = 5;
        let kappa = -2.0;
        let r = space_form(n, kappa);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        let b = bochner_bivector(&r, &x, &y).unwrap();
        assert_relative_eq!(b.value(), 2.0 * (n as f64 - 2.0) * kappa, epsilon = 1e-13);
        assert_eq!(
            bochner_bivector(&r, &x, &x).unwrap_err().code(),
            "not_orthonormal"
        );
    }

    #[test]
    fn matrix_requires_orthonormal_frame() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let r = AlgebraicCurvature::zeros(2, g);
        assert_eq!(weitz_matrix(&r, 1).unwrap_err().code(), "frame_mismatch");
    }

    #[test]
    fn pairing_rejects_non_orthonormal_input() {
        let r = space_form(4, 1.0);
        let w = weitz_matrix(&r, 2).unwrap();
        let u = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.9, 0.1, 0.0, 0.0]);
        assert_eq!(
            pair_simple(&w, &[u, v]).unwrap_err().code(),
            "not_orthonormal"
        );
    }

    #[test]
    fn hodge_duality_spectrum_on_space_forms() {
        let n = 5;
        let kappa = -1.0;
        for d in 1..n {
            let r = space_form(n, kappa);
            let wd = weitz_matrix(&r, d).unwrap();
            let wnd = weitz_matrix(&r, n - d).unwrap();
            // Both are constant multiples of the identity with the same value.
            assert_relative_eq!(
                wd.entries()[(0, 0)],
                wnd.entries()[(0, 0)],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn lichnerowicz_statuses() {
        let rep = lichnerowicz_report(6.0, &[6.0, 5.0, 7.0]);
        assert_eq!(rep.entries[0].status, LichnerowiczStatus::Boundary);
        assert!(rep.entries[0].note.contains("∇V"));
        assert_eq!(rep.entries[1].status, LichnerowiczStatus::Violation);
        assert_eq!(rep.entries[2].status, LichnerowiczStatus::Satisfied);
    }
}
