//! Curvature tensors at a point: Christoffel symbols, Riemann, Ricci, scalar,
//! and sectional curvature.
//!
//! Index convention, fixed once for the whole crate: the stored rank-4 array
//! satisfies `K(e_i, e_j) = R[i,j,i,j]` for orthonormal `e_i, e_j`, and the
//! sectional curvature of a general pair is the quadratic pairing
//! `R(u,v,u,v)` over the Gram normalizer. A space form of curvature κ has
//! `R[i,j,k,l] = κ(δ_ik δ_jl − δ_il δ_jk)` in any orthonormal frame. One
//! convention test (unit sphere gives `K = +1`) guards the sign everywhere.

use nalgebra::{DMatrix, DVector};

use crate::chart::{MetricChart, MetricJet};
use crate::error::{Error, Result};
use crate::linalg;

/// Gram-determinant threshold below which a 2-plane is rejected.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-12;

/// Rank-3 array of connection coefficients Γ^k_{ij}.
#[derive(Clone, Debug)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    /// Max |Γ^k_{ij} − Γ^k_{ji}|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..i {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// All-covariant curvature components in a fixed frame, with the Gram matrix
/// of that frame (identity when orthonormal).
#[derive(Clone, Debug)]
pub struct AlgebraicCurvature {
    n: usize,
    comps: Vec<f64>,
    frame_metric: DMatrix<f64>,
}

/// Worst-case residuals of the algebraic curvature symmetries.
#[derive(Clone, Copy, Debug)]
pub struct SymmetryDefects {
    pub antisymmetry_first: f64,
    pub antisymmetry_last: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        self.antisymmetry_first
            .max(self.antisymmetry_last)
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
    }
}

impl AlgebraicCurvature {
    pub fn zeros(n: usize, frame_metric: DMatrix<f64>) -> Self {
        assert_eq!(frame_metric.nrows(), n);
        AlgebraicCurvature {
            n,
            comps: vec![0.0; n * n * n * n],
            frame_metric,
        }
    }

    pub fn zeros_orthonormal(n: usize) -> Self {
        Self::zeros(n, DMatrix::identity(n, n))
    }

    pub fn from_fn(
        n: usize,
        frame_metric: DMatrix<f64>,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut r = Self::zeros(n, frame_metric);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r.set(i, j, k, l, f(i, j, k, l));
                    }
                }
            }
        }
        r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn frame_metric(&self) -> &DMatrix<f64> {
        &self.frame_metric
    }

    pub fn frame_metric_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.frame_metric
    }

    pub fn is_orthonormal_frame(&self) -> bool {
        linalg::identity_defect(&self.frame_metric) < 1e-12
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[((i * self.n + j) * self.n + k) * self.n + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.comps[((i * self.n + j) * self.n + k) * self.n + l] = v;
    }

    /// Full multilinear evaluation R(u, v, w, z).
    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if v[j] == 0.0 {
                    continue;
                }
                let uv = u[i] * v[j];
                for k in 0..n {
                    if w[k] == 0.0 {
                        continue;
                    }
                    let uvw = uv * w[k];
                    for l in 0..n {
                        acc += self.at(i, j, k, l) * uvw * z[l];
                    }
                }
            }
        }
        acc
    }

    /// Sectional-curvature numerator R(u, v, u, v).
    pub fn sectional_numerator(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.eval(u, v, u, v)
    }

    /// Sectional curvature of span{u, v} in this frame's metric.
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let g = &self.frame_metric;
        let guu = linalg::inner(g, u, u);
        let gvv = linalg::inner(g, v, v);
        let guv = linalg::inner(g, u, v);
        let gram = guu * gvv - guv * guv;
        if gram <= DEGENERATE_PLANE_TOL {
            return Err(Error::DegeneratePlane { gram_det: gram });
        }
        Ok(self.sectional_numerator(u, v) / gram)
    }

    /// Sectional curvature of the plane of two orthonormal frame axes.
    pub fn frame_sectional(&self, i: usize, j: usize) -> f64 {
        self.at(i, j, i, j)
    }

    /// Ricci matrix: the (1,3)-trace with the inverse frame metric.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut out = DMatrix::zeros(n, n);
        if self.is_orthonormal_frame() {
            for j in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += self.at(i, j, i, l);
                    }
                    out[(j, l)] = s;
                }
            }
            return out;
        }
        let ginv = invert_gram(&self.frame_metric);
        for j in 0..n {
            for l in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        s += ginv[(i, k)] * self.at(i, j, k, l);
                    }
                }
                out[(j, l)] = s;
            }
        }
        out
    }

    /// Scalar curvature: g-trace of the Ricci matrix.
    pub fn scalar(&self) -> f64 {
        let ric = self.ricci();
        if self.is_orthonormal_frame() {
            return ric.trace();
        }
        let ginv = invert_gram(&self.frame_metric);
        (ginv * ric).trace()
    }

    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let n = self.n;
        let mut d = SymmetryDefects {
            antisymmetry_first: 0.0,
            antisymmetry_last: 0.0,
            pair_symmetry: 0.0,
            first_bianchi: 0.0,
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.at(i, j, k, l);
                        d.antisymmetry_first =
                            d.antisymmetry_first.max((r + self.at(j, i, k, l)).abs());
                        d.antisymmetry_last =
                            d.antisymmetry_last.max((r + self.at(i, j, l, k)).abs());
                        d.pair_symmetry = d.pair_symmetry.max((r - self.at(k, l, i, j)).abs());
                        let cyc = r + self.at(i, k, l, j) + self.at(i, l, j, k);
                        d.first_bianchi = d.first_bianchi.max(cyc.abs());
                    }
                }
            }
        }
        d
    }

    /// Components in a new frame whose columns (in the current frame) are
    /// `basis`; the frame metric transforms accordingly.
    pub fn change_basis(&self, basis: &DMatrix<f64>) -> AlgebraicCurvature {
        let n = self.n;
        assert_eq!(basis.nrows(), n);
        assert_eq!(basis.ncols(), n);
        // Contract one slot at a time: n^5 instead of n^8.
        let mut cur = self.comps.clone();
        for _slot in 0..4 {
            // Transform the leading index, then rotate indices (ijkl) -> (jkli).
            let mut next = vec![0.0; n * n * n * n];
            for a in 0..n {
                for rest in 0..n * n * n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += basis[(i, a)] * cur[i * n * n * n + rest];
                    }
                    // new layout: (j,k,l,a)
                    next[rest * n + a] = s;
                }
            }
            cur = next;
        }
        let new_metric = basis.transpose() * &self.frame_metric * basis;
        AlgebraicCurvature {
            n,
            comps: cur,
            frame_metric: new_metric,
        }
    }

    /// Re-express in a g-orthonormal frame built from the frame metric.
    pub fn to_orthonormal(&self) -> Result<OrthonormalizedCurvature> {
        if self.is_orthonormal_frame() {
            let n = self.n;
            return Ok(OrthonormalizedCurvature {
                tensor: self.clone(),
                basis: DMatrix::identity(n, n),
                into_frame: DMatrix::identity(n, n),
            });
        }
        let basis = linalg::orthonormal_basis_from_metric(&self.frame_metric).ok_or_else(|| {
            Error::SingularMetric {
                point: vec![],
                detail: "frame metric not positive definite".into(),
            }
        })?;
        let mut tensor = self.change_basis(&basis);
        let defect = linalg::identity_defect(&tensor.frame_metric);
        if defect > 1e-10 {
            return Err(Error::NotOrthonormal { defect });
        }
        tensor.frame_metric = DMatrix::identity(self.n, self.n);
        let into_frame = basis.clone().try_inverse().ok_or(Error::NotOrthonormal {
            defect: f64::INFINITY,
        })?;
        Ok(OrthonormalizedCurvature {
            tensor,
            basis,
            into_frame,
        })
    }
}

/// Curvature re-expressed in an orthonormal frame, with the change of basis.
#[derive(Clone, Debug)]
pub struct OrthonormalizedCurvature {
    /// Components in the orthonormal frame (frame metric = identity).
    pub tensor: AlgebraicCurvature,
    /// Columns: frame vectors in the original coordinates.
    pub basis: DMatrix<f64>,
    /// Maps coordinate components to frame components (`basis⁻¹`).
    pub into_frame: DMatrix<f64>,
}

impl OrthonormalizedCurvature {
    pub fn vector_to_frame(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.into_frame * v
    }
}

fn invert_gram(g: &DMatrix<f64>) -> DMatrix<f64> {
    g.clone()
        .try_inverse()
        .expect("frame metric must be invertible")
}

/// Point-level curvature data of a chart.
#[derive(Clone, Debug)]
pub struct PointCurvature {
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub christoffel: Christoffel,
    /// Coordinate-frame curvature; `frame_metric` is the metric at the point.
    pub riemann: AlgebraicCurvature,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl PointCurvature {
    /// Sectional curvature of span{u, v} at this point (coordinate vectors).
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        self.riemann.sectional(u, v)
    }
}

/// Γ^k_{ij} = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij).
pub(crate) fn assemble_christoffel(inverse: &DMatrix<f64>, first: &[DMatrix<f64>]) -> Christoffel {
    let n = inverse.nrows();
    let mut gamma = Christoffel::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for l in 0..n {
                    let term = first[i][(j, l)] + first[j][(i, l)] - first[l][(i, j)];
                    s += inverse[(k, l)] * term;
                }
                let v = 0.5 * s;
                gamma.set(k, i, j, v);
                gamma.set(k, j, i, v);
            }
        }
    }
    gamma
}

/// Riemann tensor from a full metric jet, in the crate storage convention.
pub(crate) fn assemble_riemann(jet: &MetricJet) -> (Christoffel, AlgebraicCurvature) {
    let n = jet.metric.nrows();
    let gamma = assemble_christoffel(&jet.inverse, &jet.first);

    // ∂_m g^{kl} = − g^{ka} g^{lb} ∂_m g_ab
    let mut dinv = vec![DMatrix::zeros(n, n); n];
    for m in 0..n {
        dinv[m] = -(&jet.inverse * &jet.first[m] * &jet.inverse);
    }

    // ∂_m Γ^k_{ij}
    let mut dgamma = vec![Christoffel::zeros(n); n];
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..=i {
                    let mut s = 0.0;
                    for l in 0..n {
                        let sym = jet.first[i][(j, l)] + jet.first[j][(i, l)] - jet.first[l][(i, j)];
                        let dsym = jet.second[m][i][(j, l)] + jet.second[m][j][(i, l)]
                            - jet.second[m][l][(i, j)];
                        s += dinv[m][(k, l)] * sym + jet.inverse[(k, l)] * dsym;
                    }
                    let v = 0.5 * s;
                    dgamma[m].set(k, i, j, v);
                    dgamma[m].set(k, j, i, v);
                }
            }
        }
    }

    // R(∂_i,∂_j)∂_k = R^l_{·kij} ∂_l with
    // R^l_{·kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}
    // Stored all-covariant so that K(e_i,e_j) = R[i,j,i,j]:
    //   R[i,j,k,l] = g(R(∂_i,∂_j)∂_l, ∂_k) = Σ_m g_km R^m_{·lij}
    let mut up = vec![0.0; n * n * n * n]; // up[(l,k,i,j)] = R^l_{·kij}
    let idx = |l: usize, k: usize, i: usize, j: usize| ((l * n + k) * n + i) * n + j;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                    for m in 0..n {
                        v += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    up[idx(l, k, i, j)] = v;
                }
            }
        }
    }

    let mut riemann = AlgebraicCurvature::zeros(n, jet.metric.clone());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += jet.metric[(k, m)] * up[idx(m, l, i, j)];
                    }
                    riemann.set(i, j, k, l, v);
                }
            }
        }
    }
    (gamma, riemann)
}

/// Christoffel symbols of a chart at a point (first-derivative dual pass).
pub fn christoffel(chart: &MetricChart, x: &[f64]) -> Result<Christoffel> {
    let (at, first) = chart.first_jet(x)?;
    Ok(assemble_christoffel(&at.inverse, &first))
}

/// Full curvature data of a chart at a point (nested-dual pass).
pub fn riemann_at(chart: &MetricChart, x: &[f64]) -> Result<PointCurvature> {
    let jet = chart.second_jet(x)?;
    let (gamma, riemann) = assemble_riemann(&jet);
    let ricci = riemann.ricci();
    let scalar = (&jet.inverse * &ricci).trace();
    Ok(PointCurvature {
        point: x.to_vec(),
        metric: jet.metric,
        metric_inv: jet.inverse,
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Scalar;
    use crate::chart::{euclidean_chart, SmoothMetric};
    use approx::assert_relative_eq;

    pub(crate) struct PolarSphere {
        pub radius: f64,
    }

    impl SmoothMetric for PolarSphere {
        fn dim(&self) -> usize {
            2
        }
        fn eval<S: Scalar>(&self, x: &[S], g: &mut [S]) {
            let r2 = S::from_f64(self.radius * self.radius);
            let s = x[0].sin();
            g[0] = r2;
            g[1] = S::zero();
            g[2] = S::zero();
            g[3] = r2 * s * s;
        }
    }

    fn polar_sphere_chart(radius: f64) -> MetricChart {
        MetricChart::new(
            "sphere_polar",
            vec![(0.2, std::f64::consts::PI - 0.2), (-4.0, 4.0)],
            PolarSphere { radius },
        )
    }

    #[test]
    fn euclidean_curvature_vanishes() {
        let chart = euclidean_chart(3, 2.0);
        let pc = riemann_at(&chart, &[0.1, -0.3, 0.7]).unwrap();
        assert!(pc.christoffel.data.iter().all(|v| v.abs() < 1e-15));
        assert!(pc.riemann.comps.iter().all(|v| v.abs() < 1e-15));
        assert!(linalg::max_abs(&pc.ricci) < 1e-15);
        assert!(pc.scalar.abs() < 1e-15);
    }

    #[test]
    fn sphere_christoffel_regression() {
        // Hand values for the unit 2-sphere polar chart:
        // Γ^θ_{φφ} = −sinθ cosθ, Γ^φ_{θφ} = cotθ.
        let chart = polar_sphere_chart(1.0);
        let theta = 1.05;
        let gamma = christoffel(&chart, &[theta, 0.3]).unwrap();
        assert_relative_eq!(gamma.get(0, 1, 1), -theta.sin() * theta.cos(), epsilon = 1e-13);
        assert_relative_eq!(gamma.get(1, 0, 1), theta.cos() / theta.sin(), epsilon = 1e-13);
        assert!(gamma.symmetry_defect() < 1e-14);
    }

    #[test]
    fn unit_sphere_convention_test() {
        // The single sign-convention guard: unit sphere has K = +1, Scal = 2.
        let chart = polar_sphere_chart(1.0);
        let pc = riemann_at(&chart, &[0.9, -0.2]).unwrap();
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 1.0]);
        assert_relative_eq!(pc.sectional(&u, &v).unwrap(), 1.0, epsilon = 1e-11);
        assert_relative_eq!(pc.scalar, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn scaled_sphere_scalar() {
        let chart = polar_sphere_chart(2.0);
        let pc = riemann_at(&chart, &[1.3, 1.1]).unwrap();
        // K = 1/R² = 1/4, Scal = n(n−1)K = 1/2.
        assert_relative_eq!(pc.scalar, 0.5, epsilon = 1e-11);
    }

    #[test]
    fn trace_consistency() {
        let chart = polar_sphere_chart(1.0);
        let pc = riemann_at(&chart, &[0.7, 0.0]).unwrap();
        let ric = pc.riemann.ricci();
        assert!(linalg::max_abs(&(&ric - &pc.ricci)) < 1e-12);
        assert_relative_eq!(pc.riemann.scalar(), pc.scalar, epsilon = 1e-11);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let r = AlgebraicCurvature::zeros_orthonormal(3);
        let u = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![1.0, 1e-8, 0.0]);
        assert_eq!(
            r.sectional(&u, &v).unwrap_err().code(),
            "degenerate_plane"
        );
    }

    #[test]
    fn orthonormalization_preserves_sectional() {
        let chart = polar_sphere_chart(1.0);
        let pc = riemann_at(&chart, &[1.2, 0.5]).unwrap();
        let ortho = pc.riemann.to_orthonormal().unwrap();
        assert!(ortho.tensor.is_orthonormal_frame());
        assert_relative_eq!(ortho.tensor.frame_sectional(0, 1), 1.0, epsilon = 1e-11);
        // Round trip of a vector through the basis maps.
        let v = DVector::from_vec(vec![0.3, -0.8]);
        let back = &ortho.basis * ortho.vector_to_frame(&v);
        assert!((back - v).norm() < 1e-12);
    }
}
