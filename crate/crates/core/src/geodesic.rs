//! Geodesic flow and joint geodesic + parallel-frame + Jacobi integration.
//!
//! The integrator is an adaptive Dormand–Prince 5(4) pair. The Jacobi system
//! is expressed in a parallel-transported orthonormal frame along γ, where
//! covariant derivatives of frame components are plain derivatives and the
//! Jacobi equation is ÿ = −A(t) y with A_ab = R(E_b, γ', E_a, γ').

use nalgebra::{DMatrix, DVector};

use crate::chart::MetricChart;
use crate::curvature::{assemble_christoffel, assemble_riemann};
use crate::error::{Error, Result};
use crate::frame::SubspaceFrame;
use crate::linalg;

/// Default local error tolerance of the adaptive integrator.
pub const DEFAULT_ODE_TOL: f64 = 1e-10;

const MAX_STEPS: usize = 200_000;

/// Position and velocity along a geodesic at parameter `time`.
#[derive(Clone, Debug)]
pub struct GeodesicState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub time: f64,
    /// |g(γ',γ') − g(γ'(0),γ'(0))| observed at the end point.
    pub speed_drift: f64,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type Rhs<'a> = &'a mut dyn FnMut(&[f64], &mut [f64]) -> Result<()>;

/// Adaptive DP5(4) driver over a boxed right-hand side.
struct Dopri<'a> {
    rhs: Rhs<'a>,
    y: Vec<f64>,
    t: f64,
    h: f64,
    tol: f64,
    steps: usize,
}

impl<'a> Dopri<'a> {
    fn new(rhs: Rhs<'a>, y0: Vec<f64>, tol: f64) -> Self {
        Dopri {
            rhs,
            y: y0,
            t: 0.0,
            h: 1e-3,
            tol,
            steps: 0,
        }
    }

    /// Integrates to exactly `t_target`, invoking `on_accept` after each
    /// accepted step.
    fn advance_to(
        &mut self,
        t_target: f64,
        mut on_accept: impl FnMut(f64, &[f64]) -> Result<()>,
    ) -> Result<()> {
        let dim = self.y.len();
        let mut k = vec![vec![0.0; dim]; 7];
        let mut ytmp = vec![0.0; dim];
        let mut y5 = vec![0.0; dim];
        let direction = (t_target - self.t).signum();
        if direction == 0.0 {
            return Ok(());
        }
        while (t_target - self.t) * direction > 1e-15 {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(Error::StepFailure { t: self.t });
            }
            let mut h = self.h.min((t_target - self.t).abs()).max(1e-14);
            h *= direction;
            (self.rhs)(&self.y, &mut k[0])?;
            for stage in 0..6 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for s in 0..=stage {
                        acc += A[stage][s] * k[s][i];
                    }
                    ytmp[i] = self.y[i] + h * acc;
                }
                let _ = C[stage];
                (self.rhs)(&ytmp, &mut k[stage + 1])?;
            }
            let mut err_sq = 0.0;
            for i in 0..dim {
                let mut acc5 = 0.0;
                let mut acc4 = 0.0;
                for s in 0..7 {
                    acc5 += B5[s] * k[s][i];
                    acc4 += B4[s] * k[s][i];
                }
                y5[i] = self.y[i] + h * acc5;
                let scale = self.tol * (1.0 + self.y[i].abs().max(y5[i].abs()));
                let e = h * (acc5 - acc4) / scale;
                err_sq += e * e;
            }
            let err = (err_sq / dim as f64).sqrt();
            if err <= 1.0 {
                self.t += h;
                self.y.copy_from_slice(&y5);
                on_accept(self.t, &self.y)?;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                self.h = (h * grow).abs();
            } else {
                let shrink = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                self.h = (h * shrink).abs();
                if self.h < 1e-14 {
                    return Err(Error::StepFailure { t: self.t });
                }
            }
        }
        Ok(())
    }
}

fn map_exit(err: Error, t: f64) -> Error {
    match err {
        Error::OutOfDomain { point, .. } => Error::ChartExit { t, point },
        other => other,
    }
}

/// Integrates ẍ^k + Γ^k_{ij} ẋ^i ẋ^j = 0 from (p, u) to parameter `t_end`.
pub fn geodesic_flow(
    chart: &MetricChart,
    p: &[f64],
    u: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<GeodesicState> {
    let n = chart.dim();
    if p.len() != n || u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len().max(u.len()),
        });
    }
    let g0 = chart.metric_at(p)?.metric;
    let u0 = DVector::from_column_slice(u);
    let speed0 = linalg::inner(&g0, &u0, &u0);

    let mut y0 = Vec::with_capacity(2 * n);
    y0.extend_from_slice(p);
    y0.extend_from_slice(u);

    let mut rhs = |y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (x, v) = y.split_at(n);
        let (at, first) = chart.first_jet(x)?;
        let gamma = assemble_christoffel(&at.inverse, &first);
        dy[..n].copy_from_slice(v);
        for kk in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += gamma.get(kk, i, j) * v[i] * v[j];
                }
            }
            dy[n + kk] = -acc;
        }
        Ok(())
    };

    let mut solver = Dopri::new(&mut rhs, y0, tol);
    let mut current_t = 0.0;
    solver
        .advance_to(t_end, |t, _| {
            current_t = t;
            Ok(())
        })
        .map_err(|e| map_exit(e, current_t))?;

    let (x, v) = solver.y.split_at(n);
    let g1 = chart.metric_at(x).map_err(|e| map_exit(e, t_end))?.metric;
    let v1 = DVector::from_column_slice(v);
    let speed_drift = (linalg::inner(&g1, &v1, &v1) - speed0).abs();
    Ok(GeodesicState {
        position: x.to_vec(),
        velocity: v.to_vec(),
        time: t_end,
        speed_drift,
    })
}

/// Jacobi data at one parameter value, in the parallel frame along γ.
#[derive(Clone, Debug)]
pub struct JacobiBlock {
    pub t: f64,
    pub state: GeodesicState,
    /// Columns: parallel frame vectors in chart coordinates at γ(t).
    pub frame: DMatrix<f64>,
    /// Frame components of the Jacobi fields (n rows × k columns).
    pub j: DMatrix<f64>,
    pub j_prime: DMatrix<f64>,
    /// Max |Eᵀ g E − I| at γ(t).
    pub frame_drift: f64,
}

/// Incremental integrator of the joint geodesic + parallel frame + Jacobi
/// system with J(0) = 0 and J'(0) prescribed in frame components.
pub struct JacobiFlow<'c> {
    chart: &'c MetricChart,
    n: usize,
    k: usize,
    speed0: f64,
    y: Vec<f64>,
    t: f64,
    h: f64,
    tol: f64,
    /// Left multiplier L (k×n): det(L·J) is monitored for sign changes,
    /// signalling a conjugate point along the integrated directions.
    monitor: Option<DMatrix<f64>>,
    monitor_sign: f64,
    frame0: DMatrix<f64>,
}

impl<'c> JacobiFlow<'c> {
    /// The initial frame puts γ' last; `jp0_frame` holds the initial J'
    /// columns in frame components.
    pub fn new(
        chart: &'c MetricChart,
        p: &[f64],
        u: &[f64],
        jp0_frame: DMatrix<f64>,
        tol: f64,
        monitor: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = chart.dim();
        let at = chart.metric_at(p)?;
        let u_vec = DVector::from_column_slice(u);
        let speed0 = linalg::inner(&at.metric, &u_vec, &u_vec);
        if (speed0 - 1.0).abs() > 1e-8 {
            return Err(Error::NotUnit {
                norm: speed0.sqrt(),
            });
        }
        // Orthonormal frame with γ' last.
        let sub = SubspaceFrame::build(p.to_vec(), at.metric.clone(), std::slice::from_ref(&u_vec))?;
        let mut cols: Vec<DVector<f64>> = sub.normal().to_vec();
        cols.push(sub.plane()[0].clone());
        let frame = DMatrix::from_columns(&cols);

        let k = jp0_frame.ncols();
        assert_eq!(jp0_frame.nrows(), n);

        let mut y = Vec::with_capacity(2 * n + n * n + 2 * n * k);
        y.extend_from_slice(p);
        y.extend_from_slice(u);
        y.extend_from_slice(frame.as_slice()); // column-major
        y.extend(std::iter::repeat_n(0.0, n * k)); // J(0) = 0
        y.extend_from_slice(jp0_frame.as_slice());

        Ok(JacobiFlow {
            chart,
            n,
            k,
            speed0,
            y,
            t: 0.0,
            h: 1e-3,
            tol,
            monitor,
            monitor_sign: 0.0,
            frame0: frame,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Initial parallel frame (γ' last), columns in chart coordinates.
    pub fn initial_frame(&self) -> &DMatrix<f64> {
        &self.frame0
    }

    fn unpack(&self, y: &[f64], t: f64) -> Result<JacobiBlock> {
        let n = self.n;
        let k = self.k;
        let x = &y[..n];
        let v = &y[n..2 * n];
        let frame = DMatrix::from_column_slice(n, n, &y[2 * n..2 * n + n * n]);
        let j = DMatrix::from_column_slice(n, k, &y[2 * n + n * n..2 * n + n * n + n * k]);
        let jp = DMatrix::from_column_slice(n, k, &y[2 * n + n * n + n * k..]);
        let g = self.chart.metric_at(x).map_err(|e| map_exit(e, t))?.metric;
        let v1 = DVector::from_column_slice(v);
        let speed_drift = (linalg::inner(&g, &v1, &v1) - self.speed0).abs();
        let frame_drift = linalg::identity_defect(&(frame.transpose() * &g * &frame));
        Ok(JacobiBlock {
            t,
            state: GeodesicState {
                position: x.to_vec(),
                velocity: v.to_vec(),
                time: t,
                speed_drift,
            },
            frame,
            j,
            j_prime: jp,
            frame_drift,
        })
    }

    /// Advances to `t_target` (monotone increasing across calls).
    pub fn advance_to(&mut self, t_target: f64) -> Result<JacobiBlock> {
        let n = self.n;
        let k = self.k;
        let chart = self.chart;
        let mut rhs = move |y: &[f64], dy: &mut [f64]| -> Result<()> {
            let x = &y[..n];
            let v = &y[n..2 * n];
            let e = &y[2 * n..2 * n + n * n];
            let jmat = &y[2 * n + n * n..2 * n + n * n + n * k];
            let jp = &y[2 * n + n * n + n * k..];

            let jet = chart.second_jet(x)?;
            let (gamma, riemann) = assemble_riemann(&jet);

            // ẋ = v
            dy[..n].copy_from_slice(v);
            // v̇ = −Γ(v, v)
            for kk in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for jj in 0..n {
                        acc += gamma.get(kk, i, jj) * v[i] * v[jj];
                    }
                }
                dy[n + kk] = -acc;
            }
            // Parallel transport of frame columns: Ė = −Γ(v, E).
            for col in 0..n {
                for kk in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        for jj in 0..n {
                            acc += gamma.get(kk, i, jj) * v[i] * e[col * n + jj];
                        }
                    }
                    dy[2 * n + col * n + kk] = -acc;
                }
            }
            // M_ik = R[i,j,k,l] v^j v^l, then A = Eᵀ M E in frame indices.
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for kk in 0..n {
                    let mut acc = 0.0;
                    for jj in 0..n {
                        if v[jj] == 0.0 {
                            continue;
                        }
                        for l in 0..n {
                            acc += riemann.at(i, jj, kk, l) * v[jj] * v[l];
                        }
                    }
                    m[(i, kk)] = acc;
                }
            }
            let e_mat = DMatrix::from_column_slice(n, n, e);
            let a_mat = e_mat.transpose() * m * e_mat;

            // J̇ = J', J̇' = −A J.
            let off_j = 2 * n + n * n;
            let off_jp = off_j + n * k;
            dy[off_j..off_jp].copy_from_slice(jp);
            for col in 0..k {
                for row in 0..n {
                    let mut acc = 0.0;
                    for s in 0..n {
                        acc += a_mat[(row, s)] * jmat[col * n + s];
                    }
                    dy[off_jp + col * n + row] = -acc;
                }
            }
            Ok(())
        };

        let mut solver = Dopri {
            rhs: &mut rhs,
            y: std::mem::take(&mut self.y),
            t: self.t,
            h: self.h,
            tol: self.tol,
            steps: 0,
        };
        let monitor = self.monitor.clone();
        let mut monitor_sign = self.monitor_sign;
        let mut conjugate_at: Option<f64> = None;
        let result = solver.advance_to(t_target, |t, y| {
            if let Some(l) = &monitor {
                let j = DMatrix::from_column_slice(n, k, &y[2 * n + n * n..2 * n + n * n + n * k]);
                let det = (l * j).determinant();
                if t > 1e-6 {
                    if monitor_sign == 0.0 && det != 0.0 {
                        monitor_sign = det.signum();
                    } else if monitor_sign != 0.0 && det.signum() != monitor_sign {
                        conjugate_at = Some(t);
                        return Err(Error::ConjugatePoint { t });
                    }
                }
            }
            Ok(())
        });
        self.y = std::mem::take(&mut solver.y);
        self.t = solver.t;
        self.h = solver.h;
        self.monitor_sign = monitor_sign;
        match result {
            Ok(()) => self.unpack(&self.y.clone(), self.t),
            Err(e) => {
                if let Some(t) = conjugate_at {
                    Err(Error::ConjugatePoint { t })
                } else {
                    Err(map_exit(e, self.t))
                }
            }
        }
    }

}

/// Joint integration with the full Jacobi matrix: J(0) = 0, J'(0) = I in the
/// parallel frame (γ' last).
pub fn jacobi_transport(
    chart: &MetricChart,
    p: &[f64],
    u: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<JacobiBlock> {
    let n = chart.dim();
    let mut flow = JacobiFlow::new(
        chart,
        p,
        u,
        DMatrix::identity(n, n),
        tol,
        Some(DMatrix::identity(n, n)),
    )?;
    flow.advance_to(t_end)
}
