//! Gate and state fidelities, and the exponential fit used for the
//! noise-strength sweep.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{BasisTag, ComplexOperator, StateVector};
use crate::path::GateSpec;

/// Slack allowed above 1 before a fidelity is considered invalid.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// Fidelity values at checkpoint times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FidelityTrace {
    /// Validates values against `[−slack, 1 + slack]` and clips them to
    /// `[0, 1]`.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        let mut clipped = Vec::with_capacity(values.len());
        for (t, v) in times.iter().zip(&values) {
            if !(*v >= -FIDELITY_SLACK && *v <= 1.0 + FIDELITY_SLACK) {
                return Err(Error::invalid(format!("fidelity {v} at t = {t:e} s is outside [0, 1]")));
            }
            clipped.push(v.clamp(0.0, 1.0));
        }
        Ok(Self { times, values: clipped })
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("non-empty trace")
    }
}

/// `M_ij = ⟨L_i| U |L_j⟩` from propagated columns `U|L_j⟩` (one per column
/// of `columns`) and the logical basis `L`.
pub fn logical_block(columns: &Array2<C64>, logical: &[StateVector]) -> Result<ComplexOperator> {
    let l = logical.len();
    if columns.ncols() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            found: columns.ncols(),
        });
    }
    let mut m = Array2::zeros((l, l));
    for (i, li) in logical.iter().enumerate() {
        if li.dim() != columns.nrows() {
            return Err(Error::DimensionMismatch {
                expected: li.dim(),
                found: columns.nrows(),
            });
        }
        for j in 0..l {
            m[[i, j]] = li
                .amplitudes()
                .iter()
                .zip(columns.column(j))
                .map(|(a, b)| a.conj() * b)
                .sum();
        }
    }
    let basis = if l == 2 { BasisTag::Logical } else { BasisTag::Plain { dim: l } };
    ComplexOperator::new(basis, m)
}

/// `F̄ = [Tr(M†M) + |Tr M|²] / (l(l+1))` with `M = U_T† P U P`, where
/// `block` is `P U P` written on the logical basis.
pub fn average_gate_fidelity(block: &ComplexOperator, target: &ComplexOperator) -> Result<f64> {
    if block.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: block.dim(),
        });
    }
    let l = block.dim() as f64;
    let m = target.dagger().matrix().dot(block.matrix());
    let tr: C64 = m.diag().iter().sum();
    let tmm: f64 = m.iter().map(|v| v.norm_sqr()).sum();
    Ok((tmm + tr.norm_sqr()) / (l * (l + 1.0)))
}

/// π-phase, NOT and Hadamard gates with their path parameters.
pub fn target_gates() -> [GateSpec; 3] {
    [GateSpec::pi_phase(), GateSpec::not(), GateSpec::hadamard()]
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &ComplexOperator, target: &StateVector) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: rho.dim(),
        });
    }
    if rho.hermiticity_defect() > 1e-10 {
        return Err(Error::invalid("density matrix is not Hermitian"));
    }
    let v = rho.element(target, target)?;
    debug_assert!(v.im.abs() < 1e-12);
    Ok(v.re)
}

/// Least-squares fit of `F = a·e^{−bR} + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms: f64,
    /// False when the data carry no decay (then `a = 0`, `b = 0`).
    pub b_identifiable: bool,
    pub iterations: usize,
}

impl ExpFit {
    pub fn eval(&self, r: f64) -> f64 {
        self.a * (-self.b * r).exp() + self.c
    }
}

const LM_MAX_ITER: usize = 500;

/// Levenberg–Marquardt fit seeded by log-linearization.
///
/// The seed fixes `c` just beyond the last point (in the direction the data
/// move) and regresses `ln|F − c|` on `R`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExpFit> {
    if points.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 points, got {}", points.len())));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("abscissae must be distinct"));
    }
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::invalid("non-finite data"));
    }
    let n = pts.len() as f64;
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let spread = pts.iter().map(|p| (p.1 - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-14 * mean.abs().max(1.0) {
        return Ok(ExpFit {
            a: 0.0,
            b: 0.0,
            c: mean,
            rms: rms(&pts, [0.0, 0.0, mean]),
            b_identifiable: false,
            iterations: 0,
        });
    }

    let seed = log_linear_seed(&pts);
    let (p, it) = levenberg_marquardt(&pts, seed);
    let r = rms(&pts, p);
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailed { rms: r });
    }
    // a decay too small to resolve against the residual leaves b free
    let x0 = pts[0].0;
    let x1 = pts[pts.len() - 1].0;
    let swing = (p[0] * ((-p[1] * x0).exp() - (-p[1] * x1).exp())).abs();
    let identifiable = swing > 10.0 * r && p[1].abs() > 1e-12;
    if r > 10.0 * spread {
        return Err(Error::FitFailed { rms: r });
    }
    Ok(ExpFit {
        a: p[0],
        b: p[1],
        c: p[2],
        rms: r,
        b_identifiable: identifiable,
        iterations: it,
    })
}

fn rms(pts: &[(f64, f64)], p: [f64; 3]) -> f64 {
    let s: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let r = p[0] * (-p[1] * x).exp() + p[2] - y;
            r * r
        })
        .sum();
    (s / pts.len() as f64).sqrt()
}

fn log_linear_seed(pts: &[(f64, f64)]) -> [f64; 3] {
    let first = pts[0].1;
    let last = pts[pts.len() - 1].1;
    let range = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        - pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let dir = if last >= first { 1.0 } else { -1.0 };
    let extreme = if dir > 0.0 {
        pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    } else {
        pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    };
    let c0 = extreme + dir * 0.05 * range;
    // ln|y − c0| = ln|a| − b x
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 - c0).abs().max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let b0 = -slope;
    let a0 = -dir * (my - slope * mx).exp();
    [a0, b0, c0]
}

fn levenberg_marquardt(pts: &[(f64, f64)], start: [f64; 3]) -> ([f64; 3], usize) {
    let cost = |p: &[f64; 3]| -> f64 {
        pts.iter()
            .map(|&(x, y)| {
                let r = p[0] * (-p[1] * x).exp() + p[2] - y;
                r * r
            })
            .sum()
    };
    let mut p = start;
    let mut c = cost(&p);
    let mut mu = 1e-3;
    let mut it = 0;
    while it < LM_MAX_ITER {
        it += 1;
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for &(x, y) in pts {
            let e = (-p[1] * x).exp();
            let r = p[0] * e + p[2] - y;
            let j = Vector3::new(e, -p[0] * x * e, 1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        if jtr.amax() < 1e-300 {
            break;
        }
        let mut improved = false;
        for _ in 0..60 {
            let mut a = jtj;
            for k in 0..3 {
                a[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-jtr)) else {
                mu *= 10.0;
                continue;
            };
            let q = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let cq = cost(&q);
            if cq.is_finite() && cq < c {
                let rel = (c - cq) / c.max(1e-300);
                let small_step = step.iter().zip(&p).all(|(s, v)| s.abs() <= 1e-14 * v.abs().max(1e-10));
                p = q;
                c = cq;
                mu = (mu * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-15 || small_step {
                    return (p, it);
                }
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (p, it)
}

/// Least-squares polynomial coefficients `c₀ + c₁x + … + c_d x^d`.
pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<Vec<f64>> {
    if points.len() <= degree {
        return Err(Error::invalid(format!(
            "degree {degree} fit needs more than {degree} points, got {}",
            points.len()
        )));
    }
    let a = DMatrix::from_fn(points.len(), degree + 1, |i, j| points[i].0.powi(j as i32));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = a.svd(true, true);
    let c = svd.solve(&y, 1e-14).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(c.iter().copied().collect())
}
