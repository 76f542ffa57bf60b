//! Lindblad master-equation propagation.

use std::cell::RefCell;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{ode, Hamiltonian, SnapshotKind, TimeGrid, Trajectory};
use crate::device::SystemParams;
use crate::error::{Error, Result};
use crate::fock::{annihilation_op, qutrit_op, tensor_embed, Level};
use crate::operator::{BasisTag, ComplexOperator};

/// Decay rates entering `Γ·L[O]` in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoherenceRates {
    pub gamma_d: f64,
    pub gamma_s: f64,
    pub gamma_kappa: f64,
}

impl DecoherenceRates {
    pub fn new(gamma_d: f64, gamma_s: f64, gamma_kappa: f64) -> Result<Self> {
        for (name, v) in [("gamma_d", gamma_d), ("gamma_s", gamma_s), ("gamma_kappa", gamma_kappa)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be a finite non-negative rate, got {v}")));
            }
        }
        Ok(Self {
            gamma_d,
            gamma_s,
            gamma_kappa,
        })
    }

    /// Rates quoted in kHz. With `angular` the quoted numbers are treated as
    /// linear frequencies and multiplied by 2π; otherwise 1 kHz = 10³ s⁻¹.
    pub fn from_khz(d: f64, s: f64, kappa: f64, angular: bool) -> Result<Self> {
        let f = 1e3 * if angular { 2.0 * std::f64::consts::PI } else { 1.0 };
        Self::new(d * f, s * f, kappa * f)
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_d == 0.0 && self.gamma_s == 0.0 && self.gamma_kappa == 0.0
    }
}

/// A jump operator with its rate.
#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub label: &'static str,
    pub op: ComplexOperator,
    pub rate: f64,
}

impl CollapseOp {
    pub fn new(label: &'static str, op: ComplexOperator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::invalid(format!("collapse rate must be non-negative, got {rate}")));
        }
        Ok(Self { label, op, rate })
    }
}

/// Dephasing `σ_ee`, `σ_ff` (Γ_d), relaxation `|g⟩⟨f|`, `|e⟩⟨f|` (Γ_s/2 each)
/// and `|g⟩⟨e|` (Γ_s), photon loss `a` (Γ_κ), embedded in the joint space.
/// Channels with zero rate are omitted.
pub fn collapse_operators(p: &SystemParams, rates: &DecoherenceRates) -> Result<Vec<CollapseOp>> {
    let n_max = p.n_max;
    let id_c = ComplexOperator::identity(BasisTag::Fock { n_max });
    let id_q = ComplexOperator::identity(BasisTag::Qutrit);
    let q = |i, j| tensor_embed(&id_c, &qutrit_op(i, j));
    let list = vec![
        ("sigma_ee", q(Level::E, Level::E)?, rates.gamma_d),
        ("sigma_ff", q(Level::F, Level::F)?, rates.gamma_d),
        ("sigma_gf", q(Level::G, Level::F)?, 0.5 * rates.gamma_s),
        ("sigma_ef", q(Level::E, Level::F)?, 0.5 * rates.gamma_s),
        ("sigma_ge", q(Level::G, Level::E)?, rates.gamma_s),
        ("a", tensor_embed(&annihilation_op(n_max)?, &id_q)?, rates.gamma_kappa),
    ];
    list.into_iter()
        .filter(|(_, _, r)| *r > 0.0)
        .map(|(l, o, r)| CollapseOp::new(l, o, r))
        .collect()
}

/// Trace tolerance checked at every checkpoint.
pub const TRACE_TOL: f64 = 1e-6;
/// Most negative eigenvalue tolerated at a checkpoint.
pub const POSITIVITY_TOL: f64 = -1e-8;

type Sparse = Vec<(usize, usize, C64)>;

fn sparse(m: &Array2<C64>) -> Sparse {
    m.indexed_iter()
        .filter(|(_, v)| v.norm() != 0.0)
        .map(|((i, j), v)| (i, j, *v))
        .collect()
}

struct LindbladRhs<'a> {
    h: &'a dyn Hamiltonian,
    d: usize,
    /// `−(i/2) Σ Γ O†O`
    anti: Sparse,
    jumps: Vec<(f64, Sparse)>,
    buf: RefCell<Sparse>,
    scratch: RefCell<Vec<C64>>,
}

impl ode::Rhs for LindbladRhs<'_> {
    fn eval(&self, t: f64, rho: &[C64], out: &mut [C64]) {
        let d = self.d;
        let mut buf = self.buf.borrow_mut();
        buf.clear();
        self.h.entries(t, &mut buf);
        buf.extend_from_slice(&self.anti);
        let mut x = self.scratch.borrow_mut();
        x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        // X = −i H_eff ρ, with ρ row-major: row axpy per entry
        for &(i, k, v) in buf.iter() {
            let w = C64::new(v.im, -v.re);
            let (src, dst) = (&rho[k * d..(k + 1) * d], &mut x[i * d..(i + 1) * d]);
            for (a, b) in dst.iter_mut().zip(src) {
                *a += w * b;
            }
        }
        // −i[H_eff ρ − ρ H_eff†] = X + X† because ρ is Hermitian
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = x[i * d + j] + x[j * d + i].conj();
            }
        }
        for (rate, op) in &self.jumps {
            // Y = O ρ (reuse scratch), then out += Γ Y O†
            x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for &(i, k, o) in op {
                let (src, dst) = (&rho[k * d..(k + 1) * d], &mut x[i * d..(i + 1) * d]);
                for (a, b) in dst.iter_mut().zip(src) {
                    *a += o * b;
                }
            }
            for &(j, l, o) in op {
                let w = o.conj() * *rate;
                for a in 0..d {
                    out[a * d + j] += w * x[a * d + l];
                }
            }
        }
    }
}

/// Propagates `ρ̇ = −i[H, ρ] + Σ Γ (OρO† − ½{O†O, ρ})`.
pub fn lindblad_propagate(
    h: &dyn Hamiltonian,
    collapse: &[CollapseOp],
    rho0: &ComplexOperator,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let basis = h.basis();
    if rho0.basis() != basis {
        return Err(Error::BasisMismatch {
            expected: basis,
            found: rho0.basis(),
        });
    }
    for c in collapse {
        if c.op.basis() != basis {
            return Err(Error::BasisMismatch {
                expected: basis,
                found: c.op.basis(),
            });
        }
    }
    if rho0.hermiticity_defect() > 1e-10 {
        return Err(Error::invalid("initial density matrix is not Hermitian"));
    }
    let tr = rho0.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::invalid(format!("initial density matrix has trace {tr}")));
    }
    let min_ev = rho0.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    if min_ev < -1e-10 {
        return Err(Error::invalid(format!("initial density matrix has eigenvalue {min_ev:e}")));
    }
    grid.validate(h)?;

    let d = h.dim();
    let mut anti = Array2::<C64>::zeros((d, d));
    let mut jumps = Vec::new();
    for c in collapse {
        if c.rate == 0.0 {
            continue;
        }
        let m = c.op.matrix();
        let odo = crate::operator::dagger(m).dot(m);
        anti.scaled_add(C64::new(0.0, -0.5 * c.rate), &odo);
        jumps.push((c.rate, sparse(m)));
    }
    let rhs = LindbladRhs {
        h,
        d,
        anti: sparse(&anti),
        jumps,
        buf: RefCell::new(Vec::with_capacity(8 * d)),
        scratch: RefCell::new(vec![C64::new(0.0, 0.0); d * d]),
    };

    let mut y: Vec<C64> = rho0.matrix().iter().copied().collect();
    let times = grid.checkpoint_times();
    let mut snapshots = vec![rho0.matrix().clone()];
    let mut drift = vec![0.0];
    let mut integrator = ode::Integrator::new(grid.scheme, y.len());
    let mut h0 = grid.step();
    let mut steps_taken = 0;
    for w in times.windows(2) {
        steps_taken += integrator.advance(&rhs, &mut y, w[0], w[1], grid.steps / grid.checkpoints, &mut h0)?;
        let rho = Array2::from_shape_vec((d, d), y.clone()).expect("d*d");
        let trace: C64 = (0..d).map(|i| rho[[i, i]]).sum();
        let dev = (trace - C64::new(1.0, 0.0)).norm();
        if dev > TRACE_TOL {
            return Err(Error::Invariant {
                quantity: "density-matrix trace",
                value: dev,
                limit: TRACE_TOL,
                t: w[1],
            });
        }
        let herm = crate::operator::frobenius(&(&rho - &crate::operator::dagger(&rho)));
        if herm > 1e-10 {
            return Err(Error::Invariant {
                quantity: "density-matrix Hermiticity defect",
                value: herm,
                limit: 1e-10,
                t: w[1],
            });
        }
        let min_ev = crate::operator::hermitian_eigenvalues(&rho)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_ev < POSITIVITY_TOL {
            return Err(Error::Invariant {
                quantity: "density-matrix minimum eigenvalue",
                value: min_ev,
                limit: POSITIVITY_TOL,
                t: w[1],
            });
        }
        snapshots.push(rho);
        drift.push(dev);
    }
    Ok(Trajectory {
        basis,
        kind: SnapshotKind::Density,
        times,
        snapshots,
        drift,
        steps_taken,
    })
}
