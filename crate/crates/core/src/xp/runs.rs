//! Single simulation runs shared by the experiments.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::device::{
    derive_drive_spec, effective_logical_states, ground_frame_correction, joint_logical_states, DriveSpec,
    EffectiveModel, JointModel, SystemParams,
};
use crate::error::Result;
use crate::evolver::{
    collapse_operators, lindblad_propagate, propagate_propagator, DecoherenceRates, TimeGrid, DEFAULT_CHECKPOINTS,
};
use crate::fock::{joint_index, DisplacedBasis, Level};
use crate::metrics::{average_gate_fidelity, logical_block, state_fidelity, FidelityTrace};
use crate::operator::{ComplexOperator, StateVector};
use crate::path::{ControlEnvelope, GateSpec, GeometricPath};

/// Rounds a step count up to a whole number of checkpoint intervals.
pub fn round_steps(steps: usize) -> usize {
    steps.div_ceil(DEFAULT_CHECKPOINTS).max(1) * DEFAULT_CHECKPOINTS
}

pub fn designed_path(p: &SystemParams, gate: &GateSpec, chi0: f64) -> Result<GeometricPath> {
    GeometricPath::designed(p.duration, gate.theta_g, chi0)
}

pub fn drive_for(p: &SystemParams, gate: &GateSpec, path: &GeometricPath) -> Result<DriveSpec> {
    let basis = DisplacedBasis::new(p.alpha0, p.n_max)?;
    derive_drive_spec(p, gate, path, &basis)
}

/// Outcome of one closed-system gate run.
#[derive(Debug, Clone)]
pub struct GateRun {
    pub trace: FidelityTrace,
    pub steps: usize,
    pub max_drift: f64,
}

impl GateRun {
    pub fn final_fidelity(&self) -> f64 {
        self.trace.final_value()
    }
}

fn trace_from(
    times: &[f64],
    snapshots: &[Array2<C64>],
    logical: &[StateVector],
    target: &ComplexOperator,
    mut correct: impl FnMut(f64, &mut Array2<C64>),
) -> Result<FidelityTrace> {
    let mut values = Vec::with_capacity(times.len());
    for (&t, snap) in times.iter().zip(snapshots) {
        let mut s = snap.clone();
        correct(t, &mut s);
        values.push(average_gate_fidelity(&logical_block(&s, logical)?, target)?);
    }
    FidelityTrace::new(times.to_vec(), values)
}

/// `F̄(t)` under the effective Hamiltonian with drive `scale · Ω₀(t)`.
pub fn effective_gate(envelope: ControlEnvelope, scale: f64, gate: &GateSpec, steps: usize) -> Result<GateRun> {
    let t1 = envelope.duration();
    let model = EffectiveModel::new(envelope, scale);
    let grid = TimeGrid::rk4(t1, round_steps(steps));
    let (z, o) = effective_logical_states(gate.theta);
    let logical = [z, o];
    let tr = propagate_propagator(&model, &logical, &grid)?;
    let trace = trace_from(&tr.times, &tr.snapshots, &logical, &gate.target, |_, _| {})?;
    Ok(GateRun {
        trace,
        steps: grid.steps,
        max_drift: tr.max_drift(),
    })
}

/// Full-model grid: the step bound, or `steps` (rounded) when given.
pub fn full_grid(p: &SystemParams, model: &JointModel, steps: Option<usize>) -> TimeGrid {
    let g = TimeGrid::resolving(p.duration, model);
    match steps {
        Some(s) => g.with_steps(round_steps(s)),
        None => g,
    }
}

/// `F̄(t)` under the full Hamiltonian, read in the frame co-rotating with
/// `δa†a` on the ground branch.
pub fn full_gate(p: &SystemParams, spec: &DriveSpec, gate: &GateSpec, steps: Option<usize>) -> Result<GateRun> {
    let model = JointModel::new(*p, spec.clone())?;
    let grid = full_grid(p, &model, steps);
    let (z, o) = joint_logical_states(p.n_max)?;
    let logical = [z, o];
    let tr = propagate_propagator(&model, &logical, &grid)?;
    let trace = trace_from(&tr.times, &tr.snapshots, &logical, &gate.target, |t, s| {
        ground_frame_correction(p, t, s)
    })?;
    Ok(GateRun {
        trace,
        steps: grid.steps,
        max_drift: tr.max_drift(),
    })
}

/// `F_g(T) = ⟨𝟙,g|ρ(T)|𝟙,g⟩` from `ρ(0) = |𝕆,g⟩⟨𝕆,g|` under the master
/// equation; `ρ(T)` is read in the same ground-branch frame as [`full_gate`].
pub fn decoherence_fidelity(
    p: &SystemParams,
    spec: &DriveSpec,
    rates: &DecoherenceRates,
    steps: Option<usize>,
) -> Result<f64> {
    let model = JointModel::new(*p, spec.clone())?;
    let grid = full_grid(p, &model, steps);
    let ops = collapse_operators(p, rates)?;
    let (z, o) = joint_logical_states(p.n_max)?;
    let tr = lindblad_propagate(&model, &ops, &z.projector(), &grid)?;
    let mut rho = tr.final_snapshot().clone();
    let t = tr.final_time();
    // conjugate by the diagonal frame phase e^{+iδnt} on |g,n⟩
    let phase = |i: usize| -> C64 {
        (0..=p.n_max)
            .find(|&n| joint_index(Level::G, n, p.n_max) == i)
            .map_or(C64::new(1.0, 0.0), |n| C64::from_polar(1.0, p.delta * n as f64 * t))
    };
    let ph: Vec<C64> = (0..rho.nrows()).map(phase).collect();
    for ((i, j), v) in rho.indexed_iter_mut() {
        *v *= ph[i] * ph[j].conj();
    }
    state_fidelity(&ComplexOperator::new(tr.basis, rho)?, &o)
}

/// Closed-system `|⟨𝟙,g|ψ(T)⟩|²` from `|𝕆,g⟩`, used to check the cutoff and
/// step size behind the master-equation runs at a fraction of their cost.
pub fn pure_transfer_fidelity(p: &SystemParams, spec: &DriveSpec, steps: Option<usize>) -> Result<f64> {
    let model = JointModel::new(*p, spec.clone())?;
    let grid = full_grid(p, &model, steps).with_checkpoints(1);
    let (z, o) = joint_logical_states(p.n_max)?;
    let tr = propagate_propagator(&model, std::slice::from_ref(&z), &grid)?;
    let mut s = tr.final_snapshot().clone();
    ground_frame_correction(p, tr.final_time(), &mut s);
    let psi = StateVector::new(tr.basis, s.column(0).to_owned())?;
    Ok(psi.inner(&o)?.norm_sqr())
}
