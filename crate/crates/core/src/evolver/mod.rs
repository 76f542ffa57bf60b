//! Time evolution: Schrödinger propagation of states and propagator
//! columns, Lindblad propagation of density matrices, and control-noise
//! injection.

mod lindblad;
mod noise;
mod ode;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{BasisTag, ComplexOperator, StateVector};

pub use lindblad::{collapse_operators, lindblad_propagate, CollapseOp, DecoherenceRates};
pub use noise::{with_awgn, with_systematic_error, NoiseSpec};

/// A time-dependent Hamiltonian in rad/s, exposed as a sparse entry list.
pub trait Hamiltonian: Sync {
    fn basis(&self) -> BasisTag;

    fn dim(&self) -> usize {
        self.basis().dim()
    }

    /// Appends the nonzero entries `(row, col, H_rc(t))` to `out`.
    /// Repeated `(row, col)` pairs are summed.
    fn entries(&self, t: f64, out: &mut Vec<(usize, usize, C64)>);

    /// Fastest angular frequency the integrator must resolve.
    fn max_frequency(&self) -> f64;

    fn matrix(&self, t: f64) -> ComplexOperator {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        let mut buf = Vec::new();
        self.entries(t, &mut buf);
        for (i, j, v) in buf {
            m[[i, j]] += v;
        }
        ComplexOperator::new(self.basis(), m).expect("entries within dim")
    }
}

/// A time-independent Hamiltonian.
#[derive(Debug, Clone)]
pub struct StaticHamiltonian {
    op: ComplexOperator,
    entries: Vec<(usize, usize, C64)>,
    bound: f64,
}

impl StaticHamiltonian {
    pub fn new(op: ComplexOperator) -> Self {
        let m = op.matrix();
        let entries = m
            .indexed_iter()
            .filter(|(_, v)| v.norm() != 0.0)
            .map(|((i, j), v)| (i, j, *v))
            .collect();
        let bound = row_sum_bound(m);
        Self { op, entries, bound }
    }

    pub fn operator(&self) -> &ComplexOperator {
        &self.op
    }
}

impl Hamiltonian for StaticHamiltonian {
    fn basis(&self) -> BasisTag {
        self.op.basis()
    }

    fn entries(&self, _t: f64, out: &mut Vec<(usize, usize, C64)>) {
        out.extend_from_slice(&self.entries);
    }

    fn max_frequency(&self) -> f64 {
        self.bound
    }
}

/// A Hamiltonian given by a dense-matrix closure. Intended for tests and
/// small models.
pub struct FnHamiltonian<F> {
    basis: BasisTag,
    bound: f64,
    f: F,
}

impl<F: Fn(f64) -> Array2<C64> + Sync> FnHamiltonian<F> {
    pub fn new(basis: BasisTag, bound: f64, f: F) -> Self {
        Self { basis, bound, f }
    }
}

impl<F: Fn(f64) -> Array2<C64> + Sync> Hamiltonian for FnHamiltonian<F> {
    fn basis(&self) -> BasisTag {
        self.basis
    }

    fn entries(&self, t: f64, out: &mut Vec<(usize, usize, C64)>) {
        let m = (self.f)(t);
        for ((i, j), v) in m.indexed_iter() {
            if v.norm() != 0.0 {
                out.push((i, j, *v));
            }
        }
    }

    fn max_frequency(&self) -> f64 {
        self.bound
    }
}

pub(crate) fn row_sum_bound(m: &Array2<C64>) -> f64 {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4Fixed,
    Dp54Adaptive { rtol: f64, atol: f64 },
}

/// Default number of checkpoint intervals; `checkpoints + 1` snapshots are
/// stored, `t = 0` included.
pub const DEFAULT_CHECKPOINTS: usize = 200;

/// Points per fastest period required of fixed-step RK4.
pub const POINTS_PER_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    /// RK4 step count; for the adaptive scheme, the initial step is
    /// `(t1 − t0)/steps`.
    pub steps: usize,
    pub scheme: Scheme,
    pub checkpoints: usize,
}

impl TimeGrid {
    pub fn rk4(t1: f64, steps: usize) -> Self {
        Self {
            t0: 0.0,
            t1,
            steps,
            scheme: Scheme::Rk4Fixed,
            checkpoints: DEFAULT_CHECKPOINTS.min(steps.max(1)),
        }
    }

    pub fn dp54(t1: f64, rtol: f64, atol: f64) -> Self {
        Self {
            t0: 0.0,
            t1,
            steps: 1000,
            scheme: Scheme::Dp54Adaptive { rtol, atol },
            checkpoints: DEFAULT_CHECKPOINTS,
        }
    }

    /// Smallest RK4 grid meeting the step bound for `h`, with the step
    /// count rounded up to a multiple of the checkpoint count.
    pub fn resolving(t1: f64, h: &dyn Hamiltonian) -> Self {
        let periods = h.max_frequency() * t1 / (2.0 * std::f64::consts::PI);
        let min_steps = (POINTS_PER_PERIOD * periods).ceil().max(1.0) as usize;
        let c = DEFAULT_CHECKPOINTS;
        let steps = min_steps.div_ceil(c).max(1) * c;
        Self::rk4(t1, steps)
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        if self.checkpoints > steps {
            self.checkpoints = steps.max(1);
        }
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: usize) -> Self {
        self.checkpoints = checkpoints.max(1);
        self
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    pub fn checkpoint_times(&self) -> Vec<f64> {
        let n = self.checkpoints;
        (0..=n)
            .map(|i| self.t0 + (self.t1 - self.t0) * i as f64 / n as f64)
            .collect()
    }

    pub(crate) fn validate(&self, h: &dyn Hamiltonian) -> Result<()> {
        if !(self.t1 > self.t0) {
            return Err(Error::invalid("time grid must have t1 > t0"));
        }
        if self.steps == 0 || self.checkpoints == 0 {
            return Err(Error::invalid("time grid needs at least one step and one checkpoint"));
        }
        if let Scheme::Rk4Fixed = self.scheme {
            if !self.steps.is_multiple_of(self.checkpoints) {
                return Err(Error::invalid(format!(
                    "rk4 steps ({}) must be a multiple of checkpoints ({})",
                    self.steps, self.checkpoints
                )));
            }
            let w = h.max_frequency();
            if w > 0.0 {
                let bound = 2.0 * std::f64::consts::PI / (POINTS_PER_PERIOD * w);
                // small slack for rounding of T/steps
                if self.step() > bound * (1.0 + 1e-12) {
                    return Err(Error::StepTooLarge {
                        step: self.step(),
                        bound,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotKind {
    State,
    Columns,
    Density,
}

/// Snapshots of a propagation at the grid checkpoints.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub basis: BasisTag,
    pub kind: SnapshotKind,
    pub times: Vec<f64>,
    /// `dim × columns` for states and propagator columns, `dim × dim` for
    /// density matrices.
    pub snapshots: Vec<Array2<C64>>,
    /// Worst norm (closed) or trace (open) deviation at each checkpoint.
    pub drift: Vec<f64>,
    pub steps_taken: usize,
}

impl Trajectory {
    pub fn final_snapshot(&self) -> &Array2<C64> {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }

    /// Column `c` of snapshot `k` as a state.
    pub fn state(&self, k: usize, c: usize) -> StateVector {
        StateVector::new(self.basis, self.snapshots[k].column(c).to_owned()).expect("basis dim")
    }

    pub fn final_state(&self) -> StateVector {
        self.state(self.snapshots.len() - 1, 0)
    }

    pub fn final_density(&self) -> ComplexOperator {
        ComplexOperator::new(self.basis, self.final_snapshot().clone()).expect("basis dim")
    }
}

/// Closed-system norm tolerance checked at every checkpoint.
pub const NORM_TOL: f64 = 1e-8;

/// Propagates one state under `h`.
pub fn propagate_state(h: &dyn Hamiltonian, psi0: &StateVector, grid: &TimeGrid) -> Result<Trajectory> {
    let mut traj = propagate_propagator(h, std::slice::from_ref(psi0), grid)?;
    traj.kind = SnapshotKind::State;
    Ok(traj)
}

/// Propagates several initial states (propagator columns) together.
pub fn propagate_propagator(h: &dyn Hamiltonian, columns: &[StateVector], grid: &TimeGrid) -> Result<Trajectory> {
    if columns.is_empty() {
        return Err(Error::invalid("no states to propagate"));
    }
    let basis = h.basis();
    for c in columns {
        if c.basis() != basis {
            return Err(Error::BasisMismatch {
                expected: basis,
                found: c.basis(),
            });
        }
        if (c.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("initial state norm {} is not 1", c.norm())));
        }
    }
    grid.validate(h)?;
    let d = h.dim();
    let n = columns.len();
    let mut y: Vec<C64> = columns.iter().flat_map(|c| c.amplitudes().iter().copied()).collect();
    let initial_gram = gram(&y, d, n);
    let rhs = SchrodingerRhs::new(h, n);
    let times = grid.checkpoint_times();
    let mut snapshots = Vec::with_capacity(times.len());
    let mut drift = Vec::with_capacity(times.len());
    snapshots.push(to_columns(&y, d, n));
    drift.push(0.0);
    let mut steps_taken = 0;
    let mut integrator = ode::Integrator::new(grid.scheme, y.len());
    let mut h0 = grid.step();
    for w in times.windows(2) {
        steps_taken += integrator.advance(&rhs, &mut y, w[0], w[1], grid.steps / grid.checkpoints, &mut h0)?;
        let g = gram(&y, d, n);
        let dev = g
            .iter()
            .zip(&initial_gram)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if dev > NORM_TOL {
            return Err(Error::Invariant {
                quantity: "state norm/overlap",
                value: dev,
                limit: NORM_TOL,
                t: w[1],
            });
        }
        snapshots.push(to_columns(&y, d, n));
        drift.push(dev);
    }
    Ok(Trajectory {
        basis,
        kind: SnapshotKind::Columns,
        times,
        snapshots,
        drift,
        steps_taken,
    })
}

fn gram(y: &[C64], d: usize, n: usize) -> Vec<C64> {
    let mut g = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let s: C64 = (0..d).map(|i| y[a * d + i].conj() * y[b * d + i]).sum();
            g.push(s);
        }
    }
    g
}

fn to_columns(y: &[C64], d: usize, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, n), |(i, c)| y[c * d + i])
}

/// `dy/dt = −i H(t) y` for `n` stacked columns.
struct SchrodingerRhs<'a> {
    h: &'a dyn Hamiltonian,
    d: usize,
    n: usize,
    buf: std::cell::RefCell<Vec<(usize, usize, C64)>>,
}

impl<'a> SchrodingerRhs<'a> {
    fn new(h: &'a dyn Hamiltonian, n: usize) -> Self {
        Self {
            h,
            d: h.dim(),
            n,
            buf: std::cell::RefCell::new(Vec::with_capacity(8 * h.dim())),
        }
    }
}

impl ode::Rhs for SchrodingerRhs<'_> {
    fn eval(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let mut buf = self.buf.borrow_mut();
        buf.clear();
        self.h.entries(t, &mut buf);
        dy.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let d = self.d;
        for c in 0..self.n {
            let yc = &y[c * d..(c + 1) * d];
            let dc = &mut dy[c * d..(c + 1) * d];
            for &(i, j, v) in buf.iter() {
                dc[i] += v * yc[j];
            }
        }
        // multiply by −i
        for v in dy.iter_mut() {
            *v = C64::new(v.im, -v.re);
        }
    }
}
