//! Truncated Fock-space algebra for the cavity and its embedding with the
//! qutrit.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{kron, BasisTag, ComplexOperator, StateVector};

/// Qutrit levels, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    E = 1,
    F = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::F];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Cavity annihilation operator `a` on `|0⟩ … |n_max⟩`.
pub fn annihilation_op(n_max: usize) -> Result<ComplexOperator> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let d = n_max + 1;
    let mut m = Array2::zeros((d, d));
    for n in 0..n_max {
        m[[n, n + 1]] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    ComplexOperator::new(BasisTag::Fock { n_max }, m)
}

pub fn creation_op(n_max: usize) -> Result<ComplexOperator> {
    Ok(annihilation_op(n_max)?.dagger())
}

/// `a†a`.
pub fn number_op(n_max: usize) -> Result<ComplexOperator> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let d = n_max + 1;
    let m = Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ComplexOperator::new(BasisTag::Fock { n_max }, m)
}

/// `D(α) = exp[α(a† − a)]` for real `α`, by Padé matrix exponential of the
/// truncated generator.
pub fn displacement_op(alpha: f64, n_max: usize) -> Result<ComplexOperator> {
    let a = annihilation_op(n_max)?;
    let gen = a.dagger().sub(&a)?.scale(C64::new(alpha, 0.0));
    Ok(gen.expm())
}

/// `|ñ⟩ = D(α)|n⟩`.
pub fn displaced_fock(n: usize, alpha: f64, n_max: usize) -> Result<StateVector> {
    if n > n_max {
        return Err(Error::invalid(format!("n = {n} exceeds n_max = {n_max}")));
    }
    let d = displacement_op(alpha, n_max)?;
    StateVector::new(
        BasisTag::Fock { n_max },
        d.matrix().column(n).to_owned(),
    )
}

/// Expansion table `β_{m,n} = ⟨m|D(α₀)|n⟩` of displaced Fock states.
#[derive(Debug, Clone)]
pub struct DisplacedBasis {
    alpha0: f64,
    n_max: usize,
    beta: Array2<C64>,
}

impl DisplacedBasis {
    pub fn new(alpha0: f64, n_max: usize) -> Result<Self> {
        let d = displacement_op(alpha0, n_max)?;
        Ok(Self {
            alpha0,
            n_max,
            beta: d.into_matrix(),
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `β_{m,n}`: amplitude of `|m⟩` in `|ñ⟩`.
    pub fn beta(&self, m: usize, n: usize) -> C64 {
        self.beta[[m, n]]
    }

    pub fn table(&self) -> &Array2<C64> {
        &self.beta
    }

    pub fn state(&self, n: usize) -> Result<StateVector> {
        if n > self.n_max {
            return Err(Error::invalid(format!("n = {n} exceeds n_max = {}", self.n_max)));
        }
        StateVector::new(BasisTag::Fock { n_max: self.n_max }, self.beta.column(n).to_owned())
    }
}

/// Binomial code words `|𝕆⟩ = (|0⟩ + |4⟩)/√2` and `|𝟙⟩ = |2⟩`.
pub fn binomial_logical_states(n_max: usize) -> Result<(StateVector, StateVector)> {
    if n_max < 4 {
        return Err(Error::invalid(format!(
            "binomial code needs n_max >= 4, got {n_max}"
        )));
    }
    let basis = BasisTag::Fock { n_max };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut zero = Array1::zeros(n_max + 1);
    zero[0] = C64::new(s, 0.0);
    zero[4] = C64::new(s, 0.0);
    let one = StateVector::basis_state(basis, 2)?;
    Ok((StateVector::new(basis, zero)?, one))
}

/// `|i⟩⟨j|` on the qutrit.
pub fn qutrit_op(i: Level, j: Level) -> ComplexOperator {
    let mut m = Array2::zeros((3, 3));
    m[[i.index(), j.index()]] = C64::new(1.0, 0.0);
    ComplexOperator::new(BasisTag::Qutrit, m).expect("3x3")
}

pub fn qutrit_state(level: Level) -> StateVector {
    StateVector::basis_state(BasisTag::Qutrit, level.index()).expect("level < 3")
}

/// `qutrit_op ⊗ cavity_op` in the joint basis (qutrit index slow).
pub fn tensor_embed(cavity_op: &ComplexOperator, qutrit_op: &ComplexOperator) -> Result<ComplexOperator> {
    let n_max = match cavity_op.basis() {
        BasisTag::Fock { n_max } => n_max,
        other => {
            return Err(Error::BasisMismatch {
                expected: BasisTag::Fock { n_max: other.dim().saturating_sub(1) },
                found: other,
            })
        }
    };
    if qutrit_op.basis() != BasisTag::Qutrit {
        return Err(Error::BasisMismatch {
            expected: BasisTag::Qutrit,
            found: qutrit_op.basis(),
        });
    }
    ComplexOperator::new(
        BasisTag::Joint { n_max },
        kron(qutrit_op.matrix(), cavity_op.matrix()),
    )
}

/// `|level⟩ ⊗ |cavity⟩`.
pub fn joint_state(cavity: &StateVector, level: Level) -> Result<StateVector> {
    let n_max = match cavity.basis() {
        BasisTag::Fock { n_max } => n_max,
        other => {
            return Err(Error::invalid(format!("expected a Fock-space state, got {other}")));
        }
    };
    let d = n_max + 1;
    let mut amps = Array1::zeros(3 * d);
    for n in 0..d {
        amps[level.index() * d + n] = cavity.amp(n);
    }
    StateVector::new(BasisTag::Joint { n_max }, amps)
}

/// Joint index of `|level⟩|n⟩`.
pub fn joint_index(level: Level, n: usize, n_max: usize) -> usize {
    level.index() * (n_max + 1) + n
}
