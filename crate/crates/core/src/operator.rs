//! Dense complex operators and state vectors tagged with the basis they live in.
//!
//! Joint cavity-qutrit objects use the ordering `qutrit ⊗ cavity`: the joint
//! index of `|q⟩|n⟩` is `q * (n_max + 1) + n`, with `q = 0, 1, 2` for
//! `g, e, f`.

use std::fmt;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Basis an operator or state is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisTag {
    /// Cavity Fock space `|0⟩ … |n_max⟩`.
    Fock { n_max: usize },
    /// Qutrit levels `g, e, f`.
    Qutrit,
    /// `qutrit ⊗ Fock(n_max)`.
    Joint { n_max: usize },
    /// `{|+,g⟩, |0̃,e⟩}`.
    Effective2,
    /// `{|+,g⟩, |−,g⟩, |0̃,e⟩}`.
    Effective3,
    /// Code space `{|𝕆⟩, |𝟙⟩}`.
    Logical,
    /// Untyped space of the given dimension (toy systems, superoperators).
    Plain { dim: usize },
}

impl BasisTag {
    pub fn dim(self) -> usize {
        match self {
            BasisTag::Fock { n_max } => n_max + 1,
            BasisTag::Qutrit => 3,
            BasisTag::Joint { n_max } => 3 * (n_max + 1),
            BasisTag::Effective2 => 2,
            BasisTag::Effective3 => 3,
            BasisTag::Logical => 2,
            BasisTag::Plain { dim } => dim,
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Fock { n_max } => write!(f, "fock({n_max})"),
            BasisTag::Qutrit => f.write_str("qutrit"),
            BasisTag::Joint { n_max } => write!(f, "joint({n_max})"),
            BasisTag::Effective2 => f.write_str("effective2"),
            BasisTag::Effective3 => f.write_str("effective3"),
            BasisTag::Logical => f.write_str("logical"),
            BasisTag::Plain { dim } => write!(f, "plain({dim})"),
        }
    }
}

/// Dense square complex matrix over a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    basis: BasisTag,
    matrix: Array2<C64>,
}

impl ComplexOperator {
    pub fn new(basis: BasisTag, matrix: Array2<C64>) -> Result<Self> {
        let dim = basis.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn zeros(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self {
            basis,
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(basis: BasisTag) -> Self {
        let d = basis.dim();
        Self {
            basis,
            matrix: Array2::eye(d),
        }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        ket.check_basis(bra.basis)?;
        let d = ket.dim();
        let m = Array2::from_shape_fn((d, d), |(i, j)| ket.amps[i] * bra.amps[j].conj());
        Ok(Self {
            basis: ket.basis,
            matrix: m,
        })
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[[i, j]]
    }

    fn check_basis(&self, other: BasisTag) -> Result<()> {
        if self.basis != other {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: other,
            });
        }
        Ok(())
    }

    pub fn dagger(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: dagger(&self.matrix),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_basis(rhs.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: self.matrix.dot(&rhs.matrix),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_basis(rhs.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_basis(rhs.basis)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix - &rhs.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.mapv(|z| z * s),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.matmul(rhs)?.sub(&rhs.matmul(self)?)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// `‖A − A†‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.frobenius_norm();
        if n == 0.0 {
            return 0.0;
        }
        frobenius(&(&self.matrix - &dagger(&self.matrix))) / n
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = dagger(&self.matrix).dot(&self.matrix);
        frobenius(&(p - Array2::<C64>::eye(self.dim())))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_basis(psi.basis)?;
        Ok(StateVector {
            basis: self.basis,
            amps: self.matrix.dot(&psi.amps),
        })
    }

    /// `⟨bra|A|ket⟩`.
    pub fn element(&self, bra: &StateVector, ket: &StateVector) -> Result<C64> {
        bra.inner(&self.apply(ket)?)
    }

    pub fn expm(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: expm(&self.matrix),
        }
    }

    /// Real eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Complex state vector over a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: BasisTag,
    amps: Array1<C64>,
}

impl StateVector {
    pub fn new(basis: BasisTag, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { basis, amps })
    }

    pub fn basis_state(basis: BasisTag, index: usize) -> Result<Self> {
        let d = basis.dim();
        if index >= d {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {basis}"
            )));
        }
        let mut amps = Array1::zeros(d);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    fn check_basis(&self, other: BasisTag) -> Result<()> {
        if self.basis != other {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: other,
            });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_basis(other.basis)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            basis: self.basis,
            amps: self.amps.mapv(|z| z * s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_basis(other.basis)?;
        Ok(Self {
            basis: self.basis,
            amps: &self.amps + &other.amps,
        })
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &ComplexOperator) -> Result<C64> {
        op.element(self, self)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexOperator {
        ComplexOperator::outer(self, self).expect("same basis")
    }
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn one_norm(m: &Array2<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Kronecker product `a ⊗ b` (index of `a` slow).
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let b = &PADE13;
    let id = Array2::<C64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let r = |x: f64| C64::new(x, 0.0);

    let inner_u = &a6 * r(b[13]) + &a4 * r(b[11]) + &a2 * r(b[9]);
    let u_poly = a6.dot(&inner_u) + &a6 * r(b[7]) + &a4 * r(b[5]) + &a2 * r(b[3]) + &id * r(b[1]);
    let u = a.dot(&u_poly);
    let inner_v = &a6 * r(b[12]) + &a4 * r(b[10]) + &a2 * r(b[8]);
    let v = a6.dot(&inner_v) + &a6 * r(b[6]) + &a4 * r(b[4]) + &a2 * r(b[2]) + &id * r(b[0]);

    let mut x = solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is nonsingular");
    for _ in 0..s {
        x = x.dot(&x);
    }
    x
}

/// Solves `A X = B` by LU decomposition with partial pivoting.
pub fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.nrows(),
        });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[[i, k]].norm().total_cmp(&lu[[j, k]].norm()))
            .unwrap();
        if lu[[p, k]].norm() == 0.0 {
            return Err(Error::invalid("singular matrix"));
        }
        if p != k {
            for j in 0..n {
                lu.swap([p, j], [k, j]);
            }
            for j in 0..x.ncols() {
                x.swap([p, j], [k, j]);
            }
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let f = lu[[i, k]] / pivot;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = lu[[k, j]];
                lu[[i, j]] -= f * v;
            }
            for j in 0..x.ncols() {
                let v = x[[k, j]];
                x[[i, j]] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[[k, k]];
        for j in 0..x.ncols() {
            let mut acc = x[[k, j]];
            for c in k + 1..n {
                acc -= lu[[k, c]] * x[[c, j]];
            }
            x[[k, j]] = acc / pivot;
        }
    }
    Ok(x)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    let h = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-i φ σ_x) = cos φ I − i sin φ σ_x
        let phi = 1.3;
        let a = Array2::from_shape_vec((2, 2), vec![c(0.0, 0.0), c(0.0, -phi), c(0.0, -phi), c(0.0, 0.0)]).unwrap();
        let e = expm(&a);
        assert!((e[[0, 0]] - c(phi.cos(), 0.0)).norm() < 1e-14);
        assert!((e[[0, 1]] - c(0.0, -phi.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let a = Array2::from_shape_vec((2, 2), vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-40.0, 0.0)]).unwrap();
        let e = expm(&a);
        assert!((e[[0, 0]].re - 3f64.exp()).abs() < 1e-12 * 3f64.exp());
        assert!((e[[1, 1]].re - (-40f64).exp()).abs() < 1e-25);
    }

    #[test]
    fn solve_recovers_solution() {
        let a = Array2::from_shape_vec((3, 3), vec![
            c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0),
            c(1.0, 0.0), c(0.0, 0.0), c(3.0, -1.0),
            c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0),
        ]).unwrap();
        let x0 = Array2::from_shape_vec((3, 1), vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.25, 3.0)]).unwrap();
        let b = a.dot(&x0);
        let x = solve(&a, &b).unwrap();
        assert!(frobenius(&(x - x0)) < 1e-13);
    }

    #[test]
    fn mismatched_bases_rejected() {
        let a = ComplexOperator::identity(BasisTag::Effective2);
        let b = ComplexOperator::identity(BasisTag::Logical);
        assert!(matches!(a.matmul(&b), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn hermitian_eigenvalues_of_sigma_y() {
        let m = Array2::from_shape_vec((2, 2), vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }
}
