//! Geometric gates on a binomial-encoded cavity qubit driven through a
//! qutrit ancilla.

pub mod device;
pub mod error;
pub mod evolver;
pub mod fock;
pub mod metrics;
pub mod operator;
pub mod path;
pub mod quadrature;
pub mod xp;

pub use error::{Error, Result};
pub use operator::{BasisTag, ComplexOperator, StateVector};
