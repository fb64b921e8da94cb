//! Exact dynamics of one-monomial bosonic Hamiltonians through their
//! tridiagonal (Jacobi) reduction and the attached classical orthogonal
//! polynomial families.

pub mod error;
pub mod observables;
pub mod fockoracle;
pub mod reduction;
pub mod coherent;
pub mod propagator;
pub mod measure;
pub mod orthopoly;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
