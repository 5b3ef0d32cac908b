//! Grassmann-integral calculus for fermionic reduced density matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`grassmann`]: the finite Grassmann algebra with its star product,
//!   involution and the two integration functionals.
//! - [`fock`]: dense CAR operators on Fock space, the Θ correspondence in
//!   both directions and brute-force reduced density matrices. This is the
//!   ground truth everything else is checked against.
//! - [`conditions`]: 1-/2-pdm extraction from Grassmann densities and the
//!   first-order, G, P, Q, T1 and generalized T2 representability checks.
//! - [`quasifree`]: quasifree Grassmann densities with a prescribed 1-pdm and
//!   Wick evaluation of their n-point functions.
//! - [`io`] and [`cli`]: JSON file formats and the `grdm` command line.

pub mod cli;
pub mod conditions;
pub mod error;
pub mod fock;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod quasifree;
pub mod selftest;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use grassmann::{GrassmannElement, IndexSubset, Monomial};
