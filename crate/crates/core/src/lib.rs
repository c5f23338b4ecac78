//! Test-matrix laboratory for the Clement (Sylvester-Kac) matrix and its
//! two-parameter extensions `H_n(a, b)`.
//!
//! The crate builds the matrices ([`matgen`]), gives their spectra in closed
//! form together with a determinant oracle ([`spectra`]), constructs exact
//! eigenvectors of the symmetrized extension from orthonormal dual Hahn
//! functions ([`dualhahn`]), and benchmarks independent eigensolvers
//! ([`eigensolve`]) against the exact answers ([`harness`]).
//!
//! Indices in the documentation are 1-based (entry `h_{k,k+1}`), storage is
//! 0-based: `superdiag[k - 1]` holds `h_{k,k+1}` and `subdiag[k - 1]` holds
//! `h_{k+1,k}`.

pub mod cli;
mod dd;
pub mod dualhahn;
pub mod eigensolve;
mod error;
pub mod harness;
pub mod matgen;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
