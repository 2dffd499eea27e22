//! Numerical kernels for polynomial progression counting over Z/NZ.
//!
//! The crate covers prime-field Fourier analysis, Gowers uniformity norms,
//! progression counting operators and their dual functions, regularity
//! decompositions, quadratic and bracket phases, PET degree bookkeeping and
//! progression-free set search.

pub mod arith;
pub mod counts;
pub mod decompose;
pub mod error;
pub mod extremal;
pub mod fourier;
pub mod funcspec;
pub mod function;
pub mod gowers;
pub mod par;
pub mod pet;
pub mod phase;
pub mod poly;

pub use arith::{Modulus, Residue};
pub use error::{LabError, Result};
pub use function::{CyclicFunction, Spectrum};
pub use poly::IntPolynomial;
