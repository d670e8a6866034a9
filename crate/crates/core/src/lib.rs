//! Classification toolkit for noncommutative domain algebras defined by
//! regular positive free polynomials.
//!
//! * [`symbol`]: words, free polynomial symbols, parsing, the
//!   permutation-rescaling action and the commutative collapse.
//! * [`equivalence`]: equivalence certificates, canonical forms, symmetry
//!   groups and support partitions of unitaries.
//! * [`fock`]: weights and truncated weighted shifts on the full Fock space.
//! * [`geometry`]: the scalar-level Reinhardt domain, sphericality and the
//!   product/Thullen refutation witnesses.
//! * [`matrixlevel`]: matrix-level domains, dual maps and forced-linearity
//!   analysis of free holomorphic maps.

pub mod equivalence;
pub mod error;
pub mod exec;
pub mod fock;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod matrixlevel;
pub mod rational;
pub mod symbol;

pub use error::{Error, Result};
pub use exec::Execution;
pub use symbol::{FreePolynomial, Permutation, Word};
