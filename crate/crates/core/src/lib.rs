//! Finite-field verification of nondefectivity statements for secant
//! varieties of tangential varieties to Veronese varieties.
//!
//! The pipeline samples tangent points over `Z_p`, assembles the tangent
//! span matrix restricted to the rows that survive the coordinate-subspace
//! projection, computes its exact rank, and records the result as a
//! replayable [`Certificate`]. Certified statements feed a [`FactBase`]
//! that chains the induction rules up to arbitrary `n`.

pub mod deduction;
pub mod error;
pub mod ffield;
pub mod geometry;
pub mod monomials;
pub mod verifier;

use num_bigint::BigInt;

pub use deduction::{conclude, theorem_report, AxiomTag, Derivation, FactBase, Provenance, Rule};
pub use error::{Error, Result};
pub use ffield::{FieldElement, FieldMatrix, FieldModulus, DEFAULT_PRIME};
pub use geometry::{AbundanceClass, Statement, TangentPoint};
pub use monomials::{Monomial, MonomialIndex, RowIndexSet};
pub use verifier::{check, replay, Certificate, Verdict, VerdictStatus};

/// Integer matrix used by the exact rank oracle.
pub type RationalMatrix = ffield::IntegerMatrix<BigInt>;
/// Small exact matrices with machine integers; only safe while every minor fits.
pub type SmallIntMatrix = ffield::IntegerMatrix<i128>;
