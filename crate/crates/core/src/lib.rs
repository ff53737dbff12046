//! A desk-scale laboratory for the Drury-Arveson space H^2_d: exact
//! graded Fock combinatorics, multiplication-operator norms and the
//! multiplier-vs-supremum gap, the d = 2 weighted-shift chains and their
//! Cesaro means, peak-function constructions, concrete functionals with
//! singularity and decay certificates, and Cauchy-kernel approximants.
//!
//! The combinatorial core is generic over the coefficient field: the
//! floating lane [`C64`] drives the numerics, and the exact lane [`CQ`]
//! (Gaussian rationals) backs every zero-tolerance identity.  Floating
//! point enters only at the linear-algebra boundary.

pub mod cauchy;
pub mod error;
pub mod fock;
pub mod fullfock;
pub mod functional;
pub mod multiindex;
pub mod multop;
pub mod peak;
pub mod poly;
pub mod scalar;
pub mod shift;
pub mod sphere;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use scalar::{Scalar, C64, CQ};

/// Floating-lane vector and symbol types.
pub type FockVectorF = fock::FockVector<C64>;
pub type PolynomialF = poly::Polynomial<C64>;

/// Exact-lane (Gaussian rational) vector and symbol types.
pub type FockVectorQ = fock::FockVector<CQ>;
pub type PolynomialQ = poly::Polynomial<CQ>;
