//! Exact computation in freely generated vertex algebras over Q(k).
//!
//! Fields are kept in a canonical PBW normal form, so equality of fields is
//! equality of term maps. On top of the kernel sit constructors for Heisenberg
//! and affine algebras, a Z2-orbifold toolkit (decoupling relations, span
//! checks, primary corrections), structure-constant pole analysis, and an
//! independent Fock-space oracle.

pub mod algebras;
pub mod coefficients;
pub mod fock;
pub mod genericity;
pub mod kernel;
pub mod orbifold;

pub use coefficients::{Poly, Scalar};
pub use kernel::{AlgebraSpec, Engine, Factor, Field, Monomial};
