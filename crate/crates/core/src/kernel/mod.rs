//! Normal-ordered field calculus for freely generated vertex algebras.
//!
//! Fields live in the PBW basis of right-nested normally ordered words in the
//! basic generators and their derivatives. The [`Engine`] implements `∂`, Wick
//! products and all circle products by structural recursion on that basis,
//! driven only by the generator table of an [`AlgebraSpec`].

mod engine;
mod field;
mod render;
mod spec;

pub use engine::{ConformalWeight, Engine};
pub use field::{Factor, Field, Monomial};
pub use render::{render_field, render_monomial};
pub(crate) use render::render_terms;
pub use spec::{AlgebraSpec, GeneratorSymbol, OpeTable, SpecBuilder};

use crate::coefficients::CoefficientError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` must have positive weight")]
    ZeroWeight(String),
    #[error("unknown involution `{0}`")]
    UnknownInvolution(String),
    #[error("parity must be +1 or -1, got {0}")]
    BadParity(i8),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("product {a}∘{n}{b} given twice")]
    DuplicateEntry { a: String, b: String, n: u32 },
    #[error("product {a}∘{n}{b} should have weight {expected}, found a term of weight {found}")]
    WeightMismatch { a: String, b: String, n: u32, expected: i64, found: i64 },
    #[error("table violates skew-symmetry at {a}∘{n}{b}")]
    SkewSymmetry { a: String, b: String, n: u32 },
    #[error("involution `{involution}` does not preserve {a}∘{n}{b}")]
    InvolutionViolation { involution: String, a: String, b: String, n: u32 },
    #[error("iterated Wick product of an empty list")]
    EmptyProduct,
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}
