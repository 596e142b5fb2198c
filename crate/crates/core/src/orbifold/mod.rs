//! Z2-orbifold toolkit: quadratic invariants, derivative-basis rewriting,
//! closed-form circle products, decoupling relations, span checks and
//! primary corrections.

mod closed;
mod decouple;
mod primary;
pub mod solver;
mod span;
mod words;

pub use closed::{circle_closed_form, closed_form_discrepancies, closed_form_instances, lambda, ClosedForm};
pub use decouple::{decouple, decoupling_ladder, DecouplingRecord, DecouplingResult, LadderStep, WeightSpace};
pub use primary::{is_primary, primary_correct, PrimaryResult};
pub use span::{
    ambient_dimension, invariant_monomials, minimality_witnesses, strong_span_check, SpanReport, SpanRow,
};
pub use words::{render_expression, words_of_weight, Alphabet, Letter, Word, WordEvaluator};

use crate::coefficients::{binomial, Scalar};
use crate::kernel::{ConformalWeight, Engine, Factor, Field, KernelError, Monomial};
use solver::{field_vec, LinearSpan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbifoldError {
    #[error("unknown involution `{0}`")]
    UnknownInvolution(String),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("field is not weight-homogeneous")]
    NotHomogeneous,
    #[error("field is not in the span of the derivative basis")]
    NotInSpan,
    #[error("m = {m} is outside the range of the closed form (at most {max})")]
    OutOfRange { m: u32, max: u32 },
    #[error("closed form needs distinct indices")]
    BadIndices,
    #[error("ladder failed at step {step}: {reason}")]
    Ladder { step: usize, reason: String },
    #[error("no correction in the ansatz makes the field primary")]
    NoPrimaryCorrection,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// True iff every term has an even number of factors that are odd under `involution`.
pub fn is_invariant(engine: &Engine, a: &Field, involution: &str) -> Result<bool, OrbifoldError> {
    let spec = engine.spec();
    if !spec.involutions().iter().any(|i| i == involution) {
        return Err(OrbifoldError::UnknownInvolution(involution.to_string()));
    }
    Ok(a.monomials().all(|m| spec.monomial_parity(m, involution) == 1))
}

/// Weight of a homogeneous nonzero field.
pub fn homogeneous_weight(engine: &Engine, a: &Field) -> Result<u32, OrbifoldError> {
    match engine.conformal_weight(a) {
        ConformalWeight::Homogeneous(w) => Ok(w),
        ConformalWeight::Zero => Ok(0),
        ConformalWeight::Mixed => Err(OrbifoldError::NotHomogeneous),
    }
}

/// `:∂^a g_i ∂^b g_j:` with the symmetry normalization applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticGenerator {
    pub i: usize,
    pub j: usize,
    pub a: u32,
    pub b: u32,
}

impl QuadraticGenerator {
    pub fn new(i: usize, j: usize, a: u32, b: u32) -> Self {
        if i > j || (i == j && a > b) {
            QuadraticGenerator { i: j, j: i, a: b, b: a }
        } else {
            QuadraticGenerator { i, j, a, b }
        }
    }

    pub fn weight(&self) -> u32 {
        self.a + self.b + 2
    }
}

/// The realized quadratic `:∂^a g_i ∂^b g_j:` in PBW form.
pub fn omega(engine: &Engine, i: usize, j: usize, a: u32, b: u32) -> Result<Field, OrbifoldError> {
    let count = engine.spec().generator_count();
    for idx in [i, j] {
        if idx >= count {
            return Err(OrbifoldError::IndexOutOfRange(idx));
        }
    }
    let left = engine.derive_n(&Field::generator(i), a);
    let right = engine.derive_n(&Field::generator(j), b);
    Ok(engine.wick(&left, &right))
}

/// `Σ c · ∂^p ω^{ij}_{0,q}`, stored as `(p, q, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeRewrite {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(u32, u32, Scalar)>,
}

impl DerivativeRewrite {
    pub fn coefficient(&self, p: u32, q: u32) -> Scalar {
        self.terms
            .iter()
            .find(|t| t.0 == p && t.1 == q)
            .map(|t| t.2.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn expand(&self, engine: &Engine) -> Result<Field, OrbifoldError> {
        let mut out = Field::zero();
        for (p, q, c) in &self.terms {
            let w = omega(engine, self.i, self.j, 0, *q)?;
            out.add_scaled(&engine.derive_n(&w, *p), c);
        }
        Ok(out)
    }
}

/// The spanning set `∂^p ω^{ij}_{0,m-p}` of the weight-`m+2` quadratics:
/// every `p` when `i != j`, and only `p ≡ m (mod 2)` when `i == j`.
pub fn derivative_basis(i: usize, j: usize, m: u32) -> Vec<(u32, u32)> {
    (0..=m)
        .filter(|p| i != j || (m - p).is_multiple_of(2))
        .map(|p| (p, m - p))
        .collect()
}

/// Writes `ω^{ij}_{a,b}` in the basis [`derivative_basis`] by an exact solve.
pub fn rewrite_derivative_basis(
    engine: &Engine,
    i: usize,
    j: usize,
    a: u32,
    b: u32,
) -> Result<DerivativeRewrite, OrbifoldError> {
    let target = omega(engine, i, j, a, b)?;
    rewrite_quadratic(engine, i, j, a + b, &target)
}

/// Expresses a quadratic field of weight `m+2` in the derivative basis.
/// Any part outside the span makes the result an error.
pub fn rewrite_quadratic(
    engine: &Engine,
    i: usize,
    j: usize,
    m: u32,
    target: &Field,
) -> Result<DerivativeRewrite, OrbifoldError> {
    let basis = derivative_basis(i, j, m);
    let mut span = LinearSpan::new();
    for &(p, q) in &basis {
        let w = omega(engine, i, j, 0, q)?;
        span.push(field_vec(&engine.derive_n(&w, p)));
    }
    let sol = span.solve(&field_vec(target));
    if !sol.residual.is_empty() {
        return Err(OrbifoldError::NotInSpan);
    }
    let terms = basis
        .iter()
        .enumerate()
        .filter_map(|(n, &(p, q))| sol.coefficients.get(&n).map(|c| (p, q, c.clone())))
        .collect();
    Ok(DerivativeRewrite { i, j, terms })
}

/// `ω^{ij}_{r,m-r} = Σ_k (-1)^{r+k} binom(r,k) ∂^k ω^{ij}_{0,m-k}` for distinct indices.
pub fn mixed_rewrite_formula(i: usize, j: usize, r: u32, m: u32) -> DerivativeRewrite {
    let terms = (0..=r)
        .map(|k| {
            let sign = if (r + k).is_multiple_of(2) { 1 } else { -1 };
            (k, m - k, &Scalar::from_int(sign) * &Scalar::from_bigint(binomial(r as i64, k)))
        })
        .collect();
    DerivativeRewrite { i, j, terms }
}

/// Single generator factor field `∂^d g`.
pub fn factor_field(gen: usize, d: u32) -> Field {
    Field::monomial(Monomial::single(Factor::new(gen, d)))
}

impl QuadraticGenerator {
    /// `w02` for a single generator, `w12_01` (1-based indices) otherwise.
    pub fn label(&self, rank: usize) -> String {
        if rank == 1 {
            format!("w{}{}", self.a, self.b)
        } else {
            format!("w{}{}_{}{}", self.i + 1, self.j + 1, self.a, self.b)
        }
    }

    pub fn field(&self, engine: &Engine) -> Result<Field, OrbifoldError> {
        omega(engine, self.i, self.j, self.a, self.b)
    }
}

/// An alphabet of quadratics labeled by [`QuadraticGenerator::label`].
pub fn quadratic_alphabet(engine: &Engine, generators: &[QuadraticGenerator]) -> Result<Alphabet, OrbifoldError> {
    let rank = engine.spec().generator_count();
    let entries = generators
        .iter()
        .map(|q| Ok((q.label(rank), q.field(engine)?)))
        .collect::<Result<Vec<_>, OrbifoldError>>()?;
    Alphabet::new(engine, entries)
}

/// The strong generators of the Z2-orbifold of the rank-`n` Heisenberg
/// algebra. For `n = 2` the weight-4 generator with equal indices is
/// `ω^{22}_{0,2}` or `ω^{11}_{0,2}` according to `second_square`.
pub fn heisenberg_orbifold_generators(n: usize, second_square: bool) -> Vec<QuadraticGenerator> {
    let q = QuadraticGenerator::new;
    match n {
        0 => Vec::new(),
        1 => vec![q(0, 0, 0, 0), q(0, 0, 0, 2)],
        2 => {
            let top = if second_square { 1 } else { 0 };
            let mut v = vec![q(0, 0, 0, 0), q(0, 1, 0, 0), q(0, 1, 0, 1), q(0, 1, 0, 2), q(1, 1, 0, 0), q(top, top, 0, 2)];
            v.sort();
            v
        }
        _ => {
            let mut v: Vec<QuadraticGenerator> = (0..n).map(|i| q(i, i, 0, 0)).collect();
            for i in 0..n {
                for j in i + 1..n {
                    v.push(q(i, j, 0, 0));
                    v.push(q(i, j, 0, 1));
                }
            }
            v.push(q(0, 0, 0, 2));
            v.sort();
            v
        }
    }
}
