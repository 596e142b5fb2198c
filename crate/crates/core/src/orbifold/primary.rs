//! Primary corrections: subtracting a normally ordered polynomial in lower
//! fields so the result is primary for a given conformal vector.

use super::solver::{LinearSpan, SparseVec};
use super::words::{render_expression, words_of_weight, Word, WordEvaluator};
use super::{homogeneous_weight, OrbifoldError};
use crate::coefficients::Scalar;
use crate::kernel::{Engine, Field, Monomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryResult {
    pub weight: u32,
    /// The primary field `field - Σ c_w NF(w)`.
    pub primary: Field,
    /// The subtracted combination `Σ c_w w`.
    pub correction: Vec<(Word, Scalar)>,
}

impl PrimaryResult {
    /// `field - c1*x - c2*:y z:` in the ansatz labels.
    pub fn render(&self, eval: &WordEvaluator, name: &str) -> String {
        let negated: Vec<(Word, Scalar)> = self.correction.iter().map(|(w, c)| (w.clone(), -c.clone())).collect();
        let tail = render_expression(eval.alphabet(), &negated);
        if negated.is_empty() {
            name.to_string()
        } else if let Some(rest) = tail.strip_prefix('-') {
            format!("{name} - {rest}")
        } else {
            format!("{name} + {tail}")
        }
    }
}

/// `L∘_m a - δ_{m,1} Δ a` for `m = 1..=Δ+1`, stacked into one vector.
fn conditions(engine: &Engine, l: &Field, a: &Field, weight: u32) -> SparseVec<(u32, Monomial)> {
    let mut out = SparseVec::new();
    for m in 1..=weight + 1 {
        let mut v = engine.nproduct(l, a, m as i64);
        if m == 1 {
            v.add_scaled(a, &-Scalar::from_int(weight as i64));
        }
        for (mono, c) in v.into_terms() {
            out.insert((m, mono), c);
        }
    }
    out
}

/// True iff `L∘_1 a = Δ a` and `L∘_m a = 0` for `m ≥ 2`.
pub fn is_primary(engine: &Engine, l: &Field, a: &Field) -> Result<bool, OrbifoldError> {
    let weight = homogeneous_weight(engine, a)?;
    Ok(conditions(engine, l, a, weight).is_empty())
}

/// Finds `Σ c_w w` over the words of the ansatz alphabet of the field's weight
/// such that `field - Σ c_w NF(w)` is primary for `l`.
pub fn primary_correct(eval: &WordEvaluator, field: &Field, l: &Field) -> Result<PrimaryResult, OrbifoldError> {
    let engine = eval.engine();
    let weight = homogeneous_weight(engine, field)?;
    let words = words_of_weight(eval.alphabet(), weight);
    let fields = eval.eval_all(&words);
    let mut span = LinearSpan::new();
    for f in &fields {
        span.push(conditions(engine, l, f, weight));
    }
    let sol = span.solve(&conditions(engine, l, field, weight));
    if !sol.residual.is_empty() {
        return Err(OrbifoldError::NoPrimaryCorrection);
    }
    let mut primary = field.clone();
    let mut correction = Vec::new();
    for (i, c) in sol.coefficients {
        primary.add_scaled(&fields[i], &-c.clone());
        correction.push((words[i].clone(), c));
    }
    Ok(PrimaryResult { weight, primary, correction })
}
