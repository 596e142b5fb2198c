//! Decoupling relations: expressing a field as a normally ordered polynomial
//! in a set of strong generators.

use std::collections::BTreeSet;

use serde::Serialize;

use super::solver::{field_vec, LinearSpan};
use super::words::{render_expression, words_of_weight, Word, WordEvaluator};
use super::{homogeneous_weight, omega, rewrite_quadratic, DerivativeRewrite, OrbifoldError};
use crate::coefficients::Scalar;
use crate::kernel::{render_field, Field, Monomial};

/// All words of one weight together with the elimination of their normal forms.
pub struct WeightSpace {
    weight: u32,
    words: Vec<Word>,
    span: LinearSpan<Monomial>,
}

impl WeightSpace {
    pub fn new(eval: &WordEvaluator, weight: u32) -> Self {
        let words = words_of_weight(eval.alphabet(), weight);
        let fields = eval.eval_all(&words);
        let mut span = LinearSpan::new();
        for f in &fields {
            span.push(field_vec(f));
        }
        WeightSpace { weight, words, span }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// Solves `target = Σ c_w NF(w)`; the residual is what the words cannot reach.
    pub fn solve(&self, target: &Field) -> (Vec<(Word, Scalar)>, Field) {
        let sol = self.span.solve(&field_vec(target));
        let expression = sol.coefficients.into_iter().map(|(i, c)| (self.words[i].clone(), c)).collect();
        (expression, Field::from_terms(sol.residual))
    }
}

/// `target = expression + residual`, with `residual = 0` on success.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplingResult {
    pub target: Field,
    pub weight: u32,
    pub expression: Vec<(Word, Scalar)>,
    pub residual: Field,
    /// Distinct coefficient denominators other than 1.
    pub denominators: BTreeSet<String>,
}

/// Structured export of a [`DecouplingResult`].
#[derive(Clone, Debug, Serialize)]
pub struct DecouplingRecord {
    pub target: String,
    pub weight: u32,
    pub expression: String,
    pub terms: Vec<(String, String)>,
    pub residual: String,
    pub denominators: Vec<String>,
    pub success: bool,
}

impl DecouplingResult {
    pub fn success(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.expression.iter().find(|(x, _)| x == w).map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero)
    }

    pub fn render(&self, eval: &WordEvaluator) -> String {
        render_expression(eval.alphabet(), &self.expression)
    }

    pub fn record(&self, eval: &WordEvaluator) -> DecouplingRecord {
        let spec = eval.engine().spec();
        DecouplingRecord {
            target: render_field(spec, &self.target),
            weight: self.weight,
            expression: self.render(eval),
            terms: self
                .expression
                .iter()
                .map(|(w, c)| (eval.alphabet().render_word(w), c.to_string()))
                .collect(),
            residual: render_field(spec, &self.residual),
            denominators: self.denominators.iter().cloned().collect(),
            success: self.success(),
        }
    }
}

fn denominators(expression: &[(Word, Scalar)]) -> BTreeSet<String> {
    expression
        .iter()
        .filter(|(_, c)| !c.denom().is_one())
        .map(|(_, c)| c.denom().to_string())
        .collect()
}

/// Writes a homogeneous `target` in the words of `eval`'s alphabet of the same weight.
pub fn decouple(eval: &WordEvaluator, target: &Field) -> Result<DecouplingResult, OrbifoldError> {
    let weight = homogeneous_weight(eval.engine(), target)?;
    let space = WeightSpace::new(eval, weight);
    Ok(decouple_in(&space, target))
}

pub(crate) fn decouple_in(space: &WeightSpace, target: &Field) -> DecouplingResult {
    let (expression, residual) = space.solve(target);
    DecouplingResult {
        target: target.clone(),
        weight: space.weight(),
        denominators: denominators(&expression),
        expression,
        residual,
    }
}

/// One rung: `R∘1 ω^{ij}_{0,q}` rewritten in the derivative basis, its
/// coefficient on `ω^{ij}_{0,q'}`, and the decoupling of `ω^{ij}_{0,q'}`.
#[derive(Clone, Debug)]
pub struct LadderStep {
    pub step: usize,
    pub from: u32,
    pub to: u32,
    pub image: DerivativeRewrite,
    pub leading: Scalar,
    pub result: DecouplingResult,
}

/// Starting from a decoupling of `ω^{ij}_{0,q}`, applies `raising∘1`
/// repeatedly; each step isolates the new top quadratic and decouples it.
pub fn decoupling_ladder(
    eval: &WordEvaluator,
    seed: &DecouplingResult,
    (i, j, q): (usize, usize, u32),
    raising: &Field,
    steps: usize,
) -> Result<Vec<LadderStep>, OrbifoldError> {
    let engine = eval.engine();
    if !seed.success() {
        return Err(ladder_error(0, "seed relation has a nonzero residual"));
    }
    if seed.target != omega(engine, i, j, 0, q)? {
        return Err(ladder_error(0, "seed does not decouple the starting quadratic"));
    }
    let mut out = Vec::new();
    let mut q = q;
    for step in 1..=steps {
        let current = omega(engine, i, j, 0, q)?;
        let image = engine.nproduct(raising, &current, 1);
        let top = match homogeneous_weight(engine, &image) {
            Ok(w) if w >= 2 && !image.is_zero() => w - 2,
            _ => return Err(ladder_error(step, "image is zero or not homogeneous")),
        };
        let rewrite =
            rewrite_quadratic(engine, i, j, top, &image).map_err(|_| ladder_error(step, "image is not quadratic"))?;
        let leading = rewrite.coefficient(0, top);
        if leading.is_zero() {
            return Err(ladder_error(step, "leading coefficient vanishes"));
        }
        let next = omega(engine, i, j, 0, top)?;
        let result = decouple(eval, &next)?;
        if !result.success() {
            return Err(ladder_error(step, "new top quadratic does not decouple"));
        }
        out.push(LadderStep { step, from: q, to: top, image: rewrite, leading, result });
        q = top;
    }
    Ok(out)
}

fn ladder_error(step: usize, reason: &str) -> OrbifoldError {
    OrbifoldError::Ladder { step, reason: reason.to_string() }
}
