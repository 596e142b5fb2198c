//! Weight-by-weight comparison of the span of generator words with the
//! invariant subspace of the ambient algebra.

use serde::Serialize;

use super::decouple::WeightSpace;
use super::solver::{field_vec, ModularSpan};
use super::words::{words_of_weight, Alphabet, WordEvaluator};
use super::OrbifoldError;
use crate::kernel::{render_monomial, Engine, Field, Monomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanRow {
    pub weight: u32,
    pub words: usize,
    pub rank: usize,
    pub ambient: usize,
    pub full: bool,
    /// An invariant monomial outside the span, when deficient.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanReport {
    pub involution: String,
    pub generators: Vec<String>,
    pub rows: Vec<SpanRow>,
}

impl SpanReport {
    pub fn full(&self) -> bool {
        self.rows.iter().all(|r| r.full)
    }

    pub fn first_deficiency(&self) -> Option<&SpanRow> {
        self.rows.iter().find(|r| !r.full)
    }
}

/// Canonical monomials of weight `weight` with an even number of odd factors.
pub fn invariant_monomials(engine: &Engine, weight: u32, involution: &str) -> Result<Vec<Monomial>, OrbifoldError> {
    let spec = engine.spec();
    if !spec.involutions().iter().any(|i| i == involution) {
        return Err(OrbifoldError::UnknownInvolution(involution.to_string()));
    }
    let basic = Alphabet::new(
        engine,
        (0..spec.generator_count()).map(|g| (spec.generators()[g].name.clone(), Field::generator(g))).collect(),
    )?;
    Ok(words_of_weight(&basic, weight).into_iter().filter(|m| spec.monomial_parity(m, involution) == 1).collect())
}

pub fn ambient_dimension(engine: &Engine, weight: u32, involution: &str) -> Result<usize, OrbifoldError> {
    Ok(invariant_monomials(engine, weight, involution)?.len())
}

fn row(eval: &WordEvaluator, weight: u32, involution: &str) -> Result<SpanRow, OrbifoldError> {
    let engine = eval.engine();
    let ambient = invariant_monomials(engine, weight, involution)?;
    let words = words_of_weight(eval.alphabet(), weight);
    let fields = eval.eval_all(&words);
    let mut modular = ModularSpan::new();
    let mut certified = true;
    for f in &fields {
        if modular.rank() == ambient.len() {
            break;
        }
        if modular.push(&field_vec(f)).is_none() {
            certified = false;
            break;
        }
    }
    if certified && modular.rank() == ambient.len() {
        return Ok(SpanRow { weight, words: words.len(), rank: ambient.len(), ambient: ambient.len(), full: true, witness: None });
    }
    let space = WeightSpace::new(eval, weight);
    let witness = ambient
        .iter()
        .find(|m| !space.solve(&Field::monomial((*m).clone())).1.is_zero())
        .map(|m| render_monomial(engine.spec(), m));
    Ok(SpanRow {
        weight,
        words: words.len(),
        rank: space.rank(),
        ambient: ambient.len(),
        full: witness.is_none(),
        witness,
    })
}

/// Compares, for each weight `1..=cutoff`, the rank of the generator words
/// with the dimension of the invariant subspace.
pub fn strong_span_check(eval: &WordEvaluator, cutoff: u32, involution: &str) -> Result<SpanReport, OrbifoldError> {
    let rows = (1..=cutoff).map(|w| row(eval, w, involution)).collect::<Result<Vec<_>, _>>()?;
    Ok(SpanReport {
        involution: involution.to_string(),
        generators: eval.alphabet().labels().to_vec(),
        rows,
    })
}

/// For each generator, the first weight `≤ cutoff` at which the remaining
/// generators fail to span, or `None` if they span throughout.
pub fn minimality_witnesses(
    engine: &Engine,
    alphabet: &Alphabet,
    cutoff: u32,
    involution: &str,
) -> Result<Vec<(String, Option<SpanRow>)>, OrbifoldError> {
    let mut out = Vec::new();
    for (index, label) in alphabet.labels().iter().enumerate() {
        let eval = WordEvaluator::new(engine, alphabet.without(index));
        let mut found = None;
        for w in 1..=cutoff {
            let r = row(&eval, w, involution)?;
            if !r.full {
                found = Some(r);
                break;
            }
        }
        out.push((label.clone(), found));
    }
    Ok(out)
}
