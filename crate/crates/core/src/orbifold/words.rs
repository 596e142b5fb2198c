//! Normally ordered words in a finite alphabet of fields.
//!
//! A word reuses [`Monomial`]: its factors index the alphabet rather than
//! the basic generators. `:x1 x2 ... xn:` is evaluated right-nested, with the
//! letters sorted in factor order.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::coefficients::Scalar;
use crate::kernel::{Engine, Factor, Field, Monomial};

pub type Letter = Factor;
pub type Word = Monomial;

/// Named fields used as letters of normally ordered words.
#[derive(Clone, Debug)]
pub struct Alphabet {
    labels: Vec<String>,
    fields: Vec<Field>,
    weights: Vec<u32>,
}

impl Alphabet {
    /// Each field must be homogeneous of positive weight.
    pub fn new(engine: &Engine, entries: Vec<(String, Field)>) -> Result<Self, super::OrbifoldError> {
        let mut labels = Vec::new();
        let mut fields = Vec::new();
        let mut weights = Vec::new();
        for (label, field) in entries {
            let w = super::homogeneous_weight(engine, &field)?;
            if w == 0 {
                return Err(super::OrbifoldError::NotHomogeneous);
            }
            labels.push(label);
            fields.push(field);
            weights.push(w);
        }
        Ok(Alphabet { labels, fields, weights })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn weight(&self, letter: usize) -> u32 {
        self.weights[letter]
    }

    pub fn word_weight(&self, w: &Word) -> u32 {
        w.factors().iter().map(|f| self.weights[f.gen()] + f.deriv).sum()
    }

    /// The same alphabet with letter `index` removed.
    pub fn without(&self, index: usize) -> Alphabet {
        fn keep<T: Clone>(v: &[T], index: usize) -> Vec<T> {
            let mut v = v.to_vec();
            v.remove(index);
            v
        }
        Alphabet {
            labels: keep(&self.labels, index),
            fields: keep(&self.fields, index),
            weights: keep(&self.weights, index),
        }
    }

    pub fn render_letter(&self, f: Letter) -> String {
        let name = &self.labels[f.gen()];
        if f.deriv == 0 {
            name.clone()
        } else {
            format!("d^{} {}", f.deriv, name)
        }
    }

    /// A single letter renders bare, longer words as `:x y:`, the empty word as `1`.
    pub fn render_word(&self, w: &Word) -> String {
        match w.len() {
            0 => "1".to_string(),
            1 => self.render_letter(w.factors()[0]),
            _ => {
                let parts: Vec<String> = w.factors().iter().map(|&f| self.render_letter(f)).collect();
                format!(":{}:", parts.join(" "))
            }
        }
    }
}

/// All words of exact weight `weight` in ascending word order. Weight 0
/// gives the single empty word.
pub fn words_of_weight(alphabet: &Alphabet, weight: u32) -> Vec<Word> {
    let mut letters: Vec<Letter> = Vec::new();
    for g in 0..alphabet.len() {
        let w = alphabet.weight(g);
        if w <= weight {
            for d in 0..=(weight - w) {
                letters.push(Factor::new(g, d));
            }
        }
    }
    letters.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend(alphabet, &letters, 0, weight, &mut current, &mut out);
    out.sort();
    out
}

fn extend(
    alphabet: &Alphabet,
    letters: &[Letter],
    start: usize,
    remaining: u32,
    current: &mut Vec<Letter>,
    out: &mut Vec<Word>,
) {
    if remaining == 0 {
        out.push(Monomial::from_sorted(current.clone()).expect("letters are emitted in order"));
        return;
    }
    for (i, &l) in letters.iter().enumerate().skip(start) {
        let w = alphabet.weight(l.gen()) + l.deriv;
        if w <= remaining {
            current.push(l);
            extend(alphabet, letters, i, remaining - w, current, out);
            current.pop();
        }
    }
}

/// Evaluates words to PBW normal form in the ambient algebra, with memoization.
pub struct WordEvaluator<'a> {
    engine: &'a Engine,
    alphabet: Alphabet,
    cache: RwLock<HashMap<Word, Arc<Field>>>,
}

impl<'a> WordEvaluator<'a> {
    pub fn new(engine: &'a Engine, alphabet: Alphabet) -> Self {
        WordEvaluator { engine, alphabet, cache: RwLock::new(HashMap::new()) }
    }

    pub fn engine(&self) -> &'a Engine {
        self.engine
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letter_field(&self, l: Letter) -> Field {
        self.engine.derive_n(&self.alphabet.fields[l.gen()], l.deriv)
    }

    pub fn eval(&self, w: &Word) -> Arc<Field> {
        if let Some(f) = self.cache.read().unwrap().get(w) {
            return f.clone();
        }
        let value = match w.first() {
            None => Field::vacuum(),
            Some(l) if w.len() == 1 => self.letter_field(l),
            Some(l) => {
                let rest = self.eval(&w.rest());
                self.engine.wick(&self.letter_field(l), &rest)
            }
        };
        let value = Arc::new(value);
        self.cache.write().unwrap().entry(w.clone()).or_insert(value).clone()
    }

    /// Evaluates a batch in parallel; shorter words first so suffixes are shared.
    pub fn eval_all(&self, words: &[Word]) -> Vec<Arc<Field>> {
        let max = words.iter().map(|w| w.len()).max().unwrap_or(0);
        for len in 1..max {
            let mut suffixes: Vec<Word> = words.iter().filter(|w| w.len() > len).map(|w| suffix(w, len)).collect();
            suffixes.sort();
            suffixes.dedup();
            suffixes.par_iter().for_each(|s| {
                self.eval(s);
            });
        }
        words.par_iter().map(|w| self.eval(w)).collect()
    }

    /// `Σ c · NF(word)`.
    pub fn expand(&self, expression: &[(Word, Scalar)]) -> Field {
        let mut out = Field::zero();
        for (w, c) in expression {
            out.add_scaled(&self.eval(w), c);
        }
        out
    }
}

fn suffix(w: &Word, len: usize) -> Word {
    let f = w.factors();
    Monomial::from_sorted(f[f.len() - len..].to_vec()).expect("suffix of a sorted word")
}

/// `c1*x + c2*:y z:` in the alphabet's labels; `0` when empty.
pub fn render_expression(alphabet: &Alphabet, expression: &[(Word, Scalar)]) -> String {
    let terms: Vec<(Monomial, Scalar)> = expression.iter().map(|(w, c)| (w.clone(), c.clone())).collect();
    crate::kernel::render_terms(&terms, |m| alphabet.render_word(m))
}
