//! Orbifold generators of affine algebras, their structure constants as
//! rational functions of the level, and the large-level limit.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebras::{Eigenbasis, RootData, CARTAN};
use crate::coefficients::{render_rational, scalar_poles, PoleSet, Scalar};
use crate::kernel::{AlgebraSpec, Engine, Factor, Field, KernelError, Monomial, SpecBuilder};
use crate::orbifold::solver::{field_vec, LinearSpan, SparseVec};
use crate::orbifold::{homogeneous_weight, words_of_weight, Alphabet, OrbifoldError, Word, WordEvaluator};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenericityError {
    #[error("root data does not match the eigenbasis: {0}")]
    RootData(String),
    #[error("{a}∘{n}{b} does not decouple into generator words")]
    Decoupling { a: String, b: String, n: u32 },
    #[error("spec has no symbolic level")]
    NotSymbolic,
    #[error("spec carries no bilinear form")]
    NoForm,
    #[error("{a}∘{n}{b}: coefficient {coefficient} grows at large level")]
    Diverges { a: String, b: String, n: u32, coefficient: String },
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn field_of(f: Factor) -> Field {
    Field::monomial(Monomial::single(f))
}

/// `:∂^a u ∂^b v:` for basic generators `u`, `v`.
fn quad(engine: &Engine, u: usize, a: u32, v: usize, b: u32) -> Field {
    engine.wick(&field_of(Factor::new(u, a)), &field_of(Factor::new(v, b)))
}

/// Strong generators of the orbifold of an affine algebra in the eigenbasis
/// `E_1..E_m, F_1..F_m, h_1..h_l`.
///
/// For sl2 (`m = l = 1`, generators `G, F, H`) this is
/// `F, Q00 = :GG:, U00 = :HH:, U02 = :H ∂²H:, V00 = :HG:, V01 = :H ∂G:, V02 = :H ∂²G:`.
/// Otherwise, with `u_1..u_d` the odd generators `E..., h...`: every `F_i`,
/// `:u_a u_b:` for `a <= b`, one weight-3 field per pair `a < b`, and `:E_1 ∂²E_1:`.
pub fn orbifold_generators(eigen: &Eigenbasis, roots: &RootData) -> Result<Vec<(String, Field)>, GenericityError> {
    let spec = &eigen.spec;
    let (m, l) = (roots.roots.len(), roots.cartan.len());
    if m == 0 || spec.generator_count() != 2 * m + l {
        return Err(GenericityError::RootData(format!(
            "{} generators for {m} positive roots and rank {l}",
            spec.generator_count()
        )));
    }
    let engine = Engine::new(std::sync::Arc::new(spec.clone()));
    let name = |g: usize| spec.generators()[g].name.clone();
    let mut out: Vec<(String, Field)> = (m..2 * m).map(|g| (name(g), Field::generator(g))).collect();
    if m == 1 && l == 1 {
        let (g, h) = (0, 2);
        out.push(("Q00".into(), quad(&engine, g, 0, g, 0)));
        out.push(("U00".into(), quad(&engine, h, 0, h, 0)));
        out.push(("U02".into(), quad(&engine, h, 0, h, 2)));
        out.push(("V00".into(), quad(&engine, h, 0, g, 0)));
        out.push(("V01".into(), quad(&engine, h, 0, g, 1)));
        out.push(("V02".into(), quad(&engine, h, 0, g, 2)));
        return Ok(out);
    }
    let odd: Vec<usize> = (0..m).chain(2 * m..2 * m + l).collect();
    for (x, &u) in odd.iter().enumerate() {
        for &v in &odd[x..] {
            out.push((format!("Q[{},{}]00", name(u), name(v)), quad(&engine, u, 0, v, 0)));
        }
    }
    for (x, &u) in odd.iter().enumerate() {
        for &v in &odd[x + 1..] {
            // Cartan-root pairs take the derivative on the root generator.
            let (p, q) = if u < m && v >= 2 * m { (v, u) } else { (u, v) };
            out.push((format!("Q[{},{}]01", name(p), name(q)), quad(&engine, p, 0, q, 1)));
        }
    }
    out.push((format!("Q[{},{}]02", name(0), name(0)), quad(&engine, 0, 0, 0, 2)));
    Ok(out)
}

/// Number of generators per weight of the type `W(1^m, 2^{d+C(d,2)}, 3^{C(d,2)}, 4)`
/// with `d = m + l`; for `m = l = 1` the sl2 type `W(1, 2^3, 3, 4^2)`.
pub fn type_formula(m: u64, l: u64) -> BTreeMap<u32, u64> {
    let d = m + l;
    let pairs = d * (d - 1) / 2;
    let top = if m == 1 && l == 1 { 2 } else { 1 };
    BTreeMap::from([(1, m), (2, d + pairs), (3, pairs), (4, top)])
}

/// Generator counts per weight from the index sets used by [`orbifold_generators`],
/// without building any field.
pub fn builder_counts(m: u64, l: u64) -> BTreeMap<u32, u64> {
    if m == 1 && l == 1 {
        return BTreeMap::from([(1, 1), (2, 3), (3, 1), (4, 2)]);
    }
    let d = m + l;
    let mut counts = BTreeMap::new();
    *counts.entry(1).or_insert(0) += m;
    for a in 0..d {
        for _b in a..d {
            *counts.entry(2).or_insert(0) += 1;
        }
        for _b in a + 1..d {
            *counts.entry(3).or_insert(0) += 1;
        }
    }
    *counts.entry(4).or_insert(0) += 1;
    counts
}

/// One row of the classification of simple Lie algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationRow {
    pub name: String,
    pub dimension: u64,
    pub rank: u64,
    pub positive_roots: u64,
}

/// Classical series for `n` in the given range (respecting each series'
/// lower bound) followed by the five exceptional algebras.
pub fn classification_table(max_n: u64) -> Vec<ClassificationRow> {
    let row = |name: String, dimension: u64, rank: u64, positive_roots: u64| ClassificationRow {
        name,
        dimension,
        rank,
        positive_roots,
    };
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(row(format!("sl{}", n + 1), (n + 1) * (n + 1) - 1, n, (n * n + n) / 2));
        if n >= 2 {
            out.push(row(format!("so{}", 2 * n + 1), n * (2 * n + 1), n, n * n));
        }
        if n >= 3 {
            out.push(row(format!("sp{}", 2 * n), n * (2 * n + 1), n, n * n));
        }
        if n >= 4 {
            out.push(row(format!("so{}", 2 * n), n * (2 * n - 1), n, n * n - n));
        }
    }
    for (name, dim, l, m) in [("G2", 14, 2, 6), ("F4", 52, 4, 24), ("E6", 78, 6, 36), ("E7", 133, 7, 63), ("E8", 248, 8, 120)]
    {
        out.push(row(name.into(), dim, l, m));
    }
    out
}

/// Structure constants `a∘_n b = Σ c · word` with their poles in `k`.
#[derive(Clone, Debug, Default)]
pub struct PoleReport {
    pub generators: Vec<String>,
    /// `(a, b, n) -> [(word, coefficient)]` over the generator alphabet.
    pub entries: BTreeMap<(usize, usize, u32), Vec<(Word, Scalar)>>,
    pub poles: PoleSet,
    /// Zeros and poles of the elimination pivots, for diagnostics only.
    pub intermediate: PoleSet,
    /// Levels where the chosen basis words were required to stay independent.
    pub avoided: Vec<BigRational>,
    /// Poles of the constants at which the words of some weight lose rank.
    pub rank_drops: Vec<RankDrop>,
}

/// The words of one weight span less at `k` than at generic level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankDrop {
    pub weight: u32,
    pub k: String,
    pub generic_rank: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleRecord {
    pub generators: Vec<String>,
    pub entries: Vec<EntryRecord>,
    pub poles: Vec<String>,
    pub residual: Vec<String>,
    pub intermediate_poles: Vec<String>,
    pub avoided: Vec<String>,
    pub rank_drops: Vec<RankDrop>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryRecord {
    pub a: String,
    pub b: String,
    pub n: u32,
    pub terms: Vec<(String, String)>,
}

impl PoleReport {
    pub fn pole_strings(&self) -> Vec<String> {
        self.poles.roots.iter().map(render_rational).collect()
    }

    /// Poles at which some weight space of words loses rank, so that no
    /// choice of basis words can remove them.
    pub fn forced_poles(&self) -> BTreeSet<String> {
        self.rank_drops.iter().map(|d| d.k.clone()).collect()
    }

    pub fn record(&self, alphabet: &Alphabet) -> PoleRecord {
        PoleRecord {
            generators: self.generators.clone(),
            entries: self
                .entries
                .iter()
                .map(|(&(a, b, n), terms)| EntryRecord {
                    a: self.generators[a].clone(),
                    b: self.generators[b].clone(),
                    n,
                    terms: terms.iter().map(|(w, c)| (alphabet.render_word(w), c.to_string())).collect(),
                })
                .collect(),
            poles: self.pole_strings(),
            residual: self.poles.residual.iter().map(|p| p.to_string()).collect(),
            intermediate_poles: self.intermediate.roots.iter().map(render_rational).collect(),
            avoided: self.avoided.iter().map(render_rational).collect(),
            rank_drops: self.rank_drops.clone(),
        }
    }

    /// Replaces `k` by `at` in every constant.
    pub fn specialize(&self, at: &BigRational) -> Result<BTreeMap<(usize, usize, u32), Vec<(Word, Scalar)>>, GenericityError> {
        let mut out = BTreeMap::new();
        for (key, terms) in &self.entries {
            let mut v = Vec::new();
            for (w, c) in terms {
                let s = c.specialize(at).map_err(KernelError::from)?;
                if !s.is_zero() {
                    v.push((w.clone(), s));
                }
            }
            out.insert(*key, v);
        }
        Ok(out)
    }
}

fn specialize_vec(v: &SparseVec<Monomial>, at: &BigRational) -> SparseVec<Monomial> {
    v.iter()
        .filter_map(|(m, c)| {
            let s = c.specialize(at).expect("word normal forms are polynomial in k");
            (!s.is_zero()).then(|| (m.clone(), s))
        })
        .collect()
}

/// Words of one weight with their normal forms.
struct WeightWords {
    words: Vec<Word>,
    columns: Vec<SparseVec<Monomial>>,
    generic_rank: usize,
}

/// Picks basis words in order, skipping any word that depends on the chosen
/// ones generically or at one of the `avoid` levels. If that leaves the basis
/// short, the pick is repeated in reverse word order, then without one of the
/// levels (latest first), then with ever shorter prefixes of `avoid`.
fn select_basis(space: &WeightWords, avoid: &[BigRational]) -> (Vec<usize>, LinearSpan<Monomial>) {
    if let Some(found) = greedy_basis(space, avoid) {
        return found;
    }
    let reversed: Vec<usize> = (0..space.columns.len()).rev().collect();
    if let Some(found) = greedy_order(space, avoid, &reversed) {
        return found;
    }
    for skip in (0..avoid.len()).rev() {
        let rest: Vec<BigRational> =
            avoid.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, p)| p.clone()).collect();
        if let Some(found) = greedy_basis(space, &rest) {
            return found;
        }
    }
    for keep in (0..avoid.len()).rev() {
        if let Some(found) = greedy_basis(space, &avoid[..keep]) {
            return found;
        }
    }
    unreachable!("generic independence alone always completes the basis")
}

fn greedy_basis(space: &WeightWords, avoid: &[BigRational]) -> Option<(Vec<usize>, LinearSpan<Monomial>)> {
    let order: Vec<usize> = (0..space.columns.len()).collect();
    greedy_order(space, avoid, &order)
}

fn greedy_order(space: &WeightWords, avoid: &[BigRational], order: &[usize]) -> Option<(Vec<usize>, LinearSpan<Monomial>)> {
    let mut span = LinearSpan::new();
    let mut at: Vec<LinearSpan<Monomial>> = avoid.iter().map(|_| LinearSpan::new()).collect();
    let mut chosen = Vec::new();
    for &i in order {
        let col = &space.columns[i];
        if chosen.len() == space.generic_rank {
            break;
        }
        if span.solve(col).residual.is_empty() {
            continue;
        }
        let special: Vec<_> = avoid.iter().map(|p| specialize_vec(col, p)).collect();
        if at.iter().zip(&special).all(|(s, c)| !s.solve(c).residual.is_empty()) {
            span.push(col.clone());
            for (s, c) in at.iter_mut().zip(special) {
                s.push(c);
            }
            chosen.push(i);
        }
    }
    (chosen.len() == space.generic_rank).then_some((chosen, span))
}

fn rank_at(space: &WeightWords, at: &BigRational) -> usize {
    let mut span = LinearSpan::new();
    for col in &space.columns {
        span.push(specialize_vec(col, at));
        if span.rank() == space.generic_rank {
            break;
        }
    }
    span.rank()
}

/// Expands every `a∘_n b` (`n >= 0`) among the generators in the words of the
/// generator alphabet, with words taken in their fixed order. When the words
/// of a weight are dependent, only an independent subset carries
/// coefficients, so the constants (and their poles) depend on that choice.
/// Poles come from the final constants only.
pub fn structure_constants(eval: &WordEvaluator) -> Result<PoleReport, GenericityError> {
    structure_constants_avoiding(eval, &[])
}

/// Like [`structure_constants`], choosing basis words that stay independent
/// at each level in `avoid` whenever the words of that weight allow it.
pub fn structure_constants_avoiding(eval: &WordEvaluator, avoid: &[BigRational]) -> Result<PoleReport, GenericityError> {
    let engine = eval.engine();
    let alphabet = eval.alphabet();
    let fields = alphabet.fields();
    let count = fields.len();
    let mut jobs: Vec<(usize, usize, u32, Field)> = Vec::new();
    for a in 0..count {
        for b in 0..count {
            for (n, f) in engine.ope(&fields[a], &fields[b]) {
                jobs.push((a, b, n, f));
            }
        }
    }
    let weights: BTreeSet<u32> =
        jobs.iter().map(|j| homogeneous_weight(engine, &j.3)).collect::<Result<BTreeSet<_>, _>>()?;
    let spaces: BTreeMap<u32, (WeightWords, Vec<usize>, LinearSpan<Monomial>)> = weights
        .into_par_iter()
        .map(|w| {
            let words = words_of_weight(alphabet, w);
            let columns: Vec<_> = eval.eval_all(&words).iter().map(|v| field_vec(v)).collect();
            let mut generic = LinearSpan::new();
            for c in &columns {
                generic.push(c.clone());
            }
            let space = WeightWords { words, columns, generic_rank: generic.rank() };
            let (chosen, span) = select_basis(&space, avoid);
            (w, (space, chosen, span))
        })
        .collect();
    let mut report = PoleReport {
        generators: alphabet.labels().to_vec(),
        avoided: avoid.to_vec(),
        ..Default::default()
    };
    for (_, _, span) in spaces.values() {
        for p in span.pivots() {
            report.intermediate.merge(scalar_poles(p));
            if let Ok(inv) = p.inv() {
                report.intermediate.merge(scalar_poles(&inv));
            }
        }
    }
    let solved: Vec<_> = jobs
        .par_iter()
        .map(|(a, b, n, f)| {
            let w = homogeneous_weight(engine, f).expect("checked above");
            let (space, chosen, span) = &spaces[&w];
            let sol = span.solve(&field_vec(f));
            if !sol.residual.is_empty() {
                return Err(GenericityError::Decoupling {
                    a: alphabet.labels()[*a].clone(),
                    b: alphabet.labels()[*b].clone(),
                    n: *n,
                });
            }
            let terms: Vec<(Word, Scalar)> =
                sol.coefficients.into_iter().map(|(i, c)| (space.words[chosen[i]].clone(), c)).collect();
            Ok(((*a, *b, *n), terms))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (key, terms) in solved {
        for (_, c) in &terms {
            report.poles.merge(scalar_poles(c));
        }
        report.entries.insert(key, terms);
    }
    let probes: Vec<(u32, BigRational)> = spaces
        .keys()
        .flat_map(|&w| report.poles.roots.iter().map(move |p| (w, p.clone())))
        .collect();
    report.rank_drops = probes
        .par_iter()
        .filter_map(|(w, p)| {
            let space = &spaces[w].0;
            let rank = rank_at(space, p);
            (rank < space.generic_rank).then(|| RankDrop {
                weight: *w,
                k: render_rational(p),
                generic_rank: space.generic_rank,
                rank,
            })
        })
        .collect();
    Ok(report)
}

/// Repeats [`structure_constants_avoiding`], adding every pole that is not a
/// rank drop to the avoided levels, until no removable pole is left or the
/// round limit is reached.
pub fn reduced_structure_constants(eval: &WordEvaluator, rounds: usize) -> Result<PoleReport, GenericityError> {
    let mut avoid: Vec<BigRational> = Vec::new();
    let mut report = structure_constants_avoiding(eval, &avoid)?;
    for _ in 0..rounds {
        let forced = report.forced_poles();
        let removable: Vec<BigRational> = report
            .poles
            .roots
            .iter()
            .filter(|p| !forced.contains(&render_rational(p)) && !avoid.contains(p))
            .cloned()
            .collect();
        if removable.is_empty() {
            break;
        }
        avoid.extend(removable);
        report = structure_constants_avoiding(eval, &avoid)?;
    }
    Ok(report)
}

/// One rescaled product coefficient: `coefficient · k^{half_exponent/2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitEntry {
    pub a: String,
    pub b: String,
    pub n: u32,
    /// Rendered monomial of the rescaled generators, `1` for the vacuum.
    pub term: String,
    pub coefficient: String,
    pub half_exponent: i64,
    /// The `k → ∞` limit as an exact rational.
    pub limit: String,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub entries: Vec<LimitEntry>,
    /// The limiting Heisenberg-type algebra with Gram matrix `B`.
    pub limit: AlgebraSpec,
    /// Every limit matches `B` on `∘1` and vanishes elsewhere.
    pub matches_gram: bool,
}

/// Rescales each generator by `k^{-1/2}` and takes `k → ∞` in every table entry.
///
/// A term with `r` generator factors in `X∘_n Y` picks up `k^{(r-2)/2}`;
/// half-exponents are tracked as integers so coefficients stay in `Q(k)`.
pub fn large_level_limit(spec: &AlgebraSpec) -> Result<LimitReport, GenericityError> {
    if !spec.symbolic_level() {
        return Err(GenericityError::NotSymbolic);
    }
    let form = spec.bilinear_form.as_ref().ok_or(GenericityError::NoForm)?;
    let names: Vec<String> = spec.generators().iter().map(|g| g.name.clone()).collect();
    let mut entries = Vec::new();
    let mut matches = true;
    let count = spec.generator_count();
    for a in 0..count {
        for b in 0..count {
            for n in 0..spec.table().pole_order(a, b) as u32 {
                let Some(f) = spec.table().get(a, b, n) else { continue };
                for (m, c) in f.terms() {
                    let half = m.len() as i64 - 2;
                    let limit = limit_at_infinity(c, half).ok_or_else(|| GenericityError::Diverges {
                        a: names[a].clone(),
                        b: names[b].clone(),
                        n,
                        coefficient: c.to_string(),
                    })?;
                    let expected = if n == 1 && m.is_vacuum() { form[a][b].clone() } else { BigRational::zero() };
                    matches &= limit == expected;
                    entries.push(LimitEntry {
                        a: names[a].clone(),
                        b: names[b].clone(),
                        n,
                        term: crate::kernel::render_field(spec, &Field::monomial(m.clone())),
                        coefficient: c.to_string(),
                        half_exponent: half,
                        limit: render_rational(&limit),
                    });
                }
            }
        }
    }
    // A vacuum ∘1 entry absent from the table must have a zero Gram entry.
    for a in 0..count {
        for b in 0..count {
            let present = spec.table().get(a, b, 1).map(|f| !f.constant().is_zero()).unwrap_or(false);
            if !present && !form[a][b].is_zero() {
                matches = false;
            }
        }
    }
    let mut builder = SpecBuilder::new(&format!("{}-limit", spec.name()));
    for inv in spec.involutions() {
        builder.involution(inv);
    }
    for (g, sym) in spec.generators().iter().enumerate() {
        builder.generator(&sym.name, sym.weight)?;
        for inv in spec.involutions() {
            builder.parity(g, inv, spec.parity(g, inv))?;
        }
    }
    for a in 0..count {
        for b in 0..count {
            if !form[a][b].is_zero() {
                builder.entry(a, b, 1, Field::scalar(Scalar::from_rational(&form[a][b])))?;
            }
        }
    }
    Ok(LimitReport { entries, limit: builder.build()?, matches_gram: matches })
}

/// Limit of `c(k) · k^{half/2}` as `k → ∞`; `None` if it diverges.
fn limit_at_infinity(c: &Scalar, half: i64) -> Option<BigRational> {
    let Some(deg) = c.degree_at_infinity() else { return Some(BigRational::zero()) };
    // Growth exponent in half-units: 2·deg + half.
    match (2 * deg + half).cmp(&0) {
        std::cmp::Ordering::Greater => None,
        std::cmp::Ordering::Less => Some(BigRational::zero()),
        std::cmp::Ordering::Equal => c.leading_ratio(),
    }
}

/// `true` iff the generator alphabet is invariant under the Cartan involution.
pub fn generators_invariant(engine: &Engine, gens: &[(String, Field)]) -> Result<bool, GenericityError> {
    for (_, f) in gens {
        if !crate::orbifold::is_invariant(engine, f, CARTAN)? {
            return Ok(false);
        }
    }
    Ok(true)
}
