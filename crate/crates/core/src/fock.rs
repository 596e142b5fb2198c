//! Vacuum-module oracle.
//!
//! Fields act on the vacuum module through their modes. States are linear
//! combinations of ordered creation words `g1(m1) g2(m2) ... |0>`, and every
//! mode is pushed into place with the commutator formula
//! `[g(p), h(q)] = Σ_j binom(p, j) (g∘_j h)(p+q-j)`. Nothing here touches the
//! kernel's Wick recursion, so agreement between the two is a genuine check.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::coefficients::{binomial, falling, CoefficientError, Scalar};
use crate::kernel::{AlgebraSpec, Factor, Field, Monomial};

/// Level used for affine checks when none is given.
pub const DEFAULT_K0: i64 = 5;
pub const DEFAULT_CUTOFF: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("table entry {a}∘{n}{b} is not linear in the generators")]
    NonlinearTable { a: String, b: String, n: u32 },
    #[error("result of weight {weight} exceeds the cutoff {cutoff}")]
    ExceedsCutoff { weight: i64, cutoff: u32 },
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

/// The mode `g(index)`; creation words only hold negative indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Mode {
    gen: u32,
    index: i64,
}

/// Ordered creation word; sorted by generator, then more negative modes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CreationWord(Vec<Mode>);

/// Element of the vacuum module with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModuleState {
    terms: BTreeMap<CreationWord, BigRational>,
}

impl ModuleState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        let mut s = Self::default();
        s.add(CreationWord::default(), BigRational::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, w: CreationWord, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &ModuleState, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        for (w, d) in &other.terms {
            self.add(w.clone(), d * c);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// One term of a linear table entry.
#[derive(Clone, Debug)]
enum LinearTerm {
    Vacuum(BigRational),
    Mode { gen: u32, deriv: u32, coeff: BigRational },
}

type StateCache<K> = RwLock<HashMap<K, ModuleState>>;

/// Outcome of comparing two fields mode by mode.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct OracleReport {
    pub agree: bool,
    /// Number of `(state, mode)` pairs compared.
    pub checked: usize,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Witness {
    pub state: String,
    pub mode: i64,
    pub lhs: String,
    pub rhs: String,
}

/// The vacuum module of a freely generated algebra with a linear table,
/// evaluated at a rational level.
pub struct FockModule {
    names: Vec<String>,
    weights: Vec<u32>,
    table: HashMap<(u32, u32), Vec<Vec<LinearTerm>>>,
    k0: BigRational,
    cutoff: u32,
    gen_cache: StateCache<(Mode, CreationWord)>,
    field_cache: StateCache<(Monomial, i64, CreationWord)>,
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

impl FockModule {
    /// Builds the module, evaluating every table coefficient at `k0`.
    pub fn new(spec: &AlgebraSpec, k0: Option<BigRational>, cutoff: u32) -> Result<Self, FockError> {
        let k0 = k0.unwrap_or_else(|| BigRational::from_integer(DEFAULT_K0.into()));
        let mut table: HashMap<(u32, u32), Vec<Vec<LinearTerm>>> = HashMap::new();
        for (g, h, n, f) in spec.table().iter() {
            let mut terms = Vec::new();
            for (m, c) in f.terms() {
                let c = c.eval(&k0)?;
                match m.factors() {
                    [] => terms.push(LinearTerm::Vacuum(c)),
                    [x] => terms.push(LinearTerm::Mode { gen: x.gen, deriv: x.deriv, coeff: c }),
                    _ => {
                        return Err(FockError::NonlinearTable {
                            a: spec.generators()[g].name.clone(),
                            b: spec.generators()[h].name.clone(),
                            n,
                        })
                    }
                }
            }
            let slot = table.entry((g as u32, h as u32)).or_default();
            if slot.len() <= n as usize {
                slot.resize_with(n as usize + 1, Vec::new);
            }
            slot[n as usize] = terms;
        }
        Ok(FockModule {
            names: spec.generators().iter().map(|g| g.name.clone()).collect(),
            weights: spec.generators().iter().map(|g| g.weight).collect(),
            table,
            k0,
            cutoff,
            gen_cache: Default::default(),
            field_cache: Default::default(),
        })
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn k0(&self) -> &BigRational {
        &self.k0
    }

    fn mode_weight(&self, m: Mode) -> i64 {
        self.weights[m.gen as usize] as i64 - m.index - 1
    }

    pub fn word_weight(&self, w: &CreationWord) -> i64 {
        w.0.iter().map(|&m| self.mode_weight(m)).sum()
    }

    fn monomial_weight(&self, m: &Monomial) -> i64 {
        m.factors().iter().map(|f| (self.weights[f.gen()] + f.deriv) as i64).sum()
    }

    /// Renders a state as a sum of creation words.
    pub fn render_state(&self, s: &ModuleState) -> String {
        if s.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (w, c)) in s.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "({c})");
            for m in &w.0 {
                let _ = write!(out, " {}({})", self.names[m.gen as usize], m.index);
            }
            out.push_str("|0>");
        }
        out
    }

    fn render_word(&self, w: &CreationWord) -> String {
        let mut s = ModuleState::zero();
        s.add(w.clone(), BigRational::one());
        self.render_state(&s)
    }

    /// Every creation word of weight at most `cutoff`.
    pub fn basis(&self, cutoff: u32) -> Vec<CreationWord> {
        let mut modes = Vec::new();
        for (g, &wt) in self.weights.iter().enumerate() {
            let mut index = -1i64;
            while wt as i64 - index - 1 <= cutoff as i64 {
                modes.push(Mode { gen: g as u32, index });
                index -= 1;
            }
        }
        modes.sort();
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.extend_basis(&modes, 0, cutoff as i64, &mut current, &mut out);
        out.sort_by_key(|w| (self.word_weight(w), w.clone()));
        out
    }

    fn extend_basis(
        &self,
        modes: &[Mode],
        start: usize,
        budget: i64,
        current: &mut Vec<Mode>,
        out: &mut Vec<CreationWord>,
    ) {
        out.push(CreationWord(current.clone()));
        for i in start..modes.len() {
            let w = self.mode_weight(modes[i]);
            if w <= budget {
                current.push(modes[i]);
                self.extend_basis(modes, i, budget - w, current, out);
                current.pop();
            }
        }
    }

    // ---- basic generator modes ----

    /// `g(p)` applied to a single creation word.
    fn gen_on_word(&self, g: u32, p: i64, w: &CreationWord) -> ModuleState {
        let first = match w.0.first() {
            None => {
                let mut s = ModuleState::zero();
                if p < 0 {
                    s.add(CreationWord(vec![Mode { gen: g, index: p }]), BigRational::one());
                }
                return s;
            }
            Some(&m) => m,
        };
        let this = Mode { gen: g, index: p };
        if p < 0 && this <= first {
            let mut v = Vec::with_capacity(w.0.len() + 1);
            v.push(this);
            v.extend_from_slice(&w.0);
            let mut s = ModuleState::zero();
            s.add(CreationWord(v), BigRational::one());
            return s;
        }
        let key = (Mode { gen: g, index: p }, w.clone());
        if let Some(s) = self.gen_cache.read().unwrap().get(&key) {
            return s.clone();
        }
        // g(p) c rest = c (g(p) rest) + [g(p), c] rest
        let rest = CreationWord(w.0[1..].to_vec());
        let inner = self.gen_on_word(g, p, &rest);
        let mut out = self.gen_on_state(first.gen, first.index, &inner);
        let rest_state = {
            let mut s = ModuleState::zero();
            s.add(rest, BigRational::one());
            s
        };
        out.add_scaled(&self.commutator_on(g, p, first.gen, first.index, &rest_state), &BigRational::one());
        self.gen_cache.write().unwrap().insert(key, out.clone());
        out
    }

    fn gen_on_state(&self, g: u32, p: i64, s: &ModuleState) -> ModuleState {
        let mut out = ModuleState::zero();
        for (w, c) in &s.terms {
            out.add_scaled(&self.gen_on_word(g, p, w), c);
        }
        out
    }

    /// `(∂^d g)(n)` applied to a state.
    fn factor_on_state(&self, g: u32, d: u32, n: i64, s: &ModuleState) -> ModuleState {
        let mut c = rat(falling(n, d));
        if d % 2 == 1 {
            c = -c;
        }
        if c.is_zero() {
            return ModuleState::zero();
        }
        let mut out = ModuleState::zero();
        out.add_scaled(&self.gen_on_state(g, n - d as i64, s), &c);
        out
    }

    /// `[g(p), h(q)]` applied to a state.
    fn commutator_on(&self, g: u32, p: i64, h: u32, q: i64, s: &ModuleState) -> ModuleState {
        let mut out = ModuleState::zero();
        let Some(entries) = self.table.get(&(g, h)) else { return out };
        for (j, terms) in entries.iter().enumerate() {
            let b = rat(binomial(p, j as u32));
            if b.is_zero() {
                continue;
            }
            let n = p + q - j as i64;
            for t in terms {
                match t {
                    LinearTerm::Vacuum(c) => {
                        if n == -1 {
                            out.add_scaled(s, &(&b * c));
                        }
                    }
                    LinearTerm::Mode { gen, deriv, coeff } => {
                        let part = self.factor_on_state(*gen, *deriv, n, s);
                        out.add_scaled(&part, &(&b * coeff));
                    }
                }
            }
        }
        out
    }

    // ---- composite field modes ----

    fn monomial_on_word(&self, m: &Monomial, n: i64, w: &CreationWord) -> ModuleState {
        let unit = || {
            let mut s = ModuleState::zero();
            s.add(w.clone(), BigRational::one());
            s
        };
        match m.factors() {
            [] => {
                return if n == -1 { unit() } else { ModuleState::zero() };
            }
            [x] => return self.factor_on_state(x.gen, x.deriv, n, &unit()),
            _ => {}
        }
        let key = (m.clone(), n, w.clone());
        if let Some(s) = self.field_cache.read().unwrap().get(&key) {
            return s.clone();
        }
        // (:xV:)(n) = Σ_{j<0} x(j) V(n-j-1) + Σ_{j>=0} V(n-j-1) x(j)
        let x: Factor = m.first().unwrap();
        let v = m.rest();
        let ww = self.word_weight(w);
        let wv = self.monomial_weight(&v);
        let wx = (self.weights[x.gen()] + x.deriv) as i64;
        let mut out = ModuleState::zero();
        let lowest = n - ww - wv;
        for j in lowest..0 {
            let inner = self.monomial_on_word(&v, n - j - 1, w);
            if !inner.is_zero() {
                out.add_scaled(&self.factor_on_state(x.gen, x.deriv, j, &inner), &BigRational::one());
            }
        }
        for j in 0..(ww + wx).max(0) {
            let inner = self.factor_on_state(x.gen, x.deriv, j, &unit());
            for (u, c) in &inner.terms {
                out.add_scaled(&self.monomial_on_word(&v, n - j - 1, u), c);
            }
        }
        self.field_cache.write().unwrap().insert(key, out.clone());
        out
    }

    fn field_on_word(&self, a: &FieldQ, n: i64, w: &CreationWord) -> ModuleState {
        let mut out = ModuleState::zero();
        for (m, c) in &a.0 {
            out.add_scaled(&self.monomial_on_word(m, n, w), c);
        }
        out
    }

    fn specialize(&self, a: &Field) -> Result<FieldQ, FockError> {
        let mut terms = Vec::new();
        for (m, c) in a.terms() {
            terms.push((m.clone(), c.eval(&self.k0)?));
        }
        Ok(FieldQ(terms))
    }

    /// The mode `a(n)` applied to `v`; fails if the result lies above the cutoff.
    pub fn mode_action(&self, a: &Field, n: i64, v: &ModuleState) -> Result<ModuleState, FockError> {
        let a = self.specialize(a)?;
        let mut out = ModuleState::zero();
        for (w, c) in &v.terms {
            out.add_scaled(&self.field_on_word(&a, n, w), c);
        }
        if let Some(w) = out.terms.keys().map(|w| self.word_weight(w)).max() {
            if w > self.cutoff as i64 {
                return Err(FockError::ExceedsCutoff { weight: w, cutoff: self.cutoff });
            }
        }
        Ok(out)
    }

    /// The state `a(-1)|0>` corresponding to a field.
    pub fn state_of(&self, a: &Field) -> Result<ModuleState, FockError> {
        let a = self.specialize(a)?;
        Ok(self.field_on_word(&a, -1, &CreationWord::default()))
    }

    /// A state made of one creation word, given as `(generator, mode)` pairs.
    pub fn creation_state(&self, modes: &[(usize, i64)]) -> ModuleState {
        let mut s = ModuleState::vacuum();
        for &(g, m) in modes.iter().rev() {
            s = self.gen_on_state(g as u32, m, &s);
        }
        s
    }

    /// Compares `lhs(n) w` with `rhs(n) w` for every basis state `w` and every
    /// mode `n` whose result has weight at most the cutoff, plus the states
    /// `lhs(-1)|0>` and `rhs(-1)|0>`.
    pub fn verify(&self, lhs: &Field, rhs: &Field) -> Result<OracleReport, FockError> {
        self.verify_exprs(&Expr::Field(lhs.clone()), &Expr::Field(rhs.clone()))
    }

    /// Like [`FockModule::verify`], for expressions whose products are
    /// evaluated by the oracle itself.
    pub fn verify_exprs(&self, lhs: &Expr, rhs: &Expr) -> Result<OracleReport, FockError> {
        let l = self.prepare(lhs)?;
        let r = self.prepare(rhs)?;
        let vac = CreationWord::default();
        let (sl, sr) = (self.expr_on_word(&l, -1, &vac), self.expr_on_word(&r, -1, &vac));
        if sl != sr {
            return Ok(OracleReport {
                agree: false,
                checked: 1,
                witness: Some(Witness {
                    state: "|0>".into(),
                    mode: -1,
                    lhs: self.render_state(&sl),
                    rhs: self.render_state(&sr),
                }),
            });
        }
        let weight = l.weight.max(r.weight);
        let basis = self.basis(self.cutoff);
        let results: Vec<(usize, Option<Witness>)> = basis
            .par_iter()
            .map(|w| {
                let ww = self.word_weight(w);
                let top = ww + weight - 1;
                let mut checked = 0;
                for n in (top - self.cutoff as i64)..=top {
                    checked += 1;
                    let a = self.expr_on_word(&l, n, w);
                    let b = self.expr_on_word(&r, n, w);
                    if a != b {
                        return (
                            checked,
                            Some(Witness {
                                state: self.render_word(w),
                                mode: n,
                                lhs: self.render_state(&a),
                                rhs: self.render_state(&b),
                            }),
                        );
                    }
                }
                (checked, None)
            })
            .collect();
        let checked = 1 + results.iter().map(|r| r.0).sum::<usize>();
        let witness = results.into_iter().find_map(|r| r.1);
        Ok(OracleReport { agree: witness.is_none(), checked, witness })
    }

    /// The state `e(-1)|0>` of an expression.
    pub fn expr_state(&self, e: &Expr) -> Result<ModuleState, FockError> {
        let q = self.prepare(e)?;
        Ok(self.expr_on_word(&q, -1, &CreationWord::default()))
    }

    fn prepare(&self, e: &Expr) -> Result<QExpr, FockError> {
        Ok(match e {
            Expr::Field(f) => {
                let q = self.specialize(f)?;
                let weight = q.0.iter().map(|(m, _)| self.monomial_weight(m)).max().unwrap_or(0);
                QExpr { weight, node: QNode::Field(q) }
            }
            Expr::Derive(x, d) => {
                let x = self.prepare(x)?;
                QExpr { weight: x.weight + *d as i64, node: QNode::Derive(Box::new(x), *d) }
            }
            Expr::Product(x, y, m) => {
                let (x, y) = (self.prepare(x)?, self.prepare(y)?);
                QExpr { weight: x.weight + y.weight - m - 1, node: QNode::Product(Box::new(x), Box::new(y), *m) }
            }
            Expr::Sum(terms) => {
                let mut out = Vec::new();
                for (c, x) in terms {
                    out.push((c.eval(&self.k0)?, self.prepare(x)?));
                }
                let weight = out.iter().map(|t| t.1.weight).max().unwrap_or(0);
                QExpr { weight, node: QNode::Sum(out) }
            }
        })
    }

    fn expr_on_state(&self, e: &QExpr, n: i64, v: &ModuleState) -> ModuleState {
        let mut out = ModuleState::zero();
        for (w, c) in &v.terms {
            out.add_scaled(&self.expr_on_word(e, n, w), c);
        }
        out
    }

    fn expr_on_word(&self, e: &QExpr, n: i64, w: &CreationWord) -> ModuleState {
        match &e.node {
            QNode::Field(f) => self.field_on_word(f, n, w),
            QNode::Derive(x, d) => {
                // (∂^d x)(n) = (-1)^d (n)_d x(n-d)
                let mut c = rat(falling(n, *d));
                if d % 2 == 1 {
                    c = -c;
                }
                let mut out = ModuleState::zero();
                if !c.is_zero() {
                    out.add_scaled(&self.expr_on_word(x, n - *d as i64, w), &c);
                }
                out
            }
            QNode::Sum(terms) => {
                let mut out = ModuleState::zero();
                for (c, x) in terms {
                    out.add_scaled(&self.expr_on_word(x, n, w), c);
                }
                out
            }
            QNode::Product(x, y, m) => {
                // (x∘_m y)(n) = Σ_j (-1)^j binom(m, j) [x(m-j) y(n+j) - (-1)^m y(m+n-j) x(j)]
                let ww = self.word_weight(w);
                let unit = {
                    let mut s = ModuleState::zero();
                    s.add(w.clone(), BigRational::one());
                    s
                };
                let mut out = ModuleState::zero();
                // y(n+j) w vanishes once its weight ww + wt(y) - n - j - 1 drops below zero.
                let first_top = ww + y.weight - n - 1;
                for j in 0..=first_top.max(-1) {
                    let b = rat(binomial(*m, j as u32));
                    if b.is_zero() {
                        continue;
                    }
                    let inner = self.expr_on_word(y, n + j, w);
                    if inner.is_zero() {
                        continue;
                    }
                    let c = if j % 2 == 0 { b } else { -b };
                    out.add_scaled(&self.expr_on_state(x, m - j, &inner), &c);
                }
                let second_top = ww + x.weight - 1;
                for j in 0..=second_top.max(-1) {
                    let b = rat(binomial(*m, j as u32));
                    if b.is_zero() {
                        continue;
                    }
                    let inner = self.expr_on_state(x, j, &unit);
                    if inner.is_zero() {
                        continue;
                    }
                    let sign = (j + m).rem_euclid(2) == 0;
                    let c = if sign { -b } else { b };
                    out.add_scaled(&self.expr_on_state(y, m + n - j, &inner), &c);
                }
                out
            }
        }
    }
}

/// A field expression evaluated by the oracle: products and derivatives are
/// computed on states, never through the kernel.
#[derive(Clone, Debug)]
pub enum Expr {
    Field(Field),
    Derive(Box<Expr>, u32),
    /// `x∘_m y` for any integer `m`; `m = -1` is the Wick product.
    Product(Box<Expr>, Box<Expr>, i64),
    Sum(Vec<(Scalar, Expr)>),
}

impl Expr {
    pub fn field(f: Field) -> Self {
        Expr::Field(f)
    }

    pub fn derive(self, d: u32) -> Self {
        if d == 0 {
            self
        } else {
            Expr::Derive(Box::new(self), d)
        }
    }

    pub fn nprod(self, other: Expr, m: i64) -> Self {
        Expr::Product(Box::new(self), Box::new(other), m)
    }

    pub fn wick(self, other: Expr) -> Self {
        self.nprod(other, -1)
    }

    pub fn sum(terms: Vec<(Scalar, Expr)>) -> Self {
        Expr::Sum(terms)
    }
}

struct QExpr {
    weight: i64,
    node: QNode,
}

enum QNode {
    Field(FieldQ),
    Derive(Box<QExpr>, u32),
    Product(Box<QExpr>, Box<QExpr>, i64),
    Sum(Vec<(BigRational, QExpr)>),
}

/// A field with coefficients already evaluated at `k0`.
struct FieldQ(Vec<(Monomial, BigRational)>);

/// Convenience wrapper: builds a module and compares two fields.
pub fn oracle_verify(
    spec: &AlgebraSpec,
    lhs: &Field,
    rhs: &Field,
    cutoff: u32,
    k0: Option<BigRational>,
) -> Result<OracleReport, FockError> {
    FockModule::new(spec, k0, cutoff)?.verify(lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::heisenberg;

    #[test]
    fn vacuum_annihilation_and_creation() {
        let spec = heisenberg(1);
        let fm = FockModule::new(&spec, None, 6).unwrap();
        let a = Field::generator(0);
        assert!(fm.mode_action(&a, 0, &ModuleState::vacuum()).unwrap().is_zero());
        let s = fm.mode_action(&a, -1, &ModuleState::vacuum()).unwrap();
        assert_eq!(s, fm.creation_state(&[(0, -1)]));
        assert_eq!(fm.word_weight(s.terms.keys().next().unwrap()), 1);
    }

    #[test]
    fn basis_sizes_count_partitions() {
        let fm = FockModule::new(&heisenberg(1), None, 6).unwrap();
        // 1 + 1 + 2 + 3 + 5 + 7 + 11 partitions of 0..=6
        assert_eq!(fm.basis(6).len(), 30);
    }
}
