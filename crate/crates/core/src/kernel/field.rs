use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coefficients::Scalar;

/// `∂^deriv` applied to basic generator number `gen`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub gen: u32,
    pub deriv: u32,
}

impl Factor {
    pub fn new(gen: usize, deriv: u32) -> Self {
        Factor { gen: gen as u32, deriv }
    }

    pub fn gen(&self) -> usize {
        self.gen as usize
    }

    pub fn bumped(&self, by: u32) -> Self {
        Factor { gen: self.gen, deriv: self.deriv + by }
    }
}

/// Ascending generator index; higher derivatives first within one generator.
impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gen.cmp(&other.gen).then(other.deriv.cmp(&self.deriv))
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A normally ordered word `:f1 (:f2 (... fk):):` with factors in PBW order.
///
/// The empty word is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Monomial(Vec<Factor>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    pub fn single(f: Factor) -> Self {
        Monomial(vec![f])
    }

    /// Sorts the factors. This is *not* normal ordering; it only produces the
    /// canonical word with the same multiset of factors.
    pub fn sorted(mut factors: Vec<Factor>) -> Self {
        factors.sort();
        Monomial(factors)
    }

    /// Wraps a word that is already in PBW order.
    pub fn from_sorted(factors: Vec<Factor>) -> Option<Self> {
        if factors.windows(2).all(|w| w[0] <= w[1]) {
            Some(Monomial(factors))
        } else {
            None
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Factor> {
        self.0.first().copied()
    }

    /// The word with its first factor removed.
    pub fn rest(&self) -> Monomial {
        Monomial(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    /// Prepends `f`, which must not exceed the current first factor.
    pub fn prepend(&self, f: Factor) -> Monomial {
        debug_assert!(self.first().is_none_or(|g| f <= g));
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(f);
        v.extend_from_slice(&self.0);
        Monomial(v)
    }

    pub fn derivative_count(&self) -> u32 {
        self.0.iter().map(|f| f.deriv).sum()
    }
}

/// Shorter words first, then lexicographic in factor order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite Q(k)-linear combination of normally ordered words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Field {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Field {
    pub fn zero() -> Self {
        Field::default()
    }

    pub fn vacuum() -> Self {
        Field::monomial(Monomial::vacuum())
    }

    pub fn scalar(c: Scalar) -> Self {
        Field::term(Monomial::vacuum(), c)
    }

    pub fn monomial(m: Monomial) -> Self {
        Field::term(m, Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut f = Field::zero();
        f.add_term(m, c);
        f
    }

    /// The basic generator `gen` itself.
    pub fn generator(gen: usize) -> Self {
        Field::monomial(Monomial::single(Factor::new(gen, 0)))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(terms: I) -> Self {
        let mut f = Field::zero();
        for (m, c) in terms {
            f.add_term(m, c);
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of the vacuum.
    pub fn constant(&self) -> Scalar {
        self.coefficient(&Monomial::vacuum())
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Field, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            for (m, d) in other.terms() {
                self.add_term(m.clone(), d.clone());
            }
        } else {
            for (m, d) in other.terms() {
                self.add_term(m.clone(), d * c);
            }
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Field {
        if c.is_zero() {
            return Field::zero();
        }
        Field { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn map_coefficients<E>(
        &self,
        mut f: impl FnMut(&Scalar) -> Result<Scalar, E>,
    ) -> Result<Field, E> {
        let mut out = Field::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Monomial::len).max().unwrap_or(0)
    }
}

impl std::ops::Add for Field {
    type Output = Field;
    fn add(mut self, rhs: Field) -> Field {
        self.add_scaled(&rhs, &Scalar::one());
        self
    }
}

impl std::ops::Add<&Field> for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl std::ops::Sub for Field {
    type Output = Field;
    fn sub(mut self, rhs: Field) -> Field {
        self.add_scaled(&rhs, &-Scalar::one());
        self
    }
}

impl std::ops::Sub<&Field> for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl std::ops::Neg for Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scaled(&-Scalar::one())
    }
}

impl std::ops::Mul<&Scalar> for &Field {
    type Output = Field;
    fn mul(self, rhs: &Scalar) -> Field {
        self.scaled(rhs)
    }
}
