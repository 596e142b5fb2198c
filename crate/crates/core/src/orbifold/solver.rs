//! Exact incremental elimination over Q(k).
//!
//! Columns are sparse vectors keyed by any ordered type (usually monomials).
//! They are inserted in a fixed order; a column that depends on earlier ones
//! never enters the basis, so solutions put zero weight on later dependent
//! columns and are reproducible.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::coefficients::Scalar;
use crate::kernel::{Field, Monomial};

pub type SparseVec<K> = BTreeMap<K, Scalar>;
/// Coefficients on original column indices.
pub type Combination = BTreeMap<usize, Scalar>;

pub fn field_vec(f: &Field) -> SparseVec<Monomial> {
    f.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

fn axpy<K: Ord + Clone>(y: &mut BTreeMap<K, Scalar>, a: &Scalar, x: &BTreeMap<K, Scalar>) {
    for (k, v) in x {
        let add = a * v;
        match y.get_mut(k) {
            Some(e) => {
                *e += &add;
                if e.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !add.is_zero() {
                    y.insert(k.clone(), add);
                }
            }
        }
    }
}

struct BasisVector<K> {
    pivot: K,
    /// Normalized so the pivot entry is 1; zero at every earlier pivot.
    vector: SparseVec<K>,
    /// This vector as a combination of the original columns.
    transform: Combination,
    /// Pivot entry before normalization.
    scale: Scalar,
}

/// Whether an inserted column was new or expressible by earlier ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    Independent,
    /// `Σ c_j column_j = 0`, with coefficient 1 on the inserted column.
    Dependent(Combination),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution<K> {
    pub coefficients: Combination,
    /// `target - Σ c_j column_j`; zero iff the target lies in the span.
    pub residual: SparseVec<K>,
}

pub struct LinearSpan<K> {
    basis: Vec<BasisVector<K>>,
    columns: usize,
}

impl<K: Ord + Clone> Default for LinearSpan<K> {
    fn default() -> Self {
        LinearSpan { basis: Vec::new(), columns: 0 }
    }
}

impl<K: Ord + Clone> LinearSpan<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    fn reduce(&self, v: &mut SparseVec<K>, t: &mut Combination) {
        for b in &self.basis {
            if let Some(c) = v.get(&b.pivot).cloned() {
                let neg = -c;
                axpy(v, &neg, &b.vector);
                axpy(t, &neg, &b.transform);
            }
        }
    }

    /// Adds the next column.
    pub fn push(&mut self, column: SparseVec<K>) -> Insertion {
        let index = self.columns;
        self.columns += 1;
        let mut v = column;
        let mut t = Combination::new();
        t.insert(index, Scalar::one());
        self.reduce(&mut v, &mut t);
        if v.is_empty() {
            return Insertion::Dependent(t);
        }
        // Simplest coefficient first, then the earliest key.
        let (pivot, pc) = v
            .iter()
            .min_by(|a, b| a.1.complexity().cmp(&b.1.complexity()).then_with(|| a.0.cmp(b.0)))
            .map(|(k, c)| (k.clone(), c.clone()))
            .unwrap();
        let inv = pc.inv().expect("pivot is nonzero");
        let vector: SparseVec<K> = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        let transform: Combination = t.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        // Keep older vectors zero at the new pivot so reduction order is free.
        for b in &mut self.basis {
            if let Some(c) = b.vector.get(&pivot).cloned() {
                let neg = -c;
                axpy(&mut b.vector, &neg, &vector);
                axpy(&mut b.transform, &neg, &transform);
            }
        }
        self.basis.push(BasisVector { pivot, vector, transform, scale: pc });
        Insertion::Independent
    }

    /// Pivot entries in insertion order, before normalization.
    pub fn pivots(&self) -> impl Iterator<Item = &Scalar> {
        self.basis.iter().map(|b| &b.scale)
    }

    pub fn solve(&self, target: &SparseVec<K>) -> Solution<K> {
        let mut v = target.clone();
        let mut t = Combination::new();
        self.reduce(&mut v, &mut t);
        let coefficients = t.into_iter().map(|(k, c)| (k, -c)).collect();
        Solution { coefficients, residual: v }
    }
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_int(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(PRIME)).to_u64().unwrap()
}

/// Image of a constant scalar in Z/p; `None` if it depends on `k` or the
/// denominator vanishes mod p.
fn scalar_mod(c: &Scalar) -> Option<u64> {
    let r = c.as_rational()?;
    let d = reduce_int(r.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(reduce_int(r.numer()), powmod(d, PRIME - 2)))
}

/// Incremental rank of constant-coefficient columns modulo a 61-bit prime.
///
/// A lower bound for the rank over Q; equality with the number of columns
/// (or with a known ambient dimension) certifies the rational rank.
pub struct ModularSpan<K> {
    index: HashMap<K, usize>,
    pivots: HashMap<usize, BTreeMap<usize, u64>>,
    order: Vec<usize>,
}

impl<K: Ord + Clone + Hash + Eq> Default for ModularSpan<K> {
    fn default() -> Self {
        ModularSpan { index: HashMap::new(), pivots: HashMap::new(), order: Vec::new() }
    }
}

impl<K: Ord + Clone + Hash + Eq> ModularSpan<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.order.len()
    }

    /// Adds a column; `None` if some coefficient has no image mod p.
    pub fn push(&mut self, col: &SparseVec<K>) -> Option<bool> {
        let mut v: BTreeMap<usize, u64> = BTreeMap::new();
        for (k, c) in col {
            let n = self.index.len();
            let i = *self.index.entry(k.clone()).or_insert(n);
            let m = scalar_mod(c)?;
            if m != 0 {
                v.insert(i, m);
            }
        }
        for p in &self.order {
            if let Some(&c) = v.get(p) {
                for (&j, &x) in &self.pivots[p] {
                    let e = v.entry(j).or_insert(0);
                    *e = (*e + PRIME - mulmod(c, x)) % PRIME;
                    if *e == 0 {
                        v.remove(&j);
                    }
                }
            }
        }
        let (&p, &c) = match v.iter().next() {
            Some(x) => x,
            None => return Some(false),
        };
        let inv = powmod(c, PRIME - 2);
        let row: BTreeMap<usize, u64> = v.iter().map(|(&j, &x)| (j, mulmod(x, inv))).collect();
        self.pivots.insert(p, row);
        self.order.push(p);
        Some(true)
    }
}

/// Rank of a list of constant-coefficient columns modulo a 61-bit prime.
pub fn modular_rank<K: Ord + Clone + Hash + Eq>(columns: &[SparseVec<K>]) -> Option<usize> {
    let mut span = ModularSpan::new();
    for col in columns {
        span.push(col)?;
    }
    Some(span.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, c)| (k, Scalar::from_int(c))).collect()
    }

    #[test]
    fn dependent_columns_are_reported() {
        let mut s = LinearSpan::new();
        assert_eq!(s.push(vec_of(&[(0, 1), (1, 2)])), Insertion::Independent);
        assert_eq!(s.push(vec_of(&[(1, 1)])), Insertion::Independent);
        match s.push(vec_of(&[(0, 2), (1, 1)])) {
            Insertion::Dependent(rel) => {
                // c2 = 2 c0 - 3 c1
                assert_eq!(rel[&0], Scalar::from_int(-2));
                assert_eq!(rel[&1], Scalar::from_int(3));
                assert_eq!(rel[&2], Scalar::one());
            }
            other => panic!("expected dependence, got {other:?}"),
        }
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn solve_with_symbolic_entries() {
        let k = Scalar::k();
        let mut s = LinearSpan::new();
        let mut c0 = SparseVec::new();
        c0.insert(0u32, k.clone());
        c0.insert(1, Scalar::one());
        s.push(c0);
        let mut c1 = SparseVec::new();
        c1.insert(1u32, Scalar::from_int(1));
        s.push(c1);
        let mut target = SparseVec::new();
        target.insert(0u32, Scalar::one());
        let sol = s.solve(&target);
        assert!(sol.residual.is_empty());
        let inv_k = k.inv().unwrap();
        assert_eq!(sol.coefficients[&0], inv_k);
        assert_eq!(sol.coefficients[&1], -inv_k);
    }

    #[test]
    fn modular_rank_matches() {
        let cols = vec![vec_of(&[(0, 1), (1, 2)]), vec_of(&[(1, 1)]), vec_of(&[(0, 2), (1, 1)])];
        assert_eq!(modular_rank(&cols), Some(2));
    }
}
