use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{AlgebraSpec, Factor, Field, KernelError, Monomial};
use crate::coefficients::{binomial, factorial, falling, Scalar};

type Cache<K> = RwLock<HashMap<K, Arc<Field>>>;

/// Conformal weight of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ConformalWeight {
    /// The zero field has no weight.
    Zero,
    Homogeneous(u32),
    Mixed,
}

/// Memoizing evaluator for `∂`, Wick products and circle products.
///
/// Every public operation takes and returns fields in PBW normal form. Results
/// on pairs of words are cached, so one engine should be reused for a family
/// of related computations. The engine is `Sync`; independent products can be
/// evaluated from several threads.
pub struct Engine {
    spec: Arc<AlgebraSpec>,
    deriv_cache: Cache<Monomial>,
    lmul_cache: Cache<(Factor, Monomial)>,
    wick_cache: Cache<(Monomial, Monomial)>,
    nprod_cache: Cache<(Monomial, Monomial, u32)>,
}

fn int(n: BigInt) -> Scalar {
    Scalar::from_bigint(n)
}

fn inv_factorial(n: u32) -> Scalar {
    Scalar::from_rational(&BigRational::new(BigInt::from(1), factorial(n)))
}

impl Engine {
    pub fn new(spec: Arc<AlgebraSpec>) -> Self {
        Engine {
            spec,
            deriv_cache: Default::default(),
            lmul_cache: Default::default(),
            wick_cache: Default::default(),
            nprod_cache: Default::default(),
        }
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> Arc<AlgebraSpec> {
        self.spec.clone()
    }

    fn cached<K: Hash + Eq>(cache: &Cache<K>, key: K, compute: impl FnOnce(&K) -> Field) -> Arc<Field> {
        if let Some(v) = cache.read().unwrap().get(&key) {
            return v.clone();
        }
        let value = Arc::new(compute(&key));
        cache.write().unwrap().entry(key).or_insert(value).clone()
    }

    // ---- public field-level operations ----

    pub fn derive(&self, a: &Field) -> Field {
        let mut out = Field::zero();
        for (m, c) in a.terms() {
            out.add_scaled(&self.derive_monomial(m), c);
        }
        out
    }

    pub fn derive_n(&self, a: &Field, n: u32) -> Field {
        let mut out = a.clone();
        for _ in 0..n {
            out = self.derive(&out);
        }
        out
    }

    /// Normal form of `:a b:`.
    pub fn wick(&self, a: &Field, b: &Field) -> Field {
        let mut out = Field::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                out.add_scaled(&self.wick_monomial(ma, mb), &(ca * cb));
            }
        }
        out
    }

    /// `:a1 (:a2 (... an):):`.
    pub fn iterated_wick(&self, list: &[Field]) -> Result<Field, KernelError> {
        let (last, init) = list.split_last().ok_or(KernelError::EmptyProduct)?;
        let mut acc = last.clone();
        for f in init.iter().rev() {
            acc = self.wick(f, &acc);
        }
        Ok(acc)
    }

    /// `a∘_n b` for any integer `n`.
    pub fn nproduct(&self, a: &Field, b: &Field, n: i64) -> Field {
        if n < 0 {
            let m = (-n - 1) as u32;
            return self.wick(&self.derive_n(a, m), b).scaled(&inv_factorial(m));
        }
        self.nprod_fields(a, b, n as u32)
    }

    /// All nonzero `(n, a∘_n b)` with `n >= 0`.
    pub fn ope(&self, a: &Field, b: &Field) -> Vec<(u32, Field)> {
        let bound = self.locality_bound(a, b);
        (0..bound)
            .map(|n| (n, self.nprod_fields(a, b, n)))
            .filter(|(_, f)| !f.is_zero())
            .collect()
    }

    /// An `N` with `a∘_n b = 0` for all `n >= N`.
    pub fn locality_bound(&self, a: &Field, b: &Field) -> u32 {
        let wa = a.monomials().map(|m| self.spec.monomial_weight(m)).max().unwrap_or(0);
        let wb = b.monomials().map(|m| self.spec.monomial_weight(m)).max().unwrap_or(0);
        wa + wb
    }

    pub fn conformal_weight(&self, a: &Field) -> ConformalWeight {
        let mut weights = a.monomials().map(|m| self.spec.monomial_weight(m));
        match weights.next() {
            None => ConformalWeight::Zero,
            Some(w) if weights.all(|v| v == w) => ConformalWeight::Homogeneous(w),
            Some(_) => ConformalWeight::Mixed,
        }
    }

    /// The right-nested product of `factors` in the given order, normalized.
    pub fn normalize_word(&self, factors: &[Factor]) -> Field {
        let mut acc = Field::vacuum();
        for &f in factors.iter().rev() {
            acc = self.lmul_field(f, &acc);
        }
        acc
    }

    /// Normal form of `:x b:` for a single factor `x`.
    pub fn lmul_field(&self, x: Factor, b: &Field) -> Field {
        let mut out = Field::zero();
        for (m, c) in b.terms() {
            out.add_scaled(&self.lmul(x, m), c);
        }
        out
    }

    /// `h∘_n g` obtained from the table entries `g∘_j h` by skew-symmetry.
    pub fn skew_from_table(&self, g: usize, h: usize, n: u32) -> Field {
        let mut out = Field::zero();
        let max = self.spec.weight_of(g) + self.spec.weight_of(h);
        for j in 0..max.saturating_sub(n) {
            let Some(entry) = self.spec.table().get(g, h, n + j) else { continue };
            let sign = if (n + j + 1).is_multiple_of(2) { 1 } else { -1 };
            let c = &Scalar::from_int(sign) * &inv_factorial(j);
            out.add_scaled(&self.derive_n(entry, j), &c);
        }
        out
    }

    // ---- word-level recursion ----

    fn derive_monomial(&self, m: &Monomial) -> Arc<Field> {
        Self::cached(&self.deriv_cache, m.clone(), |m| {
            let factors = m.factors();
            let mut out = Field::zero();
            for i in 0..factors.len() {
                let mut word = factors.to_vec();
                word[i] = word[i].bumped(1);
                if i == 0 || factors[i - 1] <= word[i] {
                    out.add_term(Monomial::from_sorted(word).unwrap(), Scalar::one());
                } else {
                    out.add_scaled(&self.normalize_word(&word), &Scalar::one());
                }
            }
            out
        })
    }

    /// `(∂^p g)∘_n (∂^q h)` from the generator table.
    fn factor_product(&self, x: Factor, y: Factor, n: u32) -> Field {
        let (p, q) = (x.deriv, y.deriv);
        if p > n {
            return Field::zero();
        }
        let r = n - p;
        let mut lead = falling(n as i64, p);
        if p % 2 == 1 {
            lead = -lead;
        }
        let mut out = Field::zero();
        for i in 0..=q.min(r) {
            let Some(entry) = self.spec.table().get(x.gen(), y.gen(), r - i) else { continue };
            if entry.is_zero() {
                continue;
            }
            let c = int(&lead * binomial(q as i64, i) * falling(r as i64, i));
            out.add_scaled(&self.derive_n(entry, q - i), &c);
        }
        out
    }

    fn lmul(&self, x: Factor, m: &Monomial) -> Arc<Field> {
        match m.first() {
            None => return Arc::new(Field::monomial(Monomial::single(x))),
            Some(y) if x <= y => return Arc::new(Field::monomial(m.prepend(x))),
            _ => {}
        }
        Self::cached(&self.lmul_cache, (x, m.clone()), |(x, m)| {
            let x = *x;
            let y = m.first().unwrap();
            let w = m.rest();
            // :x:yW:: = :y:xW:: + :(Σ_n (-1)^n/(n+1)! ∂^{n+1}(x∘_n y)) W:
            let inner = self.lmul(x, &w);
            let mut out = self.lmul_field(y, &inner);
            let bound = self.spec.factor_weight(x) + self.spec.factor_weight(y);
            let wf = Field::monomial(w);
            for n in 0..bound {
                let xy = self.factor_product(x, y, n);
                if xy.is_zero() {
                    continue;
                }
                let sign = if n % 2 == 0 { 1 } else { -1 };
                let c = &Scalar::from_int(sign) * &inv_factorial(n + 1);
                let corr = self.wick(&self.derive_n(&xy, n + 1), &wf);
                out.add_scaled(&corr, &c);
            }
            out
        })
    }

    fn wick_monomial(&self, a: &Monomial, b: &Monomial) -> Arc<Field> {
        match a.len() {
            0 => return Arc::new(Field::monomial(b.clone())),
            1 => return self.lmul(a.first().unwrap(), b),
            _ => {}
        }
        Self::cached(&self.wick_cache, (a.clone(), b.clone()), |(a, b)| {
            // :(:xV:) B: = :x:VB:: + Σ_j x_(-j-2) V_(j) B + Σ_j V_(-j-2) x_(j) B
            let x = a.first().unwrap();
            let v = a.rest();
            let vf = Field::monomial(v.clone());
            let bf = Field::monomial(b.clone());
            let mut out = self.lmul_field(x, &self.wick_monomial(&v, b));
            let wv = self.spec.monomial_weight(&v);
            let wx = self.spec.factor_weight(x);
            let wb = self.spec.monomial_weight(b);
            for j in 0..wv + wb {
                let vb = self.nprod_monomials(&v, b, j);
                if !vb.is_zero() {
                    out.add_scaled(&self.lmul_field(x.bumped(j + 1), &vb), &inv_factorial(j + 1));
                }
            }
            for j in 0..wx + wb {
                let xb = self.nprod_fields(&Field::monomial(Monomial::single(x)), &bf, j);
                if !xb.is_zero() {
                    let dv = self.derive_n(&vf, j + 1);
                    out.add_scaled(&self.wick(&dv, &xb), &inv_factorial(j + 1));
                }
            }
            out
        })
    }

    fn nprod_fields(&self, a: &Field, b: &Field, n: u32) -> Field {
        let mut out = Field::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                out.add_scaled(&self.nprod_monomials(ma, mb, n), &(ca * cb));
            }
        }
        out
    }

    fn nprod_monomials(&self, a: &Monomial, b: &Monomial, n: u32) -> Arc<Field> {
        if a.is_vacuum() || b.is_vacuum() {
            return Arc::new(Field::zero());
        }
        // The result would have negative weight.
        if n >= self.spec.monomial_weight(a) + self.spec.monomial_weight(b) {
            return Arc::new(Field::zero());
        }
        Self::cached(&self.nprod_cache, (a.clone(), b.clone(), n), |(a, b, n)| {
            let n = *n;
            if a.len() == 1 {
                self.nprod_factor(a.first().unwrap(), b, n)
            } else {
                self.nprod_composite(a, b, n)
            }
        })
    }

    /// `x∘_n :yW:` = `:y (x∘_n W):` + `:(x∘_n y) W:` + Σ_{j<n} binom(n,j) (x∘_j y)∘_{n-1-j} W.
    fn nprod_factor(&self, x: Factor, b: &Monomial, n: u32) -> Field {
        let y = b.first().unwrap();
        let w = b.rest();
        let wf = Field::monomial(w.clone());
        let mut out = self.lmul_field(y, &self.nprod_monomials(&Monomial::single(x), &w, n));
        out.add_scaled(&self.wick(&self.factor_product(x, y, n), &wf), &Scalar::one());
        for j in 0..n {
            let xy = self.factor_product(x, y, j);
            if xy.is_zero() {
                continue;
            }
            let c = int(binomial(n as i64, j));
            out.add_scaled(&self.nprod_fields(&xy, &wf, n - 1 - j), &c);
        }
        out
    }

    /// `(:xV:)∘_n B` = Σ_j x_(-1-j) V_(n+j) B + Σ_j V_(n-1-j) x_(j) B.
    fn nprod_composite(&self, a: &Monomial, b: &Monomial, n: u32) -> Field {
        let x = a.first().unwrap();
        let v = a.rest();
        let vf = Field::monomial(v.clone());
        let bf = Field::monomial(b.clone());
        let wv = self.spec.monomial_weight(&v);
        let wx = self.spec.factor_weight(x);
        let wb = self.spec.monomial_weight(b);
        let mut out = Field::zero();
        for j in 0..(wv + wb).saturating_sub(n) {
            let vb = self.nprod_monomials(&v, b, n + j);
            if !vb.is_zero() {
                out.add_scaled(&self.lmul_field(x.bumped(j), &vb), &inv_factorial(j));
            }
        }
        let xf = Field::monomial(Monomial::single(x));
        for j in 0..wx + wb {
            let xb = self.nprod_fields(&xf, &bf, j);
            if xb.is_zero() {
                continue;
            }
            if j < n {
                out.add_scaled(&self.nprod_fields(&vf, &xb, n - 1 - j), &Scalar::one());
            } else {
                let s = j - n;
                let dv = self.derive_n(&vf, s);
                out.add_scaled(&self.wick(&dv, &xb), &inv_factorial(s));
            }
        }
        out
    }
}
