use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Engine, Factor, Field, KernelError, Monomial};
use crate::coefficients::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSymbol {
    pub name: String,
    pub weight: u32,
    /// Sign under each registered involution; missing entries mean +1.
    pub parity: BTreeMap<String, i8>,
}

/// Nonnegative products among basic generators.
///
/// `entries[(g, h)][n]` is `g∘_n h`; trailing zero products are trimmed, so the
/// vector length is the pole order of the pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpeTable {
    entries: BTreeMap<(usize, usize), Vec<Field>>,
}

impl OpeTable {
    pub fn get(&self, g: usize, h: usize, n: u32) -> Option<&Field> {
        self.entries.get(&(g, h)).and_then(|v| v.get(n as usize))
    }

    pub fn pole_order(&self, g: usize, h: usize) -> usize {
        self.entries.get(&(g, h)).map_or(0, Vec::len)
    }

    /// Nonzero entries as `(g, h, n, field)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u32, &Field)> {
        self.entries.iter().flat_map(|(&(g, h), v)| {
            v.iter()
                .enumerate()
                .filter(|(_, f)| !f.is_zero())
                .map(move |(n, f)| (g, h, n as u32, f))
        })
    }

    fn set(&mut self, g: usize, h: usize, n: u32, f: Field) {
        let v = self.entries.entry((g, h)).or_default();
        if v.len() <= n as usize {
            v.resize(n as usize + 1, Field::zero());
        }
        v[n as usize] = f;
        while v.last().is_some_and(Field::is_zero) {
            v.pop();
        }
        if v.is_empty() {
            self.entries.remove(&(g, h));
        }
    }
}

/// A freely generated vertex algebra: generators, their products, and
/// optional metadata used by the affine constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    name: String,
    symbolic_level: bool,
    generators: Vec<GeneratorSymbol>,
    involutions: Vec<String>,
    table: OpeTable,
    pub conformal_vector: Option<Field>,
    pub dual_coxeter: Option<BigRational>,
    pub bilinear_form: Option<Vec<Vec<BigRational>>>,
    /// Level of an affine algebra (possibly the formal `k`).
    pub level: Option<Scalar>,
}

impl AlgebraSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when table coefficients may depend on the formal level `k`.
    pub fn symbolic_level(&self) -> bool {
        self.symbolic_level
    }

    pub fn generators(&self) -> &[GeneratorSymbol] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn involutions(&self) -> &[String] {
        &self.involutions
    }

    pub fn table(&self) -> &OpeTable {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn weight_of(&self, gen: usize) -> u32 {
        self.generators[gen].weight
    }

    pub fn factor_weight(&self, f: Factor) -> u32 {
        self.weight_of(f.gen()) + f.deriv
    }

    pub fn monomial_weight(&self, m: &Monomial) -> u32 {
        m.factors().iter().map(|&f| self.factor_weight(f)).sum()
    }

    pub fn parity(&self, gen: usize, involution: &str) -> i8 {
        self.generators[gen].parity.get(involution).copied().unwrap_or(1)
    }

    pub fn monomial_parity(&self, m: &Monomial, involution: &str) -> i8 {
        m.factors().iter().map(|f| self.parity(f.gen(), involution)).product()
    }

    pub fn generator(&self, name: &str) -> Result<Field, KernelError> {
        self.index_of(name)
            .map(Field::generator)
            .ok_or_else(|| KernelError::UnknownGenerator(name.to_string()))
    }

    /// Replaces every coefficient by its value at `k = at`.
    pub fn specialize(&self, at: &BigRational) -> Result<AlgebraSpec, KernelError> {
        let mut out = self.clone();
        let eval = |f: &Field| f.map_coefficients(|c| c.specialize(at));
        for v in out.table.entries.values_mut() {
            for f in v.iter_mut() {
                *f = eval(f)?;
            }
        }
        if let Some(l) = &self.conformal_vector {
            out.conformal_vector = Some(eval(l)?);
        }
        if let Some(l) = &self.level {
            out.level = Some(l.specialize(at)?);
        }
        out.symbolic_level = false;
        Ok(out)
    }

    pub fn to_builder(&self) -> SpecBuilder {
        let mut b = SpecBuilder::new(&self.name);
        b.symbolic_level = self.symbolic_level;
        b.generators = self.generators.clone();
        b.involutions = self.involutions.clone();
        for (g, h, n, f) in self.table.iter() {
            b.entries.insert((g, h, n), f.clone());
        }
        b.conformal_vector = self.conformal_vector.clone();
        b.dual_coxeter = self.dual_coxeter.clone();
        b.bilinear_form = self.bilinear_form.clone();
        b.level = self.level.clone();
        b
    }
}

/// Assembles and validates an [`AlgebraSpec`].
#[derive(Clone, Debug, Default)]
pub struct SpecBuilder {
    name: String,
    symbolic_level: bool,
    generators: Vec<GeneratorSymbol>,
    involutions: Vec<String>,
    entries: BTreeMap<(usize, usize, u32), Field>,
    conformal_vector: Option<Field>,
    dual_coxeter: Option<BigRational>,
    bilinear_form: Option<Vec<Vec<BigRational>>>,
    level: Option<Scalar>,
}

impl SpecBuilder {
    pub fn new(name: &str) -> Self {
        SpecBuilder { name: name.to_string(), ..Default::default() }
    }

    pub fn symbolic(mut self, yes: bool) -> Self {
        self.symbolic_level = yes;
        self
    }

    pub fn involution(&mut self, name: &str) {
        if !self.involutions.iter().any(|i| i == name) {
            self.involutions.push(name.to_string());
        }
    }

    pub fn generator(&mut self, name: &str, weight: u32) -> Result<usize, KernelError> {
        if self.generators.iter().any(|g| g.name == name) {
            return Err(KernelError::DuplicateGenerator(name.to_string()));
        }
        if weight == 0 {
            return Err(KernelError::ZeroWeight(name.to_string()));
        }
        self.generators.push(GeneratorSymbol {
            name: name.to_string(),
            weight,
            parity: BTreeMap::new(),
        });
        Ok(self.generators.len() - 1)
    }

    pub fn parity(&mut self, gen: usize, involution: &str, sign: i8) -> Result<(), KernelError> {
        if !self.involutions.iter().any(|i| i == involution) {
            return Err(KernelError::UnknownInvolution(involution.to_string()));
        }
        if sign != 1 && sign != -1 {
            return Err(KernelError::BadParity(sign));
        }
        let g = self.generators.get_mut(gen).ok_or(KernelError::IndexOutOfRange(gen))?;
        g.parity.insert(involution.to_string(), sign);
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn generators(&self) -> &[GeneratorSymbol] {
        &self.generators
    }

    /// Records `g∘_n h = value`. Entries for the reversed pair are filled in
    /// by skew-symmetry when not given explicitly.
    pub fn entry(&mut self, g: usize, h: usize, n: u32, value: Field) -> Result<(), KernelError> {
        let count = self.generators.len();
        if g >= count {
            return Err(KernelError::IndexOutOfRange(g));
        }
        if h >= count {
            return Err(KernelError::IndexOutOfRange(h));
        }
        if self.entries.contains_key(&(g, h, n)) {
            return Err(KernelError::DuplicateEntry {
                a: self.generators[g].name.clone(),
                b: self.generators[h].name.clone(),
                n,
            });
        }
        self.entries.insert((g, h, n), value);
        Ok(())
    }

    pub fn conformal_vector(&mut self, l: Field) {
        self.conformal_vector = Some(l);
    }

    pub fn affine_data(
        &mut self,
        dual_coxeter: Option<BigRational>,
        form: Vec<Vec<BigRational>>,
        level: Scalar,
    ) {
        self.dual_coxeter = dual_coxeter;
        self.bilinear_form = Some(form);
        self.level = Some(level);
    }

    pub fn build(self) -> Result<AlgebraSpec, KernelError> {
        let mut spec = AlgebraSpec {
            name: self.name,
            symbolic_level: self.symbolic_level,
            generators: self.generators,
            involutions: self.involutions,
            table: OpeTable::default(),
            conformal_vector: self.conformal_vector,
            dual_coxeter: self.dual_coxeter,
            bilinear_form: self.bilinear_form,
            level: self.level,
        };
        let names = |s: &AlgebraSpec, g: usize, h: usize| {
            (s.generators[g].name.clone(), s.generators[h].name.clone())
        };
        for ((g, h, n), f) in &self.entries {
            let expected = spec.weight_of(*g) as i64 + spec.weight_of(*h) as i64 - *n as i64 - 1;
            if let Some(w) = field_weight_mismatch(&spec, f, expected) {
                let (a, b) = names(&spec, *g, *h);
                return Err(KernelError::WeightMismatch { a, b, n: *n, expected, found: w });
            }
            spec.table.set(*g, *h, *n, f.clone());
        }

        // Fill reversed pairs that were not given.
        let given: Vec<(usize, usize)> = self.entries.keys().map(|&(g, h, _)| (g, h)).collect();
        let provisional = Engine::new(Arc::new(spec.clone()));
        let mut completed = Vec::new();
        for &(g, h) in &given {
            if g == h || given.contains(&(h, g)) {
                continue;
            }
            let max = spec.weight_of(g) + spec.weight_of(h);
            for n in 0..max {
                let f = provisional.skew_from_table(g, h, n);
                if !f.is_zero() {
                    completed.push((h, g, n, f));
                }
            }
        }
        for (h, g, n, f) in completed {
            spec.table.set(h, g, n, f);
        }

        let engine = Engine::new(Arc::new(spec.clone()));
        for g in 0..spec.generators.len() {
            for h in g..spec.generators.len() {
                let max = spec.weight_of(g) + spec.weight_of(h);
                for n in 0..max {
                    let have = spec.table.get(h, g, n).cloned().unwrap_or_default();
                    if engine.skew_from_table(g, h, n) != have {
                        let (a, b) = names(&spec, h, g);
                        return Err(KernelError::SkewSymmetry { a, b, n });
                    }
                }
            }
        }

        for inv in &spec.involutions {
            for (g, h, n, f) in spec.table.iter() {
                let sign = spec.parity(g, inv) * spec.parity(h, inv);
                if f.monomials().any(|m| spec.monomial_parity(m, inv) != sign) {
                    let (a, b) = names(&spec, g, h);
                    return Err(KernelError::InvolutionViolation { involution: inv.clone(), a, b, n });
                }
            }
        }
        Ok(spec)
    }
}

fn field_weight_mismatch(spec: &AlgebraSpec, f: &Field, expected: i64) -> Option<i64> {
    f.monomials()
        .map(|m| spec.monomial_weight(m) as i64)
        .find(|&w| w != expected)
}
