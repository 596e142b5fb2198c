use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use vertex_core::algebras::{
    affine, cartan_eigenbasis, heisenberg, sl2_affine, sl2_data, sl2_eigenbasis, sl_data, Eigenbasis, RootData,
};
use vertex_core::coefficients::{parse_rational, Scalar};
use vertex_core::fock::{Expr, FockModule};
use vertex_core::genericity::*;
use vertex_core::kernel::{Engine, Field};
use vertex_core::orbifold::{
    circle_closed_form, closed_form_instances, heisenberg_orbifold_generators, homogeneous_weight, omega,
    quadratic_alphabet, Alphabet, ClosedForm, Word, WordEvaluator,
};

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn sl2_setup() -> (Eigenbasis, Engine, Alphabet) {
    let eigen = sl2_eigenbasis();
    let gens = orbifold_generators(&eigen, &RootData::sl2()).unwrap();
    let engine = Engine::new(Arc::new(eigen.spec.clone()));
    let alphabet = Alphabet::new(&engine, gens).unwrap();
    (eigen, engine, alphabet)
}

fn weight_counts(engine: &Engine, gens: &[(String, Field)]) -> BTreeMap<u32, u64> {
    let mut counts = BTreeMap::new();
    for (_, f) in gens {
        *counts.entry(homogeneous_weight(engine, f).unwrap()).or_insert(0) += 1;
    }
    counts
}

#[test]
fn sl2_generators() {
    let (eigen, engine, alphabet) = sl2_setup();
    assert_eq!(alphabet.labels(), ["F", "Q00", "U00", "U02", "V00", "V01", "V02"]);
    let gens = orbifold_generators(&eigen, &RootData::sl2()).unwrap();
    let weights: Vec<u32> = gens.iter().map(|(_, f)| homogeneous_weight(&engine, f).unwrap()).collect();
    assert_eq!(weights, [1, 2, 2, 4, 2, 3, 4]);
    let mut sorted = weights.clone();
    sorted.sort();
    assert_eq!(sorted, [1, 2, 2, 2, 3, 4, 4]);
    assert_eq!(weight_counts(&engine, &gens), type_formula(1, 1));
    assert!(generators_invariant(&engine, &gens).unwrap());
    // F∘1F = (x-y)∘1(x-y) = -2k.
    let f = Field::generator(1);
    assert_eq!(engine.nproduct(&f, &f, 1), Field::scalar(&Scalar::from_int(-2) * &Scalar::k()));
}

#[test]
fn bad_root_data_is_rejected() {
    let eigen = sl2_eigenbasis();
    let roots = RootData { roots: vec![], cartan: vec![2] };
    assert!(matches!(orbifold_generators(&eigen, &roots), Err(GenericityError::RootData(_))));
}

#[test]
fn sl3_builder_matches_type_formula() {
    let (d1, _) = sl_data(1);
    assert_eq!((d1.bracket, d1.form), (sl2_data().bracket, sl2_data().form));
    let (data, roots) = sl_data(2);
    data.validate().unwrap();
    let spec = affine("sl3", &data, Scalar::k()).unwrap();
    let eigen = cartan_eigenbasis(&spec, &roots, None).unwrap();
    let gens = orbifold_generators(&eigen, &roots).unwrap();
    let engine = Engine::new(Arc::new(eigen.spec.clone()));
    assert_eq!(weight_counts(&engine, &gens), BTreeMap::from([(1, 3), (2, 15), (3, 10), (4, 1)]));
    assert_eq!(weight_counts(&engine, &gens), type_formula(3, 2));
    assert!(generators_invariant(&engine, &gens).unwrap());
    let names: BTreeSet<&String> = gens.iter().map(|(n, _)| n).collect();
    assert_eq!(names.len(), gens.len());
}

#[test]
fn classification_rows_match_type_formula() {
    let table = classification_table(8);
    assert!(table.iter().any(|r| r.name == "E8" && r.dimension == 248));
    for row in &table {
        assert_eq!(row.dimension, 2 * row.positive_roots + row.rank, "{}", row.name);
        assert_eq!(builder_counts(row.positive_roots, row.rank), type_formula(row.positive_roots, row.rank), "{}", row.name);
    }
    // so5: m = 4, l = 2, d = 6.
    assert_eq!(type_formula(4, 2), BTreeMap::from([(1, 4), (2, 21), (3, 15), (4, 1)]));
    assert_eq!(type_formula(1, 1), BTreeMap::from([(1, 1), (2, 3), (3, 1), (4, 2)]));
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn sl2_structure_constants() {
    let (_, engine, alphabet) = sl2_setup();
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    let report = structure_constants(&eval).unwrap();
    let poles: BTreeSet<String> = report.pole_strings().into_iter().collect();
    assert_eq!(poles, set(&["-32/3", "-8/3", "0", "16/51", "16/9", "16"]));
    assert!(report.poles.residual.is_empty());
    assert_eq!(report.forced_poles(), set(&["-32/3", "16"]));
    assert!(report.rank_drops.contains(&RankDrop { weight: 4, k: "16".into(), generic_rank: 27, rank: 26 }));
    assert!(report.rank_drops.contains(&RankDrop { weight: 5, k: "-32/3".into(), generic_rank: 52, rank: 51 }));

    // Every entry expands back to the product it stands for.
    let fields = alphabet.fields();
    for (&(a, b, n), terms) in &report.entries {
        assert_eq!(eval.expand(terms), engine.nproduct(&fields[a], &fields[b], n as i64));
    }

    let record = report.record(&alphabet);
    let json = serde_json::to_value(&record).unwrap();
    assert_eq!(json["poles"][0], "-32/3");
    let ff = record.entries.iter().find(|e| e.a == "F" && e.b == "F" && e.n == 1).unwrap();
    assert_eq!(ff.terms, [("1".to_string(), "-2*k".to_string())]);

    // Constants computed over Q at k = 5 agree with the symbolic ones.
    let k0 = q("5");
    let eigen5 = {
        let e = sl2_eigenbasis();
        Eigenbasis { spec: e.spec.specialize(&k0).unwrap(), old_in_new: e.old_in_new, new_in_old: e.new_in_old }
    };
    let engine5 = Engine::new(Arc::new(eigen5.spec.clone()));
    let alphabet5 = Alphabet::new(&engine5, orbifold_generators(&eigen5, &RootData::sl2()).unwrap()).unwrap();
    let numeric = structure_constants(&WordEvaluator::new(&engine5, alphabet5)).unwrap();
    assert!(numeric.poles.roots.is_empty());
    assert_eq!(numeric.entries, report.specialize(&k0).unwrap());
}

#[test]
fn weight_four_words_degenerate_at_sixteen() {
    // The null relation among weight-4 words at k = 16, evaluated by the
    // Fock oracle from G, F, H alone.
    let eigen = sl2_eigenbasis();
    let g = |i: usize| Expr::field(Field::generator(i));
    let quad = |u: usize, a: u32, v: usize, b: u32| g(u).derive(a).wick(g(v).derive(b));
    let (f, q00, u00, v00, v01) = (g(1), quad(0, 0, 0, 0), quad(2, 0, 2, 0), quad(2, 0, 0, 0), quad(2, 0, 0, 1));
    let s = |p: i64| Scalar::from_int(p);
    let relation = Expr::sum(vec![
        (s(1), v00.clone().wick(v00.clone())),
        (s(-1), q00.clone().wick(u00)),
        (s(-6), q00.derive(2)),
        (s(10), f.clone().derive(2).wick(f.clone())),
        (s(8), f.clone().derive(1).wick(f.clone().derive(1))),
        (s(-6), f.clone().derive(1).wick(v00.clone())),
        (s(2), f.clone().wick(v00.derive(1))),
        (s(-12), f.wick(v01)),
    ]);
    let at16 = FockModule::new(&eigen.spec, Some(q("16")), 4).unwrap();
    assert!(at16.expr_state(&relation).unwrap().is_zero());
    let at5 = FockModule::new(&eigen.spec, Some(q("5")), 4).unwrap();
    assert!(!at5.expr_state(&relation).unwrap().is_zero());
}

#[test]
fn pole_at_sixteen_entry_through_oracle() {
    // V02∘0F carries 1/(k-16); check the expansion at k = 5 with every word
    // built by the oracle from G, F, H.
    let (eigen, engine, alphabet) = sl2_setup();
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    let report = structure_constants(&eval).unwrap();
    let terms = &report.entries[&(6, 0, 0)];
    assert!(terms.iter().any(|(_, c)| c.denom().degree() == Some(1)));
    let g = |i: usize| Expr::field(Field::generator(i));
    let quad = |u: usize, a: u32, v: usize, b: u32| g(u).derive(a).wick(g(v).derive(b));
    let letters = [g(1), quad(0, 0, 0, 0), quad(2, 0, 2, 0), quad(2, 0, 2, 2), quad(2, 0, 0, 0), quad(2, 0, 0, 1), quad(2, 0, 0, 2)];
    let word_expr = |w: &Word| {
        let fs = w.factors();
        let last = fs[fs.len() - 1];
        let mut e = letters[last.gen()].clone().derive(last.deriv);
        for x in fs[..fs.len() - 1].iter().rev() {
            e = letters[x.gen()].clone().derive(x.deriv).wick(e);
        }
        e
    };
    let rhs = Expr::sum(terms.iter().map(|(w, c)| (c.clone(), word_expr(w))).collect());
    let lhs = letters[6].clone().nprod(letters[0].clone(), 0);
    let fm = FockModule::new(&eigen.spec, Some(q("5")), 4).unwrap();
    let rep = fm.verify_exprs(&lhs, &rhs).unwrap();
    assert!(rep.agree, "{:?}", rep.witness);
}

#[test]
fn removable_poles_disappear_in_adapted_basis() {
    let (_, engine, alphabet) = sl2_setup();
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    for p in ["0", "16/51", "16/9", "-8/3"] {
        let report = structure_constants_avoiding(&eval, &[q(p)]).unwrap();
        assert!(!report.pole_strings().contains(&p.to_string()), "{p}");
        assert!(report.pole_strings().contains(&"16".to_string()));
    }
}

fn operands(engine: &Engine, kind: ClosedForm) -> (Field, Field) {
    use ClosedForm::*;
    let alpha = |i: usize, c: u32| engine.derive_n(&Field::generator(i), c);
    let w = |i, j, a, b| omega(engine, i, j, a, b).unwrap();
    match kind {
        IiAlpha { i, a, b, c } => (w(i, i, a, b), alpha(i, c)),
        IjAlphaI { i, j, a, b, c } => (w(i, j, a, b), alpha(i, c)),
        IjAlphaJ { i, j, a, b, c } => (w(i, j, a, b), alpha(j, c)),
        IjIj { i, j, a, b, c, d } => (w(i, j, a, b), w(i, j, c, d)),
        IjJk { i, j, k, a, b, c, d } => (w(i, j, a, b), w(j, k, c, d)),
        IiIj { i, j, a, b, c, d } => (w(i, i, a, b), w(i, j, c, d)),
        JjIj { i, j, a, b, c, d } => (w(j, j, a, b), w(i, j, c, d)),
        IiIi { i, a, b, c, d } => (w(i, i, a, b), w(i, i, c, d)),
    }
}

#[test]
fn heisenberg_constants_match_closed_forms() {
    let engine = Engine::new(Arc::new(heisenberg(3)));
    let alphabet = quadratic_alphabet(&engine, &heisenberg_orbifold_generators(3, false)).unwrap();
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    let report = structure_constants(&eval).unwrap();
    assert!(report.poles.roots.is_empty() && report.poles.residual.is_empty());
    let index = |f: &Field| alphabet.fields().iter().position(|g| g == f);
    let mut matched = 0;
    for (kind, m) in closed_form_instances(3, 2) {
        let (x, y) = operands(&engine, kind);
        let (Some(a), Some(b)) = (index(&x), index(&y)) else { continue };
        let closed = circle_closed_form(&engine, kind, m).unwrap();
        let entry = report.entries.get(&(a, b, m)).map(|t| eval.expand(t)).unwrap_or_else(Field::zero);
        assert_eq!(entry, closed, "{kind:?} m={m}");
        matched += 1;
    }
    assert!(matched > 50, "{matched}");
}

#[test]
fn large_level_limit_of_sl2() {
    for spec in [sl2_affine(), sl2_eigenbasis().spec] {
        let report = large_level_limit(&spec).unwrap();
        assert!(report.matches_gram);
        for e in &report.entries {
            match (e.n, e.term.as_str()) {
                (1, "1") => assert_eq!(e.half_exponent, -2),
                (0, _) => {
                    assert_eq!(e.half_exponent, -1);
                    assert_eq!(e.limit, "0");
                }
                _ => panic!("unexpected entry {e:?}"),
            }
        }
        let form = spec.bilinear_form.clone().unwrap();
        let limit = Engine::new(Arc::new(report.limit.clone()));
        let n = spec.generator_count();
        for a in 0..n {
            for b in 0..n {
                let g = |i| Field::generator(i);
                assert_eq!(limit.nproduct(&g(a), &g(b), 1), Field::scalar(Scalar::from_rational(&form[a][b])));
                assert!(limit.nproduct(&g(a), &g(b), 0).is_zero());
            }
        }
    }
    let xy = large_level_limit(&sl2_affine()).unwrap();
    let e = xy.entries.iter().find(|e| e.a == "x" && e.b == "y" && e.n == 1).unwrap();
    assert_eq!((e.coefficient.as_str(), e.limit.as_str()), ("k", "1"));
}

#[test]
fn large_level_limit_rejects_numeric_level() {
    let spec = sl2_affine().specialize(&q("5")).unwrap();
    assert_eq!(large_level_limit(&spec).unwrap_err(), GenericityError::NotSymbolic);
}
