//! Named verification suites. Each suite recomputes its identities with the
//! kernel, compares against the stated values, and re-checks the identities
//! mode by mode in the Fock-space oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;
use serde_json::json;
use vertex_core::algebras::{
    affine, cartan_eigenbasis, heisenberg, heisenberg_virasoro, sl2_affine, sl2_eigenbasis, sl_data, Eigenbasis, RootData, CARTAN,
};
use vertex_core::coefficients::{parse_rational, render_rational, Scalar};
use vertex_core::fock::{Expr, FockModule};
use vertex_core::genericity::{
    builder_counts, classification_table, large_level_limit, orbifold_generators, reduced_structure_constants,
    structure_constants, type_formula, PoleReport,
};
use vertex_core::kernel::{AlgebraSpec, Engine, Field};
use vertex_core::orbifold::{
    circle_closed_form, closed_form_discrepancies, closed_form_instances, decouple, decoupling_ladder,
    heisenberg_orbifold_generators, homogeneous_weight, is_primary, minimality_witnesses, omega, primary_correct,
    quadratic_alphabet, render_expression, rewrite_quadratic, strong_span_check, words_of_weight, Alphabet, ClosedForm,
    DerivativeRewrite, QuadraticGenerator, Word, WordEvaluator,
};
use vertex_core::orbifold::solver::{field_vec, Insertion, LinearSpan};

use crate::CliError;

pub const SUITES: [&str; 7] =
    ["heisenberg-n1-dn", "heisenberg-n2", "heisenberg-n3", "primary-fields", "closed-forms", "sl2-poles", "large-level"];

/// Older names still accepted by `verify --suite`.
const ALIASES: [(&str, &str); 1] = [("primary-eq10", "primary-fields")];

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.to_string(), checks: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        let good = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{good}/{} checks passed\n", self.checks.len()));
        out
    }

    pub fn json(&self) -> serde_json::Value {
        let checks: Vec<_> =
            self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect();
        json!({"suite": self.suite, "passed": self.passed(), "checks": checks, "notes": self.notes})
    }
}

/// Runs suite `name`; `cutoff` bounds the oracle, `k0` is its level for algebras over `k`.
pub fn run(name: &str, cutoff: u32, k0: &BigRational) -> Result<SuiteReport, CliError> {
    let name = ALIASES.iter().find(|(old, _)| *old == name).map_or(name, |(_, new)| *new);
    let report = match name {
        "heisenberg-n1-dn" => heisenberg_n1(cutoff),
        "heisenberg-n2" => heisenberg_n2(cutoff),
        "heisenberg-n3" => heisenberg_n3(cutoff),
        "primary-fields" => primary_fields(cutoff),
        "closed-forms" => closed_forms(cutoff),
        "sl2-poles" => sl2_poles(cutoff, k0),
        "large-level" => large_level(),
        _ => {
            return Err(CliError::Usage(format!("unknown suite `{name}`; available: {}", SUITES.join(", "))));
        }
    };
    Ok(report)
}

fn s(p: i64, q: i64) -> Scalar {
    Scalar::ratio(p, q)
}

fn h(n: usize) -> Engine {
    Engine::new(Arc::new(heisenberg(n)))
}

fn w(e: &Engine, i: usize, j: usize, a: u32, b: u32) -> Field {
    omega(e, i, j, a, b).expect("indices are in range")
}

/// `:∂^a g_i ∂^b g_j:` built by the oracle from the generators.
fn om(i: usize, j: usize, a: u32, b: u32) -> Expr {
    gen(i).derive(a).wick(gen(j).derive(b))
}

fn gen(i: usize) -> Expr {
    Expr::field(Field::generator(i))
}

/// A word of alphabet letters as an oracle expression.
fn word_expr(letters: &[Expr], word: &Word) -> Expr {
    let fs = word.factors();
    if fs.is_empty() {
        return Expr::field(Field::vacuum());
    }
    let last = fs[fs.len() - 1];
    let mut e = letters[last.gen()].clone().derive(last.deriv);
    for f in fs[..fs.len() - 1].iter().rev() {
        e = letters[f.gen()].clone().derive(f.deriv).wick(e);
    }
    e
}

fn expression_expr(letters: &[Expr], expression: &[(Word, Scalar)]) -> Expr {
    Expr::sum(expression.iter().map(|(word, c)| (c.clone(), word_expr(letters, word))).collect())
}

/// `Σ c·label` with signs folded into the joins.
fn linear_text(terms: &[(Scalar, String)]) -> String {
    let mut out = String::new();
    for (i, (c, label)) in terms.iter().enumerate() {
        let negative = c.as_rational().is_some_and(|r| r.is_negative());
        let mag = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if mag.is_one() {
            out.push_str(label);
        } else {
            out.push_str(&format!("{mag}*{label}"));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// `∂^p ω_{0,q}` terms of a rewrite, fewest derivatives first.
fn rewrite_text(rw: &DerivativeRewrite, name: impl Fn(u32) -> String) -> String {
    let mut terms: Vec<_> = rw.terms.iter().filter(|(_, _, c)| !c.is_zero()).collect();
    terms.sort_by_key(|(p, _, _)| *p);
    let labeled: Vec<(Scalar, String)> = terms
        .into_iter()
        .map(|(p, q, c)| (c.clone(), if *p == 0 { name(*q) } else { format!("d^{p} {}", name(*q)) }))
        .collect();
    linear_text(&labeled)
}

fn scalars_text(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn oracle(report: &mut SuiteReport, name: &str, fm: &FockModule, lhs: &Expr, rhs: &Expr) {
    match fm.verify_exprs(lhs, rhs) {
        Ok(rep) if rep.agree => report.check(
            format!("oracle: {name}"),
            true,
            format!("{} mode checks up to weight {}", rep.checked, fm.cutoff()),
        ),
        Ok(rep) => report.check(format!("oracle: {name}"), false, format!("differs: {:?}", rep.witness)),
        Err(e) => report.check(format!("oracle: {name}"), false, format!("oracle error: {e}")),
    }
}

fn span_checks(report: &mut SuiteReport, n: usize, second_square: bool, cutoff: u32, minimality_cutoff: u32) -> Vec<String> {
    let e = h(n);
    let alphabet = quadratic_alphabet(&e, &heisenberg_orbifold_generators(n, second_square)).expect("valid generators");
    let label = alphabet.labels().join(", ");
    let eval = WordEvaluator::new(&e, alphabet.clone());
    let span = strong_span_check(&eval, cutoff, CARTAN).expect("cartan is registered");
    let dims: Vec<String> = span.rows.iter().map(|r| format!("{}:{}/{}", r.weight, r.rank, r.ambient)).collect();
    report.check(
        format!("H({n}) span of {{{label}}} through weight {cutoff}"),
        span.full(),
        match span.first_deficiency() {
            None => format!("full at every weight (rank/ambient {})", dims.join(" ")),
            Some(r) => format!("deficient at weight {}: {:?}", r.weight, r.witness),
        },
    );
    let mut redundant = Vec::new();
    for (label, row) in minimality_witnesses(&e, &alphabet, minimality_cutoff, CARTAN).expect("cartan is registered") {
        match row {
            Some(r) => report.check(
                format!("H({n}) minimality: drop {label}"),
                true,
                format!("deficient at weight {} (missing {})", r.weight, r.witness.unwrap_or_default()),
            ),
            None => {
                report.check(
                    format!("H({n}) minimality: drop {label}"),
                    false,
                    format!("the others still span through weight {minimality_cutoff}"),
                );
                redundant.push(label);
            }
        }
    }
    redundant
}

fn heisenberg_n1(cutoff: u32) -> SuiteReport {
    let mut r = SuiteReport::new("heisenberg-n1-dn");
    let e = h(1);
    let ww = |a, b| w(&e, 0, 0, a, b);
    let name = |q: u32| format!("w0{q}");

    let w01 = e.derive(&ww(0, 0)).scaled(&s(1, 2));
    r.check("w01 = 1/2*d w00", ww(0, 1) == w01, "exact");
    let mut w11 = ww(0, 2).scaled(&s(-1, 1));
    w11.add_scaled(&e.derive_n(&ww(0, 0), 2), &s(1, 2));
    r.check("w11 = -w02 + 1/2*d^2 w00", ww(1, 1) == w11, "exact");

    let lhs = &e.wick(&ww(0, 0), &ww(1, 1)) - &e.wick(&ww(0, 1), &ww(0, 1));
    match rewrite_quadratic(&e, 0, 0, 4, &lhs) {
        Ok(rw) => {
            let got = [rw.coefficient(0, 4), rw.coefficient(2, 2), rw.coefficient(4, 0)];
            let want = [s(-5, 4), s(7, 4), s(-7, 24)];
            r.check(
                "relation :w00 w11: - :w01 w01:",
                got == want,
                format!(":w00 w11: - :w01 w01: = {}", rewrite_text(&rw, name)),
            );
        }
        Err(err) => r.check("relation :w00 w11: - :w01 w01:", false, err.to_string()),
    }

    let alphabet = quadratic_alphabet(&e, &heisenberg_orbifold_generators(1, false)).expect("valid generators");
    let eval = WordEvaluator::new(&e, alphabet);
    let seed = decouple(&eval, &ww(0, 4)).expect("homogeneous");
    r.check("w04 decouples", seed.success(), format!("w04 = {}", seed.render(&eval)));

    let mut leading = Vec::new();
    let mut remainder_ok = true;
    for k in 1..=4u32 {
        let image = e.nproduct(&ww(0, 2), &ww(0, 2 * k), 1);
        match rewrite_quadratic(&e, 0, 0, 2 * k + 2, &image) {
            Ok(rw) => {
                leading.push(rw.coefficient(0, 2 * k + 2));
                remainder_ok &= rw.terms.iter().all(|(p, _, c)| *p >= 2 || c.is_zero() || *p == 0);
            }
            Err(_) => remainder_ok = false,
        }
    }
    let want: Vec<Scalar> = (1..=4).map(|k| Scalar::from_int(8 + 4 * k)).collect();
    r.check(
        "w02∘1 w0,2k leading coefficient 8+4k, k = 1..4",
        leading == want && remainder_ok,
        format!("leading {}; remainder in d^2-span: {}", scalars_text(&leading), remainder_ok),
    );

    match decoupling_ladder(&eval, &seed, (0, 0, 4), &ww(0, 2), 2) {
        Ok(steps) => {
            let tops: Vec<String> = steps.iter().map(|st| format!("w0{} (leading {})", st.to, st.leading)).collect();
            r.check("ladder from w04", steps.iter().all(|st| st.result.success()), tops.join(", "));
        }
        Err(err) => r.check("ladder from w04", false, err.to_string()),
    }

    span_checks(&mut r, 1, false, 10, 8);

    let spec = heisenberg(1);
    let fm = FockModule::new(&spec, None, cutoff).expect("linear table");
    oracle(&mut r, "w01 = 1/2*d w00", &fm, &om(0, 0, 0, 1), &Expr::sum(vec![(s(1, 2), om(0, 0, 0, 0).derive(1))]));
    oracle(
        &mut r,
        "w11 = -w02 + 1/2*d^2 w00",
        &fm,
        &om(0, 0, 1, 1),
        &Expr::sum(vec![(s(-1, 1), om(0, 0, 0, 2)), (s(1, 2), om(0, 0, 0, 0).derive(2))]),
    );
    let lhs = Expr::sum(vec![
        (s(1, 1), om(0, 0, 0, 0).wick(om(0, 0, 1, 1))),
        (s(-1, 1), om(0, 0, 0, 1).wick(om(0, 0, 0, 1))),
    ]);
    let rhs = Expr::sum(vec![
        (s(-5, 4), om(0, 0, 0, 4)),
        (s(7, 4), om(0, 0, 0, 2).derive(2)),
        (s(-7, 24), om(0, 0, 0, 0).derive(4)),
    ]);
    oracle(&mut r, "relation :w00 w11: - :w01 w01:", &fm, &lhs, &rhs);
    let letters = [om(0, 0, 0, 0), om(0, 0, 0, 2)];
    oracle(&mut r, "w04 decoupling", &fm, &om(0, 0, 0, 4), &expression_expr(&letters, &seed.expression));
    r
}

fn heisenberg_n2(cutoff: u32) -> SuiteReport {
    let mut r = SuiteReport::new("heisenberg-n2");
    let e = h(2);
    let lhs = &e.wick(&w(&e, 0, 1, 0, 0), &w(&e, 1, 1, 0, 1)) - &e.wick(&w(&e, 0, 1, 0, 1), &w(&e, 1, 1, 0, 0));
    match rewrite_quadratic(&e, 0, 1, 3, &lhs) {
        Ok(rw) => {
            let got: Vec<Scalar> = (0..=3).map(|p| rw.coefficient(p, 3 - p)).collect();
            r.check(
                "relation :w12_00 w22_01: - :w12_01 w22_00:",
                got == [s(-1, 2), s(2, 1), s(-5, 2), s(1, 1)],
                format!(
                    ":w12_00 w22_01: - :w12_01 w22_00: = {}; coefficients {}",
                    rewrite_text(&rw, |q| format!("w12_0{q}")),
                    scalars_text(&got)
                ),
            );
        }
        Err(err) => r.check("relation :w12_00 w22_01: - :w12_01 w22_00:", false, err.to_string()),
    }
    let raising = w(&e, 1, 1, 0, 1);
    let rule: Vec<bool> = (0..=4)
        .map(|k| e.nproduct(&raising, &w(&e, 0, 1, 0, k), 1) == w(&e, 0, 1, 0, k + 1).scaled(&s(-1, 1)))
        .collect();
    r.check("w22_01∘1 w12_0k = -w12_0,k+1 for k = 0..4", rule.iter().all(|b| *b), format!("{rule:?}"));

    let alphabet = quadratic_alphabet(&e, &heisenberg_orbifold_generators(2, true)).expect("valid generators");
    let eval = WordEvaluator::new(&e, alphabet.clone());
    let seed = decouple(&eval, &w(&e, 0, 1, 0, 3)).expect("homogeneous");
    r.check("w12_03 decouples", seed.success(), format!("w12_03 = {}", seed.render(&eval)));
    match decoupling_ladder(&eval, &seed, (0, 1, 3), &raising, 2) {
        Ok(steps) => {
            let tops: Vec<String> = steps.iter().map(|st| format!("w12_0{} (leading {})", st.to, st.leading)).collect();
            r.check("ladder from w12_03", steps.iter().all(|st| st.result.success()), tops.join(", "));
        }
        Err(err) => r.check("ladder from w12_03", false, err.to_string()),
    }

    for second_square in [true, false] {
        span_checks(&mut r, 2, second_square, 8, 8);
    }
    r.note("both choices of the weight-4 square, w22_02 or w11_02, are checked");

    let fm = FockModule::new(&heisenberg(2), None, cutoff).expect("linear table");
    let lhs = Expr::sum(vec![
        (s(1, 1), om(0, 1, 0, 0).wick(om(1, 1, 0, 1))),
        (s(-1, 1), om(0, 1, 0, 1).wick(om(1, 1, 0, 0))),
    ]);
    let rhs = Expr::sum(vec![
        (s(-1, 2), om(0, 1, 0, 3)),
        (s(2, 1), om(0, 1, 0, 2).derive(1)),
        (s(-5, 2), om(0, 1, 0, 1).derive(2)),
        (s(1, 1), om(0, 1, 0, 0).derive(3)),
    ]);
    oracle(&mut r, "relation :w12_00 w22_01: - :w12_01 w22_00:", &fm, &lhs, &rhs);
    for k in 0..=4 {
        oracle(
            &mut r,
            &format!("w22_01∘1 w12_0{k}"),
            &fm,
            &om(1, 1, 0, 1).nprod(om(0, 1, 0, k), 1),
            &Expr::sum(vec![(s(-1, 1), om(0, 1, 0, k + 1))]),
        );
    }
    let letters: Vec<Expr> =
        heisenberg_orbifold_generators(2, true).iter().map(|q| om(q.i, q.j, q.a, q.b)).collect();
    oracle(&mut r, "w12_03 decoupling", &fm, &om(0, 1, 0, 3), &expression_expr(&letters, &seed.expression));
    r
}

fn heisenberg_n3(cutoff: u32) -> SuiteReport {
    let mut r = SuiteReport::new("heisenberg-n3");
    let e = h(3);
    let fm = FockModule::new(&heisenberg(3), None, cutoff).expect("linear table");
    let idx = |i: usize| i + 1;
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2)] {
        let lhs = &e.wick(&w(&e, i, j, 0, 0), &w(&e, j, k, 0, 0)) - &e.wick(&w(&e, i, k, 0, 0), &w(&e, j, j, 0, 0));
        let name = format!(
            ":w{}{}_00 w{}{}_00: - :w{}{}_00 w{}{}_00:",
            idx(i), idx(j), idx(j), idx(k), idx(i), idx(k), idx(j), idx(j)
        );
        match rewrite_quadratic(&e, i, k, 2, &lhs) {
            Ok(rw) => {
                let got: Vec<Scalar> = (0..=2).map(|p| rw.coefficient(p, 2 - p)).collect();
                r.check(
                    format!("relation {name}"),
                    got == [s(1, 2), s(-1, 1), s(1, 2)],
                    format!("= {}", rewrite_text(&rw, |q| format!("w{}{}_0{q}", idx(i), idx(k)))),
                );
            }
            Err(err) => r.check(format!("relation {name}"), false, err.to_string()),
        }
        let lhs = Expr::sum(vec![
            (s(1, 1), om(i, j, 0, 0).wick(om(j, k, 0, 0))),
            (s(-1, 1), om(i, k, 0, 0).wick(om(j, j, 0, 0))),
        ]);
        let rhs = Expr::sum(vec![
            (s(1, 2), om(i, k, 0, 2)),
            (s(-1, 1), om(i, k, 0, 1).derive(1)),
            (s(1, 2), om(i, k, 0, 0).derive(2)),
        ]);
        oracle(&mut r, &format!("relation {name}"), &fm, &lhs, &rhs);
    }
    for j in 1..3 {
        let lhs = e.wick(&w(&e, 0, j, 0, 0), &w(&e, 0, j, 0, 0));
        let mut rhs = e.wick(&w(&e, 0, 0, 0, 0), &w(&e, j, j, 0, 0));
        rhs.add_scaled(&w(&e, 0, 0, 0, 2), &s(1, 2));
        rhs.add_scaled(&w(&e, j, j, 0, 2), &s(1, 2));
        let name = format!(":w1{0}_00 w1{0}_00: = :w11_00 w{0}{0}_00: + 1/2*w11_02 + 1/2*w{0}{0}_02", j + 1);
        r.check(format!("square {name}"), lhs == rhs, "exact");
        let lhs = om(0, j, 0, 0).wick(om(0, j, 0, 0));
        let rhs = Expr::sum(vec![
            (s(1, 1), om(0, 0, 0, 0).wick(om(j, j, 0, 0))),
            (s(1, 2), om(0, 0, 0, 2)),
            (s(1, 2), om(j, j, 0, 2)),
        ]);
        oracle(&mut r, &format!("square {name}"), &fm, &lhs, &rhs);
    }

    let redundant = span_checks(&mut r, 3, false, 8, 8);
    // The three square relations solve for w11_02 in weight-2 words.
    let sq = |i: usize, j: usize| {
        Expr::sum(vec![(s(1, 1), om(i, j, 0, 0).wick(om(i, j, 0, 0))), (s(-1, 1), om(i, i, 0, 0).wick(om(j, j, 0, 0)))])
    };
    let rhs = Expr::sum(vec![(s(1, 1), sq(0, 1)), (s(1, 1), sq(0, 2)), (s(-1, 1), sq(1, 2))]);
    let sqf = |i: usize, j: usize| {
        &e.wick(&w(&e, i, j, 0, 0), &w(&e, i, j, 0, 0)) - &e.wick(&w(&e, i, i, 0, 0), &w(&e, j, j, 0, 0))
    };
    let kernel_rhs = &(&sqf(0, 1) + &sqf(0, 2)) - &sqf(1, 2);
    let relation = "w11_02 = (:w12 w12: - :w11 w22:) + (:w13 w13: - :w11 w33:) - (:w23 w23: - :w22 w33:)";
    r.check(format!("square relations give {relation}"), w(&e, 0, 0, 0, 2) == kernel_rhs, "exact (all w.._00)");
    oracle(&mut r, "square relations give w11_02", &fm, &om(0, 0, 0, 2), &rhs);
    if !redundant.is_empty() {
        r.note(format!(
            "documented finding: {} redundant in the listed H(3) set; {relation} expresses it through weight-2 generators",
            redundant.join(", ")
        ));
    }
    r
}

/// The listed primary fields in H(3).
fn listed_primaries(e: &Engine, i: usize, j: usize) -> [(String, Field, Vec<QuadraticGenerator>, Field); 3] {
    let q = QuadraticGenerator::new;
    let c01 = &w(e, i, j, 0, 1) - &e.derive(&w(e, i, j, 0, 0)).scaled(&s(1, 2));
    let mut c02 = w(e, i, i, 0, 2);
    c02.add_scaled(&e.wick(&w(e, i, i, 0, 0), &w(e, i, i, 0, 0)), &s(-2, 9));
    c02.add_scaled(&e.derive_n(&w(e, i, i, 0, 0), 2), &s(-1, 6));
    let mut cij = w(e, i, j, 0, 2);
    cij.add_scaled(&e.wick(&w(e, i, j, 0, 0), &w(e, j, j, 0, 0)), &s(-4, 9));
    cij.add_scaled(&e.derive_n(&w(e, i, j, 0, 0), 2), &s(5, 9));
    cij.add_scaled(&e.derive(&w(e, i, j, 0, 1)), &s(-13, 9));
    let (a, b) = (i + 1, j + 1);
    [
        (format!("C{a}{b}_01"), c01, vec![q(i, j, 0, 0)], w(e, i, j, 0, 1)),
        (format!("C{a}{a}_02"), c02, vec![q(i, i, 0, 0)], w(e, i, i, 0, 2)),
        (format!("C{a}{b}_02"), cij, vec![q(i, j, 0, 0), q(i, j, 0, 1), q(j, j, 0, 0)], w(e, i, j, 0, 2)),
    ]
}

/// The oracle form of each listed field, built from generators only.
fn listed_primary_exprs(i: usize, j: usize) -> [Expr; 3] {
    [
        Expr::sum(vec![(s(1, 1), om(i, j, 0, 1)), (s(-1, 2), om(i, j, 0, 0).derive(1))]),
        Expr::sum(vec![
            (s(1, 1), om(i, i, 0, 2)),
            (s(-2, 9), om(i, i, 0, 0).wick(om(i, i, 0, 0))),
            (s(-1, 6), om(i, i, 0, 0).derive(2)),
        ]),
        Expr::sum(vec![
            (s(1, 1), om(i, j, 0, 2)),
            (s(-4, 9), om(i, j, 0, 0).wick(om(j, j, 0, 0))),
            (s(5, 9), om(i, j, 0, 0).derive(2)),
            (s(-13, 9), om(i, j, 0, 1).derive(1)),
        ]),
    ]
}

fn primary_fields(cutoff: u32) -> SuiteReport {
    let mut r = SuiteReport::new("primary-fields");
    let e = h(3);
    let l = heisenberg_virasoro(&e);
    let fm = FockModule::new(&heisenberg(3), None, cutoff).expect("linear table");
    let l_expr = Expr::sum((0..3).map(|i| (s(1, 2), om(i, i, 0, 0))).collect());
    let mut seen = BTreeSet::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let exprs = listed_primary_exprs(i, j);
            for ((name, c, ansatz, top), c_expr) in listed_primaries(&e, i, j).into_iter().zip(exprs) {
                if !seen.insert(name.clone()) {
                    continue;
                }
                let primary = is_primary(&e, &l, &c).unwrap_or(false);
                let alphabet = quadratic_alphabet(&e, &ansatz).expect("valid generators");
                let eval = WordEvaluator::new(&e, alphabet);
                let solved = primary_correct(&eval, &top, &l);
                let (agrees, solver_text) = match &solved {
                    Ok(res) => (res.primary == c, res.render(&eval, &name[1..].replace('C', "w"))),
                    Err(err) => (false, err.to_string()),
                };
                r.check(format!("{name} is primary"), primary, if primary { "L∘1 = Δ, L∘m = 0 for m ≥ 2" } else { "fails" });
                r.check(format!("{name} equals the solver's correction"), agrees, format!("solver: w{}", solver_text));
                if !primary {
                    r.note(format!("documented finding: listed {name} is not primary; solver gives w{solver_text}"));
                }
                // Index permutations are automorphisms, so the oracle covers one pair.
                if (i, j) != (0, 1) {
                    continue;
                }
                let weight = homogeneous_weight(&e, &c).expect("homogeneous");
                let mut ok = true;
                let mut checked = 0;
                for m in 1..=weight + 1 {
                    let lhs = l_expr.clone().nprod(c_expr.clone(), m as i64);
                    let rhs = if m == 1 {
                        Expr::sum(vec![(Scalar::from_int(weight as i64), c_expr.clone())])
                    } else {
                        Expr::sum(vec![])
                    };
                    match fm.verify_exprs(&lhs, &rhs) {
                        Ok(rep) => {
                            ok &= rep.agree;
                            checked += rep.checked;
                        }
                        Err(_) => ok = false,
                    }
                }
                r.check(format!("oracle: {name} primary"), ok, format!("{checked} mode checks up to weight {cutoff}"));
            }
        }
    }
    r
}

/// Operands of a closed form as oracle expressions.
fn closed_operands(kind: ClosedForm) -> (Expr, Expr) {
    use ClosedForm::*;
    let alpha = |i: usize, c: u32| gen(i).derive(c);
    match kind {
        IiAlpha { i, a, b, c } => (om(i, i, a, b), alpha(i, c)),
        IjAlphaI { i, j, a, b, c } => (om(i, j, a, b), alpha(i, c)),
        IjAlphaJ { i, j, a, b, c } => (om(i, j, a, b), alpha(j, c)),
        IjIj { i, j, a, b, c, d } => (om(i, j, a, b), om(i, j, c, d)),
        IjJk { i, j, k, a, b, c, d } => (om(i, j, a, b), om(j, k, c, d)),
        IiIj { i, j, a, b, c, d } => (om(i, i, a, b), om(i, j, c, d)),
        JjIj { i, j, a, b, c, d } => (om(j, j, a, b), om(i, j, c, d)),
        IiIi { i, a, b, c, d } => (om(i, i, a, b), om(i, i, c, d)),
    }
}

/// Every `stride`-th instance goes through the oracle.
const CLOSED_FORM_STRIDE: usize = 97;

fn closed_forms(cutoff: u32) -> SuiteReport {
    let mut r = SuiteReport::new("closed-forms");
    let e = h(3);
    let instances = closed_form_instances(3, 2);
    match closed_form_discrepancies(&e, &instances) {
        Ok(bad) => r.check(
            "kernel nproduct = closed form, indices ≤ 3, a,b,c,d ≤ 2, all m",
            bad.is_empty(),
            format!("{} instances, {} discrepancies", instances.len(), bad.len()),
        ),
        Err(err) => r.check("kernel nproduct = closed form", false, err.to_string()),
    }
    let fm = FockModule::new(&heisenberg(3), None, cutoff).expect("linear table");
    let mut ok = 0;
    let mut failed = Vec::new();
    let mut checked = 0;
    for (kind, m) in instances.iter().step_by(CLOSED_FORM_STRIDE) {
        let (x, y) = closed_operands(*kind);
        let closed = circle_closed_form(&e, *kind, *m).expect("instances are in range");
        match fm.verify_exprs(&x.nprod(y, *m as i64), &Expr::field(closed)) {
            Ok(rep) if rep.agree => {
                ok += 1;
                checked += rep.checked;
            }
            _ => failed.push(format!("{kind:?} m={m}")),
        }
    }
    r.check(
        "oracle: sampled closed forms",
        failed.is_empty(),
        format!("{ok} instances (every {CLOSED_FORM_STRIDE}th), {checked} mode checks up to weight {cutoff}; failures {failed:?}"),
    );
    r
}

const STATED_SL2_POLES: [&str; 4] = ["0", "16/51", "16/9", "-32/3"];
const REDUCTION_ROUNDS: usize = 12;

fn pole_text(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

fn sl2_poles(cutoff: u32, k0: &BigRational) -> SuiteReport {
    let mut r = SuiteReport::new("sl2-poles");
    let eigen = sl2_eigenbasis();
    let gens = orbifold_generators(&eigen, &RootData::sl2()).expect("sl2 root data");
    let engine = Engine::new(Arc::new(eigen.spec.clone()));
    let alphabet = Alphabet::new(&engine, gens).expect("homogeneous generators");
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    let stated: BTreeSet<String> = STATED_SL2_POLES.iter().map(|p| p.to_string()).collect();

    let default = structure_constants(&eval).expect("sl2 constants");
    let reduced = reduced_structure_constants(&eval, REDUCTION_ROUNDS).expect("sl2 constants");
    for (label, report) in [("word-order basis", &default), ("adapted basis", &reduced)] {
        let got: BTreeSet<String> = report.pole_strings().into_iter().collect();
        r.check(
            format!("pole set = {} ({label})", pole_text(&STATED_SL2_POLES.map(String::from))),
            got == stated,
            format!("computed {}", pole_text(&report.pole_strings())),
        );
        r.check(
            format!("empty irreducible residual ({label})"),
            report.poles.residual.is_empty(),
            format!("{} factors", report.poles.residual.len()),
        );
    }
    let forced: Vec<String> = default.forced_poles().into_iter().collect();
    let drops: Vec<String> = default
        .rank_drops
        .iter()
        .map(|d| format!("weight {} at k = {}: {} -> {}", d.weight, d.k, d.generic_rank, d.rank))
        .collect();
    r.check(
        "poles where generator words lose rank",
        !forced.is_empty(),
        format!("{} ({})", pole_text(&forced), drops.join("; ")),
    );

    match specialized_agrees(&default, k0) {
        Ok(true) => r.check(format!("constants at k = {}", render_rational(k0)), true, "match a direct computation over Q"),
        Ok(false) => r.check(format!("constants at k = {}", render_rational(k0)), false, "differ from a direct computation"),
        Err(err) => r.check(format!("constants at k = {}", render_rational(k0)), false, err),
    }

    let quad = |u: usize, a: u32, v: usize, b: u32| gen(u).derive(a).wick(gen(v).derive(b));
    let letters = [gen(1), quad(0, 0, 0, 0), quad(2, 0, 2, 0), quad(2, 0, 2, 2), quad(2, 0, 0, 0), quad(2, 0, 0, 1), quad(2, 0, 0, 2)];
    let fm = FockModule::new(&eigen.spec, Some(k0.clone()), cutoff).expect("linear table");
    let labels = alphabet.labels();
    // Products with the weight-1 generator F, including the V02∘0 F entry.
    for key in default.entries.keys().filter(|&&(a, b, _)| a == 0 || b == 0) {
        let (a, b, n) = *key;
        let lhs = letters[a].clone().nprod(letters[b].clone(), n as i64);
        let rhs = expression_expr(&letters, &default.entries[key]);
        oracle(&mut r, &format!("{} ∘{n} {} at k = {}", labels[a], labels[b], render_rational(k0)), &fm, &lhs, &rhs);
    }

    // A weight-4 relation among words that holds only at k = 16.
    let sixteen = parse_rational("16").expect("literal");
    match null_relation(&sixteen, 4) {
        Ok(Some((relation, text))) => {
            let expr = expression_expr(&letters, &relation);
            let zero_at = |at: &BigRational| {
                FockModule::new(&eigen.spec, Some(at.clone()), cutoff.max(4))
                    .and_then(|fm| fm.expr_state(&expr))
                    .map(|st| st.is_zero())
            };
            match (zero_at(&sixteen), zero_at(k0)) {
                (Ok(z16), Ok(z0)) => r.check(
                    "oracle: weight-4 word relation exactly at k = 16",
                    z16 && (k0 == &sixteen || !z0),
                    format!("{text} = 0 at k = 16: {z16}; at k = {}: {z0}", render_rational(k0)),
                ),
                (a, b) => r.check("oracle: weight-4 word relation", false, format!("{a:?} {b:?}")),
            }
        }
        Ok(None) => r.check("weight-4 words degenerate at k = 16", false, "independent"),
        Err(err) => r.check("weight-4 words degenerate at k = 16", false, err),
    }
    r.note(format!(
        "documented finding: k = 16 is a pole of V02∘0 F in every basis because weight-4 words are independent generically and degenerate at 16; the computed minimal pole set is {}",
        pole_text(&reduced.pole_strings())
    ));
    r
}

/// The first linear relation among the words of `weight` at level `at`.
fn null_relation(at: &BigRational, weight: u32) -> Result<Option<(Vec<(Word, Scalar)>, String)>, String> {
    let (engine, alphabet) = numeric_sl2(at)?;
    let eval = WordEvaluator::new(&engine, alphabet.clone());
    let words = words_of_weight(&alphabet, weight);
    let mut span = LinearSpan::new();
    for f in eval.eval_all(&words) {
        if let Insertion::Dependent(combo) = span.push(field_vec(&f)) {
            let relation: Vec<(Word, Scalar)> = combo.into_iter().map(|(i, c)| (words[i].clone(), c)).collect();
            let text = render_expression(&alphabet, &relation);
            return Ok(Some((relation, text)));
        }
    }
    Ok(None)
}

fn numeric_sl2(at: &BigRational) -> Result<(Engine, Alphabet), String> {
    let eigen = sl2_eigenbasis();
    let spec = eigen.spec.specialize(at).map_err(|e| e.to_string())?;
    let engine = Engine::new(Arc::new(spec.clone()));
    let numeric_eigen = Eigenbasis { spec, old_in_new: eigen.old_in_new, new_in_old: eigen.new_in_old };
    let gens = orbifold_generators(&numeric_eigen, &RootData::sl2()).map_err(|e| e.to_string())?;
    let alphabet = Alphabet::new(&engine, gens).map_err(|e| e.to_string())?;
    Ok((engine, alphabet))
}

fn specialized_agrees(report: &PoleReport, k0: &BigRational) -> Result<bool, String> {
    let (engine, alphabet) = numeric_sl2(k0)?;
    let numeric = structure_constants(&WordEvaluator::new(&engine, alphabet)).map_err(|e| e.to_string())?;
    Ok(numeric.entries == report.specialize(k0).map_err(|e| e.to_string())?)
}

fn large_level() -> SuiteReport {
    let mut r = SuiteReport::new("large-level");
    let (sl3_data, sl3_roots) = sl_data(2);
    let sl3 = affine("sl3", &sl3_data, Scalar::k()).expect("sl3 data");
    let specs: Vec<AlgebraSpec> = vec![sl2_affine(), sl2_eigenbasis().spec, sl3.clone()];
    for spec in &specs {
        match large_level_limit(spec) {
            Ok(rep) => {
                let zero_poles = rep.entries.iter().filter(|e| e.n == 0).all(|e| e.limit == "0");
                let count = rep.entries.iter().filter(|e| e.n == 0).count();
                r.check(format!("{}: limit is the Gram table", spec.name()), rep.matches_gram, format!("{} rescaled coefficients", rep.entries.len()));
                r.check(format!("{}: every ∘0 coefficient vanishes", spec.name()), zero_poles, format!("{count} coefficients of order k^(-1/2)"));
            }
            Err(err) => r.check(format!("{}: limit", spec.name()), false, err.to_string()),
        }
    }

    let table = classification_table(8);
    let mismatches: Vec<&str> = table
        .iter()
        .filter(|row| builder_counts(row.positive_roots, row.rank) != type_formula(row.positive_roots, row.rank))
        .map(|row| row.name.as_str())
        .collect();
    r.check(
        "generator counts match the type formula on the classification table",
        mismatches.is_empty(),
        format!("{} rows; mismatches {mismatches:?}", table.len()),
    );
    for (name, spec, roots) in [("sl2", sl2_affine(), RootData::sl2()), ("sl3", sl3, sl3_roots)] {
        let eigen = cartan_eigenbasis(&spec, &roots, None).expect("root data");
        let engine = Engine::new(Arc::new(eigen.spec.clone()));
        let gens = orbifold_generators(&eigen, &roots).expect("root data");
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        for (_, f) in &gens {
            *counts.entry(homogeneous_weight(&engine, f).expect("homogeneous")).or_insert(0) += 1;
        }
        let want = type_formula(roots.roots.len() as u64, roots.cartan.len() as u64);
        r.check(format!("{name}: built generators by weight"), counts == want, format!("{counts:?}"));
    }
    r
}
