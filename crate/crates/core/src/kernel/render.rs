use super::{AlgebraSpec, Factor, Field, Monomial};
use crate::coefficients::Scalar;

fn render_factor(spec: &AlgebraSpec, f: Factor) -> String {
    let name = &spec.generators()[f.gen()].name;
    if f.deriv == 0 {
        name.clone()
    } else {
        format!("d^{} {}", f.deriv, name)
    }
}

/// `:d^2 a a b:`; the vacuum renders as `1`.
pub fn render_monomial(spec: &AlgebraSpec, m: &Monomial) -> String {
    if m.is_vacuum() {
        return "1".to_string();
    }
    let parts: Vec<String> = m.factors().iter().map(|&f| render_factor(spec, f)).collect();
    format!(":{}:", parts.join(" "))
}

/// Writes `c` so that `c*:...:` parses back with the intended grouping.
pub(crate) fn coefficient_text(c: &Scalar) -> String {
    let s = c.to_string();
    if c.denom().is_one() && c.numer().term_count() > 1 {
        format!("({s})")
    } else {
        s
    }
}

/// Canonical text of a field: terms in monomial order joined by `+`/`-`.
pub fn render_field(spec: &AlgebraSpec, f: &Field) -> String {
    let terms: Vec<(Monomial, Scalar)> = f.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    render_terms(&terms, |m| render_monomial(spec, m))
}

/// Joins `c*word` terms with `+`/`-`; a coefficient is negative when no
/// numerator coefficient is positive.
pub(crate) fn render_terms(terms: &[(Monomial, Scalar)], word: impl Fn(&Monomial) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        let negative = c.numer().coeffs().iter().all(|x| x.sign() != num_bigint::Sign::Plus);
        let mag = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if m.is_vacuum() {
            out.push_str(&coefficient_text(&mag));
        } else if mag.is_one() {
            out.push_str(&word(m));
        } else {
            out.push_str(&coefficient_text(&mag));
            out.push('*');
            out.push_str(&word(m));
        }
    }
    out
}
