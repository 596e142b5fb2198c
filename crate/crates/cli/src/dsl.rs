//! Line-oriented algebra files.
//!
//! ```text
//! algebra NAME [over k]
//! involution NAME
//! gen NAME weight INT [parity INV SIGN]...
//! ope A B n= FIELD-EXPR
//! ```
//!
//! Table monomials denote PBW basis words, so their letters must already be
//! in PBW order (declaration order, higher derivatives first). Reversed pairs
//! are completed by skew-symmetry. A table over `k` whose generators all have
//! weight 1 and whose entries have the affine shape is rebuilt through
//! [`affine`], which also records the invariant form and `h∨`.

use num_rational::BigRational;
use num_traits::Zero;
use vertex_core::algebras::{affine, AlgebraError, LieData};
use vertex_core::coefficients::Scalar;
use vertex_core::kernel::{render_field, AlgebraSpec, Factor, Field, KernelError, Monomial, SpecBuilder};

use crate::syntax::{check_name, err, tokenize, Parser, Pos, SyntaxError, TermAst, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },
}

fn semantic<T>(pos: Pos, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError::Semantic { pos, message: message.into() })
}

#[derive(Clone, Debug)]
pub struct GeneratorDecl {
    pub name: String,
    pub weight: u32,
    pub parity: Vec<(String, i8)>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct OpeEntry {
    pub a: String,
    pub b: String,
    pub n: u32,
    /// Over the declared generators, indexed in declaration order.
    pub value: Field,
    pub pos: Pos,
}

/// Positions are diagnostics only and take no part in equality.
impl PartialEq for GeneratorDecl {
    fn eq(&self, other: &Self) -> bool {
        (&self.name, self.weight, &self.parity) == (&other.name, other.weight, &other.parity)
    }
}

impl Eq for GeneratorDecl {}

impl PartialEq for OpeEntry {
    fn eq(&self, other: &Self) -> bool {
        (&self.a, &self.b, self.n, &self.value) == (&other.a, &other.b, other.n, &other.value)
    }
}

impl Eq for OpeEntry {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDocument {
    pub name: String,
    pub over_k: bool,
    pub involutions: Vec<String>,
    pub generators: Vec<GeneratorDecl>,
    pub entries: Vec<OpeEntry>,
}

impl AlgebraDocument {
    fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// A spec holding only the generators, used for rendering.
    fn names_spec(&self) -> AlgebraSpec {
        let mut b = SpecBuilder::new(&self.name);
        for g in &self.generators {
            b.generator(&g.name, g.weight).expect("declarations were validated");
        }
        b.build().expect("a table without entries is consistent")
    }

    /// The document of an existing spec, with every table entry written out.
    pub fn from_spec(spec: &AlgebraSpec) -> Self {
        let generators = spec
            .generators()
            .iter()
            .map(|g| GeneratorDecl {
                name: g.name.clone(),
                weight: g.weight,
                parity: g.parity.iter().map(|(i, s)| (i.clone(), *s)).collect(),
                pos: Pos::default(),
            })
            .collect();
        let names = |i: usize| spec.generators()[i].name.clone();
        let entries = spec
            .table()
            .iter()
            .map(|(a, b, n, f)| OpeEntry { a: names(a), b: names(b), n, value: f.clone(), pos: Pos::default() })
            .collect();
        AlgebraDocument {
            name: spec.name().to_string(),
            over_k: spec.symbolic_level(),
            involutions: spec.involutions().to_vec(),
            generators,
            entries,
        }
    }

    /// Canonical text; `parse(render(doc)) == doc`.
    pub fn render(&self) -> String {
        let mut out = format!("algebra {}", self.name);
        if self.over_k {
            out.push_str(" over k");
        }
        out.push('\n');
        for inv in &self.involutions {
            out.push_str(&format!("involution {inv}\n"));
        }
        for g in &self.generators {
            out.push_str(&format!("gen {} weight {}", g.name, g.weight));
            for (inv, sign) in &g.parity {
                out.push_str(&format!(" parity {inv} {}", if *sign > 0 { "+1" } else { "-1" }));
            }
            out.push('\n');
        }
        let names = self.names_spec();
        for e in &self.entries {
            out.push_str(&format!("ope {} {} {}= {}\n", e.a, e.b, e.n, render_field(&names, &e.value)));
        }
        out
    }

    /// Builds and validates the algebra; errors point at the offending line.
    pub fn to_spec(&self) -> Result<AlgebraSpec, DslError> {
        let mut b = SpecBuilder::new(&self.name).symbolic(self.over_k);
        for inv in &self.involutions {
            b.involution(inv);
        }
        for g in &self.generators {
            let i = b.generator(&g.name, g.weight).or_else(|e| semantic(g.pos, e.to_string()))?;
            for (inv, sign) in &g.parity {
                b.parity(i, inv, *sign).or_else(|e| semantic(g.pos, e.to_string()))?;
            }
        }
        for e in &self.entries {
            let (a, bb) = (self.index_of(&e.a).unwrap(), self.index_of(&e.b).unwrap());
            b.entry(a, bb, e.n, e.value.clone()).or_else(|err| semantic(e.pos, err.to_string()))?;
        }
        let spec = b.build().map_err(|e| self.locate(e))?;
        match self.affine_data(&spec) {
            Some(data) => self.rebuild_affine(&data),
            None => Ok(spec),
        }
    }

    /// Position of the first entry on the unordered pair `{a, b}`, preferring `a∘n b`.
    fn entry_pos(&self, a: &str, b: &str, n: u32) -> Pos {
        let exact = self.entries.iter().find(|e| e.a == a && e.b == b && e.n == n);
        let pair = self.entries.iter().find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a));
        exact.or(pair).map_or(Pos { line: 1, column: 1 }, |e| e.pos)
    }

    fn locate(&self, e: KernelError) -> DslError {
        let pos = match &e {
            KernelError::SkewSymmetry { a, b, n }
            | KernelError::InvolutionViolation { a, b, n, .. }
            | KernelError::WeightMismatch { a, b, n, .. }
            | KernelError::DuplicateEntry { a, b, n } => self.entry_pos(a, b, *n),
            _ => Pos { line: 1, column: 1 },
        };
        DslError::Semantic { pos, message: e.to_string() }
    }

    /// Lie data when the table is `X∘1 Y = k·B(X,Y)`, `X∘0 Y = [X,Y]`.
    fn affine_data(&self, spec: &AlgebraSpec) -> Option<LieData> {
        if !self.over_k || self.generators.iter().any(|g| g.weight != 1) {
            return None;
        }
        let d = self.generators.len();
        let zero = BigRational::zero();
        let mut form = vec![vec![zero.clone(); d]; d];
        let mut bracket = vec![vec![vec![zero; d]; d]; d];
        for (a, b, n, f) in spec.table().iter() {
            match n {
                1 => {
                    if f.terms().any(|(m, _)| !m.is_vacuum()) {
                        return None;
                    }
                    form[a][b] = f.constant().checked_div(&Scalar::k()).ok()?.as_rational()?;
                }
                0 => {
                    for (m, c) in f.terms() {
                        let [x] = m.factors() else { return None };
                        if x.deriv != 0 {
                            return None;
                        }
                        bracket[a][b][x.gen()] = c.as_rational()?;
                    }
                }
                _ => return None,
            }
        }
        let names = self.generators.iter().map(|g| g.name.clone()).collect();
        let dual_coxeter = dual_coxeter(&bracket, &form);
        Some(LieData { names, bracket, form, dual_coxeter })
    }

    fn rebuild_affine(&self, data: &LieData) -> Result<AlgebraSpec, DslError> {
        let header = Pos { line: 1, column: 1 };
        let fail = |e: AlgebraError| DslError::Semantic { pos: header, message: format!("affine table: {e}") };
        let spec = affine(&self.name, data, Scalar::k()).map_err(fail)?;
        if self.involutions.is_empty() {
            return Ok(spec);
        }
        let mut b = spec.to_builder();
        for inv in &self.involutions {
            b.involution(inv);
        }
        for (i, g) in self.generators.iter().enumerate() {
            for (inv, sign) in &g.parity {
                b.parity(i, inv, *sign).map_err(|e| self.locate(e))?;
            }
        }
        b.build().map_err(|e| self.locate(e))
    }
}

/// `h∨` from `Killing = 2h∨·B` when the Killing form is a nonzero multiple of `B`.
fn dual_coxeter(bracket: &[Vec<Vec<BigRational>>], form: &[Vec<BigRational>]) -> Option<BigRational> {
    let d = form.len();
    let killing = |a: usize, b: usize| {
        let mut s = BigRational::zero();
        for c in 0..d {
            for e in 0..d {
                s += &bracket[b][c][e] * &bracket[a][e][c];
            }
        }
        s
    };
    let mut ratio: Option<BigRational> = None;
    for a in 0..d {
        for b in 0..d {
            let kab = killing(a, b);
            if form[a][b].is_zero() {
                if !kab.is_zero() {
                    return None;
                }
                continue;
            }
            let r = kab / &form[a][b];
            match &ratio {
                Some(q) if *q != r => return None,
                _ => ratio = Some(r),
            }
        }
    }
    ratio.filter(|r| !r.is_zero()).map(|r| r / BigRational::from_integer(2.into()))
}

fn line_end(text: &str, line: usize) -> Pos {
    Pos { line, column: text.chars().count() + 1 }
}

/// Parses an algebra file into a document.
pub fn parse_document(text: &str) -> Result<AlgebraDocument, DslError> {
    let mut doc: Option<AlgebraDocument> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let tokens = tokenize(raw, line)?;
        let Some(first) = tokens.first() else { continue };
        let mut p = Parser::new(&tokens, line_end(raw, line), doc.as_ref().is_some_and(|d| d.over_k));
        let (keyword, kpos) = p.expect_ident("a keyword")?;
        match (keyword.as_str(), doc.as_mut()) {
            ("algebra", None) => doc = Some(header(&mut p)?),
            ("algebra", Some(_)) => return semantic(kpos, "second `algebra` header"),
            (_, None) => return semantic(first.pos, "the file must start with `algebra NAME`"),
            ("involution", Some(d)) => {
                let (name, pos) = p.expect_ident("an involution name")?;
                p.expect_end()?;
                if d.involutions.contains(&name) {
                    return semantic(pos, format!("involution `{name}` declared twice"));
                }
                d.involutions.push(name);
            }
            ("gen", Some(d)) => generator(&mut p, d)?,
            ("ope", Some(d)) => entry(&mut p, d, kpos)?,
            _ => return Err(SyntaxError { pos: kpos, message: format!("unknown keyword `{keyword}`") }.into()),
        }
    }
    match doc {
        Some(d) => Ok(d),
        None => semantic(Pos { line: 1, column: 1 }, "missing `algebra NAME` header"),
    }
}

/// Parses and builds in one step.
pub fn parse_algebra(text: &str) -> Result<AlgebraSpec, DslError> {
    parse_document(text)?.to_spec()
}

fn header(p: &mut Parser) -> Result<AlgebraDocument, DslError> {
    let (mut name, _) = p.expect_ident("an algebra name")?;
    // Hyphenated names such as `sl2-eigen`.
    while matches!(p.peek().map(|t| &t.tok), Some(Tok::Sym('-'))) {
        p.next();
        match p.next().map(|t| &t.tok) {
            Some(Tok::Ident(part)) | Some(Tok::Int(part)) => {
                name.push('-');
                name.push_str(part);
            }
            _ => return err(p.pos(), "expected a name part after `-`").map_err(Into::into),
        }
    }
    let mut over_k = false;
    if !p.at_end() {
        let (word, pos) = p.expect_ident("`over`")?;
        if word != "over" {
            return err(pos, format!("expected `over k`, found `{word}`")).map_err(Into::into);
        }
        let (var, pos) = p.expect_ident("`k`")?;
        if var != "k" {
            return err(pos, format!("the level variable must be `k`, found `{var}`")).map_err(Into::into);
        }
        over_k = true;
    }
    p.expect_end()?;
    Ok(AlgebraDocument { name, over_k, involutions: Vec::new(), generators: Vec::new(), entries: Vec::new() })
}

fn generator(p: &mut Parser, doc: &mut AlgebraDocument) -> Result<(), DslError> {
    let (name, pos) = p.expect_ident("a generator name")?;
    check_name(&name, pos)?;
    if doc.index_of(&name).is_some() {
        return semantic(pos, format!("generator `{name}` declared twice"));
    }
    let (kw, kw_pos) = p.expect_ident("`weight`")?;
    if kw != "weight" {
        return err(kw_pos, format!("expected `weight`, found `{kw}`")).map_err(Into::into);
    }
    let (weight, wpos) = p.expect_u32("a weight")?;
    if weight == 0 {
        return semantic(wpos, "generator weight must be positive");
    }
    let mut parity = Vec::new();
    while !p.at_end() {
        let (kw, kw_pos) = p.expect_ident("`parity`")?;
        if kw != "parity" {
            return err(kw_pos, format!("expected `parity`, found `{kw}`")).map_err(Into::into);
        }
        let (inv, _) = p.expect_ident("an involution name")?;
        let sign = sign(p)?;
        if !doc.involutions.contains(&inv) {
            doc.involutions.push(inv.clone());
        }
        if parity.iter().any(|(i, _)| *i == inv) {
            return semantic(kw_pos, format!("parity under `{inv}` given twice"));
        }
        parity.push((inv, sign));
    }
    doc.generators.push(GeneratorDecl { name, weight, parity, pos });
    Ok(())
}

/// `+1`, `-1`, `1`, `+` or `-`.
fn sign(p: &mut Parser) -> Result<i8, DslError> {
    let pos = p.pos();
    let mut s = 1;
    let mut seen_sign = false;
    if let Some(Token { tok: Tok::Sym(c @ ('+' | '-')), .. }) = p.peek() {
        s = if *c == '-' { -1 } else { 1 };
        seen_sign = true;
        p.next();
    }
    match p.peek() {
        Some(Token { tok: Tok::Int(v), pos }) => {
            if v != "1" {
                return semantic(*pos, format!("parity must be +1 or -1, found {v}"));
            }
            p.next();
        }
        _ if seen_sign => {}
        _ => return err(pos, "expected a parity sign (+1 or -1)").map_err(Into::into),
    }
    Ok(s)
}

fn entry(p: &mut Parser, doc: &mut AlgebraDocument, kpos: Pos) -> Result<(), DslError> {
    let (a, apos) = p.expect_ident("a generator name")?;
    let (b, bpos) = p.expect_ident("a generator name")?;
    let (n, _) = p.expect_u32("a product index")?;
    p.expect_sym('=')?;
    let (ia, ib) = match (doc.index_of(&a), doc.index_of(&b)) {
        (None, _) => return semantic(apos, format!("unknown generator `{a}`")),
        (_, None) => return semantic(bpos, format!("unknown generator `{b}`")),
        (Some(x), Some(y)) => (x, y),
    };
    let terms = p.field_expr()?;
    let expected = doc.generators[ia].weight as i64 + doc.generators[ib].weight as i64 - n as i64 - 1;
    let value = table_field(doc, &terms, Some(expected))?;
    if doc.entries.iter().any(|e| e.a == a && e.b == b && e.n == n) {
        return semantic(kpos, format!("product {a}∘{n}{b} given twice"));
    }
    doc.entries.push(OpeEntry { a, b, n, value, pos: kpos });
    Ok(())
}

/// Resolves letters to declared generators; words must be in PBW order.
fn table_field(doc: &AlgebraDocument, terms: &[TermAst], expected: Option<i64>) -> Result<Field, DslError> {
    let mut out = Field::zero();
    for t in terms {
        let mut factors = Vec::new();
        let mut weight = 0i64;
        for l in &t.letters {
            let Some(g) = doc.index_of(&l.name) else {
                return semantic(l.pos, format!("unknown generator `{}`", l.name));
            };
            weight += doc.generators[g].weight as i64 + l.deriv as i64;
            factors.push(Factor::new(g, l.deriv));
        }
        if let Some(w) = expected.filter(|&w| w != weight) {
            return semantic(t.pos, format!("term has weight {weight} but the product has weight {w}"));
        }
        let Some(m) = Monomial::from_sorted(factors) else {
            return semantic(t.pos, "letters of a table monomial must be in PBW order");
        };
        out.add_term(m, t.coefficient.clone());
    }
    Ok(out)
}
