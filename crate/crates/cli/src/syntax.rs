//! Tokens and the FIELD-EXPR / SCALAR grammar shared by algebra files and
//! command-line arguments.
//!
//! ```text
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ["^" INT]
//! atom   := INT | "k" | "(" scalar ")" | ":" letter+ ":" | letter
//! letter := ["d" "^" INT] NAME
//! ```
//!
//! A term holds at most one monomial; parenthesized groups are scalars.

use std::fmt;

use vertex_core::coefficients::{parse_rational, Scalar};

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

pub(crate) fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError { pos, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &str = "+-*/^():=,";

/// Splits one line into tokens; `#` starts a comment.
pub fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: i + 1 };
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token { tok: Tok::Int(chars[start..i].iter().collect()), pos });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
        } else if SYMBOLS.contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return err(pos, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// Names that cannot be generators because the grammar reserves them.
pub const RESERVED: [&str; 2] = ["k", "d"];

/// `∂^deriv NAME` inside a monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub name: String,
    pub deriv: u32,
    pub pos: Pos,
}

/// `coefficient * :letters:`; an empty `letters` is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermAst {
    pub coefficient: Scalar,
    pub letters: Vec<Letter>,
    pub pos: Pos,
}

enum Atom {
    Scalar(Scalar),
    Word(Vec<Letter>, Pos),
}

/// Cursor over one line's tokens.
pub struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
    end: Pos,
    allow_k: bool,
}

impl<'a> Parser<'a> {
    /// `end` is the position reported for errors at the end of input.
    pub fn new(tokens: &'a [Token], end: Pos, allow_k: bool) -> Self {
        Parser { tokens, at: 0, end, allow_k }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.at)
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    pub fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.pos)
    }

    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.at);
        self.at += 1;
        t
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.tokens.len()
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => err(t.pos, format!("unexpected {} after the end of the statement", t.tok)),
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<Pos, SyntaxError> {
        match self.next() {
            Some(Token { tok: Tok::Sym(s), pos }) if *s == c => Ok(*pos),
            Some(t) => err(t.pos, format!("expected `{c}`, found {}", t.tok)),
            None => err(self.end, format!("expected `{c}` at end of input")),
        }
    }

    pub fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        match self.next() {
            Some(Token { tok: Tok::Ident(s), pos }) => Ok((s.clone(), *pos)),
            Some(t) => err(t.pos, format!("expected {what}, found {}", t.tok)),
            None => err(self.end, format!("expected {what} at end of input")),
        }
    }

    pub fn expect_u32(&mut self, what: &str) -> Result<(u32, Pos), SyntaxError> {
        match self.next() {
            Some(Token { tok: Tok::Int(s), pos }) => match s.parse() {
                Ok(v) => Ok((v, *pos)),
                Err(_) => err(*pos, format!("{what} `{s}` is too large")),
            },
            Some(t) => err(t.pos, format!("expected {what}, found {}", t.tok)),
            None => err(self.end, format!("expected {what} at end of input")),
        }
    }

    /// A full FIELD-EXPR up to the end of the tokens.
    pub fn field_expr(&mut self) -> Result<Vec<TermAst>, SyntaxError> {
        let terms = self.sum(false)?;
        self.expect_end()?;
        Ok(terms)
    }

    fn sum(&mut self, scalar_only: bool) -> Result<Vec<TermAst>, SyntaxError> {
        let mut out = Vec::new();
        let mut negate = false;
        let mut op: Option<Pos> = None;
        while self.peek_sym('+') || self.peek_sym('-') {
            let t = self.next().unwrap();
            negate ^= t.tok == Tok::Sym('-');
            op = Some(t.pos);
        }
        loop {
            if self.at_end() || self.peek_sym(')') {
                let at = op.unwrap_or(self.pos());
                return match op {
                    Some(_) => err(at, "dangling operator: expected a term after it"),
                    None => err(at, "expected a term"),
                };
            }
            let mut term = self.term(scalar_only)?;
            if negate {
                term.coefficient = -term.coefficient;
            }
            out.push(term);
            if self.peek_sym('+') || self.peek_sym('-') {
                let t = self.next().unwrap();
                negate = t.tok == Tok::Sym('-');
                op = Some(t.pos);
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&mut self, scalar_only: bool) -> Result<TermAst, SyntaxError> {
        let pos = self.pos();
        let mut coefficient = Scalar::one();
        let mut word: Option<(Vec<Letter>, Pos)> = None;
        let mut absorb = |atom: Atom, word: &mut Option<(Vec<Letter>, Pos)>| -> Result<(), SyntaxError> {
            match atom {
                Atom::Scalar(s) => coefficient = &coefficient * &s,
                Atom::Word(w, at) => {
                    if word.is_some() {
                        return err(at, "a term holds one monomial; write products as `:a b:`");
                    }
                    *word = Some((w, at));
                }
            }
            Ok(())
        };
        let first = self.factor(scalar_only)?;
        absorb(first, &mut word)?;
        let mut divisor = Scalar::one();
        while self.peek_sym('*') || self.peek_sym('/') {
            let op = self.next().unwrap();
            if self.at_end() {
                return err(op.pos, format!("dangling {}: expected a factor after it", op.tok));
            }
            let atom = self.factor(scalar_only)?;
            if op.tok == Tok::Sym('/') {
                match atom {
                    Atom::Scalar(s) if s.is_zero() => return err(op.pos, "division by zero"),
                    Atom::Scalar(s) => divisor = &divisor * &s,
                    Atom::Word(_, at) => return err(at, "cannot divide by a monomial"),
                }
            } else {
                absorb(atom, &mut word)?;
            }
        }
        let coefficient = coefficient.checked_div(&divisor).expect("divisor is nonzero");
        let letters = word.map(|(w, _)| w).unwrap_or_default();
        Ok(TermAst { coefficient, letters, pos })
    }

    fn factor(&mut self, scalar_only: bool) -> Result<Atom, SyntaxError> {
        let atom = self.atom(scalar_only)?;
        if self.peek_sym('^') {
            let caret = self.next().unwrap();
            let exponent = match self.peek() {
                Some(Token { tok: Tok::Int(_), .. }) => self.expect_u32("exponent")?.0,
                _ => return err(caret.pos, "dangling `^`: expected a nonnegative integer exponent"),
            };
            return match atom {
                Atom::Scalar(s) => Ok(Atom::Scalar(s.pow(exponent))),
                Atom::Word(_, at) => err(at, "cannot raise a monomial to a power"),
            };
        }
        Ok(atom)
    }

    fn atom(&mut self, scalar_only: bool) -> Result<Atom, SyntaxError> {
        let Some(t) = self.next() else {
            return err(self.end, "expected a scalar or a monomial at end of input");
        };
        match &t.tok {
            Tok::Int(s) => {
                let r = parse_rational(s).expect("digits parse as an integer");
                Ok(Atom::Scalar(Scalar::from_rational(&r)))
            }
            Tok::Ident(s) if s == "k" => {
                if !self.allow_k {
                    return err(t.pos, "the level `k` is not available here (declare `over k`)");
                }
                Ok(Atom::Scalar(Scalar::k()))
            }
            Tok::Sym('(') => {
                let terms = self.sum(true)?;
                self.expect_sym(')')?;
                let mut s = Scalar::zero();
                for term in terms {
                    s = &s + &term.coefficient;
                }
                Ok(Atom::Scalar(s))
            }
            Tok::Sym(':') | Tok::Ident(_) if scalar_only => {
                err(t.pos, "only scalars may appear inside parentheses")
            }
            Tok::Sym(':') => {
                let mut letters = Vec::new();
                while !self.peek_sym(':') {
                    if self.at_end() {
                        return err(t.pos, "unterminated monomial: missing closing `:`");
                    }
                    letters.push(self.letter()?);
                }
                self.next();
                if letters.is_empty() {
                    return err(t.pos, "empty monomial `::`; write the vacuum as `1`");
                }
                Ok(Atom::Word(letters, t.pos))
            }
            Tok::Ident(_) => {
                self.at -= 1;
                Ok(Atom::Word(vec![self.letter()?], t.pos))
            }
            Tok::Sym(_) => err(t.pos, format!("expected a scalar or a monomial, found {}", t.tok)),
        }
    }

    fn letter(&mut self) -> Result<Letter, SyntaxError> {
        let (name, pos) = self.expect_ident("a generator name")?;
        if name == "d" {
            let caret = self.expect_sym('^')?;
            if !matches!(self.peek(), Some(Token { tok: Tok::Int(_), .. })) {
                return err(caret, "dangling `^`: expected a derivative order");
            }
            let (deriv, _) = self.expect_u32("derivative order")?;
            let (name, _) = self.expect_ident("a generator name after the derivative")?;
            check_name(&name, pos)?;
            return Ok(Letter { name, deriv, pos });
        }
        check_name(&name, pos)?;
        Ok(Letter { name, deriv: 0, pos })
    }
}

pub(crate) fn check_name(name: &str, pos: Pos) -> Result<(), SyntaxError> {
    if RESERVED.contains(&name) {
        return err(pos, format!("`{name}` is reserved and cannot name a generator"));
    }
    Ok(())
}

/// Parses a standalone FIELD-EXPR (one line).
pub fn parse_field_expr(text: &str, allow_k: bool) -> Result<Vec<TermAst>, SyntaxError> {
    if text.contains('\n') {
        return err(Pos { line: 1, column: text.find('\n').unwrap() + 1 }, "expression spans several lines");
    }
    let tokens = tokenize(text, 1)?;
    let end = Pos { line: 1, column: text.chars().count() + 1 };
    Parser::new(&tokens, end, allow_k).field_expr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> TermAst {
        let mut t = parse_field_expr(text, true).unwrap();
        assert_eq!(t.len(), 1, "{text}");
        t.pop().unwrap()
    }

    #[test]
    fn rendered_coefficients_parse_back() {
        let t = one("(16 - 51*k)/(9*k)*:d^2 a b:");
        assert_eq!(t.coefficient.to_string(), "(16 - 51*k)/(9*k)");
        assert_eq!(t.letters.len(), 2);
        assert_eq!(t.letters[0].deriv, 2);
        assert_eq!(one("-7/24*:d^4 w00:").coefficient, Scalar::ratio(-7, 24));
        assert_eq!(one("2*k^2").coefficient.to_string(), "2*k^2");
    }

    #[test]
    fn sums_and_signs() {
        let t = parse_field_expr("-x + 2*:y y: - 3", true).unwrap();
        let c: Vec<String> = t.iter().map(|t| t.coefficient.to_string()).collect();
        assert_eq!(c, ["-1", "2", "-3"]);
        assert!(t[2].letters.is_empty());
    }

    #[test]
    fn dangling_power_points_at_the_caret() {
        let e = parse_field_expr("k^", true).unwrap_err();
        assert_eq!(e.pos.column, 2);
        assert!(e.message.contains('^'));
        let e = parse_field_expr("1 +", true).unwrap_err();
        assert_eq!(e.pos.column, 3);
    }

    #[test]
    fn misuse_is_rejected() {
        for bad in [":a: * :b:", "1/:a:", ":a:^2", "(a)", "::", ":a", "k", "1/0", "d^ a"] {
            let allow_k = bad != "k";
            assert!(parse_field_expr(bad, allow_k).is_err(), "{bad}");
        }
    }
}
