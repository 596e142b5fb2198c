//! Builtin algebras and generator sets, and evaluation of command-line
//! field expressions against an engine.

use std::collections::BTreeMap;
use std::sync::Arc;

use vertex_core::algebras::{affine, heisenberg, sl2_eigenbasis, sl_data, RootData};
use vertex_core::coefficients::Scalar;
use vertex_core::genericity::orbifold_generators;
use vertex_core::kernel::{AlgebraSpec, Engine, Field};
use vertex_core::orbifold::{heisenberg_orbifold_generators, QuadraticGenerator};

use crate::dsl::parse_algebra;
use crate::syntax::{parse_field_expr, TermAst};
use crate::CliError;

/// `V^k(sl2)` in the basis `x, y, h`.
pub const SL2_TEXT: &str = "\
algebra sl2 over k
gen x weight 1
gen y weight 1
gen h weight 1
ope x y 1= k
ope x y 0= h
ope h x 0= 2*x
ope h y 0= -2*y
ope h h 1= 2*k
";

/// The rank-one Heisenberg algebra with its sign involution.
pub const HEISENBERG1_TEXT: &str = "\
algebra heisenberg1
involution cartan
gen a weight 1 parity cartan -1
ope a a 1= 1
";

/// Resolves `--algebra`: `sl2`, `sl2-eigen`, `slN`, `hN`/`heisenbergN`, or a file path.
pub fn load_algebra(arg: &str) -> Result<AlgebraSpec, CliError> {
    if arg == "sl2" {
        return parse_algebra(SL2_TEXT).map_err(|e| CliError::Parse(format!("builtin sl2: {e}")));
    }
    if arg == "sl2-eigen" {
        return Ok(sl2_eigenbasis().spec);
    }
    if let Some(n) = arg.strip_prefix("heisenberg").or_else(|| arg.strip_prefix('h')).and_then(|s| s.parse().ok()) {
        if n == 0 {
            return Err(CliError::Usage("Heisenberg rank must be positive".into()));
        }
        return Ok(heisenberg(n));
    }
    if let Some(n) = arg.strip_prefix("sl").and_then(|s| s.parse::<usize>().ok()) {
        if n < 2 {
            return Err(CliError::Usage("slN needs N >= 2".into()));
        }
        let (data, _) = sl_data(n - 1);
        return affine(arg, &data, Scalar::k()).map_err(|e| CliError::Usage(e.to_string()));
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| CliError::Usage(format!("`{arg}` is neither a builtin algebra nor a readable file: {e}")))?;
    parse_algebra(&text).map_err(|e| CliError::Parse(format!("{arg}: {e}")))
}

/// A labeled generator list together with the algebra it lives in.
pub struct GeneratorSet {
    pub spec: AlgebraSpec,
    pub gens: Vec<(String, Field)>,
}

/// Builtin sets: `builtin:hN` (the listed orbifold generators of rank `N`),
/// `builtin:h2-alt` (with `ω^{11}_{0,2}` instead of `ω^{22}_{0,2}`) and
/// `builtin:sl2` (the sl2 orbifold generators in the eigenbasis).
pub fn builtin_generators(name: &str) -> Result<GeneratorSet, CliError> {
    let unknown = || CliError::Usage(format!("unknown builtin generator set `builtin:{name}`"));
    if name == "sl2" {
        let eigen = sl2_eigenbasis();
        let gens = orbifold_generators(&eigen, &RootData::sl2()).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok(GeneratorSet { spec: eigen.spec, gens });
    }
    let (rank, second_square) = match name.strip_prefix('h') {
        Some("2-alt") => (2, false),
        Some(r) => (r.parse::<usize>().map_err(|_| unknown())?, true),
        None => return Err(unknown()),
    };
    if rank == 0 {
        return Err(unknown());
    }
    let spec = heisenberg(rank);
    let engine = Engine::new(Arc::new(spec.clone()));
    let gens = quadratic_fields(&engine, &heisenberg_orbifold_generators(rank, second_square));
    Ok(GeneratorSet { spec, gens })
}

pub fn quadratic_fields(engine: &Engine, gens: &[QuadraticGenerator]) -> Vec<(String, Field)> {
    let rank = engine.spec().generator_count();
    gens.iter()
        .map(|q| (q.label(rank), q.field(engine).expect("indices are in range")))
        .collect()
}

/// Command-line expression environment: generator names plus named fields.
pub struct Context {
    pub engine: Engine,
    pub defs: BTreeMap<String, Field>,
}

impl Context {
    pub fn new(spec: AlgebraSpec) -> Self {
        Context { engine: Engine::new(Arc::new(spec)), defs: BTreeMap::new() }
    }

    pub fn spec(&self) -> &AlgebraSpec {
        self.engine.spec()
    }

    pub fn define(&mut self, name: &str, field: Field) -> Result<(), CliError> {
        if self.spec().index_of(name).is_some() || self.defs.contains_key(name) {
            return Err(CliError::Usage(format!("name `{name}` is already in use")));
        }
        self.defs.insert(name.to_string(), field);
        Ok(())
    }

    /// Applies `NAME=EXPR` definitions in order.
    pub fn define_all(&mut self, defs: &[String]) -> Result<(), CliError> {
        for d in defs {
            let (name, expr) = d
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("definition `{d}` is not of the form NAME=EXPR")))?;
            let field = self.eval(expr)?;
            self.define(name.trim(), field)?;
        }
        Ok(())
    }

    /// A monomial `:f1 ... fn:` is the right-nested normally ordered product
    /// of its letters, each a generator or a named field.
    pub fn eval(&self, text: &str) -> Result<Field, CliError> {
        let terms = parse_field_expr(text, self.spec().symbolic_level())
            .map_err(|e| CliError::Parse(format!("in `{text}`: {e}")))?;
        self.eval_terms(&terms)
    }

    fn eval_terms(&self, terms: &[TermAst]) -> Result<Field, CliError> {
        let mut out = Field::zero();
        for t in terms {
            let mut letters = Vec::new();
            for l in &t.letters {
                let base = match self.spec().index_of(&l.name) {
                    Some(g) => Field::generator(g),
                    None => self.defs.get(&l.name).cloned().ok_or_else(|| {
                        CliError::Parse(format!("{}: unknown generator or name `{}`", l.pos, l.name))
                    })?,
                };
                letters.push(self.engine.derive_n(&base, l.deriv));
            }
            let word = if letters.is_empty() {
                Field::vacuum()
            } else {
                self.engine.iterated_wick(&letters).expect("nonempty word")
            };
            out.add_scaled(&word, &t.coefficient);
        }
        Ok(out)
    }

    /// `--gens`: a builtin set or `LABEL=EXPR,...` over this context.
    pub fn generators(&self, arg: &str) -> Result<Vec<(String, Field)>, CliError> {
        if let Some(name) = arg.strip_prefix("builtin:") {
            let set = builtin_generators(name)?;
            if set.spec != *self.spec() {
                return Err(CliError::Usage(format!(
                    "builtin:{name} lives in `{}`, not in `{}`",
                    set.spec.name(),
                    self.spec().name()
                )));
            }
            return Ok(set.gens);
        }
        let mut out = Vec::new();
        for item in arg.split(',') {
            let (label, expr) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("generator `{item}` is not of the form LABEL=EXPR")))?;
            out.push((label.trim().to_string(), self.eval(expr)?));
        }
        Ok(out)
    }
}

/// Context for commands taking `--algebra` and `--gens`; a builtin generator
/// set supplies the algebra when `--algebra` is omitted.
pub fn context_with_gens(
    algebra: Option<&str>,
    gens: &str,
    defs: &[String],
) -> Result<(Context, Vec<(String, Field)>), CliError> {
    let spec = match (algebra, gens.strip_prefix("builtin:")) {
        (Some(a), _) => load_algebra(a)?,
        (None, Some(name)) => builtin_generators(name)?.spec,
        (None, None) => return Err(CliError::Usage("--algebra is required unless --gens names a builtin set".into())),
    };
    let mut ctx = Context::new(spec);
    let gens = ctx.generators(gens)?;
    for (label, field) in &gens {
        ctx.define(label, field.clone())?;
    }
    ctx.define_all(defs)?;
    Ok((ctx, gens))
}
