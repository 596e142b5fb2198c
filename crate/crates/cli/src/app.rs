//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use vertex_core::coefficients::parse_rational;
use vertex_core::genericity::{large_level_limit, reduced_structure_constants, structure_constants};
use vertex_core::kernel::render_field;
use vertex_core::orbifold::{decouple, minimality_witnesses, primary_correct, strong_span_check, Alphabet, WordEvaluator};

use crate::context::{builtin_generators, context_with_gens, load_algebra, Context};
use crate::dsl::AlgebraDocument;
use crate::suites;
use crate::{CliError, Outcome, EXIT_FAILED, EXIT_PASS, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "vertex", version, about = "Exact OPE calculus and Z2-orbifold checks over Q(k)")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args, Debug)]
struct Operands {
    /// Builtin algebra (sl2, sl2-eigen, slN, hN) or an algebra file.
    #[arg(long)]
    algebra: String,
    /// Extra named fields, `NAME=EXPR`, usable as letters in later expressions.
    #[arg(long = "let", value_name = "NAME=EXPR")]
    lets: Vec<String>,
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All nonzero products `a∘n b`, n >= 0.
    Ope(Operands),
    /// The single product `a∘n b` (negative n allowed).
    Nprod {
        #[arg(short = 'n', allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        operands: Operands,
    },
    /// The normally ordered product `:a b:`.
    Wick(Operands),
    /// Writes a field as a normally ordered polynomial in generator words.
    Decouple {
        #[arg(long)]
        algebra: Option<String>,
        /// `builtin:NAME` or `LABEL=EXPR,...`.
        #[arg(long)]
        gens: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Also write the JSON record here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "let", value_name = "NAME=EXPR")]
        lets: Vec<String>,
    },
    /// Tests primariness and finds a correction in the words of `--gens`.
    Primary {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        /// Ansatz generators for the correction.
        #[arg(long)]
        gens: String,
        /// Conformal vector; defaults to the algebra's own or the Heisenberg one.
        #[arg(long, allow_hyphen_values = true)]
        virasoro: Option<String>,
        #[arg(long = "let", value_name = "NAME=EXPR")]
        lets: Vec<String>,
    },
    /// Compares the span of generator words with the invariant subspace, weight by weight.
    Span {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        cutoff: u32,
        #[arg(long, default_value = "cartan")]
        involution: String,
        /// Also drop each generator in turn and look for a deficiency.
        #[arg(long)]
        minimality: bool,
    },
    /// Structure constants among orbifold generators and their poles in k.
    Poles {
        /// `sl2` or an algebra file (with `--gens`).
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        gens: Option<String>,
        /// Choose basis words avoiding removable poles, iterating this many rounds.
        #[arg(long)]
        reduced: Option<usize>,
        /// Print every structure constant.
        #[arg(long)]
        entries: bool,
    },
    /// Runs a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        /// Weight cutoff for the Fock-space oracle.
        #[arg(long, default_value_t = 6)]
        cutoff: u32,
        /// Level used by the oracle for algebras over k.
        #[arg(long, default_value = "5", allow_hyphen_values = true)]
        k0: String,
    },
    /// Rescales generators by k^{-1/2} and takes k -> infinity.
    Limit {
        #[arg(long)]
        algebra: String,
    },
    /// Prints an algebra in the file format.
    Show {
        #[arg(long)]
        algebra: String,
    },
}

/// Runs one invocation; returns the exit status, stdout and stderr.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    (EXIT_PASS, e.to_string(), String::new())
                }
                _ => (EXIT_USAGE, String::new(), e.to_string()),
            }
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let mut stdout = match cli.format {
                Format::Text => outcome.text,
                Format::Json => serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize"),
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            (if outcome.passed { EXIT_PASS } else { EXIT_FAILED }, stdout, String::new())
        }
        Err(e) => (EXIT_USAGE, String::new(), format!("{e}\n")),
    }
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Ope(o) => binary(o, |ctx, a, b| {
            let products = ctx.engine.ope(a, b);
            let spec = ctx.spec();
            let lines: Vec<String> =
                products.iter().map(|(n, f)| format!("{n}: {}", render_field(spec, f))).collect();
            let json = products.iter().map(|(n, f)| json!({"n": n, "field": render_field(spec, f)})).collect();
            let text = if lines.is_empty() { "0 (no singular terms)".to_string() } else { lines.join("\n") };
            (text, serde_json::Value::Array(json))
        }),
        Command::Nprod { n, operands } => binary(operands, |ctx, a, b| {
            let f = render_field(ctx.spec(), &ctx.engine.nproduct(a, b, n));
            (f.clone(), json!({"n": n, "field": f}))
        }),
        Command::Wick(o) => binary(o, |ctx, a, b| {
            let f = render_field(ctx.spec(), &ctx.engine.wick(a, b));
            (f.clone(), json!({"field": f}))
        }),
        Command::Decouple { algebra, gens, target, out, lets } => {
            let (ctx, gens) = context_with_gens(algebra.as_deref(), &gens, &lets)?;
            let field = ctx.eval(&target)?;
            let eval = evaluator(&ctx, gens)?;
            let result = decouple(&eval, &field).map_err(usage)?;
            let record = result.record(&eval);
            let json = serde_json::to_value(&record).expect("records serialize");
            if let Some(path) = out {
                let body = serde_json::to_string_pretty(&json).expect("records serialize") + "\n";
                std::fs::write(&path, body).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            }
            let mut text = format!("weight {}\n{} = {}", result.weight, target.trim(), record.expression);
            if !result.success() {
                text.push_str(&format!("\nresidual: {}", record.residual));
            }
            Ok(Outcome { text, json, passed: result.success() })
        }
        Command::Primary { algebra, field, gens, virasoro, lets } => {
            let (ctx, gens) = context_with_gens(algebra.as_deref(), &gens, &lets)?;
            let a = ctx.eval(&field)?;
            let l = match &virasoro {
                Some(v) => ctx.eval(v)?,
                None => default_virasoro(&ctx)?,
            };
            let eval = evaluator(&ctx, gens)?;
            let spec = ctx.spec();
            match primary_correct(&eval, &a, &l) {
                Ok(res) => {
                    let corrected = res.render(&eval, "X");
                    let text = format!(
                        "X = {}\nweight {}\nalready primary: {}\nprimary: {}\n         = {}",
                        render_field(spec, &a),
                        res.weight,
                        if res.correction.is_empty() { "yes" } else { "no" },
                        corrected,
                        render_field(spec, &res.primary)
                    );
                    let json = json!({
                        "field": render_field(spec, &a),
                        "weight": res.weight,
                        "already_primary": res.correction.is_empty(),
                        "primary": corrected,
                        "primary_field": render_field(spec, &res.primary),
                    });
                    Ok(Outcome { text, json, passed: true })
                }
                Err(vertex_core::orbifold::OrbifoldError::NoPrimaryCorrection) => Ok(Outcome {
                    text: "no correction in the span of the generator words makes the field primary".into(),
                    json: json!({"field": render_field(spec, &a), "primary": null}),
                    passed: false,
                }),
                Err(e) => Err(usage(e)),
            }
        }
        Command::Span { algebra, gens, cutoff, involution, minimality } => {
            let (ctx, gens) = context_with_gens(algebra.as_deref(), &gens, &[])?;
            let eval = evaluator(&ctx, gens)?;
            let report = strong_span_check(&eval, cutoff, &involution).map_err(usage)?;
            let mut text = format!("{:>6} {:>6} {:>6} {:>8}  status\n", "weight", "words", "rank", "ambient");
            for r in &report.rows {
                let status = match &r.witness {
                    None => "full".to_string(),
                    Some(w) => format!("deficient (missing {w})"),
                };
                text.push_str(&format!("{:>6} {:>6} {:>6} {:>8}  {status}\n", r.weight, r.words, r.rank, r.ambient));
            }
            let mut passed = report.full();
            let mut json = json!({"report": report});
            if minimality {
                let drops = minimality_witnesses(&ctx.engine, eval.alphabet(), cutoff, &involution).map_err(usage)?;
                let mut rows = Vec::new();
                for (label, row) in drops {
                    match &row {
                        Some(r) => text.push_str(&format!(
                            "without {label}: deficient at weight {} (missing {})\n",
                            r.weight,
                            r.witness.as_deref().unwrap_or("?")
                        )),
                        None => {
                            passed = false;
                            text.push_str(&format!("without {label}: still spans through weight {cutoff}\n"));
                        }
                    }
                    rows.push(json!({"dropped": label, "deficiency": row}));
                }
                json["minimality"] = serde_json::Value::Array(rows);
            }
            Ok(Outcome { text, json, passed })
        }
        Command::Poles { algebra, gens, reduced, entries } => {
            let (ctx, gens) = match (algebra.as_str(), gens) {
                ("sl2", None) => {
                    let set = builtin_generators("sl2")?;
                    (Context::new(set.spec), set.gens)
                }
                (a, Some(g)) => context_with_gens(Some(a), &g, &[])?,
                (a, None) => return Err(CliError::Usage(format!("--gens is required for `{a}`"))),
            };
            let eval = evaluator(&ctx, gens)?;
            let report = match reduced {
                Some(rounds) => reduced_structure_constants(&eval, rounds),
                None => structure_constants(&eval),
            }
            .map_err(usage)?;
            let record = report.record(eval.alphabet());
            let braces = |v: &[String]| format!("{{{}}}", v.join(", "));
            let forced: Vec<String> = report.forced_poles().into_iter().collect();
            let mut text = format!("generators: {}\n", record.generators.join(", "));
            if entries {
                for e in &record.entries {
                    let expr = e.terms.iter().map(|(w, c)| format!("({c})*{w}")).collect::<Vec<_>>().join(" + ");
                    text.push_str(&format!("{} ∘{} {} = {expr}\n", e.a, e.n, e.b));
                }
            }
            text.push_str(&format!("structure constants: {} nonzero products\n", record.entries.len()));
            text.push_str(&format!("poles: {}\n", braces(&record.poles)));
            text.push_str(&format!("irreducible residual: {}\n", braces(&record.residual)));
            text.push_str(&format!("forced (words lose rank): {}\n", braces(&forced)));
            for d in &record.rank_drops {
                text.push_str(&format!(
                    "rank drop: weight {} at k = {} ({} -> {})\n",
                    d.weight, d.k, d.generic_rank, d.rank
                ));
            }
            let mut json = serde_json::to_value(&record).expect("records serialize");
            json["forced"] = json!(forced);
            Ok(Outcome { text, json, passed: true })
        }
        Command::Verify { suite, cutoff, k0 } => {
            let k0 = parse_rational(&k0).ok_or_else(|| CliError::Usage(format!("--k0 `{k0}` is not a rational")))?;
            let report = suites::run(&suite, cutoff, &k0)?;
            Ok(Outcome { text: report.text(), json: report.json(), passed: report.passed() })
        }
        Command::Limit { algebra } => {
            let spec = load_algebra(&algebra)?;
            let report = large_level_limit(&spec).map_err(usage)?;
            let mut text = String::new();
            for e in &report.entries {
                text.push_str(&format!(
                    "{} ∘{} {} [{}]: {} * k^({}/2) -> {}\n",
                    e.a, e.n, e.b, e.term, e.coefficient, e.half_exponent, e.limit
                ));
            }
            text.push_str(&format!(
                "limit matches the Gram table: {}\n\n{}",
                if report.matches_gram { "yes" } else { "no" },
                AlgebraDocument::from_spec(&report.limit).render()
            ));
            let json = json!({
                "entries": report.entries,
                "matches_gram": report.matches_gram,
                "limit": AlgebraDocument::from_spec(&report.limit).render(),
            });
            Ok(Outcome { text, json, passed: report.matches_gram })
        }
        Command::Show { algebra } => {
            let text = AlgebraDocument::from_spec(&load_algebra(&algebra)?).render();
            Ok(Outcome { json: json!({"text": text}), text, passed: true })
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn binary(
    o: Operands,
    f: impl FnOnce(&Context, &vertex_core::Field, &vertex_core::Field) -> (String, serde_json::Value),
) -> Result<Outcome, CliError> {
    let mut ctx = Context::new(load_algebra(&o.algebra)?);
    ctx.define_all(&o.lets)?;
    let a = ctx.eval(&o.a)?;
    let b = ctx.eval(&o.b)?;
    let (text, json) = f(&ctx, &a, &b);
    Ok(Outcome { text, json, passed: true })
}

fn evaluator(ctx: &Context, gens: Vec<(String, vertex_core::Field)>) -> Result<WordEvaluator<'_>, CliError> {
    let alphabet = Alphabet::new(&ctx.engine, gens).map_err(usage)?;
    Ok(WordEvaluator::new(&ctx.engine, alphabet))
}

fn default_virasoro(ctx: &Context) -> Result<vertex_core::Field, CliError> {
    if let Some(l) = &ctx.spec().conformal_vector {
        return Ok(l.clone());
    }
    if ctx.spec().name().starts_with("heisenberg") {
        return Ok(vertex_core::algebras::heisenberg_virasoro(&ctx.engine));
    }
    vertex_core::algebras::sugawara(&ctx.engine).map_err(usage)
}
