//! `infinialg`: batch front end for the finite i-algebra library.

mod commands;
mod inputs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{
    ColimitKind, Ctx, FixturesMode, FreeCloneMode, LimitKind, OracleArgs, OracleKind, Outcome,
    ValidateTarget,
};
use infinialg_core::corpus;
use infinialg_core::{Error, SearchBudget, DEFAULT_N_MAX};

#[derive(Parser)]
#[command(
    name = "infinialg",
    version,
    about = "Finite infinitesimal models of algebraic theories"
)]
struct Cli {
    /// Truncation arity for structures and clones built from generators.
    #[arg(long, global = true, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    /// Bound on brute-force enumerations and materialised tuple sets.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Verb {
    /// Check clone laws, i-structure and i-algebra axioms, or homomorphism conditions.
    Validate(ValidateArgs),
    /// Saturate a presentation, print the theory of a clone, or substitute terms.
    FreeClone(FreeCloneArgs),
    /// Products, equalizers, pullbacks, kernel pairs and regular epimorphisms.
    Limit {
        #[arg(value_enum)]
        kind: LimitArg,
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Initial object, coproducts, pushouts, coequalizers, quotients and image structures.
    Colimit {
        #[arg(value_enum)]
        kind: ColimitArg,
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Glue the charts of an atlas.
    Glue {
        #[arg(long)]
        atlas: PathBuf,
        /// An i-algebra the result must equal exactly.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Run the counterexample suite or write the fixture files.
    Fixtures {
        #[arg(long, value_enum, required_unless_present = "write")]
        run: Option<SuiteArg>,
        #[arg(long, conflicts_with = "run")]
        write: Option<PathBuf>,
    },
    /// Brute-force reference computations.
    Oracle {
        #[arg(value_enum)]
        kind: OracleArg,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Second algebra for `iso`.
        #[arg(long)]
        other: Option<PathBuf>,
        /// Clone reference or file for `round-trip`.
        #[arg(long)]
        clone: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ValidateArgs {
    /// Clone reference such as `affine(Z/4,3)`, or a clone JSON file.
    #[arg(long)]
    clone: Option<String>,
    #[arg(long)]
    presentation: Option<PathBuf>,
    #[arg(long)]
    istructure: Option<PathBuf>,
    #[arg(long)]
    ialgebra: Option<PathBuf>,
    /// A full action table on an indiscrete carrier.
    #[arg(long)]
    total: Option<PathBuf>,
    /// `{"source": A, "target": B, "map": [...]}` between i-algebras.
    #[arg(long)]
    hom: Option<PathBuf>,
    /// `{"source": S, "target": T, "map": [...]}` between i-structures.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    clone_hom: Option<PathBuf>,
}

#[derive(Args)]
struct FreeCloneArgs {
    #[arg(long, required_unless_present_any = ["theory_of", "gallery"])]
    presentation: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Print the presentation whose free clone is the given clone.
    #[arg(long, conflicts_with_all = ["presentation", "gallery"])]
    theory_of: Option<String>,
    /// Build a named clone directly.
    #[arg(long, conflicts_with = "presentation")]
    gallery: Option<String>,
    /// Substitute `--into` terms (separated by `;`) for the variables of this term.
    #[arg(long, requires = "presentation")]
    substitute: Option<String>,
    #[arg(long, requires = "substitute", value_delimiter = ';', num_args = 0..)]
    into: Vec<String>,
    /// Variables available to the `--into` terms.
    #[arg(long, default_value_t = 3)]
    vars: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitArg {
    Product,
    Equalizer,
    Pullback,
    KernelPair,
    RegularEpi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColimitArg {
    Initial,
    Coproduct,
    Pushout,
    Coequalizer,
    Quotient,
    Image,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Counterexamples,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Closure,
    SetCoequalizer,
    Iso,
    RoundTrip,
    KernelPair,
    NilSquare,
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Validate(_) => "validate",
        Verb::FreeClone(_) => "free-clone",
        Verb::Limit { .. } => "limit",
        Verb::Colimit { .. } => "colimit",
        Verb::Glue { .. } => "glue",
        Verb::Fixtures { .. } => "fixtures",
        Verb::Oracle { .. } => "oracle",
    }
}

fn dispatch(ctx: &Ctx, verb: &Verb) -> infinialg_core::Result<Outcome> {
    match verb {
        Verb::Validate(a) => {
            let target = if let Some(c) = &a.clone {
                ValidateTarget::Clone(c)
            } else if let Some(p) = &a.presentation {
                ValidateTarget::Presentation(p)
            } else if let Some(p) = &a.istructure {
                ValidateTarget::IStructure(p)
            } else if let Some(p) = &a.ialgebra {
                ValidateTarget::IAlgebra(p)
            } else if let Some(p) = &a.total {
                ValidateTarget::Total(p)
            } else if let Some(p) = &a.hom {
                ValidateTarget::Hom(p)
            } else if let Some(p) = &a.map {
                ValidateTarget::Map(p)
            } else if let Some(p) = &a.clone_hom {
                ValidateTarget::CloneHom(p)
            } else {
                return Err(Error::InvalidInput("nothing to validate".into()));
            };
            commands::validate(ctx, target)
        }
        Verb::FreeClone(a) => {
            let mode = match (&a.theory_of, &a.gallery, &a.presentation, &a.substitute) {
                (Some(r), _, _, _) => FreeCloneMode::TheoryOf(r),
                (_, Some(r), _, _) => FreeCloneMode::Gallery(r),
                (_, _, Some(p), Some(t)) => FreeCloneMode::Substitute {
                    path: p,
                    term: t,
                    into: &a.into,
                    vars: a.vars,
                },
                (_, _, Some(p), None) => FreeCloneMode::Presentation {
                    path: p,
                    depth: a.depth,
                },
                _ => return Err(Error::InvalidInput("nothing to build".into())),
            };
            commands::free_clone_cmd(ctx, mode)
        }
        Verb::Limit { kind, diagram } => {
            let kind = match kind {
                LimitArg::Product => LimitKind::Product,
                LimitArg::Equalizer => LimitKind::Equalizer,
                LimitArg::Pullback => LimitKind::Pullback,
                LimitArg::KernelPair => LimitKind::KernelPair,
                LimitArg::RegularEpi => LimitKind::RegularEpi,
            };
            commands::limit(ctx, kind, diagram)
        }
        Verb::Colimit { kind, diagram } => {
            let kind = match kind {
                ColimitArg::Initial => ColimitKind::Initial,
                ColimitArg::Coproduct => ColimitKind::Coproduct,
                ColimitArg::Pushout => ColimitKind::Pushout,
                ColimitArg::Coequalizer => ColimitKind::Coequalizer,
                ColimitArg::Quotient => ColimitKind::Quotient,
                ColimitArg::Image => ColimitKind::Image,
            };
            commands::colimit(ctx, kind, diagram)
        }
        Verb::Glue { atlas, compare } => commands::glue(ctx, atlas, compare.as_deref()),
        Verb::Fixtures { run, write } => match (run, write) {
            (_, Some(dir)) => commands::fixtures(FixturesMode::Write(dir)),
            _ => commands::fixtures(FixturesMode::Counterexamples),
        },
        Verb::Oracle {
            kind,
            input,
            other,
            clone,
            depth,
        } => {
            let kind = match kind {
                OracleArg::Closure => OracleKind::Closure,
                OracleArg::SetCoequalizer => OracleKind::SetCoequalizer,
                OracleArg::Iso => OracleKind::Iso,
                OracleArg::RoundTrip => OracleKind::RoundTrip,
                OracleArg::KernelPair => OracleKind::KernelPair,
                OracleArg::NilSquare => OracleKind::NilSquare,
            };
            let args = OracleArgs {
                input: input.as_deref(),
                other: other.as_deref(),
                clone: clone.as_deref(),
                depth: *depth,
            };
            commands::oracle_cmd(ctx, kind, args)
        }
    }
}

/// Variant name of an error, e.g. `LegNotReflecting`.
fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

fn render(format: Format, body: &Value, lines: &[String]) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(body).expect("plain data serialises") + "\n",
        Format::Text => lines.iter().map(|l| format!("{l}\n")).collect(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let budget = match cli.budget {
        None => Ok(SearchBudget::default()),
        Some(n) => SearchBudget::uniform(n),
    };
    let budget = match budget {
        Ok(b) => b,
        Err(e) => {
            eprintln!("infinialg: {e}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx {
        n_max: cli.n_max,
        budget,
    };
    let command = verb_name(&cli.verb);
    let meta = json!({
        "tool": "infinialg",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "n_max": ctx.n_max,
        "budget": ctx.budget,
        "seed": corpus::seed(),
    });

    let (code, body, lines) = match dispatch(&ctx, &cli.verb) {
        Ok(o) => {
            let status = if o.ok { "ok" } else { "failed" };
            let body = json!({
                "command": command,
                "status": status,
                "result": o.result,
                "meta": meta,
            });
            (u8::from(!o.ok), body, o.lines)
        }
        Err(e) => {
            let code = if e.is_input_error() { 2 } else { 1 };
            let kind = error_kind(&e);
            let reason = e.to_string();
            let body = json!({
                "command": command,
                "status": "error",
                "error": {"kind": kind, "reason": reason},
                "meta": meta,
            });
            (code, body, vec![format!("error: {reason}")])
        }
    };
    if let Err(e) = emit(cli.out.as_deref(), &render(cli.format, &body, &lines)) {
        eprintln!("infinialg: {e}");
        return ExitCode::from(2);
    }
    if code != 0 {
        if let Some(line) = lines.first() {
            if cli.out.is_some() || matches!(cli.format, Format::Json) {
                eprintln!("infinialg: {line}");
            }
        }
    }
    ExitCode::from(code)
}
