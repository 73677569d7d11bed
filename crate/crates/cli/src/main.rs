//! `tpp`: check, dualize, decompose and extend maps preserving the trace of
//! products. Every run prints one JSON document on stdout.
//!
//! Exit codes: 0 pass, 1 fail (the maps do not satisfy what was asked),
//! 2 error (bad flags or input).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use trace_product::decompose::weighted::{reduce_weighted, verify_weighted};
use trace_product::decompose::{decompose, DecompositionResult};
use trace_product::extend::{check_preservation_seeded, dualize, embed_extend_pair, infeasibility_certificate, Mode};
use trace_product::families::{gen_canonical, Family, GenSpec};
use trace_product::io::{load_maps, load_power_maps};
use trace_product::{Error, Field, Kind, LinMap, SpaceTag};

#[derive(Parser)]
#[command(name = "tpp", version, about = "Maps preserving the trace of matrix products")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9, allow_hyphen_values = true, value_parser = positive_f64)]
    tol: f64,
    /// Random tuples for randomized checks.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Space kind, e.g. Hermitian or PosDef.
    #[arg(long, global = true, value_parser = parse_kind)]
    space: Option<Kind>,
    /// Number of maps.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// real or complex.
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<Field>,
}

#[derive(Args)]
struct Input {
    /// JSON maps document; `-` or omitted reads standard input.
    #[arg(long)]
    maps: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Test the identity over basis tuples or random samples.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "exhaustive", value_parser = ["exhaustive", "randomized"])]
        mode: String,
    },
    /// The dual of a bijection under the trace pairing.
    Dualize {
        #[command(flatten)]
        input: Input,
    },
    /// Recover canonical parameters from a preserving tuple.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Extend a preserving pair M_n -> M_k to bijections of M_k.
    Extend {
        #[command(flatten)]
        input: Input,
    },
    /// Rank certificate that a pair M_n -> M_k, n > k, cannot preserve the pairing.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Seeded instance of a family.
    Generate {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e3, value_parser = positive_f64)]
        condition_bound: f64,
        /// Put Hermitian or real symmetric chains on positive definite matrices.
        #[arg(long)]
        positive: bool,
        /// Transpose branch for PnPair.
        #[arg(long)]
        transpose: bool,
    },
    /// Randomized check of the weighted identity on positive definite matrices.
    Weighted {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta: Vec<f64>,
        /// Print the reduced maps instead of the report.
        #[arg(long)]
        reduce: bool,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn from_name<T: serde::de::DeserializeOwned>(s: &str, what: &str, names: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| format!("unknown {what} {s:?}; expected one of {names}"))
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    from_name(s, "space", "FullMatrix, Hermitian, Symmetric, Diagonal, PosDef, PosSemiDef")
}

fn parse_field(s: &str) -> Result<Field, String> {
    from_name(s, "field", "real, complex")
}

fn parse_family(s: &str) -> Result<Family, String> {
    let names: Vec<String> = Family::ALL.iter().map(|f| format!("{f:?}")).collect();
    from_name(s, "family", &names.join(", "))
}

/// A failure reported as `{code, message, context}`.
struct Failure {
    exit: u8,
    code: String,
    message: String,
    context: Value,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { exit: 2, code: "usage".into(), message: message.into(), context: json!({}) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let context = match &e {
            Error::NotInSpace { space, deviation } => json!({ "space": space, "deviation": deviation }),
            Error::Singular { what, condition } => json!({ "what": what, "condition": condition }),
            Error::Precondition { residual, .. } => json!({ "residual": residual }),
            Error::RankDeficient { rank, required } => json!({ "rank": rank, "required": required }),
            Error::Inconsistent { sample, residual } => json!({ "sample": sample, "residual": residual }),
            Error::Infeasible(cert) => json!({ "certificate": cert }),
            _ => json!({}),
        };
        // Errors that describe the maps rather than the input count as a failed check.
        let exit = match e {
            Error::Precondition { .. } | Error::TheoremViolated(_) | Error::Infeasible(_) | Error::Inconsistent { .. } => 1,
            _ => 2,
        };
        Failure { exit, code: e.code().into(), message: e.to_string(), context }
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn emit<T: Serialize>(v: &T, pass: bool) -> Outcome {
    let v = serde_json::to_value(v).map_err(|e| Failure::usage(format!("cannot serialize output: {e}")))?;
    Ok((v, pass))
}

fn read_input(input: &Input) -> Result<String, Failure> {
    let io_err = |e: io::Error| Failure {
        exit: 2,
        code: "io".into(),
        message: e.to_string(),
        context: json!({ "path": input.maps.as_ref().map(|p| p.display().to_string()) }),
    };
    match &input.maps {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(io_err),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(io_err)?;
            Ok(s)
        }
    }
}

/// Load maps, applying `--m` as a count check and `--space`/`--field` as a
/// retagging (same span) or restriction (smaller span).
fn maps_for(input: &Input, common: &Common) -> Result<Vec<LinMap>, Failure> {
    let mut maps = load_maps(&read_input(input)?)?;
    if let Some(m) = common.m {
        if m != maps.len() {
            return Err(Failure::usage(format!("--m {m} given but the input has {} maps", maps.len())));
        }
    }
    if common.space.is_some() || common.field.is_some() {
        maps = maps
            .into_iter()
            .map(|f| {
                let tag = |s: SpaceTag| SpaceTag::new(common.space.unwrap_or(s.kind), common.field.unwrap_or(s.field), s.n);
                let (d, c) = (tag(f.domain()), tag(f.codomain()));
                if d.same_span(&f.domain()) && c.same_span(&f.codomain()) {
                    f.retag(d, c)
                } else {
                    f.restrict(d, c)
                }
            })
            .collect::<trace_product::Result<_>>()?;
    }
    Ok(maps)
}

fn pair(maps: Vec<LinMap>) -> Result<(LinMap, LinMap), Failure> {
    match <[LinMap; 2]>::try_from(maps) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => Err(Failure::usage(format!("expected a pair of maps, got {}", v.len()))),
    }
}

fn run(cli: Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Check { input, mode } => {
            let maps = maps_for(input, c)?;
            let mode = match mode.as_str() {
                "randomized" => Mode::Randomized { trials: c.trials as usize, seed: c.seed },
                _ => Mode::Exhaustive,
            };
            let report = check_preservation_seeded(&maps, c.tol, mode, c.seed)?;
            emit(&report, report.pass)
        }
        Command::Dualize { input } => {
            let maps = maps_for(input, c)?;
            let [phi] = <[LinMap; 1]>::try_from(maps)
                .map_err(|v| Failure::usage(format!("dualize takes one map, got {}", v.len())))?;
            emit(&dualize(&phi, c.tol)?, true)
        }
        Command::Decompose { input } => {
            let maps = maps_for(input, c)?;
            let res: DecompositionResult = decompose(&maps, c.tol)?;
            emit(&res, true)
        }
        Command::Extend { input } => {
            let (a, b) = pair(maps_for(input, c)?)?;
            let (e1, e2) = embed_extend_pair(&a, &b, c.tol)?;
            emit(&json!({ "maps": [e1, e2] }), true)
        }
        Command::Certify { input, n, k } => {
            let (a, b) = pair(maps_for(input, c)?)?;
            for (flag, want, got) in [("--n", n, a.domain().n), ("--k", k, a.codomain().n)] {
                if want.is_some_and(|w| w != got) {
                    return Err(Failure::usage(format!("{flag} {} given but the maps have {got}", want.unwrap())));
                }
            }
            let cert = infeasibility_certificate(&a, &b)?;
            emit(&cert, cert.valid)
        }
        Command::Generate { family, n, condition_bound, positive, transpose } => {
            let m = c.m.unwrap_or(match family {
                Family::MnChain | Family::DiagChain | Family::HermOdd | Family::SymOdd | Family::NonextendableTriple => 3,
                Family::HermEven => 4,
                Family::SymEven if !*positive => 4,
                _ => 2,
            });
            let spec = GenSpec {
                family: *family,
                n: *n,
                m,
                field: c.field.unwrap_or(Field::Complex),
                seed: c.seed,
                condition_bound: *condition_bound,
                positive: *positive,
                transpose: *transpose,
            };
            emit(&gen_canonical(&spec)?, true)
        }
        Command::Weighted { input, alpha, beta, reduce } => {
            let maps = load_power_maps(&read_input(input)?)?;
            if *reduce {
                return emit(&json!({ "maps": reduce_weighted(&maps, alpha, beta)? }), true);
            }
            let report = verify_weighted(&maps, alpha, beta, c.tol, c.trials as usize, c.seed)?;
            emit(&report, report.pass)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { .. } => "check",
        Command::Dualize { .. } => "dualize",
        Command::Decompose { .. } => "decompose",
        Command::Extend { .. } => "extend",
        Command::Certify { .. } => "certify",
        Command::Generate { .. } => "generate",
        Command::Weighted { .. } => "weighted",
    }
}

/// A closed pipe downstream is not an error worth reporting.
fn print_doc(v: &Value) {
    let _ = writeln!(io::stdout().lock(), "{v}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let kind = e.kind().to_string();
            let out = json!({ "code": "usage", "message": e.render().to_string().lines().next().unwrap_or(""), "context": { "kind": kind } });
            print_doc(&out);
            return ExitCode::from(2);
        }
    };
    let name = command_name(&cli.command);
    match run(cli) {
        Ok((v, pass)) => {
            print_doc(&v);
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(mut f) => {
            eprintln!("tpp {name}: {}", f.message);
            if let Value::Object(o) = &mut f.context {
                o.insert("command".into(), name.into());
            }
            print_doc(&json!({ "code": f.code, "message": f.message, "context": f.context }));
            ExitCode::from(f.exit)
        }
    }
}
