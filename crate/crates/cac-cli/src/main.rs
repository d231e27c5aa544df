//! `cac` — conflict-avoiding codes of odd prime length and weight 3.
//!
//! Exit codes: 0 on success, 1 on usage/input/file errors, 2 when a
//! mathematical verification fails (a conflicting code, a failed scan).

mod format;
mod output;
mod scan;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cac_core::chansim::random_trials;
use cac_core::codes::{construct_with_limit, known_optimal_size, m_e, upper_bound, verify,
                      Verification, DEFAULT_SEARCH_LIMIT};
use cac_core::cyclotomic::cyclotomic_matrix;
use cac_core::oracle::exhaustive_max_cac;
use cac_core::squares::square_set;
use cac_core::{Error, GroupContext};
use clap::{Parser, Subcommand};
use serde_json::Value;

use output::{jnum, object, render};

/// Codeword lists longer than this are omitted from `squares` output.
const MEMBER_CAP: usize = 1024;

#[derive(Parser)]
#[command(name = "cac", version, about = "Conflict-avoiding codes of prime length, weight 3")]
struct Cli {
    /// Emit compact single-line JSON instead of pretty-printed JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group structure, size formulas and the known optimum for a prime.
    Analyze { p: u64 },
    /// The ell x ell cyclotomic matrix.
    Matrix {
        p: u64,
        /// Primitive root to use instead of the smallest one.
        #[arg(long)]
        root: Option<u64>,
    },
    /// The squares of 1 + g^k L.
    Squares { p: u64, k: usize },
    /// Build the code for p and emit it in the cac-v1 format.
    Construct {
        p: u64,
        /// Write the code here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Node budget for the fallback triple search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT)]
        limit: u64,
    },
    /// Check the conflict-avoiding property of a cac-v1 file.
    Verify { file: PathBuf },
    /// Exhaustive maximum code size (p <= 40) with a witness.
    Oracle { p: u64 },
    /// Collision-channel simulation of a cac-v1 file.
    Simulate {
        file: PathBuf,
        /// Number of simultaneously active users.
        #[arg(long, default_value_t = 3)]
        active: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan a prime range, verifying the selected check suites.
    Scan {
        /// Inclusive range, e.g. 5..500.
        #[arg(long)]
        range: String,
        /// "all" or a comma-separated subset of
        /// group,matrix,squares,roots,construct,oracle.
        #[arg(long, default_value = "all")]
        checks: String,
        /// JSONL record file; an existing file is resumed, not rescanned.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failures carrying their exit code.
enum Failure {
    /// Bad input, unusable file, unsupported scale: exit 1.
    Input(String),
    /// The mathematics did not check out: exit 2.
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => Failure::Math(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reserves exit code 2; this tool uses 1 for usage errors.
            let rendered = e.render();
            if e.use_stderr() {
                eprint!("{rendered}");
                return ExitCode::from(1);
            }
            print!("{rendered}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, v: &Value) {
    println!("{}", render(v, cli.json));
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Analyze { p } => {
            let ctx = GroupContext::new(*p)?;
            let mut fields = vec![
                ("L_order", jnum(ctx.subgroup_order)),
                ("O_p", jnum(ctx.big_o)),
                ("ell", jnum(ctx.ell)),
                ("m_e", jnum(m_e(&ctx))),
                ("o_p_2", jnum(ctx.order_of_2)),
                ("p", jnum(*p)),
                ("primitive_root", jnum(ctx.primitive_root)),
                ("upper_bound", jnum(upper_bound(&ctx))),
            ];
            if let Some((size, case)) = known_optimal_size(&ctx) {
                fields.push(("known_optimal", jnum(size)));
                fields.push(("rationale", Value::String(case.to_string())));
            }
            emit(cli, &object(fields));
            Ok(())
        }
        Command::Matrix { p, root } => {
            let ctx = GroupContext::new(*p)?;
            let g = root.unwrap_or(ctx.primitive_root);
            let m = cyclotomic_matrix(&ctx, g)?;
            let rows: Vec<Value> = m
                .rows()
                .into_iter()
                .map(|r| Value::Array(r.into_iter().map(jnum).collect()))
                .collect();
            emit(
                cli,
                &object(vec![
                    ("ell", jnum(ctx.ell)),
                    ("g", jnum(g)),
                    ("p", jnum(*p)),
                    ("rows", Value::Array(rows)),
                ]),
            );
            Ok(())
        }
        Command::Squares { p, k } => {
            let ctx = GroupContext::new(*p)?;
            let s = square_set(&ctx, *k)?;
            let mut fields = vec![
                ("count", jnum(s.members.len() as u64)),
                ("k", jnum(*k as u64)),
                ("p", jnum(*p)),
            ];
            if s.members.len() <= MEMBER_CAP {
                fields.push((
                    "members",
                    Value::Array(s.members.iter().map(|&m| jnum(m)).collect()),
                ));
            }
            emit(cli, &object(fields));
            Ok(())
        }
        Command::Construct { p, out, limit } => {
            let code = construct_with_limit(*p, *limit)?;
            let doc = format::code_to_json(&code);
            match out {
                Some(path) => {
                    std::fs::write(path, format!("{doc}\n"))?;
                    emit(
                        cli,
                        &object(vec![
                            ("optimal", Value::Bool(code.meta.optimal)),
                            ("out", Value::String(path.display().to_string())),
                            ("p", jnum(*p)),
                            ("size", jnum(code.size() as u64)),
                        ]),
                    );
                }
                None => emit(cli, &doc),
            }
            Ok(())
        }
        Command::Verify { file } => {
            let code = load_code(file)?;
            match verify(&code)? {
                Verification::Ok => {
                    emit(
                        cli,
                        &object(vec![
                            ("p", jnum(code.p)),
                            ("size", jnum(code.size() as u64)),
                            ("verified", Value::Bool(true)),
                        ]),
                    );
                    Ok(())
                }
                Verification::Conflict(c) => {
                    emit(
                        cli,
                        &object(vec![
                            ("conflict", object(vec![
                                ("difference", jnum(c.difference)),
                                ("first", jnum(c.first as u64)),
                                ("second", jnum(c.second as u64)),
                            ])),
                            ("p", jnum(code.p)),
                            ("verified", Value::Bool(false)),
                        ]),
                    );
                    Err(Failure::Math(format!(
                        "codewords {} and {} share difference {}",
                        c.first, c.second, c.difference
                    )))
                }
            }
        }
        Command::Oracle { p } => {
            let (max, witness) = exhaustive_max_cac(*p)?;
            let mut words: Vec<[u64; 3]> = witness.codewords.iter().map(|w| w.elems()).collect();
            words.sort_unstable();
            emit(
                cli,
                &object(vec![
                    ("max", jnum(max)),
                    ("p", jnum(*p)),
                    (
                        "witness",
                        Value::Array(
                            words
                                .iter()
                                .map(|w| Value::Array(w.iter().map(|&e| jnum(e)).collect()))
                                .collect(),
                        ),
                    ),
                ]),
            );
            Ok(())
        }
        Command::Simulate {
            file,
            active,
            trials,
            seed,
        } => {
            let code = load_code(file)?;
            let stats = random_trials(&code, *active, *trials, *seed)?;
            emit(
                cli,
                &object(vec![
                    ("active", jnum(*active as u64)),
                    ("p", jnum(code.p)),
                    ("seed", jnum(*seed)),
                    ("success_rate", Value::from(stats.success_rate())),
                    ("successes", jnum(stats.successes)),
                    ("trials", jnum(*trials)),
                ]),
            );
            Ok(())
        }
        Command::Scan { range, checks, out } => {
            let (lo, hi) = parse_range(range).map_err(Failure::Input)?;
            let checks = scan::parse_checks(checks).map_err(Failure::Input)?;
            let outcome = scan::scan_range(lo, hi, &checks, out.as_deref())?;
            if out.is_none() {
                for r in &outcome.records {
                    emit(cli, &r.value);
                }
            }
            emit(
                cli,
                &object(vec![
                    ("failed", jnum(outcome.failed.len() as u64)),
                    ("range", Value::String(format!("{lo}..{hi}"))),
                    ("scanned", jnum(outcome.scanned as u64)),
                    ("skipped_existing", jnum(outcome.skipped_existing as u64)),
                ]),
            );
            if outcome.failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Math(format!(
                    "checks failed for {:?}",
                    outcome.failed
                )))
            }
        }
    }
}

fn load_code(path: &Path) -> Result<cac_core::codes::Code, Failure> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    format::code_from_json(&value).map_err(Failure::Input)
}

fn parse_range(spec: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = spec
        .split_once("..")
        .ok_or_else(|| format!("range {spec:?} is not of the form a..b"))?;
    let lo: u64 = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: u64 = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {spec:?}"));
    }
    Ok((lo, hi))
}
