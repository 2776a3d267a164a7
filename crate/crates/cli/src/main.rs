mod mnist_cmd;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use genreason::engine::{parse_entailment, parse_query};
use genreason::formula::parse_knowledge_base;
use genreason::worlds::parse_worlds_csv;
use genreason::{
    entails_classical, entails_empirical, prob_conditional, prob_marginal, AtomUniverse, Dataset,
    Execution, MuMode, QueryResult,
};

use crate::mnist_cmd::MnistCommand;

/// Exit status for a defined probability or a successful run.
const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_UNDEFINED: u8 = 2;
const EXIT_NOT_ENTAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "genreason",
    version,
    about = "Data-driven probabilistic reasoning over propositional logic"
)]
struct Cli {
    /// Run batch scoring on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate `P(target)` or `P(target | e1; e2; ...)` against a worlds CSV.
    Prob(ProbArgs),
    /// Check `p1; p2; ... |- conclusion` classically or against data.
    Entail(EntailArgs),
    /// Digit prediction, learning curves, class images and completion.
    #[command(subcommand)]
    Mnist(MnistCommand),
}

#[derive(Debug, Args)]
struct ProbArgs {
    /// Worlds CSV: one 0/1 column per atom plus a `count` column.
    #[arg(long)]
    worlds: PathBuf,
    /// Knowledge base, one formula per line; added to the evidence.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// `exact1`, `limit`, or a decimal strictly between 0.5 and 1.
    #[arg(long, default_value = "limit")]
    mu: MuMode,
    query: String,
}

#[derive(Debug, Args)]
struct EntailArgs {
    /// Worlds CSV; required with --empirical, fixes the atoms otherwise.
    #[arg(long)]
    worlds: Option<PathBuf>,
    /// Knowledge base, one formula per line; added to the premises.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Compare possible models instead of all models.
    #[arg(long)]
    empirical: bool,
    query: String,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_worlds(path: &Path) -> Result<(AtomUniverse, Dataset)> {
    parse_worlds_csv(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_kb(path: Option<&Path>, universe: &mut AtomUniverse) -> Result<Vec<genreason::Formula>> {
    match path {
        None => Ok(Vec::new()),
        Some(p) => parse_knowledge_base(&read_text(p)?, universe)
            .with_context(|| format!("in {}", p.display())),
    }
}

/// Twelve significant digits with trailing zeros removed.
fn format_probability(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    let magnitude = p.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{p:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cmd_prob(args: &ProbArgs) -> Result<u8> {
    let (mut universe, ds) = load_worlds(&args.worlds)?;
    let mut evidence = load_kb(args.kb.as_deref(), &mut universe)?;
    let query = parse_query(&args.query, &mut universe).context("in query")?;
    evidence.extend(query.evidence);
    let result = if evidence.is_empty() {
        prob_marginal(&ds, &query.target, args.mu)?
    } else {
        prob_conditional(&ds, &query.target, &evidence, args.mu)?
    };
    match result {
        QueryResult::Undefined(reason) => {
            println!("undefined ({reason})");
            Ok(EXIT_UNDEFINED)
        }
        defined => {
            println!("{}", format_probability(defined.value().expect("defined")));
            Ok(EXIT_OK)
        }
    }
}

fn cmd_entail(args: &EntailArgs) -> Result<u8> {
    let (mut universe, ds) = match &args.worlds {
        Some(path) => {
            let (u, ds) = load_worlds(path)?;
            (u, Some(ds))
        }
        None => (AtomUniverse::extensible(), None),
    };
    let mut premises = load_kb(args.kb.as_deref(), &mut universe)?;
    let query = parse_entailment(&args.query, &mut universe).context("in query")?;
    premises.extend(query.premises);
    let holds = if args.empirical {
        let Some(ds) = &ds else {
            bail!("--empirical needs --worlds");
        };
        entails_empirical(ds, &premises, &query.conclusion)?
    } else {
        entails_classical(&premises, &query.conclusion, &universe)?
    };
    if holds {
        println!("entails");
        Ok(EXIT_OK)
    } else {
        println!("does-not-entail");
        Ok(EXIT_NOT_ENTAILED)
    }
}

fn run(cli: Cli) -> Result<u8> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Prob(args) => cmd_prob(args),
        Command::Entail(args) => cmd_entail(args),
        Command::Mnist(cmd) => mnist_cmd::run(cmd, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
