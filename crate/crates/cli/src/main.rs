//! `treehide`: generate rule-driven datasets, induce trees, hide leaves and
//! check the result.
//!
//! Exit status is 0 on success, 1 on a domain or I/O failure (including a
//! rule that `verify` finds still induced) and 2 on a usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use treehide::dataset::{generate, parse_csv, parse_rules, write_csv};
use treehide::hiding::{hide, Request};
use treehide::induction::{extract_rules, similarity, NodePath, Rule};
use treehide::oracle::verify_hidden;
use treehide::{induce, per_leaf_cost, Dataset, DecisionTree, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "treehide",
    version,
    about = "Hide decision-tree rules by dataset augmentation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a CSV dataset from a rule file.
    Generate {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce a tree and print it as JSON.
    Induce {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print one rule per leaf, left to right.
    Rules { input: PathBuf },
    /// Hide the selected leaves; write the sanitized CSV and print the report.
    Hide {
        input: PathBuf,
        /// Leaf path such as `A1=t/A3=f`; repeat for a grouped request.
        #[arg(long = "leaf", required = true, num_args = 1)]
        leaves: Vec<String>,
        #[command(flatten)]
        knobs: Knobs,
        /// Sanitized CSV goes here; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report JSON goes here; stdout when absent (after the CSV, if both
        /// go to stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Hide every leaf on its own and tabulate the growth.
    CostReport {
        input: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Structural similarity of two tree JSON files.
    Compare { first: PathBuf, second: PathBuf },
    /// Check that a rule is absent from the tree induced on sanitized data.
    Verify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        sanitized: PathBuf,
        /// Rule such as `A1=t/A3=f:n`.
        #[arg(long)]
        rule: String,
    },
}

#[derive(Debug, Args)]
struct Knobs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `hold_back` or `even_split`.
    #[arg(long, default_value_t = Strategy::HoldBack)]
    strategy: Strategy,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: treehide::Error },
    #[error(transparent)]
    Domain(#[from] treehide::Error),
    #[error("rule `{0}` is still induced")]
    StillInduced(String),
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Read {
        path: path.to_owned(),
        source,
    })
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> treehide::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|source| Failure::Input {
        path: path.to_owned(),
        source,
    })
}

fn load_csv(path: &Path) -> Result<Dataset, Failure> {
    load(path, parse_csv)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Failure::Write {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| Failure::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate {
            rules,
            count,
            seed,
            out,
        } => {
            let rules = load(&rules, parse_rules)?;
            emit(out.as_deref(), &write_csv(&generate(&rules, count, seed)?))
        }
        Command::Induce { input, out } => {
            let tree = induce(&load_csv(&input)?)?;
            emit(out.as_deref(), &with_newline(tree.to_json()))
        }
        Command::Rules { input } => {
            let tree = induce(&load_csv(&input)?)?;
            let text: String = extract_rules(&tree)
                .iter()
                .map(|r| format!("{}\n", r.render(tree.schema())))
                .collect();
            emit(None, &text)
        }
        Command::Hide {
            input,
            leaves,
            knobs,
            out,
            report,
        } => {
            let ds = load_csv(&input)?;
            let requests = leaves
                .iter()
                .map(|p| NodePath::parse(ds.schema(), p).map(Request::Path))
                .collect::<treehide::Result<Vec<_>>>()?;
            let outcome = hide(&ds, &requests, knobs.strategy, knobs.seed)?;
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
            emit(out.as_deref(), &write_csv(&outcome.sanitized))?;
            emit(report.as_deref(), &with_newline(outcome.report.to_json(ds.schema())))
        }
        Command::CostReport { input, knobs, json } => {
            let table = per_leaf_cost(&load_csv(&input)?, knobs.strategy, knobs.seed)?;
            let text = if json {
                let rows: Vec<_> = table
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "rule": r.rule.render(&table.schema),
                            "depth": r.depth,
                            "added": r.added,
                            "growthRatio": r.growth_ratio,
                            "hidden": r.hidden,
                            "note": r.note,
                        })
                    })
                    .collect();
                let doc = json!({"rows": rows, "mean": table.mean, "min": table.min, "max": table.max});
                with_newline(serde_json::to_string_pretty(&doc).expect("cost table serializes"))
            } else {
                table.to_string()
            };
            emit(None, &text)
        }
        Command::Compare { first, second } => {
            let a = load(&first, DecisionTree::from_json)?;
            let b = load(&second, DecisionTree::from_json)?;
            emit(None, &format!("{:.6}\n", similarity(&a, &b)?))
        }
        Command::Verify {
            original,
            sanitized,
            rule,
        } => {
            let original = load_csv(&original)?;
            let sanitized = load_csv(&sanitized)?;
            let parsed = Rule::parse(original.schema(), &rule)?;
            if verify_hidden(&original, &sanitized, &parsed)? {
                emit(None, "pass\n")
            } else {
                emit(None, "fail\n")?;
                Err(Failure::StillInduced(rule))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
