//! `minones`: batch front end for classification, kernelization, solving,
//! gadget construction and the Exact Hitting Set reduction.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or unparseable input,
//! 3 precondition not met, 4 internal contract violated.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "minones", version, about = "Min Ones constraint languages: classify, kernelize, solve")]
pub struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide the verdict for a language.
    Classify {
        #[arg(long)]
        language: Option<PathBuf>,
    },
    /// Kernelize an instance over a mergeable language.
    Kernelize {
        #[arg(long)]
        language: Option<PathBuf>,
        #[arg(long)]
        instance: PathBuf,
        /// Weight budget; defaults to the instance header.
        #[arg(short)]
        k: Option<usize>,
        /// Write the kernel here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide whether an instance has a solution of weight at most k.
    Solve {
        #[arg(long)]
        language: Option<PathBuf>,
        #[arg(long)]
        instance: PathBuf,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Method::Branch)]
        method: Method,
    },
    /// Properties and operators of the relations of a language.
    Relation {
        #[arg(long)]
        language: Option<PathBuf>,
        /// Only this relation.
        #[arg(long)]
        name: Option<String>,
        /// 1-based core positions for the sunflower restriction.
        #[arg(long, value_delimiter = ',')]
        core: Option<Vec<usize>>,
    },
    /// Constant, equality and selection gadgets of a language.
    Gadget {
        #[arg(long)]
        language: Option<PathBuf>,
        #[arg(short, default_value_t = 1)]
        k: usize,
        /// Also build a selection formula over this many variables.
        #[arg(long)]
        n: Option<usize>,
        /// Write the selection formula here.
        #[arg(long, requires = "n")]
        output: Option<PathBuf>,
    },
    /// Reduce an Exact Hitting Set instance to Min Ones over a language.
    ReduceEhs {
        #[arg(long)]
        language: Option<PathBuf>,
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Branch,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(msg: impl Into<String>) -> Self {
        Self { code: 2, message: msg.into() }
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Self { code: 3, message: msg.into() }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Self { code: 4, message: msg.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
