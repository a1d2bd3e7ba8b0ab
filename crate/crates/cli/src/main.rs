//! `nla`: analyses of n-matrices, Markov n-chains and Leontief n-models
//! stored in the `nmatrix v1` / `nvector v1` / `nmap v1` text formats.
//!
//! Exit status is 0 on success, 1 on a domain error and 2 on a usage or
//! parse error.

mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nla_core::format::ParseOptions;
use nla_core::markov::Convention;
use serde_json::{json, Value};

use commands::{Command, Ctx, Failure, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Row,
    Column,
}

#[derive(Debug, Parser)]
#[command(name = "nla", version, about = "Linear algebra on n-vector spaces")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Comparison tolerance for real fields.
    #[arg(long, env = "NLA_TOLERANCE", global = true)]
    tolerance: Option<f64>,
    /// Stochastic convention for chain files without a `convention` line.
    #[arg(long, value_enum, global = true)]
    convention: Option<ConventionArg>,
    /// Require pairwise distinct component dimensions in nvector files.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, global = true)]
    strict_dims: bool,
    /// Process components in parallel.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

fn error_block(verb: &str, failure: &Failure) -> (u8, Value, String) {
    match failure {
        Failure::Usage(msg) => (
            2,
            json!({ "v": 1, "command": verb, "error": { "kind": "usage", "name": "Usage", "message": msg } }),
            format!("error[Usage]: {msg}\n"),
        ),
        Failure::Parse { path, error } => (
            2,
            json!({ "v": 1, "command": verb, "error": {
                "kind": "parse",
                "name": error.name(),
                "file": path,
                "line": error.line(),
                "message": error.to_string(),
            }}),
            format!("error[{}]: {path}: {error}\n", error.name()),
        ),
        Failure::Domain(e) => (
            1,
            json!({ "v": 1, "command": verb, "error": {
                "kind": "domain",
                "name": e.name(),
                "component": e.component().map(|c| c + 1),
                "message": e.to_string(),
            }}),
            format!("error[{}]: {e}\n", e.name()),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let tolerance = cli.tolerance.unwrap_or(nla_core::field::DEFAULT_TOLERANCE);
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        eprintln!("error[Usage]: invalid tolerance {tolerance}");
        return ExitCode::from(2);
    }
    nla_core::exec::set_parallel(cli.parallel);
    let ctx = Ctx {
        opts: ParseOptions {
            tolerance,
            strict_dims: cli.strict_dims,
        },
        convention: cli.convention.map(|c| match c {
            ConventionArg::Row => Convention::Row,
            ConventionArg::Column => Convention::Column,
        }),
    };
    let verb = cli.command.verb();
    let mut stdout = std::io::stdout().lock();
    match commands::run(&ctx, &cli.command) {
        Ok(Report { text, json }) => {
            let out = match cli.format {
                Format::Text => text,
                Format::Json => {
                    let doc = json!({ "v": 1, "command": verb, "result": json });
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&doc).expect("JSON values serialize")
                    )
                }
            };
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let (code, doc, text) = error_block(verb, &failure);
            match cli.format {
                Format::Text => eprint!("{text}"),
                Format::Json => {
                    let _ = writeln!(
                        stdout,
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("JSON values serialize")
                    );
                }
            }
            ExitCode::from(code)
        }
    }
}
