use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use timebin_sim::config::{self, ConfigError};
use timebin_sim::output::VERSION;
use timebin_sim::{load, run, Command};

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_CONSTRAINTS: u8 = 3;

/// Slow-light parametric pulse splitting simulator.
#[derive(Parser)]
#[command(name = "timebin-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Configuration file (TOML); overrides the preset when both are given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: `out_dir` from the config, else `.`].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Bundled parameter set.
    #[arg(long, global = true, value_parser = config::PRESETS)]
    preset: Option<String>,
    /// Ratio that turns a "much greater/less than" check into a pass.
    #[arg(long, global = true)]
    strictness: Option<f64>,
    /// Exit with success from `validate` even when a check fails.
    #[arg(long, global = true)]
    allow_invalid: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Check the operating-regime inequalities.
    Validate,
    /// Propagate the input pulse through the medium.
    Propagate,
    /// Propagate and split the output into time bins.
    Analyze,
    /// Scan the Bell combination of the two-mode Wigner function.
    BellScan,
    /// Propagate and analyze for each configured Omega / Gamma.
    Sweep,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Propagate => Command::Propagate,
            Cmd::Analyze => Command::Analyze,
            Cmd::BellScan => Command::BellScan,
            Cmd::Sweep => Command::Sweep,
        }
    }
}

fn fail(code: u8, kind: &str, message: String, line: Option<usize>) -> ExitCode {
    let mut error = json!({ "kind": kind, "message": message });
    if let Some(line) = line {
        error["line"] = json!(line);
    }
    eprintln!("{}", json!({ "version": VERSION, "error": error }));
    ExitCode::from(code)
}

fn config_error(e: ConfigError) -> ExitCode {
    fail(EXIT_CONFIG, e.kind(), e.to_string(), e.line())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(EXIT_CONFIG, "usage", e.to_string(), None),
    };

    if cli.config.is_none() && cli.preset.is_none() {
        return fail(
            EXIT_CONFIG,
            "usage",
            "one of --config or --preset is required".into(),
            None,
        );
    }
    let base = match cli.preset.as_deref().map(config::preset).transpose() {
        Ok(base) => base,
        Err(e) => return config_error(e),
    };
    let text = match cli.config.as_deref().map(config::read_file).transpose() {
        Ok(text) => text,
        Err(e) => return config_error(e),
    };
    let mut cfg = match load(base, text.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(e),
    };
    if let Some(s) = cli.strictness {
        if !(s >= 1.0 && s.is_finite()) {
            return fail(
                EXIT_CONFIG,
                "invalid-value",
                format!("--strictness must be >= 1, got {s}"),
                None,
            );
        }
        cfg.strictness = s;
    }

    let out_dir = cli
        .out_dir
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let outcome = match run(cli.command.into(), &cfg, cli.allow_invalid) {
        Ok(outcome) => outcome,
        Err(e) => return fail(EXIT_SOLVER, e.kind(), e.to_string(), None),
    };
    if let Err(e) = outcome.files.commit(&out_dir) {
        return fail(
            EXIT_SOLVER,
            "io",
            format!("cannot write to {}: {e}", out_dir.display()),
            None,
        );
    }
    if outcome.constraints_failed {
        return ExitCode::from(EXIT_CONSTRAINTS);
    }
    ExitCode::SUCCESS
}
