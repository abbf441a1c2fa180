mod commands;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use imd_core::flatness::FlatnessOptions;
use imd_core::reductions::ReductionSystem;
use serde_json::{json, Value};

use commands::{FlatnessMode, Outcome, Setup};
use error::{exit, CliError};

#[derive(Parser, Debug)]
#[command(name = "imd", version, about = "Exact checks for simply-laced isomonodromy systems and their quantisation")]
struct Cli {
    /// Graph description in JSON.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory receiving `<command>.json` and `report.json`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for the random-evaluation fallback.
    #[arg(long, global = true, default_value_t = FlatnessOptions::default().seed)]
    seed: u64,
    /// Largest symbolic bracket, in term products, before falling back.
    #[arg(long, global = true, default_value_t = FlatnessOptions::default().max_terms)]
    max_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One line of compact JSON on stdout.
    Json,
    /// Indented JSON on stdout.
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical and quantised potentials of every timed node.
    Potentials,
    /// Classical and quantum Hamiltonians of every timed node.
    Hamiltonians,
    /// Curl and commutator residues for every pair of Hamiltonians.
    CheckFlatness {
        #[arg(long, conflicts_with_all = ["quantum", "override_file"])]
        classical: bool,
        #[arg(long, conflicts_with = "override_file")]
        quantum: bool,
        /// Check user-supplied quantum Hamiltonians instead.
        #[arg(long = "override", value_name = "FILE")]
        override_file: Option<PathBuf>,
        /// Fail with a resource-limit error instead of evaluating at random points.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Named reduction systems and their moment-map comparisons.
    Reduce {
        #[arg(value_enum)]
        system: SystemArg,
        #[arg(long)]
        compare: bool,
    },
    /// Differential-operator form of one quantum Hamiltonian, applied to a polynomial.
    Diffop {
        #[arg(long)]
        node: usize,
        #[arg(long, value_name = "POLY")]
        apply: String,
    },
    /// Classification of intersecting pairs of Hamiltonian cycles.
    Intersections,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Kz,
    Dmt,
    Fmtv,
    Jmms,
}

impl SystemArg {
    fn system(self) -> ReductionSystem {
        match self {
            SystemArg::Kz => ReductionSystem::Kz,
            SystemArg::Dmt => ReductionSystem::Dmt,
            SystemArg::Fmtv => ReductionSystem::Fmtv,
            SystemArg::Jmms => ReductionSystem::Jmms,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Potentials => "potentials",
            Command::Hamiltonians => "hamiltonians",
            Command::CheckFlatness { .. } => "check-flatness",
            Command::Reduce { .. } => "reduce",
            Command::Diffop { .. } => "diffop",
            Command::Intersections => "intersections",
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    let setup = Setup::load(path)?;
    match &cli.command {
        Command::Potentials => commands::potentials(&setup),
        Command::Hamiltonians => commands::hamiltonians(&setup),
        Command::CheckFlatness { classical, quantum, override_file, no_fallback } => {
            let mode = match (classical, quantum) {
                (true, _) => FlatnessMode::Classical,
                (_, true) => FlatnessMode::Quantum,
                _ => FlatnessMode::Both,
            };
            let opts = FlatnessOptions {
                max_terms: cli.max_terms,
                seed: cli.seed,
                fallback: !no_fallback,
                ..FlatnessOptions::default()
            };
            commands::check_flatness(&setup, mode, override_file.as_deref(), &opts)
        }
        Command::Reduce { system, compare } => commands::reduce(&setup, system.system(), *compare),
        Command::Diffop { node, apply } => commands::diffop(&setup, *node, apply),
        Command::Intersections => commands::intersections(&setup),
    }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => value.to_string(),
        Format::Pretty => serde_json::to_string_pretty(value).expect("json values serialise"),
    }
}

fn write_artifact(dir: &Path, name: &str, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialise");
    text.push('\n');
    std::fs::write(dir.join(name), text)
        .map_err(|e| CliError::Other(format!("cannot write {name} in {}: {e}", dir.display())))
}

fn report(cli: &Cli, result: &Result<Outcome, CliError>) -> (Value, i32) {
    let base = json!({
        "command": cli.command.name(),
        "seed": cli.seed,
        "max_terms": cli.max_terms,
    });
    let mut report = base;
    let code = match result {
        Ok(outcome) => {
            let failed = outcome.assertions.iter().any(|a| !a.holds);
            report["assertions"] =
                outcome.assertions.iter().map(|a| json!({"name": a.name, "holds": a.holds})).collect();
            report["status"] = json!(if failed { "residue_nonzero" } else { "ok" });
            if failed {
                exit::RESIDUE
            } else {
                exit::OK
            }
        }
        Err(e) => {
            report["status"] = json!("error");
            report["error"] = e.to_json()["error"].clone();
            e.exit_code()
        }
    };
    report["exit_code"] = json!(code);
    (report, code)
}

fn run(cli: &Cli) -> i32 {
    let result = execute(cli);
    let (report, mut code) = report(cli, &result);
    match &result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", render(&outcome.artifact, cli.format));
        }
        Err(e) => eprintln!("{}", e.to_json()),
    }
    if let Some(dir) = &cli.out {
        let written = std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Other(format!("cannot create {}: {e}", dir.display())))
            .and_then(|_| match &result {
                Ok(outcome) => write_artifact(dir, &format!("{}.json", cli.command.name()), &outcome.artifact),
                Err(_) => Ok(()),
            })
            .and_then(|_| write_artifact(dir, "report.json", &report));
        if let Err(e) = written {
            eprintln!("{}", e.to_json());
            code = e.exit_code();
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    ExitCode::from(run(&cli) as u8)
}
