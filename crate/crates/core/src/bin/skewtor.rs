use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skewtor::report::{self, Format, Outcome, RunConfig};
use skewtor::{Error, ToleranceConfig};

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "skewtor", version, about = "Skew-torsion invariants and naturally reductive models in dimension <= 6")]
struct Cli {
    /// Coefficient tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Threshold for numerical rank and eigenvalue decisions.
    #[arg(long = "rank-tolerance", global = true, default_value_t = 1e-7)]
    rank_tolerance: f64,
    /// Seed for randomized frames and suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a 3-form given as multivector JSON.
    Classify { path: PathBuf },
    /// Check a model, Nomizu data, or a `catalog build` report.
    Verify { path: PathBuf },
    /// First Bianchi identity for {"T": ..., "R": ...}, classical and Clifford.
    Bianchi { path: PathBuf },
    /// List or build the built-in model families.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Randomized property suites.
    Suite {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Families with their parameters and constraints.
    List,
    /// Build one family and check it against its expected values.
    Build {
        name: String,
        /// key=value pairs
        #[arg(long = "param", num_args = 1..)]
        params: Vec<String>,
    },
}

fn read(path: &PathBuf) -> skewtor::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli, cfg: &RunConfig) -> skewtor::Result<Outcome> {
    match &cli.command {
        Command::Classify { path } => report::cmd_classify(&read(path)?, cfg),
        Command::Verify { path } => report::cmd_verify(&read(path)?, cfg),
        Command::Bianchi { path } => report::cmd_bianchi(&read(path)?, cfg),
        Command::Catalog(CatalogCmd::List) => report::cmd_catalog_list(cfg),
        Command::Catalog(CatalogCmd::Build { name, params }) => report::cmd_catalog_build(name, params, cfg),
        Command::Suite { samples } => report::cmd_suite(*samples, cfg),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Verify { .. } => "verify",
        Command::Bianchi { .. } => "bianchi",
        Command::Catalog(CatalogCmd::List) => "catalog list",
        Command::Catalog(CatalogCmd::Build { .. }) => "catalog build",
        Command::Suite { .. } => "suite",
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> bool {
    match output {
        Some(p) => match std::fs::write(p, text) {
            Ok(()) => true,
            Err(e) => {
                eprintln!("skewtor: cannot write {}: {e}", p.display());
                false
            }
        },
        None => {
            print!("{text}");
            true
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let mut cfg = RunConfig {
        tolerance: ToleranceConfig::default(),
        seed: cli.seed,
        format,
    };
    let name = command_name(&cli.command);
    let result = match ToleranceConfig::new(cli.tolerance, cli.rank_tolerance) {
        Ok(t) => {
            cfg.tolerance = t;
            run(&cli, &cfg).map_err(|e| (e.exit_code(), e))
        }
        // bad tolerances are a usage problem
        Err(e) => Err((2, e)),
    };
    let (json, code) = match result {
        Ok(o) => (o.report.clone(), o.exit_code()),
        Err((code, e)) => {
            let mut j = report::error_report(name, &cfg, &e);
            j["error"]["exit_code"] = code.into();
            eprintln!("skewtor: {e}");
            (j, code)
        }
    };
    if !emit(&report::render(&json, cfg.format), &cli.output) {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
