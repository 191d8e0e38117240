use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isocomp_cli::{cmd_curves, cmd_space, cmd_verify, fixtures_export, fixtures_list, CliError, Options, RunConfig};

#[derive(Parser)]
#[command(name = "isocomp", version, about = "Comparison spaces and extrinsic-ball verification in hyperbolic space")]
struct Cli {
    /// Worker threads for suite cells.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Multiply every tolerance (except tail settling) by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build each comparison space and write its report.
    Space(RunArgs),
    /// Run the verification suites and write reports, curves and a manifest.
    Verify(RunArgs),
    /// Write growth, space and quotient curves.
    Curves(RunArgs),
    /// Built-in fixture complexes.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    /// Write each fixture as a plain-text complex file.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let opts = |out: Option<PathBuf>| Options { out, tol_scale: cli.tol_scale, jobs: cli.jobs };
    match cli.command {
        Command::Space(a) => cmd_space(&RunConfig::load(&a.config)?, &opts(a.out)),
        Command::Verify(a) => {
            let manifest = cmd_verify(&RunConfig::load(&a.config)?, &opts(a.out))?;
            for e in &manifest.entries {
                let space = e.space.as_deref().map(|s| format!(" [{s}]")).unwrap_or_default();
                println!("{:<20} {}{space} {}", e.status, e.surface, e.suite);
            }
            println!("manifest {}", manifest.manifest_hash);
            Ok(manifest.exit_code())
        }
        Command::Curves(a) => {
            for p in cmd_curves(&RunConfig::load(&a.config)?, &opts(a.out))? {
                println!("{p}");
            }
            Ok(0)
        }
        Command::Fixtures { action: FixtureAction::List } => {
            print!("{}", fixtures_list());
            Ok(0)
        }
        Command::Fixtures { action: FixtureAction::Export { out } } => {
            for p in fixtures_export(&out)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("isocomp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
