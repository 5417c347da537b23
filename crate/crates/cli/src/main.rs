use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use einsel::{run, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(
    name = "einsel",
    about = "Central-spin einselection and subsystem typicality experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write outputs here instead of the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Replace every seed in the config.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Check a config and print its canonical form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the toolkit version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run {
            config,
            output_dir,
            seed_override,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(seed) = seed_override {
                cfg.override_seed(seed);
            }
            let report = run(&cfg, output_dir.as_deref())?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            cfg.validate()?;
            println!("{}", cfg.canonical_json());
            Ok(())
        }
        Command::Version => {
            println!("einsel {}", einsel::runner::TOOLKIT_VERSION);
            Ok(())
        }
    }
}
