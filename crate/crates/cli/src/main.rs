use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dtdvp::config::{parse_config, ExperimentConfig, Mode};
use dtdvp::error::RunError;
use dtdvp::runner::run;

#[derive(Parser)]
#[command(name = "dtdvp", version, about = "Exact, Gaussified and variational open fermionic dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full Lindblad equation in Fock space.
    Exact(Overrides),
    /// Integrate the closed covariance-matrix equations.
    Gaussified(Overrides),
    /// Integrate the projected flow on the Gaussian manifold, once per alpha.
    Tdvp(Overrides),
    /// Run exact and Gaussified dynamics side by side.
    Compare(Overrides),
    /// Check metric independence of the Gaussian projection on random instances.
    VerifyTheorem1(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// TOML experiment file; its `run.mode` is replaced by the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated metric exponents.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
}

fn load(mode: Mode, o: Overrides) -> Result<ExperimentConfig, RunError> {
    let mut config = match &o.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => ExperimentConfig::new(mode),
    };
    config.run.mode = mode;
    if let Some(out) = o.out {
        config.output.directory = out;
    }
    if let Some(seed) = o.seed {
        config.run.seed = seed;
    }
    if let Some(alpha) = o.alpha {
        config.run.alpha = alpha;
    }
    if let Some(dt) = o.dt {
        config.run.dt = dt;
    }
    if let Some(t) = o.t_final {
        config.run.t_final = t;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, overrides) = match cli.command {
        Command::Exact(o) => (Mode::Exact, o),
        Command::Gaussified(o) => (Mode::Gaussified, o),
        Command::Tdvp(o) => (Mode::Tdvp, o),
        Command::Compare(o) => (Mode::Compare, o),
        Command::VerifyTheorem1(o) => (Mode::VerifyTheorem1, o),
    };
    let result = load(mode, overrides).and_then(|config| run(&config));
    match result {
        Ok(report) => {
            for file in &report.files {
                println!("{}", file.display());
            }
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dtdvp: {e}");
            e.exit()
        }
    }
}
