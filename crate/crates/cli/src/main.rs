use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sedsim_cli::{parse_config, run, CliError, Experiment, FlagOverrides};

#[derive(Parser)]
#[command(
    name = "zpf",
    version,
    about = "Stochastic electrodynamics and Moyal phase-space experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a zero-point force record and estimate its spectrum.
    SampleField(Common),
    /// Run an SED trajectory ensemble and collect stationary moments.
    RunSed(Common),
    /// Evolve a Gaussian Wigner function under the truncated Moyal series.
    EvolveWigner(Common),
    /// Measure how the first quantum correction scales with hbar.
    HbarScaling(Common),
    /// Boost a power-law spectrum and test its invariance.
    CheckLorentz(Common),
    /// Compare SED stationary moments with the quantum ground state.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override any key, as key=value. May be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn execute(experiment: Experiment, common: Common) -> Result<PathBuf, CliError> {
    let flags = FlagOverrides {
        seed: common.seed,
        out_dir: common.out_dir,
        set: common.set,
        env_workers: std::env::var("ZPF_WORKERS").ok(),
    };
    let config = parse_config(&common.config, experiment, &flags)?;
    run(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::SampleField(c) => (Experiment::SampleField, c),
        Command::RunSed(c) => (Experiment::RunSed, c),
        Command::EvolveWigner(c) => (Experiment::EvolveWigner, c),
        Command::HbarScaling(c) => (Experiment::HbarScaling, c),
        Command::CheckLorentz(c) => (Experiment::CheckLorentz, c),
        Command::Compare(c) => (Experiment::Compare, c),
    };
    match execute(experiment, common) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = serde_json::json!({ "error": e.record() });
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
