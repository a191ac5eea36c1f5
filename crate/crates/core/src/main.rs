use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use spdc::config::parse_config;
use spdc::run::{run, Subcommand};
use spdc::{Result, SpdcError};

/// Two-photon amplitudes, phase matching and entanglement diagnostics for SPDC.
#[derive(Parser)]
#[command(name = "spdc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Write the joint amplitude (jsa.dump) and its marginals.
    Simulate(RunArgs),
    /// Compare the direct superposition against the closed form.
    Oracle(RunArgs),
    /// Schmidt spectrum of the joint amplitude.
    Schmidt(RunArgs),
    /// Sum/difference correlations and the EPR product.
    Epr(RunArgs),
    /// Phase-matching curve and emission geometry.
    Phasematch(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "SPDC_THREADS")]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> Result<()> {
    let (command, args) = match cli.command {
        Command::Simulate(a) => (Subcommand::Simulate, a),
        Command::Oracle(a) => (Subcommand::Oracle, a),
        Command::Schmidt(a) => (Subcommand::Schmidt, a),
        Command::Epr(a) => (Subcommand::Epr, a),
        Command::Phasematch(a) => (Subcommand::Phasematch, a),
    };
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(SpdcError::InvalidInput("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| SpdcError::InvalidInput(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| SpdcError::Io(format!("{}: {e}", args.config.display())))?;
    let config = parse_config(&text)?;
    let out = args.out.unwrap_or_else(|| PathBuf::from(&config.output.directory));
    let result = run(command, &config, &out)?;
    for (name, _) in &result.files {
        log::info!("wrote {}", result.path(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("spdc: error: {}: {message}", e.code());
            ExitCode::FAILURE
        }
    }
}
