use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rydberg_ring::io::{output_path, parse_config, run, write_table, Experiment};
use rydberg_ring::Error;

#[derive(Parser)]
#[command(
    name = "rydberg-ring",
    version,
    about = "Run driven Rydberg ring experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output CSV path (default: the config's output_path, else <experiment>.csv).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for parallel scans and ensembles.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Check the config, print it with defaults filled in, and exit.
    #[arg(long, global = true)]
    validate_only: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Eigenvalues of the spin Hamiltonian.
    Spectrum,
    /// Symmetric-sector levels along a Rabi-frequency sweep.
    Flow,
    /// Adiabatic preparation of the fermion vacuum.
    Adiabatic,
    /// Rabi oscillation under an oscillating detuning.
    Rabi,
    /// Two-pulse excitation of a two-fermion state.
    Pulse2,
    /// Disorder-averaged absorption profile.
    Absorption,
    /// Internal consistency checks.
    Validate,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Spectrum => Experiment::Spectrum,
            Command::Flow => Experiment::Flow,
            Command::Adiabatic => Experiment::Adiabatic,
            Command::Rabi => Experiment::Rabi,
            Command::Pulse2 => Experiment::Pulse2,
            Command::Absorption => Experiment::Absorption,
            Command::Validate => Experiment::Validate,
        }
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;

    let Some(path) = c.config else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(source) => {
            return fail(&Error::Io {
                context: format!("reading {}", path.display()),
                source,
            })
        }
    };
    let mut config = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let wanted = cli.command.experiment();
    if config.experiment != wanted {
        eprintln!(
            "error: subcommand {wanted} does not match the config's experiment {}",
            config.experiment
        );
        return ExitCode::from(2);
    }
    if let Some(seed) = c.seed {
        config.seed = seed;
    }
    if let Some(out) = c.out {
        config.output_path = Some(out);
    }
    if c.validate_only {
        println!("{}", config.to_json());
        return ExitCode::SUCCESS;
    }
    if let Some(n) = c.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not start thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let table = match run(&config) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    let out = output_path(&config);
    if let Err(e) = write_table(&table, &out) {
        return fail(&e);
    }
    eprintln!("wrote {}", out.display());
    if table.failures > 0 {
        eprintln!("error: {} validation check(s) failed", table.failures);
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
