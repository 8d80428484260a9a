//! Command-line front end. Exit codes: 0 success, 1 invalid input,
//! 2 numerical failure, 3 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdqmc::config::RunConfig;
use tdqmc::runner::{self, Comparison, Manifest, OracleMethod};
use tdqmc::{Result, Sigma};

// stdout may be a closed pipe (`tdqmc compare a b | head`); drop the output
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "tdqmc", version, about = "Time-dependent quantum Monte Carlo for lattice entanglement maps")]
struct Cli {
    /// Worker threads (default: TDQMC_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// TOML configuration, or a manifest.json to reproduce a previous run.
    config: PathBuf,
    /// Overrides the ensemble seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl Input {
    fn load(&self) -> Result<RunConfig> {
        let mut config = runner::load_input(&self.config)?;
        if let Some(seed) = self.seed {
            config.ensemble.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output.directory = out.clone();
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Relax an ensemble and write density, potential, maps, and traces.
    Run(Input),
    /// Solve the same configuration without walkers.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
    },
    /// Relax at every candidate sigma and write the energy curve.
    SweepSigma {
        #[command(flatten)]
        input: Input,
        /// Candidate values, e.g. `--sigma 0.5 --sigma inf`.
        #[arg(long = "sigma")]
        sigmas: Vec<Sigma>,
    },
    /// Compare the artifacts of a run against a reference directory.
    Compare {
        run: PathBuf,
        reference: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Method {
    Exact,
    Hartree,
}

fn print_summary(manifest: &Manifest, dir: &Path) {
    let s = &manifest.summary;
    if let Some(sigma) = manifest.sigma {
        out!("sigma {sigma}");
    }
    out!("energy {:.10}", s.energy);
    out!("purity {:.6}", s.purity);
    out!("linear_entropy {:.6}", s.linear_entropy);
    if let Some(c) = &manifest.convergence {
        out!("steps {} converged {}", c.steps_taken, c.converged);
    }
    out!("wrote {} artifacts to {}", manifest.artifacts.len(), dir.display());
}

fn execute(cli: Cli) -> Result<()> {
    runner::configure_threads(cli.threads)?;
    match cli.command {
        Command::Run(input) => {
            let config = input.load()?;
            let dir = config.output.directory.clone();
            let manifest = runner::run(&config)?.write(&dir)?;
            print_summary(&manifest, &dir);
        }
        Command::Oracle { input, method } => {
            let config = input.load()?;
            let method = match method {
                Method::Exact => OracleMethod::Exact,
                Method::Hartree => OracleMethod::Hartree,
            };
            let dir = config.output.directory.clone();
            let manifest = runner::oracle(&config, method)?.write(&dir)?;
            print_summary(&manifest, &dir);
        }
        Command::SweepSigma { input, sigmas } => {
            let config = input.load()?;
            let dir = config.output.directory.clone();
            let candidates = (!sigmas.is_empty()).then_some(sigmas);
            let manifest = runner::sweep_sigma(&config, candidates, &dir)?;
            for (sigma, energy) in manifest.sigma_scan.iter().flatten() {
                out!("{sigma} {energy:.10}");
            }
            print_summary(&manifest, &dir);
        }
        Command::Compare { run, reference, json } => {
            let comparison: Comparison = runner::compare(&run, &reference)?;
            if json {
                out!("{}", serde_json::to_string_pretty(&comparison).expect("serializable"));
            } else {
                out!("{}", comparison.report());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // usage errors count as invalid input; help and version succeed
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
