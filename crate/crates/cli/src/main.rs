use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pqsimo_cli::config::{parse_methods, parse_rho_list, DEFAULT_SEED};
use pqsimo_cli::figures::run_figure;
use pqsimo_cli::gains::print_gains;
use pqsimo_cli::output::{save_csv, save_json, write_csv};
use pqsimo_cli::{exit, run_sweep, run_verify, CliError, Mutation, Result, Settings};
use pqsimo_core::{Combiner, PhaseQuantizer, Simulator};

/// Symbol error probability of phase-quantized SIMO receivers.
///
/// Exit status: 0 on success, 1 when a verification check fails, 2 on any
/// configuration or I/O error.
#[derive(Debug, Parser)]
#[command(name = "pqsimo", version)]
struct Cli {
    /// Simulation worker threads (defaults to the number of cores)
    #[arg(long, global = true, env = "PQSIMO_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct LinkArgs {
    /// Constellation order M
    #[arg(long)]
    m: Option<usize>,
    /// Quantizer bits, or `inf`
    #[arg(long)]
    n: Option<String>,
    /// Receive antennas N_r (transmit antennas for miso)
    #[arg(long)]
    nr: Option<usize>,
    /// mrc, sc, lcsi, miso or e2
    #[arg(long)]
    combiner: Option<String>,
    /// perfect or two_bit_phase
    #[arg(long)]
    csir: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one link over a list of SNRs and emit CSV
    Sweep {
        #[command(flatten)]
        link: LinkArgs,
        /// SNRs in dB: "0,5,10" or "start:stop:step"
        #[arg(long, allow_hyphen_values = true)]
        rho_db: Option<String>,
        /// Trials per point [default: 1e6 up to 20 dB, 1e7 above]
        #[arg(long)]
        trials: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma list of mc, analytic, approx, asymptote, bounds
        #[arg(long)]
        method: Option<String>,
        /// CSV output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the rows as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// key=value file; flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print diversity and coding gains
    Gains {
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Regenerate the data of one SEP figure (1 to 7)
    Figure {
        k: u32,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        trials: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the self-check suite
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
}

fn flag_settings(link: &LinkArgs) -> Result<Settings> {
    let mut s = Settings { m: link.m, nr: link.nr, ..Default::default() };
    s.n = link.n.as_deref().map(str::parse::<PhaseQuantizer>).transpose()?;
    s.combiner = link.combiner.as_deref().map(str::parse::<Combiner>).transpose()?;
    s.csir = link.csir.as_deref().map(str::parse).transpose()?;
    Ok(s)
}

fn with_file(config: &Option<PathBuf>, flags: Settings) -> Result<Settings> {
    match config {
        Some(p) => Ok(Settings::from_file(p)?.overlay(flags)),
        None => Ok(flags),
    }
}

fn trials_flag(t: &Option<String>) -> Result<Option<u64>> {
    t.as_deref()
        .map(|v| Settings::parse(&format!("trials={v}")).map(|s| s.trials.unwrap_or_default()))
        .transpose()
}

fn simulator(workers: Option<usize>) -> Result<Simulator> {
    match workers {
        Some(w) => Ok(Simulator::new(w)?),
        None => Ok(Simulator::default()),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sweep { link, rho_db, trials, seed, method, out, json, config } => {
            let mut flags = flag_settings(&link)?;
            flags.rho_db = rho_db.as_deref().map(parse_rho_list).transpose()?;
            flags.trials = trials_flag(&trials)?;
            flags.seed = seed;
            flags.methods = method.as_deref().map(parse_methods).transpose()?;
            flags.out = out;
            let settings = with_file(&config, flags)?;
            let req = settings.sweep_request()?;
            let sim = simulator(cli.workers.or(settings.workers))?;
            let (res, failures) = run_sweep(&sim, &req)?;
            for f in &failures {
                eprintln!("rho_db={} method={}: {}", f.rho_db, f.method, f.message);
            }
            match &req.output_path {
                Some(p) => save_csv(&res, p)?,
                None => write_csv(&res, std::io::stdout().lock())?,
            }
            if let Some(p) = json {
                save_json(&res, &p)?;
            }
            Ok(exit::OK)
        }
        Command::Gains { link, config } => {
            let s = with_file(&config, flag_settings(&link)?)?;
            let l = s.link();
            print!("{}", print_gains(l.order, l.quantizer, l.antennas, l.combiner)?);
            Ok(exit::OK)
        }
        Command::Figure { k, out, trials, seed } => {
            let sim = simulator(cli.workers)?;
            let res = run_figure(&sim, k, &out, trials_flag(&trials)?, seed)?;
            for (stem, f) in &res.failures {
                eprintln!("{stem}: rho_db={} method={}: {}", f.rho_db, f.method, f.message);
            }
            for (p, r) in &res.files {
                println!("{} ({} rows)", p.display(), r.rows.len());
            }
            Ok(exit::OK)
        }
        Command::Verify { seed, mutate } => {
            let mutation = mutate.as_deref().map(str::parse::<Mutation>).transpose()?;
            let sim = simulator(cli.workers)?;
            let summary = run_verify(&sim, seed, mutation)?;
            println!("{summary}");
            Ok(if summary.passed() { exit::OK } else { exit::VERIFY_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
