use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rocsim::{execute, load_config, validate_config, write_artifacts, CliError, Command, Source, Strategy};

#[derive(Parser)]
#[command(name = "rocsim", version, about = "Analog MIMO radio-over-copper fronthaul experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped config: fig5, fig6-50m, fig6-15m, fig7, single-wimax.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for the parallel sweeps.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Override one config key, e.g. `--set cable.length_m=15`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit the front-end loss and cable scale to the calibration targets.
    Calibrate,
    /// Validate the configured mapping (or build the greedy one) and print its plan.
    Plan,
    /// Search SF2SF mappings for the best beamforming objective.
    OptimizeMapping {
        #[arg(long, conflicts_with = "greedy")]
        exhaustive: bool,
        #[arg(long)]
        greedy: bool,
    },
    /// MVDR SINR versus desired-UE angle, per mapping plus the envelope.
    SinrSweep,
    /// EVM and analyzer metrics versus RF input power.
    EvmSweep,
    /// Throughput versus MCS, with and without the coexisting signal.
    Throughput,
    /// Check the config without running anything.
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = cli.common;
    let source = match (c.config, c.preset) {
        (Some(p), _) => Source::File(p),
        (None, Some(n)) => Source::Preset(n),
        (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
    };
    let mut overrides = c.set;
    if let Some(seed) = c.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut cfg = load_config(&source, &overrides)?;
    if let Some(out) = c.out {
        cfg.output_dir = out;
    }
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }

    let (command, strategy) = match cli.command {
        Cmd::Calibrate => (Command::Calibrate, Strategy::Exhaustive),
        Cmd::Plan => (Command::Plan, Strategy::Exhaustive),
        Cmd::OptimizeMapping { greedy, .. } => {
            (Command::OptimizeMapping, if greedy { Strategy::Greedy } else { Strategy::Exhaustive })
        }
        Cmd::SinrSweep => (Command::SinrSweep, Strategy::Exhaustive),
        Cmd::EvmSweep => (Command::EvmSweep, Strategy::Exhaustive),
        Cmd::Throughput => (Command::Throughput, Strategy::Exhaustive),
        Cmd::Validate => {
            let diags = validate_config(&cfg);
            if !diags.is_empty() {
                return Err(CliError::Invalid(diags.iter().map(|d| d.to_string()).collect()));
            }
            println!("config ok");
            return Ok(());
        }
    };

    let artifacts = execute(command, strategy, &cfg)?;
    let (csv, json) = write_artifacts(&cfg.output_dir, command, &artifacts)?;
    println!("{}", csv.display());
    println!("{}", json.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
