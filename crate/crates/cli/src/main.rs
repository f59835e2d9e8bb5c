use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geoslice_cli::bundled::{load, BUNDLED};
use geoslice_cli::config::{defaults_table, ConfigError, ExperimentConfig};
use geoslice_cli::run_experiment;

#[derive(Parser)]
#[command(
    name = "geoslice",
    version,
    about = "Run sphere-sampling experiments from TOML configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write chains, metadata and summary.json.
    Run(RunArgs),
    /// Check a config without sampling.
    Validate(ConfigArgs),
    /// List the bundled reproduction configs.
    List,
    /// Print a config with every default filled in.
    Describe(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file, or the name of a bundled config.
    #[arg(long)]
    config: String,
    /// Use the paper-scale chain length and repetitions.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of chains run concurrently; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut c = load(&args.config)?;
    if args.paper_scale {
        c.apply_paper_scale();
    }
    Ok(c)
}

fn config_failure(e: &ConfigError) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::List => {
            for (name, _) in BUNDLED {
                let c = geoslice_cli::bundled::bundled(name).expect("bundled");
                println!("{name:<22} {}", c.description);
            }
            ExitCode::SUCCESS
        }
        Command::Validate(args) => match load_config(&args).and_then(|c| c.validate()) {
            Ok(variants) => {
                println!("ok: {} target variant(s)", variants.len());
                ExitCode::SUCCESS
            }
            Err(e) => config_failure(&e),
        },
        Command::Describe(args) => match load_config(&args) {
            Ok(c) => {
                if let Err(e) = c.validate() {
                    return config_failure(&e);
                }
                for (k, v) in defaults_table() {
                    println!("# {k}: {v}");
                }
                print!("{}", c.resolved().to_toml());
                ExitCode::SUCCESS
            }
            Err(e) => config_failure(&e),
        },
        Command::Run(args) => {
            let mut c = match load_config(&args.config) {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
            if let Some(out) = args.out {
                c.output_dir = out;
            }
            if let Err(e) = c.validate() {
                return config_failure(&e);
            }
            match run_experiment(&c, &c.output_dir.clone(), args.workers) {
                Ok(summary) if summary.totals.failed_chains > 0 => {
                    eprintln!(
                        "{} of {} chains failed; see {}",
                        summary.totals.failed_chains,
                        summary.totals.chains,
                        c.output_dir.display()
                    );
                    ExitCode::from(EXIT_RUNTIME)
                }
                Ok(summary) => {
                    println!(
                        "{}: {} chains, {} steps, {} rejections -> {}",
                        summary.name,
                        summary.totals.chains,
                        summary.totals.steps,
                        summary.totals.rejections,
                        c.output_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => match e.downcast_ref::<ConfigError>() {
                    Some(ce) => config_failure(ce),
                    None => {
                        eprintln!("error: {e:#}");
                        ExitCode::from(EXIT_RUNTIME)
                    }
                },
            }
        }
    }
}
