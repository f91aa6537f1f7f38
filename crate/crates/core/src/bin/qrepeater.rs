use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qrepeater::harness::{run_experiment, write_results, ExperimentConfig, ExperimentKind, Format, Metadata};
use qrepeater::Error;

#[derive(Parser)]
#[command(
    name = "qrepeater",
    version,
    about = "Purification planning and routing sweeps on repeater networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal purification plans over a gate/channel fidelity grid.
    Chain(RunArgs),
    /// Exhaustive search against weighted shortest paths on random lattices.
    Route(RunArgs),
    /// Greedy edge-disjoint multipath totals across lattice types.
    Multipath(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's `output`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Replace the seed list with as many consecutive seeds from this one.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| Error::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = ExperimentConfig::from_toml(&text, Some(kind))?;
    if let Some(seed) = args.seed_override {
        cfg.override_seeds(seed);
    }
    let rows = run_experiment(&cfg)?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let out = args.out.or_else(|| cfg.output.clone());
    write_results(&rows, &Metadata::for_config(&cfg), format, out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Chain(a) => (ExperimentKind::ChainSweep, a),
        Command::Route(a) => (ExperimentKind::RouteCompare, a),
        Command::Multipath(a) => (ExperimentKind::MultipathCompare, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrepeater: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
