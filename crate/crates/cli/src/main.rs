use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minorlab::poset::Strategy;
use minorlab::Budget;
use minorlab_cli::{
    cmd_canon, cmd_dcc, cmd_degree, cmd_downset, cmd_minor, cmd_poset, cmd_validate, CliError, CliResult, Format,
    Outcome, RunConfig, EXIT_INPUT,
};

#[derive(Parser)]
#[command(name = "minorlab", version, about = "Minors of finite operations relative to semilattice clones")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// Clone preset (meet, meet0, meet1, meet01) or clone JSON file.
    #[arg(long, global = true, default_value = "meet")]
    clone: String,
    /// Semilattice JSON for presets; defaults to the chain on the input domain.
    #[arg(long, global = true)]
    semilattice: Option<PathBuf>,
    /// Build clone parts up to at least this arity (the input arity is always covered)
    #[arg(long, global = true)]
    max_arity: Option<usize>,
    /// Largest clone part generated.
    #[arg(long, global = true, default_value_t = 65536)]
    max_part_size: usize,
    /// Search node budget per check.
    #[arg(long, global = true, env = "MINORLAB_BUDGET", default_value_t = Budget::DEFAULT_LIMIT)]
    budget: u64,
    /// Largest number of candidate set systems in a down-set.
    #[arg(long, global = true, default_value_t = 4096)]
    e_cap: usize,
    /// Random minors sampled per class by `dcc`.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Seed for sampled minors
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// text, json or dot (dot applies to `poset`)
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Minor test used to build posets; `fast` needs a meet clone preset
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Generic)]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Generic,
    Fast,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a binary table is a semilattice.
    Validate { semilattice: PathBuf },
    /// Decide whether F is a minor of G.
    Minor { f: PathBuf, g: PathBuf },
    /// C-degree and a minimal decomposition.
    Degree { f: PathBuf },
    /// Canonical form of G applied to a term vector.
    Canon { g: PathBuf, terms: PathBuf },
    /// Representatives of the classes below F.
    Downset { f: PathBuf },
    /// Minor poset of a universe (`all:K:ARITIES` or a JSON file).
    Poset { universe: String },
    /// Poset laws and sampled down-set cross-checks.
    Dcc { universe: String },
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let o = &cli.opts;
    if o.budget == 0 || o.e_cap == 0 || o.max_part_size == 0 {
        return Err(CliError::Usage("caps must be positive".into()));
    }
    if let Some(n) = o.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let config = RunConfig {
        clone: o.clone.clone(),
        semilattice: o.semilattice.clone(),
        max_arity: o.max_arity,
        max_part_size: o.max_part_size,
        budget: o.budget,
        e_cap: o.e_cap,
        samples: o.samples,
        seed: o.seed,
        format: o.format,
        strategy: match o.strategy {
            StrategyArg::Generic => Strategy::Generic,
            StrategyArg::Fast => Strategy::SemilatticeFast,
        },
    };
    match &cli.command {
        Command::Validate { semilattice } => cmd_validate(semilattice, &config),
        Command::Minor { f, g } => cmd_minor(f, g, &config),
        Command::Degree { f } => cmd_degree(f, &config),
        Command::Canon { g, terms } => cmd_canon(g, terms, &config),
        Command::Downset { f } => cmd_downset(f, &config),
        Command::Poset { universe } => cmd_poset(universe, &config),
        Command::Dcc { universe } => cmd_dcc(universe, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{}", outcome.text),
    }
    ExitCode::from(outcome.code as u8)
}
