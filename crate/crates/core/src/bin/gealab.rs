use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gealab::report::{
    cmd_axioms, cmd_chain, cmd_counterexample, cmd_sigma, parse_levels, parse_model, Outcome, RunConfig,
    UsageError,
};

/// Experiments on generalized effect algebras and sesquilinear forms.
#[derive(Parser)]
#[command(name = "gealab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Check the partial-algebra axioms of an instance or form family.
    Axioms,
    /// Reproduce a pinned counterexample.
    Counterexample { name: String },
    /// Monotonicity, pointwise limit and meet/join of a chain.
    Chain,
    /// Existence of meets and joins across all families.
    Sigma,
}

#[derive(Args)]
struct Common {
    /// zplus, even-gap, cone2, broken-max, interval:<u>, half-open:<u>
    #[arg(long, global = true)]
    instance: Option<String>,
    /// vf, vf-bar, bf, rf, sf, gf, cf, vfd:<tag>, sa, operators
    #[arg(long, global = true)]
    family: Option<String>,
    /// Chain id, inline JSON, or a .json config file.
    #[arg(long, global = true)]
    chain: Option<String>,
    #[arg(long, global = true)]
    order: Option<String>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Comma-separated discretization levels.
    #[arg(long, global = true)]
    levels: Option<String>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, env = "GEALAB_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Carrier bound for the integer instances.
    #[arg(long, global = true)]
    cap: Option<i64>,
    /// sequence or grid
    #[arg(long, global = true)]
    model: Option<String>,
    /// text or json
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<Outcome, UsageError> {
    let c = cli.common;
    let cfg = RunConfig {
        instance: c.instance,
        family: c.family,
        chain: c.chain,
        order: c.order,
        n_max: c.n_max,
        levels: c.levels.as_deref().map(parse_levels).transpose()?,
        samples: c.samples,
        seed: c.seed,
        tol: c.tol,
        cap: c.cap,
        model: c.model.as_deref().map(parse_model).transpose()?,
        format: c.format.parse()?,
    };
    let outcome = match cli.command {
        Command::Axioms => cmd_axioms(&cfg)?,
        Command::Counterexample { name } => cmd_counterexample(&name, &cfg)?,
        Command::Chain => cmd_chain(&cfg)?,
        Command::Sigma => cmd_sigma(&cfg)?,
    };
    if let Some(path) = c.out {
        std::fs::write(path, outcome.to_json())?;
    }
    print!("{}", outcome.render(cfg.format));
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => ExitCode::from(o.exit_code() as u8),
        Err(e) => {
            eprintln!("gealab: {e}");
            ExitCode::from(2)
        }
    }
}

