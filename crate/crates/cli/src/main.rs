//! `entroscope`: word counts, entropy estimates and certified entropy-drop
//! bounds for edge-labelled graphs.

mod commands;
mod report;
mod source;

use clap::{Parser, Subcommand};
use entroscope::{Budget, Error};

use commands::{AnalyzeArgs, BoundArgs, CountArgs, RhoArgs, SchreierArgs};
use report::{OutputArgs, EXIT_CERTIFICATION, EXIT_CONFIG, EXIT_OK};

#[derive(Parser, Debug)]
#[command(
    name = "entroscope",
    version,
    about = "Entropy of graph languages and its drop under forbidden factors"
)]
struct Cli {
    /// Maximum number of vertices explored by one search.
    #[arg(long, global = true, env = "ENTROSCOPE_BUDGET")]
    budget: Option<usize>,
    /// Worker threads for parallel row-sum checks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count words x -> y of each length, with and without forbidden factors.
    Count(CountArgs),
    /// Entropy with and without forbidden factors, their gap and a certified bound.
    Analyze(AnalyzeArgs),
    /// Evaluate the certified bound; optionally check k-step row sums on a graph.
    Bound(BoundArgs),
    /// Decay rate of transition probabilities and the h-transform identity.
    Rho(RhoArgs),
    /// Growth sensitivity of a built-in Schreier graph's word problem.
    Schreier(SchreierArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count(_) => "count",
            Command::Analyze(_) => "analyze",
            Command::Bound(_) => "bound",
            Command::Rho(_) => "rho",
            Command::Schreier(_) => "schreier",
        }
    }
}

fn run(cli: &Cli) -> Result<i32, Error> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::ParameterOutOfRange(format!("--threads: {e}")))?;
    }
    let budget = Budget(cli.budget.unwrap_or(Budget::DEFAULT.0));
    let (mut config, outcome) = match &cli.command {
        Command::Count(a) => commands::count(a, budget)?,
        Command::Analyze(a) => commands::analyze(a, budget)?,
        Command::Bound(a) => commands::bound(a, budget)?,
        Command::Rho(a) => commands::rho(a, budget)?,
        Command::Schreier(a) => commands::schreier(a, budget)?,
    };
    config["threads"] = cli
        .threads
        .unwrap_or_else(rayon::current_num_threads)
        .into();
    let doc = report::document(cli.command.name(), config, &outcome);
    report::emit(&doc, &outcome, &cli.output)?;
    Ok(if outcome.certification_failed {
        EXIT_CERTIFICATION
    } else {
        EXIT_OK
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            std::process::exit(EXIT_CONFIG);
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(EXIT_OK);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let doc = report::error_document(cli.command.name(), &e);
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("errors serialize")
            );
            report::exit_code(&e)
        }
    };
    std::process::exit(code);
}
