mod args;
mod commands;
mod pipeline;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn main() {
    let code = match run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version print and exit cleanly; real parse errors
            // are usage errors (exit 1).
            if e.use_stderr() {
                e.print().ok();
                std::process::exit(1);
            }
            e.print().ok();
            std::process::exit(0);
        }
    };

    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
    }

    match &cli.command {
        Command::Stats(args) => commands::stats(args, cli.strict),
        Command::Filter(args) => commands::filter(args, cli.strict),
        Command::Dedup(args) => commands::dedup(args, cli.seed, cli.strict),
        Command::Decontaminate(args) => commands::decontaminate(args, cli.seed, cli.strict),
        Command::Grade(args) => commands::grade(args, cli.strict),
        Command::TagDifficulty(args) => commands::tag_difficulty(args, cli.strict),
        Command::Split(args) => commands::split(args, cli.seed, cli.strict),
        Command::ShuffleCurriculum(args) => {
            commands::shuffle_curriculum(args, cli.seed, cli.strict)
        }
        Command::Score(args) => commands::score(args, cli.strict),
        Command::Simulate(args) => commands::simulate_cmd(args, cli.seed, cli.strict),
        Command::Pipeline(args) => {
            let mut config = match &args.config {
                Some(path) => pipeline::PipelineConfig::load(path)?,
                None => pipeline::PipelineConfig::default(),
            };
            // The global --seed wins only when given explicitly, so a config
            // file seed survives default flags.
            let seed_flag = std::env::args()
                .any(|a| a == "--seed" || a.starts_with("--seed="))
                .then_some(cli.seed);
            config.apply_overrides(args, seed_flag);
            pipeline::run_pipeline(&config, cli.strict)
        }
    }
}
