//! `gen-demo`: write a synthetic bilingual corpus with a planted
//! adjective–noun lexicon, plus a ready-to-run configuration file and the
//! ground-truth table. Deterministic per seed.

use clap::Parser;
use review_miner_cli::demo::{generate, DemoSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gen-demo",
    version,
    about = "Generate a synthetic demo corpus with a planted opinion lexicon"
)]
struct Cli {
    /// Directory to write the corpus into.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Generation seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Sentences per language.
    #[arg(long, default_value_t = 300)]
    sentences: usize,

    /// Labeled training rows per language.
    #[arg(long, default_value_t = 240)]
    training: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = DemoSpec {
        seed: cli.seed,
        sentences: cli.sentences,
        training_rows: cli.training,
    };
    match generate(&spec, &cli.out) {
        Ok(planted) => {
            eprintln!(
                "wrote demo corpus ({} planted words) to {}",
                planted.len(),
                cli.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
