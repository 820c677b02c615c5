//! `review-miner`: run the opinion-mining pipeline stage by stage or end
//! to end.
//!
//! Exit codes: 0 success, 1 bad configuration or arguments, 2 input data
//! problems, 3 internal failures (output writing, broken invariants).

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use review_miner_cli::config::{load_config, Overrides};
use review_miner_cli::error::{CliError, Result, EXIT_VALIDATION};
use review_miner_cli::manifest::CACHE_ENV;
use review_miner_cli::pipeline::Pipeline;
use review_miner_core::analysis::CountMode;
use review_miner_core::keywords::Quarters;
use review_miner_core::Language;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "review-miner",
    version,
    about = "Mine hotel reviews for sentiment keywords, aspect pairs, and price-range summaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Plain-text key=value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every stochastic step (fold shuffles, training order).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Restrict the run to one language (zh or en).
    #[arg(long, global = true, value_name = "LANG")]
    lang: Option<String>,

    /// Output directory (work files, cache, report).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Fail on the first malformed input record instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,

    /// Keyword counting unit: tokens or sentences.
    #[arg(long, global = true, value_name = "MODE")]
    count_mode: Option<String>,

    /// Cross-validation fold count for the selected languages.
    #[arg(long, global = true)]
    k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Load, validate, and date-filter review exports.
    Ingest,
    /// Match hotels between the two review sources by normalized name.
    Match,
    /// Split reviews into price-binned sentences.
    Segment,
    /// Select entropy keywords; uses the grid winner unless thresholds are given.
    Keywords {
        /// Positive-class entropy ratio threshold (quarter steps).
        #[arg(long)]
        alpha: Option<String>,
        /// Negative-class entropy ratio threshold (quarter steps).
        #[arg(long)]
        alpha_prime: Option<String>,
    },
    /// Grid-search thresholds and C by cross-validation, then train the final model.
    Train,
    /// Label every sentence with the trained classifier.
    Classify,
    /// Extract (modifier, noun) pairs from dependency parses.
    Pairs,
    /// Rank keywords per price bin and nouns per ranked keyword.
    Rank,
    /// Aggregate hard/soft attribute shares over keyword rankings.
    Hardsoft,
    /// Assemble report tables and charts from the work files.
    Report,
    /// Run every stage in order.
    All,
}

fn parse_lang(value: &str) -> Result<Language> {
    match value {
        "zh" => Ok(Language::Chinese),
        "en" => Ok(Language::English),
        other => Err(CliError::Config(format!(
            "unknown language {other:?}; expected zh or en"
        ))),
    }
}

fn parse_quarters(flag: &str, value: &str) -> Result<Quarters> {
    value
        .parse::<Quarters>()
        .map_err(|e| CliError::Config(format!("--{flag}: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    let lang = cli.lang.as_deref().map(parse_lang).transpose()?;
    let count_mode = cli
        .count_mode
        .as_deref()
        .map(|v| {
            v.parse::<CountMode>()
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .transpose()?;
    let overrides = Overrides {
        seed: cli.seed,
        lang,
        out: cli.out,
        strict: cli.strict,
        count_mode,
        k: cli.k,
        format: None,
    };
    let config = load_config(cli.config.as_deref(), &overrides)?;
    let cache_override = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let pipeline = Pipeline::new(config, cache_override);

    let per_language = |f: &dyn Fn(Language) -> Result<()>| -> Result<()> {
        for &language in &pipeline.config().languages {
            f(language)?;
        }
        Ok(())
    };

    match cli.command {
        Command::Ingest => per_language(&|l| pipeline.ingest(l)),
        Command::Match => pipeline.match_hotels(),
        Command::Segment => per_language(&|l| pipeline.segment(l)),
        Command::Keywords { alpha, alpha_prime } => {
            let alpha = alpha
                .as_deref()
                .map(|v| parse_quarters("alpha", v))
                .transpose()?;
            let alpha_prime = alpha_prime
                .as_deref()
                .map(|v| parse_quarters("alpha-prime", v))
                .transpose()?;
            per_language(&|l| pipeline.keywords(l, alpha, alpha_prime))
        }
        Command::Train => per_language(&|l| pipeline.train(l)),
        Command::Classify => per_language(&|l| pipeline.classify(l)),
        Command::Pairs => per_language(&|l| pipeline.pairs(l)),
        Command::Rank => per_language(&|l| pipeline.rank(l)),
        Command::Hardsoft => per_language(&|l| pipeline.hardsoft(l)),
        Command::Report => pipeline.report(),
        Command::All => pipeline.run_all(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; anything else is a usage
            // problem and must exit 1, not clap's default 2.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
