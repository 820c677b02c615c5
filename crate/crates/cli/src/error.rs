//! CLI-level errors and their process exit codes.
//!
//! Exit code contract: 0 success, 1 configuration or parameter validation,
//! 2 bad input data, 3 everything else (unwritable outputs, internal
//! invariant violations).

use review_miner_core::Error as CoreError;
use std::io;
use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration file, flag value, or parameter combination.
    #[error("configuration: {0}")]
    Config(String),

    /// A pipeline stage failed; `scope` names the language slice ("zh",
    /// "en", or "all") so the operator can see which half died.
    #[error("stage {stage} [{scope}]: {source}")]
    Stage {
        stage: &'static str,
        scope: String,
        source: CoreError,
    },

    /// Failed to write an output or cache artifact.
    #[error("writing {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    pub fn stage(stage: &'static str, scope: &str, source: CoreError) -> Self {
        CliError::Stage {
            stage,
            scope: scope.to_string(),
            source,
        }
    }

    pub fn output(path: impl Into<String>, source: io::Error) -> Self {
        CliError::Output {
            path: path.into(),
            source,
        }
    }

    /// Maps the error onto the documented exit-code contract.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_VALIDATION,
            CliError::Stage { source, .. } => classify_core(source),
            CliError::Output { .. } => EXIT_INTERNAL,
        }
    }
}

fn classify_core(error: &CoreError) -> u8 {
    match error {
        // Parameter problems: the caller asked for something nonsensical.
        CoreError::InvalidParameter { .. }
        | CoreError::UnknownCountMode { .. }
        | CoreError::TooFewFolds { .. }
        | CoreError::EmptyGrid { .. }
        | CoreError::NotQuarterStep { .. }
        | CoreError::TagPolicyOverlap { .. } => EXIT_VALIDATION,

        // Input data problems: files missing, malformed, or too thin.
        CoreError::Io { .. }
        | CoreError::MalformedRecord { .. }
        | CoreError::NoValidRecords { .. }
        | CoreError::PriceOutOfRange { .. }
        | CoreError::UnsupportedLanguage { .. }
        | CoreError::SingleClass { .. }
        | CoreError::EmptyTrainingSet
        | CoreError::Stratification { .. }
        | CoreError::Conllu { .. }
        | CoreError::PairFormat { .. }
        | CoreError::ModelFormat { .. }
        | CoreError::TrainingFormat { .. }
        | CoreError::KeywordFormat { .. }
        | CoreError::LemmaTable { .. }
        | CoreError::LexiconFormat { .. }
        | CoreError::RankingFormat { .. }
        | CoreError::LanguageMismatch { .. }
        | CoreError::MissingAttribution { .. }
        | CoreError::EmptyRanking => EXIT_DATA,

        // Invariant violations inside the library are bugs, not user error.
        CoreError::LengthMismatch { .. } | CoreError::DimensionMismatch { .. } => EXIT_INTERNAL,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
