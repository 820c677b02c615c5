//! Run configuration: defaults, layered over by a plain-text config file,
//! layered over by command-line flags.
//!
//! The file format is one `key = value` pair per line; `#` starts a comment
//! and blank lines are ignored. Relative paths are resolved against the
//! directory containing the config file, so a config can travel with its
//! corpus. Unknown keys are rejected rather than silently dropped.

use crate::error::{CliError, Result};
use chrono::NaiveDate;
use review_miner_core::classifier::crossval::default_c_grid;
use review_miner_core::keywords::{alpha_grid, quarter_range};
use review_miner_core::{CountMode, Language, Quarters};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Output format for report sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Tsv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Tsv => "tsv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(CliError::Config(format!(
                "unknown report format {other:?} (expected \"markdown\" or \"tsv\")"
            ))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Tsv => "tsv",
        })
    }
}

/// Input files for one language slice of the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LangInputs {
    pub reviews: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    pub training: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

impl LangInputs {
    /// Returns the path for `role`, or a validation error naming the
    /// config key the caller forgot.
    pub fn require(&self, role: InputRole, language: Language) -> Result<&Path> {
        let (slot, key) = match role {
            InputRole::Reviews => (&self.reviews, "reviews"),
            InputRole::Parses => (&self.parses, "parses"),
            InputRole::Training => (&self.training, "training"),
            InputRole::Lexicon => (&self.lexicon, "lexicon"),
        };
        slot.as_deref().ok_or_else(|| {
            CliError::Config(format!(
                "missing input: set {key}_{} in the config file",
                language.code()
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputRole {
    Reviews,
    Parses,
    Training,
    Lexicon,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub zh: LangInputs,
    pub en: LangInputs,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
    pub alpha_grid: Vec<Quarters>,
    pub alpha_prime_grid: Vec<Quarters>,
    pub c_grid: Vec<Quarters>,
    pub k_zh: usize,
    pub k_en: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub count_mode: CountMode,
    pub strict: bool,
    /// Languages this run operates on, in fixed zh-then-en order.
    pub languages: Vec<Language>,
    pub format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            zh: LangInputs::default(),
            en: LangInputs::default(),
            date_from: None,
            date_to: None,
            alpha_grid: alpha_grid(),
            alpha_prime_grid: alpha_grid(),
            c_grid: default_c_grid(),
            k_zh: 5,
            k_en: 10,
            seed: 42,
            output_dir: PathBuf::from("out"),
            count_mode: CountMode::Tokens,
            strict: false,
            languages: vec![Language::Chinese, Language::English],
            format: ReportFormat::Markdown,
        }
    }
}

impl PipelineConfig {
    pub fn inputs(&self, language: Language) -> &LangInputs {
        match language {
            Language::Chinese => &self.zh,
            _ => &self.en,
        }
    }

    pub fn k(&self, language: Language) -> usize {
        match language {
            Language::Chinese => self.k_zh,
            _ => self.k_en,
        }
    }

    /// Checks the cross-field rules that individual parsers cannot see.
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [
            ("alpha_grid", &self.alpha_grid),
            ("alpha_prime_grid", &self.alpha_prime_grid),
            ("c_grid", &self.c_grid),
        ] {
            if grid.is_empty() {
                return Err(CliError::Config(format!("{name} must not be empty")));
            }
        }
        for (name, k) in [("k_zh", self.k_zh), ("k_en", self.k_en)] {
            if k < 2 {
                return Err(CliError::Config(format!(
                    "{name} must be at least 2, got {k}"
                )));
            }
        }
        match (self.date_from, self.date_to) {
            (Some(from), Some(to)) if from > to => {
                return Err(CliError::Config(format!(
                    "date_from {from} is after date_to {to}"
                )));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(CliError::Config(
                    "date_from and date_to must be given together".into(),
                ));
            }
            _ => {}
        }
        if self.languages.is_empty() {
            return Err(CliError::Config("no languages selected".into()));
        }
        Ok(())
    }

    /// Applies a parsed config file on top of the defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for (line_no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    line_no + 1
                )));
            };
            self.apply_key(key.trim(), value.trim(), base)
                .map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!(
                        "{}:{}: {msg}",
                        path.display(),
                        line_no + 1
                    )),
                    other => other,
                })?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        match key {
            "reviews_zh" => self.zh.reviews = Some(resolve(base, value)),
            "reviews_en" => self.en.reviews = Some(resolve(base, value)),
            "parses_zh" => self.zh.parses = Some(resolve(base, value)),
            "parses_en" => self.en.parses = Some(resolve(base, value)),
            "training_zh" => self.zh.training = Some(resolve(base, value)),
            "training_en" => self.en.training = Some(resolve(base, value)),
            "lexicon_zh" => self.zh.lexicon = Some(resolve(base, value)),
            "lexicon_en" => self.en.lexicon = Some(resolve(base, value)),
            "date_from" => self.date_from = Some(parse_date(key, value)?),
            "date_to" => self.date_to = Some(parse_date(key, value)?),
            "alpha_grid" => self.alpha_grid = parse_grid(key, value)?,
            "alpha_prime_grid" => self.alpha_prime_grid = parse_grid(key, value)?,
            "c_grid" => self.c_grid = parse_grid(key, value)?,
            "k_zh" => self.k_zh = parse_number(key, value)?,
            "k_en" => self.k_en = parse_number(key, value)?,
            "seed" => self.seed = parse_number(key, value)?,
            "output_dir" => self.output_dir = resolve(base, value),
            "count_mode" => {
                self.count_mode = value
                    .parse()
                    .map_err(|e| CliError::Config(format!("{key}: {e}")))?;
            }
            "strict" => self.strict = parse_bool(key, value)?,
            "format" => self.format = value.parse()?,
            other => {
                return Err(CliError::Config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Applies command-line flags, which outrank both defaults and file.
    pub fn apply_overrides(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(language) = overrides.lang {
            self.languages = vec![language];
        }
        if let Some(out) = &overrides.out {
            self.output_dir = out.clone();
        }
        if overrides.strict {
            self.strict = true;
        }
        if let Some(mode) = overrides.count_mode {
            self.count_mode = mode;
        }
        if let Some(k) = overrides.k {
            // --k narrows to the selected languages; with no --lang it
            // applies to both.
            for language in &self.languages {
                match language {
                    Language::Chinese => self.k_zh = k,
                    _ => self.k_en = k,
                }
            }
        }
        if let Some(format) = overrides.format {
            self.format = format;
        }
    }

    /// Sorted `key = value` echo of every setting, for the run manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut path = |key: &str, value: &Option<PathBuf>| {
            if let Some(p) = value {
                map.insert(key.to_string(), p.display().to_string());
            }
        };
        path("reviews_zh", &self.zh.reviews);
        path("reviews_en", &self.en.reviews);
        path("parses_zh", &self.zh.parses);
        path("parses_en", &self.en.parses);
        path("training_zh", &self.zh.training);
        path("training_en", &self.en.training);
        path("lexicon_zh", &self.zh.lexicon);
        path("lexicon_en", &self.en.lexicon);
        if let Some(d) = self.date_from {
            map.insert("date_from".into(), d.to_string());
        }
        if let Some(d) = self.date_to {
            map.insert("date_to".into(), d.to_string());
        }
        map.insert("alpha_grid".into(), grid_echo(&self.alpha_grid));
        map.insert("alpha_prime_grid".into(), grid_echo(&self.alpha_prime_grid));
        map.insert("c_grid".into(), grid_echo(&self.c_grid));
        map.insert("k_zh".into(), self.k_zh.to_string());
        map.insert("k_en".into(), self.k_en.to_string());
        map.insert("seed".into(), self.seed.to_string());
        map.insert("output_dir".into(), self.output_dir.display().to_string());
        map.insert("count_mode".into(), self.count_mode.code().into());
        map.insert("strict".into(), self.strict.to_string());
        map.insert(
            "languages".into(),
            self.languages
                .iter()
                .map(|l| l.code())
                .collect::<Vec<_>>()
                .join(","),
        );
        map.insert("format".into(), self.format.to_string());
        map
    }
}

/// Flag-level overrides collected by the argument parser.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub lang: Option<Language>,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub count_mode: Option<CountMode>,
    pub k: Option<usize>,
    pub format: Option<ReportFormat>,
}

/// Builds the effective config: defaults, then file, then flags.
pub fn load_config(file: Option<&Path>, overrides: &Overrides) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::default();
    if let Some(path) = file {
        config.apply_file(path)?;
    }
    config.apply_overrides(overrides);
    config.validate()?;
    Ok(config)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let path = Path::new(value);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn parse_date(key: &str, value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| CliError::Config(format!("{key}: expected YYYY-MM-DD, got {value:?}")))
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: invalid number {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::Config(format!(
            "{key}: expected true or false, got {other:?}"
        ))),
    }
}

/// Parses a grid spec: either `start:end:step` or a comma list of values.
/// Every value must sit on the quarter-step lattice.
fn parse_grid(key: &str, value: &str) -> Result<Vec<Quarters>> {
    let parse_one = |text: &str| -> Result<Quarters> {
        text.trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{key}: {e}")))
    };
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "{key}: range spec must be start:end:step, got {value:?}"
            )));
        }
        let (start, end, step) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        quarter_range(start, end, step).map_err(|e| CliError::Config(format!("{key}: {e}")))
    } else {
        value.split(',').map(parse_one).collect()
    }
}

fn grid_echo(grid: &[Quarters]) -> String {
    grid.iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("run.conf");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn defaults_mirror_the_standard_sweep() {
        let config = PipelineConfig::default();
        assert_eq!(config.alpha_grid.len(), 20);
        assert_eq!(config.alpha_grid[0].as_f64(), 1.25);
        assert_eq!(config.alpha_grid[19].as_f64(), 6.0);
        assert_eq!(config.c_grid.len(), 16);
        assert_eq!(config.k_zh, 5);
        assert_eq!(config.k_en, 10);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn file_values_override_defaults_and_resolve_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            "# demo corpus\n\
             reviews_zh = data/reviews_zh.jsonl\n\
             seed = 7\n\
             k_zh = 3   # small corpus\n\
             alpha_grid = 1.5,2.5,3.5\n\
             c_grid = 0.5:1.0:0.25\n",
        );
        let config = load_config(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(
            config.zh.reviews.as_deref(),
            Some(dir.path().join("data/reviews_zh.jsonl").as_path())
        );
        assert_eq!(config.seed, 7);
        assert_eq!(config.k_zh, 3);
        assert_eq!(
            config.alpha_grid,
            vec![
                Quarters::from_quarter_count(6),
                Quarters::from_quarter_count(10),
                Quarters::from_quarter_count(14),
            ]
        );
        assert_eq!(config.c_grid.len(), 3);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "seed = 7\ncount_mode = sentences\n");
        let overrides = Overrides {
            seed: Some(99),
            lang: Some(Language::English),
            k: Some(4),
            ..Overrides::default()
        };
        let config = load_config(Some(&path), &overrides).unwrap();
        assert_eq!(config.seed, 99);
        assert_eq!(config.languages, vec![Language::English]);
        assert_eq!(config.k_en, 4);
        // --k narrowed by --lang en must leave the Chinese fold count alone.
        assert_eq!(config.k_zh, 5);
        assert_eq!(config.count_mode, CountMode::Sentences);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "seeed = 7\n");
        let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unknown config key"), "{text}");
        assert!(text.contains(":1:"), "{text}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn empty_grid_and_small_k_fail_validation() {
        let mut config = PipelineConfig::default();
        config.k_en = 1;
        assert!(config.validate().is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "alpha_grid = 2.0:1.0:0.25\n");
        assert!(load_config(Some(&path), &Overrides::default()).is_err());
    }

    #[test]
    fn off_lattice_grid_values_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "alpha_grid = 1.3,2.5\n");
        let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn date_window_must_be_ordered() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            "date_from = 2015-06-01\ndate_to = 2014-01-01\n",
        );
        assert!(load_config(Some(&path), &Overrides::default()).is_err());
    }

    #[test]
    fn date_window_needs_both_ends() {
        let dir = tempfile::tempdir().unwrap();
        for line in ["date_from = 2015-06-01\n", "date_to = 2015-06-01\n"] {
            let path = write_config(dir.path(), line);
            let err = load_config(Some(&path), &Overrides::default()).unwrap_err();
            assert_eq!(err.exit_code(), 1, "one-sided window must be a usage error");
        }
    }

    #[test]
    fn echo_is_sorted_and_complete() {
        let config = PipelineConfig::default();
        let echo = config.echo();
        assert_eq!(echo["seed"], "42");
        assert_eq!(echo["count_mode"], "tokens");
        assert_eq!(echo["languages"], "zh,en");
        let keys: Vec<&String> = echo.keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
