//! Stage orchestration.
//!
//! Each stage reads files, writes files, and is skipped when its
//! fingerprint — stage name, tool version, the config settings it reads,
//! and the content digests of every file it consumes — matches the cache
//! and its outputs still exist. Stages communicate only through files
//! under `<output_dir>/work`, so every subcommand can run standalone on
//! whatever its upstream stages left behind. Caching never changes
//! results: outputs are written deterministically, so cached and cold
//! runs produce identical bytes.
//!
//! The report stage is the one exception to caching — it is cheap and its
//! output set depends on its input, so it always re-emits.

use crate::config::{InputRole, PipelineConfig};
use crate::error::{CliError, Result};
use crate::manifest::{file_digest, fingerprint, ManifestInput, StageCache};
use crate::report::{emit_report, LanguageReport, ReportBundle};
use review_miner_core::analysis::{
    aggregate_hard_soft, load_attribute_lexicon, rank_keywords, summarize_counts, top_pairs,
    write_keyword_rankings, parse_keyword_rankings,
};
use review_miner_core::classifier::crossval::{grid_search, stratified_folds, train_on_all, GridCell, CvResult};
use review_miner_core::classifier::{read_model, read_training_data, write_model};
use review_miner_core::corpus::{
    filter_by_date, load_reviews, match_hotels, split_sentences, InputSchema, LoadMode, Review,
    SentenceRecord,
};
use review_miner_core::keywords::{select_keywords, EntropyTable, Quarters};
use review_miner_core::syntax::{extract_pairs, read_conllu, read_pairs, write_pairs, TagPolicy};
use review_miner_core::textproc::{TermClassCounts, Tokenizer};
use review_miner_core::{
    Error as CoreError, HardSoftSummary, KeywordRanking, Language, PairRanking, PriceBin,
    Sentiment, Token,
};
use std::collections::BTreeSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

pub struct Pipeline {
    config: PipelineConfig,
    work_dir: PathBuf,
    report_dir: PathBuf,
    cache: StageCache,
    tokenizer: Tokenizer,
}

impl Pipeline {
    pub fn new(config: PipelineConfig, cache_override: Option<PathBuf>) -> Pipeline {
        let work_dir = config.output_dir.join("work");
        let report_dir = config.output_dir.join("report");
        let cache = StageCache::resolve(&config.output_dir, cache_override);
        Pipeline {
            config,
            work_dir,
            report_dir,
            cache,
            tokenizer: Tokenizer::new(),
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn work_path(&self, name: &str) -> PathBuf {
        self.work_dir.join(name)
    }

    pub fn report_dir(&self) -> &Path {
        &self.report_dir
    }

    fn ensure_work_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.work_dir)
            .map_err(|e| CliError::output(self.work_dir.display().to_string(), e))
    }

    /// A work file another stage must have produced already.
    fn require_work(&self, name: &str, producer: &str) -> Result<PathBuf> {
        let path = self.work_path(name);
        if !path.exists() {
            return Err(CliError::Config(format!(
                "missing work file {}; run `review-miner {producer}` first",
                path.display()
            )));
        }
        Ok(path)
    }

    /// Runs one stage under the fingerprint cache. `parts` must cover
    /// everything the stage reads; `outputs` everything it writes.
    fn cached_stage(
        &self,
        stage: &'static str,
        scope: &str,
        parts: &[(&str, String)],
        outputs: &[PathBuf],
        run: impl FnOnce() -> Result<String>,
    ) -> Result<()> {
        self.ensure_work_dir()?;
        let mut owned: Vec<(&str, &str)> = vec![("stage", stage), ("scope", scope)];
        let version = env!("CARGO_PKG_VERSION");
        owned.push(("version", version));
        for (label, value) in parts {
            owned.push((label, value.as_str()));
        }
        let fp = fingerprint(&owned);
        let key = format!("{stage}_{scope}");
        if self.cache.is_fresh(&key, &fp, outputs) {
            eprintln!("stage {stage} [{scope}]: cached");
            return Ok(());
        }
        let summary = run()?;
        self.cache.record(&key, &fp)?;
        eprintln!("stage {stage} [{scope}]: {summary}");
        Ok(())
    }

    fn write_output(&self, path: &Path, content: &str) -> Result<()> {
        fs::write(path, content).map_err(|e| CliError::output(path.display().to_string(), e))
    }

    // ----- ingest ---------------------------------------------------------

    pub fn ingest(&self, language: Language) -> Result<()> {
        const STAGE: &str = "ingest";
        let code = language.code();
        let input = self
            .config
            .inputs(language)
            .require(InputRole::Reviews, language)?
            .to_path_buf();
        let parts = vec![
            ("input", file_digest(&input)?),
            ("strict", self.config.strict.to_string()),
            (
                "date_from",
                self.config.date_from.map(|d| d.to_string()).unwrap_or_default(),
            ),
            (
                "date_to",
                self.config.date_to.map(|d| d.to_string()).unwrap_or_default(),
            ),
        ];
        let reviews_out = self.work_path(&format!("reviews_{code}.jsonl"));
        let skipped_out = self.work_path(&format!("ingest_skipped_{code}.tsv"));
        self.cached_stage(
            STAGE,
            code,
            &parts,
            &[reviews_out.clone(), skipped_out.clone()],
            || {
                let mode = if self.config.strict {
                    LoadMode::Strict
                } else {
                    LoadMode::Lenient
                };
                let outcome = load_reviews(&input, InputSchema::ReviewsV1, mode)
                    .map_err(|e| CliError::stage(STAGE, code, e))?;
                let mut reviews = outcome.reviews;
                if let (Some(from), Some(to)) = (self.config.date_from, self.config.date_to) {
                    reviews = filter_by_date(reviews, from, to);
                    if reviews.is_empty() {
                        return Err(CliError::stage(
                            STAGE,
                            code,
                            CoreError::NoValidRecords { path: input.clone() },
                        ));
                    }
                }
                let mut jsonl = String::new();
                for review in &reviews {
                    let line = serde_json::to_string(review).map_err(|e| {
                        CliError::output(reviews_out.display().to_string(), e.into())
                    })?;
                    jsonl.push_str(&line);
                    jsonl.push('\n');
                }
                self.write_output(&reviews_out, &jsonl)?;
                let mut skipped = String::new();
                for diag in &outcome.skipped {
                    skipped.push_str(&format!("{}\t{}\n", diag.line, diag.message));
                }
                self.write_output(&skipped_out, &skipped)?;
                Ok(format!(
                    "{} reviews ({} lines skipped)",
                    reviews.len(),
                    outcome.skipped.len()
                ))
            },
        )
    }

    fn read_work_reviews(&self, language: Language) -> Result<Vec<Review>> {
        let code = language.code();
        let path = self.require_work(&format!("reviews_{code}.jsonl"), "ingest")?;
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
        let mut reviews = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let review: Review = serde_json::from_str(line).map_err(|e| {
                CliError::stage(
                    "work",
                    code,
                    CoreError::MalformedRecord {
                        path: path.clone(),
                        line: idx + 1,
                        message: e.to_string(),
                    },
                )
            })?;
            reviews.push(review);
        }
        Ok(reviews)
    }

    // ----- match ----------------------------------------------------------

    pub fn match_hotels(&self) -> Result<()> {
        const STAGE: &str = "match";
        if !(self.config.languages.contains(&Language::Chinese)
            && self.config.languages.contains(&Language::English))
        {
            return Err(CliError::Config(
                "hotel matching needs both review sources; drop --lang".into(),
            ));
        }
        let zh = self.require_work("reviews_zh.jsonl", "ingest")?;
        let en = self.require_work("reviews_en.jsonl", "ingest")?;
        let parts = vec![
            ("reviews_zh", file_digest(&zh)?),
            ("reviews_en", file_digest(&en)?),
        ];
        let matched_out = self.work_path("hotel_matches.tsv");
        let unmatched_out = self.work_path("hotel_unmatched.tsv");
        let notes_out = self.work_path("hotel_match_notes.txt");
        self.cached_stage(
            STAGE,
            "all",
            &parts,
            &[matched_out.clone(), unmatched_out.clone(), notes_out.clone()],
            || {
                let source_a = self.read_work_reviews(Language::Chinese)?;
                let source_b = self.read_work_reviews(Language::English)?;
                let join = match_hotels(&source_a, &source_b);
                let mut matched = String::new();
                for m in &join.matched {
                    matched.push_str(&format!(
                        "{}\t{}\t{}\n",
                        m.normalized_name, m.id_a, m.id_b
                    ));
                }
                self.write_output(&matched_out, &matched)?;
                let mut unmatched = String::new();
                for id in &join.unmatched_a {
                    unmatched.push_str(&format!("a\t{id}\n"));
                }
                for id in &join.unmatched_b {
                    unmatched.push_str(&format!("b\t{id}\n"));
                }
                self.write_output(&unmatched_out, &unmatched)?;
                self.write_output(&notes_out, &(join.diagnostics.join("\n") + "\n"))?;
                Ok(format!(
                    "{} matched, {}+{} unmatched",
                    join.matched.len(),
                    join.unmatched_a.len(),
                    join.unmatched_b.len()
                ))
            },
        )
    }

    // ----- segment --------------------------------------------------------

    pub fn segment(&self, language: Language) -> Result<()> {
        const STAGE: &str = "segment";
        let code = language.code();
        let reviews_path = self.require_work(&format!("reviews_{code}.jsonl"), "ingest")?;
        let parts = vec![
            ("reviews", file_digest(&reviews_path)?),
            ("strict", self.config.strict.to_string()),
        ];
        let sentences_out = self.work_path(&format!("sentences_{code}.tsv"));
        let skipped_out = self.work_path(&format!("segment_skipped_{code}.tsv"));
        self.cached_stage(
            STAGE,
            code,
            &parts,
            &[sentences_out.clone(), skipped_out.clone()],
            || {
                let reviews = self.read_work_reviews(language)?;
                let mut out = String::new();
                let mut skipped = String::new();
                let mut total = 0usize;
                for review in &reviews {
                    match split_sentences(review) {
                        Ok(sentences) => {
                            for s in sentences {
                                out.push_str(&format!(
                                    "{}\t{}\t{}\t{}\n",
                                    s.parent_review_id,
                                    s.index_in_review,
                                    s.price_bin.ordinal(),
                                    s.text
                                ));
                                total += 1;
                            }
                        }
                        Err(e) if !self.config.strict => {
                            skipped.push_str(&format!("{}\t{e}\n", review.review_id));
                        }
                        Err(e) => return Err(CliError::stage(STAGE, code, e)),
                    }
                }
                self.write_output(&sentences_out, &out)?;
                self.write_output(&skipped_out, &skipped)?;
                Ok(format!("{total} sentences from {} reviews", reviews.len()))
            },
        )
    }

    fn read_sentences_file(
        &self,
        path: &Path,
        language: Language,
        classified: bool,
    ) -> Result<Vec<SentenceRecord>> {
        read_sentences_work_file(path, language, classified)
    }
}

/// Reads a `sentences_*.tsv` (4 columns) or `classified_*.tsv` (5 columns)
/// work file back into records.
pub fn read_sentences_work_file(
    path: &Path,
    language: Language,
    classified: bool,
) -> Result<Vec<SentenceRecord>> {
    {
        let code = language.code();
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::output(path.display().to_string(), e))?;
        let malformed = |line: usize, message: String| {
            CliError::stage(
                "work",
                code,
                CoreError::MalformedRecord {
                    path: path.to_path_buf(),
                    line,
                    message,
                },
            )
        };
        let columns = if classified { 5 } else { 4 };
        let mut sentences = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let number = idx + 1;
            let fields: Vec<&str> = line.splitn(columns, '\t').collect();
            if fields.len() != columns {
                return Err(malformed(number, format!("expected {columns} columns")));
            }
            let index: u32 = fields[1]
                .parse()
                .map_err(|_| malformed(number, "bad sentence index".into()))?;
            let ordinal: u8 = fields[2]
                .parse()
                .map_err(|_| malformed(number, "bad price bin".into()))?;
            let price_bin = PriceBin::from_ordinal(ordinal)
                .filter(|b| *b != PriceBin::ALL_PRICES)
                .ok_or_else(|| malformed(number, format!("bad price bin {ordinal}")))?;
            let (sentiment, text_field) = if classified {
                let sentiment = Sentiment::from_code(fields[3])
                    .ok_or_else(|| malformed(number, format!("bad sentiment {:?}", fields[3])))?;
                (Some(sentiment), fields[4])
            } else {
                (None, fields[3])
            };
            sentences.push(SentenceRecord {
                parent_review_id: fields[0].to_string(),
                index_in_review: index,
                text: text_field.to_string(),
                language,
                price_bin,
                sentiment,
            });
        }
        Ok(sentences)
    }
}

impl Pipeline {
    // ----- train ----------------------------------------------------------

    fn tokenize_training(
        &self,
        language: Language,
    ) -> Result<(Vec<(Vec<Token>, Sentiment)>, PathBuf)> {
        let code = language.code();
        let input = self
            .config
            .inputs(language)
            .require(InputRole::Training, language)?
            .to_path_buf();
        let file = fs::File::open(&input)
            .map_err(|e| CliError::stage("train", code, CoreError::Io {
                path: input.clone(),
                source: e,
            }))?;
        let rows = read_training_data(BufReader::new(file))
            .map_err(|e| CliError::stage("train", code, e))?;
        let docs: Vec<(Vec<Token>, Sentiment)> = rows
            .into_iter()
            .map(|(text, sentiment)| (self.tokenizer.tokenize(&text, language), sentiment))
            .collect();
        Ok((docs, input))
    }

    pub fn train(&self, language: Language) -> Result<()> {
        const STAGE: &str = "train";
        let code = language.code();
        let input = self
            .config
            .inputs(language)
            .require(InputRole::Training, language)?
            .to_path_buf();
        let grid_echo = |grid: &[Quarters]| {
            grid.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
        };
        let parts = vec![
            ("training", file_digest(&input)?),
            ("alpha_grid", grid_echo(&self.config.alpha_grid)),
            ("alpha_prime_grid", grid_echo(&self.config.alpha_prime_grid)),
            ("c_grid", grid_echo(&self.config.c_grid)),
            ("k", self.config.k(language).to_string()),
            ("seed", self.config.seed.to_string()),
        ];
        let grid_out = self.work_path(&format!("grid_{code}.tsv"));
        let model_out = self.work_path(&format!("model_{code}.txt"));
        let keywords_out = self.work_path(&format!("keywords_{code}.tsv"));
        let folds_out = self.work_path(&format!("folds_{code}.tsv"));
        self.cached_stage(
            STAGE,
            code,
            &parts,
            &[
                grid_out.clone(),
                model_out.clone(),
                keywords_out.clone(),
                folds_out.clone(),
            ],
            || {
                let (docs, _) = self.tokenize_training(language)?;
                let k = self.config.k(language);
                let seed = self.config.seed;
                let outcome = grid_search(
                    &docs,
                    &self.config.alpha_grid,
                    &self.config.alpha_prime_grid,
                    &self.config.c_grid,
                    k,
                    seed,
                )
                .map_err(|e| CliError::stage(STAGE, code, e))?;

                self.write_output(&grid_out, &render_grid_file(&outcome.best, &outcome.cells))?;

                // The exact fold partition grid cells evaluated on, for
                // inspection and determinism checks.
                let labels: Vec<Sentiment> = docs.iter().map(|(_, l)| *l).collect();
                let folds = stratified_folds(&labels, k, seed)
                    .map_err(|e| CliError::stage(STAGE, code, e))?;
                let mut folds_text = String::new();
                for (fold_index, members) in folds.iter().enumerate() {
                    for doc_index in members {
                        folds_text.push_str(&format!("{fold_index}\t{doc_index}\n"));
                    }
                }
                self.write_output(&folds_out, &folds_text)?;

                let best = &outcome.best;
                let (model, _stats) = train_on_all(
                    &docs,
                    best.alpha,
                    best.alpha_prime,
                    best.c.as_f64(),
                    language,
                    seed,
                )
                .map_err(|e| CliError::stage(STAGE, code, e))?;
                let mut model_text = Vec::new();
                write_model(&mut model_text, &model)
                    .map_err(|e| CliError::output(model_out.display().to_string(), e))?;
                self.write_output(
                    &model_out,
                    std::str::from_utf8(&model_text).expect("model text is UTF-8"),
                )?;

                let counts = TermClassCounts::from_labeled(&docs);
                let table = EntropyTable::from_counts(&counts);
                let mut kw_text = Vec::new();
                review_miner_core::keywords::write_keywords(
                    &mut kw_text,
                    model.keyword_set(),
                    &table,
                )
                .map_err(|e| CliError::output(keywords_out.display().to_string(), e))?;
                self.write_output(
                    &keywords_out,
                    std::str::from_utf8(&kw_text).expect("keyword text is UTF-8"),
                )?;

                Ok(format!(
                    "best alpha={} alpha'={} C={} mean F1 {:.2} over {} cells",
                    best.alpha,
                    best.alpha_prime,
                    best.c,
                    best.result.mean_f1,
                    outcome.cells.len()
                ))
            },
        )
    }

    /// Standalone keyword dump. With explicit thresholds it selects fresh;
    /// otherwise it reuses the grid winner from `train`.
    pub fn keywords(
        &self,
        language: Language,
        alpha: Option<Quarters>,
        alpha_prime: Option<Quarters>,
    ) -> Result<()> {
        const STAGE: &str = "keywords";
        let code = language.code();
        let (alpha, alpha_prime) = match (alpha, alpha_prime) {
            (Some(a), Some(p)) => (a, p),
            (None, None) => {
                let grid_path = self.require_work(&format!("grid_{code}.tsv"), "train")?;
                let (best, _) = read_grid_file(&grid_path)?;
                (best.alpha, best.alpha_prime)
            }
            _ => {
                return Err(CliError::Config(
                    "--alpha and --alpha-prime must be given together".into(),
                ));
            }
        };
        let input = self
            .config
            .inputs(language)
            .require(InputRole::Training, language)?
            .to_path_buf();
        let parts = vec![
            ("training", file_digest(&input)?),
            ("alpha", alpha.to_string()),
            ("alpha_prime", alpha_prime.to_string()),
        ];
        let out = self.work_path(&format!("keywords_{code}.tsv"));
        self.cached_stage(STAGE, code, &parts, std::slice::from_ref(&out), || {
            let (docs, _) = self.tokenize_training(language)?;
            let counts = TermClassCounts::from_labeled(&docs);
            let table = EntropyTable::from_counts(&counts);
            let set = select_keywords(&table, alpha, alpha_prime);
            let mut text = Vec::new();
            review_miner_core::keywords::write_keywords(&mut text, &set, &table)
                .map_err(|e| CliError::output(out.display().to_string(), e))?;
            self.write_output(&out, std::str::from_utf8(&text).expect("keyword text is UTF-8"))?;
            Ok(format!(
                "{} positive + {} negative keywords at alpha={alpha} alpha'={alpha_prime}",
                set.positive().len(),
                set.negative().len()
            ))
        })
    }

    // ----- classify -------------------------------------------------------

    pub fn classify(&self, language: Language) -> Result<()> {
        const STAGE: &str = "classify";
        let code = language.code();
        let model_path = self.require_work(&format!("model_{code}.txt"), "train")?;
        let sentences_path = self.require_work(&format!("sentences_{code}.tsv"), "segment")?;
        let parts = vec![
            ("model", file_digest(&model_path)?),
            ("sentences", file_digest(&sentences_path)?),
        ];
        let out = self.work_path(&format!("classified_{code}.tsv"));
        self.cached_stage(STAGE, code, &parts, std::slice::from_ref(&out), || {
            let file = fs::File::open(&model_path)
                .map_err(|e| CliError::output(model_path.display().to_string(), e))?;
            let model = read_model(BufReader::new(file))
                .map_err(|e| CliError::stage(STAGE, code, e))?;
            let sentences = self.read_sentences_file(&sentences_path, language, false)?;
            let classified = review_miner_core::analysis::classify_corpus(
                &model,
                sentences,
                &self.tokenizer,
            )
            .map_err(|e| CliError::stage(STAGE, code, e))?;
            let mut text = String::new();
            let mut positive = 0usize;
            for s in &classified {
                let sentiment = s.sentiment.expect("classifier labels every sentence");
                if sentiment == Sentiment::Positive {
                    positive += 1;
                }
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    s.parent_review_id,
                    s.index_in_review,
                    s.price_bin.ordinal(),
                    sentiment.code(),
                    s.text
                ));
            }
            self.write_output(&out, &text)?;
            Ok(format!(
                "{} sentences: {} positive, {} negative",
                classified.len(),
                positive,
                classified.len() - positive
            ))
        })
    }

    // ----- pairs ----------------------------------------------------------

    pub fn pairs(&self, language: Language) -> Result<()> {
        const STAGE: &str = "pairs";
        let code = language.code();
        let input = self
            .config
            .inputs(language)
            .require(InputRole::Parses, language)?
            .to_path_buf();
        let parts = vec![("parses", file_digest(&input)?)];
        let out = self.work_path(&format!("pairs_{code}.tsv"));
        self.cached_stage(STAGE, code, &parts, std::slice::from_ref(&out), || {
            let sentences = read_conllu(&input).map_err(|e| CliError::stage(STAGE, code, e))?;
            let policy = TagPolicy::for_language(language);
            let mut pairs = Vec::new();
            for sentence in &sentences {
                pairs.extend(extract_pairs(sentence, &policy, language));
            }
            let mut text = Vec::new();
            write_pairs(&mut text, &pairs)
                .map_err(|e| CliError::output(out.display().to_string(), e))?;
            self.write_output(&out, std::str::from_utf8(&text).expect("pair text is UTF-8"))?;
            Ok(format!(
                "{} pairs from {} parsed sentences",
                pairs.len(),
                sentences.len()
            ))
        })
    }

    // ----- rank -----------------------------------------------------------

    pub fn rank(&self, language: Language) -> Result<()> {
        const STAGE: &str = "rank";
        let code = language.code();
        let classified_path = self.require_work(&format!("classified_{code}.tsv"), "classify")?;
        let model_path = self.require_work(&format!("model_{code}.txt"), "train")?;
        let pairs_path = self.require_work(&format!("pairs_{code}.tsv"), "pairs")?;
        let parts = vec![
            ("classified", file_digest(&classified_path)?),
            ("model", file_digest(&model_path)?),
            ("pairs", file_digest(&pairs_path)?),
            ("count_mode", self.config.count_mode.code().to_string()),
        ];
        let pos_out = self.work_path(&format!("rankings_{code}_pos.tsv"));
        let neg_out = self.work_path(&format!("rankings_{code}_neg.tsv"));
        let pair_out = self.work_path(&format!("pair_rankings_{code}.tsv"));
        self.cached_stage(
            STAGE,
            code,
            &parts,
            &[pos_out.clone(), neg_out.clone(), pair_out.clone()],
            || {
                let file = fs::File::open(&model_path)
                    .map_err(|e| CliError::output(model_path.display().to_string(), e))?;
                let model = read_model(BufReader::new(file))
                    .map_err(|e| CliError::stage(STAGE, code, e))?;
                let classified = self.read_sentences_file(&classified_path, language, true)?;
                let pairs_file = fs::File::open(&pairs_path)
                    .map_err(|e| CliError::output(pairs_path.display().to_string(), e))?;
                let pair_records = read_pairs(BufReader::new(pairs_file))
                    .map_err(|e| CliError::stage(STAGE, code, e))?;

                let bins: Vec<PriceBin> =
                    std::iter::once(PriceBin::ALL_PRICES).chain(PriceBin::concrete()).collect();
                let mut pair_text = String::new();
                let mut ranking_count = 0usize;
                let mut pair_ranking_count = 0usize;
                for (sentiment, out_path) in
                    [(Sentiment::Positive, &pos_out), (Sentiment::Negative, &neg_out)]
                {
                    let mut rankings = Vec::new();
                    for &bin in &bins {
                        let ranking = rank_keywords(
                            &classified,
                            model.keyword_set(),
                            language,
                            bin,
                            sentiment,
                            self.config.count_mode,
                            &self.tokenizer,
                        );
                        if !ranking.entries.is_empty() {
                            rankings.push(ranking);
                        }
                    }
                    ranking_count += rankings.len();
                    let mut text = Vec::new();
                    write_keyword_rankings(&mut text, &rankings)
                        .map_err(|e| CliError::output(out_path.display().to_string(), e))?;
                    self.write_output(
                        out_path,
                        std::str::from_utf8(&text).expect("ranking text is UTF-8"),
                    )?;

                    // Pair rankings for every ranked keyword, cell by cell.
                    for ranking in &rankings {
                        for (keyword, _) in &ranking.entries {
                            let pairs = top_pairs(
                                keyword,
                                &pair_records,
                                &classified,
                                ranking.price_bin,
                                sentiment,
                            );
                            if pairs.entries.is_empty() {
                                continue;
                            }
                            pair_ranking_count += 1;
                            for (rank, (noun, count)) in pairs.entries.iter().enumerate() {
                                pair_text.push_str(&format!(
                                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                                    sentiment.code(),
                                    ranking.price_bin.ordinal(),
                                    keyword,
                                    rank + 1,
                                    noun,
                                    count
                                ));
                            }
                        }
                    }
                }
                self.write_output(&pair_out, &pair_text)?;
                Ok(format!(
                    "{ranking_count} keyword rankings, {pair_ranking_count} pair rankings"
                ))
            },
        )
    }

    // ----- hardsoft -------------------------------------------------------

    pub fn hardsoft(&self, language: Language) -> Result<()> {
        const STAGE: &str = "hardsoft";
        let code = language.code();
        let pos_path = self.require_work(&format!("rankings_{code}_pos.tsv"), "rank")?;
        let neg_path = self.require_work(&format!("rankings_{code}_neg.tsv"), "rank")?;
        let lexicon_path = self
            .config
            .inputs(language)
            .require(InputRole::Lexicon, language)?
            .to_path_buf();
        let parts = vec![
            ("rankings_pos", file_digest(&pos_path)?),
            ("rankings_neg", file_digest(&neg_path)?),
            ("lexicon", file_digest(&lexicon_path)?),
        ];
        let out = self.work_path(&format!("hardsoft_{code}.tsv"));
        self.cached_stage(STAGE, code, &parts, std::slice::from_ref(&out), || {
            let lexicon =
                load_attribute_lexicon(&lexicon_path).map_err(|e| CliError::stage(STAGE, code, e))?;
            let mut text = String::new();
            let mut cells = 0usize;
            for (sentiment, path) in [
                (Sentiment::Positive, &pos_path),
                (Sentiment::Negative, &neg_path),
            ] {
                let file = fs::File::open(path)
                    .map_err(|e| CliError::output(path.display().to_string(), e))?;
                let rankings = parse_keyword_rankings(BufReader::new(file), language, sentiment)
                    .map_err(|e| CliError::stage(STAGE, code, e))?;
                for ranking in &rankings {
                    let summary = aggregate_hard_soft(ranking, &lexicon)
                        .map_err(|e| CliError::stage(STAGE, code, e))?;
                    text.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\n",
                        sentiment.code(),
                        summary.price_bin.ordinal(),
                        summary.n_keywords,
                        summary.hard_pct,
                        summary.soft_pct,
                        summary.undefined_pct
                    ));
                    cells += 1;
                }
            }
            self.write_output(&out, &text)?;
            Ok(format!("{cells} hard/soft cells"))
        })
    }

    // ----- report ---------------------------------------------------------

    /// Assembles the bundle from work files and emits the report. Not
    /// cached: emission is cheap and always refreshed.
    pub fn report(&self) -> Result<()> {
        let bundle = self.build_bundle()?;
        let written = emit_report(&self.report_dir, &bundle, self.config.format)?;
        eprintln!(
            "stage report [{}]: {} files in {}",
            self.config
                .languages
                .iter()
                .map(|l| l.code())
                .collect::<Vec<_>>()
                .join("+"),
            written.len(),
            self.report_dir.display()
        );
        Ok(())
    }

    fn build_bundle(&self) -> Result<ReportBundle> {
        let mut settings = self.config.echo();
        // Machine-local values would break byte-identity of relocated runs.
        for key in [
            "output_dir",
            "reviews_zh",
            "reviews_en",
            "parses_zh",
            "parses_en",
            "training_zh",
            "training_en",
            "lexicon_zh",
            "lexicon_en",
        ] {
            settings.remove(key);
        }

        let mut inputs = Vec::new();
        for &language in &self.config.languages {
            let code = language.code();
            let lang_inputs = self.config.inputs(language);
            for (role, label) in [
                (InputRole::Reviews, "reviews"),
                (InputRole::Parses, "parses"),
                (InputRole::Training, "training"),
                (InputRole::Lexicon, "lexicon"),
            ] {
                let path = lang_inputs.require(role, language)?;
                inputs.push(ManifestInput::for_file(&format!("{label}_{code}"), path)?);
            }
        }

        let mut languages = Vec::new();
        for &language in &self.config.languages {
            let code = language.code();
            let (best, cells) = read_grid_file(&self.require_work(&format!("grid_{code}.tsv"), "train")?)?;
            let reviews = self.read_work_reviews(language)?;
            let classified_path = self.require_work(&format!("classified_{code}.tsv"), "classify")?;
            let classified = self.read_sentences_file(&classified_path, language, true)?;
            let counts = summarize_counts(&reviews, &classified)
                .map_err(|e| CliError::stage("report", code, e))?;

            let mut keyword_rankings = Vec::new();
            for (sentiment, name) in [
                (Sentiment::Positive, format!("rankings_{code}_pos.tsv")),
                (Sentiment::Negative, format!("rankings_{code}_neg.tsv")),
            ] {
                let path = self.require_work(&name, "rank")?;
                let file = fs::File::open(&path)
                    .map_err(|e| CliError::output(path.display().to_string(), e))?;
                keyword_rankings.extend(
                    parse_keyword_rankings(BufReader::new(file), language, sentiment)
                        .map_err(|e| CliError::stage("report", code, e))?,
                );
            }

            let pair_rankings =
                read_pair_rankings_file(&self.require_work(&format!("pair_rankings_{code}.tsv"), "rank")?)?;
            let hard_soft =
                read_hardsoft_file(&self.require_work(&format!("hardsoft_{code}.tsv"), "hardsoft")?, language)?;

            languages.push(LanguageReport {
                language,
                k: self.config.k(language),
                grid: cells,
                best,
                counts,
                keyword_rankings,
                pair_rankings,
                hard_soft,
            });
        }

        Ok(ReportBundle {
            settings,
            inputs,
            languages,
        })
    }

    // ----- all ------------------------------------------------------------

    pub fn run_all(&self) -> Result<()> {
        for &language in &self.config.languages {
            self.ingest(language)?;
        }
        if self.config.languages.len() == 2 {
            self.match_hotels()?;
        }
        for &language in &self.config.languages {
            self.segment(language)?;
            self.train(language)?;
            self.classify(language)?;
            self.pairs(language)?;
            self.rank(language)?;
            self.hardsoft(language)?;
        }
        self.report()
    }
}

// ----- work file formats ----------------------------------------------

/// Grid dump: a `best` row naming the winning triple, then one `cell` row
/// per grid point in grid order, with full-precision statistics and the
/// per-fold F1 list.
pub fn render_grid_file(best: &GridCell, cells: &[GridCell]) -> String {
    let mut text = format!(
        "best\t{}\t{}\t{}\n",
        best.alpha, best.alpha_prime, best.c
    );
    for cell in cells {
        let folds = cell
            .result
            .per_fold_f1
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&format!(
            "cell\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            cell.alpha,
            cell.alpha_prime,
            cell.c,
            cell.keyword_count,
            cell.result.mean_f1,
            cell.result.std_f1,
            folds
        ));
    }
    text
}

/// Reads a grid dump back: the winning cell plus every cell in grid order.
pub fn read_grid_file(path: &Path) -> Result<(GridCell, Vec<GridCell>)> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::output(path.display().to_string(), e))?;
    let malformed = |line: usize, message: String| {
        CliError::stage(
            "work",
            "grid",
            CoreError::MalformedRecord {
                path: path.to_path_buf(),
                line,
                message,
            },
        )
    };
    let mut best_triple: Option<(Quarters, Quarters, Quarters)> = None;
    let mut cells = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let number = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.first().copied() {
            Some("best") if fields.len() == 4 => {
                let parse = |s: &str| {
                    s.parse::<Quarters>()
                        .map_err(|e| malformed(number, e.to_string()))
                };
                best_triple = Some((parse(fields[1])?, parse(fields[2])?, parse(fields[3])?));
            }
            Some("cell") if fields.len() == 8 => {
                let parse_q = |s: &str| {
                    s.parse::<Quarters>()
                        .map_err(|e| malformed(number, e.to_string()))
                };
                let parse_f = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| malformed(number, format!("bad float {s:?}")))
                };
                let per_fold: Vec<f64> = fields[7]
                    .split(',')
                    .map(parse_f)
                    .collect::<Result<_>>()?;
                cells.push(GridCell {
                    alpha: parse_q(fields[1])?,
                    alpha_prime: parse_q(fields[2])?,
                    c: parse_q(fields[3])?,
                    keyword_count: fields[4]
                        .parse()
                        .map_err(|_| malformed(number, "bad keyword count".into()))?,
                    result: CvResult {
                        mean_f1: parse_f(fields[5])?,
                        std_f1: parse_f(fields[6])?,
                        k: per_fold.len(),
                        per_fold_f1: per_fold,
                    },
                });
            }
            _ => return Err(malformed(number, "unrecognized grid row".into())),
        }
    }
    let (alpha, alpha_prime, c) =
        best_triple.ok_or_else(|| malformed(0, "missing best row".into()))?;
    let best = cells
        .iter()
        .find(|cell| cell.alpha == alpha && cell.alpha_prime == alpha_prime && cell.c == c)
        .cloned()
        .ok_or_else(|| malformed(0, "best row names no cell".into()))?;
    Ok((best, cells))
}

fn read_pair_rankings_file(path: &Path) -> Result<Vec<PairRanking>> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::output(path.display().to_string(), e))?;
    let malformed = |line: usize, message: String| {
        CliError::stage(
            "work",
            "pairs",
            CoreError::MalformedRecord {
                path: path.to_path_buf(),
                line,
                message,
            },
        )
    };
    let mut rankings: Vec<PairRanking> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let number = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(malformed(number, "expected 6 columns".into()));
        }
        let sentiment = Sentiment::from_code(fields[0])
            .ok_or_else(|| malformed(number, format!("bad sentiment {:?}", fields[0])))?;
        let ordinal: u8 = fields[1]
            .parse()
            .map_err(|_| malformed(number, "bad price bin".into()))?;
        let price_bin = PriceBin::from_ordinal(ordinal)
            .ok_or_else(|| malformed(number, format!("bad price bin {ordinal}")))?;
        let adjective = fields[2].to_string();
        let noun = fields[4].to_string();
        let count: u64 = fields[5]
            .parse()
            .map_err(|_| malformed(number, "bad count".into()))?;
        let start_new = match rankings.last() {
            Some(last) => {
                last.sentiment != sentiment
                    || last.price_bin != price_bin
                    || last.adjective != adjective
            }
            None => true,
        };
        if start_new {
            rankings.push(PairRanking {
                adjective,
                price_bin,
                sentiment,
                entries: Vec::new(),
            });
        }
        rankings
            .last_mut()
            .expect("just pushed or verified")
            .entries
            .push((noun, count));
    }
    Ok(rankings)
}

fn read_hardsoft_file(path: &Path, language: Language) -> Result<Vec<HardSoftSummary>> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::output(path.display().to_string(), e))?;
    let malformed = |line: usize, message: String| {
        CliError::stage(
            "work",
            "hardsoft",
            CoreError::MalformedRecord {
                path: path.to_path_buf(),
                line,
                message,
            },
        )
    };
    let mut summaries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let number = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(malformed(number, "expected 6 columns".into()));
        }
        let sentiment = Sentiment::from_code(fields[0])
            .ok_or_else(|| malformed(number, format!("bad sentiment {:?}", fields[0])))?;
        let ordinal: u8 = fields[1]
            .parse()
            .map_err(|_| malformed(number, "bad price bin".into()))?;
        let price_bin = PriceBin::from_ordinal(ordinal)
            .ok_or_else(|| malformed(number, format!("bad price bin {ordinal}")))?;
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| malformed(number, format!("bad float {s:?}")))
        };
        summaries.push(HardSoftSummary {
            language,
            price_bin,
            sentiment,
            n_keywords: fields[2]
                .parse()
                .map_err(|_| malformed(number, "bad keyword count".into()))?,
            hard_pct: parse_f(fields[3])?,
            soft_pct: parse_f(fields[4])?,
            undefined_pct: parse_f(fields[5])?,
        });
    }
    Ok(summaries)
}

/// Keyword universe of a ranking dump, used by acceptance checks.
pub fn ranking_keywords(rankings: &[KeywordRanking]) -> BTreeSet<String> {
    rankings
        .iter()
        .flat_map(|r| r.entries.iter().map(|(k, _)| k.clone()))
        .collect()
}
