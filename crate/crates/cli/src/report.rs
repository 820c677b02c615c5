//! Report bundle assembly and emission.
//!
//! `emit_report` writes one file per section with stable names, in the
//! caller's choice of Markdown or TSV. The run manifest is always TSV —
//! it exists for machine verification, not reading. Percentages are
//! printed with one decimal, F1 scores with two. An empty section still
//! produces its file, header only, so consumers can distinguish "ran and
//! found nothing" from "never ran".

use crate::chart::emit_bar_chart;
use crate::config::ReportFormat;
use crate::error::{CliError, Result};
use crate::manifest::{render_manifest, ManifestInput};
use review_miner_core::analysis::CorpusSummary;
use review_miner_core::classifier::crossval::GridCell;
use review_miner_core::{HardSoftSummary, KeywordRanking, Language, PairRanking, Sentiment};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Everything the pipeline learned about one language slice.
#[derive(Debug, Clone)]
pub struct LanguageReport {
    pub language: Language,
    pub k: usize,
    pub grid: Vec<GridCell>,
    pub best: GridCell,
    pub counts: CorpusSummary,
    pub keyword_rankings: Vec<KeywordRanking>,
    pub pair_rankings: Vec<PairRanking>,
    pub hard_soft: Vec<HardSoftSummary>,
}

/// The full deliverable of a run. Identical configuration and inputs
/// produce an identical bundle, hence byte-identical report files.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    /// Machine-independent settings echo (no paths).
    pub settings: BTreeMap<String, String>,
    pub inputs: Vec<ManifestInput>,
    pub languages: Vec<LanguageReport>,
}

/// One report section: a title, a header row, and data rows.
struct Section {
    file_stem: String,
    title: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Section {
    fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Tsv => {
                let mut out = format!("# {}\n{}\n", self.title, self.header.join("\t"));
                for row in &self.rows {
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
                out
            }
            ReportFormat::Markdown => {
                let mut out = format!("# {}\n\n", self.title);
                out.push_str(&format!("| {} |\n", self.header.join(" | ")));
                out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
                for row in &self.rows {
                    out.push_str(&format!("| {} |\n", row.join(" | ")));
                }
                out
            }
        }
    }
}

/// Writes every section plus the hard/soft charts into `dir`. Returns the
/// paths written, in a fixed order.
pub fn emit_report(dir: &Path, bundle: &ReportBundle, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::output(dir.display().to_string(), e))?;
    let mut written = Vec::new();
    let mut emit = |name: String, content: String| -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::output(path.display().to_string(), e))?;
        written.push(path.clone());
        Ok(path)
    };

    for section in build_sections(bundle) {
        emit(
            format!("{}.{}", section.file_stem, format.extension()),
            section.render(format),
        )?;
    }

    // The manifest is format-independent.
    emit(
        "manifest.tsv".to_string(),
        render_manifest(&bundle.settings, &bundle.inputs),
    )?;

    // One chart per (language, sentiment) that has summaries.
    for report in &bundle.languages {
        for sentiment in [Sentiment::Positive, Sentiment::Negative] {
            let slice: Vec<HardSoftSummary> = report
                .hard_soft
                .iter()
                .filter(|s| s.sentiment == sentiment)
                .cloned()
                .collect();
            if slice.is_empty() {
                continue;
            }
            let title = format!(
                "Hard and soft attribute share — {} {}",
                report.language.code(),
                sentiment_word(sentiment)
            );
            let svg = emit_bar_chart(&title, &slice)?;
            emit(
                format!(
                    "hardsoft_{}_{}.svg",
                    report.language.code(),
                    sentiment.code()
                ),
                svg,
            )?;
        }
    }

    Ok(written)
}

fn sentiment_word(sentiment: Sentiment) -> &'static str {
    match sentiment {
        Sentiment::Positive => "positive",
        Sentiment::Negative => "negative",
    }
}

fn build_sections(bundle: &ReportBundle) -> Vec<Section> {
    let mut sections = Vec::new();

    sections.push(Section {
        file_stem: "best_config".into(),
        title: "Best configuration per language".into(),
        header: vec![
            "language",
            "alpha",
            "alpha_prime",
            "c",
            "k",
            "keywords",
            "mean_f1",
            "std_f1",
        ],
        rows: bundle
            .languages
            .iter()
            .map(|r| {
                vec![
                    r.language.code().to_string(),
                    r.best.alpha.to_string(),
                    r.best.alpha_prime.to_string(),
                    r.best.c.to_string(),
                    r.k.to_string(),
                    r.best.keyword_count.to_string(),
                    format!("{:.2}", r.best.result.mean_f1),
                    format!("{:.2}", r.best.result.std_f1),
                ]
            })
            .collect(),
    });

    for report in &bundle.languages {
        let code = report.language.code();

        sections.push(Section {
            file_stem: format!("grid_{code}"),
            title: format!("Cross-validation grid — {code}"),
            header: vec!["alpha", "alpha_prime", "c", "keywords", "mean_f1", "std_f1"],
            rows: report
                .grid
                .iter()
                .map(|cell| {
                    vec![
                        cell.alpha.to_string(),
                        cell.alpha_prime.to_string(),
                        cell.c.to_string(),
                        cell.keyword_count.to_string(),
                        format!("{:.2}", cell.result.mean_f1),
                        format!("{:.2}", cell.result.std_f1),
                    ]
                })
                .collect(),
        });

        sections.push(Section {
            file_stem: format!("counts_{code}"),
            title: format!("Corpus volume by price range — {code}"),
            header: vec![
                "bin",
                "price_range",
                "hotels",
                "reviews",
                "sentences",
                "positive",
                "negative",
            ],
            rows: report
                .counts
                .rows
                .iter()
                .map(|(bin, c)| {
                    vec![
                        bin.ordinal().to_string(),
                        bin.label(),
                        c.hotels.to_string(),
                        c.reviews.to_string(),
                        c.sentences.to_string(),
                        c.positive_sentences.to_string(),
                        c.negative_sentences.to_string(),
                    ]
                })
                .collect(),
        });

        sections.push(Section {
            file_stem: format!("keywords_{code}"),
            title: format!("Top keywords by price range — {code}"),
            header: vec!["sentiment", "bin", "rank", "keyword", "count"],
            rows: report
                .keyword_rankings
                .iter()
                .flat_map(|ranking| {
                    ranking.entries.iter().enumerate().map(|(i, (kw, n))| {
                        vec![
                            ranking.sentiment.code().to_string(),
                            ranking.price_bin.ordinal().to_string(),
                            (i + 1).to_string(),
                            kw.clone(),
                            n.to_string(),
                        ]
                    })
                })
                .collect(),
        });

        sections.push(Section {
            file_stem: format!("pairs_{code}"),
            title: format!("Top aspect pairs per keyword — {code}"),
            header: vec!["sentiment", "bin", "adjective", "rank", "noun", "count"],
            rows: report
                .pair_rankings
                .iter()
                .flat_map(|ranking| {
                    ranking.entries.iter().enumerate().map(|(i, (noun, n))| {
                        vec![
                            ranking.sentiment.code().to_string(),
                            ranking.price_bin.ordinal().to_string(),
                            ranking.adjective.clone(),
                            (i + 1).to_string(),
                            noun.clone(),
                            n.to_string(),
                        ]
                    })
                })
                .collect(),
        });

        sections.push(Section {
            file_stem: format!("hardsoft_{code}"),
            title: format!("Hard vs soft attribute share — {code}"),
            header: vec![
                "sentiment",
                "bin",
                "price_range",
                "keywords",
                "hard",
                "soft",
                "undefined",
            ],
            rows: report
                .hard_soft
                .iter()
                .map(|s| {
                    vec![
                        s.sentiment.code().to_string(),
                        s.price_bin.ordinal().to_string(),
                        s.price_bin.label(),
                        s.n_keywords.to_string(),
                        format!("{:.1}%", s.hard_pct),
                        format!("{:.1}%", s.soft_pct),
                        format!("{:.1}%", s.undefined_pct),
                    ]
                })
                .collect(),
        });
    }

    sections
}
