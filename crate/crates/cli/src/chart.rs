//! Static SVG bar chart of hard/soft/undefined attribute shares.
//!
//! One horizontal stacked bar per summary, bars of the same price bin
//! grouped together. The bar track is exactly [`BAR_WIDTH`] pixels wide and
//! the three segments always sum to the full track, so segment widths are
//! proportional to the percentages within a pixel. Output is a pure
//! function of the input — no timestamps, no randomness — so identical
//! summaries yield identical bytes.

use crate::error::{CliError, Result};
use review_miner_core::HardSoftSummary;
use std::fmt::Write;

/// Width of the bar track in pixels. Percentages map to pixels at 10 px
/// per percentage point.
pub const BAR_WIDTH: f64 = 1000.0;

const LABEL_WIDTH: f64 = 190.0;
const RIGHT_PAD: f64 = 30.0;
const TOP: f64 = 58.0;
const BAR_HEIGHT: f64 = 22.0;
const BAR_GAP: f64 = 6.0;
const GROUP_GAP: f64 = 16.0;
const BOTTOM_PAD: f64 = 20.0;

const HARD_FILL: &str = "#3b6ea5";
const SOFT_FILL: &str = "#e8a33d";
const UNDEFINED_FILL: &str = "#b0b7c3";

/// Renders the chart. Errors when there is nothing to draw or when the
/// summaries mix languages (one chart describes one corpus slice).
pub fn emit_bar_chart(title: &str, summaries: &[HardSoftSummary]) -> Result<String> {
    let Some(first) = summaries.first() else {
        return Err(CliError::Config(
            "bar chart needs at least one hard/soft summary".into(),
        ));
    };
    if summaries.iter().any(|s| s.language != first.language) {
        return Err(CliError::Config(
            "bar chart summaries must all describe the same language".into(),
        ));
    }

    let mixed_sentiments = summaries
        .iter()
        .any(|s| s.sentiment != first.sentiment);

    // Row layout: consecutive rows of the same bin sit BAR_GAP apart,
    // groups sit GROUP_GAP apart.
    let mut rows: Vec<(f64, &HardSoftSummary)> = Vec::with_capacity(summaries.len());
    let mut y = TOP;
    for (i, summary) in summaries.iter().enumerate() {
        if i > 0 {
            let same_group = summaries[i - 1].price_bin == summary.price_bin;
            y += BAR_HEIGHT + if same_group { BAR_GAP } else { GROUP_GAP };
        }
        rows.push((y, summary));
    }
    let height = y + BAR_HEIGHT + BOTTOM_PAD;
    let width = LABEL_WIDTH + BAR_WIDTH + RIGHT_PAD;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n"
    );
    let _ = write!(svg, "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>\n");
    let _ = write!(
        svg,
        "<text x=\"{LABEL_WIDTH:.0}\" y=\"24\" font-size=\"16\" fill=\"#1a1a1a\">{}</text>\n",
        escape(title)
    );

    // Legend.
    let legend = [
        ("hard", HARD_FILL),
        ("soft", SOFT_FILL),
        ("undefined", UNDEFINED_FILL),
    ];
    let mut lx = LABEL_WIDTH;
    for (name, fill) in legend {
        let _ = write!(
            svg,
            "<rect x=\"{lx:.0}\" y=\"34\" width=\"12\" height=\"12\" fill=\"{fill}\"/>\
             <text x=\"{:.0}\" y=\"44\" font-size=\"12\" fill=\"#1a1a1a\">{name}</text>\n",
            lx + 16.0
        );
        lx += 16.0 + 10.0 * (name.len() as f64) + 24.0;
    }

    for (y, summary) in rows {
        let label = if mixed_sentiments {
            format!(
                "{} ({})",
                summary.price_bin.label(),
                summary.sentiment.code()
            )
        } else {
            summary.price_bin.label()
        };
        let _ = write!(
            svg,
            "<text x=\"{:.0}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" fill=\"#1a1a1a\">{}</text>\n",
            LABEL_WIDTH - 10.0,
            y + BAR_HEIGHT / 2.0 + 4.0,
            escape(&label)
        );

        // Segment widths: 10 px per percentage point, the last segment
        // absorbs the rounding remainder so the stack spans the full track.
        let hard = round2(summary.hard_pct * 10.0);
        let soft = round2(summary.soft_pct * 10.0);
        let undefined = round2((BAR_WIDTH - hard - soft).max(0.0));
        let segments = [
            (hard, HARD_FILL, summary.hard_pct),
            (soft, SOFT_FILL, summary.soft_pct),
            (undefined, UNDEFINED_FILL, summary.undefined_pct),
        ];
        let mut x = LABEL_WIDTH;
        for (segment_width, fill, pct) in segments {
            if segment_width <= 0.0 {
                continue;
            }
            let _ = write!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{segment_width:.2}\" \
                 height=\"{BAR_HEIGHT:.0}\" fill=\"{fill}\"/>\n"
            );
            if segment_width >= 70.0 {
                let _ = write!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" \
                     fill=\"#ffffff\">{pct:.1}%</text>\n",
                    x + segment_width / 2.0,
                    y + BAR_HEIGHT / 2.0 + 4.0
                );
            }
            x += segment_width;
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn round2(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
