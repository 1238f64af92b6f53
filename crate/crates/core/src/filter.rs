//! Bisentence cleaning and length-based filtering.
//!
//! A pair is cleaned (surrounding quotation marks stripped) and then kept
//! only if neither side is empty, neither side contains HTML, neither side
//! exceeds `max_words`, and the word counts satisfy
//!
//! ```text
//! |WC(x) - WC(y)| < abs_diff_limit  OR  ratio(WC(x), WC(y)) < ratio_limit
//! ```
//!
//! where `ratio` is `WC(x) / WC(y)` in [`RatioMode::Literal`] and
//! `max / min` in [`RatioMode::Symmetric`].

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{word_count, RawBisentence};

const QUOTES: &[char] = &[
    '"', '\u{201C}', '\u{201D}', '\u{201E}', '\u{201F}', '\u{AB}', '\u{BB}',
];

static HTML: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"</?[A-Za-z][A-Za-z0-9]*(\s[^<>]*)?/?>|&(#[0-9]+|#[xX][0-9A-Fa-f]+|[A-Za-z][A-Za-z0-9]*);",
    )
    .unwrap()
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioMode {
    /// `WC(x) / WC(y)`, source over target.
    #[default]
    Literal,
    /// Longer side over shorter side.
    Symmetric,
}

impl std::str::FromStr for RatioMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(RatioMode::Literal),
            "symmetric" => Ok(RatioMode::Symmetric),
            other => Err(format!("unknown ratio mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub max_words: usize,
    pub abs_diff_limit: usize,
    pub ratio_limit: f64,
    pub ratio_mode: RatioMode,
    pub strip_quotes: bool,
    pub reject_html: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            max_words: 32,
            abs_diff_limit: 7,
            ratio_limit: 1.6,
            ratio_mode: RatioMode::Literal,
            strip_quotes: true,
            reject_html: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterConfigError {
    #[error("max_words must be at least 1")]
    MaxWords,
    #[error("ratio_limit must be positive and finite, got {0}")]
    RatioLimit(f64),
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), FilterConfigError> {
        if self.max_words == 0 {
            return Err(FilterConfigError::MaxWords);
        }
        if !(self.ratio_limit > 0.0 && self.ratio_limit.is_finite()) {
            return Err(FilterConfigError::RatioLimit(self.ratio_limit));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Empty,
    Html,
    TooLong,
    LengthRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_keep(self) -> bool {
        self == Verdict::Keep
    }
}

fn strip_quotes(text: &str) -> String {
    text.trim_matches(|c: char| c.is_whitespace() || QUOTES.contains(&c))
        .to_owned()
}

/// Strips leading and trailing quotation marks and whitespace from both
/// sides. Idempotent.
pub fn clean(pair: &RawBisentence, cfg: &FilterConfig) -> RawBisentence {
    if !cfg.strip_quotes {
        return pair.clone();
    }
    RawBisentence {
        source: strip_quotes(&pair.source),
        target: strip_quotes(&pair.target),
        subcorpus: pair.subcorpus.clone(),
    }
}

pub fn contains_html(text: &str) -> bool {
    HTML.is_match(text)
}

/// The word-count rule alone. `target_words` must be non-zero in literal mode.
pub fn passes_length_rule(source_words: usize, target_words: usize, cfg: &FilterConfig) -> bool {
    if source_words.abs_diff(target_words) < cfg.abs_diff_limit {
        return true;
    }
    let (num, den) = match cfg.ratio_mode {
        RatioMode::Literal => (source_words, target_words),
        RatioMode::Symmetric => (
            source_words.max(target_words),
            source_words.min(target_words),
        ),
    };
    den > 0 && (num as f64 / den as f64) < cfg.ratio_limit
}

/// Decides whether an already cleaned pair is kept. Checks run in the
/// order empty, html, too long, length rule; the first failure is reported.
pub fn keep(pair: &RawBisentence, cfg: &FilterConfig) -> Verdict {
    let (src, tgt) = (pair.source.trim(), pair.target.trim());
    if src.is_empty() || tgt.is_empty() {
        return Verdict::Reject(RejectReason::Empty);
    }
    if cfg.reject_html && (contains_html(src) || contains_html(tgt)) {
        return Verdict::Reject(RejectReason::Html);
    }
    let (wx, wy) = (word_count(src), word_count(tgt));
    if wx > cfg.max_words || wy > cfg.max_words {
        return Verdict::Reject(RejectReason::TooLong);
    }
    if !passes_length_rule(wx, wy, cfg) {
        return Verdict::Reject(RejectReason::LengthRule);
    }
    Verdict::Keep
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionCounts {
    pub html: usize,
    pub empty: usize,
    pub too_long: usize,
    pub length_rule: usize,
}

impl RejectionCounts {
    pub fn total(&self) -> usize {
        self.html + self.empty + self.too_long + self.length_rule
    }
}

/// Accounting for one filtering run; `kept + rejected.total() == total`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total: usize,
    pub kept: usize,
    pub rejected: RejectionCounts,
}

impl FilterReport {
    pub fn record(&mut self, verdict: Verdict) {
        self.total += 1;
        match verdict {
            Verdict::Keep => self.kept += 1,
            Verdict::Reject(RejectReason::Empty) => self.rejected.empty += 1,
            Verdict::Reject(RejectReason::Html) => self.rejected.html += 1,
            Verdict::Reject(RejectReason::TooLong) => self.rejected.too_long += 1,
            Verdict::Reject(RejectReason::LengthRule) => self.rejected.length_rule += 1,
        }
    }

    pub fn merge(&mut self, other: &FilterReport) {
        self.total += other.total;
        self.kept += other.kept;
        self.rejected.html += other.rejected.html;
        self.rejected.empty += other.rejected.empty;
        self.rejected.too_long += other.rejected.too_long;
        self.rejected.length_rule += other.rejected.length_rule;
    }
}

/// Cleans and filters a corpus. Returns the input positions of kept pairs
/// alongside their cleaned text.
pub fn filter_corpus(
    records: &[RawBisentence],
    cfg: &FilterConfig,
) -> (Vec<(usize, RawBisentence)>, FilterReport) {
    let mut report = FilterReport::default();
    let mut kept = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let cleaned = clean(rec, cfg);
        let verdict = keep(&cleaned, cfg);
        report.record(verdict);
        if verdict.is_keep() {
            kept.push((i, cleaned));
        }
    }
    (kept, report)
}
