//! Corpus statistics: per-subcorpus counts and source/target length
//! difference and ratio histograms at word and character level.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{word_count, RawBisentence};

/// Ratio bins of width 0.1 over [0, 5), then one overflow bin.
pub const RATIO_BINS: usize = 50;
const RATIO_SLOTS: usize = RATIO_BINS + 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcorpusCounts {
    pub bisentences: u64,
    pub source_tokens: u64,
    pub target_tokens: u64,
    pub tokens: u64,
}

impl SubcorpusCounts {
    fn add(&mut self, other: &SubcorpusCounts) {
        self.bisentences += other.bisentences;
        self.source_tokens += other.source_tokens;
        self.target_tokens += other.target_tokens;
        self.tokens += other.tokens;
    }
}

/// Difference (source minus target) and ratio (source over target)
/// histograms for one length measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthHistograms {
    pub difference: BTreeMap<i64, u64>,
    /// `ratio[i]` counts ratios in `[i/10, (i+1)/10)`; the last slot holds
    /// everything from 5.0 up, including a non-empty source over an empty
    /// target. Two empty sides count as ratio 1.
    pub ratio: Vec<u64>,
}

impl Default for LengthHistograms {
    fn default() -> Self {
        LengthHistograms {
            difference: BTreeMap::new(),
            ratio: vec![0; RATIO_SLOTS],
        }
    }
}

fn ratio_bin(x: u64, y: u64) -> usize {
    match (x, y) {
        (0, 0) => 10,
        (_, 0) => RATIO_BINS,
        // floor(10x / y) in exact integer arithmetic
        _ => ((10 * x / y) as usize).min(RATIO_BINS),
    }
}

impl LengthHistograms {
    fn observe(&mut self, x: u64, y: u64) {
        *self.difference.entry(x as i64 - y as i64).or_default() += 1;
        self.ratio[ratio_bin(x, y)] += 1;
    }

    fn merge(&mut self, other: &LengthHistograms) {
        for (k, v) in &other.difference {
            *self.difference.entry(*k).or_default() += v;
        }
        for (a, b) in self.ratio.iter_mut().zip(&other.ratio) {
            *a += b;
        }
    }

    pub fn mass(&self) -> u64 {
        self.ratio.iter().sum()
    }

    pub fn difference_csv(&self) -> String {
        let mut out = String::from("difference,count\n");
        for (k, v) in &self.difference {
            writeln!(out, "{k},{v}").unwrap();
        }
        out
    }

    pub fn ratio_csv(&self) -> String {
        let mut out = String::from("lower,upper,count\n");
        for (i, v) in self.ratio.iter().enumerate() {
            if i == RATIO_BINS {
                writeln!(out, "{:.1},inf,{v}", i as f64 / 10.0).unwrap();
            } else {
                writeln!(
                    out,
                    "{:.1},{:.1},{v}",
                    i as f64 / 10.0,
                    (i + 1) as f64 / 10.0
                )
                .unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub subcorpora: BTreeMap<String, SubcorpusCounts>,
    pub totals: SubcorpusCounts,
    pub words: LengthHistograms,
    pub chars: LengthHistograms,
}

impl CorpusStats {
    pub fn observe(&mut self, r: &RawBisentence) {
        let (ws, wt) = (word_count(&r.source) as u64, word_count(&r.target) as u64);
        let (cs, ct) = (
            r.source.chars().count() as u64,
            r.target.chars().count() as u64,
        );
        let counts = SubcorpusCounts {
            bisentences: 1,
            source_tokens: ws,
            target_tokens: wt,
            tokens: ws + wt,
        };
        self.subcorpora
            .entry(r.subcorpus.clone())
            .or_default()
            .add(&counts);
        self.totals.add(&counts);
        self.words.observe(ws, wt);
        self.chars.observe(cs, ct);
    }

    /// Field-wise sum; stats of a concatenation equal the merge of the parts.
    pub fn merge(&mut self, other: &CorpusStats) {
        for (k, v) in &other.subcorpora {
            self.subcorpora.entry(k.clone()).or_default().add(v);
        }
        self.totals.add(&other.totals);
        self.words.merge(&other.words);
        self.chars.merge(&other.chars);
    }
}

pub fn compute_stats<'a>(records: impl IntoIterator<Item = &'a RawBisentence>) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for r in records {
        stats.observe(r);
    }
    stats
}
