//! Corpus-level BLEU-4 with uniform weights and a single reference per
//! hypothesis.
//!
//! Modified n-gram precision clips each hypothesis n-gram count by its count
//! in the paired reference; clipped matches and totals are summed over the
//! corpus before dividing. The brevity penalty is `exp(1 - r/c)` when the
//! hypothesis length `c` is below the reference length `r`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Any zero precision makes the score zero.
    #[default]
    None,
    /// `(m + 1) / (t + 1)` for orders 2 and up.
    AddOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BleuError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },
    #[error("no sentences to score")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuReport {
    pub score: f64,
    pub precisions: [f64; MAX_ORDER],
    /// Clipped matches per order.
    pub matches: [u64; MAX_ORDER],
    /// Hypothesis n-grams per order.
    pub totals: [u64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl BleuReport {
    pub fn summary(&self) -> String {
        format!(
            "BLEU = {:.2} {:.1}/{:.1}/{:.1}/{:.1} (BP = {:.3}, hyp_len = {}, ref_len = {})",
            self.score,
            100.0 * self.precisions[0],
            100.0 * self.precisions[1],
            100.0 * self.precisions[2],
            100.0 * self.precisions[3],
            self.brevity_penalty,
            self.hyp_length,
            self.ref_length
        )
    }
}

/// Sufficient statistics; sums of these over shards give the corpus totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl BleuStats {
    pub fn sentence<S: AsRef<str>>(hypothesis: &[S], reference: &[S]) -> Self {
        let hyp: Vec<&str> = hypothesis.iter().map(AsRef::as_ref).collect();
        let rf: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
        let mut stats = BleuStats {
            hyp_length: hyp.len() as u64,
            ref_length: rf.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let mut ref_counts: HashMap<&[&str], u64> = HashMap::new();
            for g in rf.windows(n) {
                *ref_counts.entry(g).or_default() += 1;
            }
            let mut hyp_counts: HashMap<&[&str], u64> = HashMap::new();
            for g in hyp.windows(n) {
                *hyp_counts.entry(g).or_default() += 1;
            }
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_length += other.hyp_length;
        self.ref_length += other.ref_length;
    }

    /// Turns summed counts into a report. An order with no hypothesis
    /// n-grams at all contributes precision 1.
    pub fn report(&self, smoothing: Smoothing) -> BleuReport {
        let precisions: [f64; MAX_ORDER] = std::array::from_fn(|n| {
            let (m, t) = (self.matches[n], self.totals[n]);
            match (smoothing, n) {
                _ if t == 0 => 1.0,
                (Smoothing::AddOne, 1..) => (m + 1) as f64 / (t + 1) as f64,
                _ => m as f64 / t as f64,
            }
        });
        let brevity_penalty = if self.hyp_length >= self.ref_length {
            1.0
        } else if self.hyp_length == 0 {
            0.0
        } else {
            (1.0 - self.ref_length as f64 / self.hyp_length as f64).exp()
        };
        let score = if precisions.contains(&0.0) {
            0.0
        } else {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            100.0 * brevity_penalty * log_mean.exp()
        };
        BleuReport {
            score,
            precisions,
            matches: self.matches,
            totals: self.totals,
            brevity_penalty,
            hyp_length: self.hyp_length,
            ref_length: self.ref_length,
        }
    }
}

pub fn corpus_bleu<S: AsRef<str>>(
    hypotheses: &[Vec<S>],
    references: &[Vec<S>],
) -> Result<BleuReport, BleuError> {
    corpus_bleu_with(hypotheses, references, Smoothing::None)
}

pub fn corpus_bleu_with<S: AsRef<str>>(
    hypotheses: &[Vec<S>],
    references: &[Vec<S>],
    smoothing: Smoothing,
) -> Result<BleuReport, BleuError> {
    if hypotheses.len() != references.len() {
        return Err(BleuError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(BleuError::Empty);
    }
    let mut stats = BleuStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add(&BleuStats::sentence(h, r));
    }
    Ok(stats.report(smoothing))
}

/// Whitespace tokenization used for scoring.
pub fn tokenize(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        tokenize(s)
    }

    #[test]
    fn identity_is_100() {
        let c = vec![toks("the cat sat on the mat"), toks("a b"), toks("")];
        let r = corpus_bleu(&c, &c).unwrap();
        assert_eq!(r.score, 100.0);
        assert_eq!(r.precisions, [1.0; 4]);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn clipping() {
        let r = corpus_bleu(&[toks("the the the")], &[toks("the cat")]).unwrap();
        assert_eq!((r.matches[0], r.totals[0]), (1, 3));
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let r = corpus_bleu(&[toks("")], &[toks("a cat")]).unwrap();
        assert_eq!(r.score, 0.0);
        assert_eq!(r.brevity_penalty, 0.0);
    }

    #[test]
    fn brevity_penalty_value() {
        let r = corpus_bleu(&[toks("a b c d")], &[toks("a b c d e f")]).unwrap();
        assert_eq!(r.precisions, [1.0; 4]);
        let bp = (1.0f64 - 6.0 / 4.0).exp();
        assert!((r.brevity_penalty - bp).abs() < 1e-15);
        assert!((r.score - 100.0 * bp).abs() < 1e-12);
    }

    #[test]
    fn add_one_smoothing() {
        let h = [toks("a b x y")];
        let rf = [toks("a b c d")];
        assert_eq!(corpus_bleu(&h, &rf).unwrap().score, 0.0);
        let s = corpus_bleu_with(&h, &rf, Smoothing::AddOne).unwrap();
        assert_eq!(s.precisions[0], 0.5);
        assert_eq!(s.precisions[1], 2.0 / 4.0);
        assert_eq!(s.precisions[3], 1.0 / 2.0);
        assert!(s.score > 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            corpus_bleu(&[toks("a")], &[]).unwrap_err(),
            BleuError::LengthMismatch {
                hypotheses: 1,
                references: 0
            }
        );
        assert_eq!(corpus_bleu::<&str>(&[], &[]).unwrap_err(), BleuError::Empty);
    }

    #[test]
    fn single_substitution_drops_below_100() {
        let refs = vec![toks("a b a c d e")];
        let hyps = vec![toks("a b b c d e")];
        assert!(corpus_bleu(&hyps, &refs).unwrap().score < 100.0);
    }

    #[test]
    fn summary_line() {
        let c = vec![toks("x y z w")];
        assert_eq!(
            corpus_bleu(&c, &c).unwrap().summary(),
            "BLEU = 100.00 100.0/100.0/100.0/100.0 (BP = 1.000, hyp_len = 4, ref_len = 4)"
        );
    }
}
