//! Line-oriented corpus files: `source<TAB>target<TAB>subcorpus` TSV, or two
//! aligned one-sentence-per-line files.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An aligned sentence pair before any filtering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawBisentence {
    pub source: String,
    pub target: String,
    pub subcorpus: String,
}

impl RawBisentence {
    pub fn new(source: &str, target: &str, subcorpus: &str) -> Self {
        RawBisentence {
            source: source.to_owned(),
            target: target.to_owned(),
            subcorpus: subcorpus.to_owned(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: expected 2 or 3 tab-separated columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("aligned files differ in length ({source_lines} vs {target_lines} lines)")]
    Misaligned {
        source_lines: usize,
        target_lines: usize,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn lines<R: BufRead>(reader: R) -> impl Iterator<Item = io::Result<String>> {
    reader.lines().map(|l| {
        l.map(|mut s| {
            if s.ends_with('\r') {
                s.pop();
            }
            s
        })
    })
}

/// Reads corpus TSV. A missing third column takes `default_subcorpus`.
pub fn read_tsv<R: BufRead>(
    reader: R,
    default_subcorpus: &str,
) -> Result<Vec<RawBisentence>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in lines(reader).enumerate() {
        let line = line?;
        let cols: Vec<&str> = line.split('\t').collect();
        let rec = match cols.as_slice() {
            [s, t] => RawBisentence::new(s, t, default_subcorpus),
            [s, t, c] => RawBisentence::new(s, t, c),
            _ if line.is_empty() => RawBisentence::new("", "", default_subcorpus),
            _ => {
                return Err(CorpusError::Columns {
                    line: i + 1,
                    found: cols.len(),
                })
            }
        };
        out.push(rec);
    }
    Ok(out)
}

/// Reads two line-aligned files into bisentences of a single subcorpus.
pub fn read_aligned<R1: BufRead, R2: BufRead>(
    source: R1,
    target: R2,
    subcorpus: &str,
) -> Result<Vec<RawBisentence>, CorpusError> {
    let src: Vec<String> = lines(source).collect::<io::Result<_>>()?;
    let tgt: Vec<String> = lines(target).collect::<io::Result<_>>()?;
    if src.len() != tgt.len() {
        return Err(CorpusError::Misaligned {
            source_lines: src.len(),
            target_lines: tgt.len(),
        });
    }
    Ok(src
        .into_iter()
        .zip(tgt)
        .map(|(s, t)| RawBisentence {
            source: s,
            target: t,
            subcorpus: subcorpus.to_owned(),
        })
        .collect())
}

pub fn write_tsv<'a, W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = &'a RawBisentence>,
) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}\t{}\t{}", r.source, r.target, r.subcorpus)?;
    }
    Ok(())
}

/// Whitespace word count: the number of maximal non-whitespace runs.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}
