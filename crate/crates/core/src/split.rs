//! Seeded stratified train/dev/test splitting and subsampling.

use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::RawBisentence;

const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrataKey {
    #[default]
    Subcorpus,
    /// The whole corpus is one stratum.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    /// Train, dev and test fractions.
    pub ratios: [f64; 3],
    pub seed: u64,
    pub strata_key: StrataKey,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            ratios: [0.99, 0.005, 0.005],
            seed: 0,
            strata_key: StrataKey::Subcorpus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("split ratios must each lie in [0, 1] and sum to 1, got {0:?}")]
    Ratios([f64; 3]),
    #[error("cannot split an empty corpus")]
    Empty,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), SplitError> {
        let ok = self.ratios.iter().all(|r| (0.0..=1.0).contains(r))
            && (self.ratios.iter().sum::<f64>() - 1.0).abs() < RATIO_TOLERANCE;
        if ok {
            Ok(())
        } else {
            Err(SplitError::Ratios(self.ratios))
        }
    }
}

/// Positions into the input, grouped by split. Within a split, records are
/// ordered by stratum name and then by input position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn pick<'a, T>(indices: &[usize], records: &'a [T]) -> Vec<&'a T> {
        indices.iter().map(|&i| &records[i]).collect()
    }
}

fn floor_share(ratio: f64, n: usize) -> usize {
    // absorb representation error such as 0.29 * 100 = 28.999999999999996
    ((ratio * n as f64) + RATIO_TOLERANCE).floor() as usize
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// RNG for one stratum, keyed by the seed and the stratum name only.
fn stratum_rng(seed: u64, stratum: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(stratum.as_bytes()))
}

/// Stratified split. Each stratum is shuffled independently; dev and test
/// get `floor(ratio * size)` records and train takes the remainder.
pub fn split(records: &[RawBisentence], cfg: &SplitConfig) -> Result<Split, SplitError> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(SplitError::Empty);
    }
    let mut strata: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let key = match cfg.strata_key {
            StrataKey::Subcorpus => r.subcorpus.as_str(),
            StrataKey::None => "",
        };
        strata.entry(key).or_default().push(i);
    }

    let mut out = Split::default();
    for (name, members) in strata {
        let n = members.len();
        let n_dev = floor_share(cfg.ratios[1], n);
        let n_test = floor_share(cfg.ratios[2], n);
        let mut shuffled = members;
        shuffled.shuffle(&mut stratum_rng(cfg.seed, name));
        let (dev, rest) = shuffled.split_at(n_dev);
        let (test, train) = rest.split_at(n_test);
        for (dst, part) in [
            (&mut out.train, train),
            (&mut out.dev, dev),
            (&mut out.test, test),
        ] {
            let mut part = part.to_vec();
            part.sort_unstable();
            dst.extend(part);
        }
    }
    Ok(out)
}

/// Seeded sample of `n` positions out of `len` without replacement, in
/// ascending order. Returns everything when `n >= len`.
pub fn subsample(len: usize, n: usize, seed: u64) -> Vec<usize> {
    if n >= len {
        return (0..len).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, len, n).into_vec();
    picked.sort_unstable();
    picked
}
