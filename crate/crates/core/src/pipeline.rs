//! File-level steps (filter, split, stats, eligibility, augment) and the
//! end-to-end run that chains them.
//!
//! Every step reads and writes plain files so that running the steps one at
//! a time produces the same bytes as [`run_pipeline`]. All randomness comes
//! from configured seeds.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{
    diagnose, screen, AugmentError, AugmentedPair, DiagnoseConfig, EligibilityReport, EligiblePair,
    Flag, Generator, Language, ParsedBisentence, Side,
};
use crate::conllu::{
    parse_conllu_with, write_conllu, ConlluError, DepSentence, ParseOptions, Token,
};
use crate::corpus::{read_tsv, write_tsv, CorpusError, RawBisentence};
use crate::deptree::{LabelSets, Relation, TreeError};
use crate::filter::{filter_corpus, FilterConfig, FilterReport};
use crate::split::{split, subsample, SplitConfig, SplitError, StrataKey};
use crate::stats::{compute_stats, CorpusStats};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", .path.display())]
    Conllu { path: PathBuf, source: ConlluError },
    #[error("{}: {source}", .path.display())]
    Corpus { path: PathBuf, source: CorpusError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Augment(#[from] AugmentError),
}

impl From<SplitError> for PipelineError {
    fn from(e: SplitError) -> Self {
        match e {
            SplitError::Ratios(_) => PipelineError::Config(e.to_string()),
            SplitError::Empty => PipelineError::Data(e.to_string()),
        }
    }
}

impl From<TreeError> for PipelineError {
    fn from(e: TreeError) -> Self {
        PipelineError::Config(e.to_string())
    }
}

type Result<T, E = PipelineError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut out = File::create(path)
        .map(BufWriter::new)
        .map_err(io_err(path))?;
    write(&mut out)
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

/// Reads a CoNLL-U file. In lenient mode invalid blocks are replaced by a
/// one-token placeholder so positions stay aligned with a parallel file.
pub fn read_conllu(path: &Path, lenient: bool) -> Result<Vec<DepSentence>> {
    let outcome = parse_conllu_with(open(path)?, ParseOptions { lenient }).map_err(|source| {
        PipelineError::Conllu {
            path: path.to_owned(),
            source,
        }
    })?;
    if outcome.skipped.is_empty() {
        return Ok(outcome.sentences);
    }
    log::warn!(
        "{}: {} invalid sentences replaced by placeholders",
        path.display(),
        outcome.skipped.len()
    );
    let skipped: HashSet<usize> = outcome.skipped.iter().map(|(p, _)| *p).collect();
    let mut valid = outcome.sentences.into_iter();
    Ok((0..outcome.blocks)
        .map(|pos| {
            if skipped.contains(&pos) {
                placeholder(pos + 1)
            } else {
                valid.next().expect("one sentence per valid block")
            }
        })
        .collect())
}

fn placeholder(position: usize) -> DepSentence {
    let mut token = Token::new(1, "_", "X", 0, "root");
    token.misc = "Placeholder=Yes".to_owned();
    DepSentence::new(vec![token])
        .expect("single root token is valid")
        .with_sent_id(position.to_string())
}

pub fn write_conllu_file(path: &Path, sentences: &[DepSentence]) -> Result<()> {
    write_file(path, |w| write_conllu(w, sentences))
}

pub fn read_corpus(path: &Path, default_subcorpus: &str) -> Result<Vec<RawBisentence>> {
    read_tsv(open(path)?, default_subcorpus).map_err(|source| PipelineError::Corpus {
        path: path.to_owned(),
        source,
    })
}

pub fn write_corpus<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a RawBisentence>,
) -> Result<()> {
    write_file(path, |w| write_tsv(w, records))
}

/// Corpus records, optionally with source and target parses aligned 1:1.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub records: Vec<RawBisentence>,
    pub parses: Option<(Vec<DepSentence>, Vec<DepSentence>)>,
}

/// Where a dataset lives: `{stem}.tsv` plus optional `{stem}.src.conllu`
/// and `{stem}.tgt.conllu`.
pub fn dataset_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf, PathBuf) {
    (
        dir.join(format!("{stem}.tsv")),
        dir.join(format!("{stem}.src.conllu")),
        dir.join(format!("{stem}.tgt.conllu")),
    )
}

impl Dataset {
    pub fn load(
        corpus: &Path,
        parses: Option<(&Path, &Path)>,
        default_subcorpus: &str,
        lenient: bool,
    ) -> Result<Self> {
        let records = read_corpus(corpus, default_subcorpus)?;
        let parses = match parses {
            None => None,
            Some((src, tgt)) => {
                let (s, t) = (read_conllu(src, lenient)?, read_conllu(tgt, lenient)?);
                if s.len() != records.len() || t.len() != records.len() {
                    return Err(PipelineError::Data(format!(
                        "{} has {} records but the parses have {} source and {} target sentences",
                        corpus.display(),
                        records.len(),
                        s.len(),
                        t.len()
                    )));
                }
                Some((s, t))
            }
        };
        Ok(Dataset { records, parses })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            parses: self.parses.as_ref().map(|(s, t)| {
                (
                    indices.iter().map(|&i| s[i].clone()).collect(),
                    indices.iter().map(|&i| t[i].clone()).collect(),
                )
            }),
        }
    }

    /// Writes `{stem}.tsv` and, when parses are attached, the two CoNLL-U files.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let (tsv, src, tgt) = dataset_paths(dir, stem);
        write_corpus(&tsv, &self.records)?;
        if let Some((s, t)) = &self.parses {
            write_conllu_file(&src, s)?;
            write_conllu_file(&tgt, t)?;
        }
        Ok(())
    }
}

/// Pairs aligned parses into bisentences. Ids are source `sent_id`s when
/// present and unique, otherwise 1-based positions.
pub fn pair_parses(
    source: Vec<DepSentence>,
    target: Vec<DepSentence>,
    subcorpora: Option<&[RawBisentence]>,
) -> Result<Vec<ParsedBisentence>> {
    if source.len() != target.len() {
        return Err(PipelineError::Data(format!(
            "source has {} sentences, target has {}",
            source.len(),
            target.len()
        )));
    }
    let ids: Vec<Option<&str>> = source.iter().map(DepSentence::sent_id).collect();
    let unique =
        ids.iter().all(Option::is_some) && ids.iter().collect::<HashSet<_>>().len() == ids.len();
    if !unique {
        log::info!("source sent_ids missing or repeated; using positions as ids");
    }
    let ids: Vec<String> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| match id {
            Some(id) if unique => (*id).to_owned(),
            _ => (i + 1).to_string(),
        })
        .collect();
    Ok(source
        .into_iter()
        .zip(target)
        .zip(ids)
        .enumerate()
        .map(|(i, ((s, t), id))| ParsedBisentence {
            id,
            source: s,
            target: t,
            subcorpus: subcorpora.map_or_else(String::new, |r| r[i].subcorpus.clone()),
        })
        .collect())
}

/// Manifest rows `id<TAB>src_ref<TAB>tgt_ref<TAB>subcorpus`, where a ref is
/// `path#sent_id` (or `path#N` for the N-th sentence, 1-based). Paths are
/// relative to the manifest's directory.
pub fn load_manifest(path: &Path, lenient: bool) -> Result<Vec<ParsedBisentence>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut files: HashMap<PathBuf, Vec<DepSentence>> = HashMap::new();
    let mut resolve = |reference: &str, line: usize| -> Result<DepSentence> {
        let (file, key) = reference.rsplit_once('#').ok_or_else(|| {
            PipelineError::Data(format!(
                "{}:{line}: reference `{reference}` lacks `#`",
                path.display()
            ))
        })?;
        let file = base.join(file);
        if !files.contains_key(&file) {
            let sents = read_conllu(&file, lenient)?;
            files.insert(file.clone(), sents);
        }
        let sents = &files[&file];
        sents
            .iter()
            .find(|s| s.sent_id() == Some(key))
            .or_else(|| {
                key.parse::<usize>()
                    .ok()
                    .and_then(|n| n.checked_sub(1))
                    .and_then(|i| sents.get(i))
            })
            .cloned()
            .ok_or_else(|| {
                PipelineError::Data(format!(
                    "{}:{line}: `{reference}` not found",
                    path.display()
                ))
            })
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(PipelineError::Data(format!(
                "{}:{}: expected 4 columns, found {}",
                path.display(),
                i + 1,
                cols.len()
            )));
        }
        out.push(ParsedBisentence {
            id: cols[0].to_owned(),
            source: resolve(cols[1], i + 1)?,
            target: resolve(cols[2], i + 1)?,
            subcorpus: cols[3].to_owned(),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Steps

pub const FILTER_REPORT: &str = "filter_report.json";
pub const STATS_JSON: &str = "stats.json";
pub const ELIGIBILITY_JSON: &str = "eligibility.json";
pub const AUGMENTED_TSV: &str = "augmented.tsv";
pub const PROVENANCE_JSONL: &str = "provenance.jsonl";

/// Cleans and filters; writes `filtered.*` and the report.
pub fn filter_step(
    input: &Dataset,
    cfg: &FilterConfig,
    out_dir: &Path,
) -> Result<(Dataset, FilterReport)> {
    cfg.validate()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let (kept, report) = filter_corpus(&input.records, cfg);
    let positions: Vec<usize> = kept.iter().map(|(i, _)| *i).collect();
    let mut filtered = input.subset(&positions);
    filtered.records = kept.into_iter().map(|(_, r)| r).collect();
    filtered.write(out_dir, "filtered")?;
    write_json(&out_dir.join(FILTER_REPORT), &report)?;
    Ok((filtered, report))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    /// Keep only this subcorpus in all three splits.
    pub only_subcorpus: Option<String>,
    /// Subsample the training split to at most this many records.
    pub train_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

/// Stratified split, optional subcorpus restriction and train subsampling;
/// writes `train.*`, `dev.*` and `test.*`.
pub fn split_step(
    input: &Dataset,
    cfg: &SplitConfig,
    sample: &SampleConfig,
    out_dir: &Path,
) -> Result<(Dataset, SplitSummary)> {
    let parts = split(&input.records, cfg)?;
    let keep = |v: Vec<usize>| -> Vec<usize> {
        match &sample.only_subcorpus {
            Some(name) => v
                .into_iter()
                .filter(|&i| &input.records[i].subcorpus == name)
                .collect(),
            None => v,
        }
    };
    let mut train = keep(parts.train);
    let (dev, test) = (keep(parts.dev), keep(parts.test));
    if let Some(n) = sample.train_size {
        train = subsample(train.len(), n, cfg.seed)
            .into_iter()
            .map(|i| train[i])
            .collect();
    }
    let train_set = input.subset(&train);
    train_set.write(out_dir, "train")?;
    input.subset(&dev).write(out_dir, "dev")?;
    input.subset(&test).write(out_dir, "test")?;
    let summary = SplitSummary {
        train: train.len(),
        dev: dev.len(),
        test: test.len(),
    };
    Ok((train_set, summary))
}

/// Writes `stats.json` and the four histogram CSVs.
pub fn stats_step(records: &[RawBisentence], out_dir: &Path) -> Result<CorpusStats> {
    let stats = compute_stats(records);
    write_json(&out_dir.join(STATS_JSON), &stats)?;
    for (name, hist) in [("words", &stats.words), ("chars", &stats.chars)] {
        let diff = hist.difference_csv();
        let ratio = hist.ratio_csv();
        write_file(&out_dir.join(format!("{name}_difference.csv")), |w| {
            w.write_all(diff.as_bytes())
        })?;
        write_file(&out_dir.join(format!("{name}_ratio.csv")), |w| {
            w.write_all(ratio.as_bytes())
        })?;
    }
    Ok(stats)
}

/// Screens parsed pairs; writes `eligibility.json` when `out_dir` is given.
pub fn eligibility_step(
    pairs: &[ParsedBisentence],
    labels: &LabelSets,
    out_dir: Option<&Path>,
) -> Result<(Vec<EligiblePair>, EligibilityReport)> {
    labels.validate()?;
    let (eligible, report) = screen(pairs, labels);
    if let Some(dir) = out_dir {
        write_json(&dir.join(ELIGIBILITY_JSON), &report)?;
    }
    Ok((eligible, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub strategy: Relation,
    /// Augmented pairs per base training pair.
    pub ratio: f64,
    /// Fixed output count; overrides `ratio` when set.
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub subject_labels: Vec<String>,
    pub object_labels: Vec<String>,
    pub source_lang: String,
    pub target_lang: String,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            strategy: Relation::Object,
            ratio: 0.5,
            count: None,
            seed: None,
            subject_labels: vec!["nsubj".to_owned()],
            object_labels: vec!["obj".to_owned()],
            source_lang: "en".to_owned(),
            target_lang: "hu".to_owned(),
        }
    }
}

impl AugmentConfig {
    pub fn labels(&self) -> Result<LabelSets> {
        Ok(LabelSets::new(
            self.subject_labels.clone(),
            self.object_labels.clone(),
        )?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio >= 0.0 && self.ratio.is_finite()) {
            return Err(PipelineError::Config(format!(
                "augment ratio must be non-negative, got {}",
                self.ratio
            )));
        }
        self.labels().map(|_| ())
    }

    /// `count`, or `round(ratio * base_size)`.
    pub fn target_count(&self, base_size: usize) -> usize {
        self.count
            .unwrap_or_else(|| (self.ratio * base_size as f64).round() as usize)
    }

    fn diagnose_config(&self) -> DiagnoseConfig {
        DiagnoseConfig {
            source: self.source_lang.parse().unwrap_or(Language::Other),
            target: self.target_lang.parse().unwrap_or(Language::Other),
        }
    }
}

/// One line of the provenance sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceRecord<'a> {
    pub recipient_id: &'a str,
    pub donor_id: &'a str,
    pub strategy: Relation,
    pub seed: Option<u64>,
    pub flags: &'a [Flag],
    pub source_inserted: [usize; 2],
    pub target_inserted: [usize; 2],
    pub source_removed: Vec<&'a str>,
    pub target_removed: Vec<&'a str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AugmentSummary {
    pub eligible: usize,
    pub requested: usize,
    pub generated: usize,
    pub shortfall: usize,
    pub flagged: usize,
}

/// Generates swaps from an eligible pool and writes `augmented.tsv` and
/// `provenance.jsonl`. `base` is the training set the output must not
/// duplicate and whose size sets the ratio-based count; when a
/// `train_augmented` path is given the base plus augmented rows go there.
pub fn augment_step(
    eligible: &[EligiblePair],
    base: &[RawBisentence],
    cfg: &AugmentConfig,
    seed: u64,
    out_dir: &Path,
    train_augmented: Option<&Path>,
) -> Result<(Vec<AugmentedPair>, AugmentSummary)> {
    cfg.validate()?;
    let requested = cfg.target_count(base.len());
    let generation = Generator::new(eligible, cfg.strategy, seed)
        .exclude(base.iter().map(|r| (r.source.clone(), r.target.clone())))
        .generate(requested)?;

    let by_id: HashMap<&str, &EligiblePair> = eligible.iter().map(|e| (e.id(), e)).collect();
    let diag = cfg.diagnose_config();
    let flags: Vec<Vec<Flag>> = generation
        .pairs
        .iter()
        .map(|a| {
            diagnose(
                a,
                by_id[a.provenance.recipient_id.as_str()],
                by_id[a.provenance.donor_id.as_str()],
                &diag,
            )
        })
        .collect();

    write_file(&out_dir.join(AUGMENTED_TSV), |w| {
        for a in &generation.pairs {
            writeln!(w, "{}\t{}", a.source_text, a.target_text)?;
        }
        Ok(())
    })?;
    write_file(&out_dir.join(PROVENANCE_JSONL), |w| {
        for (a, f) in generation.pairs.iter().zip(&flags) {
            let removed = |side: Side| {
                a.side(side)
                    .removed
                    .iter()
                    .map(|t| t.form.as_str())
                    .collect()
            };
            let range = |side: Side| [a.side(side).inserted.start, a.side(side).inserted.end];
            let rec = ProvenanceRecord {
                recipient_id: &a.provenance.recipient_id,
                donor_id: &a.provenance.donor_id,
                strategy: a.provenance.strategy,
                seed: a.provenance.seed,
                flags: f,
                source_inserted: range(Side::Source),
                target_inserted: range(Side::Target),
                source_removed: removed(Side::Source),
                target_removed: removed(Side::Target),
            };
            serde_json::to_writer(&mut *w, &rec)?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    if let Some(path) = train_augmented {
        let subcorpus: HashMap<&str, &str> = eligible
            .iter()
            .map(|e| (e.id(), e.base().subcorpus.as_str()))
            .collect();
        let extra: Vec<RawBisentence> = generation
            .pairs
            .iter()
            .map(|a| RawBisentence {
                source: a.source_text.clone(),
                target: a.target_text.clone(),
                subcorpus: subcorpus[a.provenance.recipient_id.as_str()].to_owned(),
            })
            .collect();
        write_corpus(path, base.iter().chain(&extra))?;
    }
    let summary = AugmentSummary {
        eligible: eligible.len(),
        requested,
        generated: generation.pairs.len(),
        shortfall: generation.shortfall,
        flagged: flags.iter().filter(|f| !f.is_empty()).count(),
    };
    Ok((generation.pairs, summary))
}

// ---------------------------------------------------------------------------
// End-to-end

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    /// Input corpus TSV.
    pub corpus: PathBuf,
    /// CoNLL-U parses aligned line-for-line with `corpus`.
    pub source_conllu: Option<PathBuf>,
    pub target_conllu: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Subcorpus for two-column TSV rows.
    pub default_subcorpus: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub ratios: [f64; 3],
    pub strata_key: StrataKey,
    pub seed: Option<u64>,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitConfig::default();
        SplitSection {
            ratios: d.ratios,
            strata_key: d.strata_key,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Seed for every step that does not set its own.
    pub seed: u64,
    pub lenient: bool,
    pub io: IoConfig,
    pub filter: FilterConfig,
    pub split: SplitSection,
    pub sample: SampleConfig,
    pub augment: AugmentConfig,
}

impl PipelineConfig {
    pub fn split_config(&self) -> SplitConfig {
        SplitConfig {
            ratios: self.split.ratios,
            seed: self.split.seed.unwrap_or(self.seed),
            strata_key: self.split.strata_key,
        }
    }

    pub fn augment_seed(&self) -> u64 {
        self.augment.seed.unwrap_or(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.io.corpus.as_os_str().is_empty() {
            return Err(PipelineError::Config("io.corpus is not set".into()));
        }
        if self.io.out_dir.as_os_str().is_empty() {
            return Err(PipelineError::Config("io.out_dir is not set".into()));
        }
        if self.io.source_conllu.is_some() != self.io.target_conllu.is_some() {
            return Err(PipelineError::Config(
                "io.source_conllu and io.target_conllu must be given together".into(),
            ));
        }
        self.filter
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        self.split_config().validate()?;
        self.augment.validate()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub filter: FilterReport,
    pub split: SplitSummary,
    pub eligibility: Option<EligibilityReport>,
    pub augment: Option<AugmentSummary>,
    pub artifacts: BTreeMap<String, u64>,
}

fn list_artifacts(dir: &Path) -> Result<BTreeMap<String, u64>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let meta = entry.metadata().map_err(io_err(dir))?;
        if meta.is_file() {
            out.insert(entry.file_name().to_string_lossy().into_owned(), meta.len());
        }
    }
    Ok(out)
}

/// filter → split → stats → eligibility → augment. Eligibility and
/// augmentation run only when parses are configured.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let out = cfg.io.out_dir.as_path();
    fs::create_dir_all(out).map_err(io_err(out))?;
    let parses = cfg
        .io
        .source_conllu
        .as_deref()
        .zip(cfg.io.target_conllu.as_deref());
    let input = Dataset::load(
        &cfg.io.corpus,
        parses,
        &cfg.io.default_subcorpus,
        cfg.lenient,
    )?;

    stats_step(&input.records, out)?;
    let (filtered, filter_report) = filter_step(&input, &cfg.filter, out)?;
    let (train, split_summary) = split_step(&filtered, &cfg.split_config(), &cfg.sample, out)?;

    let (mut eligibility, mut augment) = (None, None);
    if let Some((src, tgt)) = train.parses.clone() {
        let pairs = pair_parses(src, tgt, Some(&train.records))?;
        let labels = cfg.augment.labels()?;
        let (eligible, report) = eligibility_step(&pairs, &labels, Some(out))?;
        let (_, summary) = augment_step(
            &eligible,
            &train.records,
            &cfg.augment,
            cfg.augment_seed(),
            out,
            Some(&out.join("train_augmented.tsv")),
        )?;
        eligibility = Some(report);
        augment = Some(summary);
    }
    Ok(PipelineSummary {
        filter: filter_report,
        split: split_summary,
        eligibility,
        augment,
        artifacts: list_artifacts(out)?,
    })
}
