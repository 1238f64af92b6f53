use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use synaug::augment::{AugmentError, ParsedBisentence};
use synaug::corpus::RawBisentence;
use synaug::deptree::{sentence_text, Relation};
use synaug::filter::RatioMode;
use synaug::metrics::{corpus_bleu_with, tokenize, Smoothing};
use synaug::pipeline::{
    augment_step, eligibility_step, filter_step, load_manifest, pair_parses, read_conllu,
    read_corpus, run_pipeline, split_step, stats_step, Dataset, PipelineConfig, PipelineError,
};

#[derive(Parser)]
#[command(
    name = "synaug",
    version,
    about = "Parallel corpus filtering, splitting and subtree-swap augmentation"
)]
struct Cli {
    /// Pipeline configuration (TOML). Flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replace malformed CoNLL-U sentences with placeholders instead of failing.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Corpus TSV: source, target and optional subcorpus columns.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Source parses, one sentence per corpus line.
    #[arg(long, requires = "target_conllu")]
    source_conllu: Option<PathBuf>,
    #[arg(long, requires = "source_conllu")]
    target_conllu: Option<PathBuf>,
    /// Subcorpus for two-column rows.
    #[arg(long)]
    subcorpus: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Strip quotes, drop HTML, empty, over-long and length-mismatched pairs.
    Filter {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        ratio_mode: Option<RatioMode>,
        #[arg(long)]
        max_words: Option<usize>,
    },
    /// Stratified train/dev/test split.
    Split {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Train, dev and test fractions, e.g. `0.99,0.005,0.005`.
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        /// Subsample the training split to this many pairs.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        only_subcorpus: Option<String>,
    },
    /// Counts and length histograms.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Report which parsed pairs admit a swap, and why the others do not.
    Eligibility {
        #[command(flatten)]
        data: DataArgs,
        /// TSV of `id, src_ref, tgt_ref, subcorpus` with refs `file#sent_id`.
        #[arg(long, conflicts_with_all = ["source_conllu", "corpus"])]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate swapped pairs.
    Augment {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, conflicts_with_all = ["source_conllu", "corpus"])]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<Relation>,
        /// Outputs per base pair.
        #[arg(long)]
        ratio: Option<f64>,
        /// Exact number of outputs; overrides --ratio.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Corpus BLEU-4 of a hypothesis file against a reference file.
    Bleu {
        #[arg(long)]
        hypotheses: PathBuf,
        #[arg(long)]
        references: PathBuf,
        /// Add-one smoothing for orders 2 to 4.
        #[arg(long)]
        smooth: bool,
    },
    /// filter, split, stats, eligibility and augment in one run.
    Pipeline {
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<PipelineConfig> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut cfg: PipelineConfig = toml::from_str(&text)
        .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
    // Paths inside the file are relative to the file.
    let base = path.parent().unwrap_or(Path::new(""));
    let rebase = |p: &mut PathBuf| {
        if !p.as_os_str().is_empty() && p.is_relative() {
            *p = base.join(&*p);
        }
    };
    rebase(&mut cfg.io.corpus);
    rebase(&mut cfg.io.out_dir);
    cfg.io.source_conllu.as_mut().map(rebase);
    cfg.io.target_conllu.as_mut().map(rebase);
    Ok(cfg)
}

impl DataArgs {
    fn apply(self, cfg: &mut PipelineConfig) {
        if let Some(c) = self.corpus {
            cfg.io.corpus = c;
        }
        if self.source_conllu.is_some() {
            cfg.io.source_conllu = self.source_conllu;
            cfg.io.target_conllu = self.target_conllu;
        }
        if let Some(s) = self.subcorpus {
            cfg.io.default_subcorpus = s;
        }
    }
}

fn out_dir(cfg: &mut PipelineConfig, flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(d) = flag {
        cfg.io.out_dir = d;
    }
    if cfg.io.out_dir.as_os_str().is_empty() {
        bail!(PipelineError::Config(
            "no output directory; pass --out-dir".into()
        ));
    }
    fs::create_dir_all(&cfg.io.out_dir).map_err(|source| PipelineError::Io {
        path: cfg.io.out_dir.clone(),
        source,
    })?;
    Ok(cfg.io.out_dir.clone())
}

fn load_dataset(cfg: &PipelineConfig) -> anyhow::Result<Dataset> {
    if cfg.io.corpus.as_os_str().is_empty() {
        bail!(PipelineError::Config("no corpus; pass --corpus".into()));
    }
    let parses = cfg
        .io
        .source_conllu
        .as_deref()
        .zip(cfg.io.target_conllu.as_deref());
    Ok(Dataset::load(
        &cfg.io.corpus,
        parses,
        &cfg.io.default_subcorpus,
        cfg.lenient,
    )?)
}

/// Parsed pairs plus the base records they came from.
fn load_parsed(
    cfg: &PipelineConfig,
    manifest: Option<&Path>,
) -> anyhow::Result<(Vec<ParsedBisentence>, Vec<RawBisentence>)> {
    let pairs = match (
        manifest,
        cfg.io
            .source_conllu
            .as_deref()
            .zip(cfg.io.target_conllu.as_deref()),
    ) {
        (Some(m), _) => load_manifest(m, cfg.lenient)?,
        (None, Some((s, t))) => {
            let records = if cfg.io.corpus.as_os_str().is_empty() {
                None
            } else {
                Some(read_corpus(&cfg.io.corpus, &cfg.io.default_subcorpus)?)
            };
            let (s, t) = (read_conllu(s, cfg.lenient)?, read_conllu(t, cfg.lenient)?);
            if let Some(r) = &records {
                if r.len() != s.len() {
                    bail!(PipelineError::Data(format!(
                        "{} has {} records but the parses have {} sentences",
                        cfg.io.corpus.display(),
                        r.len(),
                        s.len()
                    )));
                }
            }
            let pairs = pair_parses(s, t, records.as_deref())?;
            if let Some(r) = records {
                return Ok((pairs, r));
            }
            pairs
        }
        (None, None) => bail!(PipelineError::Config(
            "pass --source-conllu and --target-conllu, or --manifest".into()
        )),
    };
    let base = pairs
        .iter()
        .map(|p| RawBisentence {
            source: sentence_text(&p.source),
            target: sentence_text(&p.target),
            subcorpus: p.subcorpus.clone(),
        })
        .collect();
    Ok((pairs, base))
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_lines(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r').to_owned())
        .collect())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = load_config(cli.config.as_deref())?;
    cfg.lenient |= cli.lenient;
    match cli.command {
        Command::Filter {
            data,
            out_dir: dir,
            ratio_mode,
            max_words,
        } => {
            data.apply(&mut cfg);
            if let Some(m) = ratio_mode {
                cfg.filter.ratio_mode = m;
            }
            if let Some(m) = max_words {
                cfg.filter.max_words = m;
            }
            let dir = out_dir(&mut cfg, dir)?;
            let input = load_dataset(&cfg)?;
            let (_, report) = filter_step(&input, &cfg.filter, &dir)?;
            print_json(&report)
        }
        Command::Split {
            data,
            out_dir: dir,
            seed,
            ratios,
            sample,
            only_subcorpus,
        } => {
            data.apply(&mut cfg);
            if let Some(s) = seed {
                cfg.split.seed = Some(s);
            }
            if let Some(r) = ratios {
                cfg.split.ratios = r.try_into().map_err(|r: Vec<f64>| {
                    PipelineError::Config(format!("--ratios needs 3 values, got {}", r.len()))
                })?;
            }
            if sample.is_some() {
                cfg.sample.train_size = sample;
            }
            if only_subcorpus.is_some() {
                cfg.sample.only_subcorpus = only_subcorpus;
            }
            let dir = out_dir(&mut cfg, dir)?;
            let split_cfg = cfg.split_config();
            split_cfg.validate().map_err(PipelineError::from)?;
            let input = load_dataset(&cfg)?;
            let (_, summary) = split_step(&input, &split_cfg, &cfg.sample, &dir)?;
            print_json(&summary)
        }
        Command::Stats { data, out_dir: dir } => {
            data.apply(&mut cfg);
            let dir = out_dir(&mut cfg, dir)?;
            let records = read_corpus(&cfg.io.corpus, &cfg.io.default_subcorpus)?;
            let stats = stats_step(&records, &dir)?;
            print_json(&stats.subcorpora)
        }
        Command::Eligibility {
            data,
            manifest,
            out_dir: dir,
        } => {
            data.apply(&mut cfg);
            let dir = match dir {
                Some(d) => Some(out_dir(&mut cfg, Some(d))?),
                None => None,
            };
            let (pairs, _) = load_parsed(&cfg, manifest.as_deref())?;
            let (_, report) = eligibility_step(&pairs, &cfg.augment.labels()?, dir.as_deref())?;
            print_json(&report)
        }
        Command::Augment {
            data,
            manifest,
            out_dir: dir,
            strategy,
            ratio,
            count,
            seed,
        } => {
            data.apply(&mut cfg);
            if let Some(s) = strategy {
                cfg.augment.strategy = s;
            }
            if let Some(r) = ratio {
                cfg.augment.ratio = r;
            }
            if count.is_some() {
                cfg.augment.count = count;
            }
            if seed.is_some() {
                cfg.augment.seed = seed;
            }
            let dir = out_dir(&mut cfg, dir)?;
            let (pairs, base) = load_parsed(&cfg, manifest.as_deref())?;
            let (eligible, _) = eligibility_step(&pairs, &cfg.augment.labels()?, None)?;
            let with_corpus = !cfg.io.corpus.as_os_str().is_empty() && manifest.is_none();
            let merged = dir.join("train_augmented.tsv");
            let (_, summary) = augment_step(
                &eligible,
                &base,
                &cfg.augment,
                cfg.augment_seed(),
                &dir,
                with_corpus.then_some(merged.as_path()),
            )?;
            if summary.shortfall > 0 {
                log::warn!(
                    "generated {} of {} requested pairs",
                    summary.generated,
                    summary.requested
                );
            }
            print_json(&summary)
        }
        Command::Bleu {
            hypotheses,
            references,
            smooth,
        } => {
            let (h, r) = (read_lines(&hypotheses)?, read_lines(&references)?);
            let h: Vec<Vec<&str>> = h.iter().map(|l| tokenize(l)).collect();
            let r: Vec<Vec<&str>> = r.iter().map(|l| tokenize(l)).collect();
            let smoothing = if smooth {
                Smoothing::AddOne
            } else {
                Smoothing::None
            };
            let report = corpus_bleu_with(&h, &r, smoothing)
                .map_err(|e| PipelineError::Data(e.to_string()))?;
            print_json(&report)?;
            println!("{}", report.summary());
            Ok(())
        }
        Command::Pipeline { out_dir: dir } => {
            if let Some(d) = dir {
                cfg.io.out_dir = d;
            }
            let summary = run_pipeline(&cfg).context("pipeline failed")?;
            print_json(&summary)
        }
    }
}

/// 3 I/O, 4 configuration, 5 malformed or inconsistent input,
/// 6 too few eligible pairs, 1 anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PipelineError>() {
        Some(PipelineError::Io { .. }) => 3,
        Some(PipelineError::Config(_)) => 4,
        Some(
            PipelineError::Conllu { .. } | PipelineError::Corpus { .. } | PipelineError::Data(_),
        ) => 5,
        Some(PipelineError::Augment(AugmentError::Capacity { .. })) => 6,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
