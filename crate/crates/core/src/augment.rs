//! Syntax-aware augmentation by subject/object subtree swapping.
//!
//! A parsed bisentence is *eligible* when both its source and target trees
//! have exactly one subject head and exactly one object head, every one of
//! the four subtrees covers a consecutive run of words, and the subject and
//! object subtrees of a side do not overlap. Two eligible pairs can then
//! exchange their subject (or object) subtrees on both sides at once, which
//! keeps the new pair parallel.
//!
//! Inserted words are copied verbatim. The only normalization is
//! capitalizing the first inserted word when the replaced span opened the
//! sentence. Spacing around the inserted span follows the recipient: the gap
//! before the span is unchanged and the gap after it is whatever followed
//! the removed span.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::conllu::DepSentence;
use crate::deptree::{
    find_relation_heads, sentence_text, span_of, LabelSets, Relation, SubtreeSpan,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedBisentence {
    pub id: String,
    pub source: DepSentence,
    pub target: DepSentence,
    pub subcorpus: String,
}

impl ParsedBisentence {
    pub fn sentence(&self, side: Side) -> &DepSentence {
        match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        }
    }
}

/// One failed eligibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IneligibleReason {
    ZeroSubjects(Side),
    MultipleSubjects(Side),
    ZeroObjects(Side),
    MultipleObjects(Side),
    DiscontiguousSubject(Side),
    DiscontiguousObject(Side),
    OverlappingSpans(Side),
}

impl IneligibleReason {
    /// Stable machine-readable code, e.g. `zero-subjects-target`.
    pub fn code(&self) -> String {
        let (what, side) = match self {
            IneligibleReason::ZeroSubjects(s) => ("zero-subjects", s),
            IneligibleReason::MultipleSubjects(s) => ("multiple-subjects", s),
            IneligibleReason::ZeroObjects(s) => ("zero-objects", s),
            IneligibleReason::MultipleObjects(s) => ("multiple-objects", s),
            IneligibleReason::DiscontiguousSubject(s) => ("discontiguous-subject", s),
            IneligibleReason::DiscontiguousObject(s) => ("discontiguous-object", s),
            IneligibleReason::OverlappingSpans(s) => ("overlapping-spans", s),
        };
        format!("{what}-{side}")
    }
}

impl fmt::Display for IneligibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl Serialize for IneligibleReason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.code())
    }
}

/// All conditions a pair failed, source side first.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ineligible: {}", .0.iter().map(|r| r.code()).collect::<Vec<_>>().join(", "))]
pub struct Ineligible(pub Vec<IneligibleReason>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("cannot swap pair `{0}` with itself")]
    SelfSwap(String),
    #[error("need at least 2 eligible pairs to generate {requested} outputs, have {available}")]
    Capacity { requested: usize, available: usize },
}

/// A bisentence proven swap-safe together with its four spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EligiblePair {
    base: ParsedBisentence,
    src_subject: SubtreeSpan,
    src_object: SubtreeSpan,
    tgt_subject: SubtreeSpan,
    tgt_object: SubtreeSpan,
}

impl EligiblePair {
    pub fn base(&self) -> &ParsedBisentence {
        &self.base
    }

    pub fn id(&self) -> &str {
        &self.base.id
    }

    pub fn span(&self, side: Side, relation: Relation) -> &SubtreeSpan {
        match (side, relation) {
            (Side::Source, Relation::Subject) => &self.src_subject,
            (Side::Source, Relation::Object) => &self.src_object,
            (Side::Target, Relation::Subject) => &self.tgt_subject,
            (Side::Target, Relation::Object) => &self.tgt_object,
        }
    }

    /// The original texts rebuilt from the parses.
    pub fn texts(&self) -> (String, String) {
        (
            sentence_text(&self.base.source),
            sentence_text(&self.base.target),
        )
    }
}

fn side_spans(
    sentence: &DepSentence,
    side: Side,
    labels: &LabelSets,
    reasons: &mut Vec<IneligibleReason>,
) -> Option<(SubtreeSpan, SubtreeSpan)> {
    let subjects = find_relation_heads(sentence, Relation::Subject, labels);
    let objects = find_relation_heads(sentence, Relation::Object, labels);
    let before = reasons.len();
    match subjects.len() {
        0 => reasons.push(IneligibleReason::ZeroSubjects(side)),
        1 => {}
        _ => reasons.push(IneligibleReason::MultipleSubjects(side)),
    }
    match objects.len() {
        0 => reasons.push(IneligibleReason::ZeroObjects(side)),
        1 => {}
        _ => reasons.push(IneligibleReason::MultipleObjects(side)),
    }
    if reasons.len() > before {
        return None;
    }
    let subject = span_of(sentence, subjects[0], Relation::Subject).ok()?;
    let object = span_of(sentence, objects[0], Relation::Object).ok()?;
    if !subject.is_contiguous() {
        reasons.push(IneligibleReason::DiscontiguousSubject(side));
    }
    if !object.is_contiguous() {
        reasons.push(IneligibleReason::DiscontiguousObject(side));
    }
    if subject.overlaps(&object) {
        reasons.push(IneligibleReason::OverlappingSpans(side));
    }
    (reasons.len() == before).then_some((subject, object))
}

/// Checks both sides of a pair and collects every failed condition.
pub fn check_eligibility(
    pair: &ParsedBisentence,
    labels: &LabelSets,
) -> Result<EligiblePair, Ineligible> {
    let mut reasons = Vec::new();
    let src = side_spans(&pair.source, Side::Source, labels, &mut reasons);
    let tgt = side_spans(&pair.target, Side::Target, labels, &mut reasons);
    match (src, tgt) {
        (Some((src_subject, src_object)), Some((tgt_subject, tgt_object))) => Ok(EligiblePair {
            base: pair.clone(),
            src_subject,
            src_object,
            tgt_subject,
            tgt_object,
        }),
        _ => Err(Ineligible(reasons)),
    }
}

/// A word with its trailing-space flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceToken {
    pub form: String,
    pub space_after: bool,
}

pub fn surface_tokens(sentence: &DepSentence) -> Vec<SurfaceToken> {
    // Words, not multiword surface forms: spans are cut at word boundaries.
    sentence
        .tokens()
        .iter()
        .map(|t| SurfaceToken {
            form: t.form.clone(),
            space_after: sentence.space_after(t.index),
        })
        .collect()
}

pub fn render(tokens: &[SurfaceToken]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        out.push_str(&t.form);
        if t.space_after && i + 1 < tokens.len() {
            out.push(' ');
        }
    }
    out
}

/// One side of an augmented pair, with enough bookkeeping to undo the swap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwappedSide {
    pub tokens: Vec<SurfaceToken>,
    /// Positions (0-based, half-open) of the donor words in `tokens`.
    pub inserted: Range<usize>,
    /// The recipient words that were replaced, unmodified.
    pub removed: Vec<SurfaceToken>,
}

impl SwappedSide {
    pub fn text(&self) -> String {
        render(&self.tokens)
    }

    /// Puts the removed words back.
    pub fn restore(&self) -> Vec<SurfaceToken> {
        let mut out = self.tokens[..self.inserted.start].to_vec();
        out.extend(self.removed.iter().cloned());
        out.extend_from_slice(&self.tokens[self.inserted.end..]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub recipient_id: String,
    pub donor_id: String,
    pub strategy: Relation,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedPair {
    pub source_text: String,
    pub target_text: String,
    pub source: SwappedSide,
    pub target: SwappedSide,
    pub provenance: Provenance,
}

impl AugmentedPair {
    pub fn side(&self, side: Side) -> &SwappedSide {
        match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        }
    }
}

fn capitalize_first(form: &str) -> String {
    let mut chars = form.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn swap_side(
    recipient: &EligiblePair,
    donor: &EligiblePair,
    side: Side,
    strategy: Relation,
) -> SwappedSide {
    let r_tokens = surface_tokens(recipient.base.sentence(side));
    let d_tokens = surface_tokens(donor.base.sentence(side));
    let r_span = recipient.span(side, strategy);
    let d_span = donor.span(side, strategy);
    let (start, end) = (r_span.first() - 1, r_span.last());

    let mut inserted: Vec<SurfaceToken> = d_tokens[d_span.first() - 1..d_span.last()].to_vec();
    if start == 0 {
        inserted[0].form = capitalize_first(&inserted[0].form);
    }
    inserted.last_mut().expect("span is non-empty").space_after = r_tokens[end - 1].space_after;

    let mut tokens = r_tokens[..start].to_vec();
    let range = start..start + inserted.len();
    tokens.extend(inserted);
    tokens.extend_from_slice(&r_tokens[end..]);
    SwappedSide {
        tokens,
        inserted: range,
        removed: r_tokens[start..end].to_vec(),
    }
}

/// Replaces the recipient's `strategy` subtree with the donor's on both
/// sides. Call again with the roles exchanged for the mirror output.
pub fn swap(
    recipient: &EligiblePair,
    donor: &EligiblePair,
    strategy: Relation,
) -> Result<AugmentedPair, AugmentError> {
    if recipient.id() == donor.id() {
        return Err(AugmentError::SelfSwap(recipient.id().to_owned()));
    }
    let source = swap_side(recipient, donor, Side::Source, strategy);
    let target = swap_side(recipient, donor, Side::Target, strategy);
    Ok(AugmentedPair {
        source_text: source.text(),
        target_text: target.text(),
        source,
        target,
        provenance: Provenance {
            recipient_id: recipient.id().to_owned(),
            donor_id: donor.id().to_owned(),
            strategy,
            seed: None,
        },
    })
}

/// Result of [`Generator::generate`]; `shortfall` counts outputs that could
/// not be filled with a fresh pair within the retry budget.
#[derive(Debug, Clone, Default)]
pub struct Generation {
    pub pairs: Vec<AugmentedPair>,
    pub shortfall: usize,
}

/// Seeded sampler of (recipient, donor) swaps over an eligible pool.
///
/// Output `k` draws from its own ChaCha stream (`seed`, stream `k`), so the
/// sequence does not depend on how many draws earlier outputs needed.
#[derive(Debug)]
pub struct Generator<'a> {
    pool: &'a [EligiblePair],
    strategy: Relation,
    seed: u64,
    max_retries: usize,
    known: HashSet<(String, String)>,
}

impl<'a> Generator<'a> {
    pub fn new(pool: &'a [EligiblePair], strategy: Relation, seed: u64) -> Self {
        let known = pool.iter().map(EligiblePair::texts).collect();
        Generator {
            pool,
            strategy,
            seed,
            max_retries: 64,
            known,
        }
    }

    /// Additional bisentences an output must not duplicate, typically the
    /// whole base training set.
    pub fn exclude<I: IntoIterator<Item = (String, String)>>(mut self, pairs: I) -> Self {
        self.known.extend(pairs);
        self
    }

    pub fn max_retries(mut self, n: usize) -> Self {
        self.max_retries = n.max(1);
        self
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let n = self.pool.len();
        let recipient = rng.random_range(0..n);
        let mut donor = rng.random_range(0..n - 1);
        if donor >= recipient {
            donor += 1;
        }
        (recipient, donor)
    }

    pub fn generate(mut self, count: usize) -> Result<Generation, AugmentError> {
        let mut out = Generation::default();
        if count == 0 {
            return Ok(out);
        }
        if self.pool.len() < 2 {
            return Err(AugmentError::Capacity {
                requested: count,
                available: self.pool.len(),
            });
        }
        for k in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(k as u64);
            let mut produced = None;
            for _ in 0..self.max_retries {
                let (r, d) = self.draw(&mut rng);
                let mut aug = swap(&self.pool[r], &self.pool[d], self.strategy)?;
                let key = (aug.source_text.clone(), aug.target_text.clone());
                if self.known.insert(key) {
                    aug.provenance.seed = Some(self.seed);
                    produced = Some(aug);
                    break;
                }
            }
            match produced {
                Some(aug) => out.pairs.push(aug),
                None => out.shortfall += 1,
            }
        }
        if out.shortfall > 0 {
            log::warn!(
                "augmentation fell {} short of {count} requested pairs",
                out.shortfall
            );
        }
        Ok(out)
    }
}

/// `count` swaps sampled uniformly over ordered (recipient, donor) pairs.
pub fn generate(
    eligible: &[EligiblePair],
    count: usize,
    strategy: Relation,
    seed: u64,
) -> Result<Generation, AugmentError> {
    Generator::new(eligible, strategy, seed).generate(count)
}

/// Eligibility tallies over a parsed corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EligibilityReport {
    pub total: usize,
    pub eligible: usize,
    pub rate: f64,
    pub reasons: BTreeMap<String, usize>,
}

/// Splits a parsed corpus into its eligible pairs and a report.
pub fn screen(
    pairs: &[ParsedBisentence],
    labels: &LabelSets,
) -> (Vec<EligiblePair>, EligibilityReport) {
    let mut report = EligibilityReport {
        total: pairs.len(),
        ..Default::default()
    };
    let mut eligible = Vec::new();
    for p in pairs {
        match check_eligibility(p, labels) {
            Ok(e) => eligible.push(e),
            Err(Ineligible(reasons)) => {
                for r in reasons {
                    *report.reasons.entry(r.code()).or_default() += 1;
                }
            }
        }
    }
    report.eligible = eligible.len();
    report.rate = if report.total == 0 {
        0.0
    } else {
        report.eligible as f64 / report.total as f64
    };
    (eligible, report)
}

// ---------------------------------------------------------------------------
// Diagnostics

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    Hu,
    Other,
}

impl std::str::FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Language::En),
            "hu" => Ok(Language::Hu),
            _ => Ok(Language::Other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagnoseConfig {
    pub source: Language,
    pub target: Language,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            source: Language::En,
            target: Language::Hu,
        }
    }
}

impl DiagnoseConfig {
    fn language(&self, side: Side) -> Language {
        match side {
            Side::Source => self.source,
            Side::Target => self.target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    /// Replaced and inserted spans open with articles of opposite definiteness.
    DefinitenessMismatch,
    /// Subject swap between spans of different grammatical person.
    PersonMismatch,
    /// Subject swap between spans of different grammatical number.
    NumberMismatch,
    /// The inserted span is a lone pronoun.
    PronounOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flag {
    pub kind: FlagKind,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Definiteness {
    Definite,
    Indefinite,
}

fn article_class(form: &str, lang: Language) -> Option<Definiteness> {
    let lower = form.to_lowercase();
    match (lang, lower.as_str()) {
        (Language::En, "the") => Some(Definiteness::Definite),
        (Language::En, "a" | "an") => Some(Definiteness::Indefinite),
        (Language::Hu, "a" | "az") => Some(Definiteness::Definite),
        (Language::Hu, "egy") => Some(Definiteness::Indefinite),
        _ => None,
    }
}

/// (person, plural) for personal pronouns.
fn pronoun_features(form: &str, lang: Language) -> Option<(u8, bool)> {
    let lower = form.to_lowercase();
    let f = match (lang, lower.as_str()) {
        (Language::En, "i" | "me") => (1, false),
        (Language::En, "we" | "us") => (1, true),
        (Language::En, "you") => (2, false),
        (Language::En, "he" | "him" | "she" | "her" | "it" | "this" | "that") => (3, false),
        (Language::En, "they" | "them" | "these" | "those") => (3, true),
        (Language::Hu, "én" | "engem") => (1, false),
        (Language::Hu, "mi" | "minket") => (1, true),
        (Language::Hu, "te" | "téged" | "ön" | "maga") => (2, false),
        (Language::Hu, "ti" | "titeket" | "önök") => (2, true),
        (Language::Hu, "ő" | "őt" | "ez" | "az" | "ezt" | "azt") => (3, false),
        (Language::Hu, "ők" | "őket" | "ezek" | "azok") => (3, true),
        _ => return None,
    };
    Some(f)
}

struct SpanView<'a> {
    sentence: &'a DepSentence,
    span: &'a SubtreeSpan,
    lang: Language,
}

impl SpanView<'_> {
    fn first_form(&self) -> &str {
        &self
            .sentence
            .token(self.span.first())
            .expect("valid span")
            .form
    }

    fn is_pronoun_only(&self) -> bool {
        let t = self
            .sentence
            .token(self.span.head_index())
            .expect("valid span");
        self.span.len() == 1 && (t.upos == "PRON" || pronoun_features(&t.form, self.lang).is_some())
    }

    fn person(&self) -> Option<u8> {
        let head = self.sentence.token(self.span.head_index())?;
        if let Some(p) = head.feature("Person").and_then(|p| p.parse().ok()) {
            return Some(p);
        }
        if let Some((p, _)) = pronoun_features(&head.form, self.lang) {
            return Some(p);
        }
        matches!(head.upos.as_str(), "NOUN" | "PROPN").then_some(3)
    }

    fn plural(&self) -> Option<bool> {
        let head = self.sentence.token(self.span.head_index())?;
        match head.feature("Number") {
            Some("Plur") => return Some(true),
            Some("Sing") => return Some(false),
            _ => {}
        }
        if let Some((_, pl)) = pronoun_features(&head.form, self.lang) {
            return Some(pl);
        }
        match head.xpos.as_str() {
            "NNS" | "NNPS" => Some(true),
            "NN" | "NNP" => Some(false),
            _ => None,
        }
    }
}

fn differ<T: PartialEq>(a: Option<T>, b: Option<T>) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x != y)
}

/// Heuristic risk markers for a swap. Advisory only: nothing is filtered.
pub fn diagnose(
    aug: &AugmentedPair,
    recipient: &EligiblePair,
    donor: &EligiblePair,
    cfg: &DiagnoseConfig,
) -> Vec<Flag> {
    let strategy = aug.provenance.strategy;
    let mut flags = Vec::new();
    for side in [Side::Source, Side::Target] {
        let lang = cfg.language(side);
        let removed = SpanView {
            sentence: recipient.base.sentence(side),
            span: recipient.span(side, strategy),
            lang,
        };
        let inserted = SpanView {
            sentence: donor.base.sentence(side),
            span: donor.span(side, strategy),
            lang,
        };
        let mut flag = |kind| flags.push(Flag { kind, side });
        if differ(
            article_class(removed.first_form(), lang),
            article_class(inserted.first_form(), lang),
        ) {
            flag(FlagKind::DefinitenessMismatch);
        }
        if strategy == Relation::Subject {
            if differ(removed.person(), inserted.person()) {
                flag(FlagKind::PersonMismatch);
            }
            if differ(removed.plural(), inserted.plural()) {
                flag(FlagKind::NumberMismatch);
            }
        }
        if inserted.is_pronoun_only() {
            flag(FlagKind::PronounOnly);
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    fn sent(words: &[(&str, &str, usize, &str)], no_space: &[usize]) -> DepSentence {
        let tokens = words
            .iter()
            .enumerate()
            .map(|(i, &(form, upos, head, rel))| {
                let t = Token::new(i + 1, form, upos, head, rel);
                if no_space.contains(&(i + 1)) {
                    t.no_space_after()
                } else {
                    t
                }
            })
            .collect();
        DepSentence::new(tokens).unwrap()
    }

    fn dog_pair() -> ParsedBisentence {
        ParsedBisentence {
            id: "1".into(),
            source: sent(
                &[
                    ("The", "DET", 3, "det"),
                    ("black", "ADJ", 3, "amod"),
                    ("dog", "NOUN", 5, "nsubj"),
                    ("is", "AUX", 5, "aux"),
                    ("chasing", "VERB", 0, "root"),
                    ("the", "DET", 8, "det"),
                    ("red", "ADJ", 8, "amod"),
                    ("cat", "NOUN", 5, "obj"),
                    (".", "PUNCT", 5, "punct"),
                ],
                &[8],
            ),
            target: sent(
                &[
                    ("A", "DET", 3, "det"),
                    ("fekete", "ADJ", 3, "amod"),
                    ("kutya", "NOUN", 4, "nsubj"),
                    ("kergeti", "VERB", 0, "root"),
                    ("a", "DET", 6, "det"),
                    ("piros", "ADJ", 7, "amod"),
                    ("macskát", "NOUN", 4, "obj"),
                    (".", "PUNCT", 4, "punct"),
                ],
                &[7],
            ),
            subcorpus: "lit".into(),
        }
    }

    fn gordon_pair() -> ParsedBisentence {
        ParsedBisentence {
            id: "2".into(),
            source: sent(
                &[
                    ("Gordon", "PROPN", 4, "nsubj"),
                    ("Ramsay", "PROPN", 1, "flat"),
                    ("is", "AUX", 4, "aux"),
                    ("cooking", "VERB", 0, "root"),
                    ("a", "DET", 7, "det"),
                    ("delicious", "ADJ", 7, "amod"),
                    ("soup", "NOUN", 4, "obj"),
                    (".", "PUNCT", 4, "punct"),
                ],
                &[7],
            ),
            target: sent(
                &[
                    ("Gordon", "PROPN", 6, "nsubj"),
                    ("Ramsay", "PROPN", 1, "flat"),
                    ("egy", "DET", 5, "det"),
                    ("finom", "ADJ", 5, "amod"),
                    ("levest", "NOUN", 6, "obj"),
                    ("főz", "VERB", 0, "root"),
                    (".", "PUNCT", 6, "punct"),
                ],
                &[6],
            ),
            subcorpus: "lit".into(),
        }
    }

    fn eligible(p: ParsedBisentence) -> EligiblePair {
        check_eligibility(&p, &LabelSets::default()).unwrap()
    }

    #[test]
    fn dog_pair_is_eligible() {
        let e = eligible(dog_pair());
        assert_eq!(
            e.span(Side::Source, Relation::Subject).members(),
            &[1, 2, 3]
        );
        assert_eq!(e.span(Side::Source, Relation::Object).members(), &[6, 7, 8]);
        assert_eq!(
            e.span(Side::Target, Relation::Subject).members(),
            &[1, 2, 3]
        );
        assert_eq!(e.span(Side::Target, Relation::Object).members(), &[5, 6, 7]);
        assert_eq!(
            e.span(Side::Target, Relation::Subject).surface(),
            "A fekete kutya"
        );
    }

    #[test]
    fn ineligibility_reasons() {
        let mut p = dog_pair();
        let mut toks = p.source.tokens().to_vec();
        toks[1].deprel = "obj".into();
        p.source = DepSentence::new(toks).unwrap();
        let err = check_eligibility(&p, &LabelSets::default()).unwrap_err();
        assert_eq!(err.0, vec![IneligibleReason::MultipleObjects(Side::Source)]);
        assert_eq!(err.0[0].code(), "multiple-objects-source");

        let mut p = dog_pair();
        let mut toks = p.target.tokens().to_vec();
        toks[2].deprel = "obl".into();
        p.target = DepSentence::new(toks).unwrap();
        let err = check_eligibility(&p, &LabelSets::default()).unwrap_err();
        assert_eq!(err.0, vec![IneligibleReason::ZeroSubjects(Side::Target)]);
        assert_eq!(err.0[0].code(), "zero-subjects-target");
    }

    #[test]
    fn discontiguous_and_overlapping() {
        // "dog" governs "red" across the verb: subject {2,3,7} is gapped
        let mut p = dog_pair();
        let mut toks = p.source.tokens().to_vec();
        toks[6].head = 3;
        p.source = DepSentence::new(toks).unwrap();
        let err = check_eligibility(&p, &LabelSets::default()).unwrap_err();
        assert!(err
            .0
            .contains(&IneligibleReason::DiscontiguousSubject(Side::Source)));

        // object nested inside the subject subtree
        let p = ParsedBisentence {
            source: sent(
                &[
                    ("men", "NOUN", 3, "nsubj"),
                    ("eating", "VERB", 1, "acl"),
                    ("left", "VERB", 0, "root"),
                    ("bread", "NOUN", 2, "obj"),
                ],
                &[],
            ),
            ..dog_pair()
        };
        let err = check_eligibility(&p, &LabelSets::default()).unwrap_err();
        assert!(err
            .0
            .contains(&IneligibleReason::OverlappingSpans(Side::Source)));
    }

    #[test]
    fn object_swap_both_directions() {
        let (a, b) = (eligible(dog_pair()), eligible(gordon_pair()));
        let ab = swap(&a, &b, Relation::Object).unwrap();
        assert_eq!(ab.source_text, "The black dog is chasing a delicious soup.");
        assert_eq!(ab.target_text, "A fekete kutya kergeti egy finom levest.");
        let ba = swap(&b, &a, Relation::Object).unwrap();
        assert_eq!(ba.source_text, "Gordon Ramsay is cooking the red cat.");
        assert_eq!(ba.target_text, "Gordon Ramsay a piros macskát főz.");
        assert_eq!(ba.provenance.recipient_id, "2");
        assert_eq!(ba.provenance.donor_id, "1");
    }

    #[test]
    fn subject_swap_capitalizes() {
        let (a, b) = (eligible(dog_pair()), eligible(gordon_pair()));
        let ab = swap(&a, &b, Relation::Subject).unwrap();
        assert_eq!(ab.source_text, "Gordon Ramsay is chasing the red cat.");
        assert_eq!(ab.target_text, "Gordon Ramsay kergeti a piros macskát.");
        let ba = swap(&b, &a, Relation::Subject).unwrap();
        assert_eq!(ba.source_text, "The black dog is cooking a delicious soup.");
        // removed words are kept as they were
        assert_eq!(ba.source.removed[0].form, "Gordon");
    }

    #[test]
    fn identity_swap_and_restore() {
        let a = eligible(dog_pair());
        let mut twin = dog_pair();
        twin.id = "1b".into();
        let a2 = eligible(twin);
        let out = swap(&a, &a2, Relation::Object).unwrap();
        assert_eq!(out.source_text, "The black dog is chasing the red cat.");
        assert_eq!(out.target_text, "A fekete kutya kergeti a piros macskát.");
        let b = eligible(gordon_pair());
        let ab = swap(&a, &b, Relation::Object).unwrap();
        assert_eq!(ab.source.restore(), surface_tokens(&a.base().source));
        assert_eq!(ab.target.restore(), surface_tokens(&a.base().target));
    }

    #[test]
    fn self_swap_is_an_error() {
        let a = eligible(dog_pair());
        assert_eq!(
            swap(&a, &a, Relation::Object).unwrap_err(),
            AugmentError::SelfSwap("1".into())
        );
    }

    #[test]
    fn generate_table_pairs() {
        let pool = vec![eligible(dog_pair()), eligible(gordon_pair())];
        let out = generate(&pool, 2, Relation::Object, 7).unwrap();
        assert_eq!(out.shortfall, 0);
        let mut texts: Vec<_> = out.pairs.iter().map(|p| p.source_text.as_str()).collect();
        texts.sort();
        assert_eq!(
            texts,
            [
                "Gordon Ramsay is cooking the red cat.",
                "The black dog is chasing a delicious soup."
            ]
        );
        assert!(out.pairs.iter().all(|p| p.provenance.seed == Some(7)));
        // only two distinct outputs exist
        let more = generate(&pool, 3, Relation::Object, 7).unwrap();
        assert_eq!((more.pairs.len(), more.shortfall), (2, 1));
    }

    #[test]
    fn generate_edge_cases() {
        let pool = vec![eligible(dog_pair())];
        assert!(generate(&pool, 0, Relation::Object, 1)
            .unwrap()
            .pairs
            .is_empty());
        assert_eq!(
            generate(&pool, 1, Relation::Object, 1).unwrap_err(),
            AugmentError::Capacity {
                requested: 1,
                available: 1
            }
        );
    }

    #[test]
    fn exclusion_list_is_respected() {
        let pool = vec![eligible(dog_pair()), eligible(gordon_pair())];
        let out = Generator::new(&pool, Relation::Object, 3)
            .exclude([(
                "Gordon Ramsay is cooking the red cat.".to_owned(),
                "Gordon Ramsay a piros macskát főz.".to_owned(),
            )])
            .max_retries(16)
            .generate(2)
            .unwrap();
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].provenance.recipient_id, "1");
    }

    #[test]
    fn screening_report() {
        let mut bad = dog_pair();
        bad.id = "3".into();
        let mut toks = bad.target.tokens().to_vec();
        toks[2].deprel = "obl".into();
        bad.target = DepSentence::new(toks).unwrap();
        let (ok, report) = screen(&[dog_pair(), gordon_pair(), bad], &LabelSets::default());
        assert_eq!(ok.len(), 2);
        assert_eq!(report.total, 3);
        assert_eq!(report.reasons.get("zero-subjects-target"), Some(&1));
        assert!((report.rate - 2.0 / 3.0).abs() < 1e-12);
    }

    fn checked_pair(
        id: &str,
        en: &[(&str, &str, usize, &str)],
        hu: &[(&str, &str, usize, &str)],
    ) -> EligiblePair {
        eligible(ParsedBisentence {
            id: id.into(),
            source: sent(en, &[]),
            target: sent(hu, &[]),
            subcorpus: "x".into(),
        })
    }

    #[test]
    fn definiteness_flag() {
        let indefinite = checked_pair(
            "r",
            &[
                ("Hagrid", "PROPN", 2, "nsubj"),
                ("checked", "VERB", 0, "root"),
                ("a", "DET", 4, "det"),
                ("weapon", "NOUN", 2, "obj"),
            ],
            &[
                ("Hagrid", "PROPN", 2, "nsubj"),
                ("ellenőrizte", "VERB", 0, "root"),
                ("egy", "DET", 4, "det"),
                ("fegyvert", "NOUN", 2, "obj"),
            ],
        );
        let definite = checked_pair(
            "d",
            &[
                ("He", "PRON", 2, "nsubj"),
                ("took", "VERB", 0, "root"),
                ("the", "DET", 4, "det"),
                ("weapons", "NOUN", 2, "obj"),
            ],
            &[
                ("Ő", "PRON", 2, "nsubj"),
                ("elvette", "VERB", 0, "root"),
                ("a", "DET", 4, "det"),
                ("fegyvert", "NOUN", 2, "obj"),
            ],
        );
        let aug = swap(&indefinite, &definite, Relation::Object).unwrap();
        let flags = diagnose(&aug, &indefinite, &definite, &DiagnoseConfig::default());
        assert!(flags.contains(&Flag {
            kind: FlagKind::DefinitenessMismatch,
            side: Side::Source
        }));
        assert!(flags.contains(&Flag {
            kind: FlagKind::DefinitenessMismatch,
            side: Side::Target
        }));
    }

    #[test]
    fn matching_articles_no_flags() {
        let a = eligible(dog_pair());
        let ship = checked_pair(
            "s",
            &[
                ("He", "PRON", 2, "nsubj"),
                ("saw", "VERB", 0, "root"),
                ("the", "DET", 4, "det"),
                ("ship", "NOUN", 2, "obj"),
            ],
            &[
                ("Ő", "PRON", 2, "nsubj"),
                ("látta", "VERB", 0, "root"),
                ("a", "DET", 4, "det"),
                ("hajót", "NOUN", 2, "obj"),
            ],
        );
        let aug = swap(&a, &ship, Relation::Object).unwrap();
        assert_eq!(aug.source_text, "The black dog is chasing the ship.");
        assert!(diagnose(&aug, &a, &ship, &DiagnoseConfig::default()).is_empty());
    }

    #[test]
    fn pronoun_subject_flag() {
        let a = eligible(dog_pair());
        let pron = checked_pair(
            "p",
            &[
                ("It", "PRON", 2, "nsubj"),
                ("claimed", "VERB", 0, "root"),
                ("treatment", "NOUN", 2, "obj"),
            ],
            &[
                ("Ő", "PRON", 2, "nsubj"),
                ("kérelmezett", "VERB", 0, "root"),
                ("elbánást", "NOUN", 2, "obj"),
            ],
        );
        let aug = swap(&a, &pron, Relation::Subject).unwrap();
        let flags = diagnose(&aug, &a, &pron, &DiagnoseConfig::default());
        assert!(flags.contains(&Flag {
            kind: FlagKind::PronounOnly,
            side: Side::Source
        }));
        assert!(flags.contains(&Flag {
            kind: FlagKind::PronounOnly,
            side: Side::Target
        }));
    }

    #[test]
    fn number_mismatch_from_feats() {
        let mut plural = dog_pair();
        plural.id = "pl".into();
        let mut toks = plural.target.tokens().to_vec();
        toks[2].feats = "Number=Plur".into();
        plural.target = DepSentence::new(toks).unwrap();
        let mut singular = gordon_pair();
        let mut toks = singular.target.tokens().to_vec();
        toks[0].feats = "Number=Sing".into();
        singular.target = DepSentence::new(toks).unwrap();
        let (p, s) = (eligible(plural), eligible(singular));
        let aug = swap(&s, &p, Relation::Subject).unwrap();
        let flags = diagnose(&aug, &s, &p, &DiagnoseConfig::default());
        assert_eq!(
            flags,
            vec![Flag {
                kind: FlagKind::NumberMismatch,
                side: Side::Target
            }]
        );
    }
}
