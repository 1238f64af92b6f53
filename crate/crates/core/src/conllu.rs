//! Reading and writing dependency-annotated sentences in CoNLL-U.
//!
//! Only the columns the augmentation method needs (`FORM`, `UPOS`, `HEAD`,
//! `DEPREL` and the `SpaceAfter=No` flag in `MISC`) are interpreted. `LEMMA`,
//! `XPOS`, `FEATS`, `DEPS` and the rest of `MISC` are kept verbatim so a
//! parse/serialize cycle preserves them.
//!
//! Multiword token ranges (`3-4`) are retained for surface reconstruction.
//! Empty nodes (`5.1`) belong to enhanced dependencies and are dropped; the
//! parser counts how many it saw.

use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

const SPACE_AFTER_NO: &str = "SpaceAfter=No";

/// One syntactic word of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based surface position.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// Index of the governing token, 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    /// `MISC` column without the `SpaceAfter=No` entry; `_` when empty.
    pub misc: String,
    pub space_after: bool,
}

impl Token {
    /// A token with every pass-through column set to `_`.
    pub fn new(index: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            index,
            form: form.to_owned(),
            lemma: "_".to_owned(),
            upos: upos.to_owned(),
            xpos: "_".to_owned(),
            feats: "_".to_owned(),
            head,
            deprel: deprel.to_owned(),
            deps: "_".to_owned(),
            misc: "_".to_owned(),
            space_after: true,
        }
    }

    pub fn no_space_after(mut self) -> Self {
        self.space_after = false;
        self
    }

    /// Looks up a `Key=Value` entry in `FEATS`.
    pub fn feature(&self, key: &str) -> Option<&str> {
        self.feats
            .split('|')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
    }
}

/// A multiword token range line such as `1-2 del ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiwordToken {
    pub first: usize,
    pub last: usize,
    pub form: String,
    pub misc: String,
    pub space_after: bool,
}

/// Why a sentence block does not form a valid single-rooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("sentence has no tokens")]
    Empty,
    #[error("expected token index {expected}, found {found}")]
    IndexGap { expected: usize, found: usize },
    #[error("token {index} has head {head} outside the sentence")]
    HeadOutOfRange { index: usize, head: usize },
    #[error("token {index} is its own head")]
    SelfLoop { index: usize },
    #[error("token {index} has an empty form")]
    EmptyForm { index: usize },
    #[error("no token is attached to the root")]
    NoRoot,
    #[error("multiple root tokens: {roots:?}")]
    MultipleRoots { roots: Vec<usize> },
    #[error("token {index} lies on a head cycle")]
    Cycle { index: usize },
    #[error("multiword range {first}-{last} is invalid")]
    BadMultiword { first: usize, last: usize },
}

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("sentence {} (line {line}): {kind}", display_id(.sent_id))]
    Structure {
        sent_id: Option<String>,
        line: usize,
        kind: StructureError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn display_id(id: &Option<String>) -> &str {
    id.as_deref().unwrap_or("<no sent_id>")
}

/// A validated dependency tree over an ordered token list.
///
/// Token indices run exactly `1..=n`, exactly one token attaches to the
/// root and every head chain terminates there. Values are immutable once
/// built; all constructors validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepSentence {
    tokens: Vec<Token>,
    multiwords: Vec<MultiwordToken>,
    sent_id: Option<String>,
    text: Option<String>,
    comments: Vec<String>,
}

impl DepSentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, StructureError> {
        Self::with_multiwords(tokens, Vec::new())
    }

    pub fn with_multiwords(
        tokens: Vec<Token>,
        multiwords: Vec<MultiwordToken>,
    ) -> Result<Self, StructureError> {
        validate(&tokens, &multiwords)?;
        Ok(DepSentence {
            tokens,
            multiwords,
            sent_id: None,
            text: None,
            comments: Vec::new(),
        })
    }

    pub fn with_sent_id(mut self, id: impl Into<String>) -> Self {
        self.sent_id = Some(id.into());
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    /// Extra comment lines, kept verbatim. Lines without a leading `#`
    /// get `# ` prepended.
    pub fn with_comments(mut self, comments: Vec<String>) -> Self {
        self.comments = comments
            .into_iter()
            .map(|c| {
                if c.starts_with('#') {
                    c
                } else {
                    format!("# {c}")
                }
            })
            .collect();
        self
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn multiwords(&self) -> &[MultiwordToken] {
        &self.multiwords
    }

    pub fn sent_id(&self) -> Option<&str> {
        self.sent_id.as_deref()
    }

    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    /// Index of the token attached to the artificial root.
    pub fn root(&self) -> usize {
        self.tokens
            .iter()
            .find(|t| t.head == 0)
            .map(|t| t.index)
            .expect("validated sentence has a root")
    }

    /// Whether whitespace follows token `index` in running text. The last
    /// word of a multiword range takes the range's flag.
    pub fn space_after(&self, index: usize) -> bool {
        match self.multiwords.iter().find(|m| m.last == index) {
            Some(mwt) => mwt.space_after,
            None => self.token(index).is_none_or(|t| t.space_after),
        }
    }
}

fn validate(tokens: &[Token], multiwords: &[MultiwordToken]) -> Result<(), StructureError> {
    if tokens.is_empty() {
        return Err(StructureError::Empty);
    }
    let n = tokens.len();
    for (i, t) in tokens.iter().enumerate() {
        if t.index != i + 1 {
            return Err(StructureError::IndexGap {
                expected: i + 1,
                found: t.index,
            });
        }
        if t.form.is_empty() {
            return Err(StructureError::EmptyForm { index: t.index });
        }
        if t.head == t.index {
            return Err(StructureError::SelfLoop { index: t.index });
        }
        if t.head > n {
            return Err(StructureError::HeadOutOfRange {
                index: t.index,
                head: t.head,
            });
        }
    }
    let roots: Vec<usize> = tokens
        .iter()
        .filter(|t| t.head == 0)
        .map(|t| t.index)
        .collect();
    match roots.len() {
        0 => return Err(StructureError::NoRoot),
        1 => {}
        _ => return Err(StructureError::MultipleRoots { roots }),
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    for start in 1..=n {
        let mut path = Vec::new();
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = tokens[cur - 1].head;
        }
        if state[cur] == 1 {
            return Err(StructureError::Cycle { index: cur });
        }
        for p in path {
            state[p] = 2;
        }
    }
    let mut prev_last = 0;
    for m in multiwords {
        if m.first >= m.last || m.first <= prev_last || m.last > n {
            return Err(StructureError::BadMultiword {
                first: m.first,
                last: m.last,
            });
        }
        prev_last = m.last;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Skip and count invalid sentence blocks instead of failing.
    pub lenient: bool,
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub sentences: Vec<DepSentence>,
    /// Blocks rejected in lenient mode: 0-based block position and reason.
    pub skipped: Vec<(usize, ConlluError)>,
    /// Sentence blocks seen, valid or not.
    pub blocks: usize,
    pub empty_nodes_dropped: usize,
}

/// Strict parse: the first malformed or invalid block aborts.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<Vec<DepSentence>, ConlluError> {
    parse_conllu_with(reader, ParseOptions::default()).map(|o| o.sentences)
}

pub fn parse_str(input: &str) -> Result<Vec<DepSentence>, ConlluError> {
    parse_conllu(input.as_bytes())
}

pub fn parse_conllu_with<R: BufRead>(
    reader: R,
    opts: ParseOptions,
) -> Result<ParseOutcome, ConlluError> {
    let mut outcome = ParseOutcome::default();
    let mut block: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let mut line = line?;
        if line.ends_with('\r') {
            line.pop();
        }
        if line.trim().is_empty() {
            if !block.is_empty() {
                finish_block(&block, opts, &mut outcome)?;
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        finish_block(&block, opts, &mut outcome)?;
    }
    if outcome.empty_nodes_dropped > 0 {
        log::warn!("dropped {} empty-node lines", outcome.empty_nodes_dropped);
    }
    Ok(outcome)
}

fn finish_block(
    block: &[(usize, String)],
    opts: ParseOptions,
    outcome: &mut ParseOutcome,
) -> Result<(), ConlluError> {
    let position = outcome.blocks;
    match parse_block(block, &mut outcome.empty_nodes_dropped) {
        Ok(Some(sentence)) => outcome.sentences.push(sentence),
        Ok(None) => return Ok(()),
        Err(e @ ConlluError::Io(_)) => return Err(e),
        Err(e) if opts.lenient => {
            log::debug!("skipping sentence: {e}");
            outcome.skipped.push((position, e));
        }
        Err(e) => return Err(e),
    }
    outcome.blocks += 1;
    Ok(())
}

fn split_misc(misc: &str) -> (String, bool) {
    let mut space_after = true;
    let rest: Vec<&str> = misc
        .split('|')
        .filter(|entry| {
            if *entry == SPACE_AFTER_NO {
                space_after = false;
                false
            } else {
                !entry.is_empty() && *entry != "_"
            }
        })
        .collect();
    let rest = if rest.is_empty() {
        "_".to_owned()
    } else {
        rest.join("|")
    };
    (rest, space_after)
}

fn join_misc(misc: &str, space_after: bool) -> String {
    match (misc, space_after) {
        (m, true) => m.to_owned(),
        ("_", false) => SPACE_AFTER_NO.to_owned(),
        (m, false) => format!("{m}|{SPACE_AFTER_NO}"),
    }
}

fn parse_index(field: &str, line: usize, what: &str) -> Result<usize, ConlluError> {
    field.parse().map_err(|_| ConlluError::Format {
        line,
        message: format!("invalid {what} `{field}`"),
    })
}

fn parse_block(
    block: &[(usize, String)],
    empty_nodes: &mut usize,
) -> Result<Option<DepSentence>, ConlluError> {
    let mut sent_id = None;
    let mut text = None;
    let mut comments = Vec::new();
    let mut tokens = Vec::new();
    let mut multiwords = Vec::new();

    for (line_no, line) in block {
        let line_no = *line_no;
        if let Some(comment) = line.strip_prefix('#') {
            let body = comment.trim_start();
            if let Some(v) = body.strip_prefix("sent_id =") {
                sent_id = Some(v.trim().to_owned());
            } else if let Some(v) = body.strip_prefix("text =") {
                text = Some(v.trim().to_owned());
            } else {
                comments.push(line.clone());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::Format {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('.') {
            *empty_nodes += 1;
            continue;
        }
        if let Some((a, b)) = id.split_once('-') {
            let (misc, space_after) = split_misc(cols[9]);
            multiwords.push(MultiwordToken {
                first: parse_index(a, line_no, "range start")?,
                last: parse_index(b, line_no, "range end")?,
                form: cols[1].to_owned(),
                misc,
                space_after,
            });
            continue;
        }
        let (misc, space_after) = split_misc(cols[9]);
        tokens.push(Token {
            index: parse_index(id, line_no, "token id")?,
            form: cols[1].to_owned(),
            lemma: cols[2].to_owned(),
            upos: cols[3].to_owned(),
            xpos: cols[4].to_owned(),
            feats: cols[5].to_owned(),
            head: parse_index(cols[6], line_no, "head")?,
            deprel: cols[7].to_owned(),
            deps: cols[8].to_owned(),
            misc,
            space_after,
        });
    }

    if tokens.is_empty() && multiwords.is_empty() {
        // comment-only block, e.g. a trailing `# newdoc`
        return Ok(None);
    }
    let first_line = block[0].0;
    let sentence = DepSentence::with_multiwords(tokens, multiwords).map_err(|kind| {
        ConlluError::Structure {
            sent_id: sent_id.clone(),
            line: first_line,
            kind,
        }
    })?;
    let mut sentence = sentence.with_comments(comments);
    sentence.sent_id = sent_id;
    sentence.text = text;
    Ok(Some(sentence))
}

/// Writes sentences as CoNLL-U, each block terminated by a blank line.
pub fn write_conllu<W: Write>(mut out: W, sentences: &[DepSentence]) -> io::Result<()> {
    for s in sentences {
        write!(out, "{}", SentenceBlock(s))?;
    }
    Ok(())
}

pub fn serialize_conllu(sentences: &[DepSentence]) -> String {
    sentences
        .iter()
        .map(|s| SentenceBlock(s).to_string())
        .collect()
}

struct SentenceBlock<'a>(&'a DepSentence);

impl fmt::Display for SentenceBlock<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        if let Some(id) = &s.sent_id {
            writeln!(f, "# sent_id = {id}")?;
        }
        if let Some(text) = &s.text {
            writeln!(f, "# text = {text}")?;
        }
        for c in &s.comments {
            writeln!(f, "{c}")?;
        }
        let mut mwts = s.multiwords.iter().peekable();
        for t in &s.tokens {
            if let Some(m) = mwts.next_if(|m| m.first == t.index) {
                writeln!(
                    f,
                    "{}-{}\t{}\t_\t_\t_\t_\t_\t_\t_\t{}",
                    m.first,
                    m.last,
                    m.form,
                    join_misc(&m.misc, m.space_after)
                )?;
            }
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.index,
                t.form,
                t.lemma,
                t.upos,
                t.xpos,
                t.feats,
                t.head,
                t.deprel,
                t.deps,
                join_misc(&t.misc, t.space_after)
            )?;
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOG: &str = "# sent_id = en-1
# text = The black dog is chasing the red cat.
1\tThe\tthe\tDET\t_\t_\t3\tdet\t_\t_
2\tblack\tblack\tADJ\t_\t_\t3\tamod\t_\t_
3\tdog\tdog\tNOUN\t_\t_\t5\tnsubj\t_\t_
4\tis\tbe\tAUX\t_\t_\t5\taux\t_\t_
5\tchasing\tchase\tVERB\t_\t_\t0\troot\t_\t_
6\tthe\tthe\tDET\t_\t_\t8\tdet\t_\t_
7\tred\tred\tADJ\t_\t_\t8\tamod\t_\t_
8\tcat\tcat\tNOUN\t_\t_\t5\tobj\t_\tSpaceAfter=No
9\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_

";

    #[test]
    fn parses_dog_sentence() {
        let sents = parse_str(DOG).unwrap();
        assert_eq!(sents.len(), 1);
        let s = &sents[0];
        assert_eq!(s.len(), 9);
        assert_eq!(s.root(), 5);
        assert_eq!(s.sent_id(), Some("en-1"));
        assert_eq!(s.text(), Some("The black dog is chasing the red cat."));
        assert!(!s.token(8).unwrap().space_after);
        assert_eq!(s.token(8).unwrap().misc, "_");
    }

    #[test]
    fn round_trip_is_identical() {
        let sents = parse_str(DOG).unwrap();
        assert_eq!(serialize_conllu(&sents), DOG);
    }

    #[test]
    fn empty_input() {
        assert!(parse_str("").unwrap().is_empty());
        assert_eq!(serialize_conllu(&[]), "");
    }

    #[test]
    fn crlf_and_missing_final_blank_line() {
        let crlf = DOG.trim_end().replace('\n', "\r\n");
        let sents = parse_str(&crlf).unwrap();
        assert_eq!(serialize_conllu(&sents), DOG);
    }

    #[test]
    fn two_sentences_two_blocks() {
        let input = format!("{DOG}{DOG}");
        let out = serialize_conllu(&parse_str(&input).unwrap());
        assert_eq!(out.matches("\n\n").count(), 2);
        assert!(out.ends_with("\n\n"));
    }

    #[test]
    fn self_loop_rejected() {
        let bad = DOG.replace("3\tdog\tdog\tNOUN\t_\t_\t5", "3\tdog\tdog\tNOUN\t_\t_\t3");
        match parse_str(&bad) {
            Err(ConlluError::Structure { kind, sent_id, .. }) => {
                assert_eq!(kind, StructureError::SelfLoop { index: 3 });
                assert_eq!(sent_id.as_deref(), Some("en-1"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiple_roots_and_cycles() {
        let two_roots = DOG.replace("4\tis\tbe\tAUX\t_\t_\t5", "4\tis\tbe\tAUX\t_\t_\t0");
        assert!(matches!(
            parse_str(&two_roots),
            Err(ConlluError::Structure {
                kind: StructureError::MultipleRoots { .. },
                ..
            })
        ));
        // dog -> the -> dog
        let cycle = DOG.replace("3\tdog\tdog\tNOUN\t_\t_\t5", "3\tdog\tdog\tNOUN\t_\t_\t1");
        assert!(matches!(
            parse_str(&cycle),
            Err(ConlluError::Structure {
                kind: StructureError::Cycle { .. },
                ..
            })
        ));
    }

    #[test]
    fn gaps_and_duplicates() {
        let gap = DOG.replace("4\tis", "14\tis");
        assert!(matches!(
            parse_str(&gap),
            Err(ConlluError::Structure {
                kind: StructureError::IndexGap {
                    expected: 4,
                    found: 14
                },
                ..
            })
        ));
        let dup = DOG.replace("4\tis", "3\tis");
        assert!(matches!(
            parse_str(&dup),
            Err(ConlluError::Structure {
                kind: StructureError::IndexGap { .. },
                ..
            })
        ));
    }

    #[test]
    fn bad_column_count_reports_line() {
        let bad = DOG.replace("2\tblack\tblack\tADJ\t_\t_\t3\tamod\t_\t_", "2\tblack\tADJ");
        match parse_str(&bad) {
            Err(ConlluError::Format { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lenient_skips_and_counts() {
        let bad = DOG.replace("3\tdog\tdog\tNOUN\t_\t_\t5", "3\tdog\tdog\tNOUN\t_\t_\t3");
        let input = format!("{DOG}{bad}{DOG}");
        let out = parse_conllu_with(input.as_bytes(), ParseOptions { lenient: true }).unwrap();
        assert_eq!(out.sentences.len(), 2);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].0, 1);
        assert_eq!(out.blocks, 3);
        assert!(parse_str(&input).is_err());
    }

    #[test]
    fn empty_nodes_dropped_and_multiwords_kept() {
        let input = "# text = Vámonos al mar.
1-2\tVámonos\t_\t_\t_\t_\t_\t_\t_\t_
1\tVamos\tir\tVERB\t_\t_\t0\troot\t_\t_
2\tnos\tnosotros\tPRON\t_\t_\t1\tobj\t_\t_
3-4\tal\t_\t_\t_\t_\t_\t_\t_\t_
3\ta\ta\tADP\t_\t_\t5\tcase\t_\t_
4\tel\tel\tDET\t_\t_\t5\tdet\t_\t_
4.1\tzzz\t_\t_\t_\t_\t_\t_\t_\t_
5\tmar\tmar\tNOUN\t_\t_\t1\tobl\t_\tSpaceAfter=No
6\t.\t.\tPUNCT\t_\t_\t1\tpunct\t_\t_

";
        let out = parse_conllu_with(input.as_bytes(), ParseOptions::default()).unwrap();
        assert_eq!(out.empty_nodes_dropped, 1);
        let s = &out.sentences[0];
        assert_eq!(s.multiwords().len(), 2);
        assert_eq!(s.len(), 6);
        assert_eq!(
            serialize_conllu(&out.sentences),
            input.replace("4.1\tzzz\t_\t_\t_\t_\t_\t_\t_\t_\n", "")
        );
    }

    #[test]
    fn pass_through_columns_survive() {
        let input = "1\tKutya\tkutya\tNOUN\tN\tCase=Nom|Number=Sing\t2\tnsubj\t2:nsubj\tGloss=dog|SpaceAfter=No\n2\tugat\tugat\tVERB\tV\t_\t0\troot\t0:root\t_\n\n";
        let sents = parse_str(input).unwrap();
        let t = sents[0].token(1).unwrap();
        assert_eq!(t.feature("Number"), Some("Sing"));
        assert_eq!(t.misc, "Gloss=dog");
        assert!(!t.space_after);
        assert_eq!(serialize_conllu(&sents), input);
    }
}
