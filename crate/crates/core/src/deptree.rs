//! Subtree queries over a [`DepSentence`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::DepSentence;

/// The two grammatical relations whose subtrees are swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Subject,
    Object,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Subject => "subject",
            Relation::Object => "object",
        })
    }
}

impl std::str::FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "subject" => Ok(Relation::Subject),
            "object" => Ok(Relation::Object),
            other => Err(format!(
                "unknown relation `{other}` (expected subject or object)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("token index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("label set for {0} is empty")]
    EmptyLabelSet(Relation),
}

/// Dependency labels that identify subject and object heads.
///
/// Labels match exactly, so subtypes such as `nsubj:pass` only count when
/// listed explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSets {
    subject: BTreeSet<String>,
    object: BTreeSet<String>,
}

impl Default for LabelSets {
    fn default() -> Self {
        LabelSets {
            subject: BTreeSet::from(["nsubj".to_owned()]),
            object: BTreeSet::from(["obj".to_owned()]),
        }
    }
}

impl LabelSets {
    pub fn new<S: Into<String>>(
        subject: impl IntoIterator<Item = S>,
        object: impl IntoIterator<Item = S>,
    ) -> Result<Self, TreeError> {
        let sets = LabelSets {
            subject: subject.into_iter().map(Into::into).collect(),
            object: object.into_iter().map(Into::into).collect(),
        };
        sets.validate()?;
        Ok(sets)
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        if self.subject.is_empty() {
            return Err(TreeError::EmptyLabelSet(Relation::Subject));
        }
        if self.object.is_empty() {
            return Err(TreeError::EmptyLabelSet(Relation::Object));
        }
        Ok(())
    }

    pub fn labels(&self, relation: Relation) -> &BTreeSet<String> {
        match relation {
            Relation::Subject => &self.subject,
            Relation::Object => &self.object,
        }
    }
}

fn check_index(sentence: &DepSentence, index: usize) -> Result<(), TreeError> {
    if index == 0 || index > sentence.len() {
        return Err(TreeError::IndexOutOfRange {
            index,
            len: sentence.len(),
        });
    }
    Ok(())
}

/// Dependents of every token; slot 0 holds the children of the root.
pub fn children(sentence: &DepSentence) -> Vec<Vec<usize>> {
    let mut kids = vec![Vec::new(); sentence.len() + 1];
    for t in sentence.tokens() {
        kids[t.head].push(t.index);
    }
    kids
}

/// `index` together with all of its transitive dependents.
pub fn descendants(sentence: &DepSentence, index: usize) -> Result<BTreeSet<usize>, TreeError> {
    check_index(sentence, index)?;
    let kids = children(sentence);
    let mut out = BTreeSet::new();
    let mut stack = vec![index];
    while let Some(i) = stack.pop() {
        out.insert(i);
        stack.extend(&kids[i]);
    }
    Ok(out)
}

/// Indices of tokens whose relation label is in the configured set for
/// `relation`, in surface order.
pub fn find_relation_heads(
    sentence: &DepSentence,
    relation: Relation,
    labels: &LabelSets,
) -> Vec<usize> {
    let wanted = labels.labels(relation);
    sentence
        .tokens()
        .iter()
        .filter(|t| wanted.contains(&t.deprel))
        .map(|t| t.index)
        .collect()
}

/// A relation head and its full subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubtreeSpan {
    relation: Relation,
    head_index: usize,
    members: Vec<usize>,
    surface: String,
}

impl SubtreeSpan {
    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn head_index(&self) -> usize {
        self.head_index
    }

    /// Sorted, duplicate-free member indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn first(&self) -> usize {
        self.members[0]
    }

    pub fn last(&self) -> usize {
        *self.members.last().expect("span is never empty")
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_contiguous(&self) -> bool {
        self.last() - self.first() + 1 == self.members.len()
    }

    pub fn overlaps(&self, other: &SubtreeSpan) -> bool {
        let (mut a, mut b) = (
            self.members.iter().peekable(),
            other.members.iter().peekable(),
        );
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            match x.cmp(y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

pub fn span_of(
    sentence: &DepSentence,
    head_index: usize,
    relation: Relation,
) -> Result<SubtreeSpan, TreeError> {
    let members: Vec<usize> = descendants(sentence, head_index)?.into_iter().collect();
    let surface = surface(sentence, &members);
    Ok(SubtreeSpan {
        relation,
        head_index,
        members,
        surface,
    })
}

/// Running text for a sorted selection of token indices.
///
/// Adjacent selected tokens are joined according to their `SpaceAfter`
/// flags and a gap in the selection becomes a single space. A multiword
/// token whose whole range is selected is rendered by its surface form.
pub fn surface(sentence: &DepSentence, indices: &[usize]) -> String {
    let mut out = String::new();
    let mut pos = 0;
    while pos < indices.len() {
        let idx = indices[pos];
        let mwt = sentence.multiwords().iter().find(|m| {
            m.first == idx
                && indices[pos..].len() > m.last - m.first
                && indices[pos + (m.last - m.first)] == m.last
        });
        let (form, last) = match mwt {
            Some(m) => (m.form.as_str(), m.last),
            None => match sentence.token(idx) {
                Some(t) => (t.form.as_str(), idx),
                None => {
                    pos += 1;
                    continue;
                }
            },
        };
        out.push_str(form);
        pos += last - idx + 1;
        if let Some(&next) = indices.get(pos) {
            if next != last + 1 || sentence.space_after(last) {
                out.push(' ');
            }
        }
    }
    out
}

/// The whole sentence as running text.
pub fn sentence_text(sentence: &DepSentence) -> String {
    let all: Vec<usize> = (1..=sentence.len()).collect();
    surface(sentence, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    fn dog() -> DepSentence {
        let t = |i, f, h, r| Token::new(i, f, "X", h, r);
        DepSentence::new(vec![
            t(1, "The", 3, "det"),
            t(2, "black", 3, "amod"),
            t(3, "dog", 5, "nsubj"),
            t(4, "is", 5, "aux"),
            t(5, "chasing", 0, "root"),
            t(6, "the", 8, "det"),
            t(7, "red", 8, "amod"),
            t(8, "cat", 5, "obj").no_space_after(),
            t(9, ".", 5, "punct"),
        ])
        .unwrap()
    }

    #[test]
    fn descendants_of_subject_and_object() {
        let s = dog();
        assert_eq!(descendants(&s, 3).unwrap(), BTreeSet::from([1, 2, 3]));
        assert_eq!(descendants(&s, 8).unwrap(), BTreeSet::from([6, 7, 8]));
        assert_eq!(descendants(&s, 4).unwrap(), BTreeSet::from([4]));
        assert_eq!(descendants(&s, 5).unwrap().len(), 9);
        assert!(matches!(
            descendants(&s, 10),
            Err(TreeError::IndexOutOfRange { .. })
        ));
        assert!(descendants(&s, 0).is_err());
    }

    #[test]
    fn relation_heads() {
        let s = dog();
        let labels = LabelSets::default();
        assert_eq!(find_relation_heads(&s, Relation::Subject, &labels), vec![3]);
        assert_eq!(find_relation_heads(&s, Relation::Object, &labels), vec![8]);
        let no_obj = LabelSets::new(["nsubj"], ["iobj"]).unwrap();
        assert!(find_relation_heads(&s, Relation::Object, &no_obj).is_empty());
        assert!(LabelSets::new(Vec::<String>::new(), vec!["obj".into()]).is_err());
    }

    #[test]
    fn subtypes_need_explicit_labels() {
        let t = |i, f, h, r| Token::new(i, f, "X", h, r);
        let s = DepSentence::new(vec![
            t(1, "It", 3, "nsubj:pass"),
            t(2, "was", 3, "aux:pass"),
            t(3, "eaten", 0, "root"),
        ])
        .unwrap();
        assert!(find_relation_heads(&s, Relation::Subject, &LabelSets::default()).is_empty());
        let wide = LabelSets::new(["nsubj", "nsubj:pass"], ["obj"]).unwrap();
        assert_eq!(find_relation_heads(&s, Relation::Subject, &wide), vec![1]);
    }

    #[test]
    fn spans_and_surface() {
        let s = dog();
        let obj = span_of(&s, 8, Relation::Object).unwrap();
        assert_eq!(obj.members(), &[6, 7, 8]);
        assert_eq!(obj.surface(), "the red cat");
        assert!(obj.is_contiguous());
        let aux = span_of(&s, 4, Relation::Subject).unwrap();
        assert_eq!(aux.surface(), "is");
        assert_eq!(aux.len(), 1);
        assert_eq!(sentence_text(&s), "The black dog is chasing the red cat.");
    }

    #[test]
    fn contiguity_by_index_arithmetic() {
        let span = |m: Vec<usize>| SubtreeSpan {
            relation: Relation::Object,
            head_index: m[0],
            surface: String::new(),
            members: m,
        };
        assert!(span(vec![6, 7, 8]).is_contiguous());
        assert!(!span(vec![2, 4, 5]).is_contiguous());
        assert!(span(vec![4]).is_contiguous());
        assert!(span(vec![1, 2]).overlaps(&span(vec![2, 3])));
        assert!(!span(vec![1, 2]).overlaps(&span(vec![3, 4])));
    }

    #[test]
    fn gap_renders_single_space() {
        let s = dog();
        assert_eq!(surface(&s, &[7, 8, 9]), "red cat.");
        assert_eq!(surface(&s, &[3, 8]), "dog cat");
    }
}
