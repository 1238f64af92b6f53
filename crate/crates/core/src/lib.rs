//! Parallel corpus preparation and syntax-aware data augmentation for
//! machine translation.
//!
//! The crate cleans and filters sentence-aligned corpora, splits them by
//! subcorpus, and generates new bisentences by exchanging subject or object
//! dependency subtrees between pairs whose source and target parses both
//! admit the exchange.
//!
//! ```
//! use synaug::augment::{check_eligibility, swap, ParsedBisentence};
//! use synaug::conllu::parse_str;
//! use synaug::deptree::{LabelSets, Relation};
//!
//! let en = "1\tWe\t_\tPRON\t_\t_\t2\tnsubj\t_\t_\n2\tsaw\t_\tVERB\t_\t_\t0\troot\t_\t_\n3\tboats\t_\tNOUN\t_\t_\t2\tobj\t_\t_\n\n";
//! let hu = "1\tMi\t_\tPRON\t_\t_\t2\tnsubj\t_\t_\n2\tláttunk\t_\tVERB\t_\t_\t0\troot\t_\t_\n3\thajókat\t_\tNOUN\t_\t_\t2\tobj\t_\t_\n\n";
//! let pair = |id: &str, obj_en: &str, obj_hu: &str| ParsedBisentence {
//!     id: id.into(),
//!     source: parse_str(&en.replace("boats", obj_en)).unwrap().remove(0),
//!     target: parse_str(&hu.replace("hajókat", obj_hu)).unwrap().remove(0),
//!     subcorpus: "demo".into(),
//! };
//! let labels = LabelSets::default();
//! let a = check_eligibility(&pair("a", "boats", "hajókat"), &labels).unwrap();
//! let b = check_eligibility(&pair("b", "birds", "madarakat"), &labels).unwrap();
//! let out = swap(&a, &b, Relation::Object).unwrap();
//! assert_eq!(out.source_text, "We saw birds");
//! assert_eq!(out.target_text, "Mi láttunk madarakat");
//! ```
//!
//! A longer walk-through lives in the `book/` directory of the repository;
//! its Rust snippets are compiled and run as doc-tests of this crate.

pub mod augment;
pub mod conllu;
pub mod corpus;
pub mod deptree;
pub mod filter;
pub mod metrics;
pub mod pipeline;
pub mod split;
pub mod stats;

pub use augment::{AugmentedPair, EligiblePair, ParsedBisentence};
pub use conllu::{DepSentence, Token};
pub use corpus::RawBisentence;
pub use deptree::{LabelSets, Relation, SubtreeSpan};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conllu.md")]
    mod conllu {}
    #[doc = include_str!("../../../book/src/subtrees.md")]
    mod subtrees {}
    #[doc = include_str!("../../../book/src/filtering.md")]
    mod filtering {}
    #[doc = include_str!("../../../book/src/augmentation.md")]
    mod augmentation {}
    #[doc = include_str!("../../../book/src/splitting.md")]
    mod splitting {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/bleu.md")]
    mod bleu {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
