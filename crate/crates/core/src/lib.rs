//! Relation extraction over cybersecurity text, end to end: tokenize
//! documents, annotate entity mentions, pre-filter candidate entity pairs by
//! proximity and schema compatibility, classify relations with a
//! feed-forward network over skip-gram word embeddings, and assert the
//! resulting triples in a queryable knowledge graph.
//!
//! The companion guide under `book/` walks through each stage; its code
//! snippets compile and run as doctests of this crate.

pub mod ckg;
pub mod classifier;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod metrics;
pub mod ner;
pub mod pairing;
pub mod pipeline;
pub mod schema;

pub use error::{Error, Result};

// Keep the book's runnable snippets honest: every fenced Rust block in these
// chapters compiles and runs under `cargo test`.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(dead_code)]
            struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Schema, "../../../book/src/schema.md");
    chapter!(CorpusChapter, "../../../book/src/corpus.md");
    chapter!(Entities, "../../../book/src/entities.md");
    chapter!(Pairing, "../../../book/src/pairing.md");
    chapter!(Embeddings, "../../../book/src/embeddings.md");
    chapter!(Classifier, "../../../book/src/classifier.md");
    chapter!(KnowledgeGraph, "../../../book/src/knowledge-graph.md");
    chapter!(Evaluation, "../../../book/src/evaluation.md");
}
