//! Candidate entity-pair generation with the two pre-filters: the word
//! proximity window and schema compatibility.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::ner::EntityMention;
use crate::schema::{RelationType, SchemaMatrix};

pub const DEFAULT_WINDOW: usize = 35;

/// An ordered mention pair that survived both pre-filters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePair {
    pub subject: EntityMention,
    pub object: EntityMention,
    /// Word tokens strictly between the two spans.
    pub gap: usize,
    pub candidate_set: BTreeSet<RelationType>,
}

/// Counters from one pair-generation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub generated: usize,
    pub window_dropped: usize,
    pub schema_dropped: usize,
    pub kept: usize,
}

impl FilterReport {
    pub fn new(generated: usize, window_dropped: usize, schema_dropped: usize) -> Result<Self> {
        let filtered = window_dropped
            .checked_add(schema_dropped)
            .filter(|f| *f <= generated)
            .ok_or_else(|| {
                Error::Internal(format!(
                    "inconsistent filter counters: generated {generated}, \
                     window_dropped {window_dropped}, schema_dropped {schema_dropped}"
                ))
            })?;
        Ok(FilterReport {
            generated,
            window_dropped,
            schema_dropped,
            kept: generated - filtered,
        })
    }
}

/// Word tokens strictly between two non-overlapping spans.
fn word_gap(doc: &Document, a: &EntityMention, b: &EntityMention) -> usize {
    let (earlier, later) = if a.first_token <= b.first_token {
        (a, b)
    } else {
        (b, a)
    };
    doc.tokens[earlier.last_token + 1..later.first_token]
        .iter()
        .filter(|t| t.is_word())
        .count()
}

/// Generates ordered candidate pairs from one document's mentions.
///
/// Every unordered pair within the window yields up to two ordered pairs;
/// each survives only if its schema candidate set is non-empty. The window
/// threshold is inclusive. Output is sorted by subject then object position.
pub fn generate_pairs(
    doc: &Document,
    mentions: &[EntityMention],
    schema: &SchemaMatrix,
    window: usize,
) -> Result<(Vec<CandidatePair>, FilterReport)> {
    if mentions.iter().any(|m| m.doc_id != doc.id) {
        return Err(Error::validation(
            "generate_pairs requires mentions from a single document",
        ));
    }

    let n = mentions.len();
    let generated = n.saturating_mul(n.saturating_sub(1));
    let mut window_dropped = 0usize;
    let mut schema_dropped = 0usize;
    let mut pairs = Vec::new();

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let subject = &mentions[i];
            let object = &mentions[j];
            let gap = word_gap(doc, subject, object);
            if gap > window {
                window_dropped += 1;
                continue;
            }
            let candidate_set =
                schema.candidate_relations(&subject.entity_class, &object.entity_class)?;
            if candidate_set.is_empty() {
                schema_dropped += 1;
                continue;
            }
            pairs.push(CandidatePair {
                subject: subject.clone(),
                object: object.clone(),
                gap,
                candidate_set,
            });
        }
    }

    pairs.sort_by_key(|p| (p.subject.first_token, p.object.first_token));
    let report = FilterReport::new(generated, window_dropped, schema_dropped)?;
    debug_assert_eq!(report.kept, pairs.len());
    Ok((pairs, report))
}
