//! End-to-end extraction: mentions → candidate pairs → predicted relations →
//! asserted triples.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ckg::{Graph, Triple};
use crate::classifier::RelationModel;
use crate::corpus::Document;
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::ner::EntityMention;
use crate::pairing::generate_pairs;
use crate::schema::SchemaMatrix;

#[derive(Debug, Clone)]
pub struct ExtractConfig {
    pub window: usize,
    pub confidence_threshold: f64,
    pub schema_mask: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            window: crate::pairing::DEFAULT_WINDOW,
            confidence_threshold: 0.5,
            schema_mask: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub documents: usize,
    pub mentions: usize,
    pub pairs_generated: usize,
    pub pairs_kept: usize,
    pub relations_predicted: usize,
    pub triples_asserted: usize,
}

/// Runs pairing, classification, and assertion over annotated documents.
/// The prediction count can never exceed the kept pair count; predicted
/// triples the schema rejects (possible with masking off) are dropped at
/// assertion time.
pub fn run_extract(
    docs: &[Document],
    mentions: &[EntityMention],
    schema: &SchemaMatrix,
    table: &EmbeddingTable,
    model: &RelationModel,
    graph: &mut Graph,
    cfg: &ExtractConfig,
) -> Result<RunSummary> {
    let mut by_doc: BTreeMap<&str, Vec<EntityMention>> = BTreeMap::new();
    for m in mentions {
        by_doc.entry(m.doc_id.as_str()).or_default().push(m.clone());
    }

    let mut summary = RunSummary {
        documents: docs.len(),
        mentions: mentions.len(),
        pairs_generated: 0,
        pairs_kept: 0,
        relations_predicted: 0,
        triples_asserted: 0,
    };

    let mut predicted_triples = Vec::new();
    for doc in docs {
        let Some(doc_mentions) = by_doc.get(doc.id.as_str()) else {
            continue;
        };
        let mut doc_mentions = doc_mentions.clone();
        doc_mentions.sort_by_key(|m| m.first_token);
        let (pairs, report) = generate_pairs(doc, &doc_mentions, schema, cfg.window)?;
        summary.pairs_generated += report.generated;
        summary.pairs_kept += report.kept;

        for pair in &pairs {
            let Some((relation, confidence)) =
                model.predict(pair, table, cfg.schema_mask, cfg.confidence_threshold)?
            else {
                continue;
            };
            summary.relations_predicted += 1;
            predicted_triples.push(
                Triple::new(
                    pair.subject.surface.clone(),
                    pair.subject.entity_class.clone(),
                    relation,
                    pair.object.surface.clone(),
                    pair.object.entity_class.clone(),
                )
                .with_provenance(doc.id.clone(), confidence),
            );
        }
    }

    let report = graph.assert_triples(&predicted_triples, false);
    summary.triples_asserted = report.inserted;

    if summary.relations_predicted > summary.pairs_kept {
        return Err(Error::Internal(
            "predicted more relations than kept pairs".into(),
        ));
    }
    Ok(summary)
}
