//! The cybersecurity knowledge graph: schema-validated triple storage with
//! provenance, source/relation/target import, export, and a conjunctive
//! query engine.

mod query;

pub use query::{evaluate_query, parse_query, Pattern, Query, Term};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{EntityClass, RelationType, SchemaMatrix};

/// Where an asserted triple came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub confidence: f64,
}

/// A semantic triple with entity classes and optional provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub subject_class: EntityClass,
    pub relation: RelationType,
    pub object: String,
    pub object_class: EntityClass,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        subject_class: impl Into<EntityClass>,
        relation: impl Into<RelationType>,
        object: impl Into<String>,
        object_class: impl Into<EntityClass>,
    ) -> Self {
        Triple {
            subject: normalize_label(&subject.into()),
            subject_class: subject_class.into(),
            relation: relation.into(),
            object: normalize_label(&object.into()),
            object_class: object_class.into(),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, doc_id: impl Into<String>, confidence: f64) -> Self {
        self.provenance = Some(Provenance {
            doc_id: doc_id.into(),
            confidence,
        });
        self
    }
}

/// Lowercased, single-spaced entity label.
pub fn normalize_label(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AssertReport {
    pub inserted: usize,
    pub duplicates: usize,
    pub rejected: usize,
    #[serde(skip)]
    pub rejections: Vec<(Triple, String)>,
}

/// In-memory triple store. Entity labels carry exactly one class; triples are
/// a set keyed on (subject, relation, object).
#[derive(Debug, Clone)]
pub struct Graph {
    schema: SchemaMatrix,
    triples: BTreeMap<(String, RelationType, String), TripleData>,
    type_index: BTreeMap<String, EntityClass>,
}

#[derive(Debug, Clone)]
struct TripleData {
    provenance: Option<Provenance>,
}

impl Graph {
    pub fn new(schema: SchemaMatrix) -> Self {
        Graph {
            schema,
            triples: BTreeMap::new(),
            type_index: BTreeMap::new(),
        }
    }

    pub fn schema(&self) -> &SchemaMatrix {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn entity_class(&self, label: &str) -> Option<&EntityClass> {
        self.type_index.get(&normalize_label(label))
    }

    pub fn entities(&self) -> impl Iterator<Item = (&String, &EntityClass)> {
        self.type_index.iter()
    }

    pub fn contains(&self, subject: &str, relation: &RelationType, object: &str) -> bool {
        self.triples.contains_key(&(
            normalize_label(subject),
            relation.clone(),
            normalize_label(object),
        ))
    }

    /// Sorted view of the stored triples.
    pub fn triples(&self) -> Vec<Triple> {
        self.triples
            .iter()
            .map(|((s, r, o), data)| Triple {
                subject: s.clone(),
                subject_class: self.type_index[s].clone(),
                relation: r.clone(),
                object: o.clone(),
                object_class: self.type_index[o].clone(),
                provenance: data.provenance.clone(),
            })
            .collect()
    }

    /// Inserts triples with set semantics. Schema-invalid triples are
    /// rejected unless `override_schema`; class conflicts are always
    /// rejected.
    pub fn assert_triples(&mut self, triples: &[Triple], override_schema: bool) -> AssertReport {
        let mut report = AssertReport::default();
        for triple in triples {
            match self.assert_one(triple, override_schema) {
                Ok(true) => report.inserted += 1,
                Ok(false) => report.duplicates += 1,
                Err(reason) => {
                    report.rejected += 1;
                    report.rejections.push((triple.clone(), reason));
                }
            }
        }
        report
    }

    fn assert_one(
        &mut self,
        triple: &Triple,
        override_schema: bool,
    ) -> std::result::Result<bool, String> {
        let subject = normalize_label(&triple.subject);
        let object = normalize_label(&triple.object);
        if subject.is_empty() || object.is_empty() {
            return Err("empty entity label".into());
        }
        for (label, class) in [(&subject, &triple.subject_class), (&object, &triple.object_class)] {
            if let Some(existing) = self.type_index.get(label) {
                if existing != class {
                    return Err(format!(
                        "entity '{label}' already asserted as class '{existing}', not '{class}'"
                    ));
                }
            }
        }
        if !override_schema {
            let candidates = self
                .schema
                .candidate_relations(&triple.subject_class, &triple.object_class)
                .map_err(|e| e.to_string())?;
            if !candidates.contains(&triple.relation) {
                return Err(format!(
                    "relation '{}' not permitted for ({}, {})",
                    triple.relation, triple.subject_class, triple.object_class
                ));
            }
        }
        let key = (subject.clone(), triple.relation.clone(), object.clone());
        if self.triples.contains_key(&key) {
            return Ok(false);
        }
        self.type_index.insert(subject, triple.subject_class.clone());
        self.type_index.insert(object, triple.object_class.clone());
        self.triples.insert(
            key,
            TripleData {
                provenance: triple.provenance.clone(),
            },
        );
        Ok(true)
    }

    /// ntriples-like export: `<s> <rel> <o> .` plus `<e> <type> <class> .`
    /// lines, sorted.
    pub fn export_ntriples(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        for (label, class) in &self.type_index {
            lines.push(format!("<{label}> <type> <{class}> ."));
        }
        for (s, r, o) in self.triples.keys() {
            lines.push(format!("<{s}> <{r}> <{o}> ."));
        }
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// JSON export with entities, triples, and provenance.
    pub fn export_json(&self) -> String {
        let doc = GraphJson {
            format: "relext-graph-v1".into(),
            entities: self.type_index.clone(),
            triples: self.triples(),
        };
        // BTreeMap keys and sorted triples keep this deterministic
        serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
    }

    pub fn import_json(text: &str, schema: SchemaMatrix) -> Result<Graph> {
        let doc: GraphJson = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), format!("invalid graph JSON: {e}")))?;
        let mut graph = Graph::new(schema);
        let report = graph.assert_triples(&doc.triples, true);
        if report.rejected > 0 {
            let (t, reason) = &report.rejections[0];
            return Err(Error::validation(format!(
                "graph import rejected triple ({}, {}, {}): {reason}",
                t.subject, t.relation, t.object
            )));
        }
        Ok(graph)
    }

    pub fn import_ntriples(text: &str, schema: SchemaMatrix) -> Result<Graph> {
        let mut classes: BTreeMap<String, EntityClass> = BTreeMap::new();
        let mut relation_lines: Vec<(usize, String, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields = split_ntriples_line(line)
                .ok_or_else(|| Error::parse(lineno, "expected `<s> <p> <o> .`"))?;
            let (s, p, o) = fields;
            if p == "type" {
                classes.insert(normalize_label(&s), EntityClass::new(o));
            } else {
                relation_lines.push((lineno, s, p, o));
            }
        }
        let mut graph = Graph::new(schema);
        for (lineno, s, p, o) in relation_lines {
            let s_norm = normalize_label(&s);
            let o_norm = normalize_label(&o);
            let sc = classes
                .get(&s_norm)
                .ok_or_else(|| Error::parse(lineno, format!("no type line for '{s}'")))?;
            let oc = classes
                .get(&o_norm)
                .ok_or_else(|| Error::parse(lineno, format!("no type line for '{o}'")))?;
            let triple = Triple::new(s_norm, sc.clone(), p, o_norm, oc.clone());
            let report = graph.assert_triples(&[triple], true);
            if report.rejected > 0 {
                return Err(Error::parse(lineno, report.rejections[0].1.clone()));
            }
        }
        Ok(graph)
    }
}

fn split_ntriples_line(line: &str) -> Option<(String, String, String)> {
    let line = line.strip_suffix('.').map(str::trim_end).unwrap_or(line).trim();
    let mut parts = Vec::new();
    let mut rest = line;
    for _ in 0..3 {
        rest = rest.trim_start();
        if !rest.starts_with('<') {
            return None;
        }
        let end = rest.find('>')?;
        parts.push(rest[1..end].to_string());
        rest = &rest[end + 1..];
    }
    if !rest.trim().is_empty() {
        return None;
    }
    Some((parts[0].clone(), parts[1].clone(), parts[2].clone()))
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    format: String,
    entities: BTreeMap<String, EntityClass>,
    triples: Vec<Triple>,
}

/// Parses `source<TAB>source_class<TAB>relation<TAB>target<TAB>target_class`
/// lines. Malformed lines are reported with their line numbers; the rest
/// still parse.
pub fn import_srt(path: &Path) -> Result<(Vec<Triple>, Vec<(usize, String)>)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut triples = Vec::new();
    let mut malformed = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 5 {
            malformed.push((lineno, format!("expected 5 tab-separated fields, found {}", fields.len())));
            continue;
        }
        triples.push(Triple::new(
            fields[0], fields[1], fields[2], fields[3], fields[4],
        ));
    }
    Ok((triples, malformed))
}
