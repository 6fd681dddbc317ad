//! Entity mention annotation: gazetteer longest-match plus standoff import.
//!
//! The gazetteer recognizer stands in for an external cybersecurity NER;
//! externally produced annotations enter through the standoff JSONL format.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Document};
use crate::error::{Error, Result};
use crate::schema::{EntityClass, SchemaMatrix};

/// An annotated token span with its entity class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub doc_id: String,
    pub first_token: usize,
    /// Inclusive.
    pub last_token: usize,
    pub surface: String,
    pub entity_class: EntityClass,
}

impl EntityMention {
    pub fn token_len(&self) -> usize {
        self.last_token - self.first_token + 1
    }
}

/// Dictionary of normalized multi-token terms mapped to entity classes.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: HashMap<Vec<String>, EntityClass>,
    max_len: usize,
}

/// Load result: the gazetteer plus how many duplicate terms were overwritten.
#[derive(Debug)]
pub struct GazetteerLoad {
    pub gazetteer: Gazetteer,
    pub duplicate_warnings: usize,
}

impl Gazetteer {
    pub fn new() -> Self {
        Gazetteer {
            entries: HashMap::new(),
            max_len: 0,
        }
    }

    /// Inserts a term; returns true when it replaced an existing entry.
    pub fn insert(&mut self, term: &str, class: EntityClass, schema: &SchemaMatrix) -> Result<bool> {
        if !schema.has_class(&class) {
            return Err(Error::validation(format!(
                "gazetteer class '{class}' is not declared in the schema"
            )));
        }
        let tokens: Vec<String> = tokenize(term).into_iter().map(|t| t.surface).collect();
        if tokens.is_empty() {
            return Err(Error::validation("gazetteer term is empty"));
        }
        self.max_len = self.max_len.max(tokens.len());
        Ok(self.entries.insert(tokens, class).is_some())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Loads a TSV gazetteer (`term<TAB>class` per line); duplicate terms are
    /// overwritten last-wins.
    pub fn load(path: &Path, schema: &SchemaMatrix) -> Result<GazetteerLoad> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut gazetteer = Gazetteer::new();
        let mut duplicate_warnings = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (term, class) = line.split_once('\t').ok_or_else(|| {
                Error::parse(idx + 1, "gazetteer line must be term<TAB>class")
            })?;
            let inserted = gazetteer
                .insert(term, EntityClass::new(class.trim()), schema)
                .map_err(|e| Error::validation(format!("line {}: {e}", idx + 1)))?;
            if inserted {
                duplicate_warnings += 1;
            }
        }
        Ok(GazetteerLoad {
            gazetteer,
            duplicate_warnings,
        })
    }

    /// Greedy left-to-right longest-match annotation. Matched spans never
    /// overlap and come back in document order.
    pub fn annotate(&self, doc: &Document) -> Vec<EntityMention> {
        let surfaces: Vec<&str> = doc.tokens.iter().map(|t| t.surface.as_str()).collect();
        let mut mentions = Vec::new();
        let mut i = 0usize;
        while i < surfaces.len() {
            let upper = self.max_len.min(surfaces.len() - i);
            let mut matched = None;
            for len in (1..=upper).rev() {
                let key: Vec<String> = surfaces[i..i + len].iter().map(|s| s.to_string()).collect();
                if let Some(class) = self.entries.get(&key) {
                    matched = Some((len, class.clone()));
                    break;
                }
            }
            if let Some((len, class)) = matched {
                mentions.push(EntityMention {
                    doc_id: doc.id.clone(),
                    first_token: i,
                    last_token: i + len - 1,
                    surface: surfaces[i..i + len].join(" "),
                    entity_class: class,
                });
                i += len;
            } else {
                i += 1;
            }
        }
        mentions
    }
}

impl Default for Gazetteer {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Deserialize)]
struct StandoffLine {
    doc_id: String,
    first_token: usize,
    last_token: usize,
    class: String,
}

/// Standoff import result: valid mentions plus per-line rejection reports.
#[derive(Debug)]
pub struct StandoffLoad {
    pub mentions: Vec<EntityMention>,
    pub rejected: Vec<(usize, String)>,
}

/// Loads standoff JSONL annotations, validating spans against the documents
/// and classes against the schema. Invalid lines are reported; valid lines
/// still load.
pub fn load_standoff(
    path: &Path,
    docs: &[Document],
    schema: &SchemaMatrix,
) -> Result<StandoffLoad> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();

    let mut mentions = Vec::new();
    let mut rejected = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let line: StandoffLine = match serde_json::from_str(raw) {
            Ok(l) => l,
            Err(e) => {
                rejected.push((lineno, format!("invalid JSON: {e}")));
                continue;
            }
        };
        let Some(doc) = by_id.get(line.doc_id.as_str()) else {
            rejected.push((lineno, format!("unknown doc_id '{}'", line.doc_id)));
            continue;
        };
        if line.first_token > line.last_token || line.last_token >= doc.tokens.len() {
            rejected.push((
                lineno,
                format!(
                    "span {}..={} out of range for document of {} tokens",
                    line.first_token,
                    line.last_token,
                    doc.tokens.len()
                ),
            ));
            continue;
        }
        let class = EntityClass::new(&line.class);
        if !schema.has_class(&class) {
            rejected.push((lineno, format!("undeclared class '{class}'")));
            continue;
        }
        let surface = doc.tokens[line.first_token..=line.last_token]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        mentions.push(EntityMention {
            doc_id: line.doc_id,
            first_token: line.first_token,
            last_token: line.last_token,
            surface,
            entity_class: class,
        });
    }
    Ok(StandoffLoad { mentions, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::DocumentSource;

    fn doc(text: &str) -> Document {
        Document::new("d1", DocumentSource::PlainText, text)
    }

    fn schema() -> SchemaMatrix {
        SchemaMatrix::default_matrix()
    }

    #[test]
    fn longest_match_wins() {
        let s = schema();
        let mut g = Gazetteer::new();
        g.insert("adobe flash player", EntityClass::new("software"), &s)
            .unwrap();
        g.insert("adobe", EntityClass::new("tool"), &s).unwrap();
        let mentions = g.annotate(&doc("adobe flash player crashed"));
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].surface, "adobe flash player");
        assert_eq!(mentions[0].entity_class, EntityClass::new("software"));
        assert_eq!((mentions[0].first_token, mentions[0].last_token), (0, 2));
    }

    #[test]
    fn no_matches_yields_empty() {
        let g = Gazetteer::new();
        assert!(g.annotate(&doc("nothing to see here")).is_empty());
    }

    #[test]
    fn mentions_in_document_order() {
        let s = schema();
        let mut g = Gazetteer::new();
        g.insert("xrat", EntityClass::new("malware"), &s).unwrap();
        g.insert("java", EntityClass::new("tool"), &s).unwrap();
        let mentions = g.annotate(&doc("xRAT uses Java"));
        assert_eq!(mentions.len(), 2);
        assert_eq!(mentions[0].surface, "xrat");
        assert_eq!(mentions[1].surface, "java");
        // brute-force scan over all spans finds exactly these two
        let d = doc("xRAT uses Java");
        let mut brute = Vec::new();
        for a in 0..d.tokens.len() {
            for b in a..d.tokens.len() {
                let key: Vec<String> =
                    d.tokens[a..=b].iter().map(|t| t.surface.clone()).collect();
                if g.entries.contains_key(&key) {
                    brute.push((a, b));
                }
            }
        }
        assert_eq!(brute, vec![(0, 0), (2, 2)]);
    }

    #[test]
    fn spans_never_overlap() {
        let s = schema();
        let mut g = Gazetteer::new();
        g.insert("a b", EntityClass::new("malware"), &s).unwrap();
        g.insert("b c", EntityClass::new("tool"), &s).unwrap();
        let mentions = g.annotate(&doc("a b c"));
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].surface, "a b");
    }

    #[test]
    fn undeclared_class_rejected() {
        let s = schema();
        let mut g = Gazetteer::new();
        assert!(g
            .insert("foo", EntityClass::new("nonexistent-class"), &s)
            .is_err());
    }

    #[test]
    fn surface_retokenizes_to_span() {
        let s = schema();
        let mut g = Gazetteer::new();
        g.insert("adobe flash player", EntityClass::new("software"), &s)
            .unwrap();
        let d = doc("Adobe Flash Player crashed");
        for m in g.annotate(&d) {
            let retok: Vec<String> = tokenize(&m.surface).into_iter().map(|t| t.surface).collect();
            let span: Vec<String> = d.tokens[m.first_token..=m.last_token]
                .iter()
                .map(|t| t.surface.clone())
                .collect();
            assert_eq!(retok, span);
        }
    }

    #[test]
    fn gazetteer_tsv_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gaz.tsv");
        std::fs::write(&path, "adobe flash player\tsoftware\nxrat\tmalware\nxrat\tmalware\n")
            .unwrap();
        let loaded = Gazetteer::load(&path, &schema()).unwrap();
        assert_eq!(loaded.gazetteer.len(), 2);
        assert_eq!(loaded.duplicate_warnings, 1);
    }

    #[test]
    fn gazetteer_tsv_bad_class_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gaz.tsv");
        std::fs::write(&path, "xrat\tmalware\nfoo\tnonexistent-class\n").unwrap();
        let err = Gazetteer::load(&path, &schema()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn standoff_valid_and_invalid_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        std::fs::write(
            &path,
            concat!(
                r#"{"doc_id":"d1","first_token":0,"last_token":0,"class":"malware"}"#,
                "\n",
                r#"{"doc_id":"d1","first_token":0,"last_token":99,"class":"malware"}"#,
                "\n",
                r#"{"doc_id":"nope","first_token":0,"last_token":0,"class":"malware"}"#,
                "\n",
            ),
        )
        .unwrap();
        let docs = vec![doc("xRAT spread over five tokens")];
        let loaded = load_standoff(&path, &docs, &schema()).unwrap();
        assert_eq!(loaded.mentions.len(), 1);
        assert_eq!(loaded.mentions[0].surface, "xrat");
        assert_eq!(loaded.rejected.len(), 2);
    }

    #[test]
    fn standoff_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.jsonl");
        std::fs::write(&path, "").unwrap();
        let loaded = load_standoff(&path, &[], &schema()).unwrap();
        assert!(loaded.mentions.is_empty());
    }
}
