//! Entity classes, relation types, and the domain/range compatibility matrix.
//!
//! The matrix answers one question: given a subject class and an object
//! class, which relations may hold between them? Pairs whose answer is the
//! empty set are discarded before classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A UCO entity class, canonical lowercase hyphenated name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityClass(pub String);

impl EntityClass {
    pub fn new(name: impl Into<String>) -> Self {
        EntityClass(name.into().to_lowercase())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<T: Into<String>> From<T> for EntityClass {
    fn from(s: T) -> Self {
        EntityClass::new(s)
    }
}

/// A relation type name, e.g. `hasVulnerability`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelationType(pub String);

impl RelationType {
    pub fn new(name: impl Into<String>) -> Self {
        RelationType(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<T: Into<String>> From<T> for RelationType {
    fn from(s: T) -> Self {
        RelationType::new(s)
    }
}

const DEFAULT_CLASSES: &[&str] = &[
    "software",
    "malware",
    "indicator",
    "vulnerability",
    "course-of-action",
    "tool",
    "attack-pattern",
    "campaign",
    "threat-actor",
    "intrusion-set",
    "exploit-target",
    "version",
];

const DEFAULT_RELATIONS: &[&str] = &[
    "hasProduct",
    "hasVulnerability",
    "mitigates",
    "uses",
    "indicates",
    "attributed-to",
    "related-to",
    "located-at",
];

/// Domain/range compatibility matrix over declared classes and relations.
///
/// Pairs without an explicit entry fall back to the unrestricted relations
/// (`related-to`, `located-at`); an explicit empty entry blocks the pair
/// entirely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaMatrix {
    classes: BTreeSet<EntityClass>,
    relations: BTreeSet<RelationType>,
    entries: BTreeMap<(EntityClass, EntityClass), BTreeSet<RelationType>>,
}

impl SchemaMatrix {
    /// The built-in UCO 2.0 matrix.
    pub fn default_matrix() -> Self {
        let classes: BTreeSet<EntityClass> =
            DEFAULT_CLASSES.iter().copied().map(EntityClass::new).collect();
        let relations: BTreeSet<RelationType> =
            DEFAULT_RELATIONS.iter().copied().map(RelationType::new).collect();

        let mut entries: BTreeMap<(EntityClass, EntityClass), BTreeSet<RelationType>> =
            BTreeMap::new();
        let mut add = |s: &str, o: &str, r: &str| {
            entries
                .entry((EntityClass::new(s), EntityClass::new(o)))
                .or_default()
                .insert(RelationType::new(r));
        };

        add("software", "vulnerability", "hasVulnerability");
        for obj in ["malware", "campaign"] {
            add("course-of-action", obj, "mitigates");
            add("indicator", obj, "indicates");
        }
        for subj in ["campaign", "malware"] {
            for obj in ["tool", "software"] {
                add(subj, obj, "uses");
            }
        }
        for subj in ["campaign", "intrusion-set"] {
            add(subj, "threat-actor", "attributed-to");
        }
        // hasProduct constrains only the object.
        for subj in DEFAULT_CLASSES {
            add(subj, "software", "hasProduct");
        }

        // Explicit entries still carry the unrestricted relations.
        for rels in entries.values_mut() {
            rels.insert(RelationType::new("related-to"));
            rels.insert(RelationType::new("located-at"));
        }

        // The one pair the schema forbids outright.
        entries.insert(
            (EntityClass::new("campaign"), EntityClass::new("version")),
            BTreeSet::new(),
        );

        SchemaMatrix {
            classes,
            relations,
            entries,
        }
    }

    pub fn classes(&self) -> &BTreeSet<EntityClass> {
        &self.classes
    }

    pub fn relations(&self) -> &BTreeSet<RelationType> {
        &self.relations
    }

    pub fn has_class(&self, class: &EntityClass) -> bool {
        self.classes.contains(class)
    }

    pub fn has_relation(&self, relation: &RelationType) -> bool {
        self.relations.contains(relation)
    }

    /// Relations permitted between a subject class and an object class.
    ///
    /// An empty set means the pair is incompatible and must be discarded.
    /// An undeclared class is an error, not an empty set.
    pub fn candidate_relations(
        &self,
        subject: &EntityClass,
        object: &EntityClass,
    ) -> Result<BTreeSet<RelationType>> {
        for class in [subject, object] {
            if !self.classes.contains(class) {
                return Err(Error::validation(format!(
                    "class '{class}' is not declared in the schema"
                )));
            }
        }
        if let Some(rels) = self.entries.get(&(subject.clone(), object.clone())) {
            return Ok(rels.clone());
        }
        // Unlisted pairs default to the unrestricted relations, if declared.
        Ok(["related-to", "located-at"]
            .iter()
            .copied()
            .map(RelationType::new)
            .filter(|r| self.relations.contains(r))
            .collect())
    }

    /// Loads a matrix from a config file, or the default when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default_matrix()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::io(p.display().to_string(), e))?;
                Self::parse_config(&text)
            }
        }
    }

    /// Parses the three-section schema config format.
    pub fn parse_config(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Classes,
            Relations,
            Matrix,
        }

        let mut classes = BTreeSet::new();
        let mut relations = BTreeSet::new();
        let mut matrix_lines: Vec<(usize, String)> = Vec::new();
        let mut section = Section::None;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "classes:" => section = Section::Classes,
                "relations:" => section = Section::Relations,
                "matrix:" => section = Section::Matrix,
                _ => match section {
                    Section::None => {
                        return Err(Error::parse(
                            lineno,
                            format!("'{line}' appears before any section header"),
                        ))
                    }
                    Section::Classes => {
                        classes.insert(EntityClass::new(line));
                    }
                    Section::Relations => {
                        relations.insert(RelationType::new(line));
                    }
                    Section::Matrix => matrix_lines.push((lineno, line.to_string())),
                },
            }
        }

        let mut entries = BTreeMap::new();
        for (lineno, line) in matrix_lines {
            let (pair, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(lineno, "matrix line is missing '->'"))?;
            let mut fields = pair.split_whitespace();
            let (subj, obj) = match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(o), None) => (EntityClass::new(s), EntityClass::new(o)),
                _ => {
                    return Err(Error::parse(
                        lineno,
                        "matrix line must name exactly a subject class and an object class",
                    ))
                }
            };
            for class in [&subj, &obj] {
                if !classes.contains(class) {
                    return Err(Error::validation(format!(
                        "line {lineno}: matrix references undeclared class '{class}'"
                    )));
                }
            }
            let rhs = rhs.trim();
            let mut rels = BTreeSet::new();
            if rhs != "none" {
                for name in rhs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let rel = RelationType::new(name);
                    if !relations.contains(&rel) {
                        return Err(Error::validation(format!(
                            "line {lineno}: matrix references undeclared relation '{rel}'"
                        )));
                    }
                    rels.insert(rel);
                }
            }
            entries.insert((subj, obj), rels);
        }

        if classes.is_empty() {
            return Err(Error::validation("schema declares no classes"));
        }
        if relations.is_empty() {
            return Err(Error::validation("schema declares no relations"));
        }

        Ok(SchemaMatrix {
            classes,
            relations,
            entries,
        })
    }
}

impl Default for SchemaMatrix {
    fn default() -> Self {
        Self::default_matrix()
    }
}
