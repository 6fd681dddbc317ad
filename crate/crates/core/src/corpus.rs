//! Document ingestion, tokenization, and corpus statistics.
//!
//! Tokenization lowercases, splits on whitespace and punctuation, and keeps
//! punctuation characters as their own tokens. Identifiers that matter in
//! this domain stay whole: CVE ids (`cve-2017-0144`), CWE ids (`cwe-79`),
//! version strings (`2.3.1`), and hyphenated alphanumerics in general.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentSource {
    PlainText,
    CveJson,
    StixImport,
}

/// A token with character offsets into the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub sentence_index: usize,
}

impl Token {
    /// Word tokens start with an alphanumeric character; punctuation tokens
    /// are excluded from window gaps and sentence-length statistics.
    pub fn is_word(&self) -> bool {
        self.surface
            .chars()
            .next()
            .is_some_and(|c| c.is_alphanumeric())
    }
}

/// A tokenized document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: DocumentSource,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Document {
    pub fn new(id: impl Into<String>, source: DocumentSource, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Document {
            id: id.into(),
            source,
            text,
            tokens,
        }
    }

    pub fn sentence_count(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.sentence_index + 1)
            .unwrap_or(0)
    }
}

fn joins_hyphen(chars: &[char], i: usize) -> bool {
    // alnum '-' alnum keeps hyphenated identifiers whole
    chars[i] == '-'
        && i + 1 < chars.len()
        && chars[i + 1].is_alphanumeric()
        && i > 0
        && chars[i - 1].is_alphanumeric()
}

fn joins_dot(chars: &[char], i: usize, run_start: usize) -> bool {
    // digit '.' digit keeps version strings whole; only when everything
    // consumed so far in this run is digits or dots
    chars[i] == '.'
        && i + 1 < chars.len()
        && chars[i + 1].is_ascii_digit()
        && i > 0
        && chars[i - 1].is_ascii_digit()
        && chars[run_start..i].iter().all(|c| c.is_ascii_digit() || *c == '.')
}

/// Deterministic tokenization; same text always yields the same tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut sentence_index = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let start = i;
            i += 1;
            while i < chars.len() {
                if chars[i].is_alphanumeric()
                    || joins_hyphen(&chars, i)
                    || joins_dot(&chars, i, start)
                {
                    i += 1;
                } else {
                    break;
                }
            }
            let surface: String = chars[start..i].iter().collect::<String>().to_lowercase();
            tokens.push(Token {
                surface,
                start,
                end: i,
                sentence_index,
            });
        } else {
            // single punctuation character
            tokens.push(Token {
                surface: c.to_lowercase().collect(),
                start: i,
                end: i + 1,
                sentence_index,
            });
            if matches!(c, '.' | '!' | '?') && ends_sentence(&chars, i + 1) {
                sentence_index += 1;
            }
            i += 1;
        }
    }

    // trailing terminator bumps the counter past the last sentence; tokens
    // already carry correct indices so nothing to fix here
    tokens
}

// Sentence boundary: terminator followed by whitespace then an uppercase
// letter, or by end of text.
fn ends_sentence(chars: &[char], mut i: usize) -> bool {
    if i >= chars.len() {
        return true;
    }
    let mut saw_space = false;
    while i < chars.len() && chars[i].is_whitespace() {
        saw_space = true;
        i += 1;
    }
    if i >= chars.len() {
        return true;
    }
    saw_space && chars[i].is_uppercase()
}

/// Reads a UTF-8 plain-text file as a single document. Invalid bytes are
/// replaced, not fatal.
pub fn ingest_text(path: &Path, doc_id: &str) -> Result<Document> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let text = String::from_utf8_lossy(&bytes).into_owned();
    Ok(Document::new(doc_id, DocumentSource::PlainText, text))
}

/// Result of a CVE feed ingestion: documents plus the count of records
/// skipped for missing descriptions.
#[derive(Debug)]
pub struct CveIngest {
    pub documents: Vec<Document>,
    pub skipped: usize,
}

/// Reads an NVD-1.1-style CVE JSON feed: one document per record, id from
/// `cve.CVE_data_meta.ID`, text from the first English description.
pub fn ingest_cve_json(path: &Path) -> Result<CveIngest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::parse(e.line(), format!("invalid CVE JSON: {e}")))?;

    let items = value
        .get("CVE_Items")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::validation("CVE feed has no CVE_Items array"))?;

    let mut documents = Vec::new();
    let mut skipped = 0usize;
    for item in items {
        let id = item
            .pointer("/cve/CVE_data_meta/ID")
            .and_then(|v| v.as_str());
        let description = item
            .pointer("/cve/description/description_data")
            .and_then(|v| v.as_array())
            .and_then(|entries| {
                entries.iter().find(|e| {
                    e.get("lang").and_then(|l| l.as_str()).unwrap_or("en") == "en"
                })
            })
            .and_then(|e| e.get("value"))
            .and_then(|v| v.as_str());
        match (id, description) {
            (Some(id), Some(text)) => {
                documents.push(Document::new(id, DocumentSource::CveJson, text));
            }
            _ => skipped += 1,
        }
    }
    Ok(CveIngest { documents, skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub avg_sentence_length: f64,
    pub token_count: usize,
    pub sentence_count: usize,
}

/// Word tokens per sentence, averaged over the whole corpus.
pub fn corpus_stats(docs: &[Document]) -> Result<CorpusStats> {
    if docs.is_empty() {
        return Err(Error::validation("corpus_stats requires a non-empty corpus"));
    }
    let token_count: usize = docs.iter().map(|d| d.tokens.len()).sum();
    let word_count: usize = docs
        .iter()
        .map(|d| d.tokens.iter().filter(|t| t.is_word()).count())
        .sum();
    let sentence_count: usize = docs.iter().map(|d| d.sentence_count()).sum();
    let avg_sentence_length = if sentence_count == 0 {
        0.0
    } else {
        word_count as f64 / sentence_count as f64
    };
    Ok(CorpusStats {
        avg_sentence_length,
        token_count,
        sentence_count,
    })
}
