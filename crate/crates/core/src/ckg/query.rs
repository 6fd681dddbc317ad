//! A conjunctive query language over the graph: `SELECT ?x WHERE { ... }`
//! with triple patterns of variables and `:constant` terms. The special
//! predicate `:type` matches the entity-class index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

use super::{normalize_label, Graph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Constant(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Constant(c) => write!(f, ":{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select_vars: Vec<String>,
    pub patterns: Vec<Pattern>,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SELECT")?;
        for v in &self.select_vars {
            write!(f, " ?{v}")?;
        }
        write!(f, " WHERE {{")?;
        for p in &self.patterns {
            write!(f, " {} {} {}.", p.subject, p.predicate, p.object)?;
        }
        write!(f, " }}")
    }
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    _text: &'a str,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Constant(String),
    LBrace,
    RBrace,
    Dot,
    End,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            _text: text,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos]) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::query(start, "expected an identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        self.skip_ws();
        let at = self.pos;
        if self.pos >= self.chars.len() {
            return Ok((at, Tok::End));
        }
        let c = self.chars[self.pos];
        let tok = match c {
            '{' => {
                self.pos += 1;
                Tok::LBrace
            }
            '}' => {
                self.pos += 1;
                Tok::RBrace
            }
            '.' => {
                self.pos += 1;
                Tok::Dot
            }
            '?' => {
                self.pos += 1;
                Tok::Var(self.ident()?)
            }
            ':' => {
                self.pos += 1;
                Tok::Constant(self.ident()?)
            }
            _ if is_ident_char(c) => Tok::Ident(self.ident()?),
            _ => return Err(Error::query(at, format!("unexpected character '{c}'"))),
        };
        Ok((at, tok))
    }
}

/// Parses `SELECT var+ WHERE { pattern+ }` with position-accurate errors.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut lexer = Lexer::new(text);

    let (at, tok) = lexer.next()?;
    match tok {
        Tok::Ident(kw) if kw.eq_ignore_ascii_case("select") => {}
        _ => return Err(Error::query(at, "expected SELECT")),
    }

    let mut select_vars = Vec::new();
    let where_at;
    loop {
        let (at, tok) = lexer.next()?;
        match tok {
            Tok::Var(v) => select_vars.push(v),
            Tok::Ident(kw) if kw.eq_ignore_ascii_case("where") => {
                where_at = at;
                break;
            }
            _ => return Err(Error::query(at, "expected a ?variable or WHERE")),
        }
    }
    if select_vars.is_empty() {
        return Err(Error::query(where_at, "SELECT needs at least one variable"));
    }

    let (at, tok) = lexer.next()?;
    if tok != Tok::LBrace {
        return Err(Error::query(at, "expected '{' after WHERE"));
    }

    let mut patterns = Vec::new();
    loop {
        let (at, tok) = lexer.next()?;
        let first = match tok {
            Tok::RBrace => break,
            Tok::Var(v) => Term::Var(v),
            Tok::Constant(c) => Term::Constant(c),
            _ => return Err(Error::query(at, "expected a triple pattern or '}'")),
        };
        let mut term = |what: &str| -> Result<Term> {
            let (at, tok) = lexer.next()?;
            match tok {
                Tok::Var(v) => Ok(Term::Var(v)),
                Tok::Constant(c) => Ok(Term::Constant(c)),
                _ => Err(Error::query(at, format!("expected {what}"))),
            }
        };
        let predicate = term("a predicate term")?;
        let object = term("an object term")?;
        patterns.push(Pattern {
            subject: first,
            predicate,
            object,
        });
        // optional trailing dot
        let saved = lexer.pos;
        let (_, tok) = lexer.next()?;
        if tok != Tok::Dot {
            lexer.pos = saved;
        }
    }

    if patterns.is_empty() {
        return Err(Error::query(lexer.pos, "WHERE block has no patterns"));
    }

    let (at, tok) = lexer.next()?;
    if tok != Tok::End {
        return Err(Error::query(at, "unexpected input after '}'"));
    }

    for v in &select_vars {
        let bound = patterns.iter().any(|p| {
            [&p.subject, &p.predicate, &p.object]
                .into_iter()
                .any(|t| matches!(t, Term::Var(name) if name == v))
        });
        if !bound {
            return Err(Error::query(
                0,
                format!("select variable ?{v} does not appear in any pattern"),
            ));
        }
    }

    Ok(Query {
        select_vars,
        patterns,
    })
}

type Binding = BTreeMap<String, String>;

fn unify(binding: &Binding, term: &Term, value: &str, case_insensitive: bool) -> Option<Binding> {
    match term {
        Term::Constant(c) => {
            let matches = if case_insensitive {
                c.eq_ignore_ascii_case(value)
            } else {
                normalize_label(c) == value
            };
            matches.then(|| binding.clone())
        }
        Term::Var(v) => match binding.get(v) {
            Some(bound) => (bound == value).then(|| binding.clone()),
            None => {
                let mut next = binding.clone();
                next.insert(v.clone(), value.to_string());
                Some(next)
            }
        },
    }
}

/// Basic-graph-pattern evaluation: every variable assignment satisfying all
/// patterns, projected to the select variables, deduplicated, and sorted.
pub fn evaluate_query(graph: &Graph, query: &Query) -> Result<Vec<Binding>> {
    // resolve relation constants up front so typos fail loudly
    for p in &query.patterns {
        if let Term::Constant(c) = &p.predicate {
            if c.eq_ignore_ascii_case("type") {
                continue;
            }
            let known = graph
                .schema()
                .relations()
                .iter()
                .any(|r| r.name().eq_ignore_ascii_case(c));
            if !known {
                return Err(Error::validation(format!(
                    "relation ':{c}' is not declared in the schema"
                )));
            }
        }
    }

    let mut bindings: Vec<Binding> = vec![Binding::new()];
    for pattern in &query.patterns {
        let mut next = Vec::new();
        for binding in &bindings {
            match &pattern.predicate {
                Term::Constant(c) if c.eq_ignore_ascii_case("type") => {
                    for (label, class) in graph.entities() {
                        let Some(b) = unify(binding, &pattern.subject, label, false) else {
                            continue;
                        };
                        if let Some(b) = unify(&b, &pattern.object, class.name(), true) {
                            next.push(b);
                        }
                    }
                }
                _ => {
                    for triple in graph.triples() {
                        let Some(b) = unify(binding, &pattern.subject, &triple.subject, false)
                        else {
                            continue;
                        };
                        let unified = match &pattern.predicate {
                            Term::Constant(c) => triple
                                .relation
                                .name()
                                .eq_ignore_ascii_case(c)
                                .then_some(b),
                            Term::Var(_) => {
                                unify(&b, &pattern.predicate, triple.relation.name(), false)
                            }
                        };
                        let Some(b) = unified else {
                            continue;
                        };
                        if let Some(b) = unify(&b, &pattern.object, &triple.object, false) {
                            next.push(b);
                        }
                    }
                }
            }
        }
        bindings = next;
    }

    let projected: BTreeSet<Vec<(String, String)>> = bindings
        .iter()
        .map(|b| {
            query
                .select_vars
                .iter()
                .map(|v| (v.clone(), b.get(v).cloned().unwrap_or_default()))
                .collect()
        })
        .collect();

    Ok(projected
        .into_iter()
        .map(|pairs| pairs.into_iter().collect())
        .collect())
}
