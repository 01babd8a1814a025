//! SPARQL subset: AST, parser and SQL text emission.

mod parser;
mod sql;

use std::collections::BTreeMap;
use std::fmt;

use crate::rdf::{escape_literal, vocab, Iri};

pub use parser::{parse_query, ParseError};
pub use sql::{emit_sql, normalize_sql, SqlError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(String),
    Iri(Iri),
    Literal(String),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            PatternTerm::Iri(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(i) => write!(f, "<{}>", i.as_str()),
            PatternTerm::Literal(s) => write!(f, "\"{}\"", escape_literal(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: Iri,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: Iri, object: PatternTerm) -> Self {
        Self { subject, predicate, object }
    }

    pub fn is_type_pattern(&self) -> bool {
        self.predicate.as_str() == vocab::RDF_TYPE
    }

    /// The class of a type pattern with a constant object.
    pub fn type_class(&self) -> Option<&Iri> {
        if self.is_type_pattern() {
            self.object.as_iri()
        } else {
            None
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.object].into_iter().filter_map(PatternTerm::as_var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {}", self.subject, self.predicate.as_str(), self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectQuery {
    pub projection: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    /// Prefix name to base IRI, including the built-in ones.
    pub prefixes: BTreeMap<String, String>,
}

impl SelectQuery {
    /// Distinct variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patterns {
            for v in p.variables() {
                if !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    /// Same projection and prefixes over a different pattern list.
    pub fn with_patterns(&self, patterns: Vec<TriplePattern>) -> Self {
        Self { projection: self.projection.clone(), patterns, prefixes: self.prefixes.clone() }
    }
}

/// Prints with full IRIs; the prefix table is kept as PREFIX lines so a
/// reparse gives back an identical query.
impl fmt::Display for SelectQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, base) in &self.prefixes {
            writeln!(f, "PREFIX {name}: <{base}>")?;
        }
        f.write_str("SELECT")?;
        for v in &self.projection {
            write!(f, " ?{v}")?;
        }
        writeln!(f, " WHERE {{")?;
        for p in &self.patterns {
            writeln!(f, "  {p} .")?;
        }
        f.write_str("}")
    }
}
