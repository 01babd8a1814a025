//! RDF terms, triples, datasets and dictionary encoding.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Well-known vocabulary IRIs.
pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
    pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
    pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
    pub const OWL_DISJOINT_WITH: &str = "http://www.w3.org/2002/07/owl#disjointWith";
    pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
    pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
}

/// An IRI, stored without angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Iri(String);

impl Iri {
    /// Builds an IRI, rejecting empty strings and strings containing
    /// whitespace or angle brackets.
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidIri> {
        let value = value.into();
        if value.is_empty() {
            return Err(InvalidIri { value, reason: "empty IRI" });
        }
        if value.chars().any(|c| c.is_whitespace() || c == '<' || c == '>') {
            return Err(InvalidIri { value, reason: "IRI contains whitespace or angle brackets" });
        }
        Ok(Self(value))
    }

    /// Builds an IRI from a string known to be valid. Panics otherwise.
    pub fn from_static(value: &str) -> Self {
        Self::new(value).expect("valid IRI")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#` or `/`, or the whole IRI when that would be empty.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        match s.rfind(['#', '/']) {
            Some(i) if i + 1 < s.len() => &s[i + 1..],
            _ => s,
        }
    }

    pub fn is_rdf_type(&self) -> bool {
        self.0 == vocab::RDF_TYPE
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid IRI {value:?}: {reason}")]
pub struct InvalidIri {
    pub value: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Iri,
    Literal,
}

impl TermKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TermKind::Iri => "iri",
            TermKind::Literal => "literal",
        }
    }
}

/// An IRI or a plain literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(Iri),
    Literal(String),
}

impl Term {
    pub fn iri(value: &str) -> Self {
        Term::Iri(Iri::from_static(value))
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(value.into())
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Iri(_) => TermKind::Iri,
            Term::Literal(_) => TermKind::Literal,
        }
    }

    /// The lexical form: IRI text without brackets, or literal text without quotes.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(iri) => iri.as_str(),
            Term::Literal(s) => s,
        }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

// Lexical form first, kind only as a tie-breaker.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lexical()
            .cmp(other.lexical())
            .then_with(|| self.kind().cmp(&other.kind()))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(s) => write!(f, "\"{}\"", escape_literal(s)),
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// An RDF statement. Subject and predicate are IRIs by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: Term) -> Self {
        Self { subject, predicate, object }
    }

    /// Shorthand for tests and fixtures: all three positions are IRIs.
    pub fn iris(s: &str, p: &str, o: &str) -> Self {
        Self::new(Iri::from_static(s), Iri::from_static(p), Term::iri(o))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> {} .", self.subject, self.predicate, self.object)
    }
}

/// A set of triples, kept ordered by (subject, predicate, object) lexical forms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    triples: BTreeSet<Triple>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Distinct predicates, in sorted order.
    pub fn predicates(&self) -> BTreeSet<Iri> {
        self.triples.iter().map(|t| t.predicate.clone()).collect()
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter);
    }
}

impl FromIterator<Triple> for Dataset {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Self { triples: iter.into_iter().collect() }
    }
}

impl IntoIterator for Dataset {
    type Item = Triple;
    type IntoIter = std::collections::btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Dense integer id of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(pub u64);

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bijective mapping between terms and dense ids assigned in interning order.
#[derive(Debug, Clone, Default)]
pub struct TermDictionary {
    forward: HashMap<Term, TermId>,
    reverse: Vec<Term>,
}

impl TermDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.forward.get(term) {
            return *id;
        }
        let id = TermId(self.reverse.len() as u64);
        self.reverse.push(term.clone());
        self.forward.insert(term.clone(), id);
        id
    }

    pub fn intern_iri(&mut self, iri: &Iri) -> TermId {
        self.intern(&Term::Iri(iri.clone()))
    }

    pub fn encode(&self, term: &Term) -> Option<TermId> {
        self.forward.get(term).copied()
    }

    pub fn encode_iri(&self, iri: &Iri) -> Option<TermId> {
        // Avoids cloning into a Term for the common lookup path.
        self.forward.get(&Term::Iri(iri.clone())).copied()
    }

    pub fn decode(&self, id: TermId) -> Option<&Term> {
        self.reverse.get(id.0 as usize)
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Terms in id order.
    pub fn terms(&self) -> impl Iterator<Item = (TermId, &Term)> {
        self.reverse.iter().enumerate().map(|(i, t)| (TermId(i as u64), t))
    }

    /// Rebuilds a dictionary from terms listed in id order.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let forward = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), TermId(i as u64)))
            .collect();
        Self { forward, reverse: terms }
    }
}

/// An encoded triple: subject, predicate, object ids.
pub type EncodedTriple = [TermId; 3];

/// Interns every term of `data` in dataset order.
pub fn intern_dataset(data: &Dataset) -> (Vec<EncodedTriple>, TermDictionary) {
    let mut dict = TermDictionary::new();
    let encoded = data
        .iter()
        .map(|t| {
            [
                dict.intern_iri(&t.subject),
                dict.intern_iri(&t.predicate),
                dict.intern(&t.object),
            ]
        })
        .collect();
    (encoded, dict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn iri_validation() {
        assert!(Iri::new("").is_err());
        assert!(Iri::new("a b").is_err());
        assert!(Iri::new("<a>").is_err());
        assert!(Iri::new("http://x/y#z").is_ok());
    }

    #[test]
    fn local_names() {
        assert_eq!(Iri::from_static("http://x/onto#memberOf").local_name(), "memberOf");
        assert_eq!(Iri::from_static("http://www.University0.edu").local_name(), "www.University0.edu");
        assert_eq!(Iri::from_static("pa").local_name(), "pa");
        assert_eq!(Iri::from_static("http://x/").local_name(), "http://x/");
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let mut d = Dataset::new();
        assert!(d.insert(Triple::iris("a", "pa", "b")));
        assert!(!d.insert(Triple::iris("a", "pa", "b")));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn pa_hierarchy_distinct_terms() {
        let data = fixtures::pa_hierarchy_data();
        // brute-force count over the five rows
        let mut seen: Vec<String> = Vec::new();
        for t in &data {
            for lex in [t.subject.as_str(), t.predicate.as_str(), t.object.lexical()] {
                if !seen.iter().any(|s| s == lex) {
                    seen.push(lex.to_string());
                }
            }
        }
        assert_eq!(seen.len(), 13);
        let (encoded, dict) = intern_dataset(&data);
        assert_eq!(dict.len(), seen.len());
        assert_eq!(encoded.len(), data.len());
    }

    #[test]
    fn empty_dataset_interns_to_empty_dictionary() {
        let (encoded, dict) = intern_dataset(&Dataset::new());
        assert!(encoded.is_empty());
        assert!(dict.is_empty());
    }

    #[test]
    fn interning_is_deterministic() {
        let data = fixtures::pa_hierarchy_data();
        let (e1, d1) = intern_dataset(&data);
        let (e2, d2) = intern_dataset(&data);
        assert_eq!(e1, e2);
        let t1: Vec<_> = d1.terms().map(|(i, t)| (i, t.clone())).collect();
        let t2: Vec<_> = d2.terms().map(|(i, t)| (i, t.clone())).collect();
        assert_eq!(t1, t2);
    }

    #[test]
    fn iri_and_literal_with_same_lexical_are_distinct() {
        let mut dict = TermDictionary::new();
        let a = dict.intern(&Term::iri("x"));
        let b = dict.intern(&Term::literal("x"));
        assert_ne!(a, b);
        assert_eq!(dict.decode(b), Some(&Term::literal("x")));
    }
}
