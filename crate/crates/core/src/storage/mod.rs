//! Physical layouts and the sealed, scan-only store built from them.

mod layout;
mod persist;
mod relation;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

pub use layout::{
    build_layout, LayoutDescriptor, LayoutKind, Orientation, RelationSpec, TRIPLES_RELATION,
    TYPE_RELATION,
};
pub use relation::{Position, Relation, ScanOutput, Tuple};

use crate::rdf::{intern_dataset, Dataset, Iri, Term, TermDictionary, TermId, Triple};

#[derive(Debug, thiserror::Error)]
pub enum StorageError {
    #[error("no relation for predicate <{0}>")]
    UnknownPredicate(Iri),
    #[error("no such relation: {0}")]
    NoSuchRelation(String),
    #[error("property filter on two-column relation {0}")]
    FilterOnTwoColumnRelation(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
}

/// Loaded relations under one layout and orientation. Immutable once built;
/// scans may run concurrently.
#[derive(Debug)]
pub struct StoreInstance {
    descriptor: LayoutDescriptor,
    orientation: Orientation,
    relations: BTreeMap<String, Relation>,
    dictionary: TermDictionary,
    touched: AtomicU64,
}

/// Routes every triple of `data` (predicates canonicalized) to its relation.
pub fn load_store(
    data: &Dataset,
    descriptor: &LayoutDescriptor,
    orientation: Orientation,
) -> Result<StoreInstance, StorageError> {
    let canonical = descriptor.canonical();
    let mut canonicalized = Dataset::new();
    for t in data {
        if descriptor.relation_for(&t.predicate).is_none() {
            return Err(StorageError::UnknownPredicate(t.predicate.clone()));
        }
        let predicate = canonical.get(&t.predicate).clone();
        canonicalized.insert(Triple::new(t.subject.clone(), predicate, t.object.clone()));
    }

    let (encoded, dictionary) = intern_dataset(&canonicalized);
    let mut buckets: BTreeMap<&str, Vec<Tuple>> = BTreeMap::new();
    for (t, [s, p, o]) in canonicalized.iter().zip(encoded) {
        let spec = descriptor.relation_for(&t.predicate).expect("checked above");
        buckets
            .entry(spec.name.as_str())
            .or_default()
            .push(Tuple { subject: s, object: o, property: p });
    }

    let relations = descriptor
        .relations()
        .map(|spec| {
            let fixed = spec.fixed_property().and_then(|p| dictionary.encode_iri(p));
            let tuples = buckets.remove(spec.name.as_str()).unwrap_or_default();
            let rel = Relation::build(spec.name.clone(), spec.arity, fixed, tuples, orientation);
            (spec.name.clone(), rel)
        })
        .collect();

    Ok(StoreInstance {
        descriptor: descriptor.clone(),
        orientation,
        relations,
        dictionary,
        touched: AtomicU64::new(0),
    })
}

impl StoreInstance {
    pub(crate) fn from_parts(
        descriptor: LayoutDescriptor,
        orientation: Orientation,
        relations: BTreeMap<String, Relation>,
        dictionary: TermDictionary,
    ) -> Self {
        Self { descriptor, orientation, relations, dictionary, touched: AtomicU64::new(0) }
    }

    pub fn descriptor(&self) -> &LayoutDescriptor {
        &self.descriptor
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dictionary
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    /// Total rows examined by scans on this store since it was built.
    pub fn touched_rows(&self) -> u64 {
        self.touched.load(Ordering::Relaxed)
    }

    /// Scans `relation`, restricting three-column relations to the given
    /// properties. Properties absent from the dictionary match nothing.
    pub fn scan_relation(
        &self,
        relation: &str,
        property_filter: Option<&[Iri]>,
        bound: Option<(Position, TermId)>,
    ) -> Result<ScanOutput, StorageError> {
        let rel = self
            .relations
            .get(relation)
            .ok_or_else(|| StorageError::NoSuchRelation(relation.to_string()))?;
        let ids = property_filter.map(|props| {
            let mut ids: Vec<TermId> =
                props.iter().filter_map(|p| self.dictionary.encode_iri(p)).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        });
        let out = rel.scan(ids.as_deref(), bound)?;
        self.touched.fetch_add(out.touched as u64, Ordering::Relaxed);
        Ok(out)
    }

    pub fn decode(&self, id: TermId) -> &Term {
        self.dictionary.decode(id).expect("id issued by this store's dictionary")
    }

    /// Decodes every stored tuple back into a triple.
    pub fn to_dataset(&self) -> Dataset {
        let mut out = Dataset::new();
        for rel in self.relations.values() {
            for t in rel.iter() {
                let subject = self.decode(t.subject).as_iri().expect("subject is an IRI").clone();
                let predicate =
                    self.decode(t.property).as_iri().expect("predicate is an IRI").clone();
                out.insert(Triple::new(subject, predicate, self.decode(t.object).clone()));
            }
        }
        out
    }

    pub fn row_count(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }
}
