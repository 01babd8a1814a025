//! Semantic query rewriting: subsumption expansion and domain/range checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::conformance::ConstraintKind;
use crate::ontology::Ontology;
use crate::query::{PatternTerm, SelectQuery, TriplePattern};
use crate::rdf::Iri;

/// A query plus, per pattern index, the properties or classes it stands for.
/// Every non-type pattern has a property expansion and every type pattern
/// with a constant class has a class expansion; the first element is always
/// the queried constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedQuery {
    pub base: SelectQuery,
    pub property_expansion: BTreeMap<usize, Vec<Iri>>,
    pub class_expansion: BTreeMap<usize, Vec<Iri>>,
}

impl ExpandedQuery {
    /// Identity expansions.
    pub fn identity(base: SelectQuery) -> Self {
        let mut property_expansion = BTreeMap::new();
        let mut class_expansion = BTreeMap::new();
        for (i, p) in base.patterns.iter().enumerate() {
            if !p.is_type_pattern() {
                property_expansion.insert(i, vec![p.predicate.clone()]);
            } else if let Some(c) = p.type_class() {
                class_expansion.insert(i, vec![c.clone()]);
            }
        }
        Self { base, property_expansion, class_expansion }
    }

    pub fn properties(&self, pattern: usize) -> Option<&[Iri]> {
        self.property_expansion.get(&pattern).map(Vec::as_slice)
    }

    pub fn classes(&self, pattern: usize) -> Option<&[Iri]> {
        self.class_expansion.get(&pattern).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleTag {
    SubsumeProperty,
    SubsumeClass,
    EliminateTypeJoin,
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleTag::SubsumeProperty => "SUBSUME_PROPERTY",
            RuleTag::SubsumeClass => "SUBSUME_CLASS",
            RuleTag::EliminateTypeJoin => "ELIMINATE_TYPE_JOIN",
        })
    }
}

/// A rule application. For ELIMINATE_TYPE_JOIN `pattern` indexes the input
/// query; for the SUBSUME rules it indexes the rewritten query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppliedRule {
    pub tag: RuleTag,
    pub pattern: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteFlags {
    pub conformant: bool,
    pub enable_subsume: bool,
    pub enable_property_check: bool,
}

impl Default for RewriteFlags {
    fn default() -> Self {
        Self { conformant: false, enable_subsume: true, enable_property_check: true }
    }
}

impl RewriteFlags {
    pub const NONE: RewriteFlags =
        RewriteFlags { conformant: false, enable_subsume: false, enable_property_check: false };
}

impl fmt::Display for RewriteFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.enable_subsume {
            parts.push("no-subsume");
        }
        if !self.enable_property_check {
            parts.push("no-property-check");
        }
        if self.conformant {
            parts.push("assume-conformant");
        }
        if parts.is_empty() {
            f.write_str("default")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewriteOutcome {
    Unsatisfiable {
        /// Index of the property pattern.
        pattern: usize,
        /// Index of the conflicting type pattern.
        type_pattern: usize,
        property: Iri,
        kind: ConstraintKind,
        declared: Iri,
        queried: Iri,
    },
    Rewritten { query: ExpandedQuery, applied: Vec<AppliedRule> },
}

impl RewriteOutcome {
    pub fn is_unsatisfiable(&self) -> bool {
        matches!(self, RewriteOutcome::Unsatisfiable { .. })
    }

    pub fn rewritten(&self) -> Option<&ExpandedQuery> {
        match self {
            RewriteOutcome::Rewritten { query, .. } => Some(query),
            RewriteOutcome::Unsatisfiable { .. } => None,
        }
    }

    pub fn applied(&self) -> &[AppliedRule] {
        match self {
            RewriteOutcome::Rewritten { applied, .. } => applied,
            RewriteOutcome::Unsatisfiable { .. } => &[],
        }
    }

    /// The one-line explanation for an unsatisfiable verdict.
    pub fn explanation(&self) -> Option<String> {
        match self {
            RewriteOutcome::Unsatisfiable { pattern, property, kind, declared, queried, .. } => {
                Some(format!(
                    "UNSAT: pattern #{pattern}: {} {kind} is {}, disjoint with queried {}",
                    property.as_str(),
                    declared.as_str(),
                    queried.as_str()
                ))
            }
            RewriteOutcome::Rewritten { .. } => None,
        }
    }
}

fn canonicalize_query(q: &SelectQuery, o: &Ontology) -> SelectQuery {
    let patterns = q
        .patterns
        .iter()
        .map(|p| TriplePattern {
            predicate: o.canonical_property(&p.predicate).clone(),
            ..p.clone()
        })
        .collect();
    q.with_patterns(patterns)
}

/// Expands every pattern to its sub-property or sub-class closure.
pub fn subsume_expand(q: &SelectQuery, o: &Ontology) -> ExpandedQuery {
    let mut e = ExpandedQuery::identity(canonicalize_query(q, o));
    for (i, props) in e.property_expansion.iter_mut() {
        *props = o.sub_properties(&props[0]);
        debug_assert_eq!(props[0], e.base.patterns[*i].predicate);
    }
    for classes in e.class_expansion.values_mut() {
        *classes = o.sub_classes(&classes[0]);
    }
    e
}

/// One (property pattern, type pattern) pair sharing a variable.
struct TypedUse<'a> {
    pattern: usize,
    type_pattern: usize,
    kind: ConstraintKind,
    declared: &'a Iri,
    queried: &'a Iri,
}

fn typed_uses<'a>(q: &'a SelectQuery, o: &'a Ontology) -> Vec<TypedUse<'a>> {
    let mut out = Vec::new();
    for (i, p) in q.patterns.iter().enumerate() {
        if p.is_type_pattern() {
            continue;
        }
        let sides = [
            (&p.subject, ConstraintKind::Domain, o.single_domain(&p.predicate)),
            (&p.object, ConstraintKind::Range, o.single_range(&p.predicate)),
        ];
        for (term, kind, declared) in sides {
            let (PatternTerm::Var(x), Some(declared)) = (term, declared) else { continue };
            for (j, t) in q.patterns.iter().enumerate() {
                let Some(queried) = t.type_class() else { continue };
                if t.subject.as_var() == Some(x.as_str()) {
                    out.push(TypedUse { pattern: i, type_pattern: j, kind, declared, queried });
                }
            }
        }
    }
    out
}

/// Domain/range checks: unsatisfiability from disjointness, then removal of
/// type patterns implied by a declared domain or range when `conformant`.
pub fn property_check(q: &SelectQuery, o: &Ontology, conformant: bool) -> RewriteOutcome {
    let q = canonicalize_query(q, o);
    let uses = typed_uses(&q, o);
    if let Some(u) = uses.iter().find(|u| o.classes_disjoint(u.declared, u.queried)) {
        return RewriteOutcome::Unsatisfiable {
            pattern: u.pattern,
            type_pattern: u.type_pattern,
            property: q.patterns[u.pattern].predicate.clone(),
            kind: u.kind,
            declared: u.declared.clone(),
            queried: u.queried.clone(),
        };
    }
    let mut dropped = BTreeSet::new();
    if conformant {
        for u in &uses {
            if o.is_subclass_of(u.declared, u.queried) {
                dropped.insert(u.type_pattern);
            }
        }
    }
    let applied = dropped
        .iter()
        .map(|&pattern| AppliedRule { tag: RuleTag::EliminateTypeJoin, pattern })
        .collect();
    let patterns = q
        .patterns
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, p)| p.clone())
        .collect();
    RewriteOutcome::Rewritten { query: ExpandedQuery::identity(q.with_patterns(patterns)), applied }
}

/// property_check (if enabled) followed by subsume_expand (if enabled).
pub fn rewrite(q: &SelectQuery, o: &Ontology, flags: RewriteFlags) -> RewriteOutcome {
    let (base, mut applied) = if flags.enable_property_check {
        match property_check(q, o, flags.conformant) {
            RewriteOutcome::Rewritten { query, applied } => (query.base, applied),
            unsat => return unsat,
        }
    } else {
        (canonicalize_query(q, o), Vec::new())
    };
    let query = if flags.enable_subsume {
        let e = subsume_expand(&base, o);
        for (&pattern, props) in &e.property_expansion {
            if props.len() > 1 {
                applied.push(AppliedRule { tag: RuleTag::SubsumeProperty, pattern });
            }
        }
        for (&pattern, classes) in &e.class_expansion {
            if classes.len() > 1 {
                applied.push(AppliedRule { tag: RuleTag::SubsumeClass, pattern });
            }
        }
        e
    } else {
        ExpandedQuery::identity(base)
    };
    RewriteOutcome::Rewritten { query, applied }
}
