//! Data conformance against declared domains, ranges and disjointness.
//!
//! Join elimination in the rewriter is only sound on data that passes this
//! check, because stores hold asserted type triples only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ontology::Ontology;
use crate::rdf::{Dataset, Iri, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    Domain,
    Range,
    /// An individual is typed with two disjoint classes.
    Disjoint,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Domain => "domain",
            ConstraintKind::Range => "range",
            ConstraintKind::Disjoint => "disjoint",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub triple: Triple,
    pub kind: ConstraintKind,
    /// The declared class the term should belong to, or for `Disjoint`
    /// the class the offending type clashes with.
    pub expected: Iri,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConstraintKind::Disjoint => {
                write!(f, "{}: type is disjoint with {}", self.triple, self.expected)
            }
            kind => write!(f, "{}: {kind} requires {}", self.triple, self.expected),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConformanceReport {
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn is_conformant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every non-type triple against the single-valued domain and range
/// declared on its predicate or any super-property, and every individual's
/// asserted types against declared disjointness.
///
/// Literal objects violate any declared range: ranges are classes here,
/// and a literal never carries a type.
pub fn check_conformance(data: &Dataset, ontology: &Ontology) -> ConformanceReport {
    let mut types: BTreeMap<&Iri, BTreeSet<&Iri>> = BTreeMap::new();
    for t in data {
        if t.predicate.is_rdf_type() {
            if let Term::Iri(class) = &t.object {
                types.entry(&t.subject).or_default().insert(class);
            }
        }
    }

    let mut constraints: BTreeMap<Iri, Vec<(ConstraintKind, Iri)>> = BTreeMap::new();
    let mut members: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    let mut violations = BTreeSet::new();

    let has_type = |term: &Iri, class: &Iri, members: &mut BTreeMap<Iri, BTreeSet<Iri>>| {
        let subs = members
            .entry(class.clone())
            .or_insert_with(|| ontology.sub_classes(class).into_iter().collect());
        types.get(term).is_some_and(|ts| ts.iter().any(|t| subs.contains(*t)))
    };

    for t in data {
        if t.predicate.is_rdf_type() {
            continue;
        }
        let predicate = ontology.canonical_property(&t.predicate).clone();
        let checks = constraints.entry(predicate.clone()).or_insert_with(|| {
            let mut out = Vec::new();
            for q in ontology.super_properties(&predicate) {
                if let Some(d) = ontology.single_domain(&q) {
                    out.push((ConstraintKind::Domain, d.clone()));
                }
                if let Some(r) = ontology.single_range(&q) {
                    out.push((ConstraintKind::Range, r.clone()));
                }
            }
            out
        });
        for (kind, class) in checks.iter() {
            let ok = match (kind, &t.object) {
                (ConstraintKind::Domain, _) => has_type(&t.subject, class, &mut members),
                (ConstraintKind::Range, Term::Iri(obj)) => has_type(obj, class, &mut members),
                (ConstraintKind::Range, Term::Literal(_)) => false,
                (ConstraintKind::Disjoint, _) => true,
            };
            if !ok {
                violations.insert(Violation {
                    triple: t.clone(),
                    kind: *kind,
                    expected: class.clone(),
                });
            }
        }
    }

    if !ontology.disjoint_pairs().is_empty() {
        for (individual, asserted) in &types {
            let Some((x, y)) = ontology.types_clash(asserted.iter().copied()) else {
                continue;
            };
            // Blame the asserted type that entails the second class of the pair.
            let culprit = asserted
                .iter()
                .find(|t| ontology.is_subclass_of(t, &y))
                .expect("clash implies an asserted subtype");
            violations.insert(Violation {
                triple: Triple::new(
                    (*individual).clone(),
                    Iri::from_static(crate::rdf::vocab::RDF_TYPE),
                    Term::Iri((*culprit).clone()),
                ),
                kind: ConstraintKind::Disjoint,
                expected: x,
            });
        }
    }

    ConformanceReport { violations: violations.into_iter().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ontology() -> Ontology {
        Ontology::from_schema_canonical(&fixtures::contraindication_schema())
    }

    #[test]
    fn typed_contraindications_conform() {
        let report = check_conformance(&fixtures::contraindication_typed_data(), &ontology());
        assert!(report.is_conformant(), "{:?}", report.violations);
    }

    #[test]
    fn missing_type_is_one_range_violation() {
        let mut data = fixtures::contraindication_typed_data();
        data = data
            .into_iter()
            .filter(|t| *t != fixtures::type_triple("HypertensiveHeart", "Disease"))
            .collect();
        let report = check_conformance(&data, &ontology());
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.kind, ConstraintKind::Range);
        assert_eq!(v.expected.as_str(), "Disease");
        assert_eq!(v.triple.object, Term::iri("HypertensiveHeart"));
    }

    #[test]
    fn undeclared_property_never_violates() {
        let data = fixtures::pa_hierarchy_data();
        let o = Ontology::from_schema_canonical(&fixtures::pa_hierarchy_schema());
        assert!(check_conformance(&data, &o).is_conformant());
    }

    #[test]
    fn subtype_satisfies_range() {
        let mut schema = fixtures::contraindication_schema();
        schema.insert(Triple::iris("Cardio", crate::rdf::vocab::RDFS_SUBCLASS_OF, "Disease"));
        let o = Ontology::from_schema_canonical(&schema);
        let mut data = fixtures::contraindication_data();
        data.insert(fixtures::type_triple("HypertensiveHeart", "Cardio"));
        assert!(check_conformance(&data, &o).is_conformant());
    }

    #[test]
    fn inherited_domain_is_checked() {
        let mut o = Ontology::new();
        let (p, q) = (Iri::from_static("p"), Iri::from_static("q"));
        o.add_subproperty(&p, &q);
        o.add_domain(&q, &Iri::from_static("D"));
        let data: Dataset = [Triple::iris("s", "p", "o")].into_iter().collect();
        let report = check_conformance(&data, &o);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ConstraintKind::Domain);
    }

    #[test]
    fn literal_violates_class_range() {
        let o = ontology();
        let data: Dataset = [Triple::new(
            Iri::from_static("Ibuprofen"),
            Iri::from_static("diseaseContraIndication"),
            Term::literal("headache"),
        )]
        .into_iter()
        .collect();
        assert_eq!(check_conformance(&data, &o).violations.len(), 1);
    }

    #[test]
    fn disjoint_types_reported() {
        let mut data = fixtures::contraindication_typed_data();
        data.insert(fixtures::type_triple("HypertensiveHeart", "Molecule"));
        let report = check_conformance(&data, &ontology());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ConstraintKind::Disjoint);
    }
}
