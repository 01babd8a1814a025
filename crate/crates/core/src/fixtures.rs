//! Small worked datasets: the pa/pf property hierarchy with its five
//! triples, the ClassA hierarchy, and the contraIndication sample.
//!
//! Used by unit tests and the acceptance suite.

use crate::rdf::{vocab, Dataset, Iri, Term, Triple};

fn schema(s: &str, p: &str, o: &str) -> Triple {
    Triple::iris(s, p, o)
}

/// pb, pc ⊑ pa; pd, pe ⊑ pc. pf stands alone and has no schema triple.
pub fn pa_hierarchy_schema() -> Dataset {
    let sp = vocab::RDFS_SUBPROPERTY_OF;
    [
        schema("pb", sp, "pa"),
        schema("pc", sp, "pa"),
        schema("pd", sp, "pc"),
        schema("pe", sp, "pc"),
    ]
    .into_iter()
    .collect()
}

pub fn pa_hierarchy_data() -> Dataset {
    [
        Triple::iris("a", "pa", "b"),
        Triple::iris("c", "pc", "d"),
        Triple::iris("e", "pb", "f"),
        Triple::iris("a", "pf", "d"),
        Triple::iris("g", "pe", "h"),
    ]
    .into_iter()
    .collect()
}

/// The pa hierarchy plus ClassB, ClassC ⊑ ClassA with ClassB, ClassC
/// disjoint, and range(pb) = ClassA.
pub fn class_hierarchy_schema() -> Dataset {
    let mut d = pa_hierarchy_schema();
    d.extend([
        schema("ClassB", vocab::RDFS_SUBCLASS_OF, "ClassA"),
        schema("ClassC", vocab::RDFS_SUBCLASS_OF, "ClassA"),
        schema("ClassC", vocab::OWL_DISJOINT_WITH, "ClassB"),
        schema("pb", vocab::RDFS_RANGE, "ClassA"),
    ]);
    d
}

/// contraIndication hierarchy, range(diseaseContraIndication) = Disease,
/// Disease and Molecule under Top and disjoint.
pub fn contraindication_schema() -> Dataset {
    let sp = vocab::RDFS_SUBPROPERTY_OF;
    let sc = vocab::RDFS_SUBCLASS_OF;
    [
        schema("diseaseContraIndication", sp, "contraIndication"),
        schema("moleculeContraIndication", sp, "contraIndication"),
        schema("stateContraIndication", sp, "contraIndication"),
        schema("diseaseContraIndication", vocab::RDFS_RANGE, "Disease"),
        schema("Disease", sc, "Top"),
        schema("Molecule", sc, "Top"),
        schema("Disease", vocab::OWL_DISJOINT_WITH, "Molecule"),
    ]
    .into_iter()
    .collect()
}

/// The five contraIndication rows. Object IRIs have their spaces removed.
pub fn contraindication_data() -> Dataset {
    [
        Triple::iris("Ibuprofen", "moleculeContraIndication", "Ticlopidin"),
        Triple::iris("Ibuprofen", "moleculeContraIndication", "Clopidrogel"),
        Triple::iris("Ibuprofen", "stateContraIndication", "BreastFeeding"),
        Triple::iris("Ibuprofen", "stateContraIndication", "Pregnant"),
        Triple::iris("Ibuprofen", "diseaseContraIndication", "HypertensiveHeart"),
    ]
    .into_iter()
    .collect()
}

/// The contraIndication rows plus type triples making them conform to the
/// declared range.
pub fn contraindication_typed_data() -> Dataset {
    let mut d = contraindication_data();
    d.insert(type_triple("HypertensiveHeart", "Disease"));
    d.insert(type_triple("Ticlopidin", "Molecule"));
    d.insert(type_triple("Clopidrogel", "Molecule"));
    d
}

pub fn type_triple(subject: &str, class: &str) -> Triple {
    Triple::new(
        Iri::from_static(subject),
        Iri::from_static(vocab::RDF_TYPE),
        Term::iri(class),
    )
}

pub const PA_OBJECTS_QUERY: &str = "SELECT ?o WHERE { ?s :pa ?o . }";
pub const PB_TYPED_QUERY: &str = "SELECT ?s ?o WHERE { ?s :pb ?o . ?s rdf:type :ClassA . }";
pub const MOLECULE_QUERY: &str =
    "SELECT ?s ?o WHERE {?s :diseaseContraIndication ?o.\n ?o rdf:type :Molecule.}";
pub const DISEASE_QUERY: &str =
    "SELECT ?s ?o WHERE {?s :diseaseContraIndication ?o.\n ?o rdf:type :Disease.}";
pub const DISEASE_QUERY_REWRITTEN: &str = "SELECT ?s ?o WHERE {?s :diseaseContraIndication ?o.}";
