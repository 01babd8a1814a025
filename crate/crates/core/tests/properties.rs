use std::collections::BTreeSet;

use proptest::prelude::*;

use rostore::engine::{execute_plan, plan_query, plan_query_with, PlanOptions, ResultSet};
use rostore::fixtures;
use rostore::ontology::Ontology;
use rostore::query::parse_query;
use rostore::rdf::{Dataset, Iri, Triple};
use rostore::sqr::{rewrite, RewriteFlags};
use rostore::storage::{build_layout, load_store, LayoutKind, Orientation};

const PROPERTIES: [&str; 6] = ["pa", "pb", "pc", "pd", "pe", "pf"];
const CLASSES: [&str; 3] = ["ClassA", "ClassB", "ClassC"];

const QUERIES: [&str; 6] = [
    "SELECT ?s ?o WHERE { ?s :pa ?o . ?s :pf ?y }",
    "SELECT ?s ?o WHERE { ?s :pb ?o . ?s a :ClassA }",
    "SELECT ?x ?z WHERE { ?x :pc ?y . ?y :pa ?z }",
    "SELECT ?x WHERE { ?x a :ClassA . ?x :pc ?y . ?y :pf ?x }",
    "SELECT ?y WHERE { ?x :pd ?y . ?x :pe ?y }",
    "SELECT ?s ?y WHERE { ?s :pf ?o . ?s :pf ?y . ?o :pa ?y }",
];

fn individual() -> impl Strategy<Value = String> {
    (0..6u8).prop_map(|i| format!("n{i}"))
}

fn triple() -> impl Strategy<Value = Triple> {
    prop_oneof![
        3 => (individual(), prop::sample::select(&PROPERTIES[..]), individual())
            .prop_map(|(s, p, o)| Triple::iris(&s, p, &o)),
        1 => (individual(), prop::sample::select(&CLASSES[..])).prop_map(|(s, c)| fixtures::type_triple(&s, c)),
    ]
}

fn dataset(max: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec(triple(), 0..max).prop_map(|v| v.into_iter().collect())
}

/// Every fixture property gets a relation, whether or not the data uses it.
fn layout_predicates(data: &Dataset) -> BTreeSet<Iri> {
    let mut out = data.predicates();
    out.extend(PROPERTIES.iter().map(|p| Iri::from_static(p)));
    out
}

fn answers(o: &Ontology, data: &Dataset, text: &str, kind: LayoutKind, orientation: Orientation, options: PlanOptions) -> ResultSet {
    let e = rewrite(&parse_query(text).unwrap(), o, RewriteFlags::default()).rewritten().unwrap().clone();
    let d = build_layout(o, &layout_predicates(data), kind);
    let store = load_store(data, &d, orientation).unwrap();
    execute_plan(&plan_query_with(&e, store.descriptor(), options).unwrap(), &store)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn merge_and_hash_joins_agree(data in dataset(40), q in prop::sample::select(&QUERIES[..])) {
        let o = Ontology::from_schema_canonical(&fixtures::class_hierarchy_schema());
        for kind in LayoutKind::ALL {
            for orientation in Orientation::ALL {
                let merged = answers(&o, &data, q, kind, orientation, PlanOptions::default());
                let hashed = answers(&o, &data, q, kind, orientation, PlanOptions { force_hash: true });
                prop_assert_eq!(merged, hashed);
            }
        }
    }

    #[test]
    fn layouts_agree(data in dataset(40), q in prop::sample::select(&QUERIES[..])) {
        let o = Ontology::from_schema_canonical(&fixtures::class_hierarchy_schema());
        let reference = answers(&o, &data, q, LayoutKind::TripleTable, Orientation::Row, PlanOptions::default());
        for kind in LayoutKind::ALL {
            for orientation in Orientation::ALL {
                prop_assert_eq!(&answers(&o, &data, q, kind, orientation, PlanOptions::default()), &reference);
            }
        }
    }

    /// Adding triples never removes answers.
    #[test]
    fn answers_grow_with_data(base in dataset(30), extra in dataset(15), q in prop::sample::select(&QUERIES[..])) {
        let o = Ontology::from_schema_canonical(&fixtures::class_hierarchy_schema());
        let mut bigger = base.clone();
        bigger.extend(extra.iter().cloned());
        for kind in LayoutKind::ALL {
            let small = answers(&o, &base, q, kind, Orientation::Column, PlanOptions::default());
            let large = answers(&o, &bigger, q, kind, Orientation::Column, PlanOptions::default());
            prop_assert!(small.rows.is_subset(&large.rows));
        }
    }

    /// Subsumption only ever adds answers to the literal reading of a query.
    #[test]
    fn subsume_is_a_superset(data in dataset(40), q in prop::sample::select(&QUERIES[..])) {
        let o = Ontology::from_schema_canonical(&fixtures::class_hierarchy_schema());
        let q = parse_query(q).unwrap();
        let d = build_layout(&o, &layout_predicates(&data), LayoutKind::RoStore);
        let store = load_store(&data, &d, Orientation::Row).unwrap();
        let run = |flags| {
            let e = rewrite(&q, &o, flags).rewritten().unwrap().clone();
            execute_plan(&plan_query(&e, store.descriptor()).unwrap(), &store)
        };
        let plain = run(RewriteFlags::NONE);
        let expanded = run(RewriteFlags { enable_property_check: false, ..RewriteFlags::default() });
        prop_assert!(plain.rows.is_subset(&expanded.rows));
    }
}
