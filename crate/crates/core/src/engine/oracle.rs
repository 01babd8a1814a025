//! Reference evaluator: materializes sub-property and sub-class entailment,
//! then matches the query naively. Deliberately independent of the
//! closure, rewriting and planning code.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ResultSet;
use crate::ontology::Ontology;
use crate::query::{PatternTerm, SelectQuery};
use crate::rdf::{vocab, Dataset, Iri, Term, Triple};

/// Reflexive-transitive closure of `edges` by naive fixpoint.
fn ancestors(edges: &BTreeSet<(Iri, Iri)>) -> HashMap<Iri, BTreeSet<Iri>> {
    let mut up: HashMap<Iri, BTreeSet<Iri>> = HashMap::new();
    for (c, p) in edges {
        up.entry(c.clone()).or_default().insert(p.clone());
    }
    loop {
        let mut changed = false;
        let keys: Vec<Iri> = up.keys().cloned().collect();
        for k in keys {
            let reach: Vec<Iri> = up[&k].iter().flat_map(|p| up.get(p).into_iter().flatten()).cloned().collect();
            let set = up.get_mut(&k).expect("key present");
            for r in reach {
                changed |= set.insert(r);
            }
        }
        if !changed {
            return up;
        }
    }
}

fn entailed(data: &Dataset, o: &Ontology) -> Dataset {
    let mut property_edges = o.subproperty_edges().clone();
    for (alias, canonical) in o.canonical_map().aliases() {
        property_edges.insert((alias.clone(), canonical.clone()));
        property_edges.insert((canonical.clone(), alias.clone()));
    }
    let props = ancestors(&property_edges);
    let classes = ancestors(o.subclass_edges());
    let rdf_type = Iri::from_static(vocab::RDF_TYPE);

    let mut out = data.clone();
    for t in data {
        for q in props.get(&t.predicate).into_iter().flatten() {
            out.insert(Triple::new(t.subject.clone(), q.clone(), t.object.clone()));
        }
    }
    let typed: Vec<Triple> = out.iter().filter(|t| t.predicate == rdf_type).cloned().collect();
    for t in typed {
        let Term::Iri(c) = &t.object else { continue };
        for d in classes.get(c).into_iter().flatten() {
            out.insert(Triple::new(t.subject.clone(), rdf_type.clone(), Term::Iri(d.clone())));
        }
    }
    out
}

fn unify(term: &PatternTerm, value: &Term, env: &mut BTreeMap<String, Term>) -> bool {
    match term {
        PatternTerm::Iri(i) => matches!(value, Term::Iri(v) if v == i),
        PatternTerm::Literal(s) => matches!(value, Term::Literal(v) if v == s),
        PatternTerm::Var(v) => match env.get(v) {
            Some(bound) => bound == value,
            None => {
                env.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn solve(
    q: &SelectQuery,
    i: usize,
    by_predicate: &HashMap<&Iri, Vec<&Triple>>,
    env: &BTreeMap<String, Term>,
    out: &mut ResultSet,
) {
    let Some(p) = q.patterns.get(i) else {
        out.rows.insert(q.projection.iter().map(|v| env[v].clone()).collect());
        return;
    };
    for t in by_predicate.get(&p.predicate).into_iter().flatten() {
        let mut next = env.clone();
        if unify(&p.subject, &Term::Iri(t.subject.clone()), &mut next) && unify(&p.object, &t.object, &mut next) {
            solve(q, i + 1, by_predicate, &next, out);
        }
    }
}

/// Evaluates the unrewritten query over the entailment closure of `data`.
pub fn evaluate_oracle(q: &SelectQuery, data: &Dataset, o: &Ontology) -> ResultSet {
    let closed = entailed(data, o);
    let mut by_predicate: HashMap<&Iri, Vec<&Triple>> = HashMap::new();
    for t in &closed {
        by_predicate.entry(&t.predicate).or_default().push(t);
    }
    let mut out = ResultSet { schema: q.projection.clone(), rows: BTreeSet::new() };
    solve(q, 0, &by_predicate, &BTreeMap::new(), &mut out);
    out
}
