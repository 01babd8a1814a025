use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ontology::{CanonicalMap, Ontology};
use crate::rdf::{vocab, Iri};

pub const TYPE_RELATION: &str = "type";
pub const TRIPLES_RELATION: &str = "triples";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LayoutKind {
    TripleTable,
    VerticalPartition,
    RoStore,
}

impl LayoutKind {
    pub const ALL: [LayoutKind; 3] =
        [LayoutKind::TripleTable, LayoutKind::VerticalPartition, LayoutKind::RoStore];

    /// Short name used on the command line and in reports.
    pub fn short_name(self) -> &'static str {
        match self {
            LayoutKind::TripleTable => "triple",
            LayoutKind::VerticalPartition => "vp",
            LayoutKind::RoStore => "ro",
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for LayoutKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "triple" | "triple-table" => Ok(LayoutKind::TripleTable),
            "vp" | "vertical" => Ok(LayoutKind::VerticalPartition),
            "ro" | "rostore" => Ok(LayoutKind::RoStore),
            other => Err(format!("unknown layout {other:?} (expected triple, vp or ro)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Row,
    Column,
}

impl Orientation {
    pub const ALL: [Orientation; 2] = [Orientation::Row, Orientation::Column];

    pub fn short_name(self) -> &'static str {
        match self {
            Orientation::Row => "row",
            Orientation::Column => "column",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row" => Ok(Orientation::Row),
            "column" | "col" => Ok(Orientation::Column),
            other => Err(format!("unknown orientation {other:?} (expected row or column)")),
        }
    }
}

/// One physical relation: its name, arity and the (canonical) properties
/// routed to it. Two-column relations hold exactly one property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub name: String,
    pub arity: u8,
    pub properties: BTreeSet<Iri>,
}

impl RelationSpec {
    pub fn is_merged(&self) -> bool {
        self.arity == 3
    }

    /// The single property of a two-column relation.
    pub fn fixed_property(&self) -> Option<&Iri> {
        if self.arity == 2 {
            self.properties.iter().next()
        } else {
            None
        }
    }
}

/// Predicate to relation routing for one layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDescriptor {
    pub kind: LayoutKind,
    relation_of: BTreeMap<Iri, String>,
    relations: BTreeMap<String, RelationSpec>,
    canonical: CanonicalMap,
}

impl LayoutDescriptor {
    /// The relation holding `predicate`; aliases resolve through the canonical map.
    pub fn relation_for(&self, predicate: &Iri) -> Option<&RelationSpec> {
        let name = self
            .relation_of
            .get(predicate)
            .or_else(|| self.relation_of.get(self.canonical.get(predicate)))?;
        self.relations.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationSpec> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationSpec> {
        self.relations.values()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Iri, &str)> {
        self.relation_of.iter().map(|(p, r)| (p, r.as_str()))
    }

    pub fn canonical(&self) -> &CanonicalMap {
        &self.canonical
    }

    pub(crate) fn from_parts(
        kind: LayoutKind,
        relations: Vec<RelationSpec>,
        canonical: CanonicalMap,
    ) -> Self {
        let mut relation_of = BTreeMap::new();
        for r in &relations {
            for p in &r.properties {
                relation_of.insert(p.clone(), r.name.clone());
            }
        }
        for (alias, canon) in canonical.aliases() {
            if let Some(name) = relation_of.get(canon).cloned() {
                relation_of.insert(alias.clone(), name);
            }
        }
        let relations = relations.into_iter().map(|r| (r.name.clone(), r)).collect();
        Self { kind, relation_of, relations, canonical }
    }
}

fn sanitize(local: &str) -> String {
    let mut s: String = local
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert_str(0, "p_");
    }
    s
}

struct Namer {
    used: BTreeSet<String>,
}

impl Namer {
    fn unique(&mut self, iri: &Iri) -> String {
        let base = sanitize(iri.local_name());
        let mut name = base.clone();
        let mut n = 2;
        while self.used.contains(&name) {
            name = format!("{base}_{n}");
            n += 1;
        }
        self.used.insert(name.clone());
        name
    }
}

/// Builds the predicate routing for `kind`. `data_predicates` adds relations
/// for predicates the ontology does not mention.
pub fn build_layout(
    ontology: &Ontology,
    data_predicates: &BTreeSet<Iri>,
    kind: LayoutKind,
) -> LayoutDescriptor {
    let rdf_type = Iri::from_static(vocab::RDF_TYPE);
    let canonical = ontology.canonical_map().clone();
    let mut properties = ontology.properties();
    properties.extend(data_predicates.iter().map(|p| canonical.get(p).clone()));
    properties.remove(&rdf_type);

    let type_relation = RelationSpec {
        name: TYPE_RELATION.to_string(),
        arity: 2,
        properties: BTreeSet::from([rdf_type.clone()]),
    };
    let mut namer = Namer { used: BTreeSet::from([TYPE_RELATION.to_string()]) };

    let relations = match kind {
        LayoutKind::TripleTable => {
            let mut all = properties;
            all.insert(rdf_type);
            vec![RelationSpec { name: TRIPLES_RELATION.to_string(), arity: 3, properties: all }]
        }
        LayoutKind::VerticalPartition => {
            let mut out = vec![type_relation];
            for p in properties {
                out.push(RelationSpec {
                    name: namer.unique(&p),
                    arity: 2,
                    properties: BTreeSet::from([p]),
                });
            }
            out
        }
        LayoutKind::RoStore => {
            let mut groups: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
            for p in properties {
                groups.entry(ontology.top_property_of(&p)).or_default().insert(p);
            }
            let mut out = vec![type_relation];
            for (top, members) in groups {
                let arity = if ontology.has_sub_properties(&top) { 3 } else { 2 };
                out.push(RelationSpec { name: namer.unique(&top), arity, properties: members });
            }
            out
        }
    };
    LayoutDescriptor::from_parts(kind, relations, canonical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pa_hierarchy() -> (Ontology, BTreeSet<Iri>) {
        let o = Ontology::from_schema_canonical(&fixtures::pa_hierarchy_schema());
        (o, fixtures::pa_hierarchy_data().predicates())
    }

    fn shape(d: &LayoutDescriptor) -> Vec<(String, u8)> {
        d.relations().map(|r| (r.name.clone(), r.arity)).collect()
    }

    #[test]
    fn rostore_merges_pa_hierarchy() {
        let (o, preds) = pa_hierarchy();
        let d = build_layout(&o, &preds, LayoutKind::RoStore);
        assert_eq!(
            shape(&d),
            vec![("pa".into(), 3), ("pf".into(), 2), ("type".into(), 2)]
        );
        for p in ["pa", "pb", "pc", "pd", "pe"] {
            assert_eq!(d.relation_for(&Iri::from_static(p)).unwrap().name, "pa");
        }
    }

    #[test]
    fn vertical_partition_one_relation_per_predicate() {
        let (o, preds) = pa_hierarchy();
        let d = build_layout(&o, &preds, LayoutKind::VerticalPartition);
        let names: Vec<_> = shape(&d).into_iter().map(|(n, a)| {
            assert_eq!(a, 2);
            n
        }).collect();
        assert_eq!(names, vec!["pa", "pb", "pc", "pd", "pe", "pf", "type"]);
    }

    #[test]
    fn triple_table_single_relation() {
        let (o, preds) = pa_hierarchy();
        let d = build_layout(&o, &preds, LayoutKind::TripleTable);
        assert_eq!(shape(&d), vec![("triples".into(), 3)]);
        assert_eq!(d.relation_for(&Iri::from_static(vocab::RDF_TYPE)).unwrap().name, "triples");
    }

    #[test]
    fn rostore_without_hierarchy_degenerates() {
        let preds = BTreeSet::from([Iri::from_static("x")]);
        let d = build_layout(&Ontology::new(), &preds, LayoutKind::RoStore);
        assert_eq!(shape(&d), vec![("type".into(), 2), ("x".into(), 2)]);
    }

    #[test]
    fn names_are_sanitized_and_unique() {
        let preds = BTreeSet::from([
            Iri::from_static("http://a/type"),
            Iri::from_static("http://b/type"),
            Iri::from_static("http://c/9lives"),
            Iri::from_static("urn:x-y"),
        ]);
        let d = build_layout(&Ontology::new(), &preds, LayoutKind::VerticalPartition);
        let names: BTreeSet<_> = d.relations().map(|r| r.name.clone()).collect();
        assert_eq!(
            names,
            ["type", "type_2", "type_3", "p_9lives", "urn_x_y"].into_iter().map(String::from).collect()
        );
    }

    #[test]
    fn aliases_route_to_canonical_relation() {
        let mut o = Ontology::new();
        let (p, q) = (Iri::from_static("p"), Iri::from_static("q"));
        o.add_subproperty(&p, &q);
        o.add_subproperty(&q, &p);
        let (o, _) = o.canonicalize();
        let d = build_layout(&o, &BTreeSet::from([q.clone()]), LayoutKind::VerticalPartition);
        assert_eq!(d.relation_for(&q).unwrap().name, "p");
        assert_eq!(d.relation_count(), 2);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("vp".parse::<LayoutKind>().unwrap(), LayoutKind::VerticalPartition);
        assert_eq!("column".parse::<Orientation>().unwrap(), Orientation::Column);
        assert!("x".parse::<LayoutKind>().is_err());
    }
}
