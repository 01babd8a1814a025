//! Ontology model: class and property hierarchies, domain/range
//! declarations and disjointness, with the closure queries the storage
//! layouts and the rewriter depend on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::rdf::{vocab, Dataset, Iri};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyKind {
    Class,
    Property,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Towards more specific terms (children).
    Sub,
    /// Towards more general terms (parents).
    Super,
}

/// Maps each property to the representative of its equivalence class.
/// Only non-identity entries are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalMap {
    aliases: BTreeMap<Iri, Iri>,
}

impl CanonicalMap {
    pub fn get<'a>(&'a self, property: &'a Iri) -> &'a Iri {
        self.aliases.get(property).unwrap_or(property)
    }

    pub fn is_identity(&self) -> bool {
        self.aliases.is_empty()
    }

    /// Non-identity (alias, canonical) pairs.
    pub fn aliases(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.aliases.iter()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Adjacency {
    parents: BTreeMap<Iri, BTreeSet<Iri>>,
    children: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Adjacency {
    fn add(&mut self, child: &Iri, parent: &Iri) {
        self.parents.entry(child.clone()).or_default().insert(parent.clone());
        self.children.entry(parent.clone()).or_default().insert(child.clone());
    }

    fn next(&self, node: &Iri, direction: Direction) -> Option<&BTreeSet<Iri>> {
        match direction {
            Direction::Sub => self.children.get(node),
            Direction::Super => self.parents.get(node),
        }
    }

    /// Reflexive-transitive closure in breadth-first discovery order,
    /// visiting siblings in lexicographic order.
    fn closure(&self, start: &Iri, direction: Direction) -> Vec<Iri> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut order = vec![start.clone()];
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(node) = queue.pop_front() {
            for next in self.next(&node, direction).into_iter().flatten() {
                if seen.insert(next.clone()) {
                    order.push(next.clone());
                    queue.push_back(next.clone());
                }
            }
        }
        order
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    subclass_edges: BTreeSet<(Iri, Iri)>,
    subproperty_edges: BTreeSet<(Iri, Iri)>,
    domain_of: BTreeMap<Iri, BTreeSet<Iri>>,
    range_of: BTreeMap<Iri, BTreeSet<Iri>>,
    disjoint_pairs: BTreeSet<(Iri, Iri)>,
    canonical: CanonicalMap,
    classes: Adjacency,
    properties: Adjacency,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads the schema vocabulary out of `schema`; other triples are ignored.
    pub fn from_schema(schema: &Dataset) -> Self {
        let mut o = Self::new();
        for t in schema {
            let Some(obj) = t.object.as_iri() else { continue };
            match t.predicate.as_str() {
                vocab::RDFS_SUBCLASS_OF => o.add_subclass(&t.subject, obj),
                vocab::RDFS_SUBPROPERTY_OF => o.add_subproperty(&t.subject, obj),
                vocab::RDFS_DOMAIN => o.add_domain(&t.subject, obj),
                vocab::RDFS_RANGE => o.add_range(&t.subject, obj),
                vocab::OWL_DISJOINT_WITH => o.add_disjoint(&t.subject, obj),
                _ => {}
            }
        }
        o
    }

    /// Parses the schema and collapses property cycles in one step.
    pub fn from_schema_canonical(schema: &Dataset) -> Self {
        Self::from_schema(schema).canonicalize().0
    }

    pub fn add_subclass(&mut self, child: &Iri, parent: &Iri) {
        if self.subclass_edges.insert((child.clone(), parent.clone())) {
            self.classes.add(child, parent);
        }
    }

    pub fn add_subproperty(&mut self, child: &Iri, parent: &Iri) {
        if self.subproperty_edges.insert((child.clone(), parent.clone())) {
            self.properties.add(child, parent);
        }
    }

    pub fn add_domain(&mut self, property: &Iri, class: &Iri) {
        self.domain_of.entry(property.clone()).or_default().insert(class.clone());
    }

    pub fn add_range(&mut self, property: &Iri, class: &Iri) {
        self.range_of.entry(property.clone()).or_default().insert(class.clone());
    }

    pub fn add_disjoint(&mut self, a: &Iri, b: &Iri) {
        let pair = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.disjoint_pairs.insert(pair);
    }

    pub fn subclass_edges(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.subclass_edges
    }

    pub fn subproperty_edges(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.subproperty_edges
    }

    /// Unordered pairs, stored with the smaller IRI first.
    pub fn disjoint_pairs(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.disjoint_pairs
    }

    pub fn domains(&self, property: &Iri) -> impl Iterator<Item = &Iri> {
        self.domain_of.get(property).into_iter().flatten()
    }

    pub fn ranges(&self, property: &Iri) -> impl Iterator<Item = &Iri> {
        self.range_of.get(property).into_iter().flatten()
    }

    /// The domain when exactly one is declared.
    pub fn single_domain(&self, property: &Iri) -> Option<&Iri> {
        single(self.domain_of.get(property))
    }

    /// The range when exactly one is declared.
    pub fn single_range(&self, property: &Iri) -> Option<&Iri> {
        single(self.range_of.get(property))
    }

    pub fn canonical_map(&self) -> &CanonicalMap {
        &self.canonical
    }

    pub fn canonical_property<'a>(&'a self, property: &'a Iri) -> &'a Iri {
        self.canonical.get(property)
    }

    pub fn is_empty(&self) -> bool {
        self.subclass_edges.is_empty()
            && self.subproperty_edges.is_empty()
            && self.domain_of.is_empty()
            && self.range_of.is_empty()
            && self.disjoint_pairs.is_empty()
    }

    /// Every property named by a subproperty edge or a domain/range declaration.
    pub fn properties(&self) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        for (c, p) in &self.subproperty_edges {
            out.insert(c.clone());
            out.insert(p.clone());
        }
        out.extend(self.domain_of.keys().cloned());
        out.extend(self.range_of.keys().cloned());
        out
    }

    /// Every class named anywhere in the ontology.
    pub fn classes(&self) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        for (a, b) in self.subclass_edges.iter().chain(&self.disjoint_pairs) {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        for set in self.domain_of.values().chain(self.range_of.values()) {
            out.extend(set.iter().cloned());
        }
        out
    }

    /// Collapses every cycle of the property hierarchy onto its
    /// lexicographically smallest member. Self-loops are dropped.
    pub fn canonicalize(&self) -> (Ontology, CanonicalMap) {
        let nodes: Vec<Iri> = self.properties().into_iter().collect();
        let mut fresh = BTreeMap::new();
        for component in strongly_connected(&nodes, &self.properties) {
            if component.len() < 2 {
                continue;
            }
            let rep = component.iter().min().expect("non-empty").clone();
            for member in component {
                if member != rep {
                    fresh.insert(member, rep.clone());
                }
            }
        }
        let map_prop = |p: &Iri| fresh.get(p).cloned().unwrap_or_else(|| p.clone());

        let mut out = Ontology::new();
        for (c, p) in &self.subclass_edges {
            out.add_subclass(c, p);
        }
        for (a, b) in &self.disjoint_pairs {
            out.add_disjoint(a, b);
        }
        for (c, p) in &self.subproperty_edges {
            let (c, p) = (map_prop(c), map_prop(p));
            if c != p {
                out.add_subproperty(&c, &p);
            }
        }
        for (p, classes) in &self.domain_of {
            for class in classes {
                out.add_domain(&map_prop(p), class);
            }
        }
        for (p, classes) in &self.range_of {
            for class in classes {
                out.add_range(&map_prop(p), class);
            }
        }

        // Compose with any aliases from an earlier canonicalization.
        let mut aliases: BTreeMap<Iri, Iri> = self
            .canonical
            .aliases
            .iter()
            .map(|(alias, canon)| (alias.clone(), map_prop(canon)))
            .collect();
        aliases.extend(fresh);
        out.canonical = CanonicalMap { aliases };
        let map = out.canonical.clone();
        (out, map)
    }

    /// Reflexive-transitive sub- or super-closure of `start`, in
    /// breadth-first discovery order (start first, siblings sorted).
    pub fn subsumption_closure(
        &self,
        kind: HierarchyKind,
        start: &Iri,
        direction: Direction,
    ) -> Vec<Iri> {
        match kind {
            HierarchyKind::Class => self.classes.closure(start, direction),
            HierarchyKind::Property => self.properties.closure(start, direction),
        }
    }

    pub fn sub_classes(&self, class: &Iri) -> Vec<Iri> {
        self.subsumption_closure(HierarchyKind::Class, class, Direction::Sub)
    }

    pub fn super_classes(&self, class: &Iri) -> Vec<Iri> {
        self.subsumption_closure(HierarchyKind::Class, class, Direction::Super)
    }

    pub fn sub_properties(&self, property: &Iri) -> Vec<Iri> {
        self.subsumption_closure(HierarchyKind::Property, property, Direction::Sub)
    }

    pub fn super_properties(&self, property: &Iri) -> Vec<Iri> {
        self.subsumption_closure(HierarchyKind::Property, property, Direction::Super)
    }

    /// `sub ⊑ sup` under the reflexive-transitive class hierarchy.
    pub fn is_subclass_of(&self, sub: &Iri, sup: &Iri) -> bool {
        sub == sup || self.super_classes(sub).contains(sup)
    }

    pub fn has_sub_properties(&self, property: &Iri) -> bool {
        self.properties.children.get(property).is_some_and(|c| !c.is_empty())
    }

    pub fn is_top_property(&self, property: &Iri) -> bool {
        self.properties.parents.get(property).is_none_or(|p| p.is_empty())
    }

    /// Properties with no super-property, drawn from the ontology plus
    /// `extra` (typically the predicates occurring in data, canonicalized).
    pub fn top_properties<'a>(&self, extra: impl IntoIterator<Item = &'a Iri>) -> BTreeSet<Iri> {
        let mut all = self.properties();
        all.extend(extra.into_iter().cloned());
        all.into_iter().filter(|p| self.is_top_property(p)).collect()
    }

    /// The top-property whose merged relation holds `property`. When several
    /// tops are reachable, the lexicographically smallest wins.
    pub fn top_property_of(&self, property: &Iri) -> Iri {
        self.super_properties(property)
            .into_iter()
            .filter(|p| self.is_top_property(p))
            .min()
            .unwrap_or_else(|| property.clone())
    }

    /// True when `a ⊑ X` and `b ⊑ Y` for some declared disjoint pair {X, Y}.
    pub fn classes_disjoint(&self, a: &Iri, b: &Iri) -> bool {
        if self.disjoint_pairs.is_empty() {
            return false;
        }
        let sup_a: BTreeSet<Iri> = self.super_classes(a).into_iter().collect();
        let sup_b: BTreeSet<Iri> = self.super_classes(b).into_iter().collect();
        self.disjoint_pairs.iter().any(|(x, y)| {
            (sup_a.contains(x) && sup_b.contains(y)) || (sup_a.contains(y) && sup_b.contains(x))
        })
    }

    /// True when the set of (entailed) types contains both members of a
    /// declared disjoint pair.
    pub fn types_clash<'a>(&self, types: impl IntoIterator<Item = &'a Iri>) -> Option<(Iri, Iri)> {
        let mut entailed = BTreeSet::new();
        for t in types {
            entailed.extend(self.super_classes(t));
        }
        self.disjoint_pairs
            .iter()
            .find(|(x, y)| entailed.contains(x) && entailed.contains(y))
            .cloned()
    }
}

fn single(set: Option<&BTreeSet<Iri>>) -> Option<&Iri> {
    match set {
        Some(s) if s.len() == 1 => s.iter().next(),
        _ => None,
    }
}

/// Tarjan's algorithm, iterative so deep hierarchies cannot overflow the stack.
fn strongly_connected(nodes: &[Iri], graph: &Adjacency) -> Vec<Vec<Iri>> {
    let index_of: BTreeMap<&Iri, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let succ: Vec<Vec<usize>> = nodes
        .iter()
        .map(|n| {
            graph
                .parents
                .get(n)
                .into_iter()
                .flatten()
                .filter_map(|p| index_of.get(p).copied())
                .collect()
        })
        .collect();

    let n = nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut components = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, edge)) = work.last() {
            if edge < succ[v].len() {
                let w = succ[v][edge];
                work.last_mut().expect("non-empty").1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(nodes[w].clone());
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}
