//! Physical planning, execution, plan metrics and the reference evaluator.

mod exec;
mod oracle;

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::query::PatternTerm;
use crate::rdf::{vocab, Iri, Term};
use crate::sqr::ExpandedQuery;
use crate::storage::{LayoutDescriptor, RelationSpec};

pub use exec::{execute_plan, ResultSet};
pub use oracle::evaluate_oracle;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("no relation for predicate <{0}>")]
    UnknownRelation(Iri),
}

/// What a scan column must match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Var(String),
    Const(Term),
    /// Any of these IRIs (a class closure).
    OneOf(Vec<Iri>),
}

impl Binding {
    fn from_term(t: &PatternTerm) -> Self {
        match t {
            PatternTerm::Var(v) => Binding::Var(v.clone()),
            PatternTerm::Iri(i) => Binding::Const(Term::Iri(i.clone())),
            PatternTerm::Literal(s) => Binding::Const(Term::Literal(s.clone())),
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Var(v) => write!(f, "?{v}"),
            Binding::Const(t) => write!(f, "{t}"),
            Binding::OneOf(items) => {
                let items: Vec<String> = items.iter().map(|i| format!("<{}>", i.as_str())).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JoinAlgorithm {
    Merge,
    Hash,
}

impl fmt::Display for JoinAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinAlgorithm::Merge => "merge",
            JoinAlgorithm::Hash => "hash",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanNode {
    Scan {
        relation: String,
        arity: u8,
        property_filter: Option<Vec<Iri>>,
        subject: Binding,
        object: Binding,
    },
    Join {
        on: Vec<String>,
        algorithm: JoinAlgorithm,
        left: Box<PlanNode>,
        right: Box<PlanNode>,
    },
    Union {
        children: Vec<PlanNode>,
    },
    Project {
        vars: Vec<String>,
        input: Box<PlanNode>,
    },
}

fn push_unique(out: &mut Vec<String>, v: &str) {
    if !out.iter().any(|o| o == v) {
        out.push(v.to_string());
    }
}

impl PlanNode {
    /// Output variables in column order.
    pub fn schema(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            PlanNode::Scan { subject, object, .. } => {
                for b in [subject, object] {
                    if let Binding::Var(v) = b {
                        push_unique(&mut out, v);
                    }
                }
            }
            PlanNode::Join { left, right, .. } => {
                out = left.schema();
                for v in right.schema() {
                    push_unique(&mut out, &v);
                }
            }
            PlanNode::Union { children } => out = children[0].schema(),
            PlanNode::Project { vars, .. } => out = vars.clone(),
        }
        out
    }

    /// The variable this node's output is sorted on, if any.
    ///
    /// Two-column relations iterate in subject order, and so does a single
    /// property's range of a three-column relation. Merge joins keep their
    /// key order; hash joins keep the probe (left) side's order.
    pub fn ordered_on(&self) -> Option<String> {
        match self {
            PlanNode::Scan { arity, property_filter, subject: Binding::Var(s), .. } => {
                let single_range = matches!(property_filter, Some(f) if f.len() == 1);
                (*arity == 2 || single_range).then(|| s.clone())
            }
            PlanNode::Scan { .. } | PlanNode::Union { .. } => None,
            PlanNode::Join { on, algorithm: JoinAlgorithm::Merge, .. } => on.first().cloned(),
            PlanNode::Join { left, .. } => left.ordered_on(),
            PlanNode::Project { input, .. } => input.ordered_on(),
        }
    }

    fn walk(&self, f: &mut impl FnMut(&PlanNode)) {
        f(self);
        match self {
            PlanNode::Scan { .. } => {}
            PlanNode::Join { left, right, .. } => {
                left.walk(f);
                right.walk(f);
            }
            PlanNode::Union { children } => children.iter().for_each(|c| c.walk(f)),
            PlanNode::Project { input, .. } => input.walk(f),
        }
    }

    fn explain_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            PlanNode::Scan { relation, property_filter, subject, object, .. } => {
                let _ = write!(out, "{pad}Scan {relation} subject={subject} object={object}");
                if let Some(f) = property_filter {
                    let items: Vec<String> = f.iter().map(|p| format!("<{}>", p.as_str())).collect();
                    let _ = write!(out, " property IN {{{}}}", items.join(", "));
                }
                out.push('\n');
            }
            PlanNode::Join { on, algorithm, left, right } => {
                let on: Vec<String> = on.iter().map(|v| format!("?{v}")).collect();
                let on = if on.is_empty() { "(cross)".to_string() } else { on.join(", ") };
                let _ = writeln!(out, "{pad}Join {algorithm} on {on}");
                left.explain_into(depth + 1, out);
                right.explain_into(depth + 1, out);
            }
            PlanNode::Union { children } => {
                let _ = writeln!(out, "{pad}Union");
                children.iter().for_each(|c| c.explain_into(depth + 1, out));
            }
            PlanNode::Project { vars, input } => {
                let vars: Vec<String> = vars.iter().map(|v| format!("?{v}")).collect();
                let _ = writeln!(out, "{pad}Project {}", vars.join(" "));
                input.explain_into(depth + 1, out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PlanMetrics {
    pub relations_scanned: usize,
    pub joins: usize,
    pub unions: usize,
}

impl fmt::Display for PlanMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scans={} joins={} unions={}", self.relations_scanned, self.joins, self.unions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalPlan {
    pub root: PlanNode,
}

impl PhysicalPlan {
    /// Counts from the operator tree alone; nothing is executed.
    pub fn metrics(&self) -> PlanMetrics {
        let mut m = PlanMetrics::default();
        self.root.walk(&mut |n| match n {
            PlanNode::Scan { .. } => m.relations_scanned += 1,
            PlanNode::Join { .. } => m.joins += 1,
            PlanNode::Union { children } => m.unions += children.len().saturating_sub(1),
            PlanNode::Project { .. } => {}
        });
        m
    }

    /// Indented operator tree with a metrics footer.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.root.explain_into(0, &mut out);
        out.push_str(&self.metrics().to_string());
        out.push('\n');
        out
    }
}

pub fn plan_metrics(plan: &PhysicalPlan) -> PlanMetrics {
    plan.metrics()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanOptions {
    /// Use hash joins even where a merge join is admissible.
    pub force_hash: bool,
}

fn scan_for(
    spec: &RelationSpec,
    members: Vec<Iri>,
    subject: Binding,
    object: Binding,
) -> PlanNode {
    let property_filter =
        if spec.is_merged() && members.len() < spec.properties.len() { Some(members) } else { None };
    PlanNode::Scan { relation: spec.name.clone(), arity: spec.arity, property_filter, subject, object }
}

fn pattern_node(q: &ExpandedQuery, i: usize, d: &LayoutDescriptor) -> Result<PlanNode, PlanError> {
    let p = &q.base.patterns[i];
    let subject = Binding::from_term(&p.subject);
    if p.is_type_pattern() {
        let rdf_type = Iri::from_static(vocab::RDF_TYPE);
        let spec = d.relation_for(&rdf_type).ok_or(PlanError::UnknownRelation(rdf_type.clone()))?;
        let object = match q.classes(i) {
            Some([one]) => Binding::Const(Term::Iri(one.clone())),
            Some(many) => Binding::OneOf(many.to_vec()),
            None => Binding::from_term(&p.object),
        };
        return Ok(scan_for(spec, vec![rdf_type], subject, object));
    }

    let props = q.properties(i).unwrap_or(std::slice::from_ref(&p.predicate));
    let mut groups: Vec<(&RelationSpec, Vec<Iri>)> = Vec::new();
    for prop in props {
        let spec = d.relation_for(prop).ok_or_else(|| PlanError::UnknownRelation(prop.clone()))?;
        match groups.iter_mut().find(|(s, _)| s.name == spec.name) {
            Some((_, members)) => members.push(prop.clone()),
            None => groups.push((spec, vec![prop.clone()])),
        }
    }
    let object = Binding::from_term(&p.object);
    let mut scans: Vec<PlanNode> = groups
        .into_iter()
        .map(|(spec, members)| scan_for(spec, members, subject.clone(), object.clone()))
        .collect();
    Ok(if scans.len() == 1 { scans.remove(0) } else { PlanNode::Union { children: scans } })
}

/// Builds a left-deep plan in pattern order.
pub fn plan_query(q: &ExpandedQuery, d: &LayoutDescriptor) -> Result<PhysicalPlan, PlanError> {
    plan_query_with(q, d, PlanOptions::default())
}

pub fn plan_query_with(
    q: &ExpandedQuery,
    d: &LayoutDescriptor,
    options: PlanOptions,
) -> Result<PhysicalPlan, PlanError> {
    let mut nodes = (0..q.base.patterns.len()).map(|i| pattern_node(q, i, d));
    let mut acc = nodes.next().expect("queries have at least one pattern")?;
    for right in nodes {
        let right = right?;
        let right_vars = right.schema();
        let on: Vec<String> = acc.schema().into_iter().filter(|v| right_vars.contains(v)).collect();
        let mergeable = on.len() == 1
            && !options.force_hash
            && acc.ordered_on().as_deref() == Some(on[0].as_str())
            && right.ordered_on().as_deref() == Some(on[0].as_str());
        let algorithm = if mergeable { JoinAlgorithm::Merge } else { JoinAlgorithm::Hash };
        acc = PlanNode::Join { on, algorithm, left: Box::new(acc), right: Box::new(right) };
    }
    Ok(PhysicalPlan {
        root: PlanNode::Project { vars: q.base.projection.clone(), input: Box::new(acc) },
    })
}
