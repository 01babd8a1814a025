use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::{Binding, JoinAlgorithm, PhysicalPlan, PlanNode};
use crate::rdf::{Term, TermId};
use crate::storage::{Position, StoreInstance};

/// Decoded result rows under set semantics, ordered by their terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub schema: Vec<String>,
    pub rows: BTreeSet<Vec<Term>>,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A header line of `?var`s, then one tab-separated line per row.
impl fmt::Display for ResultSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self.schema.iter().map(|v| format!("?{v}")).collect();
        writeln!(f, "{}", header.join("\t"))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Term::to_string).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

struct Rows {
    schema: Vec<String>,
    rows: Vec<Vec<TermId>>,
}

fn col(schema: &[String], v: &str) -> usize {
    schema.iter().position(|s| s == v).expect("variable in schema")
}

/// Runs `plan` against `store`. Plans are validated when built, so this
/// cannot fail; constants unknown to the store simply match nothing.
pub fn execute_plan(plan: &PhysicalPlan, store: &StoreInstance) -> ResultSet {
    let out = run(&plan.root, store);
    ResultSet {
        rows: out
            .rows
            .iter()
            .map(|r| r.iter().map(|&id| store.decode(id).clone()).collect())
            .collect(),
        schema: out.schema,
    }
}

fn run(node: &PlanNode, store: &StoreInstance) -> Rows {
    match node {
        PlanNode::Scan { relation, property_filter, subject, object, .. } => {
            scan(store, relation, property_filter.as_deref(), subject, object, node.schema())
        }
        PlanNode::Union { children } => {
            let mut out = Rows { schema: node.schema(), rows: Vec::new() };
            for c in children {
                out.rows.extend(run(c, store).rows);
            }
            out
        }
        PlanNode::Project { vars, input } => {
            let inner = run(input, store);
            let idx: Vec<usize> = vars.iter().map(|v| col(&inner.schema, v)).collect();
            let rows = inner.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect();
            Rows { schema: vars.clone(), rows }
        }
        PlanNode::Join { on, algorithm, left, right } => {
            let l = run(left, store);
            let r = run(right, store);
            match algorithm {
                JoinAlgorithm::Merge => merge_join(&l, &r, &on[0], node.schema()),
                JoinAlgorithm::Hash => hash_join(&l, &r, on, node.schema()),
            }
        }
    }
}

enum Check {
    Any,
    Is(TermId),
    In(HashSet<TermId>),
    /// The constant is not in the dictionary, so nothing matches.
    Never,
}

impl Check {
    fn new(b: &Binding, store: &StoreInstance) -> Self {
        let dict = store.dictionary();
        match b {
            Binding::Var(_) => Check::Any,
            Binding::Const(t) => dict.encode(t).map_or(Check::Never, Check::Is),
            Binding::OneOf(items) => Check::In(items.iter().filter_map(|i| dict.encode_iri(i)).collect()),
        }
    }

    fn accepts(&self, id: TermId) -> bool {
        match self {
            Check::Any => true,
            Check::Is(x) => *x == id,
            Check::In(set) => set.contains(&id),
            Check::Never => false,
        }
    }
}

fn scan(
    store: &StoreInstance,
    relation: &str,
    filter: Option<&[crate::rdf::Iri]>,
    subject: &Binding,
    object: &Binding,
    schema: Vec<String>,
) -> Rows {
    let (cs, co) = (Check::new(subject, store), Check::new(object, store));
    if matches!(cs, Check::Never) || matches!(co, Check::Never) {
        return Rows { schema, rows: Vec::new() };
    }
    let bound = match (&cs, &co) {
        (Check::Is(id), _) => Some((Position::Subject, *id)),
        (_, Check::Is(id)) => Some((Position::Object, *id)),
        _ => None,
    };
    let out = store
        .scan_relation(relation, filter, bound)
        .expect("plan built against this store's descriptor");
    let same_var = matches!((subject, object), (Binding::Var(a), Binding::Var(b)) if a == b);
    let rows = out
        .rows
        .into_iter()
        .filter(|t| cs.accepts(t.subject) && co.accepts(t.object))
        .filter(|t| !same_var || t.subject == t.object)
        .map(|t| {
            let mut row = Vec::with_capacity(2);
            if let Binding::Var(_) = subject {
                row.push(t.subject);
            }
            if let Binding::Var(_) = object {
                if !same_var {
                    row.push(t.object);
                }
            }
            row
        })
        .collect();
    Rows { schema, rows }
}

/// Positions in `right` of the columns not already in `left`.
fn right_extra(left: &[String], right: &[String]) -> Vec<usize> {
    (0..right.len()).filter(|&i| !left.contains(&right[i])).collect()
}

fn hash_join(l: &Rows, r: &Rows, on: &[String], schema: Vec<String>) -> Rows {
    let lk: Vec<usize> = on.iter().map(|v| col(&l.schema, v)).collect();
    let rk: Vec<usize> = on.iter().map(|v| col(&r.schema, v)).collect();
    let extra = right_extra(&l.schema, &r.schema);
    let mut table: HashMap<Vec<TermId>, Vec<usize>> = HashMap::new();
    for (i, row) in r.rows.iter().enumerate() {
        table.entry(rk.iter().map(|&k| row[k]).collect()).or_default().push(i);
    }
    let mut rows = Vec::new();
    for lrow in &l.rows {
        let key: Vec<TermId> = lk.iter().map(|&k| lrow[k]).collect();
        for &i in table.get(&key).map(Vec::as_slice).unwrap_or(&[]) {
            let mut row = lrow.clone();
            row.extend(extra.iter().map(|&e| r.rows[i][e]));
            rows.push(row);
        }
    }
    Rows { schema, rows }
}

fn merge_join(l: &Rows, r: &Rows, key: &str, schema: Vec<String>) -> Rows {
    let (lk, rk) = (col(&l.schema, key), col(&r.schema, key));
    debug_assert!(l.rows.windows(2).all(|w| w[0][lk] <= w[1][lk]), "left input not sorted");
    debug_assert!(r.rows.windows(2).all(|w| w[0][rk] <= w[1][rk]), "right input not sorted");
    let extra = right_extra(&l.schema, &r.schema);
    let mut rows = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < l.rows.len() && j < r.rows.len() {
        let (a, b) = (l.rows[i][lk], r.rows[j][rk]);
        if a < b {
            i += 1;
        } else if a > b {
            j += 1;
        } else {
            let i_end = i + l.rows[i..].iter().take_while(|x| x[lk] == a).count();
            let j_end = j + r.rows[j..].iter().take_while(|x| x[rk] == a).count();
            for lrow in &l.rows[i..i_end] {
                for rrow in &r.rows[j..j_end] {
                    let mut row = lrow.clone();
                    row.extend(extra.iter().map(|&e| rrow[e]));
                    rows.push(row);
                }
            }
            i = i_end;
            j = j_end;
        }
    }
    Rows { schema, rows }
}
