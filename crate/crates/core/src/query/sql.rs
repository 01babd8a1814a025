use std::collections::BTreeMap;

use super::PatternTerm;
use crate::rdf::Iri;
use crate::sqr::ExpandedQuery;
use crate::storage::{LayoutDescriptor, LayoutKind, RelationSpec, TYPE_RELATION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqlError {
    #[error("SQL emission is not supported for the {0} layout")]
    UnsupportedLayout(LayoutKind),
    #[error("no relation for predicate <{0}>")]
    UnknownPredicate(Iri),
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// A condition on one relation's columns.
#[derive(Clone)]
enum Cond {
    /// `column = 'v'`, or `column IN ('v', ...)` for several values
    Values(&'static str, Vec<String>),
    SubjectIsObject,
}

impl Cond {
    fn render(&self, qualifier: &str) -> String {
        match self {
            Cond::Values(col, values) => match values.as_slice() {
                [one] => format!("{qualifier}{col} = {}", quote(one)),
                _ => {
                    let items: Vec<String> = values.iter().map(|v| quote(v)).collect();
                    format!("{qualifier}{col} IN ({})", items.join(", "))
                }
            },
            Cond::SubjectIsObject => format!("{qualifier}subject = {qualifier}object"),
        }
    }

    fn values<'a>(col: &'static str, values: impl IntoIterator<Item = &'a str>) -> Self {
        Cond::Values(col, values.into_iter().map(str::to_string).collect())
    }
}

/// One relation read by a pattern.
struct Source<'a> {
    relation: &'a str,
    conditions: Vec<Cond>,
}

fn pattern_sources<'a>(
    q: &ExpandedQuery,
    i: usize,
    d: &'a LayoutDescriptor,
) -> Result<Vec<Source<'a>>, SqlError> {
    let p = &q.base.patterns[i];
    let mut constants = Vec::new();
    for (term, col) in [(&p.subject, "subject"), (&p.object, "object")] {
        match term {
            PatternTerm::Iri(v) if !(col == "object" && q.classes(i).is_some()) => {
                constants.push(Cond::values(col, [v.as_str()]))
            }
            PatternTerm::Literal(v) => constants.push(Cond::values(col, [v.as_str()])),
            _ => {}
        }
    }
    if let (PatternTerm::Var(a), PatternTerm::Var(b)) = (&p.subject, &p.object) {
        if a == b {
            constants.push(Cond::SubjectIsObject);
        }
    }

    if p.is_type_pattern() {
        let mut conditions = Vec::new();
        if let Some(classes) = q.classes(i) {
            conditions.push(Cond::values("object", classes.iter().map(Iri::as_str)));
        }
        conditions.extend(constants);
        return Ok(vec![Source { relation: TYPE_RELATION, conditions }]);
    }

    let props = q.properties(i).unwrap_or(std::slice::from_ref(&p.predicate));
    let mut groups: Vec<(&RelationSpec, Vec<&Iri>)> = Vec::new();
    for prop in props {
        let spec = d.relation_for(prop).ok_or_else(|| SqlError::UnknownPredicate(prop.clone()))?;
        match groups.iter_mut().find(|(s, _)| s.name == spec.name) {
            Some((_, members)) => members.push(prop),
            None => groups.push((spec, vec![prop])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(spec, members)| {
            let mut conditions = Vec::new();
            let covers_all = members.len() == spec.properties.len();
            if spec.is_merged() && !covers_all {
                conditions.push(Cond::values("property", members.iter().map(|m| m.as_str())));
            }
            conditions.extend(constants.iter().cloned());
            Source { relation: spec.name.as_str(), conditions }
        })
        .collect())
}

fn qualify(conditions: &[Cond], qualifier: &str) -> String {
    conditions.iter().map(|c| c.render(qualifier)).collect::<Vec<_>>().join(" AND ")
}

fn select(columns: &str, source: &Source<'_>) -> String {
    let mut s = format!("SELECT {columns} FROM {}", source.relation);
    if !source.conditions.is_empty() {
        s.push_str(" WHERE ");
        s.push_str(&qualify(&source.conditions, ""));
    }
    s
}

/// `a UNION (b UNION (c))`
fn nested_union(selects: &[String]) -> String {
    match selects {
        [] => String::new(),
        [one] => one.clone(),
        [first, rest @ ..] => format!("{first} UNION ({})", nested_union(rest)),
    }
}

fn column_of(term: &PatternTerm, var: &str) -> bool {
    term.as_var() == Some(var)
}

/// Emits SQL for a rewritten query over a VerticalPartition or RoStore
/// schema. Union branches nest to the right; multi-pattern queries join in
/// a single FROM list.
pub fn emit_sql(q: &ExpandedQuery, d: &LayoutDescriptor) -> Result<String, SqlError> {
    if d.kind == LayoutKind::TripleTable {
        return Err(SqlError::UnsupportedLayout(d.kind));
    }
    let patterns = &q.base.patterns;
    let sources: Vec<Vec<Source<'_>>> =
        (0..patterns.len()).map(|i| pattern_sources(q, i, d)).collect::<Result<_, _>>()?;

    if patterns.len() == 1 {
        let p = &patterns[0];
        let columns: Vec<&str> = q
            .base
            .projection
            .iter()
            .map(|v| if column_of(&p.subject, v) { "subject" } else { "object" })
            .collect();
        let columns = columns.join(", ");
        let selects: Vec<String> = sources[0].iter().map(|s| select(&columns, s)).collect();
        return Ok(format!("{};", nested_union(&selects)));
    }

    // FROM items and their aliases
    let mut used: BTreeMap<&str, usize> = BTreeMap::new();
    let mut from = Vec::new();
    let mut aliases = Vec::new();
    let mut where_pattern = Vec::new();
    for (i, srcs) in sources.iter().enumerate() {
        if let [single] = srcs.as_slice() {
            let n = used.entry(single.relation).or_insert(0);
            *n += 1;
            let alias = if *n == 1 { single.relation.to_string() } else { format!("{}_{n}", single.relation) };
            from.push(if *n == 1 { alias.clone() } else { format!("{} AS {alias}", single.relation) });
            where_pattern.push(qualify(&single.conditions, &format!("{alias}.")));
            aliases.push(alias);
        } else {
            let alias = format!("t{}", i + 1);
            let selects: Vec<String> = srcs.iter().map(|s| select("subject, object", s)).collect();
            from.push(format!("({}) AS {alias}", nested_union(&selects)));
            aliases.push(alias);
        }
    }

    let mut first: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut joins = Vec::new();
    for (i, p) in patterns.iter().enumerate() {
        for (term, col) in [(&p.subject, "subject"), (&p.object, "object")] {
            let Some(v) = term.as_var() else { continue };
            match first.get(v) {
                // same-pattern repeats are a condition of the pattern itself
                Some(&(j, fcol)) if j != i => {
                    joins.push(format!("{}.{col} = {}.{fcol}", aliases[i], aliases[j]));
                }
                Some(_) => {}
                None => {
                    first.insert(v, (i, col));
                }
            }
        }
    }

    let columns: Vec<String> = q
        .base
        .projection
        .iter()
        .map(|v| {
            let (i, col) = first[v.as_str()];
            if i == 0 {
                col.to_string()
            } else {
                format!("{}.{col}", aliases[i])
            }
        })
        .collect();

    let mut sql = format!("SELECT {} FROM {}", columns.join(", "), from.join(", "));
    let conditions: Vec<String> =
        joins.into_iter().chain(where_pattern.into_iter().filter(|c| !c.is_empty())).collect();
    if !conditions.is_empty() {
        sql.push_str(" WHERE ");
        sql.push_str(&conditions.join(" AND "));
    }
    sql.push(';');
    Ok(sql)
}

/// Collapses whitespace runs, drops whitespace after commas and inside
/// parentheses, and maps double quotes to single quotes.
pub fn normalize_sql(sql: &str) -> String {
    let collapsed = sql.replace('"', "'").split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.replace(", ", ",").replace("( ", "(").replace(" )", ")")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ontology::Ontology;
    use crate::query::parse_query;
    use crate::rdf::Dataset;
    use crate::sqr::subsume_expand;
    use crate::storage::build_layout;

    fn sql(schema: &Dataset, query: &str, kind: LayoutKind) -> String {
        let o = Ontology::from_schema_canonical(schema);
        let d = build_layout(&o, &fixtures::pa_hierarchy_data().predicates(), kind);
        let e = subsume_expand(&parse_query(query).unwrap(), &o);
        emit_sql(&e, &d).unwrap()
    }

    #[test]
    fn pa_objects_vertical_partition() {
        let out = sql(&fixtures::pa_hierarchy_schema(), fixtures::PA_OBJECTS_QUERY, LayoutKind::VerticalPartition);
        assert_eq!(
            normalize_sql(&out),
            normalize_sql(
                "SELECT object FROM pa UNION (SELECT object FROM pb UNION (SELECT object FROM pc \
                 UNION (SELECT object FROM pd UNION (SELECT object FROM pe))));"
            )
        );
    }

    #[test]
    fn pa_objects_rostore() {
        let out = sql(&fixtures::pa_hierarchy_schema(), fixtures::PA_OBJECTS_QUERY, LayoutKind::RoStore);
        assert_eq!(out, "SELECT object FROM pa;");
    }

    #[test]
    fn pb_typed_rostore() {
        let out = sql(&fixtures::class_hierarchy_schema(), fixtures::PB_TYPED_QUERY, LayoutKind::RoStore);
        assert_eq!(
            normalize_sql(&out),
            normalize_sql(
                "SELECT subject, object FROM pa, type WHERE type.subject = pa.subject AND \
                 pa.property = 'pb' AND type.object IN ('ClassA','ClassB', 'ClassC');"
            )
        );
    }

    #[test]
    fn partial_property_filter_uses_in_list() {
        let out = sql(&fixtures::pa_hierarchy_schema(), "SELECT ?o WHERE { ?s :pc ?o }", LayoutKind::RoStore);
        assert_eq!(out, "SELECT object FROM pa WHERE property IN ('pc', 'pd', 'pe');");
    }

    #[test]
    fn multi_pattern_vertical_partition_uses_derived_tables() {
        let out = sql(
            &fixtures::pa_hierarchy_schema(),
            "SELECT ?s ?x WHERE { ?s :pc ?o . ?s :pf ?x }",
            LayoutKind::VerticalPartition,
        );
        assert_eq!(
            out,
            "SELECT subject, pf.object FROM (SELECT subject, object FROM pc UNION (SELECT subject, object FROM pd \
             UNION (SELECT subject, object FROM pe))) AS t1, pf WHERE pf.subject = t1.subject;"
        );
    }

    #[test]
    fn repeated_relation_gets_alias_and_constants_quoted() {
        let out = sql(
            &fixtures::pa_hierarchy_schema(),
            "SELECT ?y WHERE { <a> :pf ?x . ?x :pf ?y . ?y :pf \"it's\" }",
            LayoutKind::RoStore,
        );
        assert_eq!(
            out,
            "SELECT pf_2.object FROM pf, pf AS pf_2, pf AS pf_3 WHERE pf_2.subject = pf.object AND \
             pf_3.subject = pf_2.object AND pf.subject = 'a' AND pf_3.object = 'it''s';"
        );
    }

    #[test]
    fn self_join_within_pattern() {
        let out = sql(&fixtures::pa_hierarchy_schema(), "SELECT ?x WHERE { ?x :pf ?x . ?x :pb ?y }", LayoutKind::RoStore);
        assert_eq!(
            out,
            "SELECT subject FROM pf, pa WHERE pa.subject = pf.subject AND pf.subject = pf.object AND pa.property = 'pb';"
        );
    }

    #[test]
    fn triple_table_unsupported() {
        let o = Ontology::from_schema_canonical(&fixtures::pa_hierarchy_schema());
        let d = build_layout(&o, &fixtures::pa_hierarchy_data().predicates(), LayoutKind::TripleTable);
        let e = subsume_expand(&parse_query(fixtures::PA_OBJECTS_QUERY).unwrap(), &o);
        assert_eq!(emit_sql(&e, &d), Err(SqlError::UnsupportedLayout(LayoutKind::TripleTable)));
    }

    #[test]
    fn deterministic() {
        let a = sql(&fixtures::class_hierarchy_schema(), fixtures::PB_TYPED_QUERY, LayoutKind::VerticalPartition);
        let b = sql(&fixtures::class_hierarchy_schema(), fixtures::PB_TYPED_QUERY, LayoutKind::VerticalPartition);
        assert_eq!(a, b);
    }
}
