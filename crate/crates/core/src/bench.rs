//! Query workloads and the (query x layout x orientation) benchmark matrix.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::engine::{execute_plan, plan_query, PlanMetrics};
use crate::ontology::Ontology;
use crate::query::{parse_query, ParseError, SelectQuery};
use crate::rdf::Dataset;
use crate::sqr::{rewrite, RewriteFlags, RewriteOutcome};
use crate::storage::{build_layout, load_store, LayoutKind, Orientation, StorageError, StoreInstance};

pub const DEFAULT_RUNS: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("query {id}: {source}")]
    Query { id: String, source: ParseError },
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error("query {id}: {layout}/{orientation} returned {got} rows, {expected_layout}/{expected_orientation} returned {expected}")]
    RowMismatch {
        id: String,
        layout: LayoutKind,
        orientation: Orientation,
        got: usize,
        expected_layout: LayoutKind,
        expected_orientation: Orientation,
        expected: usize,
    },
    #[error("query {id}: {reason}")]
    Plan { id: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub flags: RewriteFlags,
}

/// Parses `<id> <file> <flags...>` lines; `#` starts a comment line.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, BenchError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| BenchError::Manifest { line: n + 1, reason };
        let mut words = line.split_whitespace();
        let (Some(id), Some(file)) = (words.next(), words.next()) else {
            return Err(bad("expected <id> <file> [flags]".into()));
        };
        let mut flags = RewriteFlags::default();
        for w in words {
            match w {
                "no-subsume" => flags.enable_subsume = false,
                "no-property-check" => flags.enable_property_check = false,
                "assume-conformant" => flags.conformant = true,
                other => return Err(bad(format!("unknown flag {other:?}"))),
            }
        }
        if out.iter().any(|e: &ManifestEntry| e.id == id) {
            return Err(bad(format!("duplicate query id {id}")));
        }
        out.push(ManifestEntry { id: id.to_string(), file: file.to_string(), flags });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadQuery {
    pub id: String,
    pub query: SelectQuery,
    pub flags: RewriteFlags,
}

fn parse_entry(entry: &ManifestEntry, text: &str) -> Result<WorkloadQuery, BenchError> {
    let query = parse_query(text).map_err(|source| BenchError::Query { id: entry.id.clone(), source })?;
    Ok(WorkloadQuery { id: entry.id.clone(), query, flags: entry.flags })
}

/// Reads the manifest and the query files it names (relative to `dir`).
pub fn load_workload(dir: &Path, manifest: &Path) -> Result<Vec<WorkloadQuery>, BenchError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| BenchError::Io { path: p.to_path_buf(), source })
    };
    parse_manifest(&read(manifest)?)?
        .iter()
        .map(|e| parse_entry(e, &read(&dir.join(&e.file))?))
        .collect()
}

const BUNDLED_MANIFEST: &str = include_str!("../resources/queries/manifest.txt");
const BUNDLED_QUERIES: [(&str, &str); 15] = [
    ("q1.rq", include_str!("../resources/queries/q1.rq")),
    ("q2.rq", include_str!("../resources/queries/q2.rq")),
    ("q3.rq", include_str!("../resources/queries/q3.rq")),
    ("q4.rq", include_str!("../resources/queries/q4.rq")),
    ("q5.rq", include_str!("../resources/queries/q5.rq")),
    ("q6.rq", include_str!("../resources/queries/q6.rq")),
    ("q7.rq", include_str!("../resources/queries/q7.rq")),
    ("q8.rq", include_str!("../resources/queries/q8.rq")),
    ("q9.rq", include_str!("../resources/queries/q9.rq")),
    ("q10.rq", include_str!("../resources/queries/q10.rq")),
    ("q14.rq", include_str!("../resources/queries/q14.rq")),
    ("q15.rq", include_str!("../resources/queries/q15.rq")),
    ("q16.rq", include_str!("../resources/queries/q16.rq")),
    ("q17.rq", include_str!("../resources/queries/q17.rq")),
    ("q18.rq", include_str!("../resources/queries/q18.rq")),
];

/// The shipped q1-q18 workload over the bundled ontology.
pub fn bundled_workload() -> Vec<WorkloadQuery> {
    parse_manifest(BUNDLED_MANIFEST)
        .expect("bundled manifest parses")
        .iter()
        .map(|e| {
            let (_, text) = BUNDLED_QUERIES.iter().find(|(f, _)| *f == e.file).expect("bundled file");
            parse_entry(e, text).expect("bundled query parses")
        })
        .collect()
}

/// The manifest and query files, for writing the workload to disk.
pub fn bundled_workload_files() -> Vec<(&'static str, &'static str)> {
    let mut out = vec![("manifest.txt", BUNDLED_MANIFEST)];
    out.extend(BUNDLED_QUERIES);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReportRow {
    pub query_id: String,
    pub layout: String,
    pub orientation: String,
    pub rewrite_flags: String,
    pub runs: usize,
    pub mean_ms: f64,
    pub rows: usize,
    pub relations_scanned: usize,
    pub joins: usize,
    pub unions: usize,
    pub unsat: bool,
}

pub const CSV_HEADER: &str =
    "query_id,layout,orientation,rewrite_flags,runs,mean_ms,rows,relations_scanned,joins,unions,unsat";

pub fn to_csv(rows: &[BenchReportRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.4},{},{},{},{},{}\n",
            r.query_id,
            r.layout,
            r.orientation,
            r.rewrite_flags,
            r.runs,
            r.mean_ms,
            r.rows,
            r.relations_scanned,
            r.joins,
            r.unions,
            r.unsat
        ));
    }
    out
}

pub fn to_json(rows: &[BenchReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("report rows serialize")
}

/// Result of running one query once on one store.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub rows: usize,
    pub metrics: PlanMetrics,
    pub unsat: bool,
}

/// Rewrites, plans and executes `q` on `store`. An unsatisfiable verdict
/// returns before any planning or scanning.
pub fn run_once(q: &WorkloadQuery, o: &Ontology, store: &StoreInstance) -> Result<CellRun, BenchError> {
    let expanded = match rewrite(&q.query, o, q.flags) {
        RewriteOutcome::Rewritten { query, .. } => query,
        RewriteOutcome::Unsatisfiable { .. } => {
            return Ok(CellRun { rows: 0, metrics: PlanMetrics::default(), unsat: true })
        }
    };
    let plan = plan_query(&expanded, store.descriptor())
        .map_err(|e| BenchError::Plan { id: q.id.clone(), reason: e.to_string() })?;
    let result = execute_plan(&plan, store);
    Ok(CellRun { rows: result.len(), metrics: plan.metrics(), unsat: false })
}

/// Mean wall-clock milliseconds of `runs` calls of `f`, with the last result.
pub fn timed<T>(runs: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    assert!(runs >= 1);
    let start = Instant::now();
    let mut last = f();
    for _ in 1..runs {
        last = f();
    }
    (start.elapsed().as_secs_f64() * 1000.0 / runs as f64, last)
}

/// Runs every query on every layout and orientation. Timed runs cover
/// rewriting, planning and execution. Row counts must agree across the
/// six stores of a query.
pub fn run_bench(
    schema: &Dataset,
    data: &Dataset,
    workload: &[WorkloadQuery],
    runs: usize,
    parallel: bool,
) -> Result<Vec<BenchReportRow>, BenchError> {
    let o = Ontology::from_schema_canonical(schema);
    let predicates = data.predicates();
    let mut stores = Vec::new();
    for kind in LayoutKind::ALL {
        let d = build_layout(&o, &predicates, kind);
        for orientation in Orientation::ALL {
            stores.push(load_store(data, &d, orientation)?);
        }
    }

    let cells: Vec<(&WorkloadQuery, &StoreInstance)> =
        workload.iter().flat_map(|q| stores.iter().map(move |s| (q, s))).collect();
    let run_cell = |(q, s): &(&WorkloadQuery, &StoreInstance)| -> Result<BenchReportRow, BenchError> {
        let (mean_ms, cell) = timed(runs, || run_once(q, &o, s));
        let cell = cell?;
        Ok(BenchReportRow {
            query_id: q.id.clone(),
            layout: s.descriptor().kind.short_name().to_string(),
            orientation: s.orientation().short_name().to_string(),
            rewrite_flags: q.flags.to_string(),
            runs,
            mean_ms,
            rows: cell.rows,
            relations_scanned: cell.metrics.relations_scanned,
            joins: cell.metrics.joins,
            unions: cell.metrics.unions,
            unsat: cell.unsat,
        })
    };

    let rows: Vec<BenchReportRow> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cells.iter().map(|c| scope.spawn(move || run_cell(c))).collect();
            handles.into_iter().map(|h| h.join().expect("bench cell panicked")).collect::<Result<_, _>>()
        })?
    } else {
        cells.iter().map(run_cell).collect::<Result<_, _>>()?
    };

    for chunk in rows.chunks(stores.len()) {
        let first = &chunk[0];
        for r in &chunk[1..] {
            if r.rows != first.rows {
                let parse = |row: &BenchReportRow| {
                    (row.layout.parse().expect("own name"), row.orientation.parse().expect("own name"))
                };
                let ((layout, orientation), (expected_layout, expected_orientation)) = (parse(r), parse(first));
                return Err(BenchError::RowMismatch {
                    id: r.query_id.clone(),
                    layout,
                    orientation,
                    got: r.rows,
                    expected_layout,
                    expected_orientation,
                    expected: first.rows,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{bundled_ontology, generate, GenConfig};

    #[test]
    fn manifest_parsing() {
        let m = parse_manifest("# c\nq1 a.rq no-subsume\n\nq2 b.rq assume-conformant no-property-check\n").unwrap();
        assert_eq!(m.len(), 2);
        assert!(!m[0].flags.enable_subsume && m[0].flags.enable_property_check);
        assert!(m[1].flags.conformant && !m[1].flags.enable_property_check);
        assert!(matches!(parse_manifest("q1\n"), Err(BenchError::Manifest { line: 1, .. })));
        assert!(matches!(parse_manifest("q1 a.rq fast\n"), Err(BenchError::Manifest { .. })));
        assert!(matches!(parse_manifest("q1 a.rq\nq1 b.rq\n"), Err(BenchError::Manifest { line: 2, .. })));
    }

    #[test]
    fn bundled_workload_ids() {
        let ids: Vec<String> = bundled_workload().into_iter().map(|q| q.id).collect();
        let expected = ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "q10", "q14", "q15", "q16", "q17", "q18"];
        assert_eq!(ids, expected);
    }

    #[test]
    fn every_query_but_q16_has_answers() {
        let data = generate(GenConfig::new(1, crate::datagen::DEFAULT_SEED));
        let rows = run_bench(&bundled_ontology(), &data, &bundled_workload(), 1, true).unwrap();
        assert_eq!(rows.len(), 15 * 6);
        for r in &rows {
            if r.query_id == "q16" {
                assert!(r.unsat && r.rows == 0 && r.relations_scanned == 0);
            } else {
                assert!(!r.unsat && r.rows > 0, "{} on {}/{} is empty", r.query_id, r.layout, r.orientation);
            }
        }
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().next(), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 91);
        let json: serde_json::Value = serde_json::from_str(&to_json(&rows)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 90);
    }
}
