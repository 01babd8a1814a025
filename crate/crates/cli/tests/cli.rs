use std::path::{Path, PathBuf};
use std::process::Command;

use rostore::fixtures;
use rostore::ntriples::serialize_ntriples;
use rostore::query::normalize_sql;
use rostore_cli::run_cli;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("rostore").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn bundled_query(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/queries").join(name)
}

/// Generates one university and loads it with `layout`.
fn university_store(dir: &Path, layout: &str) -> (PathBuf, PathBuf, PathBuf) {
    let (data, schema, store) = (dir.join("u1.nt"), dir.join("ub.nt"), dir.join(format!("store-{layout}")));
    let g = cli(&["generate", "--universities", "1", "--seed", "42", "--out", p(&data), "--schema-out", p(&schema)]);
    assert_eq!(g.code, 0, "{}", g.stderr);
    let l = cli(&["load", "--data", p(&data), "--schema", p(&schema), "--layout", layout, "--out", p(&store)]);
    assert_eq!(l.code, 0, "{}", l.stderr);
    (data, schema, store)
}

#[test]
fn emit_sql_and_results_on_the_pa_example() {
    let dir = tempfile::tempdir().unwrap();
    let schema = write(dir.path(), "schema.nt", &serialize_ntriples(&fixtures::pa_hierarchy_schema()));
    let data = write(dir.path(), "data.nt", &serialize_ntriples(&fixtures::pa_hierarchy_data()));
    let query = write(dir.path(), "q.rq", fixtures::PA_OBJECTS_QUERY);
    for (layout, sql) in [
        (
            "vp",
            "SELECT object FROM pa UNION (SELECT object FROM pb UNION (SELECT object FROM pc \
             UNION (SELECT object FROM pd UNION (SELECT object FROM pe))));",
        ),
        ("ro", "SELECT object FROM pa;"),
    ] {
        let store = dir.path().join(layout);
        let l = cli(&["load", "--data", p(&data), "--schema", p(&schema), "--layout", layout, "--orientation", "column", "--out", p(&store)]);
        assert_eq!(l.code, 0, "{}", l.stderr);
        let q = cli(&["query", "--store", p(&store), "--query", p(&query), "--emit-sql"]);
        assert_eq!(q.code, 0, "{}", q.stderr);
        assert_eq!(normalize_sql(&q.stdout), normalize_sql(sql));

        let q = cli(&["query", "--store", p(&store), "--query", p(&query)]);
        assert_eq!(q.stdout, "?o\n<b>\n<d>\n<f>\n<h>\n");
        let q = cli(&["query", "--store", p(&store), "--query", p(&query), "--no-subsume"]);
        assert_eq!(q.stdout, "?o\n<b>\n");
    }
}

#[test]
fn q16_is_unsat_without_scanning() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, store) = university_store(dir.path(), "ro");
    let q16 = bundled_query("q16.rq");
    let q = cli(&["query", "--store", p(&store), "--query", p(&q16), "--explain"]);
    assert_eq!(q.code, 0, "{}", q.stderr);
    let lines: Vec<&str> = q.stdout.lines().collect();
    assert!(lines[0].starts_with("UNSAT: pattern #0: "), "{}", q.stdout);
    assert!(lines[0].contains("teacherOf domain is"));
    assert_eq!(lines[1], "scans=0 joins=0 unions=0");

    // Without the check the query just runs and finds nothing.
    let q = cli(&["query", "--store", p(&store), "--query", p(&q16), "--no-property-check"]);
    assert_eq!(q.stdout, "?X\t?Y\n");
}

#[test]
fn explain_shows_the_join_elimination() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, store) = university_store(dir.path(), "vp");
    let q = bundled_query("q17.rq");
    let kept = cli(&["query", "--store", p(&store), "--query", p(&q), "--explain"]);
    let dropped = cli(&["query", "--store", p(&store), "--query", p(&q), "--explain", "--assume-conformant"]);
    assert!(kept.stdout.contains("scans=2 joins=1 unions=0"), "{}", kept.stdout);
    assert!(dropped.stdout.contains("scans=1 joins=0 unions=0"), "{}", dropped.stdout);
    let results = |s: &str| s.lines().skip_while(|l| !l.starts_with("scans=")).skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(results(&kept.stdout), results(&dropped.stdout));
    assert!(results(&kept.stdout).len() > 2);
}

#[test]
fn validate_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema, store) = university_store(dir.path(), "ro");
    let v = cli(&["validate", "--data", p(&data), "--schema", p(&schema)]);
    assert_eq!(v.code, 0, "{}", v.stderr);
    assert!(v.stdout.starts_with("conformant: "));

    let s = cli(&["stats", "--store", p(&store)]);
    assert_eq!(s.code, 0, "{}", s.stderr);
    assert!(s.stdout.starts_with("layout\tro\norientation\trow\ntriples\t1968\n"), "{}", s.stdout);
    assert!(s.stdout.contains("relation\tmemberOf\tarity=3\t"));

    let bad = write(dir.path(), "bad.nt", &serialize_ntriples(&fixtures::contraindication_data()));
    let cschema = write(dir.path(), "c.nt", &serialize_ntriples(&fixtures::contraindication_schema()));
    let v = cli(&["validate", "--data", p(&bad), "--schema", p(&cschema)]);
    assert_eq!(v.code, 2);
    assert!(v.stdout.contains("range requires Disease"), "{}", v.stdout);
    assert!(v.stderr.contains("conformance violations"));
}

#[test]
fn bench_reports_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema, _) = university_store(dir.path(), "ro");
    let queries = bundled_query("");
    let report = dir.path().join("report.csv");
    let b = cli(&[
        "bench", "--schema", p(&schema), "--data", p(&data), "--queries", p(&queries),
        "--manifest", p(&queries.join("manifest.txt")), "--repeat", "2", "--out", p(&report),
    ]);
    assert_eq!(b.code, 0, "{}", b.stderr);
    assert!(b.stderr.contains("90 cells"));
    let csv = std::fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("query_id,layout,orientation,rewrite_flags,runs,mean_ms,rows,relations_scanned,joins,unions,unsat")
    );
    let q16: Vec<&str> = lines.filter(|l| l.starts_with("q16,")).collect();
    assert_eq!(q16.len(), 6);
    for line in q16 {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[4], f[6], f[7], f[10]), ("2", "0", "0", "true"), "{line}");
    }

    let j = cli(&["bench", "--schema", p(&schema), "--data", p(&data), "--repeat", "1", "--format", "json", "--parallel"]);
    assert_eq!(j.code, 0, "{}", j.stderr);
    assert!(j.stderr.contains("not comparable"));
    assert_eq!(j.stdout.matches("\"query_id\"").count(), 90);
}

#[test]
fn usage_errors_exit_1_and_name_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["load", "--data", "x", "--schema", "y", "--out", "z"], "--layout"),
        (&["load", "--data", "x", "--schema", "y", "--layout", "columnar", "--out", "z"], "--layout"),
        (&["bench", "--schema", "x", "--data", "y", "--repeat", "0"], "--repeat"),
        (&["query", "--store", p(dir.path()), "--query", "q", "--fast"], "--fast"),
    ];
    for (args, flag) in cases {
        let o = cli(args);
        assert_eq!(o.code, 1, "{args:?}");
        assert!(o.stderr.contains(flag), "{args:?}: {}", o.stderr);
    }
    assert_eq!(cli(&[]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn data_errors_exit_2_and_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.nt");
    let o = cli(&["validate", "--data", p(&missing), "--schema", p(&missing)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains(p(&missing)), "{}", o.stderr);

    let o = cli(&["stats", "--store", p(&missing)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("nope.nt"), "{}", o.stderr);

    let garbage = write(dir.path(), "g.nt", "<a> <b> .\n");
    let o = cli(&["validate", "--data", p(&garbage), "--schema", p(&garbage)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("g.nt"), "{}", o.stderr);

    let schema = write(dir.path(), "schema.nt", &serialize_ntriples(&fixtures::pa_hierarchy_schema()));
    let data = write(dir.path(), "data.nt", &serialize_ntriples(&fixtures::pa_hierarchy_data()));
    let store = dir.path().join("tt");
    assert_eq!(cli(&["load", "--data", p(&data), "--schema", p(&schema), "--layout", "triple", "--out", p(&store)]).code, 0);
    let bad_query = write(dir.path(), "bad.rq", "SELECT ?x WHERE { ?x nope:p ?y }");
    let o = cli(&["query", "--store", p(&store), "--query", p(&bad_query)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("bad.rq") && o.stderr.contains("nope"), "{}", o.stderr);

    let q = write(dir.path(), "q.rq", fixtures::PA_OBJECTS_QUERY);
    let o = cli(&["query", "--store", p(&store), "--query", p(&q), "--emit-sql"]);
    assert_eq!(o.code, 2, "SQL is not emitted for the triple table");
}

#[test]
fn binary_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.nt");
    let status = Command::new(env!("CARGO_BIN_EXE_rostore"))
        .args(["generate", "--universities", "1", "--out", p(&out)])
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(String::from_utf8_lossy(&status.stdout).trim(), format!("wrote 1968 triples to {}", p(&out)));
    let usage = Command::new(env!("CARGO_BIN_EXE_rostore")).arg("generate").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
}
