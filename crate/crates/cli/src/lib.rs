//! `rostore` command line: generate data, load stores, query, validate,
//! benchmark and inspect.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or query error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use rostore::bench::{bundled_workload, load_workload, run_bench, to_csv, to_json, DEFAULT_RUNS};
use rostore::conformance::check_conformance;
use rostore::datagen::{bundled_ontology_text, generate, GenConfig, DEFAULT_SEED};
use rostore::engine::{execute_plan, plan_query};
use rostore::ntriples::{parse_ntriples, serialize_ntriples};
use rostore::ontology::Ontology;
use rostore::query::{emit_sql, parse_query};
use rostore::rdf::Dataset;
use rostore::sqr::{rewrite, RewriteFlags, RewriteOutcome};
use rostore::storage::{build_layout, load_store, LayoutKind, Orientation, StoreInstance};

/// Copy of the schema kept next to a saved store, so `query` can rewrite.
pub const STORE_SCHEMA_FILE: &str = "schema.nt";

#[derive(Debug, Parser)]
#[command(name = "rostore", version, about = "RDF store with ontology-aware query rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate university data as N-Triples.
    Generate {
        #[arg(long)]
        universities: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the bundled ontology here.
        #[arg(long)]
        schema_out: Option<PathBuf>,
    },
    /// Build a store from data and schema files and save it to a directory.
    Load {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        layout: LayoutKind,
        #[arg(long, default_value = "row")]
        orientation: Orientation,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a SELECT query against a saved store.
    Query {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        no_subsume: bool,
        #[arg(long)]
        no_property_check: bool,
        #[arg(long)]
        assume_conformant: bool,
        /// Print the plan tree and metrics before the results.
        #[arg(long)]
        explain: bool,
        /// Print the SQL for the rewritten query instead of running it.
        #[arg(long)]
        emit_sql: bool,
    },
    /// Check data against the domain, range and disjointness axioms.
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
    },
    /// Run every query on every layout and orientation.
    Bench {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Directory of query files; the bundled workload when omitted.
        #[arg(long)]
        queries: Option<PathBuf>,
        /// Defaults to `manifest.txt` in the queries directory.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RUNS, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
        repeat: usize,
        /// Report file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Run cells concurrently. Timings are then not comparable.
        #[arg(long)]
        parallel: bool,
    },
    /// Describe a saved store.
    Stats {
        #[arg(long)]
        store: PathBuf,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_ntriples(path: &Path) -> Result<Dataset, Failure> {
    parse_ntriples(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Run {
    match command {
        Command::Generate { universities, seed, out: path, schema_out } => {
            let data = generate(GenConfig::new(universities, seed));
            write(&path, &serialize_ntriples(&data))?;
            if let Some(schema) = schema_out {
                write(&schema, bundled_ontology_text())?;
            }
            writeln!(out, "wrote {} triples to {}", data.len(), path.display())?;
        }
        Command::Load { data, schema, layout, orientation, out: dir } => {
            let schema_text = read(&schema)?;
            let ontology = Ontology::from_schema_canonical(
                &parse_ntriples(&schema_text).map_err(|e| Failure(format!("{}: {e}", schema.display())))?,
            );
            let data = read_ntriples(&data)?;
            let descriptor = build_layout(&ontology, &data.predicates(), layout);
            let store = load_store(&data, &descriptor, orientation)?;
            store.save(&dir)?;
            write(&dir.join(STORE_SCHEMA_FILE), &schema_text)?;
            writeln!(
                out,
                "loaded {} triples into {} relations ({layout}, {orientation}) at {}",
                store.row_count(),
                descriptor.relation_count(),
                dir.display()
            )?;
        }
        Command::Query { store, query, no_subsume, no_property_check, assume_conformant, explain, emit_sql: sql } => {
            let instance = StoreInstance::open(&store)?;
            let ontology = Ontology::from_schema_canonical(&read_ntriples(&store.join(STORE_SCHEMA_FILE))?);
            let q = parse_query(&read(&query)?).map_err(|e| Failure(format!("{}: {e}", query.display())))?;
            let flags = RewriteFlags {
                conformant: assume_conformant,
                enable_subsume: !no_subsume,
                enable_property_check: !no_property_check,
            };
            let expanded = match rewrite(&q, &ontology, flags) {
                RewriteOutcome::Rewritten { query, .. } => query,
                unsat => {
                    writeln!(out, "{}", unsat.explanation().expect("unsatisfiable outcome"))?;
                    if explain {
                        writeln!(out, "scans=0 joins=0 unions=0")?;
                    }
                    return Ok(());
                }
            };
            if sql {
                writeln!(out, "{}", emit_sql(&expanded, instance.descriptor())?)?;
                return Ok(());
            }
            let plan = plan_query(&expanded, instance.descriptor())?;
            if explain {
                write!(out, "{}", plan.explain())?;
            }
            write!(out, "{}", execute_plan(&plan, &instance))?;
        }
        Command::Validate { data, schema } => {
            let ontology = Ontology::from_schema_canonical(&read_ntriples(&schema)?);
            let data = read_ntriples(&data)?;
            let report = check_conformance(&data, &ontology);
            if !report.is_conformant() {
                for v in &report.violations {
                    writeln!(out, "{v}")?;
                }
                return Err(Failure(format!("{} conformance violations", report.violations.len())));
            }
            writeln!(out, "conformant: {} triples", data.len())?;
        }
        Command::Bench { schema, data, queries, manifest, repeat, out: path, format, parallel } => {
            let workload = match (queries, manifest) {
                (Some(dir), manifest) => {
                    let manifest = manifest.unwrap_or_else(|| dir.join("manifest.txt"));
                    load_workload(&dir, &manifest)?
                }
                (None, None) => bundled_workload(),
                (None, Some(_)) => return Err(Failure("--manifest needs --queries".into())),
            };
            let rows = run_bench(&read_ntriples(&schema)?, &read_ntriples(&data)?, &workload, repeat, parallel)?;
            let report = match format {
                Format::Csv => to_csv(&rows),
                Format::Json => to_json(&rows) + "\n",
            };
            match path {
                Some(p) => write(&p, &report)?,
                None => write!(out, "{report}")?,
            }
            let note = if parallel { "timings not comparable (parallel run)" } else { "sequential, timings comparable" };
            writeln!(err, "bench: {} cells, {repeat} runs each, {note}", rows.len())?;
        }
        Command::Stats { store } => {
            let s = StoreInstance::open(&store)?;
            writeln!(out, "layout\t{}", s.descriptor().kind)?;
            writeln!(out, "orientation\t{}", s.orientation())?;
            writeln!(out, "triples\t{}", s.row_count())?;
            writeln!(out, "terms\t{}", s.dictionary().len())?;
            writeln!(out, "relations\t{}", s.descriptor().relation_count())?;
            for r in s.relations() {
                writeln!(out, "relation\t{}\tarity={}\trows={}", r.name(), r.arity(), r.len())?;
            }
        }
    }
    Ok(())
}
