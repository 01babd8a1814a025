//! On-disk store directory:
//!
//! * `layout.json`: kind, orientation, relation list and predicate routing
//! * `dictionary.tsv`: `id TAB lexical TAB kind`, one term per line
//! * `rel_<name>.bin`: 16-byte header (`ROST`, version u16, arity u16,
//!   row count u64, little-endian) then u64 ids, row-major for row stores
//!   and column-major for column stores

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{LayoutDescriptor, Orientation, Relation, StorageError, StoreInstance, Tuple};
use crate::rdf::{Iri, Term, TermDictionary, TermId};

const MAGIC: &[u8; 4] = b"ROST";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

pub const MANIFEST_FILE: &str = "layout.json";
pub const DICTIONARY_FILE: &str = "dictionary.tsv";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    kind: super::LayoutKind,
    orientation: Orientation,
    relations: Vec<ManifestRelation>,
    descriptor: LayoutDescriptor,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestRelation {
    name: String,
    arity: u8,
    rows: u64,
    file: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StorageError + '_ {
    move |source| StorageError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, reason: impl Into<String>) -> StorageError {
    StorageError::Format { path: path.to_path_buf(), reason: reason.into() }
}

fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        });
    }
    Some(out)
}

fn relation_file(name: &str) -> String {
    format!("rel_{name}.bin")
}

impl StoreInstance {
    /// Writes the store into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<(), StorageError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;

        let mut dict = String::new();
        for (id, term) in self.dictionary().terms() {
            dict.push_str(&format!("{}\t{}\t{}\n", id.0, escape_field(term.lexical()), term.kind().as_str()));
        }
        let path = dir.join(DICTIONARY_FILE);
        fs::write(&path, dict).map_err(io_err(&path))?;

        let mut entries = Vec::new();
        for rel in self.relations() {
            let file = relation_file(rel.name());
            let ids = rel.raw_ids();
            let mut bytes = Vec::with_capacity(HEADER_LEN + ids.len() * 8);
            bytes.extend_from_slice(MAGIC);
            bytes.extend_from_slice(&VERSION.to_le_bytes());
            bytes.extend_from_slice(&u16::from(rel.arity()).to_le_bytes());
            bytes.extend_from_slice(&(rel.len() as u64).to_le_bytes());
            for id in ids {
                bytes.extend_from_slice(&id.to_le_bytes());
            }
            let path = dir.join(&file);
            fs::write(&path, bytes).map_err(io_err(&path))?;
            entries.push(ManifestRelation {
                name: rel.name().to_string(),
                arity: rel.arity(),
                rows: rel.len() as u64,
                file,
            });
        }

        let manifest = Manifest {
            kind: self.descriptor().kind,
            orientation: self.orientation(),
            relations: entries,
            descriptor: self.descriptor().clone(),
        };
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(())
    }

    /// Opens a store previously written by [`StoreInstance::save`].
    pub fn open(dir: &Path) -> Result<Self, StorageError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| format_err(&path, e.to_string()))?;

        let path = dir.join(DICTIONARY_FILE);
        let dictionary = read_dictionary(&path)?;

        let mut relations = BTreeMap::new();
        for entry in &manifest.relations {
            let spec = manifest
                .descriptor
                .relation(&entry.name)
                .ok_or_else(|| format_err(&dir.join(MANIFEST_FILE), format!("unknown relation {}", entry.name)))?;
            let path: PathBuf = dir.join(&entry.file);
            let fixed = spec.fixed_property().and_then(|p| dictionary.encode_iri(p));
            let tuples = read_relation(&path, entry.arity, manifest.orientation, fixed)?;
            if tuples.len() as u64 != entry.rows {
                return Err(format_err(&path, "row count disagrees with manifest"));
            }
            let rel = Relation::build(entry.name.clone(), entry.arity, fixed, tuples, manifest.orientation);
            relations.insert(entry.name.clone(), rel);
        }
        Ok(StoreInstance::from_parts(manifest.descriptor, manifest.orientation, relations, dictionary))
    }
}

fn read_dictionary(path: &Path) -> Result<TermDictionary, StorageError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut terms = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let bad = |why: &str| format_err(path, format!("line {}: {why}", n + 1));
        let mut fields = line.split('\t');
        let (Some(id), Some(lexical), Some(kind), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad("expected three tab-separated fields"));
        };
        if id.parse::<usize>().ok() != Some(terms.len()) {
            return Err(bad("ids must be dense and in order"));
        }
        let lexical = unescape_field(lexical).ok_or_else(|| bad("bad escape"))?;
        let term = match kind {
            "iri" => Term::Iri(Iri::new(lexical).map_err(|e| bad(&e.to_string()))?),
            "literal" => Term::Literal(lexical),
            _ => return Err(bad("kind must be iri or literal")),
        };
        terms.push(term);
    }
    Ok(TermDictionary::from_terms(terms))
}

fn read_relation(
    path: &Path,
    arity: u8,
    orientation: Orientation,
    fixed: Option<TermId>,
) -> Result<Vec<Tuple>, StorageError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(format_err(path, "missing ROST header"));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    if u16_at(4) != VERSION {
        return Err(format_err(path, format!("unsupported version {}", u16_at(4))));
    }
    if u16_at(6) != u16::from(arity) {
        return Err(format_err(path, "arity disagrees with manifest"));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let width = arity as usize;
    if bytes.len() != HEADER_LEN + rows * width * 8 {
        return Err(format_err(path, "file length disagrees with header"));
    }
    let ids: Vec<TermId> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| TermId(u64::from_le_bytes(c.try_into().expect("8 bytes"))))
        .collect();
    let at = |row: usize, col: usize| match orientation {
        Orientation::Row => ids[row * width + col],
        Orientation::Column => ids[col * rows + row],
    };
    let mut tuples = Vec::with_capacity(rows);
    for r in 0..rows {
        let property = if width == 3 {
            at(r, 2)
        } else {
            fixed.ok_or_else(|| format_err(path, "rows stored for a predicate missing from the dictionary"))?
        };
        tuples.push(Tuple { subject: at(r, 0), object: at(r, 1), property });
    }
    Ok(tuples)
}
