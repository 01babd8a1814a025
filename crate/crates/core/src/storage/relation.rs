use std::cmp::Ordering;
use std::ops::Range;

use crate::rdf::TermId;

use super::{Orientation, StorageError};

/// One stored fact. For two-column relations `property` is the relation's
/// fixed predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub subject: TermId,
    pub object: TermId,
    pub property: TermId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Subject,
    Object,
}

#[derive(Debug, Clone, Default)]
pub struct ScanOutput {
    pub rows: Vec<Tuple>,
    /// Rows examined to produce `rows`.
    pub touched: usize,
}

#[derive(Debug, Clone)]
enum Storage {
    Rows {
        rows: Vec<Tuple>,
        /// Positions ordered by (subject, object, property); three-column only.
        by_subject: Vec<u32>,
        /// Positions ordered by (object, subject, property); three-column only.
        by_object: Vec<u32>,
    },
    Columns {
        subject: Vec<TermId>,
        object: Vec<TermId>,
        /// Empty for two-column relations.
        property: Vec<TermId>,
    },
}

/// A sealed relation. Two-column relations iterate in (subject, object)
/// order, three-column ones in (property, subject, object) order.
#[derive(Debug, Clone)]
pub struct Relation {
    name: String,
    arity: u8,
    fixed_property: Option<TermId>,
    storage: Storage,
}

fn sort_key(arity: u8, t: &Tuple) -> (TermId, TermId, TermId) {
    if arity == 3 {
        (t.property, t.subject, t.object)
    } else {
        (t.subject, t.object, t.property)
    }
}

/// First index in `range` for which `before` is false.
fn partition(range: Range<usize>, before: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (range.start, range.end);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if before(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn equal_range(range: Range<usize>, cmp: impl Fn(usize) -> Ordering) -> Range<usize> {
    let start = partition(range.clone(), |i| cmp(i) == Ordering::Less);
    let end = partition(start..range.end, |i| cmp(i) != Ordering::Greater);
    start..end
}

impl Relation {
    /// Sorts and deduplicates `tuples` into the requested orientation.
    pub fn build(
        name: impl Into<String>,
        arity: u8,
        fixed_property: Option<TermId>,
        mut tuples: Vec<Tuple>,
        orientation: Orientation,
    ) -> Self {
        assert!(arity == 2 || arity == 3, "arity must be 2 or 3");
        tuples.sort_unstable_by_key(|t| sort_key(arity, t));
        tuples.dedup();
        let storage = match orientation {
            Orientation::Row => {
                let (mut by_subject, mut by_object) = (Vec::new(), Vec::new());
                if arity == 3 {
                    by_subject = (0..tuples.len() as u32).collect();
                    by_subject.sort_unstable_by_key(|&i| {
                        let t = &tuples[i as usize];
                        (t.subject, t.object, t.property)
                    });
                    by_object = (0..tuples.len() as u32).collect();
                    by_object.sort_unstable_by_key(|&i| {
                        let t = &tuples[i as usize];
                        (t.object, t.subject, t.property)
                    });
                }
                Storage::Rows { rows: tuples, by_subject, by_object }
            }
            Orientation::Column => Storage::Columns {
                subject: tuples.iter().map(|t| t.subject).collect(),
                object: tuples.iter().map(|t| t.object).collect(),
                property: if arity == 3 { tuples.iter().map(|t| t.property).collect() } else { Vec::new() },
            },
        };
        Self { name: name.into(), arity, fixed_property, storage }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn fixed_property(&self) -> Option<TermId> {
        self.fixed_property
    }

    pub fn orientation(&self) -> Orientation {
        match self.storage {
            Storage::Rows { .. } => Orientation::Row,
            Storage::Columns { .. } => Orientation::Column,
        }
    }

    pub fn len(&self) -> usize {
        match &self.storage {
            Storage::Rows { rows, .. } => rows.len(),
            Storage::Columns { subject, .. } => subject.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> Tuple {
        match &self.storage {
            Storage::Rows { rows, .. } => rows[i],
            Storage::Columns { subject, object, property } => Tuple {
                subject: subject[i],
                object: object[i],
                property: property
                    .get(i)
                    .copied()
                    .or(self.fixed_property)
                    .expect("two-column relation with rows has a fixed property"),
            },
        }
    }

    fn subject_at(&self, i: usize) -> TermId {
        match &self.storage {
            Storage::Rows { rows, .. } => rows[i].subject,
            Storage::Columns { subject, .. } => subject[i],
        }
    }

    fn property_at(&self, i: usize) -> TermId {
        match &self.storage {
            Storage::Rows { rows, .. } => rows[i].property,
            Storage::Columns { property, .. } => property[i],
        }
    }

    /// Iterates the whole relation in its clustered order.
    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Scans the relation. `property_filter` must be sorted and is only
    /// valid on three-column relations. Ranges are located by binary search
    /// wherever the clustered order (or, for row-oriented three-column
    /// relations, a secondary index) allows it.
    pub fn scan(
        &self,
        property_filter: Option<&[TermId]>,
        bound: Option<(Position, TermId)>,
    ) -> Result<ScanOutput, StorageError> {
        let mut out = ScanOutput::default();
        if self.arity == 2 {
            if property_filter.is_some() {
                return Err(StorageError::FilterOnTwoColumnRelation(self.name.clone()));
            }
            self.scan_range(0..self.len(), true, bound, &mut out);
            return Ok(out);
        }

        match property_filter {
            Some(props) => {
                for &p in props {
                    let range = equal_range(0..self.len(), |i| self.property_at(i).cmp(&p));
                    self.scan_range(range, true, bound, &mut out);
                }
            }
            None => match (&self.storage, bound) {
                (Storage::Rows { rows, by_subject, by_object }, Some((pos, id))) => {
                    let index = match pos {
                        Position::Subject => by_subject,
                        Position::Object => by_object,
                    };
                    let key = |i: usize| {
                        let t = &rows[index[i] as usize];
                        match pos {
                            Position::Subject => t.subject,
                            Position::Object => t.object,
                        }
                    };
                    let range = equal_range(0..index.len(), |i| key(i).cmp(&id));
                    out.touched += range.len();
                    out.rows.extend(range.map(|i| rows[index[i] as usize]));
                }
                // clustered by property first, so subjects are not ordered
                _ => self.scan_range(0..self.len(), false, bound, &mut out),
            },
        }
        Ok(out)
    }

    /// Scans a contiguous range; `subject_sorted` enables binary search on
    /// a subject bound.
    fn scan_range(
        &self,
        range: Range<usize>,
        subject_sorted: bool,
        bound: Option<(Position, TermId)>,
        out: &mut ScanOutput,
    ) {
        match bound {
            Some((Position::Subject, id)) if subject_sorted => {
                let range = equal_range(range, |i| self.subject_at(i).cmp(&id));
                out.touched += range.len();
                out.rows.extend(range.map(|i| self.get(i)));
            }
            Some((pos, id)) => {
                out.touched += range.len();
                out.rows.extend(range.map(|i| self.get(i)).filter(|t| match pos {
                    Position::Subject => t.subject == id,
                    Position::Object => t.object == id,
                }));
            }
            None => {
                out.touched += range.len();
                out.rows.extend(range.map(|i| self.get(i)));
            }
        }
    }

    /// Row-major (Row orientation) or column-major (Column orientation) ids.
    pub(crate) fn raw_ids(&self) -> Vec<u64> {
        match &self.storage {
            Storage::Rows { rows, .. } => {
                let mut out = Vec::with_capacity(rows.len() * self.arity as usize);
                for t in rows {
                    out.push(t.subject.0);
                    out.push(t.object.0);
                    if self.arity == 3 {
                        out.push(t.property.0);
                    }
                }
                out
            }
            Storage::Columns { subject, object, property } => subject
                .iter()
                .chain(object)
                .chain(property)
                .map(|id| id.0)
                .collect(),
        }
    }
}
