//! Deterministic university-domain data.
//!
//! Every entity draws from its own ChaCha8 stream (seed plus an entity
//! key), so the output does not depend on generation order.

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ntriples::parse_ntriples;
use crate::rdf::{vocab, Dataset, Iri, Term, Triple};

pub const UB: &str = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
pub const DEFAULT_SEED: u64 = 42;

const ONTOLOGY_NT: &str = include_str!("../resources/univ-bench.nt");

/// The bundled university ontology as schema triples.
pub fn bundled_ontology() -> Dataset {
    parse_ntriples(ONTOLOGY_NT).expect("bundled ontology parses")
}

/// The bundled ontology as N-Triples text.
pub fn bundled_ontology_text() -> &'static str {
    ONTOLOGY_NT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub universities: u32,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(universities: u32, seed: u64) -> Self {
        assert!(universities >= 1, "at least one university");
        Self { universities, seed }
    }
}

#[derive(Clone, Copy)]
enum Stream {
    University = 1,
    Department,
    Faculty,
    Staff,
    Undergraduate,
    Graduate,
}

fn rng(seed: u64, u: u32, d: u32, kind: Stream, i: u32) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((u as u64) << 44) | ((d as u64) << 32) | ((kind as u64) << 24) | i as u64);
    r
}

fn ub(local: &str) -> Iri {
    Iri::new(format!("{UB}{local}")).expect("valid IRI")
}

fn university_iri(u: u32) -> Iri {
    Iri::new(format!("http://www.University{u}.edu")).expect("valid IRI")
}

struct Out {
    data: Dataset,
    rdf_type: Iri,
}

impl Out {
    fn add(&mut self, s: &Iri, p: &str, o: &Iri) {
        self.data.insert(Triple::new(s.clone(), ub(p), Term::Iri(o.clone())));
    }

    fn lit(&mut self, s: &Iri, p: &str, value: String) {
        self.data.insert(Triple::new(s.clone(), ub(p), Term::Literal(value)));
    }

    fn typed(&mut self, s: &Iri, class: &str) {
        self.data.insert(Triple::new(s.clone(), self.rdf_type.clone(), Term::Iri(ub(class))));
    }

    /// name, emailAddress and telephone.
    fn contact(&mut self, s: &Iri, name: &str, host: &str, r: &mut ChaCha8Rng) {
        self.lit(s, "name", name.to_string());
        self.lit(s, "emailAddress", format!("{name}@{host}"));
        let phone = format!("{:03}-{:03}-{:04}", r.random_range(0..1000), r.random_range(0..1000), r.random_range(0..10000));
        self.lit(s, "telephone", phone);
    }
}

const FACULTY_KINDS: [&str; 4] = ["FullProfessor", "AssociateProfessor", "AssistantProfessor", "Lecturer"];
const PUBLICATION_KINDS: [&str; 4] = ["JournalArticle", "ConferencePaper", "TechnicalReport", "Book"];

/// Generates the dataset for `config`.
pub fn generate(config: GenConfig) -> Dataset {
    let mut out = Out { data: Dataset::new(), rdf_type: Iri::from_static(vocab::RDF_TYPE) };
    for u in 0..config.universities {
        generate_university(&mut out, config, u);
    }
    out.data
}

fn generate_university(out: &mut Out, config: GenConfig, u: u32) {
    let seed = config.seed;
    let univ = university_iri(u);
    out.typed(&univ, "University");
    out.lit(&univ, "name", format!("University{u}"));
    let some_university = |r: &mut ChaCha8Rng| university_iri(r.random_range(0..config.universities));

    // 3 to 7, centred on 5 so one university is close to the average size
    let mut r = rng(seed, u, 0, Stream::University, 0);
    let departments = 3 + (0..4).map(|_| r.random_range(0..=1u32)).sum::<u32>();
    for d in 0..departments {
        let host = format!("Department{d}.University{u}.edu");
        let dept = Iri::new(format!("http://www.{host}")).expect("valid IRI");
        let at = |local: String| Iri::new(format!("http://www.{host}/{local}")).expect("valid IRI");
        out.typed(&dept, "Department");
        out.add(&dept, "subOrganizationOf", &univ);
        out.lit(&dept, "name", format!("Department{d}"));

        let mut r = rng(seed, u, d, Stream::Department, 0);
        let n_faculty = r.random_range(7..=14);
        let n_courses = r.random_range(6..=10);
        let n_grad_courses = r.random_range(2..=4);
        let n_staff = r.random_range(2..=4);
        let n_undergrad = r.random_range(10..=20);
        let n_grad = r.random_range(5..=10);

        // faculty: the first three are one of each professor rank
        let mut counters = [0u32; 4];
        let mut faculty = Vec::new();
        let mut professors = Vec::new();
        for f in 0..n_faculty {
            let mut r = rng(seed, u, d, Stream::Faculty, f);
            let kind = if f < 3 { f as usize } else { r.random_range(0..FACULTY_KINDS.len()) };
            let name = format!("{}{}", FACULTY_KINDS[kind], counters[kind]);
            counters[kind] += 1;
            let iri = at(name.clone());
            out.typed(&iri, FACULTY_KINDS[kind]);
            out.add(&iri, if f == 0 { "headOf" } else { "worksFor" }, &dept);
            out.contact(&iri, &name, &host, &mut r);
            out.add(&iri, "undergraduateDegreeFrom", &some_university(&mut r));
            out.add(&iri, "mastersDegreeFrom", &some_university(&mut r));
            if kind != 3 {
                out.add(&iri, "doctoralDegreeFrom", &some_university(&mut r));
                professors.push(iri.clone());
            }
            for k in 0..r.random_range(1..=5) {
                let publication = at(format!("{name}/Publication{k}"));
                out.typed(&publication, PUBLICATION_KINDS.choose(&mut r).expect("non-empty"));
                out.add(&publication, "publicationAuthor", &iri);
                out.lit(&publication, "name", format!("Publication{k}"));
            }
            faculty.push(iri);
        }

        let courses: Vec<Iri> = (0..n_courses).map(|i| at(format!("Course{i}"))).collect();
        let grad_courses: Vec<Iri> = (0..n_grad_courses).map(|i| at(format!("GraduateCourse{i}"))).collect();
        for (i, c) in courses.iter().enumerate() {
            out.typed(c, "Course");
            out.lit(c, "name", format!("Course{i}"));
            out.add(&faculty[i % faculty.len()], "teacherOf", c);
        }
        // graduate courses are taught by professors
        let mut grad_teacher = Vec::new();
        for (i, c) in grad_courses.iter().enumerate() {
            out.typed(c, "GraduateCourse");
            out.lit(c, "name", format!("GraduateCourse{i}"));
            let t = &professors[i % professors.len()];
            out.add(t, "teacherOf", c);
            grad_teacher.push(t.clone());
        }

        for s in 0..n_staff {
            let mut r = rng(seed, u, d, Stream::Staff, s);
            let name = format!("AdministrativeStaff{s}");
            let iri = at(name.clone());
            out.typed(&iri, "AdministrativeStaff");
            out.add(&iri, "worksFor", &dept);
            out.contact(&iri, &name, &host, &mut r);
        }

        for s in 0..n_undergrad {
            let mut r = rng(seed, u, d, Stream::Undergraduate, s);
            let name = format!("UndergraduateStudent{s}");
            let iri = at(name.clone());
            out.typed(&iri, "UndergraduateStudent");
            out.add(&iri, "memberOf", &dept);
            out.contact(&iri, &name, &host, &mut r);
            let first = s as usize % courses.len();
            out.add(&iri, "takesCourse", &courses[first]);
            let extra = r.random_range(0..=3);
            for c in index::sample(&mut r, courses.len(), extra) {
                out.add(&iri, "takesCourse", &courses[c]);
            }
        }

        for s in 0..n_grad {
            let mut r = rng(seed, u, d, Stream::Graduate, s);
            let name = format!("GraduateStudent{s}");
            let iri = at(name.clone());
            out.typed(&iri, "GraduateStudent");
            out.add(&iri, "memberOf", &dept);
            out.contact(&iri, &name, &host, &mut r);
            let first = s as usize % grad_courses.len();
            out.add(&iri, "takesCourse", &grad_courses[first]);
            let extra = r.random_range(0..=3).min(grad_courses.len());
            for c in index::sample(&mut r, grad_courses.len(), extra) {
                out.add(&iri, "takesCourse", &grad_courses[c]);
            }
            // every other student is advised by the teacher of their first course
            let advisor =
                if s % 2 == 0 { grad_teacher[first].clone() } else { professors.choose(&mut r).expect("non-empty").clone() };
            out.add(&iri, "advisor", &advisor);
            out.add(&iri, "undergraduateDegreeFrom", &some_university(&mut r));
        }
    }
}
