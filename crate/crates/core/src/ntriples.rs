//! Line-based N-Triples subset: IRIs and plain literals only.
//!
//! Each statement is `<s> <p> <o> .` or `<s> <p> "o" .`. Lines starting with
//! `#` at column 0 are comments, blank lines are skipped.

use crate::rdf::{Dataset, Iri, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NTriplesError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}

/// Parses the whole input; any malformed line fails the parse.
pub fn parse_ntriples(input: &str) -> Result<Dataset, NTriplesError> {
    let mut data = Dataset::new();
    for (idx, line) in input.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let triple = parse_line(line).map_err(|reason| NTriplesError::MalformedLine {
            line: idx + 1,
            reason,
        })?;
        data.insert(triple);
    }
    Ok(data)
}

/// One line per triple in (subject, predicate, object) order.
pub fn serialize_ntriples(data: &Dataset) -> String {
    let mut out = String::new();
    for t in data {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) -> bool {
        let trimmed = self.rest.trim_start_matches([' ', '\t']);
        let skipped = trimmed.len() != self.rest.len();
        self.rest = trimmed;
        skipped
    }

    fn iri(&mut self, what: &str) -> Result<Iri, String> {
        let Some(body) = self.rest.strip_prefix('<') else {
            return Err(format!("expected IRI for {what}"));
        };
        let end = body.find('>').ok_or_else(|| format!("unterminated IRI for {what}"))?;
        let iri = Iri::new(&body[..end]).map_err(|e| e.to_string())?;
        self.rest = &body[end + 1..];
        Ok(iri)
    }

    fn literal(&mut self) -> Result<String, String> {
        let body = &self.rest[1..];
        let mut out = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &body[i + 1..];
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, '"')) => out.push('"'),
                    Some((_, '\\')) => out.push('\\'),
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 'r')) => out.push('\r'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, other)) => return Err(format!("unsupported escape \\{other}")),
                    None => return Err("dangling escape".into()),
                },
                c => out.push(c),
            }
        }
        Err("unterminated literal".into())
    }
}

fn parse_line(line: &str) -> Result<Triple, String> {
    let mut cur = Cursor { rest: line };
    cur.skip_ws();
    let subject = cur.iri("subject")?;
    if !cur.skip_ws() {
        return Err("expected whitespace after subject".into());
    }
    let predicate = cur.iri("predicate")?;
    if !cur.skip_ws() {
        return Err("expected whitespace after predicate".into());
    }
    let object = match cur.rest.chars().next() {
        Some('<') => Term::Iri(cur.iri("object")?),
        Some('"') => {
            let lit = cur.literal()?;
            if cur.rest.starts_with("^^") || cur.rest.starts_with('@') {
                return Err("typed and language-tagged literals are not supported".into());
            }
            Term::Literal(lit)
        }
        Some('_') => return Err("blank nodes are not supported".into()),
        _ => return Err("expected IRI or literal for object".into()),
    };
    cur.skip_ws();
    let Some(rest) = cur.rest.strip_prefix('.') else {
        return Err("missing terminating '.'".into());
    };
    if !rest.trim().is_empty() {
        return Err(format!("trailing content after '.': {:?}", rest.trim()));
    }
    Ok(Triple { subject, predicate, object })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn parses_single_row() {
        let d = parse_ntriples("<a> <pa> <b> .").unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.contains(&Triple::iris("a", "pa", "b")));
    }

    #[test]
    fn empty_input() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert_eq!(serialize_ntriples(&Dataset::new()), "");
    }

    #[test]
    fn repeated_line_collapses() {
        let d = parse_ntriples("<a> <pa> <b> .\n<a> <pa> <b> .\n").unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn comments_and_blank_lines() {
        let d = parse_ntriples("# header\n\n   \n<a> <p> \"x y\" .\n").unwrap();
        assert!(d.contains(&Triple::new(
            Iri::from_static("a"),
            Iri::from_static("p"),
            Term::literal("x y")
        )));
    }

    #[test]
    fn serialize_single() {
        let d: Dataset = [Triple::iris("a", "pa", "b")].into_iter().collect();
        assert_eq!(serialize_ntriples(&d), "<a> <pa> <b> .\n");
    }

    #[test]
    fn pa_hierarchy_round_trip() {
        let d = fixtures::pa_hierarchy_data();
        assert_eq!(parse_ntriples(&serialize_ntriples(&d)).unwrap(), d);
    }

    #[test]
    fn error_line_numbers_are_one_based() {
        let input = "<a> <p> <b> .\n# c\n<a> <p> <b>\n";
        assert_eq!(
            parse_ntriples(input).unwrap_err(),
            NTriplesError::MalformedLine { line: 3, reason: "missing terminating '.'".into() }
        );
    }

    #[test]
    fn rejects_unsupported_syntax() {
        for bad in [
            "<a> <p> _:b .",
            "<a> <p> \"x\"@en .",
            "<a> <p> \"x\"^^<http://www.w3.org/2001/XMLSchema#string> .",
            "\"a\" <p> <b> .",
            "<a> \"p\" <b> .",
            "<a><p><b> .",
            "<a> <p> <b> . extra",
            "<a> <p> \"unterminated .",
            "<> <p> <b> .",
            " # indented comment is not a comment",
        ] {
            assert!(parse_ntriples(bad).is_err(), "{bad}");
        }
    }

    fn arb_iri() -> impl Strategy<Value = Iri> {
        "[a-zA-Z0-9:/#._-]{1,12}".prop_map(|s| Iri::new(s).unwrap())
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            arb_iri().prop_map(Term::Iri),
            any::<String>().prop_map(Term::Literal),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(triples in proptest::collection::vec((arb_iri(), arb_iri(), arb_term()), 0..20)) {
            let d: Dataset = triples.into_iter().map(|(s, p, o)| Triple::new(s, p, o)).collect();
            let text = serialize_ntriples(&d);
            prop_assert_eq!(parse_ntriples(&text).unwrap(), d);
        }
    }
}
