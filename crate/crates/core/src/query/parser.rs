use std::collections::BTreeMap;

use super::{PatternTerm, SelectQuery, TriplePattern};
use crate::rdf::{vocab, Iri};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("variable predicates are not supported (byte {position})")]
    VariablePredicateUnsupported { position: usize },
    #[error("projected variable ?{0} does not occur in any pattern")]
    UnboundProjection(String),
}

/// Prefixes available without a PREFIX line. The empty prefix maps to the
/// empty string, so `:pa` is the IRI `pa`.
fn builtin_prefixes() -> BTreeMap<String, String> {
    [("", ""), ("rdf", vocab::RDF), ("rdfs", vocab::RDFS), ("owl", vocab::OWL), ("xsd", vocab::XSD)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Literal(String),
    Word(String),
    Star,
    LBrace,
    RBrace,
    Dot,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { position, message: message.into() }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c == '#' {
            while it.next_if(|&(_, c)| c != '\n').is_some() {}
            continue;
        }
        let take_name = |it: &mut std::iter::Peekable<std::str::CharIndices<'_>>| {
            let mut s = String::new();
            while let Some((_, c)) = it.next_if(|&(_, c)| is_name_char(c)) {
                s.push(c);
            }
            s
        };
        let tok = match c {
            '{' => {
                it.next();
                Tok::LBrace
            }
            '}' => {
                it.next();
                Tok::RBrace
            }
            '.' => {
                it.next();
                Tok::Dot
            }
            '*' => {
                it.next();
                Tok::Star
            }
            '?' | '$' => {
                it.next();
                let name = take_name(&mut it);
                if name.is_empty() {
                    return Err(syntax(pos, "empty variable name"));
                }
                Tok::Var(name)
            }
            '<' => {
                it.next();
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some((_, '>')) => break,
                        Some((p, c)) if c.is_whitespace() || c == '<' => {
                            return Err(syntax(p, "invalid character in IRI"))
                        }
                        Some((_, c)) => s.push(c),
                        None => return Err(syntax(pos, "unterminated IRI")),
                    }
                }
                Tok::IriRef(s)
            }
            '"' => {
                it.next();
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some((_, '"')) => break,
                        Some((p, '\\')) => match it.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 'r')) => s.push('\r'),
                            Some((_, 't')) => s.push('\t'),
                            _ => return Err(syntax(p, "invalid escape in literal")),
                        },
                        Some((_, c)) => s.push(c),
                        None => return Err(syntax(pos, "unterminated literal")),
                    }
                }
                Tok::Literal(s)
            }
            c if is_name_char(c) || c == ':' => {
                let prefix = take_name(&mut it);
                if it.next_if(|&(_, c)| c == ':').is_some() {
                    Tok::PName(prefix, take_name(&mut it))
                } else {
                    Tok::Word(prefix)
                }
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    prefixes: BTreeMap<String, String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {kw}")))
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn make_iri(&self, s: String, pos: usize) -> Result<Iri, ParseError> {
        Iri::new(s).map_err(|e| syntax(pos, e.to_string()))
    }

    fn resolve(&self, prefix: &str, local: &str, pos: usize) -> Result<Iri, ParseError> {
        let base = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| ParseError::UnknownPrefix(prefix.to_string()))?;
        self.make_iri(format!("{base}{local}"), pos)
    }

    fn prologue(&mut self) -> Result<(), ParseError> {
        while self.is_keyword("PREFIX") {
            self.at += 1;
            let pos = self.pos();
            let name = match self.next() {
                Some(Tok::PName(name, local)) if local.is_empty() => name,
                _ => return Err(syntax(pos, "expected prefix name ending in ':'")),
            };
            let pos = self.pos();
            let base = match self.next() {
                Some(Tok::IriRef(base)) => base,
                _ => return Err(syntax(pos, "expected <iri> after prefix name")),
            };
            self.prefixes.insert(name, base);
        }
        Ok(())
    }

    fn term(&mut self) -> Result<PatternTerm, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Var(v)) => Ok(PatternTerm::Var(v)),
            Some(Tok::IriRef(s)) => Ok(PatternTerm::Iri(self.make_iri(s, pos)?)),
            Some(Tok::PName(p, l)) => Ok(PatternTerm::Iri(self.resolve(&p, &l, pos)?)),
            Some(Tok::Literal(s)) => Ok(PatternTerm::Literal(s)),
            _ => Err(syntax(pos, "expected a term")),
        }
    }

    fn predicate(&mut self) -> Result<Iri, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Word(w)) if w == "a" => Ok(Iri::from_static(vocab::RDF_TYPE)),
            Some(Tok::IriRef(s)) => self.make_iri(s, pos),
            Some(Tok::PName(p, l)) => self.resolve(&p, &l, pos),
            Some(Tok::Var(_)) => Err(ParseError::VariablePredicateUnsupported { position: pos }),
            _ => Err(syntax(pos, "expected a predicate")),
        }
    }

    fn pattern(&mut self) -> Result<TriplePattern, ParseError> {
        let pos = self.pos();
        let subject = self.term()?;
        if matches!(subject, PatternTerm::Literal(_)) {
            return Err(syntax(pos, "literal in subject position"));
        }
        let predicate = self.predicate()?;
        let object = self.term()?;
        Ok(TriplePattern { subject, predicate, object })
    }
}

/// Parses `[PREFIX p: <iri>]* SELECT (?v+ | *) WHERE { tp (. tp)* [.] }`.
pub fn parse_query(input: &str) -> Result<SelectQuery, ParseError> {
    let mut p = Parser { toks: tokenize(input)?, at: 0, end: input.len(), prefixes: builtin_prefixes() };
    p.prologue()?;
    p.expect_keyword("SELECT")?;

    let mut projection = Vec::new();
    let star = p.peek() == Some(&Tok::Star);
    if star {
        p.at += 1;
    } else {
        while let Some(Tok::Var(v)) = p.peek() {
            let v = v.clone();
            p.at += 1;
            if !projection.contains(&v) {
                projection.push(v);
            }
        }
        if projection.is_empty() {
            return Err(syntax(p.pos(), "expected ?variable or *"));
        }
    }

    p.expect_keyword("WHERE")?;
    p.expect(Tok::LBrace, "'{'")?;
    let mut patterns = vec![p.pattern()?];
    while let Some(Tok::Dot) = p.peek() {
        p.at += 1;
        if p.peek() == Some(&Tok::RBrace) {
            break;
        }
        patterns.push(p.pattern()?);
    }
    p.expect(Tok::RBrace, "'.' or '}'")?;
    if p.peek().is_some() {
        return Err(syntax(p.pos(), "trailing input after '}'"));
    }

    let mut q = SelectQuery { projection, patterns, prefixes: p.prefixes };
    let vars = q.variables();
    if star {
        if vars.is_empty() {
            return Err(syntax(input.len(), "SELECT * over a pattern without variables"));
        }
        q.projection = vars;
    } else if let Some(v) = q.projection.iter().find(|v| !vars.contains(v)) {
        return Err(ParseError::UnboundProjection(v.clone()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn molecule_query_two_patterns() {
        let q = parse_query(fixtures::MOLECULE_QUERY).unwrap();
        assert_eq!(q.projection, vec!["s", "o"]);
        assert_eq!(q.patterns.len(), 2);
        assert_eq!(q.patterns[0].predicate.as_str(), "diseaseContraIndication");
        assert_eq!(q.patterns[1].predicate.as_str(), vocab::RDF_TYPE);
        assert_eq!(q.patterns[1].object, PatternTerm::Iri(Iri::from_static("Molecule")));
    }

    #[test]
    fn disease_query_rewritten_one_pattern() {
        let q = parse_query(fixtures::DISEASE_QUERY_REWRITTEN).unwrap();
        assert_eq!(q.patterns.len(), 1);
    }

    #[test]
    fn variable_predicate_rejected() {
        assert!(matches!(
            parse_query("SELECT ?x WHERE {?x ?p ?y.}"),
            Err(ParseError::VariablePredicateUnsupported { position: 20 })
        ));
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_query("SELECT ?x WHERE { ?x foo:bar ?y }"),
            Err(ParseError::UnknownPrefix("foo".into()))
        );
        assert_eq!(
            parse_query("SELECT ?z WHERE { ?x :p ?y }"),
            Err(ParseError::UnboundProjection("z".into()))
        );
        assert!(matches!(parse_query("SELECT ?x WHERE { }"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_query("SELECT ?x { ?x :p ?y }"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_query("SELECT ?x WHERE { \"lit\" :p ?x }"),
            Err(ParseError::Syntax { position: 18, .. })
        ));
        assert!(matches!(parse_query("SELECT ?x WHERE { ?x :p ?y } x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn keyword_a_prefixes_and_star() {
        let q = parse_query(
            "PREFIX ub: <http://u#>\nselect * where { ?x a ub:Student . ?x ub:name \"N\" . ?x <http://u#advisor> ?y }",
        )
        .unwrap();
        assert_eq!(q.projection, vec!["x", "y"]);
        assert!(q.patterns[0].is_type_pattern());
        assert_eq!(q.patterns[0].object.as_iri().unwrap().as_str(), "http://u#Student");
        assert_eq!(q.patterns[1].object, PatternTerm::Literal("N".into()));
        assert_eq!(q.patterns[2].predicate.as_str(), "http://u#advisor");
    }

    #[test]
    fn display_round_trips_examples() {
        for text in [
            fixtures::PA_OBJECTS_QUERY,
            fixtures::PB_TYPED_QUERY,
            fixtures::MOLECULE_QUERY,
            fixtures::DISEASE_QUERY,
        ] {
            let q = parse_query(text).unwrap();
            assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        }
    }

    fn arb_term(subject: bool) -> impl Strategy<Value = PatternTerm> {
        let var = "[a-z][a-z0-9_]{0,3}".prop_map(PatternTerm::Var);
        let iri = "[a-zA-Z][a-zA-Z0-9:/#._-]{0,8}".prop_map(|s| PatternTerm::Iri(Iri::new(s).unwrap()));
        if subject {
            prop_oneof![var, iri].boxed()
        } else {
            let lit = "[ -~\t\n]{0,6}".prop_map(PatternTerm::Literal);
            prop_oneof![var, iri, lit].boxed()
        }
    }

    fn arb_query() -> impl Strategy<Value = SelectQuery> {
        let pattern = (arb_term(true), "[a-z][a-z0-9#/]{0,5}", arb_term(false))
            .prop_map(|(s, p, o)| TriplePattern::new(s, Iri::new(p).unwrap(), o));
        (proptest::collection::vec(pattern, 1..4), any::<bool>()).prop_filter_map(
            "needs a variable",
            |(patterns, all)| {
                let mut q = SelectQuery { projection: vec![], patterns, prefixes: builtin_prefixes() };
                let vars = q.variables();
                if vars.is_empty() {
                    return None;
                }
                q.projection = if all { vars } else { vars[..1].to_vec() };
                Some(q)
            },
        )
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(q in arb_query()) {
            let text = q.to_string();
            prop_assert_eq!(parse_query(&text).unwrap(), q);
        }
    }
}
