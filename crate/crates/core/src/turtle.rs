//! Turtle serialization of provenance graphs.
//!
//! Only the subset the tracker emits is supported: `@prefix` directives,
//! IRI-reference subjects, prefixed-name predicates, `;`/`,` continuation
//! and string, integer and decimal literals. No blank nodes, collections or
//! language tags.
//!
//! Serialization is byte-deterministic: subjects are sorted by GUID,
//! predicates follow the vocabulary order and objects are sorted within a
//! predicate.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::ProvGraph;
use crate::model::{
    format_decimal, label_of, Guid, Literal, Object, Predicate, ProvNode, SubClass, SuperClass, Triple, PREFIXES,
};

pub fn serialize_turtle(g: &ProvGraph) -> String {
    let mut out = String::new();
    for (prefix, iri) in PREFIXES {
        let _ = writeln!(out, "@prefix {prefix}: <{iri}> .");
    }

    let mut records: BTreeMap<&Guid, Vec<&Triple>> = BTreeMap::new();
    for t in g.triples() {
        records.entry(&t.subject).or_default().push(t);
    }
    for (subject, mut triples) in records {
        triples.sort_by(|a, b| a.predicate.cmp(&b.predicate).then_with(|| a.object.cmp(&b.object)));
        out.push('\n');
        write_iri(&mut out, subject.as_str());
        for (i, t) in triples.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { " ;\n    " });
            out.push_str(t.predicate.prefixed());
            out.push(' ');
            write_object(&mut out, &t.object);
        }
        out.push_str(" .\n");
    }
    out
}

fn write_iri(out: &mut String, text: &str) {
    out.push('<');
    for c in text.chars() {
        match c {
            '\u{0}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('>');
}

fn write_object(out: &mut String, o: &Object) {
    match o {
        Object::Node(g) => write_iri(out, g.as_str()),
        Object::Class(c) => out.push_str(c.iri()),
        Object::Literal(Literal::Int(i)) => {
            let _ = write!(out, "{i}");
        }
        Object::Literal(Literal::Dec(d)) => out.push_str(&format_decimal(d.get())),
        Object::Literal(Literal::Str(s)) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixDirective,
    PName(String, String),
    Iri(String),
    Str(String),
    Int(i64),
    Dec(f64),
    Dot,
    Semi,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            text,
            pos: 0,
            line: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            match b {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                b'#' => {
                    while self.src.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        self.skip_ws();
        let Some(&b) = self.src.get(self.pos) else {
            return Ok(None);
        };
        let line = self.line;
        let tok = match b {
            b'.' if !self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit) => {
                self.pos += 1;
                Tok::Dot
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'<' => Tok::Iri(self.iri()?),
            b'"' => Tok::Str(self.string()?),
            b'@' => {
                let word = self.word(self.pos + 1);
                if word != "prefix" {
                    return Err(self.err(format!("unsupported directive `@{word}`")));
                }
                self.pos += 1 + word.len();
                Tok::PrefixDirective
            }
            b'+' | b'-' | b'.' | b'0'..=b'9' => self.number()?,
            _ => {
                let word = self.word(self.pos);
                let Some((prefix, local)) = word.split_once(':') else {
                    return Err(self.err(format!("unexpected `{}`", if word.is_empty() { &self.text[self.pos..self.pos + 1] } else { word })));
                };
                let tok = Tok::PName(prefix.to_owned(), local.to_owned());
                self.pos += word.len();
                tok
            }
        };
        Ok(Some((tok, line)))
    }

    fn word(&self, start: usize) -> &'a str {
        let mut end = start;
        while let Some(&b) = self.src.get(end) {
            let trailing_dot = b == b'.' && !self.src.get(end + 1).is_some_and(|n| n.is_ascii_alphanumeric() || *n == b'_');
            if b.is_ascii_whitespace() || matches!(b, b';' | b',' | b'<' | b'"' | b'#') || trailing_dot {
                break;
            }
            end += 1;
        }
        &self.text[start..end]
    }

    fn unicode_escape(&mut self, digits: usize) -> Result<char> {
        let hex = self
            .text
            .get(self.pos..self.pos + digits)
            .ok_or_else(|| self.err("truncated unicode escape"))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.err("bad unicode escape"))?;
        self.pos += digits;
        char::from_u32(code).ok_or_else(|| self.err("invalid code point"))
    }

    fn iri(&mut self) -> Result<String> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            let rest = &self.text[self.pos..];
            let c = rest.chars().next().ok_or_else(|| self.err("unterminated IRI"))?;
            self.pos += c.len_utf8();
            match c {
                '>' => return Ok(out),
                '\\' => {
                    let kind = self.src.get(self.pos).copied();
                    self.pos += 1;
                    let c = match kind {
                        Some(b'u') => self.unicode_escape(4)?,
                        Some(b'U') => self.unicode_escape(8)?,
                        _ => return Err(self.err("bad IRI escape")),
                    };
                    out.push(c);
                }
                '\n' | ' ' | '<' | '"' => return Err(self.err("illegal character in IRI")),
                c => out.push(c),
            }
        }
    }

    fn string(&mut self) -> Result<String> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            let rest = &self.text[self.pos..];
            let c = rest.chars().next().ok_or_else(|| self.err("unterminated string"))?;
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(out),
                '\n' => return Err(self.err("newline in string literal")),
                '\\' => {
                    let e = self.src.get(self.pos).copied();
                    self.pos += 1;
                    out.push(match e {
                        Some(b'"') => '"',
                        Some(b'\\') => '\\',
                        Some(b'\'') => '\'',
                        Some(b'n') => '\n',
                        Some(b'r') => '\r',
                        Some(b't') => '\t',
                        Some(b'b') => '\u{8}',
                        Some(b'f') => '\u{c}',
                        Some(b'u') => self.unicode_escape(4)?,
                        Some(b'U') => self.unicode_escape(8)?,
                        _ => return Err(self.err("bad string escape")),
                    });
                }
                c => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let mut end = start;
        if matches!(self.src.get(end), Some(b'+' | b'-')) {
            end += 1;
        }
        let mut decimal = false;
        while let Some(&b) = self.src.get(end) {
            match b {
                b'0'..=b'9' => end += 1,
                b'.' if self.src.get(end + 1).is_some_and(u8::is_ascii_digit) => {
                    decimal = true;
                    end += 1;
                }
                b'e' | b'E' => {
                    decimal = true;
                    end += 1;
                    if matches!(self.src.get(end), Some(b'+' | b'-')) {
                        end += 1;
                    }
                }
                _ => break,
            }
        }
        let text = &self.text[start..end];
        self.pos = end;
        if decimal {
            text.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Tok::Dec)
                .ok_or_else(|| self.err(format!("bad decimal `{text}`")))
        } else {
            text.parse::<i64>()
                .map(Tok::Int)
                .map_err(|_| self.err(format!("bad integer `{text}`")))
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, usize)>,
    prefixes: HashMap<String, String>,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<Option<&(Tok, usize)>> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn bump(&mut self) -> Result<Option<(Tok, usize)>> {
        self.peek()?;
        Ok(self.peeked.take())
    }

    fn expect(&mut self, what: &str) -> Result<(Tok, usize)> {
        let line = self.lexer.line;
        self.bump()?.ok_or(Error::Syntax {
            line,
            message: format!("expected {what}, found end of input"),
        })
    }

    fn resolve(&self, prefix: &str, local: &str, line: usize) -> Result<String> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| Error::UnknownPrefix {
            line,
            prefix: prefix.to_owned(),
        })?;
        Ok(format!("{ns}{local}"))
    }

    fn canonical(&self, prefix: &str, local: &str, line: usize) -> Result<String> {
        let full = self.resolve(prefix, local, line)?;
        for (p, ns) in PREFIXES {
            if let Some(l) = full.strip_prefix(ns) {
                return Ok(format!("{p}:{l}"));
            }
        }
        Ok(full)
    }

    fn object(&mut self, predicate: Predicate) -> Result<Object> {
        let (tok, line) = self.expect("object")?;
        Ok(match tok {
            Tok::Iri(s) => Object::Node(Guid::new(s).map_err(|_| Error::Syntax {
                line,
                message: "empty IRI".into(),
            })?),
            Tok::PName(p, l) => {
                let name = self.canonical(&p, &l, line)?;
                Object::Class(SuperClass::from_iri(&name).ok_or_else(|| Error::Syntax {
                    line,
                    message: format!("`{name}` is not a class IRI"),
                })?)
            }
            Tok::Str(s) => Object::Literal(Literal::Str(s)),
            Tok::Int(i) => Object::Literal(Literal::Int(i)),
            Tok::Dec(d) => Object::Literal(Literal::dec(d)?),
            other => {
                return Err(Error::Syntax {
                    line,
                    message: format!("expected object of {predicate}, found {other:?}"),
                })
            }
        })
    }

    fn statements(&mut self) -> Result<Vec<Triple>> {
        let mut out = Vec::new();
        while let Some((tok, line)) = self.bump()? {
            match tok {
                Tok::PrefixDirective => {
                    let (name, line) = self.expect("prefix name")?;
                    let Tok::PName(prefix, local) = name else {
                        return Err(Error::Syntax { line, message: "expected `name:`".into() });
                    };
                    if !local.is_empty() {
                        return Err(Error::Syntax { line, message: "expected `name:`".into() });
                    }
                    let (iri, line) = self.expect("namespace IRI")?;
                    let Tok::Iri(iri) = iri else {
                        return Err(Error::Syntax { line, message: "expected namespace IRI".into() });
                    };
                    match self.expect("`.`")? {
                        (Tok::Dot, _) => {}
                        (_, line) => return Err(Error::Syntax { line, message: "expected `.` after @prefix".into() }),
                    }
                    self.prefixes.insert(prefix, iri);
                }
                Tok::Iri(s) => {
                    let subject = Guid::new(s).map_err(|_| Error::Syntax { line, message: "empty IRI".into() })?;
                    self.record(subject, &mut out)?;
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        message: format!("expected subject IRI, found {other:?}"),
                    })
                }
            }
        }
        Ok(out)
    }

    fn record(&mut self, subject: Guid, out: &mut Vec<Triple>) -> Result<()> {
        loop {
            let (tok, line) = self.expect("predicate")?;
            let Tok::PName(p, l) = tok else {
                return Err(Error::Syntax { line, message: format!("expected predicate, found {tok:?}") });
            };
            let name = self.canonical(&p, &l, line)?;
            let predicate = Predicate::from_prefixed(&name).ok_or(Error::UnknownPredicate(name))?;
            loop {
                let object = self.object(predicate)?;
                out.push(Triple::new(subject.clone(), predicate, object));
                match self.expect("`,`, `;` or `.`")? {
                    (Tok::Comma, _) => continue,
                    (Tok::Semi, _) => {
                        // a trailing `;` before `.` is legal
                        if matches!(self.peek()?, Some((Tok::Dot, _))) {
                            self.bump()?;
                            return Ok(());
                        }
                        break;
                    }
                    (Tok::Dot, _) => return Ok(()),
                    (other, line) => {
                        return Err(Error::Syntax { line, message: format!("unexpected {other:?}") })
                    }
                }
            }
        }
    }
}

/// Parses the Turtle subset produced by [`serialize_turtle`].
pub fn parse_turtle(text: &str) -> Result<ProvGraph> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        peeked: None,
        prefixes: HashMap::new(),
    };
    let triples = parser.statements()?;

    let mut g = ProvGraph::new();
    let mut classes: HashMap<&Guid, SubClass> = HashMap::new();
    for t in &triples {
        if t.predicate == Predicate::SubClass {
            let Object::Literal(Literal::Str(name)) = &t.object else {
                return Err(Error::LiteralExpected(Predicate::SubClass));
            };
            let sub: SubClass = name.parse()?;
            if classes.insert(&t.subject, sub).is_some_and(|prev| prev != sub) {
                return Err(Error::DomainViolation {
                    predicate: Predicate::SubClass,
                    detail: format!("{} declared with two sub-classes", t.subject),
                });
            }
        }
    }
    let mut nodes: Vec<_> = classes.into_iter().collect();
    nodes.sort();
    for (guid, sub) in nodes {
        g.add_node(ProvNode::new(guid.clone(), sub, label_of(sub, guid))?)?;
    }
    for t in triples {
        g.add_triple(t)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ProvGraph {
        let mut g = ProvGraph::new();
        let ds = ProvNode::minted(SubClass::Dataset, "/Timestep_0/x y", 0, 0).unwrap();
        let act = ProvNode::minted(SubClass::Create, "H5Dcreate2", 0, 1).unwrap();
        let cfg = ProvNode::minted(SubClass::Configuration, "Batch \"B\"", 0, 0).unwrap();
        for n in [&ds, &act, &cfg] {
            g.add_node(n.clone()).unwrap();
        }
        g.add_triple(Triple::new(ds.guid.clone(), Predicate::WasCreatedBy, act.guid.clone())).unwrap();
        g.add_triple(Triple::new(act.guid.clone(), Predicate::Elapsed, Literal::Int(42))).unwrap();
        g.add_triple(Triple::new(cfg.guid.clone(), Predicate::HasValue, Literal::Int(256))).unwrap();
        g.add_triple(Triple::new(cfg.guid.clone(), Predicate::HasAccuracy, Literal::dec(0.0).unwrap())).unwrap();
        g.add_triple(Triple::new(cfg.guid.clone(), Predicate::Version, Literal::str("v3\n"))).unwrap();
        g
    }

    #[test]
    fn empty_graph_is_prefix_block() {
        let text = serialize_turtle(&ProvGraph::new());
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
        assert!(parse_turtle(&text).unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let g = sample();
        let text = serialize_turtle(&g);
        let back = parse_turtle(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(serialize_turtle(&back), text);
        assert!(text.contains("<H5Dcreate2--b0.1> prov:wasMemberOf prov:Activity ;\n    provio:subClass \"Create\" ;\n    provio:elapsed 42 ."));
        assert!(text.contains("<Batch\\u0020\\u0022B\\u0022>"));
        assert!(text.contains("provio:hasAccuracy 0.0"));
    }

    #[test]
    fn undeclared_prefix_is_error() {
        let text = "<a> zz:wasMemberOf prov:Entity .";
        assert!(matches!(parse_turtle(text), Err(Error::UnknownPrefix { line: 1, .. })));
    }

    #[test]
    fn unknown_predicate_is_error() {
        let text = "@prefix prov: <http://www.w3.org/ns/prov#> .\n<a> prov:used <b> .";
        assert!(matches!(parse_turtle(text), Err(Error::UnknownPredicate(_))));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "@prefix prov: <http://www.w3.org/ns/prov#> .\n\n<a> prov:wasMemberOf prov:Entity";
        match parse_turtle(text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alternate_prefix_names_and_commas_accepted() {
        let text = "@prefix p: <http://www.w3.org/ns/prov#> .\n@prefix io: <http://provio.dev/ns#> .\n\
                    <f> p:wasMemberOf p:Entity ; io:subClass \"File\" .\n\
                    <r--b0.1> p:wasMemberOf p:Activity ; io:subClass \"Read\" ; io:elapsed 3, 4 ; .\n\
                    <f> io:wasReadBy <r--b0.1> .";
        let g = parse_turtle(text).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.scan(None, Some(Predicate::Elapsed), None).len(), 2);
        assert_eq!(g.node(&Guid::new("r--b0.1").unwrap()).unwrap().label, "r");
    }

    #[test]
    fn dangling_reference_rejected() {
        let text = "@prefix prov: <http://www.w3.org/ns/prov#> .\n@prefix provio: <http://provio.dev/ns#> .\n\
                    <f> prov:wasMemberOf prov:Entity ; provio:subClass \"File\" ; provio:wasReadBy <nope> .";
        assert!(matches!(parse_turtle(text), Err(Error::UnknownGuid(_))));
    }
}
