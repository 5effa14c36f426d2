//! Parser for the supported query subset:
//!
//! ```text
//! [PREFIX p: <iri>]*
//! SELECT [DISTINCT] (?v ... | *) WHERE { pattern ( ; | , | . ) ... [FILTER(?v op number)]* }
//! ```

use std::collections::HashMap;

use super::{Comparator, Filter, Query, Term, TriplePattern};
use crate::error::{Error, Result};
use crate::model::{Guid, Literal, Predicate, SuperClass, PREFIXES};

pub fn parse_query(text: &str) -> Result<Query> {
    Parser::new(text).query()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    /// declared prefix -> canonical prefix
    prefixes: HashMap<String, String>,
}

const UNSUPPORTED: [&str; 8] = ["OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "ORDER"];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        let prefixes = PREFIXES.iter().map(|(p, _)| (p.to_string(), p.to_string())).collect();
        Parser { src, pos: 0, prefixes }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::QuerySyntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let trimmed = r.trim_start();
            self.pos += r.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    /// Next bare word (letters, digits, `_`, `-`, `:`, `.` inside).
    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let r = self.rest();
        let mut end = 0;
        for (i, c) in r.char_indices() {
            let ok = c.is_alphanumeric() || matches!(c, '_' | '-' | ':') || (c == '.' && i > 0 && r[i + 1..].starts_with(|n: char| n.is_alphanumeric() || n == '_'));
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        self.pos += end;
        &r[..end]
    }

    fn peek_keyword(&mut self) -> Option<String> {
        self.skip_ws();
        let r = self.rest();
        let end = r.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(r.len());
        (end > 0).then(|| r[..end].to_ascii_uppercase())
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek_keyword() {
            Some(k) if k == kw => {
                self.pos += kw.len();
                Ok(())
            }
            _ => self.err(format!("expected {kw}")),
        }
    }

    fn reject_unsupported(&mut self) -> Result<()> {
        if let Some(k) = self.peek_keyword() {
            if UNSUPPORTED.contains(&k.as_str()) {
                return Err(Error::UnsupportedFeature(format!("{k} at offset {}", self.pos)));
            }
        }
        Ok(())
    }

    fn query(mut self) -> Result<Query> {
        while self.peek_keyword().as_deref() == Some("PREFIX") {
            self.pos += "PREFIX".len();
            self.prefix_decl()?;
        }
        self.keyword("SELECT")?;
        if self.peek_keyword().as_deref() == Some("DISTINCT") {
            self.pos += "DISTINCT".len();
        }
        let mut select = Vec::new();
        let mut star = false;
        if self.eat('*') {
            star = true;
        } else {
            while self.peek() == Some('?') {
                select.push(self.variable()?);
            }
            if select.is_empty() {
                return self.err("expected a variable or `*` after SELECT");
            }
        }
        self.keyword("WHERE")?;
        self.expect('{')?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            self.reject_unsupported()?;
            match self.peek() {
                None => return self.err("unterminated WHERE block"),
                Some('}') => {
                    self.pos += 1;
                    break;
                }
                Some('.') => {
                    self.pos += 1;
                }
                Some('{') => return Err(Error::UnsupportedFeature(format!("nested group at offset {}", self.pos))),
                _ if self.peek_keyword().as_deref() == Some("FILTER") => {
                    self.pos += "FILTER".len();
                    filters.push(self.filter()?);
                }
                _ => self.subject_block(&mut patterns)?,
            }
        }
        self.reject_unsupported()?;
        if self.peek().is_some() {
            return self.err("unexpected text after WHERE block");
        }
        if patterns.is_empty() {
            return Err(Error::QuerySyntax {
                pos: self.pos,
                message: "empty WHERE block".into(),
            });
        }
        let mut q = Query {
            select,
            patterns,
            filters,
        };
        let bound = q.pattern_vars();
        if star {
            q.select = bound.clone();
        }
        for v in q.select.iter().chain(q.filters.iter().map(|f| &f.var)) {
            if !bound.contains(v) {
                return Err(Error::UnboundVariable(v.clone()));
            }
        }
        Ok(q)
    }

    fn prefix_decl(&mut self) -> Result<()> {
        let name = self.word();
        let Some(name) = name.strip_suffix(':') else {
            return self.err("expected `name:` after PREFIX");
        };
        let iri = self.iri()?;
        match PREFIXES.iter().find(|(_, ns)| *ns == iri) {
            Some((canonical, _)) => {
                self.prefixes.insert(name.to_owned(), canonical.to_string());
            }
            None => {
                // declared but outside the vocabulary; names under it never resolve
                self.prefixes.remove(name);
            }
        }
        Ok(())
    }

    fn variable(&mut self) -> Result<String> {
        self.skip_ws();
        if !self.eat('?') {
            return self.err("expected a variable");
        }
        let r = self.rest();
        let end = r.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(r.len());
        if end == 0 {
            return self.err("empty variable name");
        }
        self.pos += end;
        Ok(r[..end].to_owned())
    }

    fn iri(&mut self) -> Result<String> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            let Some(c) = self.rest().chars().next() else {
                return self.err("unterminated IRI");
            };
            self.pos += c.len_utf8();
            match c {
                '>' => break,
                '\\' => {
                    let r = self.rest();
                    let (len, digits) = match r.chars().next() {
                        Some('u') => (5, 4),
                        Some('U') => (9, 8),
                        _ => return self.err("bad IRI escape"),
                    };
                    let hex = r.get(1..1 + digits).ok_or_else(|| Error::QuerySyntax {
                        pos: self.pos,
                        message: "short IRI escape".into(),
                    })?;
                    let ch = u32::from_str_radix(hex, 16).ok().and_then(char::from_u32);
                    match ch {
                        Some(ch) => out.push(ch),
                        None => return self.err("bad IRI escape"),
                    }
                    self.pos += len;
                }
                '\n' => return self.err("newline in IRI"),
                c => out.push(c),
            }
        }
        Ok(out)
    }

    /// Resolves `p:local` to its canonical prefixed form.
    fn canonical(&self, name: &str) -> Option<String> {
        let (p, local) = name.split_once(':')?;
        let canonical = self.prefixes.get(p)?;
        Some(format!("{canonical}:{local}"))
    }

    fn predicate(&mut self) -> Result<Predicate> {
        let start = self.pos;
        let name = if self.peek() == Some('<') {
            let iri = self.iri()?;
            PREFIXES
                .iter()
                .find_map(|(p, ns)| iri.strip_prefix(ns).map(|local| format!("{p}:{local}")))
                .unwrap_or(iri)
        } else {
            if self.peek() == Some('?') {
                return Err(Error::UnsupportedFeature("variable in predicate position".into()));
            }
            let w = self.word();
            if w.is_empty() {
                return self.err("expected a predicate");
            }
            self.canonical(w).unwrap_or_else(|| w.to_owned())
        };
        Predicate::from_prefixed(&name).ok_or_else(|| {
            self.pos = start;
            Error::UnknownPredicate(name)
        })
    }

    fn node_term(&mut self, iri: String) -> Result<Term> {
        if let Some(class) = PREFIXES
            .iter()
            .find_map(|(p, ns)| iri.strip_prefix(ns).map(|local| format!("{p}:{local}")))
            .and_then(|n| SuperClass::from_iri(&n))
        {
            return Ok(Term::Class(class));
        }
        match Guid::new(&iri) {
            Ok(g) => Ok(Term::Node(g)),
            Err(_) => self.err("empty IRI"),
        }
    }

    fn subject(&mut self) -> Result<Term> {
        match self.peek() {
            Some('?') => Ok(Term::Var(self.variable()?)),
            Some('<') => {
                let iri = self.iri()?;
                let t = self.node_term(iri)?;
                if matches!(t, Term::Class(_)) {
                    return self.err("a class IRI cannot be a subject");
                }
                Ok(t)
            }
            _ => self.err("expected a variable or `<iri>` subject"),
        }
    }

    fn object(&mut self) -> Result<Term> {
        match self.peek() {
            Some('?') => Ok(Term::Var(self.variable()?)),
            Some('<') => {
                let iri = self.iri()?;
                self.node_term(iri)
            }
            Some('"') => self.string().map(|s| Term::Lit(Literal::Str(s))),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => self.number().map(Term::Lit),
            _ => {
                let start = self.pos;
                let w = self.word();
                let class = self.canonical(w).and_then(|n| SuperClass::from_iri(&n));
                match class {
                    Some(c) => Ok(Term::Class(c)),
                    None => {
                        self.pos = start;
                        self.err(format!("unsupported object term `{w}`"))
                    }
                }
            }
        }
    }

    fn string(&mut self) -> Result<String> {
        self.expect('"')?;
        let mut out = String::new();
        loop {
            let Some(c) = self.rest().chars().next() else {
                return self.err("unterminated string");
            };
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(out),
                '\\' => {
                    let Some(e) = self.rest().chars().next() else {
                        return self.err("unterminated string");
                    };
                    self.pos += e.len_utf8();
                    out.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        other => other,
                    });
                }
                c => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<Literal> {
        self.skip_ws();
        let r = self.rest();
        let mut end = 0;
        for (i, c) in r.char_indices() {
            let ok = c.is_ascii_digit()
                || ((c == '-' || c == '+') && (i == 0 || matches!(r.as_bytes()[i - 1], b'e' | b'E')))
                || c == 'e'
                || c == 'E'
                || (c == '.' && r[i + 1..].starts_with(|n: char| n.is_ascii_digit()));
            if !ok {
                break;
            }
            end = i + 1;
        }
        let text = &r[..end];
        let lit = if let Ok(i) = text.parse::<i64>() {
            Literal::Int(i)
        } else if let Ok(v) = text.parse::<f64>() {
            Literal::dec(v)?
        } else {
            return self.err(format!("bad number `{text}`"));
        };
        self.pos += end;
        Ok(lit)
    }

    fn subject_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<()> {
        let subject = self.subject()?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                out.push(TriplePattern::new(subject.clone(), predicate, object));
                if !self.eat(',') {
                    break;
                }
            }
            if !self.eat(';') {
                break;
            }
            // trailing `;` before `.` or `}`
            if matches!(self.peek(), Some('.') | Some('}')) {
                break;
            }
        }
        self.reject_unsupported()?;
        match self.peek() {
            Some('.') | Some('}') => Ok(()),
            _ if self.peek_keyword().as_deref() == Some("FILTER") => Ok(()),
            _ => self.err("expected `.`, `;` or `}` after a pattern"),
        }
    }

    fn filter(&mut self) -> Result<Filter> {
        self.expect('(')?;
        let var = self.variable()?;
        self.skip_ws();
        let r = self.rest();
        let (op, len) = if r.starts_with("<=") {
            (Comparator::Le, 2)
        } else if r.starts_with(">=") {
            (Comparator::Ge, 2)
        } else if r.starts_with('<') {
            (Comparator::Lt, 1)
        } else if r.starts_with('>') {
            (Comparator::Gt, 1)
        } else if r.starts_with('=') {
            (Comparator::Eq, 1)
        } else {
            return Err(Error::UnsupportedFeature(format!(
                "FILTER supports only `?v <op> number` comparisons (offset {})",
                self.pos
            )));
        };
        self.pos += len;
        let bound = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => self.number()?,
            _ => {
                return Err(Error::UnsupportedFeature(format!(
                    "FILTER bound must be a number (offset {})",
                    self.pos
                )))
            }
        };
        if !self.eat(')') {
            return Err(Error::UnsupportedFeature(format!(
                "FILTER supports a single comparison (offset {})",
                self.pos
            )));
        }
        Ok(Filter {
            var,
            op,
            bound: bound.as_f64().expect("numeric literal"),
        })
    }
}
