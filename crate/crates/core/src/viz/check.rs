//! Recognizer for the DOT language (graphviz grammar, without HTML labels
//! and ports), used to check rendered output.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DotSummary {
    /// Node statements.
    pub nodes: usize,
    /// Edge operators (`a -> b -> c` counts 2).
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Arrow,
    Line,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    let mut line_start = true;
    while let Some((i, c)) = it.next() {
        match c {
            '\n' => {
                line_start = true;
                continue;
            }
            c if c.is_whitespace() => continue,
            '#' if line_start => {
                while it.peek().is_some_and(|&(_, c)| c != '\n') {
                    it.next();
                }
                continue;
            }
            '/' if matches!(it.peek(), Some((_, '/'))) => {
                while it.peek().is_some_and(|&(_, c)| c != '\n') {
                    it.next();
                }
                continue;
            }
            '/' if matches!(it.peek(), Some((_, '*'))) => {
                it.next();
                let mut prev = ' ';
                loop {
                    match it.next() {
                        None => return Err(format!("unterminated comment at {i}")),
                        Some((_, '/')) if prev == '*' => break,
                        Some((_, c)) => prev = c,
                    }
                }
                continue;
            }
            _ => {}
        }
        line_start = false;
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '=' => Tok::Eq,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '-' if matches!(it.peek(), Some((_, '>'))) => {
                it.next();
                Tok::Arrow
            }
            '-' if matches!(it.peek(), Some((_, '-'))) => {
                it.next();
                Tok::Line
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match it.next() {
                        None => return Err(format!("unterminated string at {i}")),
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match it.next() {
                            Some((_, c)) => {
                                s.push('\\');
                                s.push(c);
                            }
                            None => return Err(format!("unterminated string at {i}")),
                        },
                        Some((_, c)) => s.push(c),
                    }
                }
                Tok::Id(s)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(&(_, n)) = it.peek() {
                    if n.is_alphanumeric() || n == '_' {
                        s.push(n);
                        it.next();
                    } else {
                        break;
                    }
                }
                Tok::Id(s)
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let mut s = c.to_string();
                while let Some(&(_, n)) = it.peek() {
                    if n.is_ascii_digit() || n == '.' {
                        s.push(n);
                        it.next();
                    } else {
                        break;
                    }
                }
                if s == "-" || s == "." || s.matches('.').count() > 1 {
                    return Err(format!("bad numeral `{s}` at {i}"));
                }
                Tok::Id(s)
            }
            other => return Err(format!("unexpected `{other}` at {i}")),
        };
        out.push(tok);
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    at: usize,
    directed: bool,
    summary: DotSummary,
}

fn is_kw(t: Option<&Tok>, kw: &str) -> bool {
    matches!(t, Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), String> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            other => Err(format!("expected {want:?}, found {other:?} at token {}", self.at - 1)),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.bump() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected an ID, found {other:?} at token {}", self.at - 1)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if is_kw(self.peek(), "strict") {
            self.bump();
        }
        let kind = self.id()?.to_ascii_lowercase();
        self.directed = match kind.as_str() {
            "digraph" => true,
            "graph" => false,
            _ => return Err(format!("expected graph or digraph, found `{kind}`")),
        };
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.bump();
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)?;
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("trailing {t:?} after graph")),
        }
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt()?;
            if matches!(self.peek(), Some(Tok::Semi)) {
                self.bump();
            }
        }
        Ok(())
    }

    fn attr_lists(&mut self) -> Result<(), String> {
        while matches!(self.peek(), Some(Tok::LBracket)) {
            self.bump();
            while !matches!(self.peek(), Some(Tok::RBracket)) {
                self.id()?;
                self.expect(Tok::Eq)?;
                self.id()?;
                if matches!(self.peek(), Some(Tok::Semi) | Some(Tok::Comma)) {
                    self.bump();
                }
            }
            self.bump();
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if is_kw(self.peek(), "subgraph") {
            self.bump();
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.bump();
            }
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)
    }

    /// A node ID or a subgraph, as an edge endpoint.
    fn endpoint(&mut self) -> Result<bool, String> {
        if is_kw(self.peek(), "subgraph") || matches!(self.peek(), Some(Tok::LBrace)) {
            self.subgraph()?;
            Ok(false)
        } else {
            self.id()?;
            Ok(true)
        }
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned();
        if ["graph", "node", "edge"].iter().any(|k| is_kw(t.as_ref(), k)) {
            self.bump();
            return self.attr_lists();
        }
        let is_node = self.endpoint()?;
        if is_node && matches!(self.peek(), Some(Tok::Eq)) {
            self.bump();
            self.id()?;
            return Ok(());
        }
        let mut edge = false;
        while matches!(self.peek(), Some(Tok::Arrow) | Some(Tok::Line)) {
            let op = self.bump();
            if (op == Some(Tok::Arrow)) != self.directed {
                return Err("edge operator does not match graph kind".into());
            }
            self.endpoint()?;
            self.summary.edges += 1;
            edge = true;
        }
        if is_node && !edge {
            self.summary.nodes += 1;
        }
        self.attr_lists()
    }
}

/// Parses `src` as a DOT graph and counts its node and edge statements.
pub fn check_dot(src: &str) -> Result<DotSummary, String> {
    let mut p = P {
        toks: tokenize(src)?,
        at: 0,
        directed: true,
        summary: DotSummary::default(),
    };
    p.graph()?;
    Ok(p.summary)
}
