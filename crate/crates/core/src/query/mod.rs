//! Conjunctive triple-pattern queries and the built-in lineage questions.

mod eval;
mod lineage;
mod parse;

pub use eval::{evaluate, evaluate_with, BindingSet};
pub use lineage::{
    backward_lineage, config_accuracy_map, consistent_checkpoints, file_modifiers, io_stats, ActivityStats, AgentChain,
    ConfigAccuracy, LineageStep, LineageTree, Quality,
};
pub use parse::parse_query;

use std::fmt;

use crate::model::{Guid, Literal, Object, Predicate, SuperClass};

/// One position of a triple pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Node(Guid),
    Class(SuperClass),
    Lit(Literal),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.trim_start_matches('?').to_owned())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// The constant as a triple object, when this term is not a variable.
    pub fn constant(&self) -> Option<Object> {
        match self {
            Term::Var(_) => None,
            Term::Node(g) => Some(Object::Node(g.clone())),
            Term::Class(c) => Some(Object::Class(*c)),
            Term::Lit(l) => Some(Object::Literal(l.clone())),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Node(g) => write!(f, "<{g}>"),
            Term::Class(c) => f.write_str(c.iri()),
            Term::Lit(Literal::Str(s)) => write!(f, "{s:?}"),
            Term::Lit(l) => l.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Predicate,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Predicate, object: Term) -> TriplePattern {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    fn vars(&self) -> impl Iterator<Item = &str> {
        self.subject.as_var().into_iter().chain(self.object.as_var())
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate.prefixed(), self.object)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Comparator {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparator::Lt => value < bound,
            Comparator::Le => value <= bound,
            Comparator::Eq => value == bound,
            Comparator::Ge => value >= bound,
            Comparator::Gt => value > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
        }
    }

    /// Splits `lhs<op>rhs` at the first comparator, longest match first.
    pub fn split(text: &str) -> Option<(&str, Comparator, &str)> {
        let at = text.find(['<', '>', '='])?;
        let rest = &text[at..];
        let (op, len) = if rest.starts_with("<=") {
            (Comparator::Le, 2)
        } else if rest.starts_with(">=") {
            (Comparator::Ge, 2)
        } else if rest.starts_with('<') {
            (Comparator::Lt, 1)
        } else if rest.starts_with('>') {
            (Comparator::Gt, 1)
        } else {
            (Comparator::Eq, 1)
        };
        Some((text[..at].trim(), op, text[at + len..].trim()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    pub var: String,
    pub op: Comparator,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
}

impl Query {
    /// Variables in order of first appearance in the patterns.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.patterns.iter().flat_map(TriplePattern::vars) {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_owned());
            }
        }
        out
    }
}

/// Parses a literal given on a command line or in a constraint: integer,
/// then decimal, then plain string.
pub fn literal_from_text(text: &str) -> Literal {
    if let Ok(i) = text.parse::<i64>() {
        return Literal::Int(i);
    }
    if let Ok(v) = text.parse::<f64>() {
        if let Ok(l) = Literal::dec(v) {
            return l;
        }
    }
    Literal::str(text.trim_matches('"'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparator_split_prefers_two_char_ops() {
        assert_eq!(Comparator::split("ns1:hasValue<=2.5"), Some(("ns1:hasValue", Comparator::Le, "2.5")));
        assert_eq!(Comparator::split("batch_size=256"), Some(("batch_size", Comparator::Eq, "256")));
        assert_eq!(Comparator::split("x > 1"), Some(("x", Comparator::Gt, "1")));
        assert_eq!(Comparator::split("plain"), None);
    }

    #[test]
    fn literal_text_parsing() {
        assert_eq!(literal_from_text("256"), Literal::Int(256));
        assert_eq!(literal_from_text("2.5"), Literal::dec(2.5).unwrap());
        assert_eq!(literal_from_text("v1"), Literal::str("v1"));
    }
}
