//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;

use provio_core::model::format_decimal;
use provio_core::query::Comparator;
use provio_core::{Literal, Object, Predicate, ProvGraph, ProvNode, SubClass, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

const PLAIN: &[&str] = &["a", "b", "x", "run", "Timestep_0", "data.h5", "/grp/ds", "WestSac", "cfg"];
const ODD: &[&str] = &["sp ace", "quo\"te", "back\\slash", "<angle>", "tab\tnl\n", "ünï", "🦀", "a;b,c.", "#hash", "{}|^`"];

fn label(rng: &mut impl Rng, odd: bool) -> String {
    let mut s = PLAIN.choose(rng).unwrap().to_string();
    if odd && rng.gen_bool(0.5) {
        s.push_str(ODD.choose(rng).unwrap());
    }
    s
}

pub fn random_literal(rng: &mut impl Rng, odd: bool) -> Literal {
    match rng.gen_range(0..3) {
        0 => Literal::Int(rng.gen_range(-50..50)),
        1 => {
            let v = match rng.gen_range(0..4) {
                0 => rng.gen_range(-5.0..5.0),
                1 => f64::from(rng.gen_range(-3..3)),
                2 => rng.gen_range(-1e-7..1e-7),
                _ => rng.gen_range(-1e21..1e21),
            };
            Literal::dec(if odd { v } else { (v * 4.0).round() / 4.0 }).unwrap()
        }
        _ => Literal::str(label(rng, odd)),
    }
}

/// A valid graph with up to `nodes` nodes and roughly `edges` attempted
/// non-classification triples. `odd` mixes awkward characters into labels
/// and literals.
pub fn random_graph(rng: &mut impl Rng, nodes: usize, edges: usize, odd: bool) -> ProvGraph {
    let mut g = ProvGraph::new();
    let n = rng.gen_range(1..=nodes.max(1));
    let mut guids = Vec::with_capacity(n);
    for i in 0..n {
        let sub = *SubClass::ALL.choose(rng).unwrap();
        let node = ProvNode::minted(sub, &format!("{}~{i}", label(rng, odd)), 0, i as u64).unwrap();
        guids.push(node.guid.clone());
        g.add_node(node).unwrap();
    }
    let literals: Vec<Literal> = (0..12).map(|_| random_literal(rng, odd)).collect();
    let properties = [Predicate::Elapsed, Predicate::HasAccuracy, Predicate::Version, Predicate::HasValue];
    let relations: Vec<Predicate> = Predicate::ALL.into_iter().filter(|p| p.is_relation()).collect();
    let target = rng.gen_range(0..=edges);
    let mut attempts = 0;
    let mut added = 0;
    while added < target && attempts < target * 20 {
        attempts += 1;
        let s = guids.choose(rng).unwrap().clone();
        let t = if rng.gen_bool(0.3) {
            let lit = if odd { random_literal(rng, true) } else { literals.choose(rng).unwrap().clone() };
            Triple::new(s, *properties.choose(rng).unwrap(), lit)
        } else {
            Triple::new(s, *relations.choose(rng).unwrap(), guids.choose(rng).unwrap().clone())
        };
        if g.add_triple(t).unwrap_or(false) {
            added += 1;
        }
    }
    g
}

#[derive(Clone, Debug)]
pub enum T {
    Var(&'static str),
    C(Object),
}

#[derive(Clone, Debug)]
pub struct RandomQuery {
    pub select: Vec<&'static str>,
    pub patterns: Vec<(T, Predicate, T)>,
    pub filters: Vec<(&'static str, Comparator, f64)>,
}

const VARS: [&str; 3] = ["x", "y", "z"];
const OPS: [Comparator; 5] = [Comparator::Lt, Comparator::Le, Comparator::Eq, Comparator::Ge, Comparator::Gt];

/// Up to six patterns over at most three variables; constants are mostly
/// drawn from existing triples so that many queries have answers.
pub fn random_query(rng: &mut impl Rng, g: &ProvGraph) -> RandomQuery {
    let triples: Vec<&Triple> = g.triples().collect();
    let pool = &VARS[..rng.gen_range(1..=3)];
    let mut patterns = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let t = triples.choose(rng).unwrap();
        let p = if rng.gen_bool(0.15) { *Predicate::ALL.choose(rng).unwrap() } else { t.predicate };
        let s = if rng.gen_bool(0.6) { T::Var(pool.choose(rng).unwrap()) } else { T::C(Object::Node(t.subject.clone())) };
        let o = if rng.gen_bool(0.6) { T::Var(pool.choose(rng).unwrap()) } else { T::C(t.object.clone()) };
        patterns.push((s, p, o));
    }
    let mut used = vars_of(&patterns);
    if used.is_empty() {
        patterns[0].0 = T::Var(pool[0]);
        used = vars_of(&patterns);
    }
    let mut select: Vec<&'static str> = used.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    if select.is_empty() {
        select.push(used[0]);
    }
    select.shuffle(rng);
    let mut filters = Vec::new();
    if rng.gen_bool(0.25) {
        let numbers: Vec<f64> = triples.iter().filter_map(|t| t.object.as_literal()?.as_f64()).collect();
        let bound = numbers.choose(rng).copied().unwrap_or(0.0);
        filters.push((*used.choose(rng).unwrap(), *OPS.choose(rng).unwrap(), bound));
    }
    RandomQuery { select, patterns, filters }
}

fn vars_of(patterns: &[(T, Predicate, T)]) -> Vec<&'static str> {
    let mut out = Vec::new();
    for (s, _, o) in patterns {
        for t in [s, o] {
            if let T::Var(v) = t {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        }
    }
    out
}

fn iri(text: &str) -> String {
    let mut out = String::from("<");
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || "/_.-~#:".contains(c) {
            out.push(c);
        } else if (c as u32) <= 0xFFFF {
            write!(out, "\\u{:04X}", c as u32).unwrap();
        } else {
            write!(out, "\\U{:08X}", c as u32).unwrap();
        }
    }
    out.push('>');
    out
}

fn render_term(t: &T) -> String {
    match t {
        T::Var(v) => format!("?{v}"),
        T::C(Object::Node(g)) => iri(g.as_str()),
        T::C(Object::Class(c)) => c.iri().to_owned(),
        T::C(Object::Literal(Literal::Str(s))) => {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    '\r' => out.push_str("\\r"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
        T::C(Object::Literal(Literal::Int(i))) => i.to_string(),
        T::C(Object::Literal(Literal::Dec(d))) => format_decimal(d.get()),
    }
}

impl RandomQuery {
    pub fn text(&self) -> String {
        let select: Vec<String> = self.select.iter().map(|v| format!("?{v}")).collect();
        let mut out = format!("SELECT {} WHERE {{\n", select.join(" "));
        for (s, p, o) in &self.patterns {
            writeln!(out, "  {} {} {} .", render_term(s), p.prefixed(), render_term(o)).unwrap();
        }
        for (v, op, bound) in &self.filters {
            writeln!(out, "  FILTER(?{v} {} {})", op.symbol(), format_decimal(*bound)).unwrap();
        }
        out.push('}');
        out
    }

    /// Same query with its patterns in another order.
    pub fn permuted(&self, rng: &mut impl Rng) -> RandomQuery {
        let mut q = self.clone();
        q.patterns.shuffle(rng);
        q
    }
}

/// Every assignment of the query variables over the active domain of `g`
/// is tried; a pattern is checked as soon as all its variables are set.
pub fn brute_force(g: &ProvGraph, q: &RandomQuery) -> BTreeSet<Vec<Object>> {
    let facts: HashSet<&Triple> = g.triples().collect();
    let mut domain: BTreeSet<Object> = BTreeSet::new();
    for t in g.triples() {
        domain.insert(Object::Node(t.subject.clone()));
        domain.insert(t.object.clone());
    }
    let domain: Vec<Object> = domain.into_iter().collect();
    let vars = vars_of(&q.patterns);
    let mut out = BTreeSet::new();
    let mut binding: Vec<Option<&Object>> = vec![None; vars.len()];
    assign(&facts, &domain, &vars, q, 0, &mut binding, &mut out);
    out
}

fn value<'a>(t: &'a T, vars: &[&str], binding: &[Option<&'a Object>]) -> Option<&'a Object> {
    match t {
        T::Var(v) => binding[vars.iter().position(|x| x == v).unwrap()],
        T::C(o) => Some(o),
    }
}

fn pattern_holds(facts: &HashSet<&Triple>, s: &Object, p: Predicate, o: &Object) -> bool {
    match s {
        Object::Node(g) => facts.contains(&Triple::new(g.clone(), p, o.clone())),
        _ => false,
    }
}

fn assign<'a>(
    facts: &HashSet<&Triple>,
    domain: &'a [Object],
    vars: &[&'static str],
    q: &'a RandomQuery,
    depth: usize,
    binding: &mut Vec<Option<&'a Object>>,
    out: &mut BTreeSet<Vec<Object>>,
) {
    // every pattern whose terms are all set must already hold
    for (s, p, o) in &q.patterns {
        let (Some(sv), Some(ov)) = (value(s, vars, binding), value(o, vars, binding)) else {
            continue;
        };
        if !pattern_holds(facts, sv, *p, ov) {
            return;
        }
    }
    for (v, op, bound) in &q.filters {
        if let Some(x) = binding[vars.iter().position(|x| x == v).unwrap()] {
            let ok = matches!(x, Object::Literal(l) if l.as_f64().is_some_and(|n| op.holds(n, *bound)));
            if !ok {
                return;
            }
        }
    }
    if depth == vars.len() {
        out.insert(
            q.select
                .iter()
                .map(|v| binding[vars.iter().position(|x| x == v).unwrap()].unwrap().clone())
                .collect(),
        );
        return;
    }
    for d in domain {
        binding[depth] = Some(d);
        assign(facts, domain, vars, q, depth + 1, binding, out);
    }
    binding[depth] = None;
}

/// All triples of several graphs, concatenated and deduplicated.
pub fn union_of(graphs: &[ProvGraph]) -> BTreeSet<Triple> {
    graphs.iter().flat_map(|g| g.triples().cloned()).collect()
}

pub fn triple_set(g: &ProvGraph) -> BTreeSet<Triple> {
    g.triples().cloned().collect()
}
