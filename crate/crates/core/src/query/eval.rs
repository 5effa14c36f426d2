use std::collections::{BTreeSet, HashMap};

use serde_json::{Map, Value};

use super::{Query, Term, TriplePattern};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::ProvGraph;
use crate::model::{Literal, Object};

/// Projected solutions, duplicate-free and sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BindingSet {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Object>>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values bound to `var`, one per row.
    pub fn column(&self, var: &str) -> Vec<&Object> {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Header line of variable names, then one tab-separated line per row.
    pub fn to_tsv(&self) -> String {
        let mut out = self.vars.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_text).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .vars
                    .iter()
                    .zip(row)
                    .map(|(v, o)| (v.clone(), json_value(o)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn cell_text(o: &Object) -> String {
    match o {
        Object::Class(c) => c.iri().to_owned(),
        other => other.to_string().replace(['\t', '\n'], " "),
    }
}

fn json_value(o: &Object) -> Value {
    match o {
        Object::Node(g) => Value::String(g.to_string()),
        Object::Class(c) => Value::String(c.iri().to_owned()),
        Object::Literal(Literal::Str(s)) => Value::String(s.clone()),
        Object::Literal(Literal::Int(i)) => Value::from(*i),
        Object::Literal(Literal::Dec(d)) => Value::from(d.get()),
    }
}

type Row = Vec<Option<Object>>;

/// Below this many partial solutions a join step stays on one thread.
const PARALLEL_ROWS: usize = 64;

pub fn evaluate(g: &ProvGraph, q: &Query) -> Result<BindingSet> {
    evaluate_with(g, q, Execution::default())
}

pub fn evaluate_with(g: &ProvGraph, q: &Query, exec: Execution) -> Result<BindingSet> {
    let vars = q.pattern_vars();
    let slot: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let index = |name: &str| slot.get(name).copied().ok_or_else(|| Error::UnboundVariable(name.to_owned()));
    let select: Vec<usize> = q.select.iter().map(|v| index(v)).collect::<Result<_>>()?;
    let filters: Vec<_> = q
        .filters
        .iter()
        .map(|f| Ok((index(&f.var)?, f)))
        .collect::<Result<_>>()?;

    let mut rows: Vec<Row> = vec![vec![None; vars.len()]];
    let mut remaining: Vec<&TriplePattern> = q.patterns.iter().collect();
    let mut bound = vec![false; vars.len()];
    while !remaining.is_empty() && !rows.is_empty() {
        let next = pick_next(g, &remaining, &bound, &slot);
        let pat = remaining.remove(next);
        let s = pat.subject.as_var().map(|v| slot[v]);
        let o = pat.object.as_var().map(|v| slot[v]);
        let extend = |row: &Row| extend_row(g, pat, s, o, row);
        rows = if rows.len() >= PARALLEL_ROWS {
            exec::flat_map(exec, &rows, extend)
        } else {
            rows.iter().flat_map(extend).collect()
        };
        for i in s.into_iter().chain(o) {
            bound[i] = true;
        }
        rows.retain(|row| {
            filters.iter().all(|(i, f)| match &row[*i] {
                None => true,
                Some(Object::Literal(l)) => l.as_f64().is_some_and(|v| f.op.holds(v, f.bound)),
                Some(_) => false,
            })
        });
    }

    let projected: BTreeSet<Vec<Object>> = rows
        .into_iter()
        .map(|row| select.iter().map(|&i| row[i].clone().expect("all pattern vars bound")).collect())
        .collect();
    Ok(BindingSet {
        vars: q.select.clone(),
        rows: projected.into_iter().collect(),
    })
}

/// Most bound terms first; ties broken by index estimate, then text order.
fn pick_next(g: &ProvGraph, remaining: &[&TriplePattern], bound: &[bool], slot: &HashMap<&str, usize>) -> usize {
    let is_bound = |t: &Term| t.as_var().is_none_or(|v| bound[slot[v]]);
    let mut best = 0;
    let mut best_key = (usize::MAX, usize::MAX);
    for (i, p) in remaining.iter().enumerate() {
        let bound_terms = 1 + is_bound(&p.subject) as usize + is_bound(&p.object) as usize;
        let s = match &p.subject {
            Term::Node(n) => Some(n),
            _ => None,
        };
        let o = p.object.constant();
        let est = g.estimate(s, Some(p.predicate), o.as_ref());
        let key = (3 - bound_terms, est);
        if key < best_key {
            best_key = key;
            best = i;
        }
    }
    best
}

fn extend_row(g: &ProvGraph, pat: &TriplePattern, s: Option<usize>, o: Option<usize>, row: &Row) -> Vec<Row> {
    let subject_val = match (&pat.subject, s) {
        (Term::Node(n), _) => Some(Object::Node(n.clone())),
        (_, Some(i)) => row[i].clone(),
        _ => None,
    };
    let subject = match &subject_val {
        Some(Object::Node(n)) => Some(n),
        Some(_) => return Vec::new(),
        None => None,
    };
    let object_val = match o {
        Some(i) => row[i].clone(),
        None => pat.object.constant(),
    };
    let mut out = Vec::new();
    for t in g.scan(subject, Some(pat.predicate), object_val.as_ref()) {
        let mut next = row.clone();
        if let Some(i) = s {
            next[i] = Some(Object::Node(t.subject.clone()));
        }
        if let Some(i) = o {
            match &next[i] {
                // same variable in subject and object position
                Some(v) if *v != t.object => continue,
                _ => next[i] = Some(t.object.clone()),
            }
        }
        out.push(next);
    }
    out
}
