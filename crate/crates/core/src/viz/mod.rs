//! DOT rendering of provenance graphs.
//!
//! Shapes by super-class: Entity=box, Activity=ellipse, Agent=house,
//! Extensible=note. Highlighted nodes and edges are drawn blue. Property
//! triples appear as extra label lines on their node, not as edges.

mod check;

pub use check::{check_dot, DotSummary};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::graph::ProvGraph;
use crate::model::{Guid, Object, Predicate, SubClass, SuperClass};
use crate::query::LineageTree;

pub type Edge = (Guid, Predicate, Guid);

#[derive(Clone, Debug, Default)]
pub struct RenderSpec {
    pub highlight_nodes: BTreeSet<Guid>,
    pub highlight_edges: BTreeSet<Edge>,
    /// Fold all activities of one sub-class into a single counted node.
    pub collapse: bool,
}

pub fn shape_of(class: SuperClass) -> &'static str {
    match class {
        SuperClass::Entity => "box",
        SuperClass::Activity => "ellipse",
        SuperClass::Agent => "house",
        SuperClass::Extensible => "note",
    }
}

fn fill_of(class: SuperClass) -> &'static str {
    match class {
        SuperClass::Entity => "#fff2cc",
        SuperClass::Activity => "#dae8fc",
        SuperClass::Agent => "#f8cecc",
        SuperClass::Extensible => "#e1d5e7",
    }
}

const HIGHLIGHT: &str = "blue";

impl RenderSpec {
    pub fn collapsed(mut self, on: bool) -> Self {
        self.collapse = on;
        self
    }

    /// Highlights every node and edge that a lineage step relies on: the
    /// root, each predecessor, its program and read activity, and the four
    /// edges joining them.
    pub fn from_lineage(g: &ProvGraph, tree: &LineageTree) -> RenderSpec {
        let mut spec = RenderSpec::default();
        spec.highlight_nodes.insert(tree.root.clone());
        let mut previous = vec![tree.root.clone()];
        for level in &tree.levels {
            for step in level {
                spec.highlight_nodes.extend([step.entity.clone(), step.program.clone(), step.read.clone()]);
                spec.highlight_edges.extend([
                    (step.entity.clone(), Predicate::WasReadBy, step.read.clone()),
                    (step.read.clone(), Predicate::WasAssociatedWith, step.program.clone()),
                    (step.entity.clone(), Predicate::WasAttributedTo, step.program.clone()),
                ]);
                let target = Object::Node(step.program.clone());
                for succ in &previous {
                    if g.objects(succ, Predicate::WasAttributedTo).any(|o| *o == target) {
                        spec.highlight_edges
                            .insert((succ.clone(), Predicate::WasAttributedTo, step.program.clone()));
                    }
                }
            }
            previous = level.iter().map(|s| s.entity.clone()).collect();
        }
        spec
    }

    fn validate(&self, g: &ProvGraph) -> Result<()> {
        if let Some(n) = self.highlight_nodes.iter().find(|n| g.node(n).is_none()) {
            return Err(Error::UnknownHighlight(n.to_string()));
        }
        for (s, p, o) in &self.highlight_edges {
            let t = crate::model::Triple::new(s.clone(), *p, o.clone());
            if !g.contains(&t) {
                return Err(Error::UnknownHighlight(format!("{s} {p} {o}")));
            }
        }
        Ok(())
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders `g` as a deterministic DOT digraph.
pub fn to_dot(g: &ProvGraph, spec: &RenderSpec) -> Result<String> {
    spec.validate(g)?;
    let mut out = String::from(
        "// provenance graph\n// shapes: Entity=box, Activity=ellipse, Agent=house, Extensible=note; highlight=blue\n",
    );
    if g.is_empty() {
        out.push_str("digraph prov {}\n");
        return Ok(out);
    }

    // node id per GUID (collapsed activities share one id)
    let id_of = |guid: &Guid| -> String {
        match g.node(guid) {
            Some(n) if spec.collapse && n.super_class() == SuperClass::Activity => format!("{}*", n.sub_class),
            _ => guid.to_string(),
        }
    };

    let mut props: BTreeMap<&Guid, Vec<String>> = BTreeMap::new();
    let mut edges: BTreeSet<(String, &'static str, String, bool)> = BTreeSet::new();
    for t in g.triples() {
        match (&t.object, t.predicate) {
            (Object::Literal(l), p) if p.is_property() && p != Predicate::SubClass => {
                props.entry(&t.subject).or_default().push(format!("{}: {l}", p.local_name()));
            }
            (Object::Node(o), p) if p.is_relation() => {
                let lit = spec.highlight_edges.contains(&(t.subject.clone(), p, o.clone()));
                edges.insert((id_of(&t.subject), p.local_name(), id_of(o), lit));
            }
            _ => {}
        }
    }

    out.push_str("digraph prov {\n  rankdir=BT;\n  node [style=filled, fontname=\"Helvetica\"];\n");
    let mut collapsed: BTreeMap<SubClass, (usize, bool)> = BTreeMap::new();
    for node in g.sorted_nodes() {
        let lit = spec.highlight_nodes.contains(&node.guid);
        if spec.collapse && node.super_class() == SuperClass::Activity {
            let e = collapsed.entry(node.sub_class).or_default();
            e.0 += 1;
            e.1 |= lit;
            continue;
        }
        let mut label = format!("{}\n[{}]", node.label, node.sub_class);
        if let Some(lines) = props.get_mut(&node.guid) {
            lines.sort();
            for l in lines {
                label.push('\n');
                label.push_str(l);
            }
        }
        write_node(&mut out, &node.guid.to_string(), &label, node.super_class(), lit);
    }
    for (sub, (count, lit)) in collapsed {
        let label = format!("{sub} x{count}");
        write_node(&mut out, &format!("{sub}*"), &label, SuperClass::Activity, lit);
    }
    // merge parallel edges that collapsing produced, keeping any highlight
    let mut merged: BTreeMap<(String, &str, String), bool> = BTreeMap::new();
    for (s, p, o, lit) in edges {
        *merged.entry((s, p, o)).or_default() |= lit;
    }
    for ((s, p, o), lit) in merged {
        let _ = write!(out, "  {} -> {} [label={}", quote(&s), quote(&o), quote(p));
        if lit {
            let _ = write!(out, ", color={HIGHLIGHT}, fontcolor={HIGHLIGHT}, penwidth=2");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    Ok(out)
}

fn write_node(out: &mut String, id: &str, label: &str, class: SuperClass, lit: bool) {
    let _ = write!(
        out,
        "  {} [label={}, shape={}, fillcolor={}",
        quote(id),
        quote(label),
        shape_of(class),
        quote(fill_of(class))
    );
    if lit {
        let _ = write!(out, ", color={HIGHLIGHT}, fontcolor={HIGHLIGHT}, penwidth=2");
    }
    out.push_str("];\n");
}
