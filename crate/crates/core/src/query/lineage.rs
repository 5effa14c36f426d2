use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use super::Comparator;
use crate::error::{Error, Result};
use crate::graph::ProvGraph;
use crate::model::{Guid, Literal, Object, Predicate, SubClass, SuperClass};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LineageStep {
    pub entity: Guid,
    pub program: Guid,
    pub read: Guid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineageTree {
    pub root: Guid,
    pub levels: Vec<Vec<LineageStep>>,
}

impl LineageTree {
    /// Entities at level `k` (1-based).
    pub fn entities_at(&self, k: usize) -> BTreeSet<&Guid> {
        self.levels
            .get(k.wrapping_sub(1))
            .into_iter()
            .flatten()
            .map(|s| &s.entity)
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

fn require_entity(g: &ProvGraph, guid: &Guid) -> Result<SubClass> {
    let node = g.node(guid).ok_or_else(|| Error::UnknownGuid(guid.clone()))?;
    if node.super_class() != SuperClass::Entity {
        return Err(Error::NotAnEntity(guid.clone()));
    }
    Ok(node.sub_class)
}

fn nodes<'a>(it: impl Iterator<Item = &'a Object>) -> impl Iterator<Item = &'a Guid> {
    it.filter_map(Object::as_node)
}

/// Walks predecessors of `object` up to `levels` steps back.
///
/// One step from entity E: every program P that E is attributed to, then
/// every other entity X of the same sub-class as the root that is attributed
/// to P and was read by an activity associated with P. Entities already seen
/// are not revisited. Trailing empty levels are dropped.
pub fn backward_lineage(g: &ProvGraph, object: &Guid, levels: usize) -> Result<LineageTree> {
    let kind = require_entity(g, object)?;
    let mut visited: HashSet<Guid> = HashSet::from([object.clone()]);
    let mut frontier: BTreeSet<Guid> = BTreeSet::from([object.clone()]);
    let mut out = Vec::new();
    for _ in 0..levels {
        let mut step: BTreeSet<LineageStep> = BTreeSet::new();
        for e in &frontier {
            for program in nodes(g.objects(e, Predicate::WasAttributedTo)) {
                for x in g.subjects(Predicate::WasAttributedTo, &Object::Node(program.clone())) {
                    if visited.contains(x) || g.node(x).map(|n| n.sub_class) != Some(kind) {
                        continue;
                    }
                    for read in nodes(g.objects(x, Predicate::WasReadBy)) {
                        let by_program = nodes(g.objects(read, Predicate::WasAssociatedWith)).any(|a| a == program);
                        if by_program {
                            step.insert(LineageStep {
                                entity: x.clone(),
                                program: program.clone(),
                                read: read.clone(),
                            });
                        }
                    }
                }
            }
        }
        if step.is_empty() {
            break;
        }
        frontier = step.iter().map(|s| s.entity.clone()).collect();
        visited.extend(frontier.iter().cloned());
        out.push(step.into_iter().collect());
    }
    Ok(LineageTree {
        root: object.clone(),
        levels: out,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ActivityStats {
    pub count: u64,
    pub total_elapsed_us: Option<u64>,
}

/// Event counts per activity sub-class, optionally with summed durations.
pub fn io_stats(g: &ProvGraph, with_duration: bool) -> Result<BTreeMap<SubClass, ActivityStats>> {
    let mut out: BTreeMap<SubClass, ActivityStats> = BTreeMap::new();
    let mut any_elapsed = false;
    for node in g.nodes().filter(|n| n.super_class() == SuperClass::Activity) {
        let entry = out.entry(node.sub_class).or_default();
        entry.count += 1;
        if with_duration {
            let total = entry.total_elapsed_us.get_or_insert(0);
            for o in g.objects(&node.guid, Predicate::Elapsed) {
                if let Some(Literal::Int(us)) = o.as_literal() {
                    *total += *us as u64;
                    any_elapsed = true;
                }
            }
        }
    }
    if with_duration && !out.is_empty() && !any_elapsed {
        return Err(Error::DurationsNotTracked);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AgentChain {
    pub program: Guid,
    pub thread: Guid,
    pub user: Guid,
}

/// Every program -> executor -> user chain behind a data object.
pub fn file_modifiers(g: &ProvGraph, file: &Guid) -> Result<Vec<AgentChain>> {
    require_entity(g, file)?;
    let mut out = BTreeSet::new();
    for program in nodes(g.objects(file, Predicate::WasAttributedTo)) {
        for thread in nodes(g.objects(program, Predicate::ActedOnBehalfOf)) {
            for user in nodes(g.objects(thread, Predicate::ActedOnBehalfOf)) {
                out.insert(AgentChain {
                    program: program.clone(),
                    thread: thread.clone(),
                    user: user.clone(),
                });
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConfigAccuracy {
    pub config: String,
    pub version: Literal,
    pub accuracy: Literal,
}

/// Pairs each configuration's version with the accuracies recorded for it,
/// either directly on the configuration or on a metrics node it influenced.
pub fn config_accuracy_map(g: &ProvGraph) -> Vec<ConfigAccuracy> {
    let mut rows = BTreeSet::new();
    for cfg in g.nodes_of(SubClass::Configuration) {
        let versions: Vec<&Literal> = g.objects(&cfg.guid, Predicate::Version).filter_map(Object::as_literal).collect();
        if versions.is_empty() {
            continue;
        }
        let mut accuracies: Vec<&Literal> =
            g.objects(&cfg.guid, Predicate::HasAccuracy).filter_map(Object::as_literal).collect();
        for m in nodes(g.objects(&cfg.guid, Predicate::Influenced)) {
            if g.node(m).is_some_and(|n| n.sub_class == SubClass::Metrics) {
                accuracies.extend(g.objects(m, Predicate::HasAccuracy).filter_map(Object::as_literal));
            }
        }
        for v in &versions {
            for a in &accuracies {
                rows.insert(((*v).clone(), (*a).clone(), cfg.label.clone()));
            }
        }
    }
    rows.into_iter()
        .map(|(version, accuracy, config)| ConfigAccuracy {
            config,
            version,
            accuracy,
        })
        .collect()
}

/// Quality bound on a checkpoint's own property, e.g. `ns1:hasValue < 2.5`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quality {
    pub property: Predicate,
    pub op: Comparator,
    pub bound: f64,
}

impl Quality {
    /// Parses `prefix:name<op>number`.
    pub fn parse(text: &str) -> Result<Quality> {
        let bad = || Error::Config(format!("quality condition `{text}` is not `property<op>number`"));
        let (lhs, op, rhs) = Comparator::split(text).ok_or_else(bad)?;
        let property: Predicate = lhs.parse()?;
        if !property.is_property() {
            return Err(bad());
        }
        let bound = rhs.parse::<f64>().map_err(|_| bad())?;
        Ok(Quality { property, op, bound })
    }

    fn admits(&self, g: &ProvGraph, node: &Guid) -> bool {
        g.objects(node, self.property)
            .filter_map(Object::as_literal)
            .filter_map(Literal::as_f64)
            .any(|v| self.op.holds(v, self.bound))
    }
}

/// Configuration nodes a constraint name refers to: exact label, or the
/// label with a `_<suffix>` variant tag, case-insensitively.
fn configs_named<'a>(g: &'a ProvGraph, name: &str) -> Vec<&'a Guid> {
    let want = name.to_ascii_lowercase();
    g.nodes_of(SubClass::Configuration)
        .filter(|n| {
            let label = n.label.to_ascii_lowercase();
            label == want || label.strip_prefix(&want).is_some_and(|rest| rest.starts_with('_'))
        })
        .map(|n| &n.guid)
        .collect()
}

/// Checkpoints influenced by configurations satisfying every constraint,
/// optionally filtered by a quality bound on the checkpoint.
pub fn consistent_checkpoints(
    g: &ProvGraph,
    constraints: &[(String, Literal)],
    quality: Option<&Quality>,
) -> Result<Vec<Guid>> {
    let mut result: Option<BTreeSet<Guid>> = None;
    for (name, required) in constraints {
        let configs = configs_named(g, name);
        if configs.is_empty() {
            return Err(Error::UnknownConfiguration(name.clone()));
        }
        let wanted = Object::Literal(required.clone());
        let mut hits = BTreeSet::new();
        for c in configs {
            if !g.objects(c, Predicate::HasValue).any(|v| *v == wanted) {
                continue;
            }
            for k in nodes(g.objects(c, Predicate::Influenced)) {
                if g.node(k).is_some_and(|n| n.sub_class == SubClass::Checkpoint) {
                    hits.insert(k.clone());
                }
            }
        }
        result = Some(match result {
            None => hits,
            Some(prev) => prev.intersection(&hits).cloned().collect(),
        });
    }
    let mut out: Vec<Guid> = match result {
        Some(set) => set.into_iter().collect(),
        None => g.nodes_of(SubClass::Checkpoint).map(|n| n.guid.clone()).collect(),
    };
    if let Some(q) = quality {
        out.retain(|k| q.admits(g, k));
    }
    out.sort();
    Ok(out)
}
