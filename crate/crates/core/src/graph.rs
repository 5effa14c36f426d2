//! Indexed in-memory provenance graph.

use std::collections::HashMap;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::model::{check_relation, Guid, Literal, Object, Predicate, ProvNode, SubClass, SuperClass, Triple};

/// A set of typed nodes and the triples describing them.
///
/// Triples are kept in insertion order (there are no removals) and indexed
/// by subject, predicate and object so that lookups with any bound position
/// avoid a full scan.
#[derive(Clone, Debug, Default)]
pub struct ProvGraph {
    nodes: HashMap<Guid, ProvNode>,
    triples: IndexSet<Triple>,
    by_subject: HashMap<Guid, Vec<usize>>,
    by_predicate: HashMap<Predicate, Vec<usize>>,
    by_object: HashMap<Object, Vec<usize>>,
}

impl PartialEq for ProvGraph {
    /// Set equality over nodes and triples.
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.triples == other.triples
    }
}

impl Eq for ProvGraph {}

impl ProvGraph {
    pub fn new() -> ProvGraph {
        ProvGraph::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, guid: &Guid) -> Option<&ProvNode> {
        self.nodes.get(guid)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ProvNode> {
        self.nodes.values()
    }

    /// Nodes sorted by GUID.
    pub fn sorted_nodes(&self) -> Vec<&ProvNode> {
        let mut v: Vec<_> = self.nodes.values().collect();
        v.sort_by(|a, b| a.guid.cmp(&b.guid));
        v
    }

    pub fn nodes_of(&self, sub_class: SubClass) -> impl Iterator<Item = &ProvNode> {
        self.nodes.values().filter(move |n| n.sub_class == sub_class)
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// Registers a node along with its `prov:wasMemberOf` and
    /// `provio:subClass` classification triples. Returns `false` when an
    /// identical node was already present.
    pub fn add_node(&mut self, node: ProvNode) -> Result<bool> {
        if node.label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if let Some(existing) = self.nodes.get(&node.guid) {
            if existing.sub_class == node.sub_class && existing.label == node.label {
                return Ok(false);
            }
            return Err(Error::NodeConflict {
                guid: node.guid.clone(),
                existing: format!("{} `{}`", existing.sub_class, existing.label),
                incoming: format!("{} `{}`", node.sub_class, node.label),
            });
        }
        let guid = node.guid.clone();
        let class = node.super_class();
        let sub = node.sub_class;
        self.nodes.insert(guid.clone(), node);
        self.insert(Triple::new(guid.clone(), Predicate::WasMemberOf, Object::Class(class)));
        self.insert(Triple::new(guid, Predicate::SubClass, Literal::str(sub.name())));
        Ok(true)
    }

    /// Adds a triple after checking registration and domain/range
    /// constraints. Returns `false` for a duplicate.
    pub fn add_triple(&mut self, t: Triple) -> Result<bool> {
        self.check(&t)?;
        Ok(self.insert(t))
    }

    fn check(&self, t: &Triple) -> Result<()> {
        let subject = self
            .nodes
            .get(&t.subject)
            .ok_or_else(|| Error::UnknownGuid(t.subject.clone()))?;
        match (t.predicate, &t.object) {
            (Predicate::WasMemberOf, Object::Class(c)) if *c == subject.super_class() => Ok(()),
            (Predicate::WasMemberOf, _) => Err(Error::DomainViolation {
                predicate: t.predicate,
                detail: format!("{} for a {} node", t.object, subject.sub_class),
            }),
            (Predicate::SubClass, Object::Literal(Literal::Str(s))) if s == subject.sub_class.name() => Ok(()),
            (Predicate::SubClass, _) => Err(Error::DomainViolation {
                predicate: t.predicate,
                detail: format!("{} for a {} node", t.object, subject.sub_class),
            }),
            (p, Object::Literal(_)) if p.is_property() => Ok(()),
            (p, _) if p.is_property() => Err(Error::LiteralExpected(p)),
            (p, Object::Node(o)) => {
                let object = self.nodes.get(o).ok_or_else(|| Error::UnknownGuid(o.clone()))?;
                check_relation(p, subject.sub_class, object.sub_class)
            }
            (p, _) => Err(Error::NodeExpected(p)),
        }
    }

    fn insert(&mut self, t: Triple) -> bool {
        let (idx, fresh) = self.triples.insert_full(t);
        if fresh {
            let t = &self.triples[idx];
            self.by_subject.entry(t.subject.clone()).or_default().push(idx);
            self.by_predicate.entry(t.predicate).or_default().push(idx);
            self.by_object.entry(t.object.clone()).or_default().push(idx);
        }
        fresh
    }

    /// All triples matching the bound positions.
    ///
    /// The smallest applicable index drives the lookup; the predicate index
    /// is only used alone when neither subject nor object is bound.
    pub fn scan(&self, s: Option<&Guid>, p: Option<Predicate>, o: Option<&Object>) -> Vec<&Triple> {
        let matches = |t: &&Triple| {
            s.is_none_or(|s| &t.subject == s)
                && p.is_none_or(|p| t.predicate == p)
                && o.is_none_or(|o| &t.object == o)
        };
        let mut best: Option<&[usize]> = None;
        if let Some(s) = s {
            best = Some(self.by_subject.get(s).map_or(&[][..], Vec::as_slice));
        }
        if let Some(o) = o {
            let cand = self.by_object.get(o).map_or(&[][..], Vec::as_slice);
            if best.is_none_or(|b| cand.len() < b.len()) {
                best = Some(cand);
            }
        }
        if best.is_none() {
            if let Some(p) = p {
                best = Some(self.by_predicate.get(&p).map_or(&[][..], Vec::as_slice));
            }
        }
        match best {
            Some(ids) => ids.iter().map(|&i| &self.triples[i]).filter(matches).collect(),
            None => self.triples.iter().collect(),
        }
    }

    /// Number of triples a scan with these bindings would examine.
    pub fn estimate(&self, s: Option<&Guid>, p: Option<Predicate>, o: Option<&Object>) -> usize {
        let mut est = self.triples.len();
        if let Some(s) = s {
            est = est.min(self.by_subject.get(s).map_or(0, Vec::len));
        }
        if let Some(o) = o {
            est = est.min(self.by_object.get(o).map_or(0, Vec::len));
        }
        if let Some(p) = p {
            est = est.min(self.by_predicate.get(&p).map_or(0, Vec::len));
        }
        est
    }

    /// Node objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Guid, predicate: Predicate) -> impl Iterator<Item = &'a Object> + 'a {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
            .filter(move |t| t.predicate == predicate)
            .map(|t| &t.object)
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: Predicate, object: &Object) -> impl Iterator<Item = &'a Guid> + 'a {
        self.by_object
            .get(object)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
            .filter(move |t| t.predicate == predicate)
            .map(|t| &t.subject)
    }

    /// Full structural check: referential integrity, one membership triple
    /// per node, and domain/range constraints on every triple.
    pub fn validate(&self) -> Result<()> {
        let mut memberships: HashMap<&Guid, usize> = HashMap::new();
        for t in &self.triples {
            self.check(t)?;
            if t.predicate == Predicate::WasMemberOf {
                *memberships.entry(&t.subject).or_default() += 1;
            }
        }
        for guid in self.nodes.keys() {
            match memberships.get(guid) {
                Some(1) => {}
                n => {
                    return Err(Error::DomainViolation {
                        predicate: Predicate::WasMemberOf,
                        detail: format!("{guid} has {} membership triples", n.copied().unwrap_or(0)),
                    })
                }
            }
        }
        Ok(())
    }

    pub fn super_class_of(&self, guid: &Guid) -> Option<SuperClass> {
        self.nodes.get(guid).map(ProvNode::super_class)
    }

    /// Unions `other` into `self`. Shared GUIDs must agree on content.
    pub fn absorb(&mut self, other: &ProvGraph) -> Result<()> {
        for node in other.nodes.values() {
            if let Some(existing) = self.nodes.get(&node.guid) {
                if existing != node {
                    return Err(Error::NodeConflict {
                        guid: node.guid.clone(),
                        existing: format!("{} `{}`", existing.sub_class, existing.label),
                        incoming: format!("{} `{}`", node.sub_class, node.label),
                    });
                }
            }
        }
        for node in other.nodes.values() {
            self.nodes.entry(node.guid.clone()).or_insert_with(|| node.clone());
        }
        for t in &other.triples {
            if !self.triples.contains(t) {
                self.insert(t.clone());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mint_guid;

    fn node(sub: SubClass, label: &str) -> ProvNode {
        ProvNode::minted(sub, label, 0, 1).unwrap()
    }

    #[test]
    fn add_node_emits_membership() {
        let mut g = ProvGraph::new();
        let bob = node(SubClass::User, "Bob");
        assert!(g.add_node(bob.clone()).unwrap());
        assert!(g.contains(&Triple::new(bob.guid.clone(), Predicate::WasMemberOf, Object::Class(SuperClass::Agent))));
        assert!(bob.guid.as_str().starts_with("Bob--a"));
        let before = g.triple_count();
        assert!(!g.add_node(bob).unwrap());
        assert_eq!(g.triple_count(), before);
        g.validate().unwrap();
    }

    #[test]
    fn conflicting_registration_rejected() {
        let mut g = ProvGraph::new();
        g.add_node(node(SubClass::File, "X")).unwrap();
        assert!(matches!(g.add_node(node(SubClass::Dataset, "X")), Err(Error::NodeConflict { .. })));
    }

    #[test]
    fn add_triple_checks() {
        let mut g = ProvGraph::new();
        let ds = node(SubClass::Dataset, "/Timestep_0/x");
        let act = node(SubClass::Create, "H5Dcreate2");
        let bob = node(SubClass::User, "Bob");
        for n in [&ds, &act, &bob] {
            g.add_node(n.clone()).unwrap();
        }
        let t = Triple::new(ds.guid.clone(), Predicate::WasCreatedBy, act.guid.clone());
        assert!(g.add_triple(t.clone()).unwrap());
        let n = g.triple_count();
        assert!(!g.add_triple(t).unwrap());
        assert_eq!(g.triple_count(), n);

        let bad = Triple::new(act.guid.clone(), Predicate::WasAttributedTo, bob.guid.clone());
        assert!(matches!(g.add_triple(bad), Err(Error::DomainViolation { .. })));

        let dangling = Triple::new(ds.guid.clone(), Predicate::WasReadBy, mint_guid(SubClass::Read, "r", 0, 9).unwrap());
        assert!(matches!(g.add_triple(dangling), Err(Error::UnknownGuid(_))));

        let literal_relation = Triple::new(ds.guid.clone(), Predicate::WasReadBy, Literal::Int(3));
        assert!(g.add_triple(literal_relation).is_err());
        let node_property = Triple::new(ds.guid.clone(), Predicate::HasValue, bob.guid.clone());
        assert!(matches!(g.add_triple(node_property), Err(Error::LiteralExpected(_))));
        g.validate().unwrap();
    }

    #[test]
    fn scan_uses_bound_positions() {
        let mut g = ProvGraph::new();
        assert!(g.scan(None, None, None).is_empty());
        let ds = node(SubClass::Dataset, "/Timestep_0/x");
        let act = node(SubClass::Read, "H5Dread");
        g.add_node(ds.clone()).unwrap();
        g.add_node(act.clone()).unwrap();
        g.add_triple(Triple::new(ds.guid.clone(), Predicate::WasReadBy, act.guid.clone())).unwrap();

        assert_eq!(g.scan(Some(&ds.guid), None, None).len(), 3);
        assert_eq!(g.scan(None, Some(Predicate::WasReadBy), None).len(), 1);
        let obj = Object::Node(act.guid.clone());
        assert_eq!(g.scan(None, None, Some(&obj)).len(), 1);
        assert_eq!(g.scan(Some(&act.guid), Some(Predicate::WasReadBy), None).len(), 0);
        assert_eq!(g.scan(None, Some(Predicate::WasMemberOf), Some(&Object::Class(SuperClass::Activity))).len(), 1);
        assert_eq!(g.scan(None, None, None).len(), g.triple_count());
    }

    #[test]
    fn absorb_rejects_divergent_nodes() {
        let mut a = ProvGraph::new();
        a.add_node(ProvNode::new(Guid::new("n").unwrap(), SubClass::File, "n").unwrap()).unwrap();
        let mut b = ProvGraph::new();
        b.add_node(ProvNode::new(Guid::new("n").unwrap(), SubClass::Group, "n").unwrap()).unwrap();
        assert!(a.absorb(&b).is_err());
        let snapshot = a.clone();
        a.absorb(&snapshot).unwrap();
        assert_eq!(a, snapshot);
    }
}
