//! Provenance vocabulary: class taxonomy, predicates, node identity and triples.
//!
//! Nodes fall into four super-classes (Entity, Activity, Agent, Extensible),
//! each refined by a fixed set of sub-classes. Relations are not nodes; they
//! only appear as [`Predicate`]s on [`Triple`]s.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const PROV_NS: &str = "http://www.w3.org/ns/prov#";
pub const PROVIO_NS: &str = "http://provio.dev/ns#";
pub const EXT_NS: &str = "http://provio.dev/ext#";

/// The three namespace prefixes every document declares, in emission order.
pub const PREFIXES: [(&str, &str); 3] = [("prov", PROV_NS), ("provio", PROVIO_NS), ("ns1", EXT_NS)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SuperClass {
    Entity,
    Activity,
    Agent,
    Extensible,
}

impl SuperClass {
    pub const ALL: [SuperClass; 4] = [
        SuperClass::Entity,
        SuperClass::Activity,
        SuperClass::Agent,
        SuperClass::Extensible,
    ];

    /// Prefixed IRI used as the object of `prov:wasMemberOf`.
    pub fn iri(self) -> &'static str {
        match self {
            SuperClass::Entity => "prov:Entity",
            SuperClass::Activity => "prov:Activity",
            SuperClass::Agent => "prov:Agent",
            SuperClass::Extensible => "provio:Extensible",
        }
    }

    pub fn from_iri(prefixed: &str) -> Option<SuperClass> {
        SuperClass::ALL.into_iter().find(|c| c.iri() == prefixed)
    }
}

impl fmt::Display for SuperClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.iri())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubClass {
    // Entity
    Directory,
    File,
    Group,
    Dataset,
    Attribute,
    Datatype,
    Link,
    // Activity
    Create,
    Open,
    Read,
    Write,
    Fsync,
    Rename,
    // Agent
    User,
    Rank,
    Program,
    Thread,
    // Extensible
    Checkpoint,
    Type,
    Configuration,
    Metrics,
}

impl SubClass {
    pub const ALL: [SubClass; 21] = [
        SubClass::Directory,
        SubClass::File,
        SubClass::Group,
        SubClass::Dataset,
        SubClass::Attribute,
        SubClass::Datatype,
        SubClass::Link,
        SubClass::Create,
        SubClass::Open,
        SubClass::Read,
        SubClass::Write,
        SubClass::Fsync,
        SubClass::Rename,
        SubClass::User,
        SubClass::Rank,
        SubClass::Program,
        SubClass::Thread,
        SubClass::Checkpoint,
        SubClass::Type,
        SubClass::Configuration,
        SubClass::Metrics,
    ];

    pub const ACTIVITIES: [SubClass; 6] = [
        SubClass::Create,
        SubClass::Open,
        SubClass::Read,
        SubClass::Write,
        SubClass::Fsync,
        SubClass::Rename,
    ];

    pub const ENTITIES: [SubClass; 7] = [
        SubClass::Directory,
        SubClass::File,
        SubClass::Group,
        SubClass::Dataset,
        SubClass::Attribute,
        SubClass::Datatype,
        SubClass::Link,
    ];

    pub const AGENTS: [SubClass; 4] = [SubClass::User, SubClass::Rank, SubClass::Program, SubClass::Thread];

    pub const EXTENSIBLES: [SubClass; 4] = [
        SubClass::Checkpoint,
        SubClass::Type,
        SubClass::Configuration,
        SubClass::Metrics,
    ];

    pub fn super_class(self) -> SuperClass {
        super_of(self)
    }

    pub fn is(self, class: SuperClass) -> bool {
        super_of(self) == class
    }

    pub fn name(self) -> &'static str {
        match self {
            SubClass::Directory => "Directory",
            SubClass::File => "File",
            SubClass::Group => "Group",
            SubClass::Dataset => "Dataset",
            SubClass::Attribute => "Attribute",
            SubClass::Datatype => "Datatype",
            SubClass::Link => "Link",
            SubClass::Create => "Create",
            SubClass::Open => "Open",
            SubClass::Read => "Read",
            SubClass::Write => "Write",
            SubClass::Fsync => "Fsync",
            SubClass::Rename => "Rename",
            SubClass::User => "User",
            SubClass::Rank => "Rank",
            SubClass::Program => "Program",
            SubClass::Thread => "Thread",
            SubClass::Checkpoint => "Checkpoint",
            SubClass::Type => "Type",
            SubClass::Configuration => "Configuration",
            SubClass::Metrics => "Metrics",
        }
    }
}

impl fmt::Display for SubClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubClass {
    type Err = Error;

    /// Case-insensitive, so config files can use lowercase names.
    fn from_str(s: &str) -> Result<Self> {
        SubClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown sub-class `{s}`")))
    }
}

/// Returns the unique super-class owning `sub`.
pub fn super_of(sub: SubClass) -> SuperClass {
    use SubClass::*;
    match sub {
        Directory | File | Group | Dataset | Attribute | Datatype | Link => SuperClass::Entity,
        Create | Open | Read | Write | Fsync | Rename => SuperClass::Activity,
        User | Rank | Program | Thread => SuperClass::Agent,
        Checkpoint | Type | Configuration | Metrics => SuperClass::Extensible,
    }
}

/// Predicate vocabulary. Declaration order is the order predicates are
/// emitted within a subject record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    WasMemberOf,
    SubClass,
    ActedOnBehalfOf,
    WasAssociatedWith,
    WasAttributedTo,
    WasDerivedFrom,
    WasCreatedBy,
    WasOpenedBy,
    WasReadBy,
    WasWrittenBy,
    WasFlushedBy,
    WasModifiedBy,
    Influenced,
    Elapsed,
    HasAccuracy,
    Version,
    HasValue,
}

impl Predicate {
    pub const ALL: [Predicate; 17] = [
        Predicate::WasMemberOf,
        Predicate::SubClass,
        Predicate::ActedOnBehalfOf,
        Predicate::WasAssociatedWith,
        Predicate::WasAttributedTo,
        Predicate::WasDerivedFrom,
        Predicate::WasCreatedBy,
        Predicate::WasOpenedBy,
        Predicate::WasReadBy,
        Predicate::WasWrittenBy,
        Predicate::WasFlushedBy,
        Predicate::WasModifiedBy,
        Predicate::Influenced,
        Predicate::Elapsed,
        Predicate::HasAccuracy,
        Predicate::Version,
        Predicate::HasValue,
    ];

    pub fn prefixed(self) -> &'static str {
        match self {
            Predicate::WasMemberOf => "prov:wasMemberOf",
            Predicate::SubClass => "provio:subClass",
            Predicate::ActedOnBehalfOf => "prov:actedOnBehalfOf",
            Predicate::WasAssociatedWith => "prov:wasAssociatedWith",
            Predicate::WasAttributedTo => "prov:wasAttributedTo",
            Predicate::WasDerivedFrom => "prov:wasDerivedFrom",
            Predicate::WasCreatedBy => "provio:wasCreatedBy",
            Predicate::WasOpenedBy => "provio:wasOpenedBy",
            Predicate::WasReadBy => "provio:wasReadBy",
            Predicate::WasWrittenBy => "provio:wasWrittenBy",
            Predicate::WasFlushedBy => "provio:wasFlushedBy",
            Predicate::WasModifiedBy => "provio:wasModifiedBy",
            Predicate::Influenced => "prov:influenced",
            Predicate::Elapsed => "provio:elapsed",
            Predicate::HasAccuracy => "provio:hasAccuracy",
            Predicate::Version => "ns1:Version",
            Predicate::HasValue => "ns1:hasValue",
        }
    }

    pub fn local_name(self) -> &'static str {
        let p = self.prefixed();
        &p[p.find(':').map_or(0, |i| i + 1)..]
    }

    pub fn from_prefixed(name: &str) -> Option<Predicate> {
        Predicate::ALL.into_iter().find(|p| p.prefixed() == name)
    }

    /// Property predicates take literal objects. `provio:subClass` counts as one.
    pub fn is_property(self) -> bool {
        matches!(
            self,
            Predicate::SubClass
                | Predicate::Elapsed
                | Predicate::HasAccuracy
                | Predicate::Version
                | Predicate::HasValue
        )
    }

    /// Predicates linking two nodes (everything except properties and membership).
    pub fn is_relation(self) -> bool {
        !self.is_property() && self != Predicate::WasMemberOf
    }

    /// Property predicates a caller may attach to an extensible node.
    pub fn is_user_property(self) -> bool {
        self.is_property() && self != Predicate::SubClass
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefixed())
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Predicate::from_prefixed(s).ok_or_else(|| Error::UnknownPredicate(s.to_owned()))
    }
}

impl Serialize for Predicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.prefixed())
    }
}

/// Maps an I/O activity sub-class to the relation linking a data object to it.
pub fn relation_for_io(api: SubClass) -> Result<Predicate> {
    Ok(match api {
        SubClass::Create => Predicate::WasCreatedBy,
        SubClass::Open => Predicate::WasOpenedBy,
        SubClass::Read => Predicate::WasReadBy,
        SubClass::Write => Predicate::WasWrittenBy,
        SubClass::Fsync => Predicate::WasFlushedBy,
        SubClass::Rename => Predicate::WasModifiedBy,
        other => return Err(Error::NotAnActivity(other)),
    })
}

/// Globally unique node identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guid(Arc<str>);

impl Guid {
    pub fn new(text: impl AsRef<str>) -> Result<Guid> {
        let text = text.as_ref();
        if text.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(Guid(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Guid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Guid({:?})", &*self.0)
    }
}

impl fmt::Display for Guid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Guid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// A finite `f64` with bitwise equality, so literals can live in hash sets.
#[derive(Clone, Copy, Debug)]
pub struct Decimal(f64);

impl Decimal {
    pub fn new(v: f64) -> Result<Decimal> {
        if !v.is_finite() {
            return Err(Error::NonFiniteDecimal);
        }
        // -0.0 and 0.0 must hash alike
        Ok(Decimal(if v == 0.0 { 0.0 } else { v }))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Decimal {}

impl Hash for Decimal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Str(String),
    Int(i64),
    Dec(Decimal),
}

impl Literal {
    pub fn str(s: impl Into<String>) -> Literal {
        Literal::Str(s.into())
    }

    pub fn dec(v: f64) -> Result<Literal> {
        Decimal::new(v).map(Literal::Dec)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Str(_) => None,
            Literal::Int(i) => Some(*i as f64),
            Literal::Dec(d) => Some(d.get()),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Literal::Int(i) => Some(*i),
            _ => None,
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Literal::Str(v) => s.serialize_str(v),
            Literal::Int(i) => s.serialize_i64(*i),
            Literal::Dec(d) => s.serialize_f64(d.get()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => f.write_str(s),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Dec(d) => f.write_str(&format_decimal(d.get())),
        }
    }
}

/// Shortest round-tripping decimal text that still reads back as a decimal
/// (always contains a `.` or an exponent).
pub fn format_decimal(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') || s.contains('E') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Object position of a triple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Node(Guid),
    /// One of the four super-class IRIs (object of `prov:wasMemberOf`).
    Class(SuperClass),
    Literal(Literal),
}

impl Object {
    pub fn as_node(&self) -> Option<&Guid> {
        match self {
            Object::Node(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Object::Literal(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Node(g) => g.fmt(f),
            Object::Class(c) => c.fmt(f),
            Object::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Guid> for Object {
    fn from(g: Guid) -> Self {
        Object::Node(g)
    }
}

impl From<Literal> for Object {
    fn from(l: Literal) -> Self {
        Object::Literal(l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Guid,
    pub predicate: Predicate,
    pub object: Object,
}

impl Triple {
    pub fn new(subject: Guid, predicate: Predicate, object: impl Into<Object>) -> Triple {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProvNode {
    pub guid: Guid,
    pub sub_class: SubClass,
    pub label: String,
}

impl ProvNode {
    pub fn new(guid: Guid, sub_class: SubClass, label: impl Into<String>) -> Result<ProvNode> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(ProvNode { guid, sub_class, label })
    }

    /// Builds a node whose GUID follows the standard minting scheme.
    pub fn minted(sub_class: SubClass, label: &str, rank: u32, seq: u64) -> Result<ProvNode> {
        let guid = mint_guid(sub_class, label, rank, seq)?;
        ProvNode::new(guid, sub_class, label)
    }

    pub fn super_class(&self) -> SuperClass {
        super_of(self.sub_class)
    }
}

const AGENT_MARK: &str = "--a";
const ACTIVITY_MARK: &str = "--b";

/// 64-bit FNV-1a; stable across builds and platforms, unlike `DefaultHasher`.
fn stable_hash(sub_class: SubClass, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in sub_class.name().bytes().chain([0u8]).chain(label.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Mints a node identifier.
///
/// Agents get `<label>--a<hash>` (stable across processes), entities and
/// extensible nodes use their label directly, and activities get
/// `<label>--b<rank>.<seq>` so that instances never collide across ranks.
pub fn mint_guid(sub_class: SubClass, label: &str, rank: u32, seq: u64) -> Result<Guid> {
    if label.is_empty() {
        return Err(Error::EmptyLabel);
    }
    match super_of(sub_class) {
        SuperClass::Agent => Guid::new(format!("{label}{AGENT_MARK}{:016x}", stable_hash(sub_class, label))),
        SuperClass::Activity => Guid::new(format!("{label}{ACTIVITY_MARK}{rank}.{seq}")),
        SuperClass::Entity | SuperClass::Extensible => Guid::new(label),
    }
}

/// Short tag separating activity GUIDs of sessions that share a rank but
/// differ in user or program.
pub fn session_tag(user: &str, program: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in user.bytes().chain([0u8]).chain(program.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{:08x}", (h >> 32) as u32 ^ h as u32)
}

/// Activity GUID scoped to one tracking session:
/// `<label>--b<tag>.<rank>.<seq>`.
pub fn mint_activity_guid(label: &str, tag: &str, rank: u32, seq: u64) -> Result<Guid> {
    if label.is_empty() {
        return Err(Error::EmptyLabel);
    }
    Guid::new(format!("{label}{ACTIVITY_MARK}{tag}.{rank}.{seq}"))
}

/// Recovers the label encoded in a minted GUID.
pub fn label_of(sub_class: SubClass, guid: &Guid) -> String {
    let text = guid.as_str();
    let mark = match super_of(sub_class) {
        SuperClass::Agent => AGENT_MARK,
        SuperClass::Activity => ACTIVITY_MARK,
        _ => return text.to_owned(),
    };
    match text.rsplit_once(mark) {
        Some((label, _)) if !label.is_empty() => label.to_owned(),
        _ => text.to_owned(),
    }
}

/// Checks the domain/range constraint of a relation predicate, given the
/// sub-classes of its subject and (node) object.
pub fn check_relation(predicate: Predicate, subject: SubClass, object: SubClass) -> Result<()> {
    use SuperClass::*;
    let (s, o) = (super_of(subject), super_of(object));
    let ok = match predicate {
        Predicate::WasAttributedTo => s == Entity && o == Agent,
        Predicate::ActedOnBehalfOf => s == Agent && o == Agent,
        Predicate::WasAssociatedWith => s == Activity && o == Agent,
        Predicate::WasDerivedFrom => s == Entity && o == Entity,
        Predicate::Influenced => s == Extensible && (o == Extensible || o == Entity),
        Predicate::WasCreatedBy => s == Entity && object == SubClass::Create,
        Predicate::WasOpenedBy => s == Entity && object == SubClass::Open,
        Predicate::WasReadBy => s == Entity && object == SubClass::Read,
        Predicate::WasWrittenBy => s == Entity && object == SubClass::Write,
        Predicate::WasFlushedBy => s == Entity && object == SubClass::Fsync,
        Predicate::WasModifiedBy => s == Entity && object == SubClass::Rename,
        Predicate::WasMemberOf => false,
        p if p.is_property() => return Err(Error::LiteralExpected(p)),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DomainViolation {
            predicate,
            detail: format!("{subject} -> {object}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn super_class_partition() {
        assert_eq!(super_of(SubClass::Dataset), SuperClass::Entity);
        assert_eq!(super_of(SubClass::Rank), SuperClass::Agent);
        assert_eq!(super_of(SubClass::Checkpoint), SuperClass::Extensible);
        let count = |c| SubClass::ALL.iter().filter(|s| s.is(c)).count();
        assert_eq!(
            [count(SuperClass::Entity), count(SuperClass::Activity), count(SuperClass::Agent), count(SuperClass::Extensible)],
            [7, 6, 4, 4]
        );
        for s in SubClass::ENTITIES {
            assert!(s.is(SuperClass::Entity));
        }
        for s in SubClass::ACTIVITIES {
            assert!(s.is(SuperClass::Activity));
        }
        for s in SubClass::AGENTS {
            assert!(s.is(SuperClass::Agent));
        }
        for s in SubClass::EXTENSIBLES {
            assert!(s.is(SuperClass::Extensible));
        }
    }

    #[test]
    fn io_relations() {
        assert_eq!(relation_for_io(SubClass::Read).unwrap(), Predicate::WasReadBy);
        assert_eq!(relation_for_io(SubClass::Fsync).unwrap(), Predicate::WasFlushedBy);
        assert_eq!(relation_for_io(SubClass::Rename).unwrap(), Predicate::WasModifiedBy);
        assert_eq!(relation_for_io(SubClass::Create).unwrap(), Predicate::WasCreatedBy);
        assert!(matches!(relation_for_io(SubClass::File), Err(Error::NotAnActivity(SubClass::File))));
    }

    #[test]
    fn guid_shapes() {
        let program = mint_guid(SubClass::Program, "vpicio_un_h5.exe", 0, 0).unwrap();
        assert!(program.as_str().starts_with("vpicio_un_h5.exe--a"));
        assert_eq!(program, mint_guid(SubClass::Program, "vpicio_un_h5.exe", 7, 99).unwrap());
        assert_eq!(label_of(SubClass::Program, &program), "vpicio_un_h5.exe");

        let ds = mint_guid(SubClass::Dataset, "/Timestep_0/x", 0, 0).unwrap();
        assert_eq!(ds.as_str(), "/Timestep_0/x");

        let w5 = mint_guid(SubClass::Write, "posix_write", 0, 5).unwrap();
        let w6 = mint_guid(SubClass::Write, "posix_write", 0, 6).unwrap();
        assert_ne!(w5, w6);
        assert_eq!(mint_guid(SubClass::Create, "H5Dcreate2", 0, 1).unwrap().as_str(), "H5Dcreate2--b0.1");
        assert_eq!(label_of(SubClass::Write, &w5), "posix_write");

        assert!(matches!(mint_guid(SubClass::User, "", 0, 0), Err(Error::EmptyLabel)));
    }

    #[test]
    fn activity_guids_are_scoped_to_the_session() {
        let a = mint_activity_guid("posix_open", &session_tag("u", "tdms2h5"), 0, 1).unwrap();
        let b = mint_activity_guid("posix_open", &session_tag("u", "decimate"), 0, 1).unwrap();
        let c = mint_activity_guid("posix_open", &session_tag("v", "tdms2h5"), 0, 1).unwrap();
        assert!(a != b && a != c && b != c);
        assert_eq!(session_tag("u", "tdms2h5").len(), 8);
        assert_eq!(label_of(SubClass::Open, &a), "posix_open");
        assert!(matches!(mint_activity_guid("", "00000000", 0, 1), Err(Error::EmptyLabel)));
    }

    #[test]
    fn agents_with_same_label_but_different_class_do_not_collide() {
        let u = mint_guid(SubClass::User, "x", 0, 0).unwrap();
        let p = mint_guid(SubClass::Program, "x", 0, 0).unwrap();
        assert_ne!(u, p);
    }

    #[test]
    fn relation_constraints() {
        assert!(check_relation(Predicate::WasAttributedTo, SubClass::File, SubClass::Program).is_ok());
        assert!(check_relation(Predicate::WasAttributedTo, SubClass::Create, SubClass::User).is_err());
        assert!(check_relation(Predicate::WasReadBy, SubClass::Dataset, SubClass::Read).is_ok());
        assert!(check_relation(Predicate::WasReadBy, SubClass::Dataset, SubClass::Write).is_err());
        assert!(check_relation(Predicate::Influenced, SubClass::Configuration, SubClass::Checkpoint).is_ok());
        assert!(check_relation(Predicate::Influenced, SubClass::Configuration, SubClass::File).is_ok());
        assert!(check_relation(Predicate::Influenced, SubClass::File, SubClass::Checkpoint).is_err());
        assert!(matches!(
            check_relation(Predicate::HasValue, SubClass::Configuration, SubClass::Checkpoint),
            Err(Error::LiteralExpected(_))
        ));
    }

    #[test]
    fn decimal_text_reads_back_as_decimal() {
        assert_eq!(format_decimal(0.0), "0.0");
        assert_eq!(format_decimal(256.0), "256.0");
        assert_eq!(format_decimal(0.125), "0.125");
        assert!(Decimal::new(f64::NAN).is_err());
        assert_eq!(Decimal::new(-0.0).unwrap(), Decimal::new(0.0).unwrap());
    }

    #[test]
    fn predicate_names_round_trip() {
        for p in Predicate::ALL {
            assert_eq!(p.prefixed().parse::<Predicate>().unwrap(), p);
        }
        assert!("prov:used".parse::<Predicate>().is_err());
        assert_eq!(Predicate::WasCreatedBy.local_name(), "wasCreatedBy");
    }
}
