use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use parking_lot::Mutex;

use super::clock::{Clock, StopSignal, SystemClock};
use super::config::{FlushPolicy, TrackingConfig};
use crate::error::{Error, Result};
use crate::graph::ProvGraph;
use crate::merge::subgraph_file_name;
use crate::model::{
    check_relation, mint_activity_guid, relation_for_io, session_tag, Guid, Literal, Predicate, ProvNode, SubClass,
    SuperClass, Triple,
};
use crate::turtle::serialize_turtle;

/// Identity of the running process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentContext {
    pub user: String,
    pub program: String,
    pub rank: u32,
    pub thread_label: String,
    /// Sub-class of the agent between program and user: `Thread` or `Rank`.
    pub executor: SubClass,
}

impl AgentContext {
    /// Thread label defaults to `MPI_rank_<rank>`.
    pub fn new(user: impl Into<String>, program: impl Into<String>, rank: u32) -> AgentContext {
        AgentContext {
            user: user.into(),
            program: program.into(),
            rank,
            thread_label: format!("MPI_rank_{rank}"),
            executor: SubClass::Thread,
        }
    }

    pub fn with_thread(mut self, label: impl Into<String>) -> Self {
        self.thread_label = label.into();
        self
    }

    pub fn with_executor(mut self, executor: SubClass) -> Self {
        self.executor = executor;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.user.is_empty() || self.program.is_empty() || self.thread_label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if !matches!(self.executor, SubClass::Thread | SubClass::Rank) {
            return Err(Error::Config(format!("executor must be Thread or Rank, not {}", self.executor)));
        }
        Ok(())
    }
}

/// One observed I/O call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoEvent {
    pub api_name: String,
    pub api_class: SubClass,
    pub target_kind: SubClass,
    pub target_path: String,
    pub duration_us: Option<u64>,
}

/// Sentinel returned by [`Session::record_extensible`] when the class is disabled.
pub const UNTRACKED: &str = "untracked";

type ObjectKey = (SubClass, String);

struct OpenObject {
    lock: Arc<Mutex<()>>,
    handles: usize,
}

struct Shared {
    ctx: AgentContext,
    cfg: TrackingConfig,
    clock: Arc<dyn Clock>,
    graph: Mutex<ProvGraph>,
    seq: AtomicU64,
    tag: String,
    program: Option<Guid>,
    open_objects: Mutex<HashMap<ObjectKey, OpenObject>>,
    diagnostics: AtomicU64,
    flushes: AtomicU64,
    flush_lock: Mutex<()>,
    ended: AtomicBool,
    stop: StopSignal,
    path: PathBuf,
    /// Baseline mode: no graph, no files, no clock reads.
    inert: bool,
}

/// The per-process provenance tracker.
///
/// `record_io` and `record_extensible` may be called from many threads; graph
/// mutation is a short critical section, and the periodic flusher snapshots
/// under the same guard.
pub struct Session {
    shared: Arc<Shared>,
    flusher: Mutex<Option<JoinHandle<()>>>,
}

impl Session {
    pub fn begin(ctx: AgentContext, cfg: TrackingConfig) -> Result<Session> {
        Session::begin_with_clock(ctx, cfg, Arc::new(SystemClock::default()))
    }

    pub fn begin_with_clock(ctx: AgentContext, cfg: TrackingConfig, clock: Arc<dyn Clock>) -> Result<Session> {
        ctx.validate()?;
        let cfg = cfg.normalized()?;
        fs::create_dir_all(&cfg.output_dir)?;
        let probe = cfg.output_dir.join(format!(".provio-probe-{}-{}", std::process::id(), ctx.rank));
        fs::write(&probe, b"")?;
        let _ = fs::remove_file(&probe);

        let mut graph = ProvGraph::new();
        let program = seed_agents(&mut graph, &ctx, &cfg)?;
        let path = cfg.output_dir.join(subgraph_file_name(&ctx.program, ctx.rank));
        let tag = session_tag(&ctx.user, &ctx.program);
        let periodic = match cfg.flush_policy {
            FlushPolicy::Periodic(d) => Some(d.as_micros() as u64),
            FlushPolicy::AtEnd => None,
        };
        let shared = Arc::new(Shared {
            ctx,
            cfg,
            clock,
            graph: Mutex::new(graph),
            seq: AtomicU64::new(0),
            tag,
            program,
            open_objects: Mutex::new(HashMap::new()),
            diagnostics: AtomicU64::new(0),
            flushes: AtomicU64::new(0),
            flush_lock: Mutex::new(()),
            ended: AtomicBool::new(false),
            stop: StopSignal::default(),
            path,
            inert: false,
        });
        let flusher = periodic.map(|interval| {
            let shared = Arc::clone(&shared);
            std::thread::Builder::new()
                .name("provio-flusher".into())
                .spawn(move || {
                    let mut due = shared.clock.now_us() + interval;
                    while shared.clock.wait_until(due, &shared.stop) {
                        if let Err(_e) = shared.flush() {
                            shared.diagnostics.fetch_add(1, Ordering::Relaxed);
                        }
                        due += interval;
                    }
                })
                .expect("spawn flusher thread")
        });
        Ok(Session {
            shared,
            flusher: Mutex::new(flusher),
        })
    }

    /// A session that records nothing and never touches the clock or disk.
    /// Used as the untracked baseline.
    pub fn untracked(ctx: AgentContext) -> Session {
        let shared = Arc::new(Shared {
            ctx,
            cfg: TrackingConfig::none(""),
            clock: Arc::new(SystemClock::default()),
            graph: Mutex::new(ProvGraph::new()),
            seq: AtomicU64::new(0),
            tag: String::new(),
            program: None,
            open_objects: Mutex::new(HashMap::new()),
            diagnostics: AtomicU64::new(0),
            flushes: AtomicU64::new(0),
            flush_lock: Mutex::new(()),
            ended: AtomicBool::new(false),
            stop: StopSignal::default(),
            path: PathBuf::new(),
            inert: true,
        });
        Session {
            shared,
            flusher: Mutex::new(None),
        }
    }

    pub fn context(&self) -> &AgentContext {
        &self.shared.ctx
    }

    pub fn config(&self) -> &TrackingConfig {
        &self.shared.cfg
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.shared.clock
    }

    pub fn is_ended(&self) -> bool {
        self.shared.ended.load(Ordering::SeqCst)
    }

    /// Internal tracking failures; never surfaced on the I/O path.
    pub fn diagnostics(&self) -> u64 {
        self.shared.diagnostics.load(Ordering::Relaxed)
    }

    pub fn flush_count(&self) -> u64 {
        self.shared.flushes.load(Ordering::SeqCst)
    }

    pub fn subgraph_path(&self) -> &Path {
        &self.shared.path
    }

    pub fn snapshot(&self) -> ProvGraph {
        self.shared.graph.lock().clone()
    }

    pub fn with_graph<R>(&self, f: impl FnOnce(&ProvGraph) -> R) -> R {
        f(&self.shared.graph.lock())
    }

    /// True when an event of this shape would be recorded.
    pub fn wants(&self, api_class: SubClass, target_kind: SubClass) -> bool {
        let s = &self.shared;
        !s.inert
            && !s.ended.load(Ordering::Relaxed)
            && s.cfg.is_enabled(api_class)
            && s.cfg.is_enabled(target_kind)
    }

    /// Runs `op` as the native half of a tracked I/O call.
    ///
    /// When the event is wanted, the call is timed (if durations are on) and
    /// recorded after `op` succeeds. The object's lock is held across both
    /// halves when the object is registered as open. Failed calls record
    /// nothing.
    pub fn observe<T, E>(
        &self,
        api_class: SubClass,
        api_name: &str,
        target_kind: SubClass,
        target_path: &str,
        op: impl FnOnce() -> std::result::Result<T, E>,
    ) -> std::result::Result<T, E> {
        if !self.wants(api_class, target_kind) {
            return op();
        }
        let lock = self
            .shared
            .open_objects
            .lock()
            .get(&(target_kind, target_path.to_owned()))
            .map(|o| Arc::clone(&o.lock));
        let _guard = lock.as_ref().map(|l| l.lock());
        let timed = self.shared.cfg.track_duration;
        let start = timed.then(|| self.shared.clock.now_us());
        let out = op()?;
        let duration_us = start.map(|t0| self.shared.clock.now_us().saturating_sub(t0));
        self.record_io(IoEvent {
            api_name: api_name.to_owned(),
            api_class,
            target_kind,
            target_path: target_path.to_owned(),
            duration_us,
        });
        Ok(out)
    }

    /// Records one I/O event. Disabled classes are a silent pass-through and
    /// internal failures only bump [`Session::diagnostics`].
    pub fn record_io(&self, ev: IoEvent) {
        if !self.wants(ev.api_class, ev.target_kind) {
            return;
        }
        if let Err(_e) = self.shared.record_io(&ev) {
            self.shared.diagnostics.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// Records a workflow-level fact (checkpoint, configuration, metric, type)
    /// and returns its GUID for later linking.
    pub fn record_extensible(
        &self,
        kind: SubClass,
        name: &str,
        payload: &[(Predicate, Literal)],
        links: &[(Predicate, Guid)],
    ) -> Result<Guid> {
        if !kind.is(SuperClass::Extensible) {
            return Err(Error::NotExtensible(kind));
        }
        if let Some((p, _)) = payload.iter().find(|(p, _)| !p.is_user_property()) {
            return Err(Error::DomainViolation {
                predicate: *p,
                detail: "a user-supplied property".into(),
            });
        }
        let s = &self.shared;
        if s.inert || s.ended.load(Ordering::Relaxed) || !s.cfg.is_enabled(kind) {
            return Guid::new(UNTRACKED);
        }
        let node = ProvNode::minted(kind, name, s.ctx.rank, 0)?;
        let guid = node.guid.clone();
        let mut g = s.graph.lock();
        let links: Vec<_> = links.iter().filter(|(_, target)| target.as_str() != UNTRACKED).collect();
        for (p, target) in &links {
            let target_node = g.node(target).ok_or_else(|| Error::UnknownGuid(target.clone()))?;
            check_relation(*p, kind, target_node.sub_class)?;
        }
        g.add_node(node)?;
        for (p, value) in payload {
            g.add_triple(Triple::new(guid.clone(), *p, value.clone()))?;
        }
        for (p, target) in links {
            g.add_triple(Triple::new(guid.clone(), *p, target.clone()))?;
        }
        Ok(guid)
    }

    /// Adds a relation between two already-tracked nodes.
    pub fn link(&self, subject: &Guid, predicate: Predicate, object: &Guid) -> Result<()> {
        let s = &self.shared;
        if s.inert || subject.as_str() == UNTRACKED || object.as_str() == UNTRACKED {
            return Ok(());
        }
        s.graph
            .lock()
            .add_triple(Triple::new(subject.clone(), predicate, object.clone()))
            .map(|_| ())
    }

    /// Registers an open handle on a data object; events on the same object
    /// are serialized while any handle is open.
    pub fn open_object(&self, kind: SubClass, path: &str) {
        if self.shared.inert {
            return;
        }
        self.shared
            .open_objects
            .lock()
            .entry((kind, path.to_owned()))
            .or_insert_with(|| OpenObject {
                lock: Arc::new(Mutex::new(())),
                handles: 0,
            })
            .handles += 1;
    }

    pub fn close_object(&self, kind: SubClass, path: &str) {
        let mut open = self.shared.open_objects.lock();
        let key = (kind, path.to_owned());
        if let Some(o) = open.get_mut(&key) {
            o.handles -= 1;
            if o.handles == 0 {
                open.remove(&key);
            }
        }
    }

    pub fn open_object_count(&self) -> usize {
        self.shared.open_objects.lock().len()
    }

    /// Writes a consistent snapshot to the sub-graph file (atomically, via a
    /// temp file and rename). The in-memory graph is kept.
    pub fn flush(&self) -> Result<PathBuf> {
        if self.shared.inert {
            return Ok(PathBuf::new());
        }
        self.shared.flush()
    }

    /// Stops the flusher, drains open objects and performs the final flush.
    pub fn end(&self) -> Result<PathBuf> {
        if self.shared.ended.swap(true, Ordering::SeqCst) {
            return Err(Error::SessionEnded);
        }
        self.shared.stop.stop();
        if let Some(handle) = self.flusher.lock().take() {
            let _ = handle.join();
        }
        self.shared.open_objects.lock().clear();
        if self.shared.inert {
            return Ok(PathBuf::new());
        }
        self.shared.flush()
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        self.shared.stop.stop();
        if let Some(handle) = self.flusher.get_mut().take() {
            let _ = handle.join();
        }
    }
}

impl Shared {
    fn record_io(&self, ev: &IoEvent) -> Result<()> {
        let relation = relation_for_io(ev.api_class)?;
        if !ev.target_kind.is(SuperClass::Entity) {
            return Err(Error::NotAnEntity(Guid::new(&ev.target_path)?));
        }
        let entity = ProvNode::minted(ev.target_kind, &ev.target_path, self.ctx.rank, 0)?;
        let mut g = self.graph.lock();
        // entity first, so a conflicting registration leaves no orphan activity
        g.add_node(entity.clone())?;
        let seq = self.seq.fetch_add(1, Ordering::SeqCst) + 1;
        let guid = mint_activity_guid(&ev.api_name, &self.tag, self.ctx.rank, seq)?;
        let activity = ProvNode::new(guid, ev.api_class, &ev.api_name)?;
        let act = activity.guid.clone();
        g.add_node(activity)?;
        g.add_triple(Triple::new(entity.guid.clone(), relation, act.clone()))?;
        if let Some(program) = &self.program {
            g.add_triple(Triple::new(act.clone(), Predicate::WasAssociatedWith, program.clone()))?;
            g.add_triple(Triple::new(entity.guid, Predicate::WasAttributedTo, program.clone()))?;
        }
        if self.cfg.track_duration {
            if let Some(us) = ev.duration_us {
                g.add_triple(Triple::new(act, Predicate::Elapsed, Literal::Int(us as i64)))?;
            }
        }
        Ok(())
    }

    fn flush(&self) -> Result<PathBuf> {
        let _serial = self.flush_lock.lock();
        let text = serialize_turtle(&self.graph.lock());
        let tmp = self.path.with_extension("ttl.tmp");
        fs::write(&tmp, text.as_bytes())?;
        fs::rename(&tmp, &self.path)?;
        self.flushes.fetch_add(1, Ordering::SeqCst);
        Ok(self.path.clone())
    }
}

/// Adds the enabled agents and the acted-on-behalf-of chain
/// program -> executor -> user, skipping disabled links. Returns the program
/// GUID when programs are tracked.
fn seed_agents(g: &mut ProvGraph, ctx: &AgentContext, cfg: &TrackingConfig) -> Result<Option<Guid>> {
    let chain = [
        (SubClass::Program, ctx.program.as_str()),
        (ctx.executor, ctx.thread_label.as_str()),
        (SubClass::User, ctx.user.as_str()),
    ];
    let mut nodes = Vec::new();
    for (sub, label) in chain {
        if cfg.is_enabled(sub) {
            let node = ProvNode::minted(sub, label, ctx.rank, 0)?;
            g.add_node(node.clone())?;
            nodes.push(node);
        }
    }
    for pair in nodes.windows(2) {
        g.add_triple(Triple::new(pair[0].guid.clone(), Predicate::ActedOnBehalfOf, pair[1].guid.clone()))?;
    }
    Ok(nodes
        .iter()
        .find(|n| n.sub_class == SubClass::Program)
        .map(|n| n.guid.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mint_guid, Object};
    use crate::tracker::clock::{ManualClock, StepClock};
    use crate::turtle::parse_turtle;
    use std::time::Duration;

    fn ctx() -> AgentContext {
        AgentContext::new("Bob", "vpicio_un_h5.exe", 0)
    }

    fn ev(class: SubClass, name: &str, kind: SubClass, path: &str) -> IoEvent {
        IoEvent {
            api_name: name.into(),
            api_class: class,
            target_kind: kind,
            target_path: path.into(),
            duration_us: None,
        }
    }

    #[test]
    fn begin_seeds_agent_chain() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        s.with_graph(|g| {
            assert_eq!(g.node_count(), 3);
            assert_eq!(g.scan(None, Some(Predicate::ActedOnBehalfOf), None).len(), 2);
        });
        s.end().unwrap();
    }

    #[test]
    fn agents_disabled_means_empty_graph() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrackingConfig::all(dir.path())
            .disable(SubClass::User)
            .disable(SubClass::Thread)
            .disable(SubClass::Rank)
            .disable(SubClass::Program);
        let cfg = SubClass::ACTIVITIES.into_iter().fold(cfg, TrackingConfig::disable);
        let s = Session::begin(ctx(), cfg).unwrap();
        assert!(s.snapshot().is_empty());
    }

    #[test]
    fn create_event_shape() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        s.record_io(ev(SubClass::Create, "H5Dcreate2", SubClass::Dataset, "/Timestep_0/x"));
        let g = s.snapshot();
        let ds = Guid::new("/Timestep_0/x").unwrap();
        let act = mint_activity_guid("H5Dcreate2", &session_tag("Bob", "vpicio_un_h5.exe"), 0, 1).unwrap();
        assert!(g.contains(&Triple::new(ds.clone(), Predicate::WasCreatedBy, act.clone())));
        let program = mint_guid(SubClass::Program, "vpicio_un_h5.exe", 0, 0).unwrap();
        assert!(g.contains(&Triple::new(act, Predicate::WasAssociatedWith, program.clone())));
        assert!(g.contains(&Triple::new(ds, Predicate::WasAttributedTo, program)));
        g.validate().unwrap();
    }

    #[test]
    fn disabled_class_is_pass_through() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path()).disable(SubClass::Read)).unwrap();
        let before = s.snapshot().triple_count();
        s.record_io(ev(SubClass::Read, "posix_read", SubClass::File, "a.txt"));
        assert_eq!(s.snapshot().triple_count(), before);
        let out: std::result::Result<u32, ()> =
            s.observe(SubClass::Read, "posix_read", SubClass::File, "a.txt", || Ok(7));
        assert_eq!(out, Ok(7));
        assert_eq!(s.snapshot().triple_count(), before);
    }

    #[test]
    fn durations_sum_to_clock_deltas() {
        let dir = tempfile::tempdir().unwrap();
        let clock = Arc::new(StepClock::new(0, vec![1, 2, 3]));
        let s = Session::begin_with_clock(ctx(), TrackingConfig::all(dir.path()).with_durations(true), clock).unwrap();
        for i in 0..100 {
            let r: std::result::Result<(), ()> =
                s.observe(SubClass::Write, "posix_write", SubClass::File, &format!("f{}", i % 3), || Ok(()));
            r.unwrap();
        }
        // event i reads the clock twice; its elapsed is delta[(2i + 1) % 3]
        let expected: u64 = (0..100).map(|i| [1u64, 2, 3][(2 * i + 1) % 3]).sum();
        let g = s.snapshot();
        let elapsed = g.scan(None, Some(Predicate::Elapsed), None);
        assert_eq!(elapsed.len(), 100);
        let total: i64 = elapsed.iter().map(|t| t.object.as_literal().unwrap().as_int().unwrap()).sum();
        assert_eq!(total as u64, expected);
    }

    #[test]
    fn triple_count_formula() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path()).with_durations(true)).unwrap();
        let base = s.snapshot().triple_count();
        let paths = ["a", "b", "a", "c", "b", "a"];
        for p in paths {
            s.observe::<(), ()>(SubClass::Read, "posix_read", SubClass::File, p, || Ok(())).unwrap();
        }
        let distinct = 3;
        let expected = base + paths.len() * (2 + 1 + 1 + 1) + distinct * (2 + 1);
        assert_eq!(s.snapshot().triple_count(), expected);
    }

    #[test]
    fn extensible_records() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        let ckpt = s.record_extensible(SubClass::Checkpoint, "Checkpoint_3", &[], &[]).unwrap();
        let cfg = s
            .record_extensible(
                SubClass::Configuration,
                "Batch_Size_B",
                &[(Predicate::HasValue, Literal::Int(256))],
                &[(Predicate::Influenced, ckpt.clone())],
            )
            .unwrap();
        let g = s.snapshot();
        assert!(g.contains(&Triple::new(cfg.clone(), Predicate::Influenced, ckpt)));
        assert!(g.contains(&Triple::new(cfg, Predicate::HasValue, Literal::Int(256))));

        let m = s
            .record_extensible(SubClass::Metrics, "accuracy@epoch7", &[(Predicate::HasAccuracy, Literal::dec(0.0).unwrap())], &[])
            .unwrap();
        assert_eq!(s.snapshot().scan(Some(&m), Some(Predicate::HasAccuracy), None).len(), 1);

        assert!(s.record_extensible(SubClass::Metrics, "m", &[(Predicate::SubClass, Literal::str("x"))], &[]).is_err());
        assert!(matches!(s.record_extensible(SubClass::File, "m", &[], &[]), Err(Error::NotExtensible(_))));
        let missing = Guid::new("nope").unwrap();
        assert!(s.record_extensible(SubClass::Metrics, "m2", &[], &[(Predicate::Influenced, missing)]).is_err());
    }

    #[test]
    fn disabled_extensible_returns_sentinel() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path()).disable(SubClass::Checkpoint)).unwrap();
        let g = s.record_extensible(SubClass::Checkpoint, "c", &[], &[]).unwrap();
        assert_eq!(g.as_str(), UNTRACKED);
        let cfg = s.record_extensible(SubClass::Configuration, "b", &[], &[(Predicate::Influenced, g)]).unwrap();
        assert_eq!(s.snapshot().scan(Some(&cfg), Some(Predicate::Influenced), None).len(), 0);
    }

    #[test]
    fn flush_round_trips_and_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        s.record_io(ev(SubClass::Create, "H5Dcreate2", SubClass::Dataset, "/Timestep_0/x"));
        let path = s.flush().unwrap();
        let first = fs::read(&path).unwrap();
        assert_eq!(parse_turtle(std::str::from_utf8(&first).unwrap()).unwrap(), s.snapshot());
        s.flush().unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
        assert_eq!(path.file_name().unwrap(), "prov_vpicio_un_h5.exe_0.ttl");
    }

    #[test]
    fn empty_session_flushes_prefix_only() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::none(dir.path())).unwrap();
        let path = s.flush().unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
    }

    #[test]
    fn end_twice_is_error() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        let path = s.end().unwrap();
        let g = parse_turtle(&fs::read_to_string(path).unwrap()).unwrap();
        assert!(g.nodes().all(|n| n.super_class() == SuperClass::Agent));
        assert!(matches!(s.end(), Err(Error::SessionEnded)));
        // events after end are dropped
        s.record_io(ev(SubClass::Create, "x", SubClass::File, "f"));
        assert_eq!(s.snapshot().node_count(), 3);
    }

    #[test]
    fn end_contains_all_events_and_drains_objects() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        s.open_object(SubClass::File, "f");
        for _ in 0..25 {
            s.observe::<(), ()>(SubClass::Write, "posix_write", SubClass::File, "f", || Ok(())).unwrap();
        }
        assert_eq!(s.open_object_count(), 1);
        let path = s.end().unwrap();
        assert_eq!(s.open_object_count(), 0);
        let g = parse_turtle(&fs::read_to_string(path).unwrap()).unwrap();
        let acts = g.scan(None, Some(Predicate::WasMemberOf), Some(&Object::Class(SuperClass::Activity)));
        assert_eq!(acts.len(), 25);
    }

    #[test]
    fn unwritable_output_dir() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, b"").unwrap();
        assert!(Session::begin(ctx(), TrackingConfig::all(file.join("sub"))).is_err());
    }

    #[test]
    fn periodic_flush_with_manual_clock() {
        let dir = tempfile::tempdir().unwrap();
        let clock = Arc::new(ManualClock::new(0));
        let cfg = TrackingConfig::all(dir.path()).with_flush(FlushPolicy::Periodic(Duration::from_millis(500)));
        let s = Session::begin_with_clock(ctx(), cfg, clock.clone()).unwrap();
        for _ in 0..50 {
            clock.advance(Duration::from_millis(100));
            std::thread::sleep(Duration::from_millis(1));
        }
        let deadline = std::time::Instant::now() + Duration::from_secs(5);
        while s.flush_count() < 10 && std::time::Instant::now() < deadline {
            std::thread::sleep(Duration::from_millis(5));
        }
        assert!(s.flush_count() >= 9, "only {} flushes", s.flush_count());
        s.end().unwrap();
    }

    #[test]
    fn concurrent_recording() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        std::thread::scope(|scope| {
            for t in 0..8 {
                let s = &s;
                scope.spawn(move || {
                    for _ in 0..50 {
                        s.observe::<(), ()>(SubClass::Write, "posix_write", SubClass::File, &format!("f{t}"), || Ok(()))
                            .unwrap();
                    }
                });
            }
        });
        let g = s.snapshot();
        assert_eq!(g.scan(None, Some(Predicate::WasWrittenBy), None).len(), 400);
        assert_eq!(s.diagnostics(), 0);
    }

    #[test]
    fn conflicting_entity_counts_diagnostic() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::begin(ctx(), TrackingConfig::all(dir.path())).unwrap();
        s.record_io(ev(SubClass::Create, "a", SubClass::File, "x"));
        s.record_io(ev(SubClass::Create, "b", SubClass::Dataset, "x"));
        assert_eq!(s.diagnostics(), 1);
        s.snapshot().validate().unwrap();
    }
}
