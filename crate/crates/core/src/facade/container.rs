//! Hierarchical single-file container (groups, datasets, attributes,
//! datatypes, links).
//!
//! ```text
//! +-------------------------+ offset 0
//! | "PIOC" | version u8     |
//! +-------------------------+
//! | record                  |  kind u8 | path_len u64 | path | payload_len u64 | payload
//! | record                  |
//! | ...                     |
//! | index block             |  0xFE | body_len u64 | entries (path_len u64 | path | kind u8 | offset u64)*
//! | footer                  |  index_offset u64 | record_count u64 | "PIOF"
//! +-------------------------+
//! ```
//!
//! Records are only ever appended: writing an object appends a new version
//! and the index points at the newest one. Each flush appends a fresh index
//! block and footer, so older blocks become dead space. A file whose tail is
//! not a valid footer (crash before flush) is recovered by a forward scan
//! that truncates any partial trailing record.
//!
//! All integers are little-endian.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::Mutex;

use super::Sandbox;
use crate::error::{Error, Result};
use crate::model::SubClass;
use crate::tracker::Session;

pub const HEADER_MAGIC: &[u8; 4] = b"PIOC";
pub const FOOTER_MAGIC: &[u8; 4] = b"PIOF";
pub const FORMAT_VERSION: u8 = 1;

const HEADER_LEN: u64 = 5;
const FOOTER_LEN: u64 = 20;
const INDEX_TAG: u8 = 0xFE;

fn kind_code(kind: SubClass) -> Result<u8> {
    Ok(match kind {
        SubClass::Group => 1,
        SubClass::Dataset => 2,
        SubClass::Attribute => 3,
        SubClass::Datatype => 4,
        SubClass::Link => 5,
        other => return Err(Error::Unsupported(format!("{other} objects cannot live in a container"))),
    })
}

fn kind_from_code(code: u8) -> Option<SubClass> {
    Some(match code {
        1 => SubClass::Group,
        2 => SubClass::Dataset,
        3 => SubClass::Attribute,
        4 => SubClass::Datatype,
        5 => SubClass::Link,
        _ => return None,
    })
}

fn create_api(kind: SubClass) -> &'static str {
    match kind {
        SubClass::Group => "H5Gcreate",
        SubClass::Dataset => "H5Dcreate2",
        SubClass::Attribute => "H5Acreate",
        SubClass::Datatype => "H5Tcreate",
        _ => "H5Lcreate",
    }
}

fn open_api(kind: SubClass) -> &'static str {
    match kind {
        SubClass::Group => "H5Gopen",
        SubClass::Dataset => "H5Dopen2",
        SubClass::Attribute => "H5Aopen",
        SubClass::Datatype => "H5Topen",
        _ => "H5Lopen",
    }
}

fn transfer_api(kind: SubClass, write: bool) -> &'static str {
    match (kind, write) {
        (SubClass::Attribute, false) => "H5Aread",
        (SubClass::Attribute, true) => "H5Awrite",
        (_, false) => "H5Dread",
        (_, true) => "H5Dwrite",
    }
}

#[derive(Clone, Copy, Debug)]
struct IndexEntry {
    kind: SubClass,
    offset: u64,
}

struct State {
    file: File,
    index: BTreeMap<String, IndexEntry>,
    record_count: u64,
    end: u64,
}

struct Inner {
    host: PathBuf,
    label: String,
    state: Mutex<State>,
}

/// A shared handle to an open container file. Cloning is cheap; record
/// appends are serialized by an internal writer lock.
#[derive(Clone)]
pub struct Container {
    inner: Arc<Inner>,
}

/// An open object inside a container.
pub struct ObjectHandle {
    container: Container,
    path: String,
    kind: SubClass,
    open: bool,
}

fn read_u64(buf: &[u8], at: usize) -> Option<u64> {
    buf.get(at..at + 8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
}

fn validate_object_path(path: &str) -> Result<()> {
    if !path.starts_with('/') || path == "/" || path.ends_with('/') || path.contains("//") {
        return Err(Error::Unsupported(format!("`{path}` is not a rooted object path")));
    }
    Ok(())
}

fn parent_of(path: &str) -> &str {
    match path.rfind('/') {
        Some(0) | None => "/",
        Some(i) => &path[..i],
    }
}

impl Sandbox {
    /// Creates (truncating) a container file; emits `H5Fcreate`.
    pub fn create_container(&self, s: &Session, path: &str) -> Result<Container> {
        let (rel, abs) = self.resolve(path)?;
        s.observe(SubClass::Create, "H5Fcreate", SubClass::File, &rel, || Container::create_at(&abs, &rel))
    }

    /// Opens an existing container; emits `H5Fopen`.
    pub fn open_container(&self, s: &Session, path: &str) -> Result<Container> {
        let (rel, abs) = self.resolve(path)?;
        s.observe(SubClass::Open, "H5Fopen", SubClass::File, &rel, || {
            if !abs.is_file() {
                return Err(Error::NotFound(rel.clone()));
            }
            Container::open_at(&abs, &rel)
        })
    }
}

impl Container {
    /// Creates an empty container at a host path, without tracking.
    pub fn create_at(host: &Path, label: &str) -> Result<Container> {
        if let Some(parent) = host.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(true)
            .open(host)?;
        file.write_all(HEADER_MAGIC)?;
        file.write_all(&[FORMAT_VERSION])?;
        Ok(Container::wrap(host, label, file, BTreeMap::new(), 0, HEADER_LEN))
    }

    /// Opens a container at a host path, without tracking. Uses the footer
    /// index when the file ends in one, otherwise rebuilds by forward scan.
    pub fn open_at(host: &Path, label: &str) -> Result<Container> {
        let mut file = OpenOptions::new().read(true).write(true).open(host)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let corrupt = |message: &str| Error::CorruptContainer {
            path: host.to_owned(),
            message: message.to_owned(),
        };
        if bytes.len() < HEADER_LEN as usize || &bytes[..4] != HEADER_MAGIC {
            return Err(corrupt("bad header magic"));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(corrupt("unsupported format version"));
        }
        let (index, record_count, end) = match load_footer(&bytes) {
            Some(found) => found,
            None => scan(&bytes).map_err(|m| corrupt(&m))?,
        };
        if end < bytes.len() as u64 {
            file.set_len(end)?;
        }
        Ok(Container::wrap(host, label, file, index, record_count, end))
    }

    fn wrap(host: &Path, label: &str, file: File, index: BTreeMap<String, IndexEntry>, record_count: u64, end: u64) -> Container {
        Container {
            inner: Arc::new(Inner {
                host: host.to_owned(),
                label: label.to_owned(),
                state: Mutex::new(State {
                    file,
                    index,
                    record_count,
                    end,
                }),
            }),
        }
    }

    pub fn host_path(&self) -> &Path {
        &self.inner.host
    }

    /// The file entity label (sandbox-relative path).
    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Live objects and their kinds, sorted by path.
    pub fn objects(&self) -> Vec<(String, SubClass)> {
        self.inner
            .state
            .lock()
            .index
            .iter()
            .map(|(p, e)| (p.clone(), e.kind))
            .collect()
    }

    pub fn record_count(&self) -> u64 {
        self.inner.state.lock().record_count
    }

    pub fn kind_of(&self, path: &str) -> Option<SubClass> {
        self.inner.state.lock().index.get(path).map(|e| e.kind)
    }

    /// Creates an object. The parent must be an existing group (or, for
    /// attributes, a group or dataset); the root group `/` always exists.
    pub fn create(&self, s: &Session, kind: SubClass, path: &str, payload: Option<&[u8]>) -> Result<ObjectHandle> {
        let code = kind_code(kind)?;
        validate_object_path(path)?;
        s.observe(SubClass::Create, create_api(kind), kind, path, || {
            let mut st = self.inner.state.lock();
            if st.index.contains_key(path) {
                return Err(Error::AlreadyExists(path.to_owned()));
            }
            let parent = parent_of(path);
            if parent != "/" {
                match st.index.get(parent).map(|e| e.kind) {
                    None => return Err(Error::MissingParent(path.to_owned())),
                    Some(SubClass::Group) => {}
                    Some(SubClass::Dataset) if kind == SubClass::Attribute => {}
                    Some(actual) => {
                        return Err(Error::KindMismatch {
                            path: parent.to_owned(),
                            expected: SubClass::Group,
                            actual,
                        })
                    }
                }
            }
            st.append(code, kind, path, payload.unwrap_or(&[]))
        })?;
        Ok(self.handle(s, kind, path))
    }

    pub fn open(&self, s: &Session, kind: SubClass, path: &str) -> Result<ObjectHandle> {
        kind_code(kind)?;
        s.observe(SubClass::Open, open_api(kind), kind, path, || {
            match self.inner.state.lock().index.get(path) {
                None => Err(Error::NotFound(path.to_owned())),
                Some(e) if e.kind != kind => Err(Error::KindMismatch {
                    path: path.to_owned(),
                    expected: kind,
                    actual: e.kind,
                }),
                Some(_) => Ok(()),
            }
        })?;
        Ok(self.handle(s, kind, path))
    }

    fn handle(&self, s: &Session, kind: SubClass, path: &str) -> ObjectHandle {
        s.open_object(kind, path);
        ObjectHandle {
            container: self.clone(),
            path: path.to_owned(),
            kind,
            open: true,
        }
    }

    /// Writes the index block and footer durably; emits `H5Fflush`.
    pub fn flush(&self, s: &Session) -> Result<()> {
        s.observe(SubClass::Fsync, "H5Fflush", SubClass::File, &self.inner.label, || {
            self.inner.state.lock().write_index()
        })
    }

    /// Reads the newest payload of an object without tracking.
    pub fn read_raw(&self, path: &str) -> Result<Vec<u8>> {
        self.inner.state.lock().read_payload(path)
    }
}

impl State {
    fn write_at(&mut self, bytes: &[u8]) -> Result<()> {
        self.file.seek(SeekFrom::Start(self.end))?;
        self.file.write_all(bytes)?;
        self.end += bytes.len() as u64;
        Ok(())
    }

    fn append(&mut self, code: u8, kind: SubClass, path: &str, payload: &[u8]) -> Result<()> {
        let mut rec = Vec::with_capacity(17 + path.len() + payload.len());
        rec.push(code);
        rec.extend_from_slice(&(path.len() as u64).to_le_bytes());
        rec.extend_from_slice(path.as_bytes());
        rec.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        rec.extend_from_slice(payload);
        let offset = self.end;
        self.write_at(&rec)?;
        self.index.insert(path.to_owned(), IndexEntry { kind, offset });
        self.record_count += 1;
        Ok(())
    }

    fn read_payload(&mut self, path: &str) -> Result<Vec<u8>> {
        let entry = *self.index.get(path).ok_or_else(|| Error::NotFound(path.to_owned()))?;
        let header = 1 + 8 + path.len() as u64;
        self.file.seek(SeekFrom::Start(entry.offset + header))?;
        let mut len = [0u8; 8];
        self.file.read_exact(&mut len)?;
        let mut payload = vec![0u8; u64::from_le_bytes(len) as usize];
        self.file.read_exact(&mut payload)?;
        Ok(payload)
    }

    fn write_index(&mut self) -> Result<()> {
        let mut body = Vec::new();
        for (path, e) in &self.index {
            body.extend_from_slice(&(path.len() as u64).to_le_bytes());
            body.extend_from_slice(path.as_bytes());
            body.push(kind_code(e.kind)?);
            body.extend_from_slice(&e.offset.to_le_bytes());
        }
        let index_offset = self.end;
        let mut block = Vec::with_capacity(9 + body.len() + FOOTER_LEN as usize);
        block.push(INDEX_TAG);
        block.extend_from_slice(&(body.len() as u64).to_le_bytes());
        block.extend_from_slice(&body);
        block.extend_from_slice(&index_offset.to_le_bytes());
        block.extend_from_slice(&self.record_count.to_le_bytes());
        block.extend_from_slice(FOOTER_MAGIC);
        self.write_at(&block)?;
        self.file.sync_all()?;
        Ok(())
    }
}

type Loaded = (BTreeMap<String, IndexEntry>, u64, u64);

/// Parses the footer and index block at the end of `bytes`, if the file
/// ends in a consistent one.
fn load_footer(bytes: &[u8]) -> Option<Loaded> {
    let len = bytes.len();
    if len < (HEADER_LEN + 9 + FOOTER_LEN) as usize || &bytes[len - 4..] != FOOTER_MAGIC {
        return None;
    }
    let footer = len - FOOTER_LEN as usize;
    let index_offset = read_u64(bytes, footer)? as usize;
    let record_count = read_u64(bytes, footer + 8)?;
    if index_offset < HEADER_LEN as usize || *bytes.get(index_offset)? != INDEX_TAG {
        return None;
    }
    let body_len = read_u64(bytes, index_offset + 1)? as usize;
    let body_start = index_offset + 9;
    if body_start.checked_add(body_len)? != footer {
        return None;
    }
    let mut index = BTreeMap::new();
    let mut at = body_start;
    while at < footer {
        let plen = read_u64(bytes, at)? as usize;
        let path = std::str::from_utf8(bytes.get(at + 8..at + 8 + plen)?).ok()?.to_owned();
        at += 8 + plen;
        let kind = kind_from_code(*bytes.get(at)?)?;
        let offset = read_u64(bytes, at + 1)?;
        at += 9;
        if offset as usize >= index_offset {
            return None;
        }
        index.insert(path, IndexEntry { kind, offset });
    }
    Some((index, record_count, len as u64))
}

/// Rebuilds the index by walking every record from the header. Stops at the
/// first incomplete record; the returned end offset excludes it.
fn scan(bytes: &[u8]) -> std::result::Result<Loaded, String> {
    let mut index = BTreeMap::new();
    let mut count = 0;
    let mut at = HEADER_LEN as usize;
    while at < bytes.len() {
        let tag = bytes[at];
        if tag == INDEX_TAG {
            let Some(body_len) = read_u64(bytes, at + 1) else { break };
            let next = (at + 9).saturating_add(body_len as usize).saturating_add(FOOTER_LEN as usize);
            if next > bytes.len() {
                break;
            }
            at = next;
            continue;
        }
        let kind = kind_from_code(tag).ok_or_else(|| format!("unknown record tag {tag:#x} at offset {at}"))?;
        let Some(plen) = read_u64(bytes, at + 1) else { break };
        let path_start = at + 9;
        let Some(path_bytes) = bytes.get(path_start..path_start.saturating_add(plen as usize)) else { break };
        let Some(payload_len) = read_u64(bytes, path_start + plen as usize) else { break };
        let next = (path_start + plen as usize + 8).saturating_add(payload_len as usize);
        if next > bytes.len() {
            break;
        }
        let path = std::str::from_utf8(path_bytes).map_err(|_| format!("non-UTF-8 object path at offset {at}"))?;
        index.insert(path.to_owned(), IndexEntry { kind, offset: at as u64 });
        count += 1;
        at = next;
    }
    Ok((index, count, at as u64))
}

impl ObjectHandle {
    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn kind(&self) -> SubClass {
        self.kind
    }

    fn check_transfer(&self) -> Result<()> {
        if !self.open {
            return Err(Error::Closed);
        }
        if !matches!(self.kind, SubClass::Dataset | SubClass::Attribute) {
            return Err(Error::Unsupported(format!("{} objects support create/open only", self.kind)));
        }
        Ok(())
    }

    /// Replaces the object's payload (appends a new version record).
    pub fn write(&mut self, s: &Session, bytes: &[u8]) -> Result<usize> {
        self.check_transfer()?;
        let code = kind_code(self.kind)?;
        s.observe(SubClass::Write, transfer_api(self.kind, true), self.kind, &self.path, || {
            self.container.inner.state.lock().append(code, self.kind, &self.path, bytes)?;
            Ok(bytes.len())
        })
    }

    /// Extends the object's payload; the new version holds old + new bytes.
    pub fn append(&mut self, s: &Session, bytes: &[u8]) -> Result<usize> {
        self.check_transfer()?;
        let code = kind_code(self.kind)?;
        s.observe(SubClass::Write, transfer_api(self.kind, true), self.kind, &self.path, || {
            let mut st = self.container.inner.state.lock();
            let mut payload = st.read_payload(&self.path)?;
            payload.extend_from_slice(bytes);
            st.append(code, self.kind, &self.path, &payload)?;
            Ok(bytes.len())
        })
    }

    pub fn read(&mut self, s: &Session) -> Result<Vec<u8>> {
        self.check_transfer()?;
        s.observe(SubClass::Read, transfer_api(self.kind, false), self.kind, &self.path, || {
            self.container.inner.state.lock().read_payload(&self.path)
        })
    }

    pub fn close(&mut self, s: &Session) {
        if std::mem::take(&mut self.open) {
            s.close_object(self.kind, &self.path);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mint_activity_guid, session_tag, Guid, Predicate, Triple};
    use crate::tracker::{AgentContext, TrackingConfig};

    fn setup() -> (tempfile::TempDir, Sandbox, Session) {
        let dir = tempfile::tempdir().unwrap();
        let sb = Sandbox::new(dir.path().join("sandbox")).unwrap();
        let s = Session::begin(AgentContext::new("Bob", "vpicio_un_h5.exe", 0), TrackingConfig::all(dir.path().join("prov")))
            .unwrap();
        (dir, sb, s)
    }

    #[test]
    fn create_dataset_emits_library_style_activity() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "out.h5").unwrap();
        c.create(&s, SubClass::Group, "/Timestep_0", None).unwrap();
        c.create(&s, SubClass::Dataset, "/Timestep_0/x", None).unwrap();
        let g = s.snapshot();
        let ds = Guid::new("/Timestep_0/x").unwrap();
        // seq 1 = H5Fcreate, 2 = H5Gcreate, 3 = H5Dcreate2
        let act = mint_activity_guid("H5Dcreate2", &session_tag("Bob", "vpicio_un_h5.exe"), 0, 3).unwrap();
        assert!(g.contains(&Triple::new(ds.clone(), Predicate::WasCreatedBy, act)));
        assert_eq!(g.node(&ds).unwrap().sub_class, SubClass::Dataset);
        assert_eq!(g.node(&Guid::new("/Timestep_0").unwrap()).unwrap().sub_class, SubClass::Group);
        assert_eq!(g.scan(None, Some(Predicate::WasCreatedBy), None).len(), 3);
    }

    #[test]
    fn create_errors() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "out.h5").unwrap();
        assert!(matches!(c.create(&s, SubClass::Dataset, "/a/b", None), Err(Error::MissingParent(_))));
        c.create(&s, SubClass::Dataset, "/d", None).unwrap();
        assert!(matches!(c.create(&s, SubClass::Dataset, "/d", None), Err(Error::AlreadyExists(_))));
        assert!(matches!(c.create(&s, SubClass::Group, "/d/g", None), Err(Error::KindMismatch { .. })));
        c.create(&s, SubClass::Attribute, "/d/units", Some(b"m/s")).unwrap();
        assert!(c.create(&s, SubClass::File, "/f", None).is_err());
        assert!(c.create(&s, SubClass::Group, "relative", None).is_err());
    }

    #[test]
    fn open_chain_and_kind_checks() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "f.h5").unwrap();
        c.create(&s, SubClass::Group, "/g", None).unwrap();
        c.create(&s, SubClass::Dataset, "/g/d", None).unwrap();
        c.create(&s, SubClass::Attribute, "/g/d/a", Some(b"1")).unwrap();
        c.flush(&s).unwrap();

        let c2 = sb.open_container(&s, "f.h5").unwrap();
        c2.open(&s, SubClass::Dataset, "/g/d").unwrap();
        let mut a = c2.open(&s, SubClass::Attribute, "/g/d/a").unwrap();
        assert_eq!(a.read(&s).unwrap(), b"1");
        c2.open(&s, SubClass::Dataset, "/g/d").unwrap();
        let g = s.snapshot();
        assert_eq!(g.scan(None, Some(Predicate::WasOpenedBy), None).len(), 4);
        assert_eq!(g.scan(Some(&Guid::new("/g/d").unwrap()), Some(Predicate::WasOpenedBy), None).len(), 2);

        assert!(matches!(c2.open(&s, SubClass::Dataset, "/g"), Err(Error::KindMismatch { .. })));
        assert!(matches!(c2.open(&s, SubClass::Dataset, "/nope"), Err(Error::NotFound(_))));
        assert!(matches!(sb.open_container(&s, "missing.h5"), Err(Error::NotFound(_))));
    }

    #[test]
    fn overwrite_append_and_empty_read() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "f.h5").unwrap();
        let mut d = c.create(&s, SubClass::Dataset, "/d", None).unwrap();
        assert!(d.read(&s).unwrap().is_empty());
        d.write(&s, b"first").unwrap();
        d.write(&s, b"second").unwrap();
        assert_eq!(d.read(&s).unwrap(), b"second");
        d.append(&s, b"+more").unwrap();
        assert_eq!(d.read(&s).unwrap(), b"second+more");
        let g = s.snapshot();
        assert_eq!(g.scan(None, Some(Predicate::WasWrittenBy), None).len(), 3);
        assert_eq!(g.scan(None, Some(Predicate::WasReadBy), None).len(), 3);
        d.close(&s);
        assert!(matches!(d.write(&s, b"x"), Err(Error::Closed)));

        let mut grp = c.create(&s, SubClass::Group, "/g", None).unwrap();
        assert!(matches!(grp.read(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn reopen_after_flush_uses_footer() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "f.h5").unwrap();
        c.create(&s, SubClass::Group, "/g", None).unwrap();
        let mut d = c.create(&s, SubClass::Dataset, "/g/d", None).unwrap();
        d.write(&s, b"payload").unwrap();
        c.flush(&s).unwrap();
        let expected = c.objects();
        drop(c);
        let host = sb.root().join("f.h5");
        let re = Container::open_at(&host, "f.h5").unwrap();
        assert_eq!(re.objects(), expected);
        assert_eq!(re.record_count(), 3);
        assert_eq!(re.read_raw("/g/d").unwrap(), b"payload");
    }

    #[test]
    fn empty_container_flush() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "e.h5").unwrap();
        c.flush(&s).unwrap();
        let host = sb.root().join("e.h5");
        let bytes = std::fs::read(&host).unwrap();
        assert_eq!(&bytes[..4], HEADER_MAGIC);
        assert_eq!(&bytes[bytes.len() - 4..], FOOTER_MAGIC);
        assert!(Container::open_at(&host, "e.h5").unwrap().objects().is_empty());
        let g = s.snapshot();
        assert_eq!(g.scan(Some(&Guid::new("e.h5").unwrap()), Some(Predicate::WasFlushedBy), None).len(), 1);
    }

    #[test]
    fn crash_before_flush_rebuilds_by_scan() {
        let (_d, sb, s) = setup();
        let c = sb.create_container(&s, "f.h5").unwrap();
        c.create(&s, SubClass::Group, "/g", None).unwrap();
        c.flush(&s).unwrap();
        let mut d = c.create(&s, SubClass::Dataset, "/g/d", None).unwrap();
        d.write(&s, b"v1").unwrap();
        d.write(&s, b"v2").unwrap();
        drop(c);
        let host = sb.root().join("f.h5");
        // torn trailing record
        let mut f = OpenOptions::new().append(true).open(&host).unwrap();
        f.write_all(&[2, 9, 0, 0]).unwrap();
        drop(f);
        let re = Container::open_at(&host, "f.h5").unwrap();
        assert_eq!(re.objects(), vec![("/g".to_owned(), SubClass::Group), ("/g/d".to_owned(), SubClass::Dataset)]);
        assert_eq!(re.read_raw("/g/d").unwrap(), b"v2");
        assert_eq!(re.record_count(), 4);
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let host = dir.path().join("x");
        std::fs::write(&host, b"NOPE1").unwrap();
        assert!(matches!(Container::open_at(&host, "x"), Err(Error::CorruptContainer { .. })));
    }

    #[test]
    fn tracking_off_keeps_data_semantics() {
        let dir = tempfile::tempdir().unwrap();
        let sb = Sandbox::new(dir.path()).unwrap();
        let s = Session::untracked(AgentContext::new("u", "p", 0));
        let c = sb.create_container(&s, "f.h5").unwrap();
        let mut d = c.create(&s, SubClass::Dataset, "/d", None).unwrap();
        d.write(&s, b"a").unwrap();
        d.write(&s, b"b").unwrap();
        assert_eq!(d.read(&s).unwrap(), b"b");
        assert!(s.snapshot().is_empty());
    }
}
