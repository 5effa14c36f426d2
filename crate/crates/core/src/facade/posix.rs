use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};

use super::Sandbox;
use crate::error::{Error, Result};
use crate::model::SubClass;
use crate::tracker::Session;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Read,
    Write,
    ReadWrite,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Read => "read-only",
            Mode::Write => "write-only",
            Mode::ReadWrite => "read-write",
        }
    }

    fn readable(self) -> bool {
        self != Mode::Write
    }

    fn writable(self) -> bool {
        self != Mode::Read
    }
}

/// An open file inside a [`Sandbox`].
#[derive(Debug)]
pub struct FileHandle {
    file: Option<File>,
    path: String,
    mode: Mode,
}

impl Sandbox {
    /// Opens (or with `create`, creates and truncates) a file. Creation emits
    /// a Create activity, a plain open emits Open.
    pub fn open(&self, s: &Session, path: &str, create: bool, mode: Mode) -> Result<FileHandle> {
        let (rel, abs) = self.resolve(path)?;
        let class = if create { SubClass::Create } else { SubClass::Open };
        let file = s.observe(class, "posix_open", SubClass::File, &rel, || {
            if !create && !abs.is_file() {
                return Err(Error::NotFound(rel.clone()));
            }
            if create {
                if let Some(parent) = abs.parent() {
                    fs::create_dir_all(parent)?;
                }
            }
            let mut opts = OpenOptions::new();
            opts.read(mode.readable() || create).write(mode.writable() || create);
            if create {
                opts.create(true).truncate(true);
            }
            opts.open(&abs).map_err(Error::from)
        })?;
        s.open_object(SubClass::File, &rel);
        Ok(FileHandle {
            file: Some(file),
            path: rel,
            mode,
        })
    }

    /// Renames `old` to `new`; the destination must not exist. The original
    /// file entity records the modification.
    pub fn rename(&self, s: &Session, old: &str, new: &str) -> Result<()> {
        let (old_rel, old_abs) = self.resolve(old)?;
        let (new_rel, new_abs) = self.resolve(new)?;
        s.observe(SubClass::Rename, "posix_rename", SubClass::File, &old_rel, || {
            if !old_abs.exists() {
                return Err(Error::NotFound(old_rel.clone()));
            }
            if new_abs.exists() {
                return Err(Error::AlreadyExists(new_rel.clone()));
            }
            if let Some(parent) = new_abs.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::rename(&old_abs, &new_abs).map_err(Error::from)
        })
    }

    /// Creates a directory and any missing parents.
    pub fn mkdir(&self, s: &Session, path: &str) -> Result<()> {
        let (rel, abs) = self.resolve(path)?;
        s.observe(SubClass::Create, "posix_mkdir", SubClass::Directory, &rel, || {
            if abs.exists() {
                return Err(Error::AlreadyExists(rel.clone()));
            }
            fs::create_dir_all(&abs).map_err(Error::from)
        })
    }

    /// Writes a file without any tracking (workload inputs, fixtures).
    pub fn write_untracked(&self, path: &str, bytes: &[u8]) -> Result<()> {
        let (_, abs) = self.resolve(path)?;
        if let Some(parent) = abs.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(abs, bytes).map_err(Error::from)
    }
}

impl FileHandle {
    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_open(&self) -> bool {
        self.file.is_some()
    }

    fn file(&mut self) -> Result<&mut File> {
        self.file.as_mut().ok_or(Error::Closed)
    }

    /// Reads up to `buf.len()` bytes, looping until the buffer is full or EOF.
    pub fn read(&mut self, s: &Session, buf: &mut [u8]) -> Result<usize> {
        if !self.mode.readable() {
            self.file()?;
            return Err(Error::ModeMismatch {
                opened: self.mode.name(),
                attempted: "read",
            });
        }
        let path = self.path.clone();
        let file = self.file()?;
        s.observe(SubClass::Read, "posix_read", SubClass::File, &path, || {
            let mut total = 0;
            while total < buf.len() {
                match file.read(&mut buf[total..])? {
                    0 => break,
                    n => total += n,
                }
            }
            Ok(total)
        })
    }

    pub fn read_to_end(&mut self, s: &Session) -> Result<Vec<u8>> {
        if !self.mode.readable() {
            self.file()?;
            return Err(Error::ModeMismatch {
                opened: self.mode.name(),
                attempted: "read",
            });
        }
        let path = self.path.clone();
        let file = self.file()?;
        s.observe(SubClass::Read, "posix_read", SubClass::File, &path, || {
            let mut out = Vec::new();
            file.read_to_end(&mut out)?;
            Ok(out)
        })
    }

    pub fn write(&mut self, s: &Session, bytes: &[u8]) -> Result<usize> {
        if !self.mode.writable() {
            self.file()?;
            return Err(Error::ModeMismatch {
                opened: self.mode.name(),
                attempted: "write",
            });
        }
        let path = self.path.clone();
        let file = self.file()?;
        s.observe(SubClass::Write, "posix_write", SubClass::File, &path, || {
            file.write_all(bytes)?;
            Ok(bytes.len())
        })
    }

    pub fn fsync(&mut self, s: &Session) -> Result<()> {
        let path = self.path.clone();
        let file = self.file()?;
        s.observe(SubClass::Fsync, "posix_fsync", SubClass::File, &path, || {
            file.sync_all().map_err(Error::from)
        })
    }

    pub fn close(&mut self, s: &Session) {
        if self.file.take().is_some() {
            s.close_object(SubClass::File, &self.path);
        }
    }
}
