//! Instrumented I/O surface.
//!
//! Every call runs its native operation and, through
//! [`Session::observe`](crate::tracker::Session::observe), emits at most one
//! activity of the matching class. Failed calls emit nothing.

mod container;
mod posix;

use std::fs;
use std::path::{Component, Path, PathBuf};

pub use container::{Container, ObjectHandle, FOOTER_MAGIC, HEADER_MAGIC, FORMAT_VERSION};
pub use posix::{FileHandle, Mode};

use crate::error::{Error, Result};

/// A directory all POSIX-style paths are confined to.
#[derive(Clone, Debug)]
pub struct Sandbox {
    root: PathBuf,
}

impl Sandbox {
    pub fn new(root: impl AsRef<Path>) -> Result<Sandbox> {
        fs::create_dir_all(root.as_ref())?;
        Ok(Sandbox {
            root: fs::canonicalize(root.as_ref())?,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Lexically normalizes `path` relative to the root. Returns the
    /// canonical relative form (used as the entity label) and the host path.
    pub fn resolve(&self, path: &str) -> Result<(String, PathBuf)> {
        let mut parts: Vec<&str> = Vec::new();
        for c in Path::new(path).components() {
            match c {
                Component::RootDir | Component::CurDir | Component::Prefix(_) => {}
                Component::ParentDir => {
                    if parts.pop().is_none() {
                        return Err(Error::PathEscape(path.to_owned()));
                    }
                }
                Component::Normal(p) => parts.push(p.to_str().ok_or_else(|| Error::PathEscape(path.to_owned()))?),
            }
        }
        if parts.is_empty() {
            return Err(Error::NotFound(path.to_owned()));
        }
        let rel = parts.join("/");
        let abs = self.root.join(&rel);
        Ok((rel, abs))
    }
}
