//! Per-process sub-graph files and their offline merge.

use std::borrow::Cow;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::ProvGraph;
use crate::turtle::parse_turtle;

/// `prov_<program>_<rank>.ttl`
pub fn subgraph_file_name(program: &str, rank: u32) -> String {
    let safe: String = program
        .chars()
        .map(|c| if c == '/' || c == '\\' { '_' } else { c })
        .collect();
    format!("prov_{safe}_{rank}.ttl")
}

pub fn is_subgraph_file(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("prov_") && n.ends_with(".ttl"))
}

/// Sub-graph files in `dir`, sorted by name.
pub fn list_subgraph_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && is_subgraph_file(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn read_graph(path: &Path) -> Result<ProvGraph> {
    let text = fs::read_to_string(path)?;
    parse_turtle(&text).map_err(|e| match e {
        Error::Syntax { line, message } => Error::Syntax {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Set union of the inputs. Nodes shared by GUID must agree on sub-class
/// and label; triples shared by several inputs appear once.
pub fn merge(graphs: &[ProvGraph]) -> Result<ProvGraph> {
    merge_with(graphs, Execution::Sequential)
}

pub fn merge_with(graphs: &[ProvGraph], exec: Execution) -> Result<ProvGraph> {
    let refs: Vec<&ProvGraph> = graphs.iter().collect();
    exec::try_reduce(
        exec,
        refs.into_iter().map(Cow::Borrowed).collect(),
        || Cow::Owned(ProvGraph::new()),
        |a, b| {
            let mut acc = a.into_owned();
            acc.absorb(&b)?;
            Ok::<_, Error>(Cow::Owned(acc))
        },
    )
    .map(Cow::into_owned)
}

/// Parses every sub-graph file in `dir` and merges them.
pub fn merge_dir(dir: &Path, exec: Execution) -> Result<ProvGraph> {
    let files = list_subgraph_files(dir)?;
    let graphs = exec::map(exec, &files, |p| read_graph(p)).into_iter().collect::<Result<Vec<_>>>()?;
    merge_with(&graphs, exec)
}
