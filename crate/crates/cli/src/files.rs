use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use ctxcent::{ContributionVector, Graph};
use serde::Serialize;

use crate::{CliResult, Failure};

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Usage)
}

pub fn read_graph(path: &Path) -> CliResult<Graph> {
    Graph::parse_edge_list(&read_input(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::Usage)
}

pub fn read_contributions(path: &Path, n: usize) -> CliResult<ContributionVector> {
    ContributionVector::from_csv(read_input(path)?.as_bytes(), n)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::Usage)
}

/// Two-column CSV with a header row: node id, value. Every id in `0..n`
/// must appear once, where `n` is one more than the largest id.
pub fn read_vector(path: &Path) -> CliResult<Vec<f64>> {
    let text = read_input(path)?;
    let bad = |line: usize, msg: String| Failure::usage(format!("{}: line {line}: {msg}", path.display()));
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (Some(id), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(i + 1, "expected two columns".into()));
        };
        let id: usize = id.parse().map_err(|_| bad(i + 1, format!("bad node id {id:?}")))?;
        let v: f64 = v.parse().map_err(|_| bad(i + 1, format!("bad value {v:?}")))?;
        entries.push((id, v));
    }
    let n = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let mut out = vec![None; n];
    for (id, v) in entries {
        if out[id].replace(v).is_some() {
            return Err(Failure::usage(format!("{}: duplicate node {id}", path.display())));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Failure::usage(format!("{}: missing node {i}", path.display()))))
        .collect()
}

/// Writes to `path`, or stdout when absent.
pub fn write_output(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, contents).with_context(|| format!("cannot write {}", p.display())),
        None => std::io::stdout()
            .lock()
            .write_all(contents.as_bytes())
            .context("cannot write to stdout"),
    }
    .map_err(Failure::Runtime)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}
