//! Reading graphs, configurations and reports from the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::Value;

use pebbling_core::{Configuration, Error, FamilySpec, Graph};

use crate::Failure;

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge-list file, or a JSON file with `n` and `edges`.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Built-in family member, e.g. `cycle:5`, `petersen`, `tree:-,0,0`.
    #[arg(long)]
    family: Option<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display()), 1))
}

fn in_file(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure(format!("{}: {e}", path.display()), 1)
}

impl GraphSource {
    /// The graph and a name for reports.
    pub fn load(&self) -> Result<(Graph, String), Failure> {
        if let Some(spec) = &self.family {
            let spec: FamilySpec = spec.parse()?;
            return Ok((spec.build()?, spec.to_string()));
        }
        let path = self.graph.as_ref().expect("clap requires a graph source");
        let text = read(path)?;
        let graph = if text.trim_start().starts_with('{') {
            graph_from_json(&text).map_err(|e| in_file(path, e))?
        } else {
            Graph::parse_edge_list(&text).map_err(|e| in_file(path, e))?
        };
        Ok((graph, path.display().to_string()))
    }
}

/// The JSON form written by `family --json`.
fn graph_from_json(text: &str) -> pebbling_core::Result<Graph> {
    #[derive(serde::Deserialize)]
    struct GraphJson {
        n: usize,
        edges: Vec<(usize, usize)>,
    }
    let g: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    Graph::new(g.n, &g.edges)
}

/// A configuration file holds the sparse text form on its first line, or is
/// a JSON report carrying it under `config`.
pub fn read_config(path: &Path, n: usize) -> Result<Configuration, Failure> {
    let text = read(path)?;
    let sparse = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| in_file(path, e))?;
        match v.get("config") {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(in_file(path, "JSON report has no string `config` field")),
        }
    } else {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or("");
        if let Some(i) = lines.position(|l| !l.trim().is_empty()) {
            return Err(in_file(path, Error::Parse { line: i + 2, msg: "expected a single line".into() }));
        }
        first.to_string()
    };
    Configuration::parse_sparse(&sparse, n).map_err(|e| in_file(path, e))
}
