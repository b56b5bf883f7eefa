//! Simple undirected graphs on dense vertex ids, pebble configurations,
//! and their text formats.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An immutable simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Repeated edges (in either
    /// orientation) collapse to one; self-loops and out-of-range endpoints
    /// are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.adj.len() })
        }
    }

    /// Breadth-first distances from `source`; `None` marks unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(source)?;
        let mut dist = vec![None; self.adj.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path length between `u` and `v`, or `None` when they lie in
    /// different components.
    pub fn distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(v)?;
        Ok(self.distances_from(u)?[v])
    }

    pub fn eccentricity(&self, v: usize) -> Result<usize> {
        let dist = self.distances_from(v)?;
        dist.iter()
            .map(|d| d.ok_or(Error::Disconnected))
            .try_fold(0, |acc, d| Ok(acc.max(d?)))
    }

    pub fn diameter(&self) -> Result<usize> {
        (0..self.vertex_count()).try_fold(0, |acc, v| Ok(acc.max(self.eccentricity(v)?)))
    }

    /// True iff every vertex is reachable from vertex 0. Graphs with at most
    /// one vertex are connected.
    pub fn is_connected(&self) -> bool {
        if self.adj.len() <= 1 {
            return true;
        }
        self.distances_from(0)
            .map(|d| d.iter().all(Option::is_some))
            .unwrap_or(false)
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.vertex_count().max(1)
    }

    /// Serializes to the `n m` / `u v` edge-list format.
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.vertex_count(), edges.len());
        for (u, v) in edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list format. Errors carry 1-based line numbers.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let (n, m) = parse_pair(header, 1)?;
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            if edges.len() == m {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::Parse { line: idx + 1, msg: format!("expected {m} edges, found more") });
            }
            let (u, v) = parse_pair(line, idx + 1)?;
            if u >= n || v >= n {
                return Err(Error::Parse { line: idx + 1, msg: format!("endpoint out of range 0..{n}") });
            }
            if u == v {
                return Err(Error::Parse { line: idx + 1, msg: "self-loop".into() });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: text.lines().count() + 1,
                msg: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, &edges)
    }
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
    let mut parts = line.split(' ');
    let a = parts.next().ok_or_else(|| err("expected two integers"))?;
    let b = parts.next().ok_or_else(|| err("expected two integers"))?;
    if parts.next().is_some() {
        return Err(err("expected exactly two integers"));
    }
    let a = a.parse().map_err(|_| err("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| err("not a non-negative integer"))?;
    Ok((a, b))
}

/// Pebble counts, one entry per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<u64>);

impl Configuration {
    pub fn zeros(n: usize) -> Self {
        Configuration(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn check_against(&self, graph: &Graph) -> Result<()> {
        if self.0.len() == graph.vertex_count() {
            Ok(())
        } else {
            Err(Error::ConfigLength { expected: graph.vertex_count(), got: self.0.len() })
        }
    }

    /// Parses the sparse `vertex:count,...` form, padding to `n` vertices.
    pub fn parse_sparse(text: &str, n: usize) -> Result<Self> {
        let mut counts = vec![0u64; n];
        let mut seen = vec![false; n];
        let text = text.trim();
        if text.is_empty() {
            return Ok(Configuration(counts));
        }
        for item in text.split(',') {
            let err = |msg: String| Error::Parse { line: 1, msg };
            let (v, c) = item
                .split_once(':')
                .ok_or_else(|| err(format!("`{item}` is not `vertex:count`")))?;
            let v: usize = v.trim().parse().map_err(|_| err(format!("bad vertex in `{item}`")))?;
            let c: u64 = c.trim().parse().map_err(|_| err(format!("bad count in `{item}`")))?;
            if v >= n {
                return Err(err(format!("vertex {v} outside 0..{n}")));
            }
            if seen[v] {
                return Err(err(format!("vertex {v} listed twice")));
            }
            seen[v] = true;
            counts[v] = c;
        }
        Ok(Configuration(counts))
    }
}

/// Sparse text form: ascending `vertex:count` pairs, zeros omitted.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.0.iter().enumerate().filter(|(_, &c)| c > 0) {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{v}:{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Graph::parse_edge_list(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 1);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let g = Graph::new(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::new(1, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(Graph::new(2, &[(0, 2)]), Err(Error::EdgeOutOfRange { u: 0, v: 2, n: 2 }));
    }

    #[test]
    fn distances() {
        let g = path4();
        assert_eq!(g.distance(0, 3).unwrap(), Some(3));
        assert_eq!(g.distance(2, 2).unwrap(), Some(0));
        assert_eq!(g.eccentricity(0).unwrap(), 3);
        assert!(g.distance(0, 7).is_err());

        let split = Graph::new(2, &[]).unwrap();
        assert_eq!(split.distance(0, 1).unwrap(), None);
        assert_eq!(split.eccentricity(0), Err(Error::Disconnected));
    }

    #[test]
    fn connectivity() {
        assert!(Graph::new(3, &[(0, 1), (1, 2)]).unwrap().is_connected());
        assert!(!Graph::new(2, &[]).unwrap().is_connected());
        assert!(Graph::new(1, &[]).unwrap().is_connected());
        assert!(Graph::new(0, &[]).unwrap().is_connected());
    }

    #[test]
    fn edge_list_format_is_exact() {
        let g = Graph::new(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(g.to_edge_list(), "3 2\n0 1\n1 2\n");
        assert_eq!(Graph::parse_edge_list("3 2\n0 1\n1 2\n").unwrap(), g);
    }

    #[test]
    fn edge_list_errors_report_lines() {
        match Graph::parse_edge_list("3 2\n0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match Graph::parse_edge_list("3 2\n0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Graph::parse_edge_list("2 1\n0  1\n").is_err());
        assert!(Graph::parse_edge_list("2 1\n1 1\n").is_err());
    }

    #[test]
    fn sparse_configuration_text() {
        let c = Configuration::parse_sparse("2:3,4:1", 5).unwrap();
        assert_eq!(c.0, vec![0, 0, 3, 0, 1]);
        assert_eq!(c.to_string(), "2:3,4:1");
        assert_eq!(Configuration::zeros(3).to_string(), "");
        assert!(Configuration::parse_sparse("5:1", 5).is_err());
        assert!(Configuration::parse_sparse("1:1,1:2", 5).is_err());
        assert!(Configuration::parse_sparse("1-2", 5).is_err());
    }
}
