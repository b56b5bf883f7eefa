//! Generators for the standard graph families.
//!
//! Labelings:
//! - `path(n)`: vertices `0..n` in order, endpoints `0` and `n-1`.
//! - `cycle(n)`: `i ~ i+1 mod n`.
//! - `hypercube(d)`: vertex label is its bit string; neighbors differ in one bit.
//! - `petersen()`: outer cycle `0..5`, spokes `i ~ 5+i`, inner pentagram
//!   `5+i ~ 5+((i+2) mod 5)`.
//! - `bruhat(n)`: the `n!` permutations of `1..=n` in lexicographic order;
//!   neighbors differ by swapping two adjacent positions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_HYPERCUBE_DIM: usize = 20;
pub const MAX_BRUHAT_N: usize = 6;

/// A named member of one of the supported families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Hypercube(usize),
    Petersen,
    Bruhat(usize),
    Tree(Vec<Option<usize>>),
}

impl FamilySpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            FamilySpec::Path(n) => path(*n),
            FamilySpec::Cycle(n) => cycle(*n),
            FamilySpec::Complete(n) => complete(*n),
            FamilySpec::Hypercube(d) => hypercube(*d),
            FamilySpec::Petersen => Ok(petersen()),
            FamilySpec::Bruhat(n) => bruhat(*n),
            FamilySpec::Tree(parents) => tree_from_parents(parents),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::Path(_) => "path",
            FamilySpec::Cycle(_) => "cycle",
            FamilySpec::Complete(_) => "complete",
            FamilySpec::Hypercube(_) => "hypercube",
            FamilySpec::Petersen => "petersen",
            FamilySpec::Bruhat(_) => "bruhat",
            FamilySpec::Tree(_) => "tree",
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path(n) | FamilySpec::Cycle(n) | FamilySpec::Complete(n) | FamilySpec::Bruhat(n) => {
                write!(f, "{}({n})", self.kind())
            }
            FamilySpec::Hypercube(d) => write!(f, "hypercube({d})"),
            FamilySpec::Petersen => f.write_str("petersen"),
            FamilySpec::Tree(parents) => write!(f, "tree({})", format_parents(parents)),
        }
    }
}

/// Parent arrays are written with `-` for the root, e.g. `-,0,0,1`.
pub fn parse_parents(text: &str) -> Result<Vec<Option<usize>>> {
    text.split(',')
        .map(|item| match item.trim() {
            "-" => Ok(None),
            s => s
                .parse()
                .map(Some)
                .map_err(|_| Error::ParentArray(format!("`{s}` is neither `-` nor a vertex id"))),
        })
        .collect()
}

pub fn format_parents(parents: &[Option<usize>]) -> String {
    parents
        .iter()
        .map(|p| p.map_or_else(|| "-".to_string(), |p| p.to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Accepts `kind` or `kind:param`, e.g. `cycle:5`, `petersen`, `tree:-,0,0`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (s, None),
        };
        let size = || -> Result<usize> {
            param
                .ok_or_else(|| Error::Family(format!("`{kind}` needs a size, e.g. `{kind}:4`")))?
                .parse()
                .map_err(|_| Error::Family(format!("bad size in `{s}`")))
        };
        Ok(match kind {
            "path" => FamilySpec::Path(size()?),
            "cycle" => FamilySpec::Cycle(size()?),
            "complete" => FamilySpec::Complete(size()?),
            "hypercube" => FamilySpec::Hypercube(size()?),
            "bruhat" => FamilySpec::Bruhat(size()?),
            "petersen" => FamilySpec::Petersen,
            "tree" => FamilySpec::Tree(parse_parents(
                param.ok_or_else(|| Error::Family("`tree` needs a parent array".into()))?,
            )?),
            other => return Err(Error::Family(format!("unknown family `{other}`"))),
        })
    }
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Family("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Family("cycle needs n >= 3".into()));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Family("complete graph needs n >= 1".into()));
    }
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::new(n, &edges)
}

pub fn hypercube(d: usize) -> Result<Graph> {
    if d == 0 || d > MAX_HYPERCUBE_DIM {
        return Err(Error::Family(format!("hypercube needs 1 <= d <= {MAX_HYPERCUBE_DIM}")));
    }
    let n = 1usize << d;
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v))
        .collect();
    Graph::new(n, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, 5 + i));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, &edges).expect("petersen edges are valid")
}

/// All permutations of `1..=n` in lexicographic order.
pub fn permutations_lex(n: usize) -> Vec<Vec<u8>> {
    let mut current: Vec<u8> = (1..=n as u8).collect();
    let mut out = vec![current.clone()];
    // next_permutation
    loop {
        let Some(i) = (1..current.len()).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..current.len()).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Weak Bruhat graph on `S_n`, vertex ids in lexicographic permutation order.
pub fn bruhat(n: usize) -> Result<Graph> {
    if !(2..=MAX_BRUHAT_N).contains(&n) {
        return Err(Error::Family(format!("bruhat needs 2 <= n <= {MAX_BRUHAT_N}")));
    }
    let perms = permutations_lex(n);
    let index: std::collections::HashMap<&[u8], usize> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (u, p) in perms.iter().enumerate() {
        for pos in 0..n - 1 {
            let mut q = p.clone();
            q.swap(pos, pos + 1);
            let v = index[q.as_slice()];
            if u < v {
                edges.push((u, v));
            }
        }
    }
    Graph::new(perms.len(), &edges)
}

/// Builds a tree from a parent array; `None` marks the single root.
pub fn tree_from_parents(parents: &[Option<usize>]) -> Result<Graph> {
    let n = parents.len();
    let roots: Vec<_> = (0..n).filter(|&v| parents[v].is_none()).collect();
    if roots.len() != 1 {
        return Err(Error::ParentArray(format!("expected exactly one root, found {}", roots.len())));
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (v, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            if p >= n {
                return Err(Error::ParentArray(format!("parent {p} of vertex {v} is out of range")));
            }
            if p == v {
                return Err(Error::ParentArray(format!("vertex {v} is its own parent")));
            }
            edges.push((v, p));
        }
    }
    // every vertex must reach the root within n steps
    for start in 0..n {
        let mut v = start;
        for _ in 0..=n {
            match parents[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        if parents[v].is_some() {
            return Err(Error::ParentArray(format!("vertex {start} lies on a parent cycle")));
        }
    }
    Graph::new(n, &edges)
}
