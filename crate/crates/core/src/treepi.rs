//! Closed-form rooted pebbling numbers of trees.
//!
//! Split the tree into edge-disjoint root-directed paths by always
//! continuing through the tallest child; with path lengths `e_P`,
//! `pi(T, r) = sum 2^e_P - |P| + 1`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};

/// Root-directed paths tiling a tree, each listed leaf first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathPartition {
    pub paths: Vec<Vec<usize>>,
}

impl PathPartition {
    /// Edge counts `e_P`.
    pub fn lengths(&self) -> Vec<usize> {
        self.paths.iter().map(|p| p.len() - 1).collect()
    }

    /// Lengths sorted from longest to shortest.
    pub fn sorted_lengths(&self) -> Vec<usize> {
        let mut l = self.lengths();
        l.sort_unstable_by(|a, b| b.cmp(a));
        l
    }

    /// True iff the paths use every tree edge exactly once and each one
    /// ends strictly closer to `root` than it starts.
    pub fn tiles(&self, tree: &Graph, root: usize) -> bool {
        let Ok(dist) = tree.distances_from(root) else {
            return false;
        };
        let mut used = std::collections::HashSet::new();
        for p in &self.paths {
            if p.len() < 2 || p.iter().any(|&v| v >= tree.vertex_count()) {
                return false;
            }
            if dist[*p.last().unwrap()] >= dist[p[0]] {
                return false;
            }
            for w in p.windows(2) {
                let e = (w[0].min(w[1]), w[0].max(w[1]));
                if !tree.has_edge(w[0], w[1]) || !used.insert(e) {
                    return false;
                }
            }
        }
        used.len() == tree.edge_count()
    }

    /// The unsolvable configuration with `2^e_P - 1` pebbles on each path's leaf.
    pub fn critical_config(&self, n: usize) -> Result<Configuration> {
        let mut c = Configuration::zeros(n);
        for p in &self.paths {
            let e = p.len() - 1;
            c.0[p[0]] = 1u64
                .checked_shl(e as u32)
                .filter(|_| e < 64)
                .ok_or(Error::Overflow("computing 2^e"))?
                - 1;
        }
        Ok(c)
    }
}

/// Rooted child lists and subtree heights.
fn rooted(tree: &Graph, root: usize) -> Result<(Vec<Vec<usize>>, Vec<usize>, Vec<usize>)> {
    tree.check_vertex(root)?;
    if !tree.is_tree() {
        return Err(Error::NotATree);
    }
    let n = tree.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut children = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    parent[root] = root;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in tree.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                children[u].push(w);
                queue.push_back(w);
            }
        }
    }
    let mut height = vec![0usize; n];
    for &u in order.iter().rev() {
        height[u] = children[u].iter().map(|&c| height[c] + 1).max().unwrap_or(0);
    }
    Ok((children, height, parent))
}

/// Partition where every vertex extends its tallest child's path upward
/// (smallest id on ties) and ends the paths of its other children.
pub fn max_path_partition(tree: &Graph, root: usize) -> Result<PathPartition> {
    let (children, height, parent) = rooted(tree, root)?;
    let tallest = |u: usize| -> Option<usize> {
        // children are ascending, so max_by_key on (height, Reverse(id)) prefers the smallest id
        children[u].iter().copied().max_by_key(|&c| (height[c], std::cmp::Reverse(c)))
    };
    let mut paths = Vec::new();
    // a path's top vertex is a child of the root or a non-tallest child
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &c in children[u].iter().rev() {
            stack.push(c);
        }
        if u == root || (parent[u] != root && tallest(parent[u]) == Some(u)) {
            continue;
        }
        let mut down = vec![u];
        let mut cur = u;
        while let Some(next) = tallest(cur) {
            down.push(next);
            cur = next;
        }
        down.reverse();
        down.push(parent[u]);
        paths.push(down);
    }
    Ok(PathPartition { paths })
}

/// `sum 2^e_P - |P| + 1` over the maximum path partition.
pub fn pi_tree(tree: &Graph, root: usize) -> Result<u64> {
    let partition = max_path_partition(tree, root)?;
    formula(&partition.lengths())
}

pub fn formula(lengths: &[usize]) -> Result<u64> {
    let sum = lengths.iter().try_fold(0u64, |acc, &e| {
        1u64.checked_shl(e as u32)
            .filter(|_| e < 64)
            .and_then(|p| acc.checked_add(p))
            .ok_or(Error::Overflow("summing 2^e_P"))
    })?;
    Ok(sum - lengths.len() as u64 + 1)
}

/// Maximum of [`pi_tree`] over roots, with the smallest maximizing root.
pub fn pi_tree_all(tree: &Graph) -> Result<(u64, usize)> {
    if !tree.is_tree() || tree.vertex_count() == 0 {
        return Err(Error::NotATree);
    }
    let mut best = (0, 0);
    for r in 0..tree.vertex_count() {
        let v = pi_tree(tree, r)?;
        if v > best.0 {
            best = (v, r);
        }
    }
    Ok(best)
}
