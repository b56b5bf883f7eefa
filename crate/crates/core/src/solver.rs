//! Exact r-solvability and pebbling numbers by exhaustive search.
//!
//! A pebbling move takes two pebbles off a vertex and puts one on a
//! neighbor. A configuration is r-solvable when some move sequence puts a
//! pebble on `r`; `pi_rooted` is the least total `t` such that every
//! configuration of `t` pebbles is r-solvable.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};

pub const DEFAULT_MAX_CONFIGS: u64 = 10_000_000;

/// A single pebbling move `from -> to`, serialized as `[from, to]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move(pub usize, pub usize);

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveSequence(pub Vec<Move>);

impl MoveSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies the moves in order, failing on a non-edge or a vertex with
    /// fewer than two pebbles.
    pub fn replay(&self, graph: &Graph, start: &Configuration) -> Result<Configuration> {
        start.check_against(graph)?;
        let mut counts = start.0.clone();
        for (index, &Move(from, to)) in self.0.iter().enumerate() {
            let invalid = |reason| Error::InvalidMove { index, from, to, reason };
            if !graph.has_edge(from, to) {
                return Err(invalid("not an edge"));
            }
            if counts[from] < 2 {
                return Err(invalid("fewer than two pebbles on the source"));
            }
            counts[from] -= 2;
            counts[to] += 1;
        }
        Ok(Configuration(counts))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solvable: bool,
    pub witness: Option<MoveSequence>,
    /// Number of configurations the search entered.
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiResult {
    pub value: u64,
    pub root: usize,
    /// An unsolvable configuration with `value - 1` pebbles.
    pub critical_config: Configuration,
    /// Configurations checked across all scanned levels.
    pub configs_checked: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Upper limit on the number of configurations enumerated at one level.
    pub max_configs: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_configs: DEFAULT_MAX_CONFIGS }
    }
}

/// Decides whether `config` can put a pebble on `root`.
pub fn is_solvable(graph: &Graph, config: &Configuration, root: usize) -> Result<SolveResult> {
    graph.check_vertex(root)?;
    config.check_against(graph)?;
    graph.require_connected()?;
    let mut searcher = Searcher::new(graph, root)?;
    Ok(searcher.solve(&config.0))
}

/// Rooted pebbling number `pi(G, r)`.
pub fn pi_rooted(graph: &Graph, root: usize, opts: &SolverOptions) -> Result<PiResult> {
    graph.check_vertex(root)?;
    graph.require_connected()?;
    let n = graph.vertex_count();
    let probe = Searcher::new(graph, root)?;

    // Both n and 2^ecc are lower bounds; build the matching unsolvable
    // configuration of size one less.
    let ecc = probe.max_dist;
    let ecc_floor = 1u64.checked_shl(ecc as u32).filter(|_| ecc < 63).ok_or(Error::Overflow("computing 2^ecc"))?;
    let mut critical = vec![0u64; n];
    if (n as u64) >= ecc_floor {
        for (v, c) in critical.iter_mut().enumerate() {
            *c = u64::from(v != root);
        }
    } else {
        let far = (0..n).find(|&v| probe.dist[v] as usize == ecc).unwrap();
        critical[far] = ecc_floor - 1;
    }
    let mut level = (n as u64).max(ecc_floor);
    let mut checker = probe;
    debug_assert!(!checker.solve(&critical).solvable);

    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut checked = 0u64;
    loop {
        let count = composition_count(level, others.len());
        if count > u128::from(opts.max_configs) {
            return Err(Error::CapExceeded { level, count, cap: opts.max_configs, last_verified: Some(level - 1) });
        }
        checked += count as u64;
        match first_unsolvable(graph, root, &others, level)? {
            Some(found) => {
                critical = found;
                level += 1;
            }
            None => {
                return Ok(PiResult { value: level, root, critical_config: Configuration(critical), configs_checked: checked });
            }
        }
    }
}

/// `pi(G)`: the maximum of `pi(G, r)` over roots. Ties keep the smallest root.
pub fn pi_graph(graph: &Graph, opts: &SolverOptions) -> Result<PiResult> {
    graph.require_connected()?;
    let mut best: Option<PiResult> = None;
    for root in 0..graph.vertex_count() {
        let res = pi_rooted(graph, root, opts)?;
        if best.as_ref().is_none_or(|b| res.value > b.value) {
            best = Some(res);
        }
    }
    best.ok_or(Error::Family("graph has no vertices".into()))
}

/// Largest unsolvable total for `root`, with a witness of that size.
pub fn max_unsolvable(graph: &Graph, root: usize, opts: &SolverOptions) -> Result<(u64, Configuration)> {
    let res = pi_rooted(graph, root, opts)?;
    Ok((res.value - 1, res.critical_config))
}

/// Number of weak compositions of `total` into `parts` parts, saturating.
pub fn composition_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    // C(total + parts - 1, parts - 1)
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul(u128::from(total) + i) {
            Some(x) => x / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `f` on every weak composition of `total` into `buf.len()` parts,
/// in lexicographic order.
pub fn for_each_composition<F>(total: u64, buf: &mut [u64], f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[u64]) -> ControlFlow<()>,
{
    fn rec<F: FnMut(&[u64]) -> ControlFlow<()>>(pos: usize, left: u64, buf: &mut [u64], f: &mut F) -> ControlFlow<()> {
        if pos + 1 == buf.len() {
            buf[pos] = left;
            return f(buf);
        }
        for x in 0..=left {
            buf[pos] = x;
            rec(pos + 1, left - x, buf, f)?;
        }
        ControlFlow::Continue(())
    }
    if buf.is_empty() {
        return if total == 0 { f(buf) } else { ControlFlow::Continue(()) };
    }
    rec(0, total, buf, f)
}

/// First unsolvable configuration of `total` pebbles off the root, in
/// lexicographic order of the non-root counts. Work is split by a short
/// prefix of the composition; the lowest prefix with a hit wins, so the
/// answer does not depend on scheduling.
fn first_unsolvable(graph: &Graph, root: usize, others: &[usize], total: u64) -> Result<Option<Vec<u64>>> {
    let k = others.len();
    let prefix_len = 2.min(k.saturating_sub(1));
    let mut prefixes: Vec<Vec<u64>> = Vec::new();
    collect_prefixes(total, prefix_len, &mut Vec::new(), &mut prefixes);

    let best = AtomicUsize::new(usize::MAX);
    let hits: Vec<Option<Vec<u64>>> = prefixes
        .par_iter()
        .enumerate()
        .map_init(
            || Searcher::new(graph, root).expect("root validated"),
            |searcher, (idx, prefix)| {
                if idx > best.load(Ordering::Relaxed) {
                    return None;
                }
                let used: u64 = prefix.iter().sum();
                let mut parts = vec![0u64; k];
                parts[..prefix_len].copy_from_slice(prefix);
                let mut config = vec![0u64; graph.vertex_count()];
                let mut hit = None;
                let _ = for_each_composition(total - used, &mut parts[prefix_len..].to_vec(), &mut |rest| {
                    for (i, &v) in others.iter().enumerate() {
                        config[v] = if i < prefix_len { prefix[i] } else { rest[i - prefix_len] };
                    }
                    if searcher.decide(&config) {
                        ControlFlow::Continue(())
                    } else {
                        hit = Some(config.clone());
                        ControlFlow::Break(())
                    }
                });
                if hit.is_some() {
                    best.fetch_min(idx, Ordering::Relaxed);
                }
                hit
            },
        )
        .collect();
    Ok(hits.into_iter().flatten().next())
}

fn collect_prefixes(total: u64, len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let used: u64 = cur.iter().sum();
    for x in 0..=total - used {
        cur.push(x);
        collect_prefixes(total, len, cur, out);
        cur.pop();
    }
}

/// Per-root search state. The memo of failed configurations lives for one
/// top-level query only.
pub(crate) struct Searcher<'g> {
    graph: &'g Graph,
    root: usize,
    dist: Vec<u32>,
    max_dist: usize,
    /// Neighbor one step closer to the root (breadth-first tree).
    next_hop: Vec<usize>,
    /// Non-root vertices, farthest first.
    far_first: Vec<usize>,
    /// Vertices nearest the root first; moves are tried in this order.
    near_first: Vec<usize>,
    /// Neighbor lists sorted by distance to the root.
    sorted_nbrs: Vec<Vec<usize>>,
    memo: HashSet<Box<[u64]>>,
    scratch: Vec<u64>,
    explored: u64,
}

impl<'g> Searcher<'g> {
    pub(crate) fn new(graph: &'g Graph, root: usize) -> Result<Self> {
        let dist_opt = graph.distances_from(root)?;
        let dist: Vec<u32> = dist_opt
            .iter()
            .map(|d| d.map(|d| d as u32).ok_or(Error::Disconnected))
            .collect::<Result<_>>()?;
        let n = graph.vertex_count();
        let next_hop = (0..n)
            .map(|v| {
                if v == root {
                    root
                } else {
                    *graph.neighbors(v).iter().find(|&&w| dist[w] + 1 == dist[v]).unwrap()
                }
            })
            .collect();
        let mut near_first: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        near_first.sort_by_key(|&v| (dist[v], v));
        let far_first = near_first.iter().rev().copied().collect();
        let sorted_nbrs = (0..n)
            .map(|v| {
                let mut nb = graph.neighbors(v).to_vec();
                nb.sort_by_key(|&w| (dist[w], w));
                nb
            })
            .collect();
        let max_dist = dist.iter().copied().max().unwrap_or(0) as usize;
        Ok(Searcher {
            graph,
            root,
            dist,
            max_dist,
            next_hop,
            far_first,
            near_first,
            sorted_nbrs,
            memo: HashSet::new(),
            scratch: vec![0; n],
            explored: 0,
        })
    }

    /// Pushes pebbles greedily toward the root along the breadth-first tree.
    /// Success is a real move sequence, so this only ever accepts solvable
    /// configurations. Generalizes the single-vertex test C(v) >= 2^dist(v).
    fn cascade_reaches_root(&mut self, counts: &[u64]) -> bool {
        self.scratch.copy_from_slice(counts);
        for &v in &self.far_first {
            let k = self.scratch[v] / 2;
            if k > 0 {
                self.scratch[self.next_hop[v]] += k;
            }
        }
        self.scratch[self.root] >= 1
    }

    fn cascade_moves(&self, counts: &[u64]) -> Vec<Move> {
        let mut c = counts.to_vec();
        let mut moves = Vec::new();
        for &v in &self.far_first {
            if c[self.root] >= 1 {
                break;
            }
            let k = c[v] / 2;
            if k > 0 {
                let to = self.next_hop[v];
                c[v] -= 2 * k;
                c[to] += k;
                moves.extend(std::iter::repeat_n(Move(v, to), k as usize));
            }
        }
        moves
    }

    /// Each move loses at least half its value in `sum C(v) / 2^dist(v)`,
    /// so the sum never grows; below 1 the root can never be reached.
    fn potential_below_one(&self, counts: &[u64]) -> bool {
        if self.max_dist > 100 {
            return false;
        }
        let scale = 1u128 << self.max_dist;
        let mut acc: u128 = 0;
        for (v, &c) in counts.iter().enumerate() {
            let w = 1u128 << (self.max_dist - self.dist[v] as usize);
            match u128::from(c).checked_mul(w).and_then(|x| acc.checked_add(x)) {
                Some(x) => acc = x,
                None => return false,
            }
            if acc >= scale {
                return false;
            }
        }
        true
    }

    /// Boolean decision without witness construction.
    pub(crate) fn decide(&mut self, counts: &[u64]) -> bool {
        if counts[self.root] >= 1 || self.cascade_reaches_root(counts) {
            return true;
        }
        if self.potential_below_one(counts) {
            return false;
        }
        self.solve(counts).solvable
    }

    pub(crate) fn solve(&mut self, counts: &[u64]) -> SolveResult {
        self.memo.clear();
        self.explored = 0;
        let witness = self.search(counts);
        let explored = self.explored;
        self.memo = HashSet::new();
        SolveResult { solvable: witness.is_some(), witness: witness.map(MoveSequence), explored }
    }

    /// Iterative depth-first search. Every move removes one pebble, so the
    /// configuration graph is acyclic and the memo only ever holds failures.
    fn search(&mut self, start: &[u64]) -> Option<Vec<Move>> {
        struct Frame {
            state: Vec<u64>,
            vi: usize,
            ni: usize,
        }

        let mut path: Vec<Move> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut pending = Some(start.to_vec());

        loop {
            if let Some(state) = pending.take() {
                self.explored += 1;
                if state[self.root] >= 1 {
                    return Some(path);
                }
                if self.cascade_reaches_root(&state) {
                    path.extend(self.cascade_moves(&state));
                    return Some(path);
                }
                if self.potential_below_one(&state) {
                    self.memo.insert(state.into_boxed_slice());
                } else {
                    stack.push(Frame { state, vi: 0, ni: 0 });
                }
                continue;
            }

            let Some(frame) = stack.last_mut() else {
                return None;
            };
            // advance to the next untried move from this frame
            let mut next = None;
            while frame.vi < self.near_first.len() {
                let v = self.near_first[frame.vi];
                if frame.state[v] >= 2 && frame.ni < self.sorted_nbrs[v].len() {
                    let w = self.sorted_nbrs[v][frame.ni];
                    frame.ni += 1;
                    let mut child = frame.state.clone();
                    child[v] -= 2;
                    child[w] += 1;
                    if !self.memo.contains(child.as_slice()) {
                        next = Some((Move(v, w), child));
                        break;
                    }
                } else {
                    frame.vi += 1;
                    frame.ni = 0;
                }
            }
            match next {
                Some((mv, child)) => {
                    path.push(mv);
                    pending = Some(child);
                }
                None => {
                    let done = stack.pop().unwrap();
                    self.memo.insert(done.state.into_boxed_slice());
                    path.pop();
                }
            }
        }
    }

    #[allow(dead_code)]
    pub(crate) fn graph(&self) -> &Graph {
        self.graph
    }
}
