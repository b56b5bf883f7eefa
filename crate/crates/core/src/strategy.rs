//! Tree strategies: rooted subtrees whose weights double at each step
//! toward the root. For any strategy `S` and r-unsolvable configuration
//! `C`, the weight of `C` is at most the unit weight of `S`.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::ops::ControlFlow;

use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};
use crate::lp::{self, LinearProgram, LpStatus, Rational};
use crate::solver::{composition_count, for_each_composition, Searcher};

/// Weights are `u64`; a strategy may be at most this deep.
pub const MAX_DEPTH: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    root: usize,
    parent: BTreeMap<usize, usize>,
    weight: BTreeMap<usize, u64>,
}

/// First broken rule found by [`validate_strategy`].
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum Violation {
    #[error("strategy has no vertex besides the root")]
    Empty,
    #[error("vertex {0} is outside the graph")]
    OutOfRange(usize),
    #[error("the root {0} has a parent or a weight")]
    RootNotZero(usize),
    #[error("vertex {0} has a parent but no weight, or the reverse")]
    WeightMismatch(usize),
    #[error("parent edge {child} -> {parent} is not an edge of the graph")]
    NotAnEdge { child: usize, parent: usize },
    #[error("vertex {0} does not lead to the root")]
    Cycle(usize),
    #[error("vertex {0} has weight zero")]
    ZeroWeight(usize),
    #[error("doubling law fails at {vertex}: parent {parent} weighs {parent_weight}, expected 2 x {weight}")]
    Doubling { vertex: usize, parent: usize, weight: u64, parent_weight: u64 },
}

impl Strategy {
    /// Wraps raw maps without checking them; see [`validate_strategy`].
    pub fn from_parts(root: usize, parent: BTreeMap<usize, usize>, weight: BTreeMap<usize, u64>) -> Self {
        Strategy { root, parent, weight }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parents(&self) -> &BTreeMap<usize, usize> {
        &self.parent
    }

    pub fn weights(&self) -> &BTreeMap<usize, u64> {
        &self.weight
    }

    /// Weight of `v`; zero for the root and for vertices outside the tree.
    pub fn weight(&self, v: usize) -> u64 {
        self.weight.get(&v).copied().unwrap_or(0)
    }

    /// `sum_v w(v) C(v)`.
    pub fn config_weight(&self, config: &Configuration) -> Result<u64> {
        self.weight.iter().try_fold(0u64, |acc, (&v, &w)| {
            let c = config.0.get(v).copied().unwrap_or(0);
            w.checked_mul(c)
                .and_then(|x| acc.checked_add(x))
                .ok_or(Error::Overflow("summing configuration weight"))
        })
    }

    /// Weight of one pebble on every non-root vertex of the tree.
    pub fn unit_weight(&self) -> Result<u64> {
        self.weight
            .values()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or(Error::Overflow("summing unit weight"))
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// Checks every strategy rule against `graph`, returning the first failure.
pub fn validate_strategy(graph: &Graph, s: &Strategy) -> std::result::Result<(), Violation> {
    let n = graph.vertex_count();
    if s.root >= n {
        return Err(Violation::OutOfRange(s.root));
    }
    if s.parent.is_empty() {
        return Err(Violation::Empty);
    }
    if s.parent.contains_key(&s.root) || s.weight.contains_key(&s.root) {
        return Err(Violation::RootNotZero(s.root));
    }
    for (&v, &p) in &s.parent {
        if v >= n || p >= n {
            return Err(Violation::OutOfRange(v.max(p)));
        }
        if !graph.has_edge(v, p) {
            return Err(Violation::NotAnEdge { child: v, parent: p });
        }
        if !s.weight.contains_key(&v) {
            return Err(Violation::WeightMismatch(v));
        }
    }
    if let Some(&v) = s.weight.keys().find(|v| !s.parent.contains_key(v)) {
        return Err(Violation::WeightMismatch(v));
    }
    for &v in s.parent.keys() {
        let mut cur = v;
        for _ in 0..=s.parent.len() {
            match s.parent.get(&cur) {
                Some(&p) => cur = p,
                None => break,
            }
        }
        if cur != s.root {
            return Err(Violation::Cycle(v));
        }
    }
    for (&v, &w) in &s.weight {
        if w == 0 {
            return Err(Violation::ZeroWeight(v));
        }
        let p = s.parent[&v];
        if p != s.root {
            let pw = s.weight[&p];
            if Some(pw) != w.checked_mul(2) {
                return Err(Violation::Doubling { vertex: v, parent: p, weight: w, parent_weight: pw });
            }
        }
    }
    Ok(())
}

fn checked(graph: &Graph, s: Strategy) -> Result<Strategy> {
    validate_strategy(graph, &s).map_err(|v| Error::Strategy(v.to_string()))?;
    Ok(s)
}

/// Path strategy `r = p0, p1, ..., pm` with `w(p_j) = 2^(m-j)`.
pub fn strategy_from_path(graph: &Graph, vertices: &[usize]) -> Result<Strategy> {
    if vertices.len() < 2 {
        return Err(Error::Strategy("a path strategy needs at least one edge".into()));
    }
    let m = vertices.len() - 1;
    if m > MAX_DEPTH {
        return Err(Error::Strategy(format!("path of length {m} exceeds the depth limit {MAX_DEPTH}")));
    }
    for &v in vertices {
        graph.check_vertex(v)?;
    }
    let mut seen = HashSet::new();
    if let Some(v) = vertices.iter().find(|v| !seen.insert(**v)) {
        return Err(Error::Strategy(format!("vertex {v} repeats on the path")));
    }
    let mut parent = BTreeMap::new();
    let mut weight = BTreeMap::new();
    for j in 1..=m {
        let (prev, v) = (vertices[j - 1], vertices[j]);
        if !graph.has_edge(prev, v) {
            return Err(Error::Strategy(format!("{prev} and {v} are not adjacent")));
        }
        parent.insert(v, prev);
        weight.insert(v, 1u64 << (m - j));
    }
    checked(graph, Strategy { root: vertices[0], parent, weight })
}

/// Tree strategy with `w(v) = 2^(h - depth(v))`, `h` the tree height.
pub fn strategy_from_tree(graph: &Graph, root: usize, parent: &BTreeMap<usize, usize>) -> Result<Strategy> {
    graph.check_vertex(root)?;
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in parent.keys() {
        let mut chain = Vec::new();
        let mut cur = v;
        let d = loop {
            if cur == root {
                break 0;
            }
            if let Some(&d) = depth.get(&cur) {
                break d;
            }
            if chain.len() > parent.len() {
                return Err(Error::Strategy(format!("vertex {v} lies on a parent cycle")));
            }
            chain.push(cur);
            match parent.get(&cur) {
                Some(&p) => {
                    graph.check_vertex(p)?;
                    if !graph.has_edge(cur, p) {
                        return Err(Error::Strategy(format!("{cur} -> {p} is not an edge of the graph")));
                    }
                    cur = p;
                }
                None => return Err(Error::Strategy(format!("vertex {cur} does not lead to root {root}"))),
            }
        };
        for (i, &u) in chain.iter().rev().enumerate() {
            depth.insert(u, d + i + 1);
        }
    }
    let height = depth.values().copied().max().unwrap_or(0);
    if height > MAX_DEPTH {
        return Err(Error::Strategy(format!("depth {height} exceeds the limit {MAX_DEPTH}")));
    }
    let weight = depth.iter().map(|(&v, &d)| (v, 1u64 << (height - d))).collect();
    checked(graph, Strategy { root, parent: parent.clone(), weight })
}

/// A non-empty list of strategies sharing one root. Repeats are allowed;
/// a repeated strategy counts once per copy in the aggregate bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySet {
    root: usize,
    strategies: Vec<Strategy>,
}

impl StrategySet {
    pub fn new(root: usize, strategies: Vec<Strategy>) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::EmptyStrategySet);
        }
        if let Some(s) = strategies.iter().find(|s| s.root != root) {
            return Err(Error::RootMismatch { expected: root, got: s.root });
        }
        Ok(StrategySet { root, strategies })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Non-root vertices that no strategy reaches.
    pub fn uncovered(&self, graph: &Graph) -> Vec<usize> {
        (0..graph.vertex_count())
            .filter(|&v| v != self.root && self.strategies.iter().all(|s| s.weight(v) == 0))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = StrategySetFile {
            root: self.root,
            strategies: self
                .strategies
                .iter()
                .map(|s| StrategyFile { parent: s.parent.clone(), weight: Some(s.weight.clone()) })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("strategy sets serialize") + "\n"
    }

    /// Reads and validates a strategy-set file. Missing weights are derived
    /// from tree depth.
    pub fn from_json(graph: &Graph, text: &str) -> Result<Self> {
        let file: StrategySetFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        graph.check_vertex(file.root)?;
        let strategies = file
            .strategies
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let res = match s.weight {
                    Some(weight) => checked(graph, Strategy { root: file.root, parent: s.parent, weight }),
                    None => strategy_from_tree(graph, file.root, &s.parent),
                };
                res.map_err(|e| Error::Strategy(format!("strategy #{i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        StrategySet::new(file.root, strategies)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StrategySetFile {
    root: usize,
    strategies: Vec<StrategyFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StrategyFile {
    parent: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<BTreeMap<usize, u64>>,
}

/// How [`generate_strategies`] builds its set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationMethod {
    /// One path strategy per simple path from the root with at most `max_len` edges.
    AllPaths { max_len: usize },
    /// Breadth-first spanning trees under shuffled neighbor orders.
    BfsTrees { count: usize, seed: u64 },
    /// LP-guided selection from a candidate pool, capped at `budget` strategies.
    GreedySearch { budget: usize, seed: u64 },
}

impl Default for GenerationMethod {
    fn default() -> Self {
        GenerationMethod::GreedySearch { budget: 256, seed: 0 }
    }
}

/// Cap on simple paths enumerated for one root.
pub const MAX_PATHS: usize = 20_000;

pub fn generate_strategies(graph: &Graph, root: usize, method: GenerationMethod) -> Result<StrategySet> {
    graph.check_vertex(root)?;
    graph.require_connected()?;
    if graph.vertex_count() < 2 {
        return Err(Error::Strategy("a one-vertex graph has no strategies".into()));
    }
    let strategies = match method {
        GenerationMethod::AllPaths { max_len } => all_path_strategies(graph, root, max_len)?,
        GenerationMethod::BfsTrees { count, seed } => bfs_tree_strategies(graph, root, count, seed)?,
        GenerationMethod::GreedySearch { budget, seed } => {
            let pool = candidate_pool(graph, root, seed)?;
            return greedy_select(graph, root, &pool, budget, seed);
        }
    };
    let set = StrategySet::new(root, strategies)?;
    let missing = set.uncovered(graph);
    if !missing.is_empty() {
        return Err(Error::Uncovered(missing));
    }
    Ok(set)
}

/// Simple paths leaving `root`, depth-first in neighbor order.
pub fn all_path_strategies(graph: &Graph, root: usize, max_len: usize) -> Result<Vec<Strategy>> {
    let max_len = max_len.min(MAX_DEPTH);
    let mut out = Vec::new();
    let mut path = vec![root];
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[root] = true;

    fn walk(
        graph: &Graph,
        max_len: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Strategy>,
    ) -> Result<()> {
        if path.len() > max_len || out.len() >= MAX_PATHS {
            return Ok(());
        }
        let last = *path.last().unwrap();
        for &w in graph.neighbors(last) {
            if on_path[w] || out.len() >= MAX_PATHS {
                continue;
            }
            path.push(w);
            on_path[w] = true;
            out.push(strategy_from_path(graph, path)?);
            walk(graph, max_len, path, on_path, out)?;
            on_path[w] = false;
            path.pop();
        }
        Ok(())
    }
    walk(graph, max_len, &mut path, &mut on_path, &mut out)?;
    Ok(out)
}

fn bfs_parents(graph: &Graph, root: usize, order: &[Vec<usize>], banned: &[bool], max_depth: usize) -> BTreeMap<usize, usize> {
    let mut parent = BTreeMap::new();
    let mut depth = vec![usize::MAX; graph.vertex_count()];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        if depth[u] == max_depth {
            continue;
        }
        for &w in &order[u] {
            if depth[w] == usize::MAX && !banned[w] {
                depth[w] = depth[u] + 1;
                parent.insert(w, u);
                queue.push_back(w);
            }
        }
    }
    parent
}

fn natural_order(graph: &Graph) -> Vec<Vec<usize>> {
    (0..graph.vertex_count()).map(|v| graph.neighbors(v).to_vec()).collect()
}

/// Distinct breadth-first spanning trees; the first uses natural neighbor
/// order, the rest shuffle it with a seeded generator.
pub fn bfs_tree_strategies(graph: &Graph, root: usize, count: usize, seed: u64) -> Result<Vec<Strategy>> {
    let banned = vec![false; graph.vertex_count()];
    let mut order = natural_order(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for attempt in 0..count.saturating_mul(8).max(1) {
        if out.len() >= count {
            break;
        }
        if attempt > 0 {
            for list in order.iter_mut() {
                list.shuffle(&mut rng);
            }
        }
        let parent = bfs_parents(graph, root, &order, &banned, usize::MAX);
        if seen.insert(parent.clone()) {
            out.push(strategy_from_tree(graph, root, &parent)?);
        }
    }
    Ok(out)
}

/// Candidates for greedy search: all short paths, breadth-first trees (whole
/// and truncated), and per-neighbor branch trees grown with the root removed.
pub fn candidate_pool(graph: &Graph, root: usize, seed: u64) -> Result<Vec<Strategy>> {
    let n = graph.vertex_count();
    let ecc = graph.eccentricity(root)?;
    let mut pool = all_path_strategies(graph, root, ecc + 1)?;
    pool.extend(bfs_tree_strategies(graph, root, 16, seed)?);

    let order = natural_order(graph);
    let none = vec![false; n];
    for depth in 1..ecc {
        let parent = bfs_parents(graph, root, &order, &none, depth);
        pool.push(strategy_from_tree(graph, root, &parent)?);
    }

    for &a in graph.neighbors(root) {
        // grown from `a` in G - root, and in G - (root and its other neighbors)
        let mut only_root = vec![false; n];
        only_root[root] = true;
        let mut closed = only_root.clone();
        for &b in graph.neighbors(root) {
            closed[b] = b != a;
        }
        for banned in [&only_root, &closed] {
            let mut prev = None;
            for depth in 0..=n {
                let mut parent = bfs_parents(graph, a, &order, banned, depth);
                parent.insert(a, root);
                if prev.as_ref() == Some(&parent) || parent.len() > MAX_DEPTH * n {
                    break;
                }
                pool.push(strategy_from_tree(graph, root, &parent)?);
                prev = Some(parent);
            }
        }
    }

    let mut seen = HashSet::new();
    pool.retain(|s| seen.insert(s.clone()));
    Ok(pool)
}

/// Picks multiplicities for strategies that minimize the aggregate ratio
/// `chi / kappa`.
///
/// The best ratio reachable from a fixed pool equals the optimum of the
/// pool's relaxation, and its optimal dual multipliers are the
/// multiplicities. The pool grows by column generation: trees are locally
/// improved against the current optimum and kept when they cut it off.
pub fn greedy_select(graph: &Graph, root: usize, pool: &[Strategy], budget: usize, seed: u64) -> Result<StrategySet> {
    if pool.is_empty() {
        return Err(Error::EmptyStrategySet);
    }
    let missing = StrategySet::new(root, pool.to_vec())?.uncovered(graph);
    if !missing.is_empty() {
        return Err(Error::Uncovered(missing));
    }
    let mut pool = pool.to_vec();
    let mut known: HashSet<Strategy> = pool.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (solution, active) = loop {
        let (sol, active) = solve_pool(graph, root, &pool)?;
        if pool.len() >= MAX_POOL {
            break (sol, active);
        }
        let x: Vec<f64> = (0..graph.vertex_count())
            .map(|v| if v == root { 0.0 } else { sol.point[column(v, root)].to_f64().unwrap_or(0.0) })
            .collect();
        let mut seeds: Vec<BTreeMap<usize, usize>> = active.iter().map(|&i| pool[i].parent.clone()).collect();
        seeds.extend((0..PRICING_SEEDS).map(|_| random_tree(graph, root, &mut rng)));
        let improved: Vec<Strategy> = seeds
            .par_iter()
            .filter_map(|seed| improve_tree(graph, root, seed, &x))
            .filter_map(|parent| strategy_from_tree(graph, root, &parent).ok())
            .collect();
        let mut added = 0;
        for s in improved {
            if cuts_off(&s, root, &sol.point) && known.insert(s.clone()) {
                pool.push(s);
                added += 1;
            }
        }
        if added == 0 {
            break (sol, active);
        }
    };

    let weights: Vec<(usize, Rational)> = active
        .iter()
        .zip(&solution.duals)
        .filter(|(_, y)| y.is_positive())
        .map(|(&i, y)| (i, y.clone()))
        .collect();
    let mut counts = integer_multiplicities(&weights, budget.max(1));
    prune(graph, &pool, &mut counts);

    let strategies = counts
        .iter()
        .flat_map(|&(i, k)| std::iter::repeat_n(pool[i].clone(), k))
        .collect();
    StrategySet::new(root, strategies)
}

const MAX_POOL: usize = 5_000;
const PRICING_SEEDS: usize = 64;

fn column(v: usize, root: usize) -> usize {
    if v > root {
        v - 1
    } else {
        v
    }
}

fn cuts_off(s: &Strategy, root: usize, point: &[Rational]) -> bool {
    let lhs: Rational = s
        .weight
        .iter()
        .map(|(&v, &w)| &point[column(v, root)] * Rational::from_integer(BigInt::from(w)))
        .sum();
    lhs > Rational::from_integer(BigInt::from(s.unit_weight().unwrap_or(u64::MAX)))
}

/// Relaxation over the whole pool, solved by row generation: start from rows
/// covering every vertex and add the most violated pool rows until none is
/// violated. Returns the solution and the pool indices of its rows.
fn solve_pool(graph: &Graph, root: usize, pool: &[Strategy]) -> Result<(lp::LpSolution, Vec<usize>)> {
    let relax = lp::build_relaxation(graph, root, &StrategySet::new(root, pool.to_vec())?)?;
    let rows = relax.program.constraints();
    let n_vars = relax.program.num_vars();

    let mut active: Vec<usize> = Vec::new();
    let mut covered = vec![false; n_vars];
    while covered.iter().any(|c| !c) {
        let best = (0..rows.len())
            .max_by_key(|&i| {
                let gain = rows[i].row.iter().zip(&covered).filter(|(w, c)| !**c && w.is_positive()).count();
                (gain, std::cmp::Reverse(i))
            })
            .unwrap();
        for (j, w) in rows[best].row.iter().enumerate() {
            covered[j] |= w.is_positive();
        }
        active.push(best);
    }

    loop {
        let mut sub = LinearProgram::new(relax.program.objective().to_vec());
        for &i in &active {
            sub.add_constraint(rows[i].row.clone(), rows[i].rhs.clone())?;
        }
        let sol = lp::solve_max(&sub);
        if sol.status == LpStatus::Unbounded {
            return Err(Error::Unbounded);
        }
        let mut violated: Vec<(Rational, usize)> = (0..rows.len())
            .filter(|i| !active.contains(i))
            .filter_map(|i| {
                let lhs = rows[i].row.iter().zip(&sol.point).fold(Rational::zero(), |a, (w, x)| a + w * x);
                (lhs > rows[i].rhs).then(|| (lhs / &rows[i].rhs, i))
            })
            .collect();
        if violated.is_empty() {
            return Ok((sol, active));
        }
        violated.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        active.extend(violated.iter().take(8).map(|&(_, i)| i));
    }
}

/// A spanning tree grown from the root in random frontier order.
fn random_tree(graph: &Graph, root: usize, rng: &mut ChaCha8Rng) -> BTreeMap<usize, usize> {
    let mut parent = BTreeMap::new();
    let mut inside = vec![false; graph.vertex_count()];
    inside[root] = true;
    let mut frontier: Vec<(usize, usize)> = graph.neighbors(root).iter().map(|&w| (w, root)).collect();
    while !frontier.is_empty() {
        let (v, p) = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        if inside[v] {
            continue;
        }
        inside[v] = true;
        parent.insert(v, p);
        frontier.extend(graph.neighbors(v).iter().filter(|&&w| !inside[w]).map(|&w| (w, v)));
    }
    parent
}

/// Weighted average of `x` under the tree's doubling weights, or `None`
/// for an empty or too-deep tree.
fn tree_score(root: usize, parent: &BTreeMap<usize, usize>, x: &[f64]) -> Option<f64> {
    if parent.is_empty() {
        return None;
    }
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in parent.keys() {
        let mut d = 0;
        let mut cur = v;
        while cur != root {
            if let Some(&known) = depth.get(&cur) {
                d += known;
                break;
            }
            cur = parent[&cur];
            d += 1;
        }
        depth.insert(v, d);
    }
    let h = *depth.values().max()?;
    if h > MAX_DEPTH {
        return None;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&v, &d) in &depth {
        let w = (1u64 << (h - d)) as f64;
        num += w * x[v];
        den += w;
    }
    Some(num / den)
}

/// Hill-climbs on single leaf removals and single-vertex attachments to
/// raise the tree's weighted average of `x`. Returns the final tree when it
/// scores above 1, i.e. when its inequality is violated by `x`.
fn improve_tree(graph: &Graph, root: usize, start: &BTreeMap<usize, usize>, x: &[f64]) -> Option<BTreeMap<usize, usize>> {
    let mut tree = start.clone();
    let mut score = tree_score(root, &tree, x)?;
    loop {
        let mut best: Option<(f64, BTreeMap<usize, usize>)> = None;
        let mut consider = |cand: BTreeMap<usize, usize>| {
            if let Some(s) = tree_score(root, &cand, x) {
                if s > score + 1e-12 && best.as_ref().is_none_or(|(b, _)| s > *b + 1e-12) {
                    best = Some((s, cand));
                }
            }
        };
        let has_child: HashSet<usize> = tree.values().copied().collect();
        for &v in tree.keys() {
            if !has_child.contains(&v) {
                let mut cand = tree.clone();
                cand.remove(&v);
                consider(cand);
            }
        }
        for u in 0..graph.vertex_count() {
            if u == root || tree.contains_key(&u) {
                continue;
            }
            for &p in graph.neighbors(u) {
                if p == root || tree.contains_key(&p) {
                    let mut cand = tree.clone();
                    cand.insert(u, p);
                    consider(cand);
                }
            }
        }
        match best {
            Some((s, cand)) => {
                score = s;
                tree = cand;
            }
            None => break,
        }
    }
    (score > 1.0 + 1e-9).then_some(tree)
}

/// Scales rational multipliers to the smallest proportional integers, or
/// rounds them into `budget` copies when that is too many.
fn integer_multiplicities(weights: &[(usize, Rational)], budget: usize) -> Vec<(usize, usize)> {
    let lcm = weights.iter().fold(BigInt::one(), |acc, (_, y)| acc.lcm(y.denom()));
    let scaled: Vec<BigInt> = weights.iter().map(|(_, y)| (y * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, k| acc.gcd(k));
    let exact: Vec<BigInt> = scaled.iter().map(|k| k / &gcd).collect();
    let total: BigInt = exact.iter().sum();
    if total <= BigInt::from(budget) {
        return weights.iter().zip(&exact).map(|((i, _), k)| (*i, k.to_usize().unwrap())).collect();
    }
    let sum: Rational = weights.iter().map(|(_, y)| y.clone()).sum();
    let budget_r = Rational::from_integer(BigInt::from(budget));
    weights
        .iter()
        .map(|(i, y)| {
            let k = (y * &budget_r / &sum).round().to_integer().to_usize().unwrap_or(1).max(1);
            (*i, k)
        })
        .collect()
}

fn set_ratio(graph: &Graph, pool: &[Strategy], counts: &[(usize, usize)]) -> Option<(u128, u128)> {
    let n = graph.vertex_count();
    let root = pool[counts.first()?.0].root;
    let mut cover = vec![0u128; n];
    let mut chi = 0u128;
    for &(i, k) in counts {
        let s = &pool[i];
        chi += k as u128 * u128::from(s.unit_weight().ok()?);
        for (&v, &w) in &s.weight {
            cover[v] += k as u128 * u128::from(w);
        }
    }
    let kappa = (0..n).filter(|&v| v != root).map(|v| cover[v]).min()?;
    (kappa > 0).then_some((chi, kappa))
}

/// Drops single copies while the ratio does not get worse.
fn prune(graph: &Graph, pool: &[Strategy], counts: &mut Vec<(usize, usize)>) {
    let Some(mut current) = set_ratio(graph, pool, counts) else {
        return;
    };
    let mut changed = true;
    while changed {
        changed = false;
        for idx in 0..counts.len() {
            let mut trial = counts.clone();
            trial[idx].1 -= 1;
            trial.retain(|&(_, k)| k > 0);
            if let Some(r) = set_ratio(graph, pool, &trial) {
                // r.chi / r.kappa <= current.chi / current.kappa
                if r.0 * current.1 <= current.0 * r.1 {
                    *counts = trial;
                    current = r;
                    changed = true;
                    break;
                }
            }
        }
    }
}

/// Outcome of [`wfl_oracle_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WflCheck {
    pub holds: bool,
    /// An unsolvable configuration heavier than the unit weight, if any.
    pub counterexample: Option<Configuration>,
    /// Largest weight among unsolvable configurations checked.
    pub max_unsolvable_weight: u64,
    pub configs_checked: u64,
}

/// Exhaustively checks that every r-unsolvable configuration with at most
/// `max_total` pebbles weighs at most the strategy's unit weight.
pub fn wfl_oracle_check(
    graph: &Graph,
    root: usize,
    s: &Strategy,
    max_total: u64,
    max_configs: u64,
) -> Result<WflCheck> {
    graph.check_vertex(root)?;
    graph.require_connected()?;
    validate_strategy(graph, s).map_err(|v| Error::Strategy(v.to_string()))?;
    if s.root != root {
        return Err(Error::RootMismatch { expected: root, got: s.root });
    }
    let others: Vec<usize> = (0..graph.vertex_count()).filter(|&v| v != root).collect();
    let total_count: u128 = (0..=max_total).map(|t| composition_count(t, others.len())).sum();
    if total_count > u128::from(max_configs) {
        return Err(Error::CapExceeded { level: max_total, count: total_count, cap: max_configs, last_verified: None });
    }
    let unit = s.unit_weight()?;
    let mut searcher = Searcher::new(graph, root)?;
    let mut config = vec![0u64; graph.vertex_count()];
    let mut buf = vec![0u64; others.len()];
    let mut result = WflCheck { holds: true, counterexample: None, max_unsolvable_weight: 0, configs_checked: 0 };
    let mut failure: Option<Error> = None;
    for total in 0..=max_total {
        let flow = for_each_composition(total, &mut buf, &mut |parts| {
            for (i, &v) in others.iter().enumerate() {
                config[v] = parts[i];
            }
            result.configs_checked += 1;
            let cw = match s.config_weight(&Configuration(config.clone())) {
                Ok(w) => w,
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            };
            if cw <= result.max_unsolvable_weight {
                // cannot raise the maximum or break the bound
                return ControlFlow::Continue(());
            }
            if !searcher.decide(&config) {
                result.max_unsolvable_weight = cw;
                if cw > unit {
                    result.holds = false;
                    result.counterexample = Some(Configuration(config.clone()));
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if flow.is_break() {
            break;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cycle, path, petersen};

    fn weights(s: &Strategy) -> Vec<(usize, u64)> {
        s.weights().iter().map(|(&v, &w)| (v, w)).collect()
    }

    #[test]
    fn path_weights() {
        let g = path(3).unwrap();
        let s = strategy_from_path(&g, &[0, 1, 2]).unwrap();
        assert_eq!(weights(&s), vec![(1, 2), (2, 1)]);
        assert_eq!(s.unit_weight().unwrap(), 3);
        let e = strategy_from_path(&g, &[0, 1]).unwrap();
        assert_eq!(weights(&e), vec![(1, 1)]);
        let p = petersen();
        let s = strategy_from_path(&p, &[0, 1, 2, 3]).unwrap();
        assert_eq!(weights(&s), vec![(1, 4), (2, 2), (3, 1)]);
    }

    #[test]
    fn path_errors() {
        let g = path(4).unwrap();
        assert!(strategy_from_path(&g, &[0, 2]).is_err());
        assert!(strategy_from_path(&g, &[0, 1, 0]).is_err());
        assert!(strategy_from_path(&g, &[0]).is_err());
        let long = path(64).unwrap();
        let all: Vec<usize> = (0..64).collect();
        assert!(strategy_from_path(&long, &all).is_err());
        assert!(strategy_from_path(&long, &all[..63]).is_ok());
    }

    #[test]
    fn tree_weights() {
        let star = complete(3).unwrap();
        let s = strategy_from_tree(&star, 0, &BTreeMap::from([(1, 0), (2, 0)])).unwrap();
        assert_eq!(weights(&s), vec![(1, 1), (2, 1)]);

        // root 0 - a 1 - b 2, plus root - a' 3
        let g = Graph::new(4, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        let s = strategy_from_tree(&g, 0, &BTreeMap::from([(1, 0), (2, 1), (3, 0)])).unwrap();
        assert_eq!(weights(&s), vec![(1, 2), (2, 1), (3, 2)]);

        let p = path(5).unwrap();
        let via_tree = strategy_from_tree(&p, 0, &BTreeMap::from([(1, 0), (2, 1), (3, 2), (4, 3)])).unwrap();
        assert_eq!(via_tree, strategy_from_path(&p, &[0, 1, 2, 3, 4]).unwrap());
    }

    #[test]
    fn tree_errors() {
        let g = cycle(4).unwrap();
        assert!(strategy_from_tree(&g, 0, &BTreeMap::from([(2, 0)])).is_err());
        assert!(strategy_from_tree(&g, 0, &BTreeMap::from([(1, 2), (2, 1)])).is_err());
        assert!(strategy_from_tree(&g, 0, &BTreeMap::from([(1, 0), (2, 5)])).is_err());
    }

    #[test]
    fn validation_diagnostics() {
        let g = path(3).unwrap();
        let bad = Strategy::from_parts(0, BTreeMap::from([(1, 0), (2, 1)]), BTreeMap::from([(1, 3), (2, 1)]));
        assert!(matches!(validate_strategy(&g, &bad), Err(Violation::Doubling { vertex: 2, .. })));
        let off = Strategy::from_parts(0, BTreeMap::from([(2, 0)]), BTreeMap::from([(2, 1)]));
        assert_eq!(validate_strategy(&g, &off), Err(Violation::NotAnEdge { child: 2, parent: 0 }));
        let empty = Strategy::from_parts(0, BTreeMap::new(), BTreeMap::new());
        assert_eq!(validate_strategy(&g, &empty), Err(Violation::Empty));
        let rooted = Strategy::from_parts(0, BTreeMap::from([(1, 0)]), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(validate_strategy(&g, &rooted), Err(Violation::RootNotZero(0)));
        let zero = Strategy::from_parts(0, BTreeMap::from([(1, 0)]), BTreeMap::from([(1, 0)]));
        assert_eq!(validate_strategy(&g, &zero), Err(Violation::ZeroWeight(1)));
    }

    #[test]
    fn petersen_figure_tree_is_valid() {
        // root 5 - neighbor 0 - {1, 4} - their other neighbors {2, 6, 3, 9}
        let g = petersen();
        let parent = BTreeMap::from([(0, 5), (1, 0), (4, 0), (2, 1), (6, 1), (3, 4), (9, 4)]);
        let s = strategy_from_tree(&g, 5, &parent).unwrap();
        assert!(validate_strategy(&g, &s).is_ok());
        let mut w: Vec<u64> = s.weights().values().copied().collect();
        w.sort_unstable();
        assert_eq!(w, vec![1, 1, 1, 1, 2, 2, 4]);
        assert_eq!(s.unit_weight().unwrap(), 12);
    }

    #[test]
    fn config_weights() {
        let g = path(3).unwrap();
        let s = strategy_from_path(&g, &[0, 1, 2]).unwrap();
        assert_eq!(s.config_weight(&Configuration(vec![0, 0, 3])).unwrap(), 3);
        assert_eq!(s.config_weight(&Configuration(vec![0, 1, 1])).unwrap(), 3);
        assert_eq!(s.config_weight(&Configuration::zeros(3)).unwrap(), 0);
        assert!(s.config_weight(&Configuration(vec![0, u64::MAX, 0])).is_err());
    }

    #[test]
    fn unit_weight_of_paths() {
        let g = path(11).unwrap();
        for m in 1..=10 {
            let vs: Vec<usize> = (0..=m).collect();
            assert_eq!(strategy_from_path(&g, &vs).unwrap().unit_weight().unwrap(), (1 << m) - 1);
        }
    }

    #[test]
    fn all_paths_generation() {
        let set = generate_strategies(&path(3).unwrap(), 0, GenerationMethod::AllPaths { max_len: 2 }).unwrap();
        assert_eq!(set.len(), 2);
        let k4 = generate_strategies(&complete(4).unwrap(), 0, GenerationMethod::AllPaths { max_len: 1 }).unwrap();
        assert_eq!(k4.len(), 3);
        assert!(matches!(
            generate_strategies(&path(3).unwrap(), 0, GenerationMethod::AllPaths { max_len: 1 }),
            Err(Error::Uncovered(v)) if v == vec![2]
        ));
    }

    #[test]
    fn bfs_trees_are_valid_and_distinct() {
        let g = cycle(6).unwrap();
        let set = generate_strategies(&g, 0, GenerationMethod::BfsTrees { count: 4, seed: 1 }).unwrap();
        // C6 from 0 has exactly two breadth-first trees (the antipode picks a side)
        assert_eq!(set.len(), 2);
        for s in set.strategies() {
            assert!(validate_strategy(&g, s).is_ok());
        }
    }

    #[test]
    fn greedy_is_deterministic() {
        let g = petersen();
        let a = generate_strategies(&g, 0, GenerationMethod::default()).unwrap();
        let b = generate_strategies(&g, 0, GenerationMethod::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip_and_derived_weights() {
        let g = petersen();
        let set = generate_strategies(&g, 0, GenerationMethod::AllPaths { max_len: 2 }).unwrap();
        let text = set.to_json();
        assert!(text.contains("\"root\"") && text.contains("\"parent\"") && text.contains("\"weight\""));
        assert_eq!(StrategySet::from_json(&g, &text).unwrap(), set);

        let bare = r#"{"root": 0, "strategies": [{"parent": {"1": 0, "2": 1}}]}"#;
        let s = StrategySet::from_json(&path(3).unwrap(), bare).unwrap();
        assert_eq!(weights(&s.strategies()[0]), vec![(1, 2), (2, 1)]);

        let wrong = r#"{"root": 0, "strategies": [{"parent": {"1": 0, "2": 1}, "weight": {"1": 3, "2": 1}}]}"#;
        assert!(StrategySet::from_json(&path(3).unwrap(), wrong).is_err());
        assert!(StrategySet::from_json(&path(3).unwrap(), r#"{"root": 0, "strategies": []}"#).is_err());
    }

    #[test]
    fn wfl_on_short_paths() {
        let p3 = path(3).unwrap();
        let s = strategy_from_path(&p3, &[0, 1, 2]).unwrap();
        let res = wfl_oracle_check(&p3, 0, &s, 4, 1_000_000).unwrap();
        assert!(res.holds);
        assert_eq!(res.max_unsolvable_weight, 3);

        let p2 = path(2).unwrap();
        let e = strategy_from_path(&p2, &[0, 1]).unwrap();
        let res = wfl_oracle_check(&p2, 0, &e, 3, 1_000_000).unwrap();
        assert!(res.holds);
        assert_eq!(res.max_unsolvable_weight, 1);
    }

    #[test]
    fn wfl_on_c5_paths() {
        let g = cycle(5).unwrap();
        for p in [[0, 1, 2], [0, 4, 3]] {
            let s = strategy_from_path(&g, &p).unwrap();
            assert!(wfl_oracle_check(&g, 0, &s, 5, 1_000_000).unwrap().holds);
        }
    }

    #[test]
    fn wfl_detects_an_overweight_strategy() {
        // weights that break the doubling law are rejected before the check
        let g = path(3).unwrap();
        let bad = Strategy::from_parts(0, BTreeMap::from([(1, 0), (2, 1)]), BTreeMap::from([(1, 1), (2, 1)]));
        assert!(wfl_oracle_check(&g, 0, &bad, 4, 1_000).is_err());
    }
}
