//! Reproduction harness: every headline number as a named, timed check.

pub mod oracle;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, BoundMethod};
use crate::families::{self, complete, cycle, hypercube, path, petersen, tree_from_parents};
use crate::graph::Graph;
use crate::lp::{self, rat, LinearProgram, LpStatus};
use crate::solver::{self, SolverOptions};
use crate::strategy::{self, GenerationMethod, Strategy, StrategySet};
use crate::treepi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

pub type CheckFn = fn() -> Result<String, String>;

pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub tier: Tier,
    pub budget: Duration,
    pub run: CheckFn,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<4} {:<34} {:>9.3}s / {:>5}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "1", name: "paths pi(P_n, end) = 2^(n-1)", tier: Tier::Fast, budget: secs(10), run: check_paths },
        Check { id: "2", name: "complete graphs pi(K_n) = n", tier: Tier::Fast, budget: secs(10), run: check_complete },
        Check { id: "3", name: "cycles C3..C6 = 3,4,5,8", tier: Tier::Fast, budget: secs(60), run: check_cycles },
        Check { id: "3s", name: "cycle C7 = 11", tier: Tier::Slow, budget: secs(600), run: check_c7 },
        Check { id: "4", name: "hypercubes pi(Q_d) = 2^d", tier: Tier::Fast, budget: secs(300), run: check_cubes },
        Check { id: "5", name: "Petersen exact pi = 10", tier: Tier::Slow, budget: secs(1800), run: check_petersen_exact },
        Check { id: "6", name: "Petersen greedy chi/kappa <= 9", tier: Tier::Fast, budget: secs(300), run: check_petersen_bound },
        Check { id: "7", name: "bound arithmetic 10 and 66", tier: Tier::Fast, budget: secs(10), run: check_arithmetic },
        Check { id: "8", name: "Bruhat B4 bound <= 80", tier: Tier::Fast, budget: secs(1800), run: check_bruhat },
        Check { id: "9", name: "soundness pi <= lp <= ratio", tier: Tier::Fast, budget: secs(900), run: check_soundness },
        Check { id: "10", name: "weight function oracle", tier: Tier::Fast, budget: secs(900), run: check_wfl },
        Check { id: "11", name: "tree formula = exhaustive", tier: Tier::Fast, budget: secs(1200), run: check_trees },
        Check { id: "12", name: "simplex = vertex enumeration", tier: Tier::Fast, budget: secs(1), run: check_simplex },
    ]
}

pub fn run_check(check: &Check) -> Outcome {
    let start = Instant::now();
    let res = (check.run)();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > check.budget {
        passed = false;
        detail = format!("over time budget; {detail}");
    }
    Outcome { id: check.id, name: check.name, passed, detail, elapsed, budget: check.budget }
}

/// Runs every check of the level, in order.
pub fn run(level: Level) -> Vec<Outcome> {
    checks()
        .iter()
        .filter(|c| level == Level::Full || c.tier == Tier::Fast)
        .map(run_check)
        .collect()
}

fn expect_eq<T: PartialEq + fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pi_graph(g: &Graph) -> Result<u64, String> {
    solver::pi_graph(g, &SolverOptions::default()).map(|r| r.value).map_err(err)
}

fn check_paths() -> Result<String, String> {
    let mut got = Vec::new();
    for n in 1..=5usize {
        let v = solver::pi_rooted(&path(n).map_err(err)?, 0, &SolverOptions::default()).map_err(err)?.value;
        expect_eq(&format!("pi(P_{n}, 0)"), v, 1 << (n - 1))?;
        got.push(v);
    }
    Ok(format!("{got:?}"))
}

fn check_complete() -> Result<String, String> {
    let mut got = Vec::new();
    for n in 2..=5usize {
        let v = pi_graph(&complete(n).map_err(err)?)?;
        expect_eq(&format!("pi(K_{n})"), v, n as u64)?;
        got.push(v);
    }
    Ok(format!("{got:?}"))
}

/// `2^k` for `C_2k`, `2 floor(2^(k+1) / 3) + 1` for `C_2k+1`.
pub fn cycle_pebbling_number(n: usize) -> u64 {
    let k = n / 2;
    if n.is_multiple_of(2) {
        1 << k
    } else {
        2 * ((1u64 << (k + 1)) / 3) + 1
    }
}

fn check_cycles() -> Result<String, String> {
    let mut got = Vec::new();
    for (n, want) in [(3, 3), (4, 4), (5, 5), (6, 8)] {
        expect_eq("cycle formula", cycle_pebbling_number(n), want)?;
        let v = pi_graph(&cycle(n).map_err(err)?)?;
        expect_eq(&format!("pi(C_{n})"), v, want)?;
        got.push(v);
    }
    Ok(format!("{got:?}"))
}

fn check_c7() -> Result<String, String> {
    expect_eq("cycle formula", cycle_pebbling_number(7), 11)?;
    let v = pi_graph(&cycle(7).map_err(err)?)?;
    expect_eq("pi(C_7)", v, 11)?;
    Ok(format!("{v}"))
}

fn check_cubes() -> Result<String, String> {
    let mut got = Vec::new();
    for d in [2usize, 3] {
        let v = pi_graph(&hypercube(d).map_err(err)?)?;
        expect_eq(&format!("pi(Q_{d})"), v, 1 << d)?;
        got.push(v);
    }
    Ok(format!("{got:?}"))
}

fn check_petersen_exact() -> Result<String, String> {
    let res = solver::pi_graph(&petersen(), &SolverOptions::default()).map_err(err)?;
    expect_eq("pi(Petersen)", res.value, 10)?;
    Ok(format!("10, critical {}", res.critical_config))
}

fn check_petersen_bound() -> Result<String, String> {
    let g = petersen();
    let set = strategy::generate_strategies(&g, 0, GenerationMethod::default()).map_err(err)?;
    let k = bounds::kappa(&g, 0, &set).map_err(err)?;
    let c = bounds::chi(&set).map_err(err)?;
    if c > 9 * k {
        return Err(format!("chi/kappa = {c}/{k} exceeds 9"));
    }
    expect_eq("ratio bound", bounds::ratio_from(k, c).map_err(err)?, 10)?;
    Ok(format!("kappa={k} chi={c} over {} strategies", set.len()))
}

/// The depth-3 tree hanging off each neighbor of `root`, one per neighbor.
pub fn petersen_neighbor_trees(root: usize) -> StrategySet {
    let g = petersen();
    let trees = g
        .neighbors(root)
        .iter()
        .map(|&a| {
            let mut parent = BTreeMap::from([(a, root)]);
            for &b in g.neighbors(a).iter().filter(|&&b| b != root) {
                parent.insert(b, a);
                for &c in g.neighbors(b).iter().filter(|&&c| c != a) {
                    parent.insert(c, b);
                }
            }
            strategy::strategy_from_tree(&g, root, &parent).expect("valid tree")
        })
        .collect();
    StrategySet::new(root, trees).expect("non-empty")
}

fn check_arithmetic() -> Result<String, String> {
    let g = petersen();
    let set = petersen_neighbor_trees(0);
    let k = bounds::kappa(&g, 0, &set).map_err(err)?;
    let c = bounds::chi(&set).map_err(err)?;
    expect_eq("Petersen (kappa, chi)", (k, c), (4, 36))?;
    expect_eq("Petersen ratio bound", bounds::ratio_bound(&g, 0, &set).map_err(err)?, 10)?;
    expect_eq("ratio(4, 36)", bounds::ratio_from(4, 36).map_err(err)?, 10)?;
    expect_eq("ratio(6, 395)", bounds::ratio_from(6, 395).map_err(err)?, 66)?;
    Ok("(4,36) -> 10, (6,395) -> 66".into())
}

fn check_bruhat() -> Result<String, String> {
    let g = families::bruhat(4).map_err(err)?;
    let b = bounds::bound_graph(&g, BoundMethod::Ratio, GenerationMethod::default()).map_err(err)?;
    if let Some((r, Err(e))) = b.per_root.iter().find(|(_, r)| r.is_err()) {
        return Err(format!("root {r}: {e}"));
    }
    let overall = b.overall.ok_or("no overall bound")?;
    let lp_overall = b.per_root.iter().filter_map(|(_, r)| r.as_ref().ok()).map(|r| r.lp_bound).max().unwrap_or(0);
    if overall > 80 {
        return Err(format!("bound {overall} above 80"));
    }
    let grade = if overall <= 66 { "reproduction-grade (<= 66)" } else { "within target (<= 80)" };
    Ok(format!("ratio bound {overall}, lp bound {lp_overall}: {grade}"))
}

/// Graphs and roots swept by the soundness and weight-function checks.
pub fn soundness_catalog() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push((format!("path({n})"), path(n).unwrap()));
    }
    for n in 3..=6 {
        out.push((format!("cycle({n})"), cycle(n).unwrap()));
    }
    for n in 2..=5 {
        out.push((format!("complete({n})"), complete(n).unwrap()));
    }
    out.push(("star K1,3".into(), tree_from_parents(&[None, Some(0), Some(0), Some(0)]).unwrap()));
    out.push((
        "binary tree".into(),
        tree_from_parents(&[None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)]).unwrap(),
    ));
    out.push(("hypercube(2)".into(), hypercube(2).unwrap()));
    out.push(("hypercube(3)".into(), hypercube(3).unwrap()));
    out
}

/// Strategy sets the sweeps exercise for one root.
pub fn generated_sets(g: &Graph, root: usize) -> Result<Vec<StrategySet>, String> {
    let ecc = g.eccentricity(root).map_err(err)?;
    [
        GenerationMethod::AllPaths { max_len: ecc },
        GenerationMethod::BfsTrees { count: 4, seed: 7 },
        GenerationMethod::default(),
    ]
    .into_iter()
    .map(|m| strategy::generate_strategies(g, root, m).map_err(err))
    .collect()
}

fn check_soundness() -> Result<String, String> {
    let mut cases = 0;
    for (name, g) in soundness_catalog() {
        for r in 0..g.vertex_count() {
            let pi = solver::pi_rooted(&g, r, &SolverOptions::default()).map_err(err)?.value;
            for set in generated_sets(&g, r)? {
                let rep = bounds::lp_bound(&g, r, &set).map_err(err)?;
                if !(pi <= rep.lp_bound && rep.lp_bound <= rep.ratio_bound) {
                    return Err(format!(
                        "{name} root {r}: pi {pi}, lp {}, ratio {}",
                        rep.lp_bound, rep.ratio_bound
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (graph, root, set) cases, 0 violations"))
}

fn check_wfl() -> Result<String, String> {
    let mut checked = 0;
    for (name, g) in soundness_catalog() {
        for r in 0..g.vertex_count() {
            let pi = solver::pi_rooted(&g, r, &SolverOptions::default()).map_err(err)?.value;
            let mut seen: HashSet<Strategy> = HashSet::new();
            for set in generated_sets(&g, r)? {
                for s in set.strategies() {
                    if !seen.insert(s.clone()) {
                        continue;
                    }
                    let res = strategy::wfl_oracle_check(&g, r, s, pi - 1, solver::DEFAULT_MAX_CONFIGS).map_err(err)?;
                    if !res.holds {
                        return Err(format!("{name} root {r}: counterexample {:?}", res.counterexample));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} strategies, 0 counterexamples"))
}

/// All parent arrays with `parent[i] < i` on `n` vertices.
pub fn parent_arrays(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![vec![None]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..i).map(move |q| {
                    let mut next = p.clone();
                    next.push(Some(q));
                    next
                })
            })
            .collect();
    }
    if n == 0 {
        out.clear();
    }
    out
}

/// Canonical string of the tree rooted at `root`, equal exactly for
/// isomorphic rooted trees.
pub fn rooted_canonical(tree: &Graph, root: usize) -> String {
    fn enc(tree: &Graph, v: usize, from: usize) -> String {
        let mut kids: Vec<String> = tree.neighbors(v).iter().filter(|&&w| w != from).map(|&w| enc(tree, w, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    enc(tree, root, usize::MAX)
}

/// Rooted trees on at most `max_n` vertices, one per isomorphism class.
pub fn rooted_tree_shapes(max_n: usize) -> Vec<(Graph, usize)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_n {
        for parents in parent_arrays(n) {
            let t = tree_from_parents(&parents).unwrap();
            for r in 0..n {
                if seen.insert(rooted_canonical(&t, r)) {
                    out.push((t.clone(), r));
                }
            }
        }
    }
    out
}

/// Cap for the tree sweep: the 7-vertex path at an endpoint has about
/// 1.1e7 configurations at its critical level.
pub const TREE_SWEEP_MAX_CONFIGS: u64 = 20_000_000;

fn check_trees() -> Result<String, String> {
    let opts = SolverOptions { max_configs: TREE_SWEEP_MAX_CONFIGS };
    let shapes = rooted_tree_shapes(7);
    for (t, r) in &shapes {
        let formula = treepi::pi_tree(t, *r).map_err(err)?;
        let exact = solver::pi_rooted(t, *r, &opts).map_err(err)?.value;
        if formula != exact {
            return Err(format!("{} root {r}: formula {formula}, search {exact}", t.to_edge_list().replace('\n', ";")));
        }
        let partition = treepi::max_path_partition(t, *r).map_err(err)?;
        if !partition.tiles(t, *r) {
            return Err(format!("partition {:?} does not tile", partition.paths));
        }
        let witness = partition.critical_config(t.vertex_count()).map_err(err)?;
        if solver::is_solvable(t, &witness, *r).map_err(err)?.solvable {
            return Err(format!("critical configuration {witness} is solvable"));
        }
    }
    let mut tiled = 0;
    for parents in parent_arrays(8) {
        let t = tree_from_parents(&parents).unwrap();
        for r in 0..8 {
            if !treepi::max_path_partition(&t, r).map_err(err)?.tiles(&t, r) {
                return Err(format!("partition of {parents:?} at {r} does not tile"));
            }
            tiled += 1;
        }
    }
    Ok(format!("{} rooted shapes match, {tiled} labeled partitions tile", shapes.len()))
}

/// Fixed and seeded-random LPs with at most three variables.
pub fn simplex_suite() -> Vec<LinearProgram> {
    let mut out = Vec::new();
    let mut add = |obj: &[i64], rows: &[(&[i64], i64)]| {
        let mut p = LinearProgram::new(obj.iter().map(|&c| rat(c)).collect());
        for (row, rhs) in rows {
            p.add_constraint(row.iter().map(|&c| rat(c)).collect(), rat(*rhs)).unwrap();
        }
        out.push(p);
    };
    add(&[1], &[(&[2], 12)]);
    add(&[1, 1], &[(&[2, 1], 3)]);
    add(&[1], &[]);
    add(&[1, 1, 1], &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]);
    add(&[1, 1, 1], &[(&[1, 1, 0], 0), (&[0, 1, 1], 1), (&[1, 0, 1], 1)]);
    add(&[3, 2, 4], &[(&[1, 1, 2], 4), (&[2, 0, 3], 5), (&[2, 1, 3], 7)]);
    add(&[1, -1], &[(&[1, -1], 2)]);
    add(&[1, 1], &[(&[1, -1], 2)]);

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(0..=4);
        let mut p = LinearProgram::new((0..n).map(|_| rat(rng.gen_range(-2..=5))).collect());
        for _ in 0..m {
            let row = (0..n).map(|_| rat(rng.gen_range(-2..=6))).collect();
            p.add_constraint(row, rat(rng.gen_range(0..=9))).unwrap();
        }
        out.push(p);
    }
    out
}

fn check_simplex() -> Result<String, String> {
    let suite = simplex_suite();
    let mut bounded = 0;
    for (i, p) in suite.iter().enumerate() {
        let sol = lp::solve_max(p);
        let reference = oracle::lp_by_enumeration(p);
        match (&sol.status, reference) {
            (LpStatus::Optimal, Some(v)) => {
                if sol.value != v || !p.is_feasible(&sol.point) || p.evaluate(&sol.point) != sol.value {
                    return Err(format!("LP #{i}: simplex {} vs enumeration {v}", sol.value));
                }
                bounded += 1;
            }
            (LpStatus::Unbounded, None) => {}
            (status, reference) => return Err(format!("LP #{i}: simplex {status:?} vs enumeration {reference:?}")),
        }
    }
    Ok(format!("{} LPs ({bounded} bounded) agree exactly", suite.len()))
}
