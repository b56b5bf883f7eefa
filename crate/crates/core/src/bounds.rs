//! Upper bounds on pebbling numbers from a set of strategies.
//!
//! Summing the weight-function inequality over a strategy set gives
//! `kappa * |C| <= chi` for every r-unsolvable `C`, hence
//! `pi(G, r) <= floor(chi / kappa) + 1`. Keeping the inequalities separate
//! gives a linear program whose optimum `z` yields `pi(G, r) <= floor(z) + 1`.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lp::{self, LpStatus, Rational};
use crate::strategy::{generate_strategies, GenerationMethod, StrategySet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub root: usize,
    pub kappa: u64,
    pub chi: u64,
    pub ratio_bound: u64,
    pub lp_value: Rational,
    pub lp_bound: u64,
    pub strategy_count: usize,
}

fn check_root(graph: &Graph, root: usize, set: &StrategySet) -> Result<()> {
    graph.check_vertex(root)?;
    if set.root() != root {
        return Err(Error::RootMismatch { expected: root, got: set.root() });
    }
    Ok(())
}

/// Minimum over non-root vertices of the summed strategy weights.
pub fn kappa(graph: &Graph, root: usize, set: &StrategySet) -> Result<u64> {
    check_root(graph, root, set)?;
    let mut sums = vec![0u64; graph.vertex_count()];
    for s in set.strategies() {
        for (&v, &w) in s.weights() {
            let slot = sums.get_mut(v).ok_or(Error::InvalidVertex { vertex: v, n: graph.vertex_count() })?;
            *slot = slot.checked_add(w).ok_or(Error::Overflow("summing vertex weights"))?;
        }
    }
    let others = (0..graph.vertex_count()).filter(|&v| v != root);
    let uncovered: Vec<usize> = others.clone().filter(|&v| sums[v] == 0).collect();
    if !uncovered.is_empty() {
        return Err(Error::Uncovered(uncovered));
    }
    others.map(|v| sums[v]).min().ok_or(Error::Strategy("graph has no non-root vertex".into()))
}

/// Sum of unit weights over the set.
pub fn chi(set: &StrategySet) -> Result<u64> {
    set.strategies().iter().try_fold(0u64, |acc, s| {
        acc.checked_add(s.unit_weight()?).ok_or(Error::Overflow("summing unit weights"))
    })
}

/// `floor(chi / kappa) + 1`.
pub fn ratio_from(kappa: u64, chi: u64) -> Result<u64> {
    if kappa == 0 {
        return Err(Error::Strategy("kappa is zero".into()));
    }
    Ok(chi / kappa + 1)
}

pub fn ratio_bound(graph: &Graph, root: usize, set: &StrategySet) -> Result<u64> {
    let k = kappa(graph, root, set)?;
    ratio_from(k, chi(set)?)
}

/// Both bounds for one root.
pub fn lp_bound(graph: &Graph, root: usize, set: &StrategySet) -> Result<BoundReport> {
    let k = kappa(graph, root, set)?;
    let c = chi(set)?;
    let relax = lp::build_relaxation(graph, root, set)?;
    let sol = lp::solve_max(&relax.program);
    if sol.status == LpStatus::Unbounded {
        return Err(Error::Unbounded);
    }
    let lp_bound = lp::floor_int(&sol.value)
        .to_u64()
        .and_then(|z| z.checked_add(1))
        .ok_or(Error::Overflow("converting the LP bound"))?;
    Ok(BoundReport {
        root,
        kappa: k,
        chi: c,
        ratio_bound: ratio_from(k, c)?,
        lp_value: sol.value,
        lp_bound,
        strategy_count: set.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Ratio,
    Lp,
}

impl BoundReport {
    pub fn bound(&self, method: BoundMethod) -> u64 {
        match method {
            BoundMethod::Ratio => self.ratio_bound,
            BoundMethod::Lp => self.lp_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphBounds {
    pub per_root: Vec<(usize, Result<BoundReport>)>,
    /// Maximum over roots; `None` when any root failed.
    pub overall: Option<u64>,
    pub method: BoundMethod,
}

/// Generates strategies and bounds every root independently.
pub fn bound_graph(graph: &Graph, method: BoundMethod, gen: GenerationMethod) -> Result<GraphBounds> {
    graph.require_connected()?;
    let per_root: Vec<(usize, Result<BoundReport>)> = (0..graph.vertex_count())
        .into_par_iter()
        .map(|r| (r, generate_strategies(graph, r, gen).and_then(|set| lp_bound(graph, r, &set))))
        .collect();
    let overall = per_root
        .iter()
        .map(|(_, rep)| rep.as_ref().ok().map(|b| b.bound(method)))
        .collect::<Option<Vec<u64>>>()
        .and_then(|v| v.into_iter().max());
    Ok(GraphBounds { per_root, overall, method })
}

/// Serialized bound report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub graph: String,
    pub per_root: Vec<RootJson>,
    pub overall_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootJson {
    Ok {
        root: usize,
        kappa: u64,
        chi: u64,
        ratio_bound: u64,
        lp_value: String,
        lp_bound: u64,
    },
    Failed {
        root: usize,
        error: String,
    },
}

impl From<&BoundReport> for RootJson {
    fn from(b: &BoundReport) -> Self {
        RootJson::Ok {
            root: b.root,
            kappa: b.kappa,
            chi: b.chi,
            ratio_bound: b.ratio_bound,
            lp_value: lp::format_rational(&b.lp_value),
            lp_bound: b.lp_bound,
        }
    }
}

impl GraphBounds {
    pub fn to_json(&self, descriptor: &str) -> BoundsJson {
        BoundsJson {
            graph: descriptor.to_string(),
            per_root: self
                .per_root
                .iter()
                .map(|(r, rep)| match rep {
                    Ok(b) => RootJson::from(b),
                    Err(e) => RootJson::Failed { root: *r, error: e.to_string() },
                })
                .collect(),
            overall_bound: self.overall,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cycle, path, petersen};
    use crate::lp::rat;
    use crate::strategy::{strategy_from_path, strategy_from_tree};
    use std::collections::BTreeMap;

    #[test]
    fn ratio_arithmetic() {
        assert_eq!(ratio_from(4, 36).unwrap(), 10);
        assert_eq!(ratio_from(6, 395).unwrap(), 66);
        assert!(ratio_from(0, 3).is_err());
    }

    #[test]
    fn single_path_on_paths() {
        for n in 2..=10 {
            let g = path(n).unwrap();
            let vs: Vec<usize> = (0..n).collect();
            let set = StrategySet::new(0, vec![strategy_from_path(&g, &vs).unwrap()]).unwrap();
            assert_eq!(kappa(&g, 0, &set).unwrap(), 1);
            assert_eq!(chi(&set).unwrap(), (1 << (n - 1)) - 1);
            assert_eq!(ratio_bound(&g, 0, &set).unwrap(), 1 << (n - 1));
        }
    }

    #[test]
    fn lp_on_p3_and_k4() {
        let g = path(3).unwrap();
        let set = StrategySet::new(0, vec![strategy_from_path(&g, &[0, 1, 2]).unwrap()]).unwrap();
        let rep = lp_bound(&g, 0, &set).unwrap();
        assert_eq!((rep.lp_value.clone(), rep.lp_bound, rep.ratio_bound), (rat(3), 4, 4));

        let k4 = complete(4).unwrap();
        let set = generate_strategies(&k4, 0, GenerationMethod::AllPaths { max_len: 1 }).unwrap();
        let rep = lp_bound(&k4, 0, &set).unwrap();
        assert_eq!((rep.kappa, rep.chi, rep.lp_value.clone(), rep.lp_bound), (1, 3, rat(3), 4));
    }

    #[test]
    fn petersen_three_trees() {
        // rotate the depth-3 tree under the root's three neighbors
        let g = petersen();
        let root = 5;
        let mut trees = Vec::new();
        for &a in g.neighbors(root) {
            let mut parent = BTreeMap::from([(a, root)]);
            for &b in g.neighbors(a).iter().filter(|&&b| b != root) {
                parent.insert(b, a);
                for &c in g.neighbors(b).iter().filter(|&&c| c != a) {
                    parent.insert(c, b);
                }
            }
            trees.push(strategy_from_tree(&g, root, &parent).unwrap());
        }
        let set = StrategySet::new(root, trees).unwrap();
        assert_eq!(kappa(&g, root, &set).unwrap(), 4);
        assert_eq!(chi(&set).unwrap(), 36);
        let rep = lp_bound(&g, root, &set).unwrap();
        assert_eq!(rep.ratio_bound, 10);
        assert!(rep.lp_bound <= rep.ratio_bound);
        assert_eq!(rep.lp_value, rat(9));
    }

    #[test]
    fn coverage_and_root_errors() {
        let g = path(3).unwrap();
        let set = StrategySet::new(0, vec![strategy_from_path(&g, &[0, 1]).unwrap()]).unwrap();
        assert_eq!(kappa(&g, 0, &set), Err(Error::Uncovered(vec![2])));
        assert!(matches!(ratio_bound(&g, 1, &set), Err(Error::RootMismatch { .. })));
    }

    #[test]
    fn order_does_not_matter() {
        let g = cycle(6).unwrap();
        let set = generate_strategies(&g, 0, GenerationMethod::AllPaths { max_len: 3 }).unwrap();
        let mut rev = set.strategies().to_vec();
        rev.reverse();
        let rev = StrategySet::new(0, rev).unwrap();
        assert_eq!(kappa(&g, 0, &set).unwrap(), kappa(&g, 0, &rev).unwrap());
        assert_eq!(chi(&set).unwrap(), chi(&rev).unwrap());
    }

    #[test]
    fn whole_graph_bounds() {
        let b = bound_graph(&cycle(6).unwrap(), BoundMethod::Lp, GenerationMethod::default()).unwrap();
        assert!(b.overall.unwrap() >= 8);
        let b = bound_graph(&complete(3).unwrap(), BoundMethod::Ratio, GenerationMethod::default()).unwrap();
        assert!(b.overall.unwrap() >= 3);
        let json = serde_json::to_string(&b.to_json("complete(3)")).unwrap();
        assert!(json.contains("\"lp_value\":\"2/1\""));
    }

    #[test]
    fn partial_failures_are_kept() {
        let b = bound_graph(&path(4).unwrap(), BoundMethod::Ratio, GenerationMethod::AllPaths { max_len: 2 }).unwrap();
        assert!(b.per_root.iter().any(|(_, r)| r.is_ok()));
        assert!(b.per_root.iter().any(|(_, r)| r.is_err()));
        assert_eq!(b.overall, None);
    }
}
