//! Exact rational primal simplex for `max c·x s.t. A x <= b, x >= 0` with
//! `b >= 0`, so the slack basis is feasible from the start.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::strategy::StrategySet;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p/q` (always with a denominator).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().ok()?;
    let q: BigInt = q.trim().parse().ok()?;
    (!q.is_zero()).then(|| BigRational::new(p, q))
}

/// Largest integer not above `x`.
pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub row: Vec<Rational>,
    pub rhs: Rational,
}

/// Maximization problem over non-negative variables with `<=` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram { num_vars: objective.len(), objective, constraints: Vec::new() }
    }

    pub fn add_constraint(&mut self, row: Vec<Rational>, rhs: Rational) -> Result<()> {
        if row.len() != self.num_vars {
            return Err(Error::Lp(format!("row has {} entries, expected {}", row.len(), self.num_vars)));
        }
        if rhs.is_negative() {
            return Err(Error::Lp("negative right-hand side".into()));
        }
        self.constraints.push(Constraint { row, rhs });
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// True iff `x` satisfies every row and non-negativity exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| dot(&c.row, x) <= c.rhs)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective at `point`. When unbounded, `point` is the last basic
    /// solution visited.
    pub value: Rational,
    pub point: Vec<Rational>,
    /// Optimal dual multipliers, one per constraint (meaningful when optimal).
    pub duals: Vec<Rational>,
    pub pivot_count: usize,
}

pub fn solve_max(lp: &LinearProgram) -> LpSolution {
    Tableau::new(lp).run(None)
}

/// As [`solve_max`], writing every tableau to `trace`.
pub fn solve_max_traced(lp: &LinearProgram, trace: &mut String) -> LpSolution {
    Tableau::new(lp).run(Some(trace))
}

struct Tableau {
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced costs: `c·x = value + sum_j reduced[j] * x_j` over nonbasics.
    reduced: Vec<Rational>,
    value: Rational,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        let rows = lp
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut row = c.row.clone();
                row.extend((0..m).map(|j| if j == i { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let mut reduced = lp.objective.clone();
        reduced.resize(n + m, Rational::zero());
        Tableau {
            n,
            rows,
            rhs: lp.constraints.iter().map(|c| c.rhs.clone()).collect(),
            reduced,
            value: Rational::zero(),
            basis: (n..n + m).collect(),
        }
    }

    fn run(mut self, mut trace: Option<&mut String>) -> LpSolution {
        let mut pivots = 0;
        loop {
            if let Some(t) = trace.as_deref_mut() {
                self.dump(t, pivots);
            }
            // Bland: lowest-index improving column ...
            let Some(q) = self.reduced.iter().position(|r| r.is_positive()) else {
                return self.finish(LpStatus::Optimal, pivots);
            };
            // ... and the lowest-index basic variable among minimum ratios.
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let r = &self.rhs[i] / &row[q];
                let better = match &leave {
                    None => true,
                    Some((j, best)) => r < *best || (r == *best && self.basis[i] < self.basis[*j]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
            let Some((p, _)) = leave else {
                return self.finish(LpStatus::Unbounded, pivots);
            };
            self.pivot(p, q);
            pivots += 1;
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.rows[p][q].clone();
        if !piv.is_one() {
            for x in self.rows[p].iter_mut() {
                if !x.is_zero() {
                    *x /= &piv;
                }
            }
            self.rhs[p] /= &piv;
        }
        let pivot_row = std::mem::take(&mut self.rows[p]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == p || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            for &j in &nonzero {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            let delta = &f * &self.rhs[p];
            self.rhs[i] -= delta;
        }
        if !self.reduced[q].is_zero() {
            let f = self.reduced[q].clone();
            for &j in &nonzero {
                let delta = &f * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value += &f * &self.rhs[p];
        }
        self.rows[p] = pivot_row;
        self.basis[p] = q;
    }

    fn finish(self, status: LpStatus, pivot_count: usize) -> LpSolution {
        let mut point = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                point[b] = self.rhs[i].clone();
            }
        }
        let duals = self.reduced[self.n..].iter().map(|r| -r).collect();
        LpSolution { status, value: self.value, point, duals, pivot_count }
    }

    fn dump(&self, out: &mut String, step: usize) {
        let _ = writeln!(out, "-- tableau after {step} pivots, value {}", self.value);
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "x{:<3}| {} | {}", self.basis[i], cells.join(" "), self.rhs[i]);
        }
        let cells: Vec<String> = self.reduced.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "rc  | {}", cells.join(" "));
    }
}

/// The relaxation LP for one root, with its variable-to-vertex map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relaxation {
    pub program: LinearProgram,
    /// `vertices[j]` is the graph vertex behind variable `j` (ascending, root excluded).
    pub vertices: Vec<usize>,
}

/// One variable per non-root vertex, objective all ones, and one row per
/// strategy: `sum_v w(v) x_v <= unit weight`.
pub fn build_relaxation(graph: &Graph, root: usize, set: &StrategySet) -> Result<Relaxation> {
    graph.check_vertex(root)?;
    if set.root() != root {
        return Err(Error::RootMismatch { expected: root, got: set.root() });
    }
    let vertices: Vec<usize> = (0..graph.vertex_count()).filter(|&v| v != root).collect();
    let mut column = vec![usize::MAX; graph.vertex_count()];
    for (j, &v) in vertices.iter().enumerate() {
        column[v] = j;
    }
    let mut program = LinearProgram::new(vec![Rational::one(); vertices.len()]);
    for s in set.strategies() {
        let mut row = vec![Rational::zero(); vertices.len()];
        for (&v, &w) in s.weights() {
            if v >= graph.vertex_count() {
                return Err(Error::InvalidVertex { vertex: v, n: graph.vertex_count() });
            }
            row[column[v]] = Rational::from_integer(BigInt::from(w));
        }
        program.add_constraint(row, Rational::from_integer(BigInt::from(s.unit_weight()?)))?;
    }
    Ok(Relaxation { program, vertices })
}
