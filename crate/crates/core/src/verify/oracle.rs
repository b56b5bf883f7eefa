//! Brute-force references used by the verification harness. Nothing here
//! shares code with the simplex or the pebbling search it checks.

use num_traits::{Signed, Zero};

use crate::lp::{LinearProgram, Rational};

/// Solves `m x = b` for square `m`; `None` when singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let d = &f * &m[col][c];
                    m[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every constraint plus `-x_j <= 0`, as `(row, rhs)` hyperplanes.
fn hyperplanes(lp: &LinearProgram) -> Vec<(Vec<Rational>, Rational)> {
    let n = lp.num_vars();
    let mut planes: Vec<_> = lp.constraints().iter().map(|c| (c.row.clone(), c.rhs.clone())).collect();
    for j in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[j] = -Rational::from_integer(1.into());
        planes.push((row, Rational::zero()));
    }
    planes
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Optimum of `lp` by enumerating every basic feasible point and every
/// extreme ray of the feasible region. `None` means unbounded. Exponential,
/// for a handful of variables only.
pub fn lp_by_enumeration(lp: &LinearProgram) -> Option<Rational> {
    let n = lp.num_vars();
    let planes = hyperplanes(lp);
    let c = lp.objective();

    // extreme rays: n-1 tight homogeneous planes pin a direction
    if n >= 1 {
        for pick in subsets(planes.len(), n - 1) {
            for axis in 0..n {
                // fix d_axis = 1 and solve the tight system for the rest
                let mut m = Vec::new();
                let mut b = Vec::new();
                for &i in &pick {
                    m.push(planes[i].0.clone());
                    b.push(Rational::zero());
                }
                let mut unit = vec![Rational::zero(); n];
                unit[axis] = Rational::from_integer(1.into());
                m.push(unit);
                b.push(Rational::from_integer(1.into()));
                let Some(d) = solve_square(m, b) else { continue };
                for dir in [d.clone(), d.iter().map(|x| -x).collect::<Vec<_>>()] {
                    let is_ray = planes.iter().all(|(row, _)| !dot(row, &dir).is_positive());
                    if is_ray && dot(c, &dir).is_positive() {
                        return None;
                    }
                }
            }
        }
    }

    let mut best: Option<Rational> = None;
    for pick in subsets(planes.len(), n) {
        let m = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b = pick.iter().map(|&i| planes[i].1.clone()).collect();
        let Some(x) = solve_square(m, b) else { continue };
        if planes.iter().all(|(row, rhs)| dot(row, &x) <= *rhs) {
            let v = dot(c, &x);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    // the origin is always feasible, so some vertex exists when n >= 1
    Some(best.unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::rat;

    fn lp(obj: &[i64], rows: &[(&[i64], i64)]) -> LinearProgram {
        let mut lp = LinearProgram::new(obj.iter().map(|&c| rat(c)).collect());
        for (row, rhs) in rows {
            lp.add_constraint(row.iter().map(|&c| rat(c)).collect(), rat(*rhs)).unwrap();
        }
        lp
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(lp_by_enumeration(&lp(&[1], &[(&[2], 12)])), Some(rat(6)));
        assert_eq!(lp_by_enumeration(&lp(&[1, 1], &[(&[2, 1], 3)])), Some(rat(3)));
        assert_eq!(lp_by_enumeration(&lp(&[1], &[])), None);
        assert_eq!(lp_by_enumeration(&lp(&[1, 1], &[(&[1, -1], 2)])), None);
        assert_eq!(lp_by_enumeration(&lp(&[-1, 0], &[])), Some(rat(0)));
    }
}
