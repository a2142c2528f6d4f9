//! Dense exact Gaussian elimination over [`Scalar`].

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    /// consistent but with free variables
    RankDeficient { rank: usize, unknowns: usize },
    Inconsistent,
}

/// Solves `rows * x = rhs` for `unknowns` variables. Over- and
/// under-determined systems are allowed.
pub fn solve(mut rows: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>, unknowns: usize) -> Solution {
    assert_eq!(rows.len(), rhs.len());
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..m).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for v in rows[r][c..].iter_mut() {
            *v *= &inv;
        }
        rhs[r] *= &inv;
        for k in 0..m {
            if k == r || rows[k][c].is_zero() {
                continue;
            }
            let factor = rows[k][c].clone();
            for cc in c..unknowns {
                if !rows[r][cc].is_zero() {
                    let t = &factor * &rows[r][cc];
                    rows[k][cc] -= &t;
                }
            }
            let t = &factor * &rhs[r];
            rhs[k] -= &t;
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return Solution::Inconsistent;
    }
    if r < unknowns {
        return Solution::RankDeficient { rank: r, unknowns };
    }
    let mut x = vec![Scalar::zero(); unknowns];
    for (k, &c) in pivots.iter().enumerate() {
        x[c] = rhs[k].clone();
    }
    Solution::Unique(x)
}

/// Rank of a matrix.
pub fn rank(rows: Vec<Vec<Scalar>>, cols: usize) -> usize {
    let m = rows.len();
    match solve(rows, vec![Scalar::zero(); m], cols) {
        Solution::Unique(_) => cols,
        Solution::RankDeficient { rank, .. } => rank,
        Solution::Inconsistent => unreachable!("homogeneous systems are consistent"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn square_system() {
        let rows = vec![vec![s(2), s(1)], vec![s(1), s(3)]];
        let sol = solve(rows, vec![s(3), s(5)], 2);
        assert_eq!(sol, Solution::Unique(vec![Scalar::new(4, 5), Scalar::new(7, 5)]));
    }

    #[test]
    fn overdetermined_consistent_and_not() {
        let rows = vec![vec![s(1), s(0)], vec![s(0), s(1)], vec![s(1), s(1)]];
        assert_eq!(solve(rows.clone(), vec![s(1), s(2), s(3)], 2), Solution::Unique(vec![s(1), s(2)]));
        assert_eq!(solve(rows, vec![s(1), s(2), s(4)], 2), Solution::Inconsistent);
    }

    #[test]
    fn rank_deficiency_reported() {
        let rows = vec![vec![s(1), s(2)], vec![s(2), s(4)]];
        assert_eq!(solve(rows.clone(), vec![s(1), s(2)], 2), Solution::RankDeficient { rank: 1, unknowns: 2 });
        assert_eq!(rank(rows, 2), 1);
        assert_eq!(solve(vec![], vec![], 1), Solution::RankDeficient { rank: 0, unknowns: 1 });
    }
}
