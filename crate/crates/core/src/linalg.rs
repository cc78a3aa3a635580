//! Dense linear algebra over F_p.

use crate::field::Prime;

/// Row-reduce in place to reduced row echelon form; returns pivot columns.
/// Zero rows are dropped.
pub fn rref(rows: &mut Vec<Vec<u64>>, p: Prime) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = p.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = p.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = p.sub(*x, p.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: Prime) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// A solution of `A x = b` with every free variable set to zero.
pub fn solve(a: &[Vec<u64>], b: &[u64], p: Prime, ncols: usize) -> Option<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &v)| {
            let mut r = row.clone();
            r.resize(ncols, 0);
            r.push(v);
            r
        })
        .collect();
    let pivots = rref(&mut m, p);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &c) in m.iter().zip(&pivots) {
        x[c] = row[ncols];
    }
    Some(x)
}

/// A basis of `{x : A x = 0}`.
pub fn nullspace(a: &[Vec<u64>], p: Prime, ncols: usize) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.resize(ncols, 0);
            r
        })
        .collect();
    let pivots = rref(&mut m, p);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (row, &c) in m.iter().zip(&pivots) {
            v[c] = p.neg(row[free]);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_kernel() {
        let p = Prime::new(7).unwrap();
        let a = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank(&a, p), 2);
        let x = solve(&a, &[6, 5, 2], p, 3).unwrap();
        for (row, b) in a.iter().zip([6u64, 5, 2]) {
            let lhs = row.iter().zip(&x).fold(0, |s, (&r, &v)| p.add(s, p.mul(r, v)));
            assert_eq!(lhs, b);
        }
        assert!(solve(&a, &[1, 1, 0], p, 3).is_none());
        let k = nullspace(&a, p, 3);
        assert_eq!(k.len(), 1);
        for row in &a {
            assert_eq!(row.iter().zip(&k[0]).fold(0, |s, (&r, &v)| p.add(s, p.mul(r, v))), 0);
        }
    }
}
