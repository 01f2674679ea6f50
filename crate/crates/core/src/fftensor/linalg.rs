//! Dense linear algebra over a prime field.
//!
//! Matrices are row lists of residues in `0..p`. Everything is exact.

use super::PrimeField;

pub type Matrix = Vec<Vec<u64>>;

/// Reduced row echelon form. Returns the reduced nonzero rows and their
/// pivot columns.
pub fn rref(f: PrimeField, rows: &[Vec<u64>], ncols: usize) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, sel);
        let inv = f.inv(m[r][c]);
        for v in m[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = f.sub(*v, f.mul(factor, pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(f: PrimeField, rows: &[Vec<u64>], ncols: usize) -> usize {
    rref(f, rows, ncols).1.len()
}

/// Basis of `{x : M x = 0}`.
pub fn nullspace(f: PrimeField, rows: &[Vec<u64>], ncols: usize) -> Matrix {
    let (red, pivots) = rref(f, rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(f: PrimeField, m: &[Vec<u64>]) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let (red, pivots) = rref(f, &aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &[Vec<u64>], ncols: usize) -> Matrix {
    (0..ncols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_mul(f: PrimeField, a: &[Vec<u64>], b: &[Vec<u64>], bcols: usize) -> Matrix {
    a.iter()
        .map(|row| (0..bcols).map(|j| row.iter().zip(b).fold(0, |acc, (&x, br)| f.add(acc, f.mul(x, br[j])))).collect())
        .collect()
}

/// Extends linearly independent `rows` to a basis of `F_p^n` by appending
/// standard basis vectors. The given rows stay first, in order.
pub fn complete_basis(f: PrimeField, rows: &[Vec<u64>], n: usize) -> Matrix {
    let mut out: Matrix = rows.to_vec();
    let mut r = rank(f, &out, n);
    for i in 0..n {
        if r == n {
            break;
        }
        let mut e = vec![0u64; n];
        e[i] = 1;
        out.push(e);
        let nr = rank(f, &out, n);
        if nr > r {
            r = nr;
        } else {
            out.pop();
        }
    }
    out
}

/// Every subspace of `F_p^n` of dimension `d`, as its RREF basis.
pub fn subspaces(f: PrimeField, n: usize, d: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    if d > n {
        return out;
    }
    if d == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut pivots = Vec::with_capacity(d);
    pivot_sets(n, d, 0, &mut pivots, &mut |piv| {
        // free entries: row i, column c > piv[i], c not a pivot
        let slots: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| ((pc + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (i, c)))
            .collect();
        let total = (f.p as usize).pow(slots.len() as u32);
        for mut code in 0..total {
            let mut m = vec![vec![0u64; n]; d];
            for (i, &pc) in piv.iter().enumerate() {
                m[i][pc] = 1;
            }
            for &(i, c) in &slots {
                m[i][c] = (code % f.p as usize) as u64;
                code /= f.p as usize;
            }
            out.push(m);
        }
    });
    out
}

fn pivot_sets(n: usize, d: usize, start: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if cur.len() == d {
        visit(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, d, c + 1, cur, visit);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![1, 2, 0], vec![2, 1, 0]];
        assert_eq!(rank(f(3), &m, 3), 1);
        let ns = nullspace(f(3), &m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let dot = row.iter().zip(v).map(|(a, b)| a * b).sum::<u64>() % 3;
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 2]];
        let inv = inverse(f(5), &m).unwrap();
        let id = mat_mul(f(5), &m, &inv, 3);
        assert_eq!(id, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(inverse(f(2), &[vec![1, 1], vec![1, 1]]).is_none());
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        // [3 choose 1]_2 = 7, [3 choose 2]_3 = 13, [4 choose 2]_2 = 35
        assert_eq!(subspaces(f(2), 3, 1).len(), 7);
        assert_eq!(subspaces(f(3), 3, 2).len(), 13);
        assert_eq!(subspaces(f(2), 4, 2).len(), 35);
        assert_eq!(subspaces(f(3), 2, 0).len(), 1);
    }

    #[test]
    fn completion_keeps_prefix() {
        let rows = vec![vec![1, 1, 0]];
        let b = complete_basis(f(2), &rows, 3);
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], rows[0]);
        assert!(inverse(f(2), &b).is_some());
    }
}
