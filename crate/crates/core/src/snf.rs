//! Smith normal form over the integers with both unimodular transforms.
//!
//! `u * a * v = d` where `d` is diagonal with `d[0] | d[1] | ...`.

pub type Matrix = Vec<Vec<i128>>;

#[derive(Debug, Clone)]
pub struct Smith {
    /// Diagonal of `d` (length `min(rows, cols)`), nonnegative.
    pub diag: Vec<i128>,
    pub u: Matrix,
    pub v: Matrix,
    pub rows: usize,
    pub cols: usize,
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn smith(a: &Matrix, cols: usize) -> Smith {
    let rows = a.len();
    let mut a = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let swap_rows = |a: &mut Matrix, u: &mut Matrix, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
    };
    let swap_cols = |a: &mut Matrix, v: &mut Matrix, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i -= q * row_j
    let row_sub = |a: &mut Matrix, u: &mut Matrix, i: usize, j: usize, q: i128| {
        for c in 0..a[i].len() {
            let t = a[j][c];
            a[i][c] -= q * t;
        }
        for c in 0..u[i].len() {
            let t = u[j][c];
            u[i][c] -= q * t;
        }
    };
    // col_i -= q * col_j
    let col_sub = |a: &mut Matrix, v: &mut Matrix, i: usize, j: usize, q: i128| {
        for row in a.iter_mut() {
            let t = row[j];
            row[i] -= q * t;
        }
        for row in v.iter_mut() {
            let t = row[j];
            row[i] -= q * t;
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v, rows, cols);
            };
            swap_rows(&mut a, &mut u, t, pi);
            swap_cols(&mut a, &mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t] / a[t][t];
                    row_sub(&mut a, &mut u, i, t, q);
                    clean &= a[i][t] == 0;
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j] / a[t][t];
                    col_sub(&mut a, &mut v, j, t, q);
                    clean &= a[t][j] == 0;
                }
            }
            if !clean {
                continue;
            }
            let p = a[t][t];
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            if let Some(i) = offender {
                // row_t += row_i, then re-reduce
                row_sub(&mut a, &mut u, t, i, -1);
                continue;
            }
            break;
        }
        if a[t][t] < 0 {
            for c in 0..cols {
                a[t][c] = -a[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
    }
    finish(a, u, v, rows, cols)
}

fn finish(a: Matrix, u: Matrix, v: Matrix, rows: usize, cols: usize) -> Smith {
    let n = rows.min(cols);
    let diag = (0..n).map(|i| a[i][i].abs()).collect();
    Smith { diag, u, v, rows, cols }
}

pub fn mat_mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

/// Inverse of a unimodular matrix, computed by Gauss-Jordan over the integers.
pub fn unimodular_inverse(m: &Matrix) -> Matrix {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        // Euclid on column entries at rows >= col until a single nonzero remains
        loop {
            let nz: Vec<usize> = (col..n).filter(|&r| a[r][col] != 0).collect();
            let piv = *nz.iter().min_by_key(|&&r| a[r][col].abs()).expect("matrix is not unimodular");
            a.swap(col, piv);
            inv.swap(col, piv);
            let mut done = true;
            for r in col + 1..n {
                if a[r][col] != 0 {
                    let q = a[r][col] / a[col][col];
                    for c in 0..n {
                        let (t1, t2) = (a[col][c], inv[col][c]);
                        a[r][c] -= q * t1;
                        inv[r][c] -= q * t2;
                    }
                    done &= a[r][col] == 0;
                }
            }
            if done {
                break;
            }
        }
        assert!(a[col][col].abs() == 1, "matrix is not unimodular");
        if a[col][col] < 0 {
            for c in 0..n {
                a[col][c] = -a[col][c];
                inv[col][c] = -inv[col][c];
            }
        }
    }
    for col in (0..n).rev() {
        for r in 0..col {
            let q = a[r][col];
            if q != 0 {
                for c in 0..n {
                    let (t1, t2) = (a[col][c], inv[col][c]);
                    a[r][c] -= q * t1;
                    inv[r][c] -= q * t2;
                }
            }
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: Matrix, cols: usize) -> Smith {
        let s = smith(&a, cols);
        let ua = mat_mul(&s.u, &a, a.len(), cols);
        let d = mat_mul(&ua, &s.v, cols, cols);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x.abs(), s.diag[i]);
                } else {
                    assert_eq!(x, 0, "off-diagonal entry at ({i},{j})");
                }
            }
        }
        for w in s.diag.windows(2) {
            if w[1] != 0 {
                assert_eq!(w[1] % w[0].max(1), 0, "divisibility chain broken: {:?}", s.diag);
            }
        }
        s
    }

    #[test]
    fn diagonal_two_four() {
        let s = check(vec![vec![2, 0], vec![0, 4], vec![1, 2]], 2);
        assert_eq!(s.diag, vec![1, 4]);
    }

    #[test]
    fn coprime_factors_merge() {
        let s = check(vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn inverse_roundtrip() {
        let s = check(vec![vec![4, 6, 2], vec![6, 9, 3], vec![2, 2, 8]], 3);
        let vi = unimodular_inverse(&s.v);
        let id = mat_mul(&s.v, &vi, 3, 3);
        assert_eq!(id, identity(3));
    }
}
