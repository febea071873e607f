use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.concat(),
        })
    }

    /// Builds from nested rows; the column count comes from the first row.
    pub fn from_nested(rows: &[Vec<i64>]) -> Option<Self> {
        Self::from_rows(rows, rows.first().map_or(0, Vec::len))
    }

    pub fn from_diagonal(rows: usize, cols: usize, diag: &[i64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product, `None` on shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Some(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Option<IntMatrix> {
        if self.rows != other.rows {
            return None;
        }
        let rows: Vec<Vec<i64>> = (0..self.rows)
            .map(|i| [self.row(i), other.row(i)].concat())
            .collect();
        Self::from_rows(&rows, self.cols + other.cols)
    }

    /// Rank over `Q`, by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&e| BigInt::from(e)).collect())
            .collect();
        let mut rank = 0;
        let mut prev = BigInt::from(1);
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let v = (&a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c]) / &prev;
                    a[r][c] = v;
                }
                a[r][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Determinant of a square matrix (Bareiss), `None` if not square.
    pub fn determinant(&self) -> Option<BigInt> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| self.row(i).iter().map(|&e| BigInt::from(e)).collect())
            .collect();
        let mut sign = BigInt::from(1);
        let mut prev = BigInt::from(1);
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Some(BigInt::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Some(if n == 0 { BigInt::from(1) } else { sign * prev })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += k * v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += k * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `U * M * V = diag(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// `min(rows, cols)` invariant factors, nonnegative, each dividing the next
    /// (zeros last).
    pub d: Vec<i64>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn nonzero_count(&self) -> usize {
        self.d.iter().filter(|&&x| x != 0).count()
    }
}

/// Smith normal form by unimodular row and column operations.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    // V is accumulated transposed so that column operations become row
    // operations on vt.
    let mut vt = IntMatrix::identity(cols);
    let n = rows.min(cols);

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a[(i, j)].abs();
                    if x != 0 && best.is_none_or(|(bi, bj)| x < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            vt.swap_rows(t, pj);

            let p = a[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[(i, t)] / p;
                if q != 0 {
                    a.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                if a[(i, t)] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a[(t, j)] / p;
                if q != 0 {
                    a.add_col(j, t, -q);
                    vt.add_row(j, t, -q);
                }
                if a[(t, j)] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[(i, j)] % p != 0));
            match offending {
                Some(i) => {
                    a.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    SnfResult {
        d,
        u,
        v: vt.transpose(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_nested(&rows).unwrap()
    }

    fn check(m: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(m);
        let prod = r.u.mul(m).unwrap().mul(&r.v).unwrap();
        assert_eq!(prod, IntMatrix::from_diagonal(m.rows(), m.cols(), &r.d));
        for w in r.d.windows(2) {
            if w[1] != 0 {
                assert!(w[0] != 0 && w[1] % w[0] == 0, "{:?}", r.d);
            } else {
                assert!(w[0] >= 0);
            }
        }
        assert!(r.d.iter().all(|&x| x >= 0));
        let one = BigInt::from(1);
        assert_eq!(r.u.determinant().unwrap().magnitude(), one.magnitude());
        assert_eq!(r.v.determinant().unwrap().magnitude(), one.magnitude());
        r
    }

    #[test]
    fn snf_examples() {
        assert_eq!(check(&mat(&[&[5, -3], &[3, -2]])).d, vec![1, 1]);
        assert_eq!(check(&mat(&[&[2]])).d, vec![2]);
        assert_eq!(check(&mat(&[&[0, 0], &[0, 0]])).d, vec![0, 0]);
    }

    #[test]
    fn snf_divisibility_fixup() {
        // diag(2, 3) is not in Smith form; expect (1, 6)
        assert_eq!(check(&mat(&[&[2, 0], &[0, 3]])).d, vec![1, 6]);
        assert_eq!(
            check(&mat(&[&[4, 0, 0], &[0, 6, 0], &[0, 0, 10]])).d,
            vec![2, 2, 60]
        );
        assert_eq!(check(&mat(&[&[0, 2, 4], &[6, 0, 0]])).d, vec![2, 6]);
    }

    #[test]
    fn snf_degenerate_shapes() {
        let r = check(&IntMatrix::zeros(0, 3));
        assert!(r.d.is_empty());
        assert_eq!(r.v.rows(), 3);
        check(&mat(&[&[1, 2, 3]]));
        check(&mat(&[&[2], &[4], &[6]]));
    }

    #[test]
    fn rank_and_determinant() {
        assert_eq!(mat(&[&[5, -3], &[3, -2]]).rank(), 2);
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(IntMatrix::zeros(2, 3).rank(), 0);
        assert_eq!(
            mat(&[&[5, -3], &[3, -2]]).determinant().unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            mat(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]])
                .determinant()
                .unwrap(),
            BigInt::from(-3)
        );
    }
}
