//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use novk::fpgroup::{parse_presentation, todd_coxeter, FiniteGroupTable, IntMatrix};
use novk::freeprod::{Letter, ProductWord};
use novk::novhom::ChainComplex;

pub mod checks;

pub const POINCARE: &str = include_str!("../../fixtures/poincare.pres");

pub fn realize(text: &str) -> Arc<FiniteGroupTable> {
    Arc::new(todd_coxeter(&parse_presentation(text).unwrap(), 10_000).unwrap())
}

pub fn z2() -> Arc<FiniteGroupTable> {
    realize("gens: a; rel: a^2")
}

pub fn z3() -> Arc<FiniteGroupTable> {
    realize("gens: a; rel: a^3")
}

pub fn v4() -> Arc<FiniteGroupTable> {
    realize("gens: a b; rel: a^2; rel: b^2; rel: a b a^-1 b^-1")
}

pub fn s3() -> Arc<FiniteGroupTable> {
    realize("gens: s t; rel: s^2; rel: t^2; rel: (s t)^3")
}

pub fn poincare() -> Arc<FiniteGroupTable> {
    realize(POINCARE)
}

/// Every normal-form word with letters on `levels` and at most `max_len`
/// letters, built directly (no reduction involved).
pub fn all_words(g: &Arc<FiniteGroupTable>, levels: &[i64], max_len: usize) -> Vec<ProductWord> {
    let letters: Vec<(i64, usize)> = levels
        .iter()
        .flat_map(|&k| (1..g.order()).map(move |e| (k, e)))
        .collect();
    let mut layer: Vec<Vec<(i64, usize)>> = vec![Vec::new()];
    let mut all = layer.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last().is_none_or(|last| last.0 != l.0) {
                    let mut nw = w.clone();
                    nw.push(l);
                    next.push(nw);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.into_iter()
        .map(|w| {
            let pw = ProductWord::reduce(Arc::clone(g), w.iter().copied()).unwrap();
            assert_eq!(pw.len(), w.len(), "enumerated words are already reduced");
            pw
        })
        .collect()
}

/// Raw letter sequence with levels in `lo..=hi`; identity letters allowed.
pub fn random_raw<R: Rng>(
    rng: &mut R,
    g: &FiniteGroupTable,
    len: usize,
    lo: i64,
    hi: i64,
) -> Vec<(i64, usize)> {
    (0..len)
        .map(|_| (rng.gen_range(lo..=hi), rng.gen_range(0..g.order())))
        .collect()
}

pub fn random_word<R: Rng>(
    rng: &mut R,
    g: &Arc<FiniteGroupTable>,
    max_len: usize,
    lo: i64,
    hi: i64,
) -> ProductWord {
    let len = rng.gen_range(0..=max_len);
    ProductWord::reduce(Arc::clone(g), random_raw(rng, g, len, lo, hi)).unwrap()
}

/// Reduction by rewriting at random positions until no rule applies: drop an
/// identity letter, or merge two adjacent letters on the same level.
pub fn rewrite_reduce<R: Rng>(
    rng: &mut R,
    g: &FiniteGroupTable,
    raw: &[(i64, usize)],
) -> Vec<Letter> {
    let mut w: Vec<(i64, usize)> = raw.to_vec();
    loop {
        let mut redexes = Vec::new();
        for i in 0..w.len() {
            if w[i].1 == g.identity() {
                redexes.push((i, true));
            } else if i + 1 < w.len() && w[i].0 == w[i + 1].0 {
                redexes.push((i, false));
            }
        }
        if redexes.is_empty() {
            break;
        }
        let (i, drop) = redexes[rng.gen_range(0..redexes.len())];
        if drop {
            w.remove(i);
        } else {
            w[i].1 = g.mul(w[i].1, w[i + 1].1);
            w.remove(i + 1);
        }
    }
    w.into_iter()
        .map(|(level, element)| Letter { level, element })
        .collect()
}

/// Exact rank over Q by Gaussian elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pivot = a[rank].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn int_rank(m: &IntMatrix) -> usize {
    let rows: Vec<Vec<BigRational>> = m
        .to_nested()
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    rational_rank(&rows)
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Determinantal divisors `D_k = gcd of all k x k minors`, for `k = 1..`
/// while nonzero.
pub fn determinantal_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let a: Vec<Vec<BigInt>> = m
        .to_nested()
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut out = Vec::new();
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = BigInt::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let minor: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(g);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k-1}`.
pub fn invariant_factors_oracle(m: &IntMatrix) -> Vec<i64> {
    let dd = determinantal_divisors(m);
    let mut prev = BigInt::one();
    dd.iter()
        .map(|d| {
            let f = d / &prev;
            prev = d.clone();
            i64::try_from(f.abs()).unwrap()
        })
        .collect()
}

/// `H_i` as `(rank, torsion)` from rational ranks and determinantal
/// divisors, without Smith normal form.
pub fn homology_oracle(c: &ChainComplex, i: usize) -> (usize, Vec<i64>) {
    let out_rank = int_rank(&c.boundary(i));
    let incoming = c.boundary(i + 1);
    let in_rank = int_rank(&incoming);
    let torsion = invariant_factors_oracle(&incoming)
        .into_iter()
        .filter(|&d| d > 1)
        .collect();
    (c.dims()[i] - out_rank - in_rank, torsion)
}

/// A random square unimodular matrix and its inverse, from a few
/// elementary row operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut a = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            a[(0, 0)] = -1;
            inv[(0, 0)] = -1;
        }
        return (a, inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let f: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // a <- E a with E = I + f e_ij; inv <- inv E^-1
        for c in 0..n {
            let v = a[(j, c)];
            a[(i, c)] += f * v;
        }
        for r in 0..n {
            let v = inv[(r, i)];
            inv[(r, j)] -= f * v;
        }
    }
    (a, inv)
}

/// Random chain complex with known homology: returns the complex after a
/// unimodular change of basis in every degree, and the expected
/// `(rank, cyclic orders)` per degree.
pub fn random_complex<R: Rng>(
    rng: &mut R,
    max_total: usize,
) -> (ChainComplex, Vec<(usize, Vec<i64>)>) {
    let top = rng.gen_range(0..=3);
    let mut dims = vec![0usize; top + 1];
    let mut budget = max_total;
    for d in dims.iter_mut() {
        let x = rng.gen_range(0..=budget.min(4));
        *d = x;
        budget -= x;
    }
    // r[k] = rank of d_k
    let mut r = vec![0usize; top + 2];
    for k in 1..=top {
        let cap = dims[k].min(dims[k - 1] - r[k - 1]);
        r[k] = rng.gen_range(0..=cap);
    }
    let scales = [1, 1, 2, 3, 4, 6];
    let mut diag_boundaries = Vec::new();
    let mut cyclic: Vec<Vec<i64>> = vec![Vec::new(); top + 1];
    for k in 1..=top {
        let mut m = IntMatrix::zeros(dims[k - 1], dims[k]);
        for j in 0..r[k] {
            let s = scales[rng.gen_range(0..scales.len())];
            // source: one of the last r[k] basis vectors of C_k
            m[(j, dims[k] - r[k] + j)] = s;
            if s > 1 {
                cyclic[k - 1].push(s);
            }
        }
        diag_boundaries.push(m);
    }
    let changes: Vec<(IntMatrix, IntMatrix)> = dims
        .iter()
        .map(|&n| random_unimodular(rng, n, 2 * n))
        .collect();
    let boundaries = (1..=top)
        .map(|k| {
            changes[k - 1]
                .0
                .mul(&diag_boundaries[k - 1])
                .unwrap()
                .mul(&changes[k].1)
                .unwrap()
        })
        .collect();
    let expected = (0..=top)
        .map(|k| {
            (
                dims[k] - r[k] - r[k + 1],
                invariant_factors_of_cyclics(&cyclic[k]),
            )
        })
        .collect();
    (ChainComplex::new(dims, boundaries).unwrap(), expected)
}

fn prime_powers(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Invariant factors of `Z/n_1 + ... + Z/n_k` via elementary divisors.
pub fn invariant_factors_of_cyclics(orders: &[i64]) -> Vec<i64> {
    let mut by_prime: std::collections::BTreeMap<i64, Vec<i64>> = Default::default();
    for &n in orders {
        for (p, q) in prime_powers(n) {
            by_prime.entry(p).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1i64; len];
    for qs in by_prime.values_mut() {
        qs.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in qs.iter().enumerate() {
            factors[i] *= q;
        }
    }
    factors.reverse();
    factors
}
