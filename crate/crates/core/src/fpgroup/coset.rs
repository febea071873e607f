//! Todd–Coxeter enumeration of the cosets of the trivial subgroup.
//!
//! HLT strategy: cosets are processed in order of definition; each live coset
//! is scanned under every relator (defining new cosets to complete the scan)
//! and then has every missing table entry filled. Coincidences are collapsed
//! with a union-find queue.

use std::collections::VecDeque;

use super::presentation::Presentation;
use super::table::FiniteGroupTable;
use super::word::FreeWord;
use super::FpError;

const UNDEF: usize = usize::MAX;

struct CosetTable {
    /// `2 * gens` columns: column `2g` is `g`, column `2g + 1` is `g^-1`.
    width: usize,
    table: Vec<usize>,
    parent: Vec<usize>,
    limit: usize,
}

#[inline]
fn inv(col: usize) -> usize {
    col ^ 1
}

impl CosetTable {
    fn new(gens: usize, limit: usize) -> Self {
        CosetTable {
            width: 2 * gens,
            table: vec![UNDEF; 2 * gens],
            parent: vec![0],
            limit,
        }
    }

    fn get(&self, c: usize, x: usize) -> usize {
        self.table[c * self.width + x]
    }

    fn set(&mut self, c: usize, x: usize, v: usize) {
        self.table[c * self.width + x] = v;
    }

    fn count(&self) -> usize {
        self.parent.len()
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<usize, FpError> {
        if self.count() >= self.limit {
            return Err(FpError::CosetLimitExceeded { limit: self.limit });
        }
        let d = self.count();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.width));
        self.set(c, x, d);
        self.set(d, inv(x), c);
        Ok(d)
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut VecDeque<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.parent[drop] = keep;
        queue.push_back(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(g) = queue.pop_front() {
            for x in 0..self.width {
                let d = self.get(g, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, inv(x), UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                if mu_x != UNDEF {
                    self.merge(nu, mu_x, &mut queue);
                    continue;
                }
                let nu_inv = self.get(nu, inv(x));
                if nu_inv != UNDEF {
                    self.merge(mu, nu_inv, &mut queue);
                    continue;
                }
                self.set(mu, x, nu);
                self.set(nu, inv(x), mu);
            }
        }
    }

    /// Scans `relator` from coset `c`, defining cosets to close the scan.
    fn scan_and_fill(&mut self, c: usize, relator: &[usize]) -> Result<(), FpError> {
        if relator.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = relator.len() as isize - 1;
        loop {
            while i <= j && self.get(f, relator[i as usize]) != UNDEF {
                f = self.get(f, relator[i as usize]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, inv(relator[j as usize])) != UNDEF {
                b = self.get(b, inv(relator[j as usize]));
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let x = relator[i as usize];
                self.set(f, x, b);
                self.set(b, inv(x), f);
                return Ok(());
            }
            self.define(f, relator[i as usize])?;
        }
    }
}

fn columns(word: &FreeWord) -> Vec<usize> {
    word.letters()
        .map(|(g, s)| if s > 0 { 2 * g } else { 2 * g + 1 })
        .collect()
}

/// Enumerates the elements of the group presented by `p`.
///
/// Fails with [`FpError::CosetLimitExceeded`] once more than `max_cosets`
/// cosets would have to be defined (the group may be infinite).
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<FiniteGroupTable, FpError> {
    if max_cosets == 0 {
        return Err(FpError::CosetLimitExceeded { limit: 0 });
    }
    let relators: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let mut ct = CosetTable::new(p.generator_count(), max_cosets);

    let mut c = 0;
    while c < ct.count() {
        for r in &relators {
            if !ct.alive(c) {
                break;
            }
            ct.scan_and_fill(c, r)?;
        }
        if ct.alive(c) {
            for x in 0..ct.width {
                if ct.get(c, x) == UNDEF {
                    ct.define(c, x)?;
                }
            }
        }
        c += 1;
    }
    standardize(p, &ct)
}

/// Renumbers live cosets in breadth-first order from the identity coset and
/// builds the multiplication table.
fn standardize(p: &Presentation, ct: &CosetTable) -> Result<FiniteGroupTable, FpError> {
    let width = ct.width;
    let mut number = vec![UNDEF; ct.count()];
    let mut order: Vec<usize> = vec![0];
    let mut words: Vec<FreeWord> = vec![FreeWord::identity()];
    number[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        for x in 0..width {
            let d = ct.get(c, x);
            debug_assert!(d != UNDEF && ct.alive(d), "incomplete coset table");
            if number[d] == UNDEF {
                number[d] = order.len();
                order.push(d);
                let letter = FreeWord::new([(x / 2, if x % 2 == 0 { 1 } else { -1 })]);
                words.push(words[head].mul(&letter));
            }
        }
        head += 1;
    }
    let n = order.len();
    // action[x][i]: element i times generator-column x
    let action: Vec<Vec<usize>> = (0..width)
        .map(|x| order.iter().map(|&c| number[ct.get(c, x)]).collect())
        .collect();
    let mut mul = vec![0usize; n * n];
    for (j, w) in words.iter().enumerate() {
        let cols = columns(w);
        for i in 0..n {
            let mut e = i;
            for &x in &cols {
                e = action[x][e];
            }
            mul[i * n + j] = e;
        }
    }
    let generator_images = (0..p.generator_count()).map(|g| action[2 * g][0]).collect();
    FiniteGroupTable::from_parts(p.clone(), mul, generator_images, words)
}
