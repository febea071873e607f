//! Finitely presented groups: words, presentations, coset enumeration into
//! finite tables, Smith normal form and abelianization.

mod coset;
mod matrix;
mod presentation;
mod table;
mod word;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coset::todd_coxeter;
pub use matrix::{smith_normal_form, IntMatrix, SnfResult};
pub use presentation::{parse_presentation, Presentation};
pub use table::{is_cyclic, min_generators, FiniteGroupTable, EXHAUSTIVE_ORDER_BUDGET};
pub use word::{free_reduce, parse_word, FreeWord, WordParseError};

/// Default coset budget for realizing a presentation.
pub const DEFAULT_MAX_COSETS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: undeclared generator '{name}'")]
    UndeclaredGenerator {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("duplicate generator '{0}'")]
    DuplicateGenerator(String),
    #[error("invalid generator name '{0}'")]
    InvalidGeneratorName(String),
    #[error("generator index {0} out of range")]
    GeneratorIndex(usize),
    #[error("coset enumeration did not close within {limit} cosets (group may be infinite)")]
    CosetLimitExceeded { limit: usize },
    #[error("group order {order} exceeds the exhaustive-search budget {budget}")]
    BudgetExceeded { order: usize, budget: usize },
    #[error("malformed group table: {0}")]
    MalformedTable(String),
}

/// A finitely generated abelian group `Z^rank + Z/t_1 + ... + Z/t_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    /// Invariant factors `>= 2`, each dividing the next.
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    /// Cokernel of a map `Z^cols -> Z^gens` with invariant factors `d`.
    pub fn from_invariant_factors(generators: usize, d: &[i64]) -> Self {
        let nonzero = d.iter().filter(|&&x| x != 0).count();
        AbelianGroup {
            rank: generators - nonzero,
            torsion: d.iter().copied().filter(|&x| x > 1).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Number of cyclic summands in the invariant-factor decomposition.
    pub fn summands(&self) -> usize {
        self.rank + self.torsion.len()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(i64::to_string).collect();
        write!(f, "rank {}, torsion [{}]", self.rank, t.join(", "))
    }
}

/// Relator matrix of `p`: one row per relator, one column per generator,
/// entries are exponent sums.
pub fn relator_matrix(p: &Presentation) -> IntMatrix {
    let rows: Vec<Vec<i64>> = p
        .relators()
        .iter()
        .map(|r| r.exponent_sums(p.generator_count()))
        .collect();
    IntMatrix::from_rows(&rows, p.generator_count()).expect("rows have generator_count entries")
}

/// `G^ab` as the cokernel of the abelianized relator matrix.
pub fn abelianization(p: &Presentation) -> AbelianGroup {
    let snf = smith_normal_form(&relator_matrix(p));
    AbelianGroup::from_invariant_factors(p.generator_count(), &snf.d)
}

/// `dim Hom(G, R)`: generators minus the rational rank of the relator matrix.
pub fn dim_hom_r(p: &Presentation) -> usize {
    p.generator_count() - relator_matrix(p).rank()
}

/// The abelianization map `F(gens) -> G^ab` in invariant-factor coordinates.
///
/// A word's exponent-sum row vector `x` is sent to `y = x V` (with
/// `U R V = diag(d)`); coordinates with `d_i = 1` are dropped, those with
/// `d_i > 1` are reduced mod `d_i`, and the rest are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianizer {
    group: AbelianGroup,
    generators: usize,
    v: IntMatrix,
    /// `(column of V, modulus or 0 for free)` for every output coordinate.
    coords: Vec<(usize, i64)>,
}

impl Abelianizer {
    pub fn new(p: &Presentation) -> Self {
        let m = p.generator_count();
        let snf = smith_normal_form(&relator_matrix(p));
        let mut d = snf.d.clone();
        d.resize(m, 0);
        let mut coords: Vec<(usize, i64)> = d
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 1)
            .map(|(i, &x)| (i, x))
            .collect();
        coords.extend(
            d.iter()
                .enumerate()
                .filter(|(_, &x)| x == 0)
                .map(|(i, _)| (i, 0)),
        );
        Abelianizer {
            group: AbelianGroup::from_invariant_factors(m, &snf.d),
            generators: m,
            v: snf.v,
            coords,
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Number of output coordinates (`torsion.len() + rank`).
    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Moduli of the output coordinates, `0` for free ones.
    pub fn moduli(&self) -> Vec<i64> {
        self.coords.iter().map(|&(_, m)| m).collect()
    }

    pub fn map_word(&self, w: &FreeWord) -> Vec<i64> {
        self.map_sums(&w.exponent_sums(self.generators))
    }

    pub fn map_sums(&self, sums: &[i64]) -> Vec<i64> {
        self.coords
            .iter()
            .map(|&(col, modulus)| {
                let y: i64 = (0..self.generators)
                    .map(|i| sums[i] * self.v[(i, col)])
                    .sum();
                if modulus > 0 {
                    y.rem_euclid(modulus)
                } else {
                    y
                }
            })
            .collect()
    }

    /// Canonical representative of `a + b`.
    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduce(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn reduce(&self, mut v: Vec<i64>) -> Vec<i64> {
        for (x, &(_, m)) in v.iter_mut().zip(&self.coords) {
            if m > 0 {
                *x = x.rem_euclid(m);
            }
        }
        v
    }
}
