//! Cellular homology, Novikov homology of `T^n # X`, the letterwise Hurewicz
//! map on truncated free products and Mittag-Leffler checks on finite
//! windows of abelian inverse systems.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgroup::{smith_normal_form, AbelianGroup, Abelianizer, FiniteGroupTable, IntMatrix};
use crate::freeprod::{ProductWord, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovHomError {
    #[error("degree {degree}: {message}")]
    MalformedComplex { degree: usize, message: String },
    #[error("invalid chain complex JSON: {0}")]
    Json(String),
    #[error("degree {index} out of range 0..={top}")]
    IndexOutOfRange { index: usize, top: usize },
    #[error("formula needs dimension n >= 4, got {0}")]
    HypothesisViolation(i64),
    #[error("degree {0} out of scope (only 0, 1, 2)")]
    OutOfScope(usize),
    #[error("letter at level {level} lies above the window {window}")]
    LevelAboveWindow { level: i64, window: Window },
    #[error("window has {maps} transition maps, need more than K = {k}")]
    WindowTooShort { maps: usize, k: usize },
    #[error("malformed system at level index {index}: {message}")]
    MalformedSystem { index: usize, message: String },
}

/// A finite chain complex of free abelian groups `C_0 <- C_1 <- ... <- C_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[k - 1]` is `d_k : C_k -> C_{k-1}`, rows indexed by the
    /// basis of `C_{k-1}`.
    boundaries: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    dims: Vec<usize>,
    boundaries: Vec<Vec<Vec<i64>>>,
}

impl ChainComplex {
    /// Validates shapes and `d_k d_{k+1} = 0`.
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, NovHomError> {
        let bad =
            |degree: usize, message: String| Err(NovHomError::MalformedComplex { degree, message });
        if dims.is_empty() {
            return bad(0, "at least one chain group is required".into());
        }
        if boundaries.len() != dims.len() - 1 {
            return bad(
                boundaries.len().min(dims.len()),
                format!(
                    "expected {} boundary matrices, got {}",
                    dims.len() - 1,
                    boundaries.len()
                ),
            );
        }
        for (k, b) in boundaries.iter().enumerate() {
            let degree = k + 1;
            if b.rows() != dims[k] || b.cols() != dims[k + 1] {
                return bad(
                    degree,
                    format!(
                        "boundary is {}x{}, expected {}x{}",
                        b.rows(),
                        b.cols(),
                        dims[k],
                        dims[k + 1]
                    ),
                );
            }
        }
        for k in 1..boundaries.len() {
            let composite = boundaries[k - 1]
                .mul(&boundaries[k])
                .expect("shapes checked");
            if !composite.is_zero() {
                return bad(k + 1, format!("d_{} d_{} is nonzero", k, k + 1));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    pub fn from_json(text: &str) -> Result<Self, NovHomError> {
        let raw: RawComplex =
            serde_json::from_str(text).map_err(|e| NovHomError::Json(e.to_string()))?;
        if raw.boundaries.len() + 1 != raw.dims.len() {
            return Err(NovHomError::MalformedComplex {
                degree: raw.boundaries.len().min(raw.dims.len()),
                message: format!(
                    "{} chain groups need {} boundary matrices, got {}",
                    raw.dims.len(),
                    raw.dims.len().saturating_sub(1),
                    raw.boundaries.len()
                ),
            });
        }
        let mut boundaries = Vec::with_capacity(raw.boundaries.len());
        for (k, rows) in raw.boundaries.iter().enumerate() {
            let m = IntMatrix::from_rows(rows, raw.dims[k + 1]).ok_or_else(|| {
                NovHomError::MalformedComplex {
                    degree: k + 1,
                    message: format!("every row must have {} entries", raw.dims[k + 1]),
                }
            })?;
            boundaries.push(m);
        }
        Self::new(raw.dims, boundaries)
    }

    pub fn to_json(&self) -> String {
        let raw = RawComplex {
            dims: self.dims.clone(),
            boundaries: self.boundaries.iter().map(IntMatrix::to_nested).collect(),
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Top degree `n`.
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    /// `d_k`, with `d_0` and `d_{n+1}` the zero maps.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        if k == 0 {
            IntMatrix::zeros(0, self.dims[0])
        } else if k <= self.top() {
            self.boundaries[k - 1].clone()
        } else {
            IntMatrix::zeros(self.dims[self.top()], 0)
        }
    }

    /// Cellular product `C ⊗ D` with `d(a ⊗ b) = da ⊗ b + (-1)^|a| a ⊗ db`.
    ///
    /// The basis of `(C ⊗ D)_n` lists the blocks `C_p ⊗ D_{n-p}` for
    /// increasing `p`, each in row-major order.
    pub fn product(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.top() + other.top();
        // offsets[n][p] = position of block C_p ⊗ D_{n-p} in degree n
        let mut offsets = vec![vec![None; self.top() + 1]; top + 1];
        let mut dims = vec![0; top + 1];
        for (n, row) in offsets.iter_mut().enumerate() {
            for (p, slot) in row.iter_mut().enumerate() {
                if n >= p && n - p <= other.top() {
                    *slot = Some(dims[n]);
                    dims[n] += self.dims[p] * other.dims[n - p];
                }
            }
        }
        let mut boundaries = Vec::with_capacity(top);
        for n in 1..=top {
            let mut m = IntMatrix::zeros(dims[n - 1], dims[n]);
            for p in 0..=self.top().min(n) {
                let q = n - p;
                let Some(src) = offsets[n][p] else { continue };
                let dq = other.dims[q];
                // d a ⊗ b lands in C_{p-1} ⊗ D_q
                if p > 0 {
                    let dst = offsets[n - 1][p - 1].expect("block exists");
                    let b = &self.boundaries[p - 1];
                    for i in 0..self.dims[p - 1] {
                        for a in 0..self.dims[p] {
                            let c = b[(i, a)];
                            if c != 0 {
                                for j in 0..dq {
                                    m[(dst + i * dq + j, src + a * dq + j)] += c;
                                }
                            }
                        }
                    }
                }
                // (-1)^p a ⊗ d b lands in C_p ⊗ D_{q-1}
                if q > 0 {
                    let dst = offsets[n - 1][p].expect("block exists");
                    let b = &other.boundaries[q - 1];
                    let sign = if p % 2 == 0 { 1 } else { -1 };
                    let dq1 = other.dims[q - 1];
                    for a in 0..self.dims[p] {
                        for i in 0..dq1 {
                            for j in 0..dq {
                                let c = b[(i, j)];
                                if c != 0 {
                                    m[(dst + a * dq1 + i, src + a * dq + j)] += sign * c;
                                }
                            }
                        }
                    }
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(dims, boundaries).expect("product of complexes is a complex")
    }

    /// Minimal cell structure of the sphere `S^n` (`n >= 1`).
    pub fn sphere(n: usize) -> ChainComplex {
        assert!(n >= 1);
        let mut dims = vec![0; n + 1];
        dims[0] = 1;
        dims[n] = 1;
        let boundaries = (1..=n)
            .map(|k| IntMatrix::zeros(dims[k - 1], dims[k]))
            .collect();
        ChainComplex::new(dims, boundaries).expect("zero boundaries")
    }
}

/// `H_i(C) = ker d_i / im d_{i+1}`.
pub fn homology(c: &ChainComplex, i: usize) -> Result<AbelianGroup, NovHomError> {
    if i > c.top() {
        return Err(NovHomError::IndexOutOfRange {
            index: i,
            top: c.top(),
        });
    }
    let rank_out = c.boundary(i).rank();
    let incoming = smith_normal_form(&c.boundary(i + 1));
    let rank_in = incoming.nonzero_count();
    Ok(AbelianGroup {
        rank: c.dims()[i] - rank_out - rank_in,
        torsion: incoming.d.iter().copied().filter(|&d| d > 1).collect(),
    })
}

/// A finitely generated module `Λ^free_rank + ⊕ Z/k((t))` over the Novikov
/// ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NovikovModule {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl NovikovModule {
    pub fn zero() -> Self {
        NovikovModule {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for NovikovModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Λ".to_string()),
            r => parts.push(format!("Λ^{r}")),
        }
        parts.extend(self.torsion.iter().map(|k| format!("Z/{k}((t))")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// `H ⊗_Z Λ`: free summands become `Λ`, `Z/k` becomes `Z/k((t))`.
pub fn tensor_novikov(h: &AbelianGroup) -> NovikovModule {
    NovikovModule {
        free_rank: h.rank,
        torsion: h.torsion.clone(),
    }
}

/// `HN_i(T^n # X, u)` for the class `u` pulled back from a circle factor of
/// the torus: zero for `i = 0` and `H_i(X) ⊗ Λ` for `i = 1, 2`.
///
/// The overlap sphere `S^{n-1}` must have no homology in degrees 1 and 2,
/// hence `n >= 4`.
pub fn hn_connected_sum(cx: &ChainComplex, i: usize, n: i64) -> Result<NovikovModule, NovHomError> {
    if i > 2 {
        return Err(NovHomError::OutOfScope(i));
    }
    if n < 4 {
        return Err(NovHomError::HypothesisViolation(n));
    }
    if i == 0 {
        return Ok(NovikovModule::zero());
    }
    Ok(tensor_novikov(&homology(cx, i)?))
}

/// Letterwise abelianization of a word of `Π_{window.lo}`: entry `k - lo`
/// is the sum in `G^ab` of the letters at level `k`.
///
/// Letters below the window are removed first (they vanish in
/// `Π_{window.lo}`).
pub fn hurewicz_map_word(
    x: &ProductWord,
    gab: &Abelianizer,
    window: Window,
) -> Result<Vec<Vec<i64>>, NovHomError> {
    let mut out = vec![vec![0; gab.dimension()]; window.level_count()];
    let g = x.group();
    for l in x.zip(window.lo()).letters() {
        if l.level > window.hi() {
            return Err(NovHomError::LevelAboveWindow {
                level: l.level,
                window,
            });
        }
        let slot = &mut out[(l.level - window.lo()) as usize];
        *slot = gab.add(slot, &gab.map_word(g.word(l.element)));
    }
    Ok(out)
}

/// A finite window of an inverse system of finitely generated abelian
/// groups. Group `j` is `Z^n_j / (row space of groups[j])` and `maps[j]`
/// sends row vectors of level `j` to level `j + 1` by right multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianSystemWindow {
    pub lo: i64,
    pub groups: Vec<IntMatrix>,
    pub maps: Vec<IntMatrix>,
}

impl AbelianSystemWindow {
    /// Checks shapes and that every map sends relations into relations.
    pub fn new(lo: i64, groups: Vec<IntMatrix>, maps: Vec<IntMatrix>) -> Result<Self, NovHomError> {
        let bad =
            |index: usize, message: String| Err(NovHomError::MalformedSystem { index, message });
        if groups.is_empty() {
            return bad(0, "no groups".into());
        }
        if maps.len() + 1 != groups.len() {
            return bad(
                maps.len(),
                format!("{} groups need {} maps", groups.len(), groups.len() - 1),
            );
        }
        for (j, m) in maps.iter().enumerate() {
            let (src, dst) = (&groups[j], &groups[j + 1]);
            if m.rows() != src.cols() || m.cols() != dst.cols() {
                return bad(
                    j,
                    format!(
                        "map is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        src.cols(),
                        dst.cols()
                    ),
                );
            }
            let pushed = src.mul(m).expect("shapes checked");
            if !same_lattice(dst, &stack(dst, &pushed)) {
                return bad(j, "map does not send relations into relations".into());
            }
        }
        Ok(AbelianSystemWindow { lo, groups, maps })
    }

    /// From constant-size free groups `Z^n` and given maps.
    pub fn free(lo: i64, ranks: &[usize], maps: Vec<IntMatrix>) -> Result<Self, NovHomError> {
        let groups = ranks.iter().map(|&n| IntMatrix::zeros(0, n)).collect();
        Self::new(lo, groups, maps)
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.groups.len()).map(move |j| self.lo + j as i64)
    }

    /// Isomorphism type of the group at level index `j`.
    pub fn group(&self, j: usize) -> AbelianGroup {
        let rel = &self.groups[j];
        AbelianGroup::from_invariant_factors(rel.cols(), &smith_normal_form(rel).d)
    }

    /// Composite `maps[from] ... maps[to - 1]` as a matrix.
    fn composite(&self, from: usize, to: usize) -> IntMatrix {
        (from..to).fold(IntMatrix::identity(self.groups[from].cols()), |acc, j| {
            acc.mul(&self.maps[j]).expect("composable")
        })
    }
}

fn stack(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut rows = a.to_nested();
    rows.extend(b.to_nested());
    IntMatrix::from_rows(&rows, a.cols()).expect("same width")
}

/// Nonzero invariant factors of the lattice spanned by the rows.
fn lattice_invariants(m: &IntMatrix) -> Vec<i64> {
    smith_normal_form(m)
        .d
        .into_iter()
        .filter(|&d| d != 0)
        .collect()
}

/// Equality of row lattices, given that `a` spans a sublattice of `b`.
fn same_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    lattice_invariants(a) == lattice_invariants(b)
}

/// Equality of the subgroups `span(a) + span(rel)` and `span(b) + span(rel)`.
fn same_image(a: &IntMatrix, b: &IntMatrix, rel: &IntMatrix) -> bool {
    let la = stack(a, rel);
    let lb = stack(b, rel);
    let both = stack(&la, b);
    same_lattice(&la, &both) && same_lattice(&lb, &both)
}

/// Abelianized truncated free products over a window: level `h` carries
/// `⊕_{k = h..=hi} G^ab` (summands ordered by level) and the map to level
/// `h + 1` forgets the bottom summand.
pub fn pro_abelianize(g: &FiniteGroupTable, window: Window) -> AbelianSystemWindow {
    let ab = Abelianizer::new(g.presentation());
    let moduli = ab.moduli();
    let d = moduli.len();
    let count = window.level_count();
    let groups: Vec<IntMatrix> = (0..count)
        .map(|j| {
            let copies = count - j;
            let rows: Vec<Vec<i64>> = (0..copies)
                .flat_map(|c| {
                    moduli
                        .iter()
                        .enumerate()
                        .filter(|(_, &m)| m > 0)
                        .map(move |(i, &m)| {
                            let mut row = vec![0; copies * d];
                            row[c * d + i] = m;
                            row
                        })
                })
                .collect();
            IntMatrix::from_rows(&rows, copies * d).expect("rows have the right width")
        })
        .collect();
    let maps = (0..count - 1)
        .map(|j| {
            let (src, dst) = ((count - j) * d, (count - j - 1) * d);
            let mut m = IntMatrix::zeros(src, dst);
            for i in 0..dst {
                m[(d + i, i)] = 1;
            }
            m
        })
        .collect();
    AbelianSystemWindow::new(window.lo(), groups, maps).expect("projections respect relations")
}

/// Per-target-level outcome of [`ml_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlLevel {
    pub level: i64,
    pub stable: bool,
    /// Deepest source level whose image differs from the image of the
    /// source `K` steps below, if any.
    pub first_difference: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlReport {
    pub k: usize,
    pub stable: bool,
    pub levels: Vec<MlLevel>,
    /// Always true: the verdict only covers the levels inside the window.
    pub window_relative: bool,
}

impl fmt::Display for MlReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mittag-Leffler (K = {}, window-relative): {}",
            self.k,
            if self.stable { "stable" } else { "not stable" }
        )?;
        for l in &self.levels {
            match l.first_difference {
                None => write!(f, "\n  level {}: images stable", l.level)?,
                Some(s) => write!(
                    f,
                    "\n  level {}: image from level {} is smaller",
                    l.level, s
                )?,
            }
        }
        Ok(())
    }
}

/// Checks, for every target level `j` with at least two source levels
/// `i <= j - K` in the window, that all composites `G_i -> G_j` with
/// `i <= j - K` have the same image.
pub fn ml_check(sys: &AbelianSystemWindow, k: usize) -> Result<MlReport, NovHomError> {
    let maps = sys.maps.len();
    if k == 0 || maps <= k {
        return Err(NovHomError::WindowTooShort { maps, k });
    }
    let mut levels = Vec::new();
    for j in k + 1..sys.groups.len() {
        let rel = &sys.groups[j];
        let reference = sys.composite(j - k, j);
        let first_difference = (0..j - k)
            .rev()
            .find(|&i| !same_image(&reference, &sys.composite(i, j), rel))
            .map(|i| sys.lo + i as i64);
        levels.push(MlLevel {
            level: sys.lo + j as i64,
            stable: first_difference.is_none(),
            first_difference,
        });
    }
    Ok(MlReport {
        k,
        stable: levels.iter().all(|l| l.stable),
        levels,
        window_relative: true,
    })
}
