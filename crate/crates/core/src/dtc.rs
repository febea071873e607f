//! Generators and relations up to deck transformations and completion (DTC).
//!
//! A DTC word is a finite product of shifted powers of generators. Evaluating
//! it at level `h` lands in the truncated free product `Pi_h`; factors whose
//! shifted height lies below `h` map to the identity there, which is how
//! completion (infinite products with letters going down) is approximated at
//! a fixed truncation.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgroup::{
    dim_hom_r, is_cyclic, min_generators, FiniteGroupTable, FpError, Presentation,
};
use crate::freeprod::{FreeProductError, Letter, ProductWord, Window};
use crate::laurent::LaurentPoly;

/// Upper bound on the number of group elements visited by one bounded span
/// search.
pub const SPAN_NODE_BUDGET: usize = 1_000_000;

/// Largest group order accepted by [`single_generator_refutation_search`].
pub const REFUTATION_ORDER_BUDGET: usize = 24;

/// Largest number of candidate generators examined by
/// [`single_generator_refutation_search`].
pub const REFUTATION_CANDIDATE_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DtcError {
    #[error("unresolved generator reference {0}")]
    UnresolvedGenerator(String),
    #[error("declared height {declared} is below the word height {word}")]
    HeightBelowWord { declared: i64, word: i64 },
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("window {0} does not contain level {1}")]
    WindowMissesLevel(Window, i64),
    #[error(transparent)]
    FreeProduct(#[from] FreeProductError),
    #[error(transparent)]
    Group(#[from] FpError),
}

/// A generator up to DTC: an element of the free product and the height
/// assigned to its letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtcGenerator {
    pub id: String,
    word: ProductWord,
    height: Option<i64>,
}

impl DtcGenerator {
    /// Height defaults to the height of `word`.
    pub fn new(id: impl Into<String>, word: ProductWord) -> Self {
        let height = word.height();
        DtcGenerator {
            id: id.into(),
            word,
            height,
        }
    }

    /// Explicit height, which must not be below the word's own height.
    pub fn with_height(
        id: impl Into<String>,
        word: ProductWord,
        height: i64,
    ) -> Result<Self, DtcError> {
        if let Some(wh) = word.height() {
            if height < wh {
                return Err(DtcError::HeightBelowWord {
                    declared: height,
                    word: wh,
                });
            }
        }
        Ok(DtcGenerator {
            id: id.into(),
            word,
            height: Some(height),
        })
    }

    pub fn word(&self) -> &ProductWord {
        &self.word
    }

    pub fn height(&self) -> Option<i64> {
        self.height
    }
}

/// One factor `s^shift(g_generator)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DtcFactor {
    pub shift: i64,
    pub generator: usize,
    pub exponent: i64,
}

/// A finite product of shifted generator powers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DtcWord {
    pub factors: Vec<DtcFactor>,
}

impl DtcWord {
    pub fn new(factors: Vec<DtcFactor>) -> Self {
        DtcWord { factors }
    }

    pub fn from_triples(triples: &[(i64, usize, i64)]) -> Self {
        DtcWord {
            factors: triples
                .iter()
                .map(|&(shift, generator, exponent)| DtcFactor {
                    shift,
                    generator,
                    exponent,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The same word with every shift moved by `k`.
    pub fn shifted(&self, k: i64) -> DtcWord {
        DtcWord {
            factors: self
                .factors
                .iter()
                .map(|f| DtcFactor {
                    shift: f.shift + k,
                    ..*f
                })
                .collect(),
        }
    }

    /// Parses `{k:gid^e}{k':gid'^e'}...`; `^e` may be omitted for `e = 1`,
    /// and `1` denotes the empty word.
    pub fn parse(text: &str, ids: &[String]) -> Result<DtcWord, DtcError> {
        let mut factors = Vec::new();
        let trimmed = text.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(DtcWord::default());
        }
        let mut pos = 0;
        let bytes = text.as_bytes();
        let err = |column: usize, message: &str| DtcError::Parse {
            column,
            message: message.to_string(),
        };
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'{' {
                return Err(err(pos + 1, "expected '{'"));
            }
            let close = text[pos..]
                .find('}')
                .map(|i| i + pos)
                .ok_or_else(|| err(pos + 1, "unclosed '{'"))?;
            let block = &text[pos + 1..close];
            let (shift, rest) = block
                .split_once(':')
                .ok_or_else(|| err(pos + 2, "expected 'shift:generator^exponent'"))?;
            let shift: i64 = shift
                .trim()
                .parse()
                .map_err(|_| err(pos + 2, &format!("invalid shift '{}'", shift.trim())))?;
            let (id, exponent) = match rest.split_once('^') {
                Some((id, e)) => {
                    let e: i64 = e
                        .trim()
                        .parse()
                        .map_err(|_| err(pos + 2, &format!("invalid exponent '{}'", e.trim())))?;
                    (id.trim(), e)
                }
                None => (rest.trim(), 1),
            };
            if exponent == 0 {
                return Err(err(pos + 2, "exponent must be nonzero"));
            }
            let generator = ids
                .iter()
                .position(|g| g == id)
                .ok_or_else(|| DtcError::UnresolvedGenerator(id.to_string()))?;
            factors.push(DtcFactor {
                shift,
                generator,
                exponent,
            });
            pos = close + 1;
        }
        Ok(DtcWord { factors })
    }

    pub fn display<'a>(&'a self, ids: &'a [String]) -> impl fmt::Display + 'a {
        DisplayDtc { word: self, ids }
    }
}

struct DisplayDtc<'a> {
    word: &'a DtcWord,
    ids: &'a [String],
}

impl fmt::Display for DisplayDtc<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for factor in &self.word.factors {
            let id = self
                .ids
                .get(factor.generator)
                .map_or_else(|| format!("#{}", factor.generator), Clone::clone);
            write!(f, "{{{}:{}^{}}}", factor.shift, id, factor.exponent)?;
        }
        Ok(())
    }
}

pub fn generator_ids(gens: &[DtcGenerator]) -> Vec<String> {
    gens.iter().map(|g| g.id.clone()).collect()
}

fn check_refs(w: &DtcWord, count: usize) -> Result<(), DtcError> {
    match w.factors.iter().find(|f| f.generator >= count) {
        Some(f) => Err(DtcError::UnresolvedGenerator(format!("#{}", f.generator))),
        None => Ok(()),
    }
}

/// Value of a single factor at truncation level `h`.
fn eval_factor(f: &DtcFactor, gens: &[DtcGenerator], h: i64) -> ProductWord {
    let g = &gens[f.generator];
    match g.height {
        Some(height) if height + f.shift >= h => g.word.shift(f.shift).power(f.exponent).zip(h),
        _ => ProductWord::identity(Arc::clone(g.word.group())),
    }
}

/// Evaluation `ev_h`: substitutes every factor and multiplies in `Pi_h`.
pub fn eval_dtc_word(w: &DtcWord, gens: &[DtcGenerator], h: i64) -> Result<ProductWord, DtcError> {
    check_refs(w, gens.len())?;
    let group = gens
        .first()
        .map(|g| Arc::clone(g.word.group()))
        .ok_or_else(|| DtcError::UnresolvedGenerator("(no generators)".into()))?;
    let mut acc = ProductWord::identity(group);
    for f in &w.factors {
        acc = acc.mul(&eval_factor(f, gens, h))?;
    }
    Ok(acc.zip(h))
}

/// Outcome of a bounded span-membership search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanResult {
    /// A witness whose evaluation equals the truncated target.
    Member(DtcWord),
    /// No witness within the bounds. `exhausted` is set when the subgroup of
    /// `Pi_h` generated by the allowed shifts was enumerated completely, so
    /// the target lies outside it.
    Unknown { exhausted: bool },
}

/// Breadth-first search for a DTC word with shifts in `window` and at most
/// `max_len` factors evaluating to `zip(target, h)`.
///
/// Factors are tried in the order: shift ascending, then generator index,
/// then exponent `+1` before `-1`. The first witness found is the
/// shortlex-least one in that order.
pub fn span_member_bounded(
    target: &ProductWord,
    gens: &[DtcGenerator],
    h: i64,
    window: Window,
    max_len: usize,
) -> Result<SpanResult, DtcError> {
    let goal = target.zip(h);
    let alphabet: Vec<(DtcFactor, ProductWord)> = window
        .levels()
        .flat_map(|shift| {
            (0..gens.len()).flat_map(move |generator| {
                [1, -1].map(|exponent| DtcFactor {
                    shift,
                    generator,
                    exponent,
                })
            })
        })
        .map(|f| {
            let v = eval_factor(&f, gens, h);
            (f, v)
        })
        .filter(|(_, v)| !v.is_identity())
        .collect();

    let identity = goal.inv().mul(&goal)?;
    if goal.is_identity() {
        return Ok(SpanResult::Member(DtcWord::default()));
    }
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    seen.insert(identity.letters().to_vec());
    let mut frontier: VecDeque<(ProductWord, DtcWord)> = VecDeque::new();
    frontier.push_back((identity, DtcWord::default()));

    for _ in 0..max_len {
        let mut next = VecDeque::new();
        while let Some((value, word)) = frontier.pop_front() {
            for (factor, fv) in &alphabet {
                let nv = value.mul(fv)?;
                if !seen.insert(nv.letters().to_vec()) {
                    continue;
                }
                let mut nw = word.clone();
                nw.factors.push(*factor);
                if nv == goal {
                    let check = eval_dtc_word(&nw, gens, h)?;
                    assert_eq!(check, goal, "span witness failed re-evaluation");
                    return Ok(SpanResult::Member(nw));
                }
                if seen.len() > SPAN_NODE_BUDGET {
                    return Ok(SpanResult::Unknown { exhausted: false });
                }
                next.push_back((nv, nw));
            }
        }
        if next.is_empty() {
            return Ok(SpanResult::Unknown { exhausted: true });
        }
        frontier = next;
    }
    Ok(SpanResult::Unknown { exhausted: false })
}

/// A pair of bounds on `mu_DTC` or `rho_DTC`, with one justification line
/// per bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub lower: usize,
    pub upper: Option<usize>,
    pub certificates: Vec<String>,
}

impl BoundReport {
    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "{} in [{}, {}]", self.quantity, self.lower, u)?,
            None => write!(f, "{} in [{}, ?]", self.quantity, self.lower)?,
        }
        for c in &self.certificates {
            write!(f, "\n  - {c}")?;
        }
        Ok(())
    }
}

/// Default tuple-size cap for the generator-count upper bound.
pub const MIN_GENERATORS_CAP: usize = 4;

/// Bounds on the minimal number of generators up to DTC of `*_k G_k`.
pub fn mu_dtc_bounds(g: &FiniteGroupTable, cap: usize) -> Result<BoundReport, DtcError> {
    let mut certificates = Vec::new();
    let lower = if g.order() == 1 {
        certificates.push("lower 0: the factor group is trivial".to_string());
        0
    } else if is_cyclic(g) {
        certificates.push(format!(
            "lower 1: the factor group (order {}) is nontrivial, so the free product is nontrivial",
            g.order()
        ));
        1
    } else {
        certificates.push(format!(
            "lower 2: the factor group (order {}) is not cyclic; a single generator up to DTC \
             would have a single-letter top truncation and generate a cyclic factor \
             (power and top-letter lemmas)",
            g.order()
        ));
        2
    };
    let m = min_generators(g, cap)?;
    let upper = if m <= cap {
        certificates.push(format!(
            "upper {m}: a generating set of the factor group of size {m}, placed at level 0, \
             generates the free product up to deck transformations (mu_DTC <= mu(G))"
        ));
        Some(m)
    } else {
        certificates.push(format!(
            "upper unknown: no generating tuple of size <= {cap}"
        ));
        None
    };
    Ok(BoundReport {
        quantity: "mu_DTC".into(),
        lower,
        upper,
        certificates,
    })
}

/// Bounds on the minimal number of relations up to DTC.
///
/// The upper bound counts the relators of `p`; the lower bound applies the
/// deficiency inequality `r >= m - dim Hom(G, R)` with `m` bounded below by
/// the `mu_DTC` lower bound of the realized group (when one is given).
pub fn rho_dtc_bounds(
    p: &Presentation,
    g: Option<&FiniteGroupTable>,
) -> Result<BoundReport, DtcError> {
    let r = p.relators().iter().filter(|w| !w.is_identity()).count();
    let mut certificates = vec![format!(
        "upper {r}: the relators of the presentation ({r} in total), placed at level 0, \
         present the free product up to deck transformations and completion"
    )];
    let dim_hom = dim_hom_r(p);
    let lower = match g {
        Some(g) => {
            let mu = mu_dtc_bounds(g, 1)?.lower;
            let lower = mu.saturating_sub(dim_hom);
            certificates.push(format!(
                "lower {lower}: deficiency bound r >= m - dim Hom(G, R) with m >= {mu} \
                 (mu_DTC lower bound) and dim Hom(G, R) = {dim_hom}; the relation module \
                 over the Novikov field has dimension m - rank(rho) = dim Hom"
            ));
            lower
        }
        None => {
            certificates.push("lower 0: no finite realization of the factor group supplied".into());
            0
        }
    };
    Ok(BoundReport {
        quantity: "rho_DTC".into(),
        lower,
        upper: Some(r),
        certificates,
    })
}

/// Matrix of the linear map `Lambda^m -> Lambda^r` induced by relations:
/// entry `(i, j)` sums `exponent * t^(-shift)` over the occurrences of
/// generator `j` in relation `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoMatrix {
    cols: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl RhoMatrix {
    pub fn from_entries(entries: Vec<Vec<LaurentPoly>>, cols: usize) -> Self {
        assert!(entries.iter().all(|r| r.len() == cols));
        RhoMatrix { cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.entries[i]
    }

    /// Multiplies row `i` by `p`.
    pub fn scale_row(&self, i: usize, p: &LaurentPoly) -> RhoMatrix {
        let mut out = self.clone();
        for e in &mut out.entries[i] {
            *e = e.mul(p);
        }
        out
    }
}

impl fmt::Display for RhoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// The relation matrix over `generator_count` generators.
pub fn rho_matrix_for(
    generator_count: usize,
    relations: &[DtcWord],
) -> Result<RhoMatrix, DtcError> {
    let mut entries = Vec::with_capacity(relations.len());
    for w in relations {
        check_refs(w, generator_count)?;
        let mut row: Vec<Vec<(i64, BigRational)>> = vec![Vec::new(); generator_count];
        for f in &w.factors {
            row[f.generator].push((-f.shift, BigRational::from_integer(f.exponent.into())));
        }
        entries.push(row.into_iter().map(LaurentPoly::from_terms).collect());
    }
    Ok(RhoMatrix {
        cols: generator_count,
        entries,
    })
}

pub fn build_rho_matrix(
    gens: &[DtcGenerator],
    relations: &[DtcWord],
) -> Result<RhoMatrix, DtcError> {
    rho_matrix_for(gens.len(), relations)
}

/// Rank over the fraction field `Q(t)`, which equals the rank over the
/// Novikov field.
///
/// Rows are first multiplied by powers of `t` to become polynomials, then
/// reduced by fraction-free (Bareiss) elimination with exact division.
pub fn rank_over_laurent_field(m: &RhoMatrix) -> usize {
    let mut a: Vec<Vec<LaurentPoly>> = m
        .entries
        .iter()
        .map(|row| {
            let lowest = row
                .iter()
                .filter_map(LaurentPoly::valuation)
                .min()
                .unwrap_or(0);
            row.iter().map(|e| e.shift(-lowest)).collect()
        })
        .collect();
    let rows = a.len();
    let mut rank = 0;
    let mut prev = LaurentPoly::constant(BigRational::from_integer(1.into()));
    for col in 0..m.cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..m.cols {
                let num = a[rank][col].mul(&a[r][c]).sub(&a[r][col].mul(&a[rank][c]));
                a[r][c] = num
                    .div_exact(&prev)
                    .expect("Bareiss quotients are exact in an integral domain");
            }
            a[r][col] = LaurentPoly::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Dimension of the space of equivariant homomorphisms to the Novikov field:
/// generators minus the rank of the relation matrix.
pub fn l_lambda_dim(gens: &[DtcGenerator], relations: &[DtcWord]) -> Result<usize, DtcError> {
    let m = build_rho_matrix(gens, relations)?;
    Ok(gens.len() - rank_over_laurent_field(&m))
}

/// Level-0 relations of a presentation: every relator with all shifts 0.
pub fn presentation_relations(p: &Presentation) -> Vec<DtcWord> {
    p.relators()
        .iter()
        .map(|r| DtcWord {
            factors: r
                .syllables()
                .iter()
                .map(|&(generator, exponent)| DtcFactor {
                    shift: 0,
                    generator,
                    exponent,
                })
                .collect(),
        })
        .collect()
}

/// Level-0 generators of the free product (one letter per presentation
/// generator) together with the level-0 relations.
pub fn presentation_dtc_data(group: &Arc<FiniteGroupTable>) -> (Vec<DtcGenerator>, Vec<DtcWord>) {
    let p = group.presentation();
    let gens = p
        .generators()
        .iter()
        .zip(group.generator_images())
        .map(|(name, &e)| {
            let word =
                ProductWord::reduce(Arc::clone(group), [(0, e)]).expect("valid element index");
            DtcGenerator::with_height(name.clone(), word, 0)
                .expect("level-0 letter has height <= 0")
        })
        .collect();
    (gens, presentation_relations(p))
}

/// Result of the bounded single-generator experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationReport {
    pub candidates_examined: usize,
    /// Candidates that reached every level-0 letter within the bounds.
    pub survivors: Vec<ProductWord>,
}

/// All normal-form words of length `1..=max_len` with levels in `window`, in
/// a fixed order (length, then letters lexicographically).
pub fn enumerate_words(
    group: &Arc<FiniteGroupTable>,
    window: Window,
    max_len: usize,
    budget: usize,
) -> Result<Vec<ProductWord>, DtcError> {
    let letters: Vec<Letter> = window
        .levels()
        .flat_map(|level| (1..group.order()).map(move |element| Letter { level, element }))
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                if w.last().is_some_and(|last| last.level == l.level) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(*l);
                next.push(nw);
                if out.len() + next.len() > budget {
                    return Err(DtcError::BudgetExceeded(format!(
                        "more than {budget} candidate words"
                    )));
                }
            }
        }
        for w in &next {
            out.push(ProductWord::reduce(
                Arc::clone(group),
                w.iter().map(|l| (l.level, l.element)),
            )?);
        }
        layer = next;
    }
    Ok(out)
}

/// Tries every candidate single generator with letters in `window` and at
/// most `max_len` letters, and keeps those whose shifts reach every
/// nontrivial letter of `G_0` by a bounded search. An empty survivor list is
/// a bounded refutation of single generation; a nonempty one is
/// inconclusive unless verified otherwise.
pub fn single_generator_refutation_search(
    group: &Arc<FiniteGroupTable>,
    window: Window,
    max_len: usize,
) -> Result<RefutationReport, DtcError> {
    if group.order() > REFUTATION_ORDER_BUDGET {
        return Err(DtcError::BudgetExceeded(format!(
            "group order {} above {}",
            group.order(),
            REFUTATION_ORDER_BUDGET
        )));
    }
    if !window.contains(0) {
        return Err(DtcError::WindowMissesLevel(window, 0));
    }
    let candidates = enumerate_words(group, window, max_len, REFUTATION_CANDIDATE_BUDGET)?;
    let targets: Vec<ProductWord> = (1..group.order())
        .map(|e| ProductWord::letter(Arc::clone(group), 0, e))
        .collect::<Result<_, _>>()?;
    let mut survivors = Vec::new();
    for c in &candidates {
        let gens = [DtcGenerator::new("g", c.clone())];
        let mut all = true;
        for t in &targets {
            if !matches!(
                span_member_bounded(t, &gens, 0, window, max_len)?,
                SpanResult::Member(_)
            ) {
                all = false;
                break;
            }
        }
        if all {
            survivors.push(c.clone());
        }
    }
    Ok(RefutationReport {
        candidates_examined: candidates.len(),
        survivors,
    })
}
