//! The level-indexed free product `*_{k} G_k` of copies of one finite group.
//!
//! Elements are stored in normal form: a sequence of non-identity letters
//! `(level, element)` with no two adjacent letters on the same level. The
//! deck group `Z` acts by shifting levels, and the truncation ("zip") map to
//! `Pi_h` kills every factor below level `h`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgroup::FiniteGroupTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeProductError {
    #[error("element index {index} out of range for a group of order {order}")]
    IndexError { index: usize, order: usize },
    #[error("words belong to different factor groups")]
    GroupMismatch,
    #[error("column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("invalid window {lo}:{hi}")]
    InvalidWindow { lo: i64, hi: i64 },
}

/// A single letter: a non-identity element of the copy `G_level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub level: i64,
    pub element: usize,
}

/// Finite range of levels `lo..=hi` standing in for the full inverse system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, FreeProductError> {
        if lo > hi {
            return Err(FreeProductError::InvalidWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of levels in the window.
    pub fn level_count(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl std::str::FromStr for Window {
    type Err = FreeProductError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FreeProductError::Parse {
            column: 1,
            message: format!("expected window 'lo:hi', got '{s}'"),
        };
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Window::new(lo, hi)
    }
}

/// An element of the free product, in normal form.
#[derive(Clone)]
pub struct ProductWord {
    group: Arc<FiniteGroupTable>,
    letters: Vec<Letter>,
}

impl PartialEq for ProductWord {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && same_group(&self.group, &other.group)
    }
}

impl Eq for ProductWord {}

impl std::hash::Hash for ProductWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl fmt::Debug for ProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductWord({self})")
    }
}

fn same_group(a: &Arc<FiniteGroupTable>, b: &Arc<FiniteGroupTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Appends a letter to a word in normal form, merging and cancelling as
/// needed. Identity letters are ignored.
fn push_letter(group: &FiniteGroupTable, stack: &mut Vec<Letter>, letter: Letter) {
    if letter.element == group.identity() {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.level == letter.level => {
            let e = group.mul(top.element, letter.element);
            if e == group.identity() {
                stack.pop();
            } else {
                top.element = e;
            }
        }
        _ => stack.push(letter),
    }
}

impl ProductWord {
    pub fn identity(group: Arc<FiniteGroupTable>) -> Self {
        ProductWord {
            group,
            letters: Vec::new(),
        }
    }

    pub fn letter(
        group: Arc<FiniteGroupTable>,
        level: i64,
        element: usize,
    ) -> Result<Self, FreeProductError> {
        Self::reduce(group, [(level, element)])
    }

    /// Normal form of a raw sequence of `(level, element)` pairs; identity
    /// elements are allowed and dropped.
    pub fn reduce<I>(group: Arc<FiniteGroupTable>, raw: I) -> Result<Self, FreeProductError>
    where
        I: IntoIterator<Item = (i64, usize)>,
    {
        let mut letters = Vec::new();
        for (level, element) in raw {
            if element >= group.order() {
                return Err(FreeProductError::IndexError {
                    index: element,
                    order: group.order(),
                });
            }
            push_letter(&group, &mut letters, Letter { level, element });
        }
        Ok(ProductWord { group, letters })
    }

    pub fn group(&self) -> &Arc<FiniteGroupTable> {
        &self.group
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn with_letters(&self, letters: Vec<Letter>) -> Self {
        ProductWord {
            group: Arc::clone(&self.group),
            letters,
        }
    }

    /// Re-reduces an arbitrary letter sequence over this word's group.
    fn rebuild<I: IntoIterator<Item = Letter>>(&self, letters: I) -> Self {
        let mut stack = Vec::new();
        for l in letters {
            push_letter(&self.group, &mut stack, l);
        }
        self.with_letters(stack)
    }

    pub fn mul(&self, other: &ProductWord) -> Result<ProductWord, FreeProductError> {
        if !same_group(&self.group, &other.group) {
            return Err(FreeProductError::GroupMismatch);
        }
        Ok(self.rebuild(self.letters.iter().chain(&other.letters).copied()))
    }

    pub fn inv(&self) -> ProductWord {
        self.with_letters(
            self.letters
                .iter()
                .rev()
                .map(|l| Letter {
                    level: l.level,
                    element: self.group.inv(l.element),
                })
                .collect(),
        )
    }

    /// Deck transformation: translates every level by `k`.
    pub fn shift(&self, k: i64) -> ProductWord {
        self.with_letters(
            self.letters
                .iter()
                .map(|l| Letter {
                    level: l.level + k,
                    element: l.element,
                })
                .collect(),
        )
    }

    /// Image under the truncation `Pi -> Pi_h`: letters below level `h` are
    /// deleted and the rest is re-reduced.
    pub fn zip(&self, h: i64) -> ProductWord {
        if self.letters.iter().all(|l| l.level >= h) {
            return self.clone();
        }
        self.rebuild(self.letters.iter().copied().filter(|l| l.level >= h))
    }

    /// Highest level occurring in the word, `None` for the identity.
    ///
    /// `zip(h)` is trivial exactly when `h > height`.
    pub fn height(&self) -> Option<i64> {
        self.letters.iter().map(|l| l.level).max()
    }

    /// Lowest level occurring in the word.
    pub fn depth(&self) -> Option<i64> {
        self.letters.iter().map(|l| l.level).min()
    }

    /// Splits `x = w * core * w^-1` with `w` as long as possible while the
    /// core stays nonempty.
    pub fn cyclic_reduce(&self) -> (ProductWord, ProductWord) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * (k + 1) < n {
            let first = self.letters[k];
            let last = self.letters[n - 1 - k];
            if first.level == last.level && self.group.inv(first.element) == last.element {
                k += 1;
            } else {
                break;
            }
        }
        let conjugator = self.with_letters(self.letters[..k].to_vec());
        let core = self.with_letters(self.letters[k..n - k].to_vec());
        (conjugator, core)
    }

    /// `x^n`, computed as `w * core^n * w^-1` with square-and-multiply on the core.
    pub fn power(&self, n: i64) -> ProductWord {
        let (w, core) = self.cyclic_reduce();
        let base = if n < 0 { core.inv() } else { core };
        let mut acc = self.with_letters(Vec::new());
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).expect("same group");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq).expect("same group");
            }
        }
        w.mul(&acc)
            .expect("same group")
            .mul(&w.inv())
            .expect("same group")
    }

    /// Normal form of length at most one (the identity counts).
    pub fn is_single_letter(&self) -> bool {
        self.letters.len() <= 1
    }

    /// Normal form of length exactly one.
    pub fn is_nontrivial_single_letter(&self) -> bool {
        self.letters.len() == 1
    }

    /// Parses `[k:w][k':w']...` where each `w` is a word in the generators of
    /// the group's presentation; `1` (or an empty string) is the identity.
    pub fn parse(
        text: &str,
        group: Arc<FiniteGroupTable>,
    ) -> Result<ProductWord, FreeProductError> {
        let bytes = text.as_bytes();
        let mut raw = Vec::new();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        if text.trim() == "1" {
            return Ok(Self::identity(group));
        }
        while pos < bytes.len() {
            if bytes[pos] != b'[' {
                return Err(FreeProductError::Parse {
                    column: pos + 1,
                    message: "expected '['".into(),
                });
            }
            let close = text[pos..]
                .find(']')
                .map(|i| i + pos)
                .ok_or(FreeProductError::Parse {
                    column: pos + 1,
                    message: "unclosed '['".into(),
                })?;
            let block = &text[pos + 1..close];
            let (level, word) = block.split_once(':').ok_or(FreeProductError::Parse {
                column: pos + 2,
                message: "expected 'level:word'".into(),
            })?;
            let level: i64 = level.trim().parse().map_err(|_| FreeProductError::Parse {
                column: pos + 2,
                message: format!("invalid level '{}'", level.trim()),
            })?;
            let word_col = pos + 2 + block.find(':').unwrap() + 1;
            let w = group
                .presentation()
                .parse_word(word)
                .map_err(|e| FreeProductError::Parse {
                    column: word_col + e.column() - 1,
                    message: e.message(),
                })?;
            raw.push((level, group.evaluate(&w)));
            pos = close + 1;
            skip_ws(&mut pos);
        }
        Self::reduce(group, raw)
    }
}

impl fmt::Display for ProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "[{}:{}]", l.level, self.group.element_name(l.element))?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod test_groups {
    use super::*;
    use crate::fpgroup::{parse_presentation, todd_coxeter};

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
}
