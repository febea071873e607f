use super::presentation::Presentation;
use super::word::FreeWord;
use super::FpError;

/// Largest order for which exhaustive searches (axiom checks, generating
/// tuples) are attempted.
pub const EXHAUSTIVE_ORDER_BUDGET: usize = 512;

/// A finite group realized from a presentation: full multiplication table
/// plus a representative word for every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    presentation: Presentation,
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    generator_images: Vec<usize>,
    words: Vec<FreeWord>,
}

impl FiniteGroupTable {
    /// Element 0 must be the identity and `words[i]` must evaluate to `i`.
    pub(crate) fn from_parts(
        presentation: Presentation,
        mul: Vec<usize>,
        generator_images: Vec<usize>,
        words: Vec<FreeWord>,
    ) -> Result<Self, FpError> {
        let order = words.len();
        if mul.len() != order * order || mul.iter().any(|&e| e >= order) {
            return Err(FpError::MalformedTable("multiplication table shape".into()));
        }
        let mut inv = vec![usize::MAX; order];
        for (i, slot) in inv.iter_mut().enumerate() {
            *slot = (0..order)
                .find(|&j| mul[i * order + j] == 0)
                .ok_or_else(|| FpError::MalformedTable(format!("element {i} has no inverse")))?;
        }
        Ok(FiniteGroupTable {
            presentation,
            order,
            mul,
            inv,
            generator_images,
            words,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn pow(&self, a: usize, n: i64) -> usize {
        let base = if n < 0 { self.inv(a) } else { a };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn generator_images(&self) -> &[usize] {
        &self.generator_images
    }

    /// Shortest-first representative word of element `i`.
    pub fn word(&self, i: usize) -> &FreeWord {
        &self.words[i]
    }

    /// Display name of element `i`: its representative word, `1` for the identity.
    pub fn element_name(&self, i: usize) -> String {
        self.words[i]
            .display(self.presentation.generators())
            .to_string()
    }

    pub fn element_names(&self) -> Vec<String> {
        (0..self.order).map(|i| self.element_name(i)).collect()
    }

    /// Image of a free word under the generator assignment.
    pub fn evaluate(&self, w: &FreeWord) -> usize {
        w.syllables().iter().fold(self.identity(), |acc, &(g, e)| {
            self.mul(acc, self.pow(self.generator_images[g], e))
        })
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Subgroup generated by `gens`, as a membership mask.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.order];
        seen[self.identity()] = true;
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen
    }

    /// Exhaustively checks identity, inverse and associativity laws and that
    /// every relator evaluates to the identity.
    pub fn verify_axioms(&self) -> Result<(), FpError> {
        if self.order > EXHAUSTIVE_ORDER_BUDGET {
            return Err(FpError::BudgetExceeded {
                order: self.order,
                budget: EXHAUSTIVE_ORDER_BUDGET,
            });
        }
        let n = self.order;
        let bad = |m: String| Err(FpError::MalformedTable(m));
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return bad(format!("identity law fails at {a}"));
            }
            if self.mul(a, self.inv(a)) != 0 || self.mul(self.inv(a), a) != 0 {
                return bad(format!("inverse law fails at {a}"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        for (i, w) in self.words.iter().enumerate() {
            if self.evaluate(w) != i {
                return bad(format!("representative word of {i} evaluates elsewhere"));
            }
        }
        for r in self.presentation.relators() {
            if self.evaluate(r) != self.identity() {
                return bad("a relator does not evaluate to the identity".into());
            }
        }
        Ok(())
    }
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True iff some element has order equal to the group order.
pub fn is_cyclic(g: &FiniteGroupTable) -> bool {
    (0..g.order()).any(|a| g.element_order(a) == g.order())
}

/// Smallest `k <= cap` such that some `k` elements generate `g`; `cap + 1`
/// when no such tuple exists.
pub fn min_generators(g: &FiniteGroupTable, cap: usize) -> Result<usize, FpError> {
    if g.order() > EXHAUSTIVE_ORDER_BUDGET {
        return Err(FpError::BudgetExceeded {
            order: g.order(),
            budget: EXHAUSTIVE_ORDER_BUDGET,
        });
    }
    if g.order() == 1 {
        return Ok(0);
    }
    // identity never helps; combinations in increasing index order
    let candidates: Vec<usize> = (1..g.order()).collect();
    for k in 1..=cap {
        if k > candidates.len() {
            break;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let tuple: Vec<usize> = idx.iter().map(|&i| candidates[i]).collect();
            if g.closure(&tuple).iter().all(|&b| b) {
                return Ok(k);
            }
            if !next_combination(&mut idx, candidates.len()) {
                break;
            }
        }
    }
    Ok(cap + 1)
}
