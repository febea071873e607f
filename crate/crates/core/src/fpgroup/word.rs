use std::fmt;

use thiserror::Error;

/// A word in a free group: `(generator index, exponent)` syllables.
///
/// Values built through [`FreeWord::new`] are always freely reduced: no zero
/// exponents and no two adjacent syllables on the same generator.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    syllables: Vec<(usize, i64)>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    pub fn generator(index: usize) -> Self {
        FreeWord {
            syllables: vec![(index, 1)],
        }
    }

    /// Reduces arbitrary syllables (zero exponents and repeats allowed).
    pub fn new<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        free_reduce(syllables)
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        free_reduce(self.syllables.iter().chain(&other.syllables).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Letters as `(generator, +1 | -1)`, one per unit of exponent.
    pub fn letters(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.syllables
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    /// Exponent sum of every generator (the abelianized word).
    pub fn exponent_sums(&self, generator_count: usize) -> Vec<i64> {
        let mut sums = vec![0; generator_count];
        for &(g, e) in &self.syllables {
            sums[g] += e;
        }
        sums
    }

    /// Renders with the given generator names, e.g. `a b^-1`; the identity is `1`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWord { word: self, names }
    }
}

struct DisplayWord<'a> {
    word: &'a FreeWord,
    names: &'a [String],
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = &self.names[g];
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Free reduction: merges adjacent syllables on the same generator and drops
/// zero exponents, cascading as needed.
pub fn free_reduce<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> FreeWord {
    let mut stack: Vec<(usize, i64)> = Vec::new();
    for (g, e) in syllables {
        if e == 0 {
            continue;
        }
        match stack.last_mut() {
            Some(top) if top.0 == g => {
                top.1 += e;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            _ => stack.push((g, e)),
        }
    }
    FreeWord { syllables: stack }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordParseError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("column {column}: undeclared generator '{name}'")]
    UndeclaredGenerator { column: usize, name: String },
}

impl WordParseError {
    pub fn column(&self) -> usize {
        match self {
            WordParseError::Syntax { column, .. }
            | WordParseError::UndeclaredGenerator { column, .. } => *column,
        }
    }

    /// The message without its column prefix.
    pub fn message(&self) -> String {
        match self {
            WordParseError::Syntax { message, .. } => message.clone(),
            WordParseError::UndeclaredGenerator { name, .. } => {
                format!("undeclared generator '{name}'")
            }
        }
    }
}

/// Parses a group word over `generators`.
///
/// ```text
/// word := term*            (juxtaposition is product; "1" is the identity)
/// term := atom ['^' int]
/// atom := name | '1' | '(' word ')'
/// name := [A-Za-z_][A-Za-z0-9_]*
/// int  := ['-'|'+'] digit+
/// ```
pub fn parse_word(text: &str, generators: &[String]) -> Result<FreeWord, WordParseError> {
    let mut p = WordParser {
        src: text.as_bytes(),
        pos: 0,
        generators,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(&format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(w)
}

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
    generators: &'a [String],
}

impl WordParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> WordParseError {
        WordParseError::Syntax {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn word(&mut self) -> Result<FreeWord, WordParseError> {
        let mut syllables = Vec::new();
        while let Some(c) = self.peek() {
            if c == b')' {
                break;
            }
            let w = self.term()?;
            syllables.extend_from_slice(w.syllables());
        }
        Ok(free_reduce(syllables))
    }

    fn term(&mut self) -> Result<FreeWord, WordParseError> {
        let start = self.pos;
        let atom = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                w
            }
            Some(b'1') => {
                self.pos += 1;
                FreeWord::identity()
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let index = self
                    .generators
                    .iter()
                    .position(|g| g == name)
                    .ok_or_else(|| WordParseError::UndeclaredGenerator {
                        column: start + 1,
                        name: name.to_string(),
                    })?;
                FreeWord::generator(index)
            }
            Some(c) => return Err(self.syntax(&format!("unexpected '{}'", c as char))),
            None => return Err(self.syntax("unexpected end of word")),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.int()?;
            Ok(atom.pow(n))
        } else {
            Ok(atom)
        }
    }

    fn int(&mut self) -> Result<i64, WordParseError> {
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected integer exponent"));
        }
        let n: i64 = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.syntax("exponent out of range"))?;
        Ok(if negative { -n } else { n })
    }
}
