use std::fmt;

use super::word::{parse_word, FreeWord, WordParseError};
use super::FpError;

/// A finite presentation `<generators | relators>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<FreeWord>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<FreeWord>) -> Result<Self, FpError> {
        for (i, g) in generators.iter().enumerate() {
            if !is_identifier(g) {
                return Err(FpError::InvalidGeneratorName(g.clone()));
            }
            if generators[..i].contains(g) {
                return Err(FpError::DuplicateGenerator(g.clone()));
            }
        }
        for r in &relators {
            if let Some(&(g, _)) = r.syllables().iter().find(|(g, _)| *g >= generators.len()) {
                return Err(FpError::GeneratorIndex(g));
            }
        }
        let relators = relators
            .into_iter()
            .map(|r| FreeWord::new(r.syllables().iter().copied()))
            .collect();
        Ok(Presentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn parse_word(&self, text: &str) -> Result<FreeWord, WordParseError> {
        parse_word(text, &self.generators)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.generators.join(" "))?;
        for r in &self.relators {
            writeln!(f, "rel: {}", r.display(&self.generators))?;
        }
        Ok(())
    }
}

/// Parses the presentation file format.
///
/// One directive per line (`;` also separates directives):
///
/// ```text
/// gens: a b          # exactly once, before any relator
/// rel: a^5 b^-3      # zero or more
/// rel: a^5 (a b)^-2
/// ```
///
/// `#` starts a comment running to the end of the line.
pub fn parse_presentation(text: &str) -> Result<Presentation, FpError> {
    let mut generators: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for directive in line.split(';') {
            let base = offset;
            offset += directive.len() + 1;
            let trimmed = directive.trim_start();
            if trimmed.trim().is_empty() {
                continue;
            }
            let lead = base + directive.len() - trimmed.len();
            let syntax = |column: usize, message: &str| FpError::Syntax {
                line: line_no,
                column,
                message: message.to_string(),
            };
            let Some((key, body)) = trimmed.split_once(':') else {
                return Err(syntax(lead + 1, "expected 'gens:' or 'rel:'"));
            };
            let body_col = lead + key.len() + 1;
            match key.trim() {
                "gens" => {
                    if generators.is_some() {
                        return Err(syntax(lead + 1, "duplicate 'gens:' line"));
                    }
                    let names: Vec<String> = body.split_whitespace().map(str::to_string).collect();
                    for (i, n) in names.iter().enumerate() {
                        if !is_identifier(n) {
                            return Err(syntax(
                                body_col + 1,
                                &format!("invalid generator name '{n}'"),
                            ));
                        }
                        if names[..i].contains(n) {
                            return Err(FpError::DuplicateGenerator(n.clone()));
                        }
                    }
                    generators = Some(names);
                }
                "rel" => {
                    let Some(gens) = generators.as_ref() else {
                        return Err(syntax(lead + 1, "'rel:' before 'gens:'"));
                    };
                    let word = parse_word(body, gens).map_err(|e| {
                        let column = body_col + e.column();
                        match e {
                            WordParseError::Syntax { message, .. } => FpError::Syntax {
                                line: line_no,
                                column,
                                message,
                            },
                            WordParseError::UndeclaredGenerator { name, .. } => {
                                FpError::UndeclaredGenerator {
                                    line: line_no,
                                    column,
                                    name,
                                }
                            }
                        }
                    })?;
                    relators.push(word);
                }
                other => return Err(syntax(lead + 1, &format!("unknown directive '{other}'"))),
            }
        }
    }
    let generators = generators.ok_or(FpError::Syntax {
        line: 1,
        column: 1,
        message: "missing 'gens:' line".into(),
    })?;
    Presentation::new(generators, relators)
}
