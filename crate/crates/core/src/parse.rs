//! Shared parse error type for the text grammars (words, free-product
//! elements, rational expressions).

use std::fmt;

/// A parse failure annotated with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }

    pub(crate) fn shifted(mut self, offset: usize) -> Self {
        self.position += offset;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

/// Splits `input` into whitespace-separated tokens, keeping byte offsets.
pub(crate) fn tokens(input: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = input;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let tok = &trimmed[..end];
        let start = offset;
        offset += end;
        rest = &trimmed[end..];
        Some((start, tok))
    })
}

/// Parses the `^<int>` suffix of an atom. `rest` is the text after the
/// atom's head; an empty suffix means exponent 1.
pub(crate) fn exponent_suffix(rest: &str, at: usize) -> Result<i64, ParseError> {
    if rest.is_empty() {
        return Ok(1);
    }
    let Some(digits) = rest.strip_prefix('^') else {
        return Err(ParseError::new(at, format!("unexpected `{rest}`")));
    };
    digits
        .parse::<i64>()
        .map_err(|_| ParseError::new(at + 1, format!("bad exponent `{digits}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_offsets() {
        let toks: Vec<_> = tokens("  x1  x2^-1 ").collect();
        assert_eq!(toks, vec![(2, "x1"), (6, "x2^-1")]);
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(exponent_suffix("", 0).unwrap(), 1);
        assert_eq!(exponent_suffix("^-3", 0).unwrap(), -3);
        assert_eq!(exponent_suffix("^x", 4).unwrap_err().position, 5);
    }
}
