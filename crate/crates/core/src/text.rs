//! Shared helpers for the line-oriented text formats.

use std::str::FromStr;

/// Malformed text input, with the 1-based line it was detected on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }
}

/// Non-blank lines with `#` comments stripped, paired with 1-based line
/// numbers.
pub(crate) fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input.lines().enumerate().filter_map(|(idx, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((idx + 1, line))
    })
}

pub(crate) fn parse_integers<T: FromStr>(
    line_no: usize,
    line: &str,
) -> Result<Vec<T>, FormatError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| FormatError::new(line_no, format!("`{tok}` is not a valid integer")))
        })
        .collect()
}

/// Reads the leading `n` line.
pub(crate) fn read_count<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<(usize, usize), FormatError> {
    let (line_no, line) = lines
        .next()
        .ok_or_else(|| FormatError::new(1, "empty input"))?;
    let values = parse_integers::<usize>(line_no, line)?;
    match values.as_slice() {
        [n] => Ok((line_no, *n)),
        _ => Err(FormatError::new(line_no, "expected a single count `n`")),
    }
}
