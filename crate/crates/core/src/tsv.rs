//! Line-oriented text helpers shared by the TSV-style loaders.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Yields `(line_number, fields)` for every non-blank line. Line numbers are
/// 1-based and count skipped lines. With `comments`, lines whose first
/// non-blank character is `#` are skipped as well.
pub(crate) fn records(text: &str, comments: bool) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() || (comments && trimmed.starts_with('#')) {
            return None;
        }
        Some((i + 1, line.split('\t').collect()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_blank_and_comment_lines() {
        let text = "a\tb\n\n# note\nc\td\r\n";
        let rows: Vec<_> = records(text, true).collect();
        assert_eq!(rows, vec![(1, vec!["a", "b"]), (4, vec!["c", "d"])]);
    }

    #[test]
    fn comments_kept_when_disabled() {
        let rows: Vec<_> = records("#x\ty\n", false).collect();
        assert_eq!(rows, vec![(1, vec!["#x", "y"])]);
    }
}
