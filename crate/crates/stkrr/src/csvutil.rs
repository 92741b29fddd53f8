//! Minimal helpers for the crate's fixed-schema CSV artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a file
//! read back with [`parse_field`] reproduces the original bits and a rerun
//! with identical inputs reproduces the file byte for byte.

use crate::error::{Error, Result};
use std::str::FromStr;

/// Check that the first line equals the expected header.
pub(crate) fn expect_header<'a>(
    mut lines: impl Iterator<Item = &'a str>,
    expected: &str,
) -> Result<()> {
    match lines.next() {
        Some(line) if line.trim_end() == expected => Ok(()),
        Some(line) => Err(Error::Parse {
            line: 1,
            msg: format!("expected header '{expected}', got '{line}'"),
        }),
        None => Err(Error::Parse {
            line: 1,
            msg: format!("missing header '{expected}'"),
        }),
    }
}

/// Split a data line into exactly `n` comma-separated fields.
pub(crate) fn split_fields(line: &str, n: usize, line_no: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.trim_end().split(',').collect();
    if fields.len() != n {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected {n} fields, got {}", fields.len()),
        });
    }
    Ok(fields)
}

/// Parse one field, reporting the line number and column name on failure.
pub(crate) fn parse_field<T: FromStr>(field: &str, column: &str, line_no: usize) -> Result<T> {
    field.parse::<T>().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("cannot parse {column} from '{field}'"),
    })
}
