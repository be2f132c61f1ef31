//! Line-oriented text format for cycles and permutations.
//!
//! One sequence per line as comma-separated decimal integers. `#` starts a
//! comment that runs to the end of the line; blank lines are ignored.

use crate::error::{Error, Result};

/// A parsed sequence with the 1-based line number it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub line: usize,
    pub values: Vec<u8>,
}

pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Vec<u8>>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    body.split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<u8>() {
                Ok(0) => Err(Error::Parse {
                    line: line_no,
                    msg: "values are 1-based; 0 is not allowed".into(),
                }),
                Ok(v) => Ok(v),
                Err(e) => Err(Error::Parse {
                    line: line_no,
                    msg: format!("bad value `{tok}`: {e}"),
                }),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(values) = parse_line(line, i + 1)? {
            out.push(Record { line: i + 1, values });
        }
    }
    Ok(out)
}

pub fn parse_sequences(text: &str) -> Result<Vec<Vec<u8>>> {
    Ok(parse_records(text)?.into_iter().map(|r| r.values).collect())
}

/// Parses text that must hold exactly one sequence.
pub fn parse_single(text: &str) -> Result<Vec<u8>> {
    let mut seqs = parse_sequences(text)?;
    match seqs.len() {
        1 => Ok(seqs.pop().unwrap()),
        k => Err(Error::Parse {
            line: 0,
            msg: format!("expected exactly one sequence, found {k}"),
        }),
    }
}

pub fn format_sequence(values: &[u8]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
