//! Plain-text matrix format shared by every tool:
//!
//! ```text
//! # labels: C1,C2,C3
//! 0,1,-1
//! 0,0,0.5
//! -1,0,0
//! ```
//!
//! Blank lines and further `#` comment lines are ignored.

use std::fs;
use std::path::Path;

use crate::error::{FcmError, Result};
use crate::fcm::{format_value, EdgeMatrix};

const LABEL_HEADER: &str = "# labels:";

pub fn write_matrix(m: &EdgeMatrix) -> String {
    render(m.labels(), m.dim(), |i, j| format_value(m.get(i, j)))
}

/// Sidecar mask rendering: same header, `0`/`1` entries.
pub fn write_mask(labels: &[String], mask: &[bool]) -> String {
    let n = labels.len();
    render(labels, n, |i, j| {
        if mask[i * n + j] { "1" } else { "0" }.to_string()
    })
}

fn render(labels: &[String], n: usize, cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = format!("{LABEL_HEADER} {}\n", labels.join(","));
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| cell(i, j)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses labels and raw rows without range checks.
fn parse_raw(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut labels: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(LABEL_HEADER) {
            if labels.is_some() {
                return Err(FcmError::Parse {
                    line: line_no,
                    message: "duplicate labels header".into(),
                });
            }
            labels = Some(rest.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if labels.is_none() {
            return Err(FcmError::Parse {
                line: line_no,
                message: format!("expected `{LABEL_HEADER} ...` before data rows"),
            });
        }
        let row = trimmed
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| FcmError::Parse {
                    line: line_no,
                    message: format!("bad number `{}`: {e}", t.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let labels = labels.ok_or(FcmError::Parse {
        line: 0,
        message: "missing labels header".into(),
    })?;
    Ok((labels, rows))
}

pub fn parse_matrix(text: &str) -> Result<EdgeMatrix> {
    let (labels, rows) = parse_raw(text)?;
    EdgeMatrix::from_rows(labels, &rows)
}

pub fn parse_mask(text: &str) -> Result<(Vec<String>, Vec<bool>)> {
    let (labels, rows) = parse_raw(text)?;
    let n = labels.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(FcmError::structural("mask is not square over its labels"));
    }
    let mask = rows
        .concat()
        .into_iter()
        .map(|v| match v {
            0.0 => Ok(false),
            1.0 => Ok(true),
            other => Err(FcmError::domain(format!(
                "mask entry {other} is not 0 or 1"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((labels, mask))
}

pub fn read_matrix(path: &Path) -> Result<EdgeMatrix> {
    let text = fs::read_to_string(path).map_err(|e| FcmError::io(path, e))?;
    parse_matrix(&text)
}

pub fn write_matrix_file(path: &Path, m: &EdgeMatrix) -> Result<()> {
    fs::write(path, write_matrix(m)).map_err(|e| FcmError::io(path, e))
}
