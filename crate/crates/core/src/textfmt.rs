//! Shared plain-text matrix format and number formatting.
//!
//! Channel and joint-distribution files share one layout: a header line
//! `"<rows> <cols>"` followed by `rows` lines of `cols` whitespace-separated
//! decimal numbers. Lines whose first non-blank character is `#` are
//! comments; blank lines are ignored. Line numbers in errors are 1-based
//! physical lines.

use crate::error::{Error, Result};

/// A parsed matrix together with the physical line each row came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TextMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<f64>>,
    pub row_lines: Vec<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the header-plus-rows layout. Entries must be finite and
/// non-negative; normalization is left to the caller.
pub fn parse_matrix(text: &str) -> Result<TextMatrix> {
    let mut content = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = content
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(
            header_line,
            format!("malformed header {header:?}: expected \"<rows> <cols>\""),
        ));
    }
    let parse_dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(parse_err(
                header_line,
                format!("malformed header: {s:?} is not a positive integer"),
            )),
        }
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows);
    let mut row_lines = Vec::with_capacity(rows);
    let mut last_line = header_line;
    for (line, body) in content {
        last_line = line;
        if data.len() == rows {
            return Err(parse_err(
                line,
                format!("unexpected extra row (expected {rows})"),
            ));
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != cols {
            return Err(parse_err(
                line,
                format!("expected {cols} entries, found {}", fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(cols);
        for field in fields {
            let value: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("invalid number {field:?}")))?;
            if !value.is_finite() {
                return Err(parse_err(line, format!("non-finite entry {field:?}")));
            }
            if value < 0.0 {
                return Err(parse_err(line, format!("negative entry {field}")));
            }
            row.push(value);
        }
        data.push(row);
        row_lines.push(line);
    }
    if data.len() != rows {
        return Err(parse_err(
            last_line + 1,
            format!("expected {rows} rows, found {}", data.len()),
        ));
    }
    Ok(TextMatrix {
        rows,
        cols,
        data,
        row_lines,
    })
}

/// Writes a matrix in the header-plus-rows layout with `digits` significant digits.
pub fn write_matrix(rows: usize, cols: usize, data: &[f64], digits: usize) -> String {
    let mut out = format!("{rows} {cols}\n");
    for r in 0..rows {
        let line: Vec<String> = data[r * cols..(r + 1) * cols]
            .iter()
            .map(|&x| format_sig(x, digits))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Formats `x` with at most `digits` significant digits, trailing zeros trimmed.
///
/// Plain decimal notation is used for magnitudes in `[1e-5, 1e15)`, scientific
/// notation otherwise. Zero (of either sign) prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = trim_fraction(&s);
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_fraction(mantissa), e),
            None => s,
        }
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
