//! Discrete memoryless channels `p(y|x)`.
//!
//! File format (UTF-8): a header `"<|X|> <|Y|>"`, then one line per input
//! symbol holding `|Y|` whitespace-separated transition probabilities. Lines
//! starting with `#` are comments. The serializer writes 12 significant
//! digits. For the binary erasure channel the erasure symbol is output index 1
//! (the middle column).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::info::{normalize_within, FILE_TOL, SIMPLEX_TOL, TEXT_DIGITS};
use crate::textfmt;

/// Row-stochastic transition matrix; row `x` is `p(.|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input_card: usize,
    output_card: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(input_card: usize, output_card: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(input_card, output_card, data, SIMPLEX_TOL)
    }

    fn with_tolerance(
        input_card: usize,
        output_card: usize,
        data: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        if input_card == 0 || output_card == 0 {
            return Err(Error::Empty);
        }
        if data.len() != input_card * output_card {
            return Err(Error::DimensionMismatch {
                what: "channel cell count",
                expected: input_card * output_card,
                got: data.len(),
            });
        }
        let mut rows = Vec::with_capacity(data.len());
        for row in data.chunks(output_card) {
            rows.extend(normalize_within(row.to_vec(), tol)?);
        }
        Ok(Self {
            input_card,
            output_card,
            data: rows,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                what: "channel row length",
                expected: m,
                got: bad.len(),
            });
        }
        Self::new(n, m, rows.concat())
    }

    /// The noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            input_card: n,
            output_card: n,
            data,
        }
    }

    pub fn input_card(&self) -> usize {
        self.input_card
    }

    pub fn output_card(&self) -> usize {
        self.output_card
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.output_card..(x + 1) * self.output_card]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.output_card + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Relabels outputs: column `y` of `self` becomes column `perm[y]`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        let m = self.output_card;
        let mut seen = vec![false; m];
        if perm.len() != m
            || perm
                .iter()
                .any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::DimensionMismatch {
                what: "output permutation",
                expected: m,
                got: perm.len(),
            });
        }
        let mut data = vec![0.0; self.data.len()];
        for x in 0..self.input_card {
            for (y, &p) in perm.iter().enumerate() {
                data[x * m + p] = self.get(x, y);
            }
        }
        Ok(Self { data, ..*self })
    }

    pub fn to_text(&self) -> String {
        textfmt::write_matrix(self.input_card, self.output_card, &self.data, TEXT_DIGITS)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_channel(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// `[[1, 0], [t, 1 - t]]`: input 0 is noiseless, input 1 flips to 0 with probability `t`.
    ZChannel,
    /// Binary erasure channel, outputs `(0, erasure, 1)`.
    Bec,
    /// Binary symmetric channel.
    Bsc,
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "zchannel" => Ok(Self::ZChannel),
            "bec" => Ok(Self::Bec),
            "bsc" => Ok(Self::Bsc),
            other => Err(format!("unknown channel kind {other:?}")),
        }
    }
}

pub fn standard_channel(kind: ChannelKind, param: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::OutOfRange {
            name: "channel parameter",
            value: param,
        });
    }
    let t = param;
    let (n, m, data) = match kind {
        ChannelKind::ZChannel => (2, 2, vec![1.0, 0.0, t, 1.0 - t]),
        ChannelKind::Bec => (2, 3, vec![1.0 - t, t, 0.0, 0.0, t, 1.0 - t]),
        ChannelKind::Bsc => (2, 2, vec![1.0 - t, t, t, 1.0 - t]),
    };
    Channel::new(n, m, data)
}

/// Parses the channel file format. Errors name the offending line.
pub fn parse_channel(text: &str) -> Result<Channel> {
    let m = textfmt::parse_matrix(text)?;
    for (row, &line) in m.data.iter().zip(&m.row_lines) {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > FILE_TOL {
            return Err(Error::Parse {
                line,
                message: format!("row sums to {sum}, expected 1"),
            });
        }
    }
    Channel::with_tolerance(m.rows, m.cols, m.data.concat(), FILE_TOL)
}

/// Structural report on a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDiagnostics {
    pub row_sums: Vec<f64>,
    /// Outputs that no input can produce.
    pub zero_columns: Vec<usize>,
    /// Every row is a point mass and distinct rows hit distinct outputs.
    pub noiseless: bool,
    /// All rows are identical, so the output carries no information.
    pub useless: bool,
    /// Row-sum or sign violations; empty for every channel built through the
    /// validating constructors.
    pub problems: Vec<String>,
}

impl ChannelDiagnostics {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

pub fn validate_channel(ch: &Channel) -> ChannelDiagnostics {
    const EXACT: f64 = 1e-12;
    let n = ch.input_card();
    let m = ch.output_card();
    let row_sums: Vec<f64> = (0..n).map(|x| ch.row(x).iter().sum()).collect();
    let zero_columns = (0..m)
        .filter(|&y| (0..n).all(|x| ch.get(x, y) == 0.0))
        .collect();

    let mut problems = Vec::new();
    for (x, &s) in row_sums.iter().enumerate() {
        if (s - 1.0).abs() > SIMPLEX_TOL {
            problems.push(format!("row {x} sums to {s}"));
        }
        if let Some(y) = ch.row(x).iter().position(|&p| p < 0.0 || !p.is_finite()) {
            problems.push(format!("row {x} has invalid entry at column {y}"));
        }
    }

    let targets: Vec<Option<usize>> = (0..n)
        .map(|x| {
            let row = ch.row(x);
            let y = row.iter().position(|&p| (p - 1.0).abs() <= EXACT)?;
            row.iter()
                .enumerate()
                .all(|(k, &p)| k == y || p.abs() <= EXACT)
                .then_some(y)
        })
        .collect();
    let noiseless = targets.iter().all(Option::is_some) && {
        let mut hit: Vec<usize> = targets.iter().flatten().copied().collect();
        hit.sort_unstable();
        hit.dedup();
        hit.len() == n
    };
    let useless = (1..n).all(|x| {
        ch.row(x)
            .iter()
            .zip(ch.row(0))
            .all(|(a, b)| (a - b).abs() <= EXACT)
    });

    ChannelDiagnostics {
        row_sums,
        zero_columns,
        noiseless,
        useless,
        problems,
    }
}
