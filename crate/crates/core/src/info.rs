//! Exact information measures on finite alphabets.
//!
//! Everything is in bits with the convention `0 log 0 = 0`; cells with zero
//! mass contribute nothing. Distributions are validated on construction:
//! entries must be finite and non-negative and sum to one within
//! [`SIMPLEX_TOL`], after which they are renormalized.

use std::fmt;
use std::str::FromStr;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::tension::Coupling;
use crate::textfmt;

/// Absolute tolerance on simplex sums for in-memory construction.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Absolute tolerance on simplex sums for values read from text files, which
/// carry only 12 significant digits per entry.
pub const FILE_TOL: f64 = 1e-9;

/// Tolerance of the numeric `p(q|u,v) = p(q|u)` check.
pub const MARKOV_TOL: f64 = 1e-10;

/// Significant digits written by the text serializers.
pub const TEXT_DIGITS: usize = 12;

fn checked_sum(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut sum = 0.0;
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value < 0.0 {
            return Err(Error::Negative { index, value });
        }
        sum += value;
    }
    Ok(sum)
}

pub(crate) fn normalize_within(mut values: Vec<f64>, tol: f64) -> Result<Vec<f64>> {
    let sum = checked_sum(&values)?;
    if (sum - 1.0).abs() > tol {
        return Err(Error::NotNormalized { sum });
    }
    if sum != 1.0 {
        values.iter_mut().for_each(|x| *x /= sum);
    }
    Ok(values)
}

/// `-sum p log2 p` over a raw slice, skipping non-positive cells.
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Same as [`entropy_of`] but summed in sorted order, so the result does not
/// depend on the layout of the cells.
fn entropy_sorted(probs: &[f64]) -> f64 {
    let mut terms: Vec<f64> = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>().max(0.0)
}

/// A point on a finite probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, SIMPLEX_TOL)
    }

    pub fn with_tolerance(probs: Vec<f64>, tol: f64) -> Result<Self> {
        Ok(Self {
            probs: normalize_within(probs, tol)?,
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs a non-empty alphabet");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n, "point mass index out of range");
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { probs }
    }

    /// Binary distribution `[1 - p, p]`.
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
            });
        }
        Ok(Self {
            probs: vec![1.0 - p, p],
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Number of entries with positive mass.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// Joint distribution `p(u, v)` stored row-major (`u` selects the row).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JointDist {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(rows, cols, data, SIMPLEX_TOL)
    }

    pub fn with_tolerance(rows: usize, cols: usize, data: Vec<f64>, tol: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "joint cell count",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            data: normalize_within(data, tol)?,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                what: "joint row length",
                expected: m,
                got: bad.len(),
            });
        }
        Self::new(n, m, rows.concat())
    }

    /// Product distribution `p(u) p(v)`.
    pub fn independent(pu: &ProbVector, pv: &ProbVector) -> Self {
        let data = pu
            .as_slice()
            .iter()
            .flat_map(|&a| pv.as_slice().iter().map(move |&b| a * b))
            .collect();
        Self {
            rows: pu.len(),
            cols: pv.len(),
            data,
        }
    }

    /// `U = V` with the given marginal.
    pub fn diagonal(p: &ProbVector) -> Self {
        let n = p.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = p[i];
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.cols + v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.cols..(u + 1) * self.cols]
    }

    pub(crate) fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|u| self.row(u).iter().sum()).collect()
    }

    pub(crate) fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for u in 0..self.rows {
            for (acc, &p) in out.iter_mut().zip(self.row(u)) {
                *acc += p;
            }
        }
        out
    }

    /// Marginal of the row variable `U`.
    pub fn row_marginal(&self) -> ProbVector {
        ProbVector {
            probs: self.row_sums(),
        }
    }

    /// Marginal of the column variable `V`.
    pub fn col_marginal(&self) -> ProbVector {
        ProbVector {
            probs: self.col_sums(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for u in 0..self.rows {
            for v in 0..self.cols {
                data[v * self.rows + u] = self.get(u, v);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Parses the joint text format; see [`crate::textfmt`].
    pub fn parse(text: &str) -> Result<Self> {
        let m = textfmt::parse_matrix(text)?;
        let last_line = m.row_lines.last().copied().unwrap_or(1);
        Self::with_tolerance(m.rows, m.cols, m.data.concat(), FILE_TOL).map_err(|e| Error::Parse {
            line: last_line,
            message: format!("invalid joint distribution: {e}"),
        })
    }

    /// Serializes with 12 significant digits.
    pub fn to_text(&self) -> String {
        textfmt::write_matrix(self.rows, self.cols, &self.data, TEXT_DIGITS)
    }
}

impl FromStr for JointDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for JointDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Joint distribution `p(u, v, q)`, index order `(u, v, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist3 {
    nu: usize,
    nv: usize,
    nq: usize,
    data: Vec<f64>,
    markov: bool,
}

/// Selects one of the three conditional mutual informations of a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmi {
    /// `I(U;V|Q)`
    UvGivenQ,
    /// `I(U;Q|V)`
    UqGivenV,
    /// `I(V;Q|U)`
    VqGivenU,
}

impl JointDist3 {
    pub fn new(nu: usize, nv: usize, nq: usize, data: Vec<f64>) -> Result<Self> {
        if nu == 0 || nv == 0 || nq == 0 {
            return Err(Error::Empty);
        }
        if data.len() != nu * nv * nq {
            return Err(Error::DimensionMismatch {
                what: "triple cell count",
                expected: nu * nv * nq,
                got: data.len(),
            });
        }
        Ok(Self {
            nu,
            nv,
            nq,
            data: normalize_within(data, SIMPLEX_TOL)?,
            markov: false,
        })
    }

    /// Sets the `Q - U - V` flag after checking `p(q|u,v) = p(q|u)` numerically.
    pub fn with_markov_flag(mut self) -> Result<Self> {
        let gap = self.markov_violation();
        if gap > MARKOV_TOL {
            return Err(Error::OutOfRange {
                name: "Markov violation |p(q|u,v) - p(q|u)|",
                value: gap,
            });
        }
        self.markov = true;
        Ok(self)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nu, self.nv, self.nq)
    }

    pub fn get(&self, u: usize, v: usize, q: usize) -> f64 {
        self.data[(u * self.nv + v) * self.nq + q]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Whether the triple was built with `Q - U - V` enforced.
    pub fn is_markov(&self) -> bool {
        self.markov
    }

    /// Largest `|p(q|u,v) - p(q|u)|` over cells with `p(u,v) > 0`.
    pub fn markov_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for u in 0..self.nu {
            let mut puq = vec![0.0; self.nq];
            let mut pu = 0.0;
            for v in 0..self.nv {
                for (q, acc) in puq.iter_mut().enumerate() {
                    let p = self.get(u, v, q);
                    *acc += p;
                    pu += p;
                }
            }
            if pu <= 0.0 {
                continue;
            }
            for v in 0..self.nv {
                let puv: f64 = (0..self.nq).map(|q| self.get(u, v, q)).sum();
                if puv <= 0.0 {
                    continue;
                }
                for (q, &a) in puq.iter().enumerate() {
                    worst = worst.max((self.get(u, v, q) / puv - a / pu).abs());
                }
            }
        }
        worst
    }

    /// Entropy of the marginal on the kept coordinates.
    pub fn marginal_entropy(&self, keep_u: bool, keep_v: bool, keep_q: bool) -> f64 {
        let du = if keep_u { self.nu } else { 1 };
        let dv = if keep_v { self.nv } else { 1 };
        let dq = if keep_q { self.nq } else { 1 };
        if du * dv * dq == self.data.len() {
            return entropy_of(&self.data);
        }
        let mut m = vec![0.0; du * dv * dq];
        for u in 0..self.nu {
            let iu = if keep_u { u } else { 0 };
            for v in 0..self.nv {
                let iv = if keep_v { v } else { 0 };
                let base = (iu * dv + iv) * dq;
                let cell = (u * self.nv + v) * self.nq;
                for q in 0..self.nq {
                    let iq = if keep_q { q } else { 0 };
                    m[base + iq] += self.data[cell + q];
                }
            }
        }
        entropy_of(&m)
    }

    /// The `(U, V)` marginal.
    pub fn joint_uv(&self) -> JointDist {
        let data = self.data.chunks(self.nq).map(|c| c.iter().sum()).collect();
        JointDist {
            rows: self.nu,
            cols: self.nv,
            data,
        }
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &ProbVector) -> f64 {
    entropy_of(p.as_slice())
}

/// `H(U|V)` where `U` is the row variable.
pub fn conditional_entropy(j: &JointDist) -> f64 {
    (entropy_of(&j.data) - entropy_of(&j.col_sums())).max(0.0)
}

/// `I(U;V)`; exactly symmetric under transposition.
pub fn mutual_information(j: &JointDist) -> f64 {
    let hu = entropy_of(&j.row_sums());
    let hv = entropy_of(&j.col_sums());
    (hu + hv - entropy_sorted(&j.data)).max(0.0)
}

/// One of `I(U;V|Q)`, `I(U;Q|V)`, `I(V;Q|U)`.
pub fn conditional_mutual_information(j3: &JointDist3, which: Cmi) -> f64 {
    // I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
    let h_all = j3.marginal_entropy(true, true, true);
    let value = match which {
        Cmi::UvGivenQ => {
            j3.marginal_entropy(true, false, true) + j3.marginal_entropy(false, true, true)
                - h_all
                - j3.marginal_entropy(false, false, true)
        }
        Cmi::UqGivenV => {
            j3.marginal_entropy(true, true, false) + j3.marginal_entropy(false, true, true)
                - h_all
                - j3.marginal_entropy(false, true, false)
        }
        Cmi::VqGivenU => {
            j3.marginal_entropy(true, true, false) + j3.marginal_entropy(true, false, true)
                - h_all
                - j3.marginal_entropy(true, false, false)
        }
    };
    value.max(0.0)
}

/// `p(x, y) = p(x) p(y|x)`.
pub fn compose_joint(px: &ProbVector, ch: &Channel) -> Result<JointDist> {
    if px.len() != ch.input_card() {
        return Err(Error::DimensionMismatch {
            what: "input distribution length vs channel inputs",
            expected: ch.input_card(),
            got: px.len(),
        });
    }
    let cols = ch.output_card();
    let mut data = Vec::with_capacity(px.len() * cols);
    for x in 0..px.len() {
        data.extend(ch.row(x).iter().map(|&w| px[x] * w));
    }
    Ok(JointDist {
        rows: px.len(),
        cols,
        data,
    })
}

/// `p(u, v, q) = p(u, v) p(q|u)`; the result carries the Markov flag.
pub fn extend_with_coupling(j: &JointDist, c: &Coupling) -> Result<JointDist3> {
    if c.input_card() != j.rows {
        return Err(Error::DimensionMismatch {
            what: "coupling rows vs joint rows",
            expected: j.rows,
            got: c.input_card(),
        });
    }
    let nq = c.qcard();
    let mut data = Vec::with_capacity(j.data.len() * nq);
    for u in 0..j.rows {
        let w = c.row(u);
        for v in 0..j.cols {
            let p = j.get(u, v);
            data.extend(w.iter().map(|&x| p * x));
        }
    }
    Ok(JointDist3 {
        nu: j.rows,
        nv: j.cols,
        nq,
        data,
        markov: true,
    })
}
