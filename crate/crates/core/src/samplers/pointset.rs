use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points in `[0,1)^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    n: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a point set needs at least one point"));
        }
        if data.len() != dim * n {
            return Err(Error::CountMismatch {
                expected: dim * n,
                got: data.len(),
            });
        }
        if let Some(c) = data.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(Error::invalid(format!("coordinate {c} outside [0,1)")));
        }
        Ok(PointSet { dim, n, data })
    }

    /// Caller guarantees the invariants; used by the samplers.
    pub(crate) fn from_raw(dim: usize, n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * n);
        debug_assert!(data.iter().all(|c| (0.0..1.0).contains(c)));
        PointSet { dim, n, data }
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        PointSet::new(dim, rows.len(), rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }

    /// Projection onto the given coordinates, in the given order.
    pub fn project(&self, coords: &[usize]) -> Result<PointSet> {
        if let Some(&c) = coords.iter().find(|&&c| c >= self.dim) {
            return Err(Error::invalid(format!(
                "projection coordinate {c} out of range for d = {}",
                self.dim
            )));
        }
        let data = self
            .rows()
            .flat_map(|r| coords.iter().map(move |&c| r[c]))
            .collect();
        Ok(PointSet::from_raw(coords.len(), self.n, data))
    }

    /// Row-permuted copy: row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        let data = perm.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        PointSet::from_raw(self.dim, self.n, data)
    }

    /// Text form: a `d N` header and one line of `d` reals per point, 17
    /// significant digits each.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.n);
        for row in self.rows() {
            let mut first = true;
            for x in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{x:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PointSet> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty point set file".into()))?;
        let fields: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header `{header}`: {e}")))?;
        let [dim, n] = fields[..] else {
            return Err(Error::Parse("header must be exactly `d N`".into()));
        };
        let mut data = Vec::with_capacity(dim * n);
        let mut rows = 0;
        for (lineno, line) in lines.enumerate() {
            // a 0-dimensional point is an empty line
            if line.trim().is_empty() && (dim > 0 || rows == n) {
                continue;
            }
            if rows == n {
                return Err(Error::Parse(format!("more than {n} rows")));
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                let v = tok
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
                data.push(v);
            }
            if data.len() - before != dim {
                return Err(Error::Parse(format!(
                    "line {}: expected {dim} values, got {}",
                    lineno + 2,
                    data.len() - before
                )));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse(format!("expected {n} rows, got {rows}")));
        }
        PointSet::new(dim, n, data)
    }
}

/// Row-wise concatenation `(x_i, y_i)` of two point sets with equal counts.
pub fn concat(left: &PointSet, right: &PointSet) -> Result<PointSet> {
    if left.len() != right.len() {
        return Err(Error::CountMismatch {
            expected: left.len(),
            got: right.len(),
        });
    }
    let data = left
        .rows()
        .zip(right.rows())
        .flat_map(|(a, b)| a.iter().chain(b).copied())
        .collect();
    Ok(PointSet::from_raw(left.dim + right.dim, left.n, data))
}
