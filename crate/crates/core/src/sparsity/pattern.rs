use std::fmt::Write as _;

use crate::{Error, Result};

/// Structural nonzero set of a Jacobian. Indices are 0-based in memory; the
/// text format is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n_rows: usize,
    n_cols: usize,
    /// Sorted by `(col, row)` and deduplicated.
    entries: Vec<(usize, usize)>,
}

impl SparsityPattern {
    /// Builds a pattern from `(row, col)` pairs, sorting and deduplicating.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidArgument("empty pattern dimensions".into()));
        }
        let mut entries = Vec::new();
        for (r, c) in pairs {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            entries.push((c, r));
        }
        entries.sort_unstable();
        entries.dedup();
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn dense(n_rows: usize, n_cols: usize) -> Self {
        let entries = (0..n_cols)
            .flat_map(|c| (0..n_rows).map(move |r| (c, r)))
            .collect();
        Self {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn diagonal(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            entries: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.entries.binary_search(&(col, row)).is_ok()
    }

    /// `(row, col)` pairs in row-major order.
    pub fn row_major(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.entries.iter().map(|&(c, r)| (r, c)).collect();
        v.sort_unstable();
        v
    }

    /// `(row, col)` pairs in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().map(|&(c, r)| (r, c))
    }

    /// Row indices of each column.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for &(c, r) in &self.entries {
            cols[c].push(r);
        }
        cols
    }

    /// Column indices of each row.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.n_rows];
        for &(c, r) in &self.entries {
            rows[r].push(c);
        }
        rows
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<(usize, usize)> = self.entries.iter().map(|&(c, r)| (r, c)).collect();
        entries.sort_unstable();
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            entries,
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows * self.n_cols,
                found: other.n_rows * other.n_cols,
            });
        }
        Self::new(self.n_rows, self.n_cols, self.iter().chain(other.iter()))
    }

    /// Text form: `"n_rows n_cols"` then one 1-based `"row col"` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n_rows, self.n_cols);
        for (r, c) in self.row_major() {
            let _ = writeln!(s, "{} {}", r + 1, c + 1);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let (n_rows, n_cols) = parse_pair(header)?;
        let mut pairs = Vec::new();
        for line in lines {
            let (r, c) = parse_pair(line)?;
            if r == 0 || c == 0 {
                return Err(Error::Parse(format!("indices are 1-based: `{line}`")));
            }
            pairs.push((r - 1, c - 1));
        }
        Self::new(n_rows, n_cols, pairs)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("expected two integers: `{line}`")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("`{line}`: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens: `{line}`")));
    }
    Ok((a, b))
}
