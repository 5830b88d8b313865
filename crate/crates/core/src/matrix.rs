//! Dense square matrices of opinions and their CSV exchange format.
//!
//! The CSV form has the header `i,j,b,d,u`, lists entries in row-major order
//! and omits entries equal to full uncertainty. Values are written with 17
//! significant digits so that a write/read cycle is lossless.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::opinion::{AlgebraParams, Evidence, Opinion};

#[derive(Debug, Clone, PartialEq)]
pub struct OpinionMatrix {
    n: usize,
    entries: Vec<Opinion>,
}

impl OpinionMatrix {
    /// An `n × n` matrix of full uncertainty.
    pub fn uncertain(n: usize) -> Self {
        Self {
            n,
            entries: vec![Opinion::UNCERTAIN; n * n],
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(n: usize, entries: Vec<Opinion>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from a function of the coordinates.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Opinion) -> Self {
        let entries = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Self { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Opinion {
        assert!(
            i < self.n && j < self.n,
            "({i}, {j}) out of range for {}",
            self.n
        );
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Opinion) {
        assert!(
            i < self.n && j < self.n,
            "({i}, {j}) out of range for {}",
            self.n
        );
        self.entries[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Opinion] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[Opinion] {
        &self.entries
    }

    /// Iterates `(i, j, opinion)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Opinion)> + '_ {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .map(move |(idx, x)| (idx / n, idx % n, *x))
    }

    /// Copy with the diagonal replaced by full uncertainty.
    pub fn offdiag(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] = Opinion::UNCERTAIN;
        }
        out
    }

    /// Whether every diagonal entry is exactly full uncertainty, as required
    /// for a direct referral trust matrix.
    pub fn check_direct_referral(&self) -> Result<()> {
        match (0..self.n).find(|&i| !self.get(i, i).is_uncertain()) {
            Some(i) => Err(Error::NonUncertainDiagonal(i)),
            None => Ok(()),
        }
    }

    /// Entrywise consensus of two equally sized matrices.
    pub fn consensus(&self, other: &OpinionMatrix) -> Result<Self> {
        self.check_same_size(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x.consensus(y))
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub(crate) fn check_same_size(&self, other: &OpinionMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Sum of entrywise L1 distances.
    pub fn total_distance(&self, other: &OpinionMatrix) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x.distance(y))
            .sum())
    }

    /// Evidence underlying every entry, row-major.
    pub fn evidence(&self, params: AlgebraParams) -> Vec<Evidence> {
        self.entries.iter().map(|x| x.evidence(params)).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "b", "d", "u"])?;
        for (i, j, x) in self.iter().filter(|(_, _, x)| !x.is_uncertain()) {
            let [b, d, u] = x.components();
            w.write_record([i.to_string(), j.to_string(), fmt17(b), fmt17(d), fmt17(u)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV form. Missing entries default to full uncertainty; the
    /// size is `n` when given, otherwise one more than the largest index.
    pub fn read_csv<R: Read>(reader: R, n: Option<usize>) -> Result<Self> {
        let rows = read_indexed_rows(reader, &["i", "j", "b", "d", "u"])?;
        let size = n.unwrap_or_else(|| implied_size(rows.iter().map(|r| (r.0, r.1))));
        let mut m = Self::uncertain(size);
        for (i, j, vals, line) in rows {
            check_index(i, size, line)?;
            check_index(j, size, line)?;
            let x = Opinion::new(vals[0], vals[1], vals[2]).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            m.set(i, j, x);
        }
        Ok(m)
    }
}

/// Formats a value with 17 significant digits.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn implied_size(indices: impl Iterator<Item = (usize, usize)>) -> usize {
    indices.map(|(i, j)| i.max(j) + 1).max().unwrap_or(0)
}

pub(crate) fn check_index(index: usize, n: usize, line: u64) -> Result<()> {
    if index >= n {
        return Err(Error::Parse {
            line,
            message: format!("index {index} out of range for {n} nodes"),
        });
    }
    Ok(())
}

/// Row index, column index, values and source line of one CSV record.
pub(crate) type IndexedRow = (usize, usize, Vec<f64>, u64);

/// Reads `i,j,v1,v2,...` rows with the exact header given.
pub(crate) fn read_indexed_rows<R: Read>(reader: R, header: &[&str]) -> Result<Vec<IndexedRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse_err = |message: String| Error::Parse { line, message };
        if rec.len() != header.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                header.len(),
                rec.len()
            )));
        }
        let i: usize = rec[0]
            .parse()
            .map_err(|_| parse_err(format!("bad index `{}`", &rec[0])))?;
        let j: usize = rec[1]
            .parse()
            .map_err(|_| parse_err(format!("bad index `{}`", &rec[1])))?;
        let vals = rec
            .iter()
            .skip(2)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad number `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((i, j, vals, line));
    }
    Ok(rows)
}
