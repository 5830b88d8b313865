//! Flow-based reputation without uncertainty.
//!
//! Solves `r_x = (1 − α) s_x + α Σ_y (r_y / ℓ) A_yx` with `ℓ = Σ_z r_z` by
//! repeated substitution. Ratings come from evidence through
//! [`aggregate_rating`].

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{check_index, fmt17, implied_size, read_indexed_rows};
use crate::opinion::Evidence;

/// Maps evidence to a rating in `[0, 1]`: `1/2 + (p − n) / 2e`, and the
/// neutral `1/2` when there is no evidence.
pub fn aggregate_rating(ev: Evidence) -> f64 {
    let e = ev.total();
    if e > 0.0 {
        0.5 + (ev.p() - ev.n()) / (2.0 * e)
    } else {
        0.5
    }
}

/// Square matrix of aggregated ratings with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl RatingMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let mut m = Self::zeros(n);
        for (idx, v) in entries.into_iter().enumerate() {
            m.set(idx / n, idx % n, v)?;
        }
        Ok(m)
    }

    /// Ratings from row-major evidence. Pairs without evidence get the
    /// neutral rating; the diagonal stays zero.
    pub fn from_evidence(n: usize, evidence: &[Evidence]) -> Result<Self> {
        if evidence.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: evidence.len(),
            });
        }
        let mut m = Self::zeros(n);
        for (idx, ev) in evidence.iter().enumerate() {
            let (i, j) = (idx / n, idx % n);
            if i != j {
                m.entries[idx] = aggregate_rating(*ev);
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                n: self.n,
            });
        }
        let diagonal_ok = i != j || value == 0.0;
        if !(value.is_finite() && (0.0..=1.0).contains(&value) && diagonal_ok) {
            return Err(Error::InvalidRating {
                row: i,
                col: j,
                value,
            });
        }
        self.entries[i * self.n + j] = value;
        Ok(())
    }

    /// CSV with header `i,j,rating`; zero entries are omitted.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "rating"])?;
        for (idx, &v) in self.entries.iter().enumerate() {
            if v != 0.0 {
                let (i, j) = (idx / self.n, idx % self.n);
                w.write_record([i.to_string(), j.to_string(), fmt17(v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, n: Option<usize>) -> Result<Self> {
        let rows = read_indexed_rows(reader, &["i", "j", "rating"])?;
        let size = n.unwrap_or_else(|| implied_size(rows.iter().map(|r| (r.0, r.1))));
        let mut m = Self::zeros(size);
        for (i, j, vals, line) in rows {
            check_index(i, size, line)?;
            check_index(j, size, line)?;
            m.set(i, j, vals[0]).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(m)
    }
}

/// Reads a starting vector in CSV form (`i,s`). Missing indices are zero.
pub fn read_start_vector<R: Read>(reader: R, n: usize) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != ["i", "s"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `i,s`, found `{}`", header.join(",")),
        });
    }
    let mut s = vec![0.0; n];
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Parse { line, message };
        if rec.len() != 2 {
            return Err(err(format!("expected 2 fields, found {}", rec.len())));
        }
        let i: usize = rec[0]
            .parse()
            .map_err(|_| err(format!("bad index `{}`", &rec[0])))?;
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| err(format!("bad number `{}`", &rec[1])))?;
        check_index(i, n, line)?;
        s[i] = v;
    }
    Ok(s)
}

pub fn write_start_vector<W: Write>(s: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "s"])?;
    for (i, v) in s.iter().enumerate() {
        w.write_record([i.to_string(), fmt17(*v)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub alpha: f64,
    pub start: Vec<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl FlowConfig {
    pub fn new(alpha: f64, start: Vec<f64>) -> Self {
        Self {
            alpha,
            start,
            tolerance: 1e-10,
            max_iterations: 1000,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFlowConfig(msg));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.start.len() != n {
            return bad(format!(
                "starting vector has {} entries, expected {n}",
                self.start.len()
            ));
        }
        if self.start.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return bad("starting vector entries must lie in [0, 1]".into());
        }
        if self.start.iter().all(|&v| v == 0.0) {
            return bad("starting vector must have a nonzero entry".into());
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSolution {
    pub reputation: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Solves the flow equation starting the iteration from `s`.
pub fn solve_flow(a: &RatingMatrix, cfg: &FlowConfig) -> Result<FlowSolution> {
    solve_flow_from(a, cfg, &cfg.start)
}

/// Solves the flow equation starting the iteration from `initial` (which only
/// seeds the iteration; `cfg.start` still enters the equation).
pub fn solve_flow_from(
    a: &RatingMatrix,
    cfg: &FlowConfig,
    initial: &[f64],
) -> Result<FlowSolution> {
    let n = a.size();
    cfg.validate(n)?;
    if initial.len() != n || initial.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidFlowConfig(
            "initial iterate must be a non-negative vector of matching size".into(),
        ));
    }
    let alpha = cfg.alpha;
    let mut r = initial.to_vec();
    let mut next = vec![0.0; n];
    for k in 1..=cfg.max_iterations {
        let ell: f64 = r.iter().sum();
        if ell <= 0.0 {
            return Err(Error::InvalidFlowConfig(
                "reputation vector collapsed to zero".into(),
            ));
        }
        for (x, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = (0..n).map(|y| r[y] * a.get(y, x)).sum::<f64>() / ell;
            *slot = (1.0 - alpha) * cfg.start[x] + alpha * inflow;
        }
        let change = r
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut r, &mut next);
        if change < cfg.tolerance {
            return Ok(FlowSolution {
                reputation: r,
                converged: true,
                iterations: k,
            });
        }
    }
    Ok(FlowSolution {
        reputation: r,
        converged: false,
        iterations: cfg.max_iterations,
    })
}
