//! Interaction logs to direct referral trust.
//!
//! A log line `source,target,amount` records a byte transfer between two
//! nodes. A positive amount means `source` downloaded from `target`, a
//! negative amount means `source` uploaded to `target`. Uploading counts as
//! positive evidence about the uploader and downloading as negative evidence
//! about the downloader; by default both end up in row `source`, column
//! `target` of the evidence matrix (the observer's row).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::{check_index, fmt17, implied_size, read_indexed_rows, OpinionMatrix};
use crate::opinion::{AlgebraParams, Evidence, Opinion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRecord {
    pub source: String,
    pub target: String,
    /// Bytes; positive: `source` downloaded from `target`, negative:
    /// `source` uploaded to `target`.
    pub amount: i64,
}

impl InteractionRecord {
    pub fn new(source: impl Into<String>, target: impl Into<String>, amount: i64) -> Result<Self> {
        let (source, target) = (source.into(), target.into());
        if source == target {
            return Err(Error::Parse {
                line: 0,
                message: format!("self-interaction of `{source}`"),
            });
        }
        if amount == 0 {
            return Err(Error::Parse {
                line: 0,
                message: "zero transfer amount".into(),
            });
        }
        Ok(Self {
            source,
            target,
            amount,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed line is an error.
    Strict,
    /// Malformed lines are skipped and counted.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedLog {
    pub records: Vec<InteractionRecord>,
    pub skipped: usize,
}

const LOG_HEADER: [&str; 3] = ["source", "target", "amount"];

/// Parses a UTF-8 CSV interaction log with an optional
/// `source,target,amount` header.
pub fn parse_log<R: Read>(input: R, mode: ParseMode) -> Result<ParsedLog> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = ParsedLog::default();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(idx as u64 + 1, |p| p.line());
        if idx == 0 && rec.iter().eq(LOG_HEADER) {
            continue;
        }
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        match parse_record(&rec) {
            Ok(r) => out.records.push(r),
            Err(message) => match mode {
                ParseMode::Strict => return Err(Error::Parse { line, message }),
                ParseMode::Lenient => out.skipped += 1,
            },
        }
    }
    Ok(out)
}

fn parse_record(rec: &csv::StringRecord) -> std::result::Result<InteractionRecord, String> {
    if rec.len() != 3 {
        return Err(format!("expected 3 fields, found {}", rec.len()));
    }
    if rec[0].is_empty() || rec[1].is_empty() {
        return Err("empty node id".into());
    }
    let amount: i64 = rec[2]
        .parse()
        .map_err(|_| format!("bad amount `{}`", &rec[2]))?;
    InteractionRecord::new(&rec[0], &rec[1], amount).map_err(|e| match e {
        Error::Parse { message, .. } => message,
        other => other.to_string(),
    })
}

/// Writes records in the format read by [`parse_log`], with header.
pub fn write_log<W: Write>(records: &[InteractionRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LOG_HEADER)?;
    for r in records {
        w.write_record([r.source.as_str(), r.target.as_str(), &r.amount.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Sorted distinct node ids; a node's index is its rank.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeIndex {
    labels: Vec<String>,
}

impl NodeIndex {
    pub fn from_records(records: &[InteractionRecord]) -> Self {
        let set: BTreeSet<&str> = records
            .iter()
            .flat_map(|r| [r.source.as_str(), r.target.as_str()])
            .collect();
        Self {
            labels: set.into_iter().map(str::to_owned).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels
            .binary_search_by(|probe| probe.as_str().cmp(label))
            .ok()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Square matrix of evidence pairs with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceMatrix {
    n: usize,
    entries: Vec<Evidence>,
}

impl EvidenceMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Evidence::ZERO; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Evidence {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Evidence] {
        &self.entries
    }

    /// Adds evidence to an off-diagonal entry. Diagonal contributions are
    /// dropped; the return value says whether the evidence was kept.
    pub fn add(&mut self, i: usize, j: usize, ev: Evidence) -> Result<bool> {
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                n: self.n,
            });
        }
        if i == j {
            return Ok(false);
        }
        self.entries[i * self.n + j] += ev;
        Ok(true)
    }

    /// Total evidence over all entries.
    pub fn total(&self) -> Evidence {
        self.entries.iter().copied().sum()
    }

    /// Evidence underlying each entry of an opinion matrix (diagonal dropped).
    pub fn from_opinions(m: &OpinionMatrix, params: AlgebraParams) -> Self {
        let mut out = Self::zeros(m.size());
        for (i, j, x) in m.iter() {
            if i != j {
                out.entries[i * out.n + j] = x.evidence(params);
            }
        }
        out
    }

    /// CSV with header `i,j,p,n`; all-zero entries are omitted.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "p", "n"])?;
        for (idx, ev) in self.entries.iter().enumerate() {
            if !ev.is_zero() {
                let (i, j) = (idx / self.n, idx % self.n);
                w.write_record([i.to_string(), j.to_string(), fmt17(ev.p()), fmt17(ev.n())])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, n: Option<usize>) -> Result<Self> {
        let rows = read_indexed_rows(reader, &["i", "j", "p", "n"])?;
        let size = n.unwrap_or_else(|| implied_size(rows.iter().map(|r| (r.0, r.1))));
        let mut m = Self::zeros(size);
        for (i, j, vals, line) in rows {
            check_index(i, size, line)?;
            check_index(j, size, line)?;
            let err = |message: String| Error::Parse { line, message };
            if i == j {
                return Err(err(format!("diagonal entry ({i}, {i}) must be empty")));
            }
            let ev = Evidence::new(vals[0], vals[1]).map_err(|e| err(e.to_string()))?;
            m.entries[i * size + j] = ev;
        }
        Ok(m)
    }
}

/// Which entry an interaction's evidence is recorded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Entry `(source, target)`.
    #[default]
    ObserverRow,
    /// Entry `(target, source)`.
    Transposed,
}

/// Accumulates evidence from a log with the default orientation.
pub fn build_evidence_matrix(
    records: &[InteractionRecord],
    scale: f64,
) -> Result<(NodeIndex, EvidenceMatrix)> {
    build_evidence_matrix_oriented(records, scale, Orientation::default())
}

/// Accumulates evidence from a log. Amounts are divided by `scale`; a
/// positive amount adds to `p`, a negative one adds its magnitude to `n`.
pub fn build_evidence_matrix_oriented(
    records: &[InteractionRecord],
    scale: f64,
    orientation: Orientation,
) -> Result<(NodeIndex, EvidenceMatrix)> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidScalar(scale));
    }
    let index = NodeIndex::from_records(records);
    let mut m = EvidenceMatrix::zeros(index.len());
    for r in records {
        let s = index.index_of(&r.source).expect("indexed");
        let t = index.index_of(&r.target).expect("indexed");
        let (i, j) = match orientation {
            Orientation::ObserverRow => (s, t),
            Orientation::Transposed => (t, s),
        };
        let mass = r.amount.unsigned_abs() as f64 / scale;
        let ev = if r.amount > 0 {
            Evidence::new(mass, 0.0)?
        } else {
            Evidence::new(0.0, mass)?
        };
        m.add(i, j, ev)?;
    }
    Ok((index, m))
}

/// Assignment of node ids to `k` clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    assignment: BTreeMap<String, usize>,
    k: usize,
}

impl ClusterMap {
    pub fn cluster_count(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, node: &str) -> Option<usize> {
        self.assignment.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Number of nodes per cluster.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in self.assignment.values() {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Splits the sorted distinct node ids into `k` contiguous buckets whose
/// sizes differ by at most one (larger buckets first).
pub fn cluster_nodes(records: &[InteractionRecord], k: usize) -> Result<ClusterMap> {
    cluster_labels(NodeIndex::from_records(records).labels(), k)
}

pub fn cluster_labels(sorted_labels: &[String], k: usize) -> Result<ClusterMap> {
    let nodes = sorted_labels.len();
    if k == 0 || k > nodes {
        return Err(Error::ClusterCount { k, nodes });
    }
    let (base, extra) = (nodes / k, nodes % k);
    let mut assignment = BTreeMap::new();
    let mut labels = sorted_labels.iter();
    for cluster in 0..k {
        let size = base + usize::from(cluster < extra);
        for label in labels.by_ref().take(size) {
            assignment.insert(label.clone(), cluster);
        }
    }
    Ok(ClusterMap { assignment, k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredEvidence {
    pub matrix: EvidenceMatrix,
    /// Evidence between members of the same cluster.
    pub discarded: Evidence,
}

/// Sums member-pair evidence into a cluster-level matrix.
pub fn cluster_evidence(
    e: &EvidenceMatrix,
    index: &NodeIndex,
    clusters: &ClusterMap,
) -> Result<ClusteredEvidence> {
    if index.len() != e.size() {
        return Err(Error::DimensionMismatch {
            expected: e.size(),
            found: index.len(),
        });
    }
    let of = |i: usize| {
        let label = &index.labels()[i];
        clusters.cluster_of(label).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("node `{label}` has no cluster"),
        })
    };
    let cluster_ids = (0..e.size()).map(of).collect::<Result<Vec<_>>>()?;
    let mut matrix = EvidenceMatrix::zeros(clusters.cluster_count());
    let mut discarded = Evidence::ZERO;
    for i in 0..e.size() {
        for j in 0..e.size() {
            let ev = e.get(i, j);
            if ev.is_zero() {
                continue;
            }
            if !matrix.add(cluster_ids[i], cluster_ids[j], ev)? {
                discarded += ev;
            }
        }
    }
    Ok(ClusteredEvidence { matrix, discarded })
}

/// Entrywise evidence-to-opinion mapping with a fully uncertain diagonal.
pub fn evidence_to_opinion_matrix(e: &EvidenceMatrix, params: AlgebraParams) -> OpinionMatrix {
    OpinionMatrix::from_fn(e.size(), |i, j| {
        if i == j {
            Opinion::UNCERTAIN
        } else {
            Opinion::from_evidence(e.get(i, j), params)
        }
    })
}
