use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use ebsl::ingest::{
    build_evidence_matrix_oriented, cluster_evidence, cluster_labels, parse_log, ClusterMap,
    NodeIndex, Orientation, ParseMode,
};
use ebsl::{Evidence, EvidenceMatrix};

use crate::settings::Settings;
use crate::{CliError, InputArgs, OrientationArg};

pub const STRICT_PARSE_VAR: &str = "EBSL_STRICT_PARSE";

pub struct LoadedEvidence {
    pub matrix: EvidenceMatrix,
    /// Node labels and cluster assignment, for log input.
    pub nodes: Option<(NodeIndex, Option<ClusterMap>)>,
    pub skipped_lines: Option<usize>,
    pub discarded: Option<Evidence>,
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::new(format!("{}: {e}", path.display())))
}

fn parse_mode() -> ParseMode {
    match std::env::var(STRICT_PARSE_VAR) {
        Ok(v) if v == "1" => ParseMode::Strict,
        _ => ParseMode::Lenient,
    }
}

pub fn load(input: &InputArgs, settings: &Settings) -> Result<LoadedEvidence, CliError> {
    if let Some(path) = &input.evidence {
        if input.clusters.is_some() {
            return Err(CliError::new("--clusters applies to --log input only"));
        }
        let matrix = EvidenceMatrix::read_csv(open(path)?, None)
            .map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
        return Ok(LoadedEvidence {
            matrix,
            nodes: None,
            skipped_lines: None,
            discarded: None,
        });
    }
    let path = input.log.as_ref().expect("clap requires one input");
    let log = parse_log(open(path)?, parse_mode())
        .map_err(|e| CliError::new(format!("{}: {e}", path.display())))?;
    let orientation = match input.orientation {
        OrientationArg::ObserverRow => Orientation::ObserverRow,
        OrientationArg::Transposed => Orientation::Transposed,
    };
    let (index, matrix) =
        build_evidence_matrix_oriented(&log.records, settings.scale(), orientation)?;
    let (matrix, clusters, discarded) = match settings.clusters {
        Some(k) => {
            let map = cluster_labels(index.labels(), k)?;
            let ce = cluster_evidence(&matrix, &index, &map)?;
            (ce.matrix, Some(map), Some(ce.discarded))
        }
        None => (matrix, None, None),
    };
    Ok(LoadedEvidence {
        matrix,
        nodes: Some((index, clusters)),
        skipped_lines: Some(log.skipped),
        discarded,
    })
}

/// `label,index` lines mapping log node ids to matrix indices.
pub fn write_nodes(
    path: &Path,
    index: &NodeIndex,
    clusters: Option<&ClusterMap>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::new(e.to_string()))?;
    let mut write = |rec: [&str; 2]| {
        w.write_record(rec)
            .map_err(|e| CliError::new(e.to_string()))
    };
    write(["label", "index"])?;
    for (i, label) in index.labels().iter().enumerate() {
        let at = clusters
            .map_or(Some(i), |c| c.cluster_of(label))
            .expect("every node is clustered");
        write([label, &at.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
