//! Grayscale rendering of evidence matrices as binary PGM.
//!
//! Each entry maps to `round(255 · (1 − ln(1 + e) / ln(1 + e_max)))`, so no
//! evidence is white and the reference maximum is black.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::EvidenceMatrix;
use crate::opinion::Evidence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderMode {
    /// Positive evidence only.
    #[default]
    Positive,
    /// Positive plus negative evidence.
    Total,
}

impl RenderMode {
    pub fn value(&self, ev: Evidence) -> f64 {
        match self {
            RenderMode::Positive => ev.p(),
            RenderMode::Total => ev.total(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RenderSpec {
    pub mode: RenderMode,
    /// Evidence rendered black. Defaults to the largest entry of the matrix;
    /// fix it to compare several renders on one scale.
    pub max_reference: Option<f64>,
}

/// Gray level of evidence `e` against reference `e_max`. Values above the
/// reference saturate at black.
pub fn pixel_value(e: f64, e_max: f64) -> u8 {
    if e_max <= 0.0 {
        return 255;
    }
    let ratio = (e.max(0.0).ln_1p() / e_max.ln_1p()).min(1.0);
    (255.0 * (1.0 - ratio)).round() as u8
}

/// Row-major gray levels, one byte per entry.
pub fn grayscale(e: &EvidenceMatrix, spec: &RenderSpec) -> Result<Vec<u8>> {
    let values: Vec<f64> = e.entries().iter().map(|&ev| spec.mode.value(ev)).collect();
    let e_max = match spec.max_reference {
        Some(m) if m.is_finite() && m > 0.0 => m,
        Some(m) => {
            return Err(Error::InvalidConfig(format!(
                "max_reference must be positive, got {m}"
            )))
        }
        None => values.iter().copied().fold(0.0, f64::max),
    };
    Ok(values.iter().map(|&v| pixel_value(v, e_max)).collect())
}

/// Complete binary PGM (`P5`) image, one pixel per matrix entry.
pub fn render_pgm(e: &EvidenceMatrix, spec: &RenderSpec) -> Result<Vec<u8>> {
    let n = e.size();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(grayscale(e, spec)?);
    Ok(out)
}

pub fn write_pgm(e: &EvidenceMatrix, spec: &RenderSpec, path: &Path) -> Result<()> {
    let bytes = render_pgm(e, spec)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}
