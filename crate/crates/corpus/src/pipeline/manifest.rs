//! The run manifest: a machine-readable audit record of one pipeline run.
//!
//! Every run writes `manifest.json` next to its outputs. It snapshots the
//! full configuration (so deviations from the defaults are on record),
//! counts what every stage consumed and produced, lists warnings such as
//! declared-vs-detected language mismatches, and fingerprints the output
//! files. Two runs over identical inputs and configuration differ only in
//! `created_unix` and the green report's measured duration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clean::CleanReport;
use crate::greenreport::GreenReport;
use crate::pipeline::config::PipelineConfig;

/// Documents ingested per side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCounts {
    pub source_documents: usize,
    pub target_documents: usize,
    /// Documents with no non-empty lines after normalization. They take
    /// no further part in the run beyond an `unpaired` entry.
    pub empty_documents: usize,
}

/// Outcome of the document-pairing stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingCounts {
    pub pairs: usize,
    /// Pairs accepted by pass 1, 2, and 3 respectively.
    pub by_iteration: [usize; 3],
    pub unpaired: usize,
}

/// Outcome of the sentence-alignment stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentCounts {
    pub beads: usize,
    /// Bead counts keyed by shape label ("1-1", "2-1", …).
    pub beads_by_type: BTreeMap<String, usize>,
    /// 1-0/0-1 beads dropped during flattening.
    pub dropped: usize,
    /// Sentence pairs handed to cleaning.
    pub flattened_pairs: usize,
}

/// One written output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// File name relative to the output directory.
    pub file: String,
    /// Lines (Moses/TSV) or translation units (TMX) in the file.
    pub units: usize,
    /// SHA-256 of the file's bytes, lowercase hex.
    pub sha256: String,
}

/// The complete record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Wall-clock start of the run, seconds since the Unix epoch.
    pub created_unix: u64,
    pub config: PipelineConfig,
    pub documents: DocumentCounts,
    pub pairing: PairingCounts,
    pub alignment: AlignmentCounts,
    pub cleaning: CleanReport,
    pub green: GreenReport,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputRecord>,
    /// SHA-256 over the sorted `file\nsha256\n` lines of `outputs` —
    /// one value that changes iff any output byte changes.
    pub content_checksum: String,
}

impl RunManifest {
    /// Pretty JSON with a trailing newline, as written to `manifest.json`.
    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        json
    }

    pub fn from_json(json: &str) -> Result<RunManifest, serde_json::Error> {
        serde_json::from_str(json)
    }
}
