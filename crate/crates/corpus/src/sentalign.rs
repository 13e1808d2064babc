//! Length-based sentence alignment.
//!
//! Implements the classic Gale–Church model: segment lengths (in
//! characters) of translated sentences are highly correlated, so an
//! alignment is scored by how plausible each *bead* — a unit linking up to
//! two source segments with up to two target segments — is under a length
//! model, plus a prior over bead shapes. Dynamic programming over prefix
//! pairs finds the minimum-cost monotonic cover.
//!
//! The model needs no lexicons or training data, which is the point: it
//! works on day one for a language pair nobody has resources for.
//!
//! Bead priors: 1-1 → 0.89, 1-0/0-1 → 0.0099, 2-1/1-2 → 0.089,
//! 2-2 → 0.011. The length mismatch for a bead covering `s` source
//! characters and `t` target characters is
//! `δ = (t − s·c) / sqrt(max(s,1)·s²)` with mean ratio `c = 1.0` and
//! variance `s² = 6.8`; its cost contribution is the negative log of the
//! two-sided normal tail at |δ|. Bead cost = −ln(prior) + tail term, so
//! all costs are positive and the DP minimises a sum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docalign::DocumentPair;
use crate::document::{Document, Segment};

/// Expected target/source character-count ratio (`c`).
pub const LENGTH_MEAN_RATIO: f64 = 1.0;
/// Variance of the per-character length difference (`s²`).
pub const LENGTH_VARIANCE: f64 = 6.8;

#[derive(Debug, Error)]
pub enum SentAlignError {
    #[error("unknown bead type {0:?} (expected one of 1-1, 1-0, 0-1, 1-2, 2-1, 2-2)")]
    UnknownBeadType(String),
    #[error("cannot align empty document {id:?}")]
    EmptyDocument { id: String },
}

/// Shape of one alignment unit: how many source and target segments it
/// covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BeadType {
    #[serde(rename = "1-1")]
    OneOne,
    #[serde(rename = "1-0")]
    OneZero,
    #[serde(rename = "0-1")]
    ZeroOne,
    #[serde(rename = "1-2")]
    OneTwo,
    #[serde(rename = "2-1")]
    TwoOne,
    #[serde(rename = "2-2")]
    TwoTwo,
}

impl BeadType {
    /// All bead types, in DP tie-break order: when two covers cost exactly
    /// the same, the one reaching a cell with an earlier move wins.
    pub const ALL: [BeadType; 6] = [
        BeadType::OneOne,
        BeadType::OneZero,
        BeadType::ZeroOne,
        BeadType::OneTwo,
        BeadType::TwoOne,
        BeadType::TwoTwo,
    ];

    /// Prior probability of this bead shape.
    pub fn prior(self) -> f64 {
        match self {
            BeadType::OneOne => 0.89,
            BeadType::OneZero | BeadType::ZeroOne => 0.0099,
            BeadType::OneTwo | BeadType::TwoOne => 0.089,
            BeadType::TwoTwo => 0.011,
        }
    }

    /// Number of source segments the bead covers.
    pub fn source_count(self) -> usize {
        match self {
            BeadType::ZeroOne => 0,
            BeadType::OneOne | BeadType::OneZero | BeadType::OneTwo => 1,
            BeadType::TwoOne | BeadType::TwoTwo => 2,
        }
    }

    /// Number of target segments the bead covers.
    pub fn target_count(self) -> usize {
        match self {
            BeadType::OneZero => 0,
            BeadType::OneOne | BeadType::ZeroOne | BeadType::TwoOne => 1,
            BeadType::OneTwo | BeadType::TwoTwo => 2,
        }
    }

    /// Conventional `src-tgt` label, e.g. `"2-1"`.
    pub fn label(self) -> &'static str {
        match self {
            BeadType::OneOne => "1-1",
            BeadType::OneZero => "1-0",
            BeadType::ZeroOne => "0-1",
            BeadType::OneTwo => "1-2",
            BeadType::TwoOne => "2-1",
            BeadType::TwoTwo => "2-2",
        }
    }
}

impl fmt::Display for BeadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BeadType {
    type Err = SentAlignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BeadType::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| SentAlignError::UnknownBeadType(s.to_owned()))
    }
}

/// Normalised length mismatch of a candidate bead.
fn length_delta(source_chars: usize, target_chars: usize) -> f64 {
    let s = source_chars as f64;
    let t = target_chars as f64;
    (t - s * LENGTH_MEAN_RATIO) / (s.max(1.0) * LENGTH_VARIANCE).sqrt()
}

/// Cost of one bead: −ln(prior) plus the negative log of the two-sided
/// normal tail of the length mismatch. Always positive. The tail is
/// clamped away from zero so extreme mismatches stay finite and ordered.
pub fn bead_cost(source_chars: usize, target_chars: usize, bead_type: BeadType) -> f64 {
    let delta = length_delta(source_chars, target_chars);
    let tail = libm::erfc(delta.abs() / std::f64::consts::SQRT_2).max(f64::MIN_POSITIVE);
    -bead_type.prior().ln() - tail.ln()
}

/// One alignment unit: 0..2 source segments matched with 0..2 target
/// segments (never both empty), its shape, and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedBead {
    pub source_segments: Vec<Segment>,
    pub target_segments: Vec<Segment>,
    pub bead_type: BeadType,
    pub cost: f64,
}

/// A full alignment: beads partition both segment sequences in order, and
/// `total_cost` is the sum of bead costs (folded left to right, exactly as
/// the DP accumulated it).
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub beads: Vec<AlignedBead>,
    pub total_cost: f64,
}

/// Alignment knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOptions {
    /// Permit 2-2 beads. On by default; turn off to force such regions
    /// through 1-2/2-1/deletion beads instead.
    pub allow_two_two: bool,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions { allow_two_two: true }
    }
}

/// Sentence pairs extracted from an alignment by [`flatten`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlattenedPairs {
    /// (source_text, target_text), multi-segment sides joined with one
    /// space.
    pub pairs: Vec<(String, String)>,
    /// Number of 1-0/0-1 beads that produced no pair.
    pub dropped: usize,
}

/// Aligns a paired document's segments with default options.
pub fn align_sentences(pair: &DocumentPair) -> Result<Alignment, SentAlignError> {
    align_documents(&pair.source, &pair.target, &AlignOptions::default())
}

/// Aligns two documents' segments into minimum-cost beads.
///
/// Standard prefix-pair dynamic programming: cell (i, j) holds the best
/// cost of covering the first i source and first j target segments; each
/// cell is relaxed from its predecessors through every bead shape, in
/// [`BeadType::ALL`] order, replacing only on strictly smaller cost so
/// exact ties resolve to the earlier move. Costs accumulate left to right,
/// which pins `total_cost` bit-for-bit for a given input.
pub fn align_documents(
    source: &Document,
    target: &Document,
    options: &AlignOptions,
) -> Result<Alignment, SentAlignError> {
    for doc in [source, target] {
        if doc.is_empty() {
            return Err(SentAlignError::EmptyDocument { id: doc.id.clone() });
        }
    }

    let m = source.segments.len();
    let n = target.segments.len();
    let src_prefix = prefix_chars(&source.segments);
    let tgt_prefix = prefix_chars(&target.segments);

    let mut best = vec![vec![f64::INFINITY; n + 1]; m + 1];
    let mut back: Vec<Vec<Option<BeadType>>> = vec![vec![None; n + 1]; m + 1];
    best[0][0] = 0.0;
    for i in 0..=m {
        for j in 0..=n {
            for bead in BeadType::ALL {
                if bead == BeadType::TwoTwo && !options.allow_two_two {
                    continue;
                }
                let ns = bead.source_count();
                let nt = bead.target_count();
                if ns > i || nt > j {
                    continue;
                }
                let prev = best[i - ns][j - nt];
                if !prev.is_finite() {
                    continue;
                }
                let s = src_prefix[i] - src_prefix[i - ns];
                let t = tgt_prefix[j] - tgt_prefix[j - nt];
                let candidate = prev + bead_cost(s, t, bead);
                if candidate < best[i][j] {
                    best[i][j] = candidate;
                    back[i][j] = Some(bead);
                }
            }
        }
    }

    let mut beads: Vec<AlignedBead> = Vec::new();
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let bead = back[i][j].expect("deletion beads make every cell reachable");
        let ns = bead.source_count();
        let nt = bead.target_count();
        let s = src_prefix[i] - src_prefix[i - ns];
        let t = tgt_prefix[j] - tgt_prefix[j - nt];
        beads.push(AlignedBead {
            source_segments: source.segments[i - ns..i].to_vec(),
            target_segments: target.segments[j - nt..j].to_vec(),
            bead_type: bead,
            cost: bead_cost(s, t, bead),
        });
        i -= ns;
        j -= nt;
    }
    beads.reverse();

    Ok(Alignment {
        beads,
        total_cost: best[m][n],
    })
}

/// Turns an alignment into sentence pairs. Beads with segments on both
/// sides yield one pair each (sides joined with a single space); deletion
/// beads (1-0/0-1) are dropped and counted.
pub fn flatten(alignment: &Alignment) -> FlattenedPairs {
    let mut pairs = Vec::new();
    let mut dropped = 0usize;
    for bead in &alignment.beads {
        if bead.source_segments.is_empty() || bead.target_segments.is_empty() {
            dropped += 1;
        } else {
            pairs.push((join(&bead.source_segments), join(&bead.target_segments)));
        }
    }
    FlattenedPairs { pairs, dropped }
}

fn join(segments: &[Segment]) -> String {
    let texts: Vec<&str> = segments.iter().map(|s| s.text.as_str()).collect();
    texts.join(" ")
}

fn prefix_chars(segments: &[Segment]) -> Vec<usize> {
    let mut prefix = Vec::with_capacity(segments.len() + 1);
    let mut total = 0usize;
    prefix.push(0);
    for segment in segments {
        total += segment.chars;
        prefix.push(total);
    }
    prefix
}
