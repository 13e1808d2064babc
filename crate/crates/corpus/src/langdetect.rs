//! Character-n-gram language identification.
//!
//! Uses rank-order statistics over character n-grams (n = 1..5): a language
//! profile is the list of the 400 most frequent n-grams of a training text,
//! ranked by frequency. A text is classified by ranking its own n-grams the
//! same way and summing, over the text's grams, the rank displacement
//! against each profile (missing grams pay the maximum displacement). The
//! profile with the smallest total wins.
//!
//! The scheme needs only a couple of kilobytes of training text per
//! language, has no tunable weights, and is fully deterministic — which is
//! what a reproducible corpus pipeline wants, rather than the last point of
//! accuracy.
//!
//! Two callers exist: whole-file detection (sampling the first 50 lines and
//! every 100th thereafter) and per-segment detection for the final cleaning
//! filters (segments of at least 40 characters).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::Document;

/// Maximum number of ranked n-grams kept in a profile; also the
/// displacement charged for a gram absent from the profile.
pub const PROFILE_CUTOFF: usize = 400;
/// Smallest n-gram length collected.
pub const NGRAM_MIN: usize = 1;
/// Largest n-gram length collected.
pub const NGRAM_MAX: usize = 5;
/// Minimum training-text size for [`build_profile`].
pub const MIN_TRAINING_CHARS: usize = 1000;
/// Minimum segment length for [`detect_segment`].
pub const MIN_SEGMENT_CHARS: usize = 40;
/// Number of leading lines sampled by [`detect_file_language`].
pub const FILE_SAMPLE_HEAD: usize = 50;
/// Stride of the additional lines sampled by [`detect_file_language`].
pub const FILE_SAMPLE_STRIDE: usize = 100;

#[derive(Debug, Error)]
pub enum LangDetectError {
    #[error("training text has {chars} characters, need at least {MIN_TRAINING_CHARS}")]
    InsufficientTrainingData { chars: usize },
    #[error("segment has {chars} characters, need at least {min} for language detection")]
    TooShort { chars: usize, min: usize },
    #[error("no language profiles loaded")]
    NoProfiles,
    #[error("document {id:?} has no segments to sample")]
    EmptyDocument { id: String },
    #[error("invalid language profile: {reason}")]
    InvalidProfile { reason: String },
    #[error("duplicate profile for language {language:?}")]
    DuplicateProfile { language: String },
    #[error("failed to read profile {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Ranked n-gram profile of one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    /// ISO 639-1 tag, e.g. `"ga"`.
    pub language: String,
    /// n-gram → rank (1 = most frequent). At most [`PROFILE_CUTOFF`]
    /// entries with distinct ranks contiguous from 1.
    ngram_ranks: BTreeMap<String, u32>,
    /// Character count of the training text; 0 for profiles restored from
    /// disk, where the training text is no longer known.
    pub training_size: usize,
}

/// On-disk profile layout: `{"language": "...", "ngrams": [["th", 1], …]}`.
#[derive(Serialize, Deserialize)]
struct ProfileFile {
    language: String,
    ngrams: Vec<(String, u32)>,
}

impl LanguageProfile {
    /// Rank of `gram` in this profile, if present.
    pub fn rank(&self, gram: &str) -> Option<u32> {
        self.ngram_ranks.get(gram).copied()
    }

    /// Number of ranked n-grams.
    pub fn len(&self) -> usize {
        self.ngram_ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ngram_ranks.is_empty()
    }

    /// Entries as (gram, rank) in rank order.
    pub fn ranked_ngrams(&self) -> Vec<(&str, u32)> {
        let mut entries: Vec<(&str, u32)> = self
            .ngram_ranks
            .iter()
            .map(|(g, &r)| (g.as_str(), r))
            .collect();
        entries.sort_by_key(|&(_, r)| r);
        entries
    }

    /// Serializes to the on-disk JSON layout (single line, rank order).
    pub fn to_json(&self) -> String {
        let file = ProfileFile {
            language: self.language.clone(),
            ngrams: self
                .ranked_ngrams()
                .into_iter()
                .map(|(g, r)| (g.to_owned(), r))
                .collect(),
        };
        let mut json = serde_json::to_string(&file).expect("profile serializes");
        json.push('\n');
        json
    }

    /// Parses and validates the on-disk JSON layout.
    pub fn from_json(json: &str) -> Result<Self, LangDetectError> {
        let file: ProfileFile =
            serde_json::from_str(json).map_err(|e| LangDetectError::InvalidProfile {
                reason: e.to_string(),
            })?;
        validate_language_tag(&file.language)?;
        if file.ngrams.len() > PROFILE_CUTOFF {
            return Err(LangDetectError::InvalidProfile {
                reason: format!(
                    "{} n-grams exceed the cutoff of {PROFILE_CUTOFF}",
                    file.ngrams.len()
                ),
            });
        }
        let mut ngram_ranks = BTreeMap::new();
        let mut seen_ranks = vec![false; file.ngrams.len()];
        for (gram, rank) in &file.ngrams {
            let n = gram.chars().count();
            if !(NGRAM_MIN..=NGRAM_MAX).contains(&n) {
                return Err(LangDetectError::InvalidProfile {
                    reason: format!("gram {gram:?} has length {n}, expected {NGRAM_MIN}..{NGRAM_MAX}"),
                });
            }
            let idx = *rank as usize;
            if idx == 0 || idx > file.ngrams.len() || seen_ranks[idx - 1] {
                return Err(LangDetectError::InvalidProfile {
                    reason: format!(
                        "ranks must be distinct and contiguous from 1 (offending rank {rank})"
                    ),
                });
            }
            seen_ranks[idx - 1] = true;
            if ngram_ranks.insert(gram.clone(), *rank).is_some() {
                return Err(LangDetectError::InvalidProfile {
                    reason: format!("duplicate gram {gram:?}"),
                });
            }
        }
        Ok(LanguageProfile {
            language: file.language,
            ngram_ranks,
            training_size: 0,
        })
    }
}

/// True when `tag` looks like a lowercase ISO 639 code (2–3 ASCII
/// letters) — the shape every language tag in this crate must have.
pub fn valid_language_tag(tag: &str) -> bool {
    (2..=3).contains(&tag.len()) && tag.bytes().all(|b| b.is_ascii_lowercase())
}

fn validate_language_tag(tag: &str) -> Result<(), LangDetectError> {
    if valid_language_tag(tag) {
        Ok(())
    } else {
        Err(LangDetectError::InvalidProfile {
            reason: format!("language tag {tag:?} is not a lowercase ISO 639 code"),
        })
    }
}

/// Result of a detection.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Winning language tag (one of the loaded profiles).
    pub language: String,
    /// 1 − best_distance / second_best_distance, clamped to [0, 1]. Only
    /// the ordering of distances carries meaning; this is a convenience
    /// indicator, not a calibrated probability.
    pub confidence: f64,
    /// Characters of text the decision was based on.
    pub sampled_chars: usize,
}

/// An immutable set of profiles with unique language tags.
#[derive(Debug, Clone, Default)]
pub struct ProfileSet {
    profiles: Vec<LanguageProfile>,
}

impl ProfileSet {
    /// Builds a set, rejecting duplicate language tags.
    pub fn new(profiles: Vec<LanguageProfile>) -> Result<Self, LangDetectError> {
        let mut set = ProfileSet { profiles };
        set.profiles.sort_by(|a, b| a.language.cmp(&b.language));
        for pair in set.profiles.windows(2) {
            if pair[0].language == pair[1].language {
                return Err(LangDetectError::DuplicateProfile {
                    language: pair[0].language.clone(),
                });
            }
        }
        Ok(set)
    }

    /// Loads every `*.json` profile in `dir` (sorted by file name).
    pub fn load_dir(dir: &Path) -> Result<Self, LangDetectError> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|source| LangDetectError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        let mut profiles = Vec::with_capacity(paths.len());
        for path in paths {
            let json = std::fs::read_to_string(&path).map_err(|source| LangDetectError::Io {
                path: path.clone(),
                source,
            })?;
            profiles.push(LanguageProfile::from_json(&json).map_err(|e| match e {
                LangDetectError::InvalidProfile { reason } => LangDetectError::InvalidProfile {
                    reason: format!("{}: {reason}", path.display()),
                },
                other => other,
            })?);
        }
        Self::new(profiles)
    }

    pub fn get(&self, language: &str) -> Option<&LanguageProfile> {
        self.profiles.iter().find(|p| p.language == language)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LanguageProfile> {
        self.profiles.iter()
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.iter().map(|p| p.language.as_str())
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

/// Lowercases and collapses all whitespace runs to single spaces, so that
/// profiles are insensitive to line structure and case.
fn prepare(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        for lower in c.to_lowercase() {
            out.push(lower);
        }
    }
    out
}

/// Ranks the 1..5-grams of prepared text: most frequent first, ties broken
/// lexicographically, truncated to `cutoff` entries, ranks from 1.
fn rank_ngrams(prepared: &str, cutoff: usize) -> BTreeMap<String, u32> {
    let chars: Vec<char> = prepared.chars().collect();
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut buf = String::new();
    for n in NGRAM_MIN..=NGRAM_MAX {
        for window in chars.windows(n) {
            buf.clear();
            for c in window {
                let _ = buf.write_char(*c);
            }
            if let Some(count) = counts.get_mut(buf.as_str()) {
                *count += 1;
            } else {
                counts.insert(buf.clone(), 1);
            }
        }
    }
    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(cutoff);
    entries
        .into_iter()
        .zip(1u32..)
        .map(|((gram, _), rank)| (gram, rank))
        .collect()
}

/// Builds a ranked n-gram profile from at least [`MIN_TRAINING_CHARS`]
/// characters of training text. Pure: identical text yields an identical
/// profile.
pub fn build_profile(
    corpus_text: &str,
    language_tag: &str,
) -> Result<LanguageProfile, LangDetectError> {
    validate_language_tag(language_tag)?;
    let chars = corpus_text.chars().count();
    if chars < MIN_TRAINING_CHARS {
        return Err(LangDetectError::InsufficientTrainingData { chars });
    }
    let ngram_ranks = rank_ngrams(&prepare(corpus_text), PROFILE_CUTOFF);
    Ok(LanguageProfile {
        language: language_tag.to_owned(),
        ngram_ranks,
        training_size: chars,
    })
}

/// Total rank displacement of the text's ranked grams against a profile.
fn rank_distance(text_ranks: &BTreeMap<String, u32>, profile: &LanguageProfile) -> u64 {
    text_ranks
        .iter()
        .map(|(gram, &rank)| match profile.rank(gram) {
            Some(profile_rank) => u64::from(rank.abs_diff(profile_rank)),
            None => PROFILE_CUTOFF as u64,
        })
        .sum()
}

/// Classifies `text` against the loaded profiles with no length check.
///
/// Ties on distance are broken by lexicographic language tag. With a single
/// profile loaded the confidence is 1.0 by convention; when the two best
/// distances are equal (and nonzero) it is 0.0.
pub fn detect_text(text: &str, profiles: &ProfileSet) -> Result<Detection, LangDetectError> {
    if profiles.is_empty() {
        return Err(LangDetectError::NoProfiles);
    }
    let text_ranks = rank_ngrams(&prepare(text), PROFILE_CUTOFF);
    let mut scored: Vec<(u64, &str)> = profiles
        .iter()
        .map(|p| (rank_distance(&text_ranks, p), p.language.as_str()))
        .collect();
    scored.sort_unstable();
    let (best, language) = scored[0];
    let confidence = match scored.get(1) {
        None => 1.0,
        Some(&(0, _)) => 0.0,
        Some(&(second, _)) => (1.0 - best as f64 / second as f64).clamp(0.0, 1.0),
    };
    Ok(Detection {
        language: language.to_owned(),
        confidence,
        sampled_chars: text.chars().count(),
    })
}

/// Per-segment detection for the cleaning filters; requires at least
/// [`MIN_SEGMENT_CHARS`] characters (whitespace included).
pub fn detect_segment(text: &str, profiles: &ProfileSet) -> Result<Detection, LangDetectError> {
    let chars = text.chars().count();
    if chars < MIN_SEGMENT_CHARS {
        return Err(LangDetectError::TooShort {
            chars,
            min: MIN_SEGMENT_CHARS,
        });
    }
    detect_text(text, profiles)
}

/// 0-based indices of the default file sample: the first
/// [`FILE_SAMPLE_HEAD`] lines plus every [`FILE_SAMPLE_STRIDE`]-th line.
pub fn sample_indices(line_count: usize) -> Vec<usize> {
    sample_indices_with(line_count, FILE_SAMPLE_HEAD, FILE_SAMPLE_STRIDE)
}

/// 0-based sample indices for a custom head length and stride. Lines are
/// counted 1-based for the stride rule: lines `stride`, `2·stride`, … are
/// sampled in addition to the first `head` lines.
pub fn sample_indices_with(line_count: usize, head: usize, stride: usize) -> Vec<usize> {
    debug_assert!(stride >= 1);
    let mut indices: Vec<usize> = (0..line_count.min(head)).collect();
    let mut line = stride.max(1);
    while line <= line_count {
        // Overlap is only possible when the stride dips into the head.
        if line - 1 >= head {
            indices.push(line - 1);
        }
        line += stride.max(1);
    }
    indices
}

/// Whole-file detection over the sampled lines of a document (no minimum
/// length applies at file level).
pub fn detect_file_language(
    doc: &Document,
    profiles: &ProfileSet,
) -> Result<Detection, LangDetectError> {
    detect_file_language_with(doc, profiles, FILE_SAMPLE_HEAD, FILE_SAMPLE_STRIDE)
}

/// Whole-file detection with a custom sample head and stride.
pub fn detect_file_language_with(
    doc: &Document,
    profiles: &ProfileSet,
    head: usize,
    stride: usize,
) -> Result<Detection, LangDetectError> {
    if doc.segments.is_empty() {
        return Err(LangDetectError::EmptyDocument {
            id: doc.id.clone(),
        });
    }
    let sample: Vec<&str> = sample_indices_with(doc.segments.len(), head, stride)
        .into_iter()
        .map(|i| doc.segments[i].text.as_str())
        .collect();
    detect_text(&sample.join(" "), profiles)
}
