//! Final validation filters over flattened sentence pairs.
//!
//! A pair is removed when either side
//!
//! (a) is empty after trimming,
//! (b) has no alphabetic characters (digit/punctuation-only lines), or
//! (c) is at least 40 characters long and detects as a language other
//!     than its expected tag.
//!
//! Rules are evaluated in that order and each removal is attributed to
//! the first rule that fires, so the report is deterministic. Sides too
//! short for reliable detection skip rule (c) and are counted, not
//! removed — short legitimate pairs ("OK." ↔ "Togha.") survive.
//!
//! Rule (b) ships in two flavours. The default removes sides with *zero
//! alphabetic* characters, which is what a filter guarding MT training
//! data wants: it drops page numbers, dates, and separator junk while
//! keeping real sentences. The alternative [`NonAlphaRule::LettersOnly`]
//! removes sides consisting *entirely of alphabetic* characters instead;
//! it exists for operators who want the stricter reading and is exposed
//! as `--strict-6b` in the CLI.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::langdetect::{detect_text, LangDetectError, ProfileSet};

/// Minimum side length (chars) for the language check, below which the
/// check is skipped.
pub const MIN_LANGCHECK_CHARS: usize = 40;

#[derive(Debug, Error)]
pub enum CleanError {
    #[error("no language profile loaded for expected language {0:?}")]
    MissingProfile(String),
    #[error(transparent)]
    Detect(#[from] LangDetectError),
}

/// One flattened sentence pair with its expected language tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub source_text: String,
    pub target_text: String,
    pub source_lang: String,
    pub target_lang: String,
}

impl SentencePair {
    pub fn new(
        source_text: impl Into<String>,
        target_text: impl Into<String>,
        source_lang: impl Into<String>,
        target_lang: impl Into<String>,
    ) -> Self {
        SentencePair {
            source_text: source_text.into(),
            target_text: target_text.into(),
            source_lang: source_lang.into(),
            target_lang: target_lang.into(),
        }
    }
}

/// Audit of filtering outcomes. `kept + removed_*` always equals the
/// number of input pairs; `skipped_langcheck_short` counts *sides* (a
/// pair with two short sides adds two).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub kept: usize,
    pub removed_empty: usize,
    pub removed_nonalpha: usize,
    pub removed_wrong_language: usize,
    pub skipped_langcheck_short: usize,
}

impl CleanReport {
    /// Number of input pairs this report accounts for.
    pub fn total(&self) -> usize {
        self.kept + self.removed_empty + self.removed_nonalpha + self.removed_wrong_language
    }

    /// Adds another report's counts, for merging partitioned runs.
    pub fn merge(&mut self, other: &CleanReport) {
        self.kept += other.kept;
        self.removed_empty += other.removed_empty;
        self.removed_nonalpha += other.removed_nonalpha;
        self.removed_wrong_language += other.removed_wrong_language;
        self.skipped_langcheck_short += other.skipped_langcheck_short;
    }
}

/// Which reading of the "non-alphabetical" rule to apply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonAlphaRule {
    /// Remove sides containing zero alphabetic characters (default).
    #[default]
    RequireLetters,
    /// Remove non-empty sides consisting entirely of alphabetic
    /// characters.
    LettersOnly,
}

/// Knobs for [`clean_pairs_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleanOptions {
    pub nonalpha: NonAlphaRule,
    pub min_langcheck_chars: usize,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions {
            nonalpha: NonAlphaRule::default(),
            min_langcheck_chars: MIN_LANGCHECK_CHARS,
        }
    }
}

/// Filters sentence pairs with default options.
pub fn clean_pairs(
    pairs: Vec<SentencePair>,
    profiles: &ProfileSet,
) -> Result<(Vec<SentencePair>, CleanReport), CleanError> {
    clean_pairs_with(pairs, profiles, &CleanOptions::default())
}

/// Filters sentence pairs, returning the survivors (input order
/// preserved) and a [`CleanReport`] accounting for every input pair.
///
/// Fails up front with [`CleanError::MissingProfile`] when any expected
/// language tag has no loaded profile — a silent pass-through there would
/// defeat the wrong-language rule entirely.
pub fn clean_pairs_with(
    pairs: Vec<SentencePair>,
    profiles: &ProfileSet,
    options: &CleanOptions,
) -> Result<(Vec<SentencePair>, CleanReport), CleanError> {
    let mut expected: Vec<&str> = pairs
        .iter()
        .flat_map(|p| [p.source_lang.as_str(), p.target_lang.as_str()])
        .collect();
    expected.sort_unstable();
    expected.dedup();
    for lang in expected {
        if profiles.get(lang).is_none() {
            return Err(CleanError::MissingProfile(lang.to_owned()));
        }
    }

    let mut kept = Vec::with_capacity(pairs.len());
    let mut report = CleanReport::default();
    for pair in pairs {
        if pair.source_text.trim().is_empty() || pair.target_text.trim().is_empty() {
            report.removed_empty += 1;
            continue;
        }
        if fails_alpha_rule(&pair.source_text, options.nonalpha)
            || fails_alpha_rule(&pair.target_text, options.nonalpha)
        {
            report.removed_nonalpha += 1;
            continue;
        }
        let src_ok = check_language(
            &pair.source_text,
            &pair.source_lang,
            profiles,
            options,
            &mut report,
        )?;
        let tgt_ok = check_language(
            &pair.target_text,
            &pair.target_lang,
            profiles,
            options,
            &mut report,
        )?;
        if src_ok && tgt_ok {
            report.kept += 1;
            kept.push(pair);
        } else {
            report.removed_wrong_language += 1;
        }
    }
    Ok((kept, report))
}

fn fails_alpha_rule(text: &str, rule: NonAlphaRule) -> bool {
    match rule {
        NonAlphaRule::RequireLetters => !text.chars().any(char::is_alphabetic),
        NonAlphaRule::LettersOnly => {
            !text.is_empty() && text.chars().all(char::is_alphabetic)
        }
    }
}

/// Applies rule (c) to one side. Returns false when the side is long
/// enough to check and detects as the wrong language.
fn check_language(
    text: &str,
    expected: &str,
    profiles: &ProfileSet,
    options: &CleanOptions,
    report: &mut CleanReport,
) -> Result<bool, CleanError> {
    if text.chars().count() < options.min_langcheck_chars {
        report.skipped_langcheck_short += 1;
        return Ok(true);
    }
    let detection = detect_text(text, profiles)?;
    Ok(detection.language == expected)
}
