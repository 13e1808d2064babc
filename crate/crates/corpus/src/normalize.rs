//! Character- and whitespace-level standardization of raw text.
//!
//! Every document entering the pipeline passes through here first. The
//! normalization applies, in order:
//!
//! 1. line-terminator unification (CRLF and lone CR become LF),
//! 2. removal of every byte order mark (U+FEFF),
//! 3. Unicode canonical composition (NFC),
//! 4. whitespace merging: each intra-line run of whitespace becomes a single
//!    space and line edges are trimmed.
//!
//! Letters and their case are never touched — no tokenisation, no
//! truecasing. The steps are individually and jointly idempotent, so
//! re-normalizing already-clean text is a no-op.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::document::Document;

/// Character encodings accepted for input files.
///
/// A byte order mark in the file always wins over the declared encoding;
/// everything else is decoded as declared. Undecodable bytes are a hard
/// error — input is never silently repaired with U+FFFD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Encoding {
    #[serde(rename = "utf-8")]
    Utf8,
    #[serde(rename = "utf-16le")]
    Utf16Le,
    #[serde(rename = "utf-16be")]
    Utf16Be,
}

impl Default for Encoding {
    fn default() -> Self {
        Encoding::Utf8
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Utf8 => "utf-8",
            Encoding::Utf16Le => "utf-16le",
            Encoding::Utf16Be => "utf-16be",
        })
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_lowercase();
        match squashed.as_str() {
            "utf8" => Ok(Encoding::Utf8),
            "utf16le" => Ok(Encoding::Utf16Le),
            "utf16be" => Ok(Encoding::Utf16Be),
            _ => Err(format!(
                "unknown encoding {s:?} (expected utf-8, utf-16le or utf-16be)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    /// The input bytes do not decode under the effective encoding. The
    /// position is the byte offset of the first offending unit.
    #[error("invalid {encoding} input at byte {position}")]
    InvalidEncoding { encoding: Encoding, position: usize },
}

/// Raw decoded file content, before any normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawText {
    /// Decoded content, possibly still containing a byte order mark.
    pub content: String,
    /// Path the content was read from (for error context and ids).
    pub origin: PathBuf,
}

impl RawText {
    /// Wraps already-decoded text.
    pub fn new(content: impl Into<String>, origin: impl Into<PathBuf>) -> Self {
        RawText {
            content: content.into(),
            origin: origin.into(),
        }
    }

    /// Decodes `bytes` under `declared`, honouring a leading byte order
    /// mark: a UTF-8, UTF-16LE, or UTF-16BE mark overrides the declaration.
    /// The mark itself is left in place for [`normalize_unicode`] to strip.
    pub fn decode(
        bytes: &[u8],
        declared: Encoding,
        origin: impl Into<PathBuf>,
    ) -> Result<Self, NormalizeError> {
        let effective = sniff_bom(bytes).unwrap_or(declared);
        let content = match effective {
            Encoding::Utf8 => std::str::from_utf8(bytes)
                .map(str::to_owned)
                .map_err(|e| NormalizeError::InvalidEncoding {
                    encoding: Encoding::Utf8,
                    position: e.valid_up_to(),
                })?,
            Encoding::Utf16Le => decode_utf16(bytes, true)?,
            Encoding::Utf16Be => decode_utf16(bytes, false)?,
        };
        Ok(RawText {
            content,
            origin: origin.into(),
        })
    }

    /// Reads and decodes a file.
    pub fn read(path: &Path, declared: Encoding) -> std::io::Result<Result<Self, NormalizeError>> {
        let bytes = std::fs::read(path)?;
        Ok(Self::decode(&bytes, declared, path))
    }
}

fn sniff_bom(bytes: &[u8]) -> Option<Encoding> {
    if bytes.starts_with(&[0xEF, 0xBB, 0xBF]) {
        Some(Encoding::Utf8)
    } else if bytes.starts_with(&[0xFF, 0xFE]) {
        Some(Encoding::Utf16Le)
    } else if bytes.starts_with(&[0xFE, 0xFF]) {
        Some(Encoding::Utf16Be)
    } else {
        None
    }
}

fn decode_utf16(bytes: &[u8], little_endian: bool) -> Result<String, NormalizeError> {
    let encoding = if little_endian {
        Encoding::Utf16Le
    } else {
        Encoding::Utf16Be
    };
    if bytes.len() % 2 != 0 {
        return Err(NormalizeError::InvalidEncoding {
            encoding,
            position: bytes.len() - 1,
        });
    }
    let units = bytes.chunks_exact(2).map(|c| {
        if little_endian {
            u16::from_le_bytes([c[0], c[1]])
        } else {
            u16::from_be_bytes([c[0], c[1]])
        }
    });
    let mut out = String::with_capacity(bytes.len() / 2);
    let mut consumed_units = 0usize;
    for decoded in char::decode_utf16(units) {
        match decoded {
            Ok(c) => {
                out.push(c);
                consumed_units += c.len_utf16();
            }
            Err(_) => {
                return Err(NormalizeError::InvalidEncoding {
                    encoding,
                    position: consumed_units * 2,
                })
            }
        }
    }
    Ok(out)
}

/// Fully normalized text plus its line count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    /// NFC text with LF terminators, single-space runs, trimmed lines, and
    /// no byte order marks.
    pub content: String,
    /// Number of lines in `content` (a trailing LF does not add a line).
    pub line_count: usize,
}

/// Unifies line terminators, removes byte order marks, and applies Unicode
/// canonical composition (NFC). Letters, case, and all other characters are
/// left untouched.
///
/// Every U+FEFF is removed, not just the leading one: corpus files get
/// concatenated and re-split often enough that stray marks turn up mid-text,
/// and removing them all is what keeps this operation (and its composition
/// with [`merge_whitespace`]) idempotent.
pub fn normalize_unicode(text: &str) -> String {
    let mut unified = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\r' => {
                if chars.peek() == Some(&'\n') {
                    chars.next();
                }
                unified.push('\n');
            }
            '\u{FEFF}' => {}
            other => unified.push(other),
        }
    }
    if is_nfc(&unified) {
        unified
    } else {
        unified.nfc().collect()
    }
}

/// Merges every intra-line run of whitespace into a single space and strips
/// leading/trailing whitespace from each line. Line boundaries (LF) are
/// preserved; never increases the character count.
pub fn merge_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut first_line = true;
    for line in text.split('\n') {
        if !first_line {
            out.push('\n');
        }
        first_line = false;
        let mut pending_space = false;
        let mut line_started = false;
        for c in line.chars() {
            if c.is_whitespace() {
                pending_space = true;
            } else {
                if pending_space && line_started {
                    out.push(' ');
                }
                pending_space = false;
                line_started = true;
                out.push(c);
            }
        }
    }
    out
}

/// Applies the full normalization: [`normalize_unicode`] then
/// [`merge_whitespace`].
pub fn normalize_text(text: &str) -> NormalizedText {
    let content = merge_whitespace(&normalize_unicode(text));
    let line_count = content.lines().count();
    NormalizedText {
        content,
        line_count,
    }
}

/// Normalizes raw file content into a [`Document`]: lines are normalized,
/// empty lines dropped, and size metrics computed.
pub fn normalize_document(
    raw: &RawText,
    id: impl Into<String>,
    language: impl Into<String>,
) -> Document {
    let normalized = normalize_text(&raw.content);
    Document::new(
        id,
        language,
        normalized.content.lines().filter(|line| !line.is_empty()),
    )
}
