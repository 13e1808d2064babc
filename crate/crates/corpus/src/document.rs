//! Core document model shared by every pipeline stage.

/// One normalized line of a document.
///
/// Segments are produced by [`crate::normalize::normalize_document`] and are
/// guaranteed non-empty, NFC-normalized, and free of tabs, carriage returns,
/// byte order marks, and doubled spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Normalized text of the line.
    pub text: String,
    /// Character (not byte) count of `text`.
    pub chars: usize,
}

impl Segment {
    /// Wraps a line of text, computing its character count.
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let chars = text.chars().count();
        Segment { text, chars }
    }
}

/// A normalized document: an ordered list of non-empty segments plus the
/// metadata the aligner needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// Stable identifier, derived from the file's path relative to its
    /// input directory (always `/`-separated).
    pub id: String,
    /// Declared language as an ISO 639-1 tag (e.g. `"ga"`).
    pub language: String,
    /// Normalized non-empty lines in original order.
    pub segments: Vec<Segment>,
    /// Total character count over all segments.
    pub size_chars: usize,
}

impl Document {
    /// Builds a document from segment texts, computing the size metrics.
    pub fn new<I, S>(id: impl Into<String>, language: impl Into<String>, texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<Segment> = texts.into_iter().map(Segment::new).collect();
        let size_chars = segments.iter().map(|s| s.chars).sum();
        Document {
            id: id.into(),
            language: language.into(),
            segments,
            size_chars,
        }
    }

    /// True when the document has no segments (e.g. a whitespace-only file).
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Iterates over the segment texts in order.
    pub fn segment_texts(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().map(|s| s.text.as_str())
    }
}
