//! Standardisation pipeline for crisis-domain parallel corpora.
//!
//! The crate turns directories of raw text files in two languages into an
//! aligned, cleaned parallel corpus ready for MT training. Processing runs
//! in five stages:
//!
//! 1. [`normalize`] — Unicode NFC, byte-order-mark removal, whitespace
//!    merging, line structuring.
//! 2. [`langdetect`] — character-n-gram language identification for whole
//!    files and for individual segments.
//! 3. [`docalign`] — pairing source documents with target documents under a
//!    size-ratio constraint, with line-restructuring heuristics.
//! 4. [`sentalign`] — length-based sentence alignment allowing one-to-many
//!    beads.
//! 5. [`clean`] — final validation filters over flattened sentence pairs.
//!
//! The [`pipeline`] module orchestrates the stages end to end, writes
//! Moses/TSV/TMX outputs plus a JSON run manifest, and estimates the energy
//! footprint of the run via [`greenreport`].
//!
//! ```
//! use crisis_corpus::normalize::{normalize_document, RawText};
//! use crisis_corpus::docalign::pair_documents;
//! use crisis_corpus::sentalign::{align_sentences, flatten};
//!
//! let src = normalize_document(
//!     &RawText::new("Wash your hands.\nStay at home.\n", "notice.en.txt"),
//!     "notice.en.txt",
//!     "en",
//! );
//! let tgt = normalize_document(
//!     &RawText::new("Nigh do lámha.\nFan sa bhaile.\n", "notice.ga.txt"),
//!     "notice.ga.txt",
//!     "ga",
//! );
//! let outcome = pair_documents(vec![src], vec![tgt]).unwrap();
//! let alignment = align_sentences(&outcome.pairs[0]).unwrap();
//! assert_eq!(flatten(&alignment).pairs.len(), 2);
//! ```

pub mod clean;
pub mod docalign;
pub mod document;
pub mod greenreport;
pub mod langdetect;
pub mod normalize;
pub mod pipeline;
pub mod sentalign;

pub use clean::{clean_pairs, CleanReport, SentencePair};
pub use docalign::{pair_documents, DocumentPair, PairingOutcome};
pub use document::{Document, Segment};
pub use greenreport::{estimate_emissions, GreenReport, PowerConfig};
pub use langdetect::{detect_file_language, detect_segment, Detection, LanguageProfile, ProfileSet};
pub use normalize::{normalize_document, NormalizedText, RawText};
pub use pipeline::{run, PipelineConfig, RunManifest};
pub use sentalign::{align_sentences, flatten, Alignment, BeadType};
