//! End-to-end orchestration: ingest → detect → pair → align → clean →
//! write, with a run manifest and green report.
//!
//! `run` is deterministic apart from wall-clock fields: identical inputs
//! and configuration produce byte-identical corpus files and an identical
//! manifest modulo `created_unix` and the green report. Failures are
//! tagged with the stage they occurred in, and any output files already
//! written by a failing run are removed so an output directory never
//! holds a partial corpus.

pub mod config;
pub mod formats;
pub mod manifest;

pub use config::{ConfigError, OutputFormat, PipelineConfig, Preset};
pub use manifest::{AlignmentCounts, DocumentCounts, OutputRecord, PairingCounts, RunManifest};

use std::collections::BTreeMap;
use std::ffi::OsStr;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::clean::{clean_pairs_with, CleanOptions, NonAlphaRule, SentencePair};
use crate::docalign::{pair_documents_with, PairingOptions, PairingOutcome};
use crate::document::Document;
use crate::greenreport::{estimate_emissions, IntensityTable, Tracker};
use crate::langdetect::{detect_file_language_with, ProfileSet};
use crate::normalize::{normalize_document, Encoding, RawText};
use crate::pipeline::formats::{write_moses, write_tmx, write_tsv};
use crate::sentalign::{align_documents, flatten, AlignOptions};

/// Environment variable overriding the default profiles directory.
pub const PROFILES_ENV_VAR: &str = "CRISIS_CORPUS_PROFILES";

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Collect,
    Normalize,
    Detect,
    Pair,
    Align,
    Clean,
    Write,
    Report,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Collect => "collect",
            Stage::Normalize => "normalize",
            Stage::Detect => "detect",
            Stage::Pair => "pair",
            Stage::Align => "align",
            Stage::Clean => "clean",
            Stage::Write => "write",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A stage-tagged pipeline failure.
#[derive(Debug, Error)]
#[error("[{stage}] {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

fn err(stage: Stage, message: impl Into<String>) -> PipelineError {
    PipelineError {
        stage,
        message: message.into(),
    }
}

/// Resolves the profiles directory: explicit configuration, then the
/// `CRISIS_CORPUS_PROFILES` environment variable, then `./profiles`.
pub fn resolve_profiles_dir(config: &PipelineConfig) -> PathBuf {
    profiles_dir_from(
        config.profiles_dir.as_deref(),
        std::env::var_os(PROFILES_ENV_VAR).as_deref(),
    )
}

/// [`resolve_profiles_dir`] with the environment passed in, for tests.
pub fn profiles_dir_from(explicit: Option<&Path>, env: Option<&OsStr>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| env.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("profiles"))
}

/// Recursively collects `*.txt` files under `dir` as (id, path), sorted
/// by id. Ids are `/`-separated paths relative to `dir`.
pub fn collect_text_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, PipelineError> {
    if !dir.is_dir() {
        return Err(err(
            Stage::Collect,
            format!("input directory {} does not exist", dir.display()),
        ));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = entry.map_err(|e| err(Stage::Collect, e.to_string()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        if path.extension().and_then(OsStr::to_str) != Some("txt") {
            continue;
        }
        let rel = path.strip_prefix(dir).unwrap_or(path);
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((id, path.to_path_buf()));
    }
    files.sort();
    Ok(files)
}

fn load_raw(path: &Path, encoding: Encoding) -> Result<RawText, PipelineError> {
    RawText::read(path, encoding)
        .map_err(|e| err(Stage::Collect, format!("{}: {e}", path.display())))?
        .map_err(|e| err(Stage::Normalize, format!("{}: {e}", path.display())))
}

/// Loads and normalizes every text file under `dir` as `language`.
pub fn load_documents(
    dir: &Path,
    language: &str,
    encoding: Encoding,
) -> Result<Vec<Document>, PipelineError> {
    let mut documents = Vec::new();
    for (id, path) in collect_text_files(dir)? {
        let raw = load_raw(&path, encoding)?;
        documents.push(normalize_document(&raw, &id, language));
    }
    Ok(documents)
}

/// Loads a mixed directory, classifying files by the language marker in
/// their name (`notice.en.txt` → source when the source marker is `en`).
/// Unclassifiable files are skipped with a warning.
pub fn load_mixed_documents(
    dir: &Path,
    config: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<(Vec<Document>, Vec<Document>), PipelineError> {
    let source_suffix = format!(
        ".{}",
        config.source_marker.as_deref().unwrap_or(&config.source_lang)
    );
    let target_suffix = format!(
        ".{}",
        config.target_marker.as_deref().unwrap_or(&config.target_lang)
    );
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for (id, path) in collect_text_files(dir)? {
        let base = id.strip_suffix(".txt").unwrap_or(&id);
        let language = if base.ends_with(&source_suffix) {
            &config.source_lang
        } else if base.ends_with(&target_suffix) {
            &config.target_lang
        } else {
            warnings.push(format!(
                "document {id}: no {source_suffix}/{target_suffix} marker, skipped"
            ));
            continue;
        };
        let raw = load_raw(&path, config.encoding)?;
        let doc = normalize_document(&raw, &id, language);
        if language == &config.source_lang {
            sources.push(doc);
        } else {
            targets.push(doc);
        }
    }
    Ok((sources, targets))
}

/// Removes tracked files on drop unless defused — the mechanism behind
/// failure atomicity: every output path is tracked before its first byte
/// is written, and the guard is defused only after the manifest lands.
struct CleanupGuard {
    paths: Vec<PathBuf>,
    armed: bool,
}

impl CleanupGuard {
    fn new() -> CleanupGuard {
        CleanupGuard {
            paths: Vec::new(),
            armed: true,
        }
    }

    fn track(&mut self, path: PathBuf) {
        self.paths.push(path);
    }

    fn defuse(mut self) {
        self.armed = false;
    }
}

impl Drop for CleanupGuard {
    fn drop(&mut self) {
        if self.armed {
            for path in &self.paths {
                let _ = fs::remove_file(path);
            }
        }
    }
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn output_record(name: &str, path: &Path, units: usize) -> Result<OutputRecord, PipelineError> {
    let bytes = fs::read(path).map_err(|e| err(Stage::Write, format!("{}: {e}", path.display())))?;
    Ok(OutputRecord {
        file: name.to_owned(),
        units,
        sha256: hex_sha256(&bytes),
    })
}

/// Runs the full pipeline and writes outputs plus `manifest.json` into
/// `config.output_dir`.
///
/// Corpus files are only produced when at least one document was
/// ingested; a run over empty directories still records its (all-zero)
/// manifest. On failure, files written by this run are removed.
pub fn run(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    config
        .validate()
        .map_err(|e| err(Stage::Config, e.to_string()))?;
    let tracker = Tracker::start();
    let created_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut warnings: Vec<String> = Vec::new();

    // Ingest and normalize.
    let (sources, targets) = if let Some(mixed) = &config.mixed_dir {
        load_mixed_documents(mixed, config, &mut warnings)?
    } else {
        (
            load_documents(
                config.source_dir.as_ref().expect("validated"),
                &config.source_lang,
                config.encoding,
            )?,
            load_documents(
                config.target_dir.as_ref().expect("validated"),
                &config.target_lang,
                config.encoding,
            )?,
        )
    };
    let mut empty_documents = 0usize;
    for doc in sources.iter().chain(&targets).filter(|d| d.is_empty()) {
        empty_documents += 1;
        warnings.push(format!("document {}: empty after normalization", doc.id));
    }
    let documents = DocumentCounts {
        source_documents: sources.len(),
        target_documents: targets.len(),
        empty_documents,
    };

    // Load profiles and sanity-check every file's language.
    let profiles_path = resolve_profiles_dir(config);
    let profiles = ProfileSet::load_dir(&profiles_path)
        .map_err(|e| err(Stage::Detect, format!("{}: {e}", profiles_path.display())))?;
    for lang in [&config.source_lang, &config.target_lang] {
        if profiles.get(lang).is_none() {
            return Err(err(
                Stage::Detect,
                format!(
                    "no language profile for {lang:?} in {}",
                    profiles_path.display()
                ),
            ));
        }
    }
    for doc in sources.iter().chain(&targets).filter(|d| !d.is_empty()) {
        let detection = detect_file_language_with(
            doc,
            &profiles,
            config.file_sample_head,
            config.file_sample_stride,
        )
        .map_err(|e| err(Stage::Detect, format!("document {}: {e}", doc.id)))?;
        if detection.language != doc.language {
            warnings.push(format!(
                "document {}: detected {} (confidence {:.2}), declared {}",
                doc.id, detection.language, detection.confidence, doc.language
            ));
        }
    }

    // Pair documents.
    let pairing_options = PairingOptions {
        bounds: config.ratio_bounds,
        max_iterations: config.max_iterations,
        rules: config.break_rules(),
        source_marker: config.source_marker.clone(),
        target_marker: config.target_marker.clone(),
    };
    let PairingOutcome { pairs, unpaired } =
        pair_documents_with(sources, targets, &pairing_options)
            .map_err(|e| err(Stage::Pair, e.to_string()))?;
    let mut by_iteration = [0usize; 3];
    for pair in &pairs {
        by_iteration[usize::from(pair.accepted_iteration) - 1] += 1;
    }
    for leftover in &unpaired {
        warnings.push(match leftover.last_ratio {
            Some(ratio) => format!(
                "document {} ({}): unpaired, last size ratio {ratio:.4}",
                leftover.document.id, leftover.document.language
            ),
            None => format!(
                "document {} ({}): unpaired, no candidate tested",
                leftover.document.id, leftover.document.language
            ),
        });
    }
    let pairing = PairingCounts {
        pairs: pairs.len(),
        by_iteration,
        unpaired: unpaired.len(),
    };

    // Align sentences and flatten to pairs.
    let align_options = AlignOptions {
        allow_two_two: config.allow_two_two,
    };
    let mut beads = 0usize;
    let mut beads_by_type: BTreeMap<String, usize> = BTreeMap::new();
    let mut dropped = 0usize;
    let mut flattened: Vec<SentencePair> = Vec::new();
    for pair in &pairs {
        let alignment = align_documents(&pair.source, &pair.target, &align_options).map_err(
            |e| {
                err(
                    Stage::Align,
                    format!("pair {} / {}: {e}", pair.source.id, pair.target.id),
                )
            },
        )?;
        beads += alignment.beads.len();
        for bead in &alignment.beads {
            *beads_by_type
                .entry(bead.bead_type.label().to_owned())
                .or_default() += 1;
        }
        let flat = flatten(&alignment);
        dropped += flat.dropped;
        for (source_text, target_text) in flat.pairs {
            flattened.push(SentencePair {
                source_text,
                target_text,
                source_lang: config.source_lang.clone(),
                target_lang: config.target_lang.clone(),
            });
        }
    }
    let alignment = AlignmentCounts {
        beads,
        beads_by_type,
        dropped,
        flattened_pairs: flattened.len(),
    };

    // Clean.
    let clean_options = CleanOptions {
        nonalpha: if config.strict_nonalpha {
            NonAlphaRule::LettersOnly
        } else {
            NonAlphaRule::RequireLetters
        },
        min_langcheck_chars: config.min_langdetect_chars,
    };
    let (kept, cleaning) = clean_pairs_with(flattened, &profiles, &clean_options)
        .map_err(|e| err(Stage::Clean, e.to_string()))?;

    // Write outputs under a cleanup guard.
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| err(Stage::Write, format!("{}: {e}", config.output_dir.display())))?;
    let mut guard = CleanupGuard::new();
    let mut outputs: Vec<OutputRecord> = Vec::new();
    if documents.source_documents + documents.target_documents > 0 {
        let mut written: Vec<OutputFormat> = Vec::new();
        for format in config.output_formats.iter().copied() {
            if written.contains(&format) {
                continue;
            }
            written.push(format);
            match format {
                OutputFormat::Moses => {
                    let src_name = format!("corpus.{}", config.source_lang);
                    let tgt_name = format!("corpus.{}", config.target_lang);
                    let src_path = config.output_dir.join(&src_name);
                    let tgt_path = config.output_dir.join(&tgt_name);
                    guard.track(src_path.clone());
                    guard.track(tgt_path.clone());
                    write_moses(&kept, &src_path, &tgt_path)
                        .map_err(|e| err(Stage::Write, format!("{}: {e}", src_path.display())))?;
                    outputs.push(output_record(&src_name, &src_path, kept.len())?);
                    outputs.push(output_record(&tgt_name, &tgt_path, kept.len())?);
                }
                OutputFormat::Tsv => {
                    let path = config.output_dir.join("corpus.tsv");
                    guard.track(path.clone());
                    write_tsv(&kept, &path)
                        .map_err(|e| err(Stage::Write, format!("{}: {e}", path.display())))?;
                    outputs.push(output_record("corpus.tsv", &path, kept.len())?);
                }
                OutputFormat::Tmx => {
                    let path = config.output_dir.join("corpus.tmx");
                    guard.track(path.clone());
                    write_tmx(&kept, &path, &config.source_lang, &config.target_lang)
                        .map_err(|e| err(Stage::Write, format!("{}: {e}", path.display())))?;
                    outputs.push(output_record("corpus.tmx", &path, kept.len())?);
                }
            }
        }
    }
    outputs.sort_by(|a, b| a.file.cmp(&b.file));
    let mut checksum_input = String::new();
    for record in &outputs {
        checksum_input.push_str(&record.file);
        checksum_input.push('\n');
        checksum_input.push_str(&record.sha256);
        checksum_input.push('\n');
    }
    let content_checksum = hex_sha256(checksum_input.as_bytes());

    // Green report over the measured duration.
    let intensity_table = match &config.intensity_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| err(Stage::Report, format!("{}: {e}", path.display())))?;
            IntensityTable::from_json(&text)
                .map_err(|e| err(Stage::Report, format!("{}: {e}", path.display())))?
        }
        None => IntensityTable::builtin(),
    };
    let green = estimate_emissions(tracker.elapsed_seconds(), &config.power, &intensity_table)
        .map_err(|e| err(Stage::Report, e.to_string()))?;

    let manifest = RunManifest {
        tool: "crisis-corpus".to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        created_unix,
        config: config.clone(),
        documents,
        pairing,
        alignment,
        cleaning,
        green,
        warnings,
        outputs,
        content_checksum,
    };
    let manifest_path = config.output_dir.join("manifest.json");
    guard.track(manifest_path.clone());
    fs::write(&manifest_path, manifest.to_json())
        .map_err(|e| err(Stage::Write, format!("{}: {e}", manifest_path.display())))?;
    guard.defuse();
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_labels_are_lowercase() {
        let all = [
            Stage::Config,
            Stage::Collect,
            Stage::Normalize,
            Stage::Detect,
            Stage::Pair,
            Stage::Align,
            Stage::Clean,
            Stage::Write,
            Stage::Report,
        ];
        for stage in all {
            assert_eq!(stage.label(), stage.label().to_lowercase());
        }
        let error = err(Stage::Pair, "duplicate id");
        assert_eq!(error.to_string(), "[pair] duplicate id");
    }

    #[test]
    fn profiles_dir_resolution_order() {
        let explicit = Path::new("/cfg/profiles");
        let env = OsStr::new("/env/profiles");
        assert_eq!(
            profiles_dir_from(Some(explicit), Some(env)),
            PathBuf::from("/cfg/profiles")
        );
        assert_eq!(
            profiles_dir_from(None, Some(env)),
            PathBuf::from("/env/profiles")
        );
        assert_eq!(profiles_dir_from(None, None), PathBuf::from("profiles"));
    }

    #[test]
    fn missing_input_directory_is_a_collect_error() {
        let missing = Path::new("/definitely/not/here");
        let error = collect_text_files(missing).unwrap_err();
        assert_eq!(error.stage, Stage::Collect);
    }

    #[test]
    fn collect_finds_only_txt_files_sorted_by_id() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("b.txt"), "x").unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        fs::write(dir.path().join("notes.md"), "x").unwrap();
        fs::write(dir.path().join("sub/c.txt"), "x").unwrap();
        let files = collect_text_files(dir.path()).unwrap();
        let ids: Vec<&str> = files.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, ["a.txt", "b.txt", "sub/c.txt"]);
    }

    #[test]
    fn cleanup_guard_removes_tracked_files_unless_defused() {
        let dir = tempfile::tempdir().unwrap();
        let kept = dir.path().join("kept.txt");
        let removed = dir.path().join("removed.txt");
        fs::write(&kept, "k").unwrap();
        fs::write(&removed, "r").unwrap();
        {
            let mut guard = CleanupGuard::new();
            guard.track(kept.clone());
            guard.defuse();
        }
        {
            let mut guard = CleanupGuard::new();
            guard.track(removed.clone());
        }
        assert!(kept.exists());
        assert!(!removed.exists());
    }
}
