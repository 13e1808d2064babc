//! End-to-end pipeline tests over the bundled English↔Irish toy corpus.
//!
//! The `expected/` files next to the fixture are the hand-aligned
//! reference: they were derived by enumerating all alignment covers of
//! the fixture's segment lengths independently of the pipeline code, and
//! the pipeline must reproduce them byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crisis_corpus::pipeline::{run, OutputFormat, PipelineConfig, RunManifest, Stage};
use quick_xml::events::Event;
use quick_xml::Reader;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

fn profiles_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .unwrap()
        .join("profiles")
}

fn toy_config(out: &Path) -> PipelineConfig {
    PipelineConfig {
        source_dir: Some(fixtures().join("en")),
        target_dir: Some(fixtures().join("ga")),
        profiles_dir: Some(profiles_dir()),
        output_dir: out.to_path_buf(),
        ..PipelineConfig::default()
    }
}

fn expected(name: &str) -> String {
    fs::read_to_string(fixtures().join("expected").join(name)).unwrap()
}

#[test]
fn toy_corpus_reproduces_the_reference_outputs() {
    let out = tempfile::tempdir().unwrap();
    let manifest = run(&toy_config(out.path())).unwrap();

    assert_eq!(
        fs::read_to_string(out.path().join("corpus.en")).unwrap(),
        expected("corpus.en")
    );
    assert_eq!(
        fs::read_to_string(out.path().join("corpus.ga")).unwrap(),
        expected("corpus.ga")
    );
    assert_eq!(
        fs::read_to_string(out.path().join("corpus.tsv")).unwrap(),
        expected("corpus.tsv")
    );

    assert_eq!(manifest.documents.source_documents, 3);
    assert_eq!(manifest.documents.target_documents, 3);
    assert_eq!(manifest.documents.empty_documents, 0);
    assert_eq!(manifest.pairing.pairs, 3);
    assert_eq!(manifest.pairing.by_iteration, [3, 0, 0]);
    assert_eq!(manifest.pairing.unpaired, 0);
    assert_eq!(manifest.alignment.beads, 11);
    assert_eq!(
        manifest.alignment.beads_by_type,
        BTreeMap::from([("1-1".to_owned(), 10), ("2-1".to_owned(), 1)])
    );
    assert_eq!(manifest.alignment.dropped, 0);
    assert_eq!(manifest.alignment.flattened_pairs, 11);
    assert_eq!(manifest.cleaning.kept, 9);
    assert_eq!(manifest.cleaning.removed_empty, 0);
    assert_eq!(manifest.cleaning.removed_nonalpha, 1);
    assert_eq!(manifest.cleaning.removed_wrong_language, 1);
    assert_eq!(manifest.cleaning.skipped_langcheck_short, 2);
    assert!(manifest.warnings.is_empty(), "{:?}", manifest.warnings);

    // Kept count shows up as the unit count of every output file.
    assert_eq!(manifest.outputs.len(), 4);
    for record in &manifest.outputs {
        assert_eq!(record.units, 9, "{}", record.file);
        assert_eq!(record.sha256.len(), 64);
    }

    // The manifest on disk round-trips to the returned value.
    let on_disk =
        RunManifest::from_json(&fs::read_to_string(out.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(on_disk, manifest);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let out_a = tempfile::tempdir().unwrap();
    let out_b = tempfile::tempdir().unwrap();
    let first = run(&toy_config(out_a.path())).unwrap();
    let second = run(&toy_config(out_b.path())).unwrap();
    assert_eq!(first.content_checksum, second.content_checksum);
    assert_eq!(first.outputs, second.outputs);
    for name in ["corpus.en", "corpus.ga", "corpus.tsv", "corpus.tmx"] {
        assert_eq!(
            fs::read(out_a.path().join(name)).unwrap(),
            fs::read(out_b.path().join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
}

#[test]
fn tmx_output_is_structurally_valid() {
    let out = tempfile::tempdir().unwrap();
    run(&toy_config(out.path())).unwrap();
    let xml = fs::read_to_string(out.path().join("corpus.tmx")).unwrap();

    let mut reader = Reader::from_str(&xml);
    let mut tus = 0usize;
    let mut tuvs_in_tu = 0usize;
    let mut langs: Vec<String> = Vec::new();
    let mut seg_texts = 0usize;
    let mut in_seg = false;
    let mut header_ok = false;
    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(e) => match e.name().as_ref() {
                b"tu" => {
                    tus += 1;
                    tuvs_in_tu = 0;
                }
                b"tuv" => {
                    tuvs_in_tu += 1;
                    for attr in e.attributes() {
                        let attr = attr.unwrap();
                        if attr.key.as_ref() == b"xml:lang" {
                            langs.push(String::from_utf8(attr.value.to_vec()).unwrap());
                        }
                    }
                }
                b"seg" => in_seg = true,
                _ => {}
            },
            Event::Empty(e) if e.name().as_ref() == b"header" => {
                let mut attrs: BTreeMap<String, String> = BTreeMap::new();
                for attr in e.attributes() {
                    let attr = attr.unwrap();
                    attrs.insert(
                        String::from_utf8(attr.key.as_ref().to_vec()).unwrap(),
                        String::from_utf8(attr.value.to_vec()).unwrap(),
                    );
                }
                assert_eq!(attrs.get("creationtool").unwrap(), "crisis-corpus");
                assert_eq!(attrs.get("srclang").unwrap(), "en");
                assert_eq!(attrs.get("segtype").unwrap(), "sentence");
                header_ok = true;
            }
            Event::Text(t) => {
                if in_seg && !t.unescape().unwrap().trim().is_empty() {
                    seg_texts += 1;
                }
            }
            Event::End(e) => {
                if e.name().as_ref() == b"seg" {
                    in_seg = false;
                }
                if e.name().as_ref() == b"tu" {
                    assert_eq!(tuvs_in_tu, 2, "each tu holds exactly two tuv");
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    assert!(header_ok, "missing TMX header");
    assert_eq!(tus, 9);
    assert_eq!(seg_texts, 18);
    assert_eq!(langs.iter().filter(|l| *l == "en").count(), 9);
    assert_eq!(langs.iter().filter(|l| *l == "ga").count(), 9);
}

#[test]
fn mixed_directory_ingestion_matches_split_directories() {
    let mixed = tempfile::tempdir().unwrap();
    for side in ["en", "ga"] {
        for entry in fs::read_dir(fixtures().join(side)).unwrap() {
            let path = entry.unwrap().path();
            fs::copy(&path, mixed.path().join(path.file_name().unwrap())).unwrap();
        }
    }
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        source_dir: None,
        target_dir: None,
        mixed_dir: Some(mixed.path().to_path_buf()),
        ..toy_config(out.path())
    };
    let manifest = run(&config).unwrap();
    assert_eq!(manifest.documents.source_documents, 3);
    assert_eq!(manifest.documents.target_documents, 3);
    assert_eq!(manifest.cleaning.kept, 9);
    assert_eq!(
        fs::read_to_string(out.path().join("corpus.en")).unwrap(),
        expected("corpus.en")
    );
}

#[test]
fn empty_input_directories_leave_only_a_zeroed_manifest() {
    let src = tempfile::tempdir().unwrap();
    let tgt = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        source_dir: Some(src.path().to_path_buf()),
        target_dir: Some(tgt.path().to_path_buf()),
        ..toy_config(out.path())
    };
    let manifest = run(&config).unwrap();
    assert_eq!(manifest.documents.source_documents, 0);
    assert_eq!(manifest.pairing.pairs, 0);
    assert_eq!(manifest.alignment.beads, 0);
    assert_eq!(manifest.cleaning.kept, 0);
    assert!(manifest.outputs.is_empty());
    let entries: Vec<String> = fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(entries, ["manifest.json"]);
}

#[test]
fn failed_runs_leave_no_partial_corpus_files() {
    let out = tempfile::tempdir().unwrap();
    // Occupy the TSV path with a directory: Moses files are written
    // first, then the TSV write fails, and the cleanup must take the
    // Moses files back out.
    fs::create_dir_all(out.path().join("corpus.tsv")).unwrap();
    let error = run(&toy_config(out.path())).unwrap_err();
    assert_eq!(error.stage, Stage::Write);
    assert!(!out.path().join("corpus.en").exists());
    assert!(!out.path().join("corpus.ga").exists());
    assert!(!out.path().join("manifest.json").exists());
}

#[test]
fn declared_language_mismatch_is_warned_about() {
    let src = tempfile::tempdir().unwrap();
    let tgt = tempfile::tempdir().unwrap();
    // The "English" side actually holds Irish text.
    fs::copy(
        fixtures().join("ga/alerts.ga.txt"),
        src.path().join("x.en.txt"),
    )
    .unwrap();
    fs::copy(
        fixtures().join("ga/alerts.ga.txt"),
        tgt.path().join("x.ga.txt"),
    )
    .unwrap();
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        source_dir: Some(src.path().to_path_buf()),
        target_dir: Some(tgt.path().to_path_buf()),
        ..toy_config(out.path())
    };
    let manifest = run(&config).unwrap();
    assert!(
        manifest
            .warnings
            .iter()
            .any(|w| w.contains("x.en.txt") && w.contains("detected ga")),
        "{:?}",
        manifest.warnings
    );
}

#[test]
fn missing_profiles_directory_fails_in_the_detect_stage() {
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        profiles_dir: Some(PathBuf::from("/nonexistent/profiles")),
        ..toy_config(out.path())
    };
    let error = run(&config).unwrap_err();
    assert_eq!(error.stage, Stage::Detect);
}

#[test]
fn selected_formats_control_the_files_written() {
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        output_formats: vec![OutputFormat::Tsv],
        ..toy_config(out.path())
    };
    let manifest = run(&config).unwrap();
    assert_eq!(manifest.outputs.len(), 1);
    assert_eq!(manifest.outputs[0].file, "corpus.tsv");
    assert!(out.path().join("corpus.tsv").exists());
    assert!(!out.path().join("corpus.en").exists());
    assert!(!out.path().join("corpus.tmx").exists());
}
