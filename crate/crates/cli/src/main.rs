//! Command-line front end for the crisis-corpus library.
//!
//! `run` drives the whole pipeline; the other subcommands expose its
//! stages individually so intermediate results can be inspected or
//! piped. Errors go to stderr tagged with the stage (or subcommand)
//! that produced them, and the process exits nonzero.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use crisis_corpus::clean::{clean_pairs_with, CleanOptions, NonAlphaRule};
use crisis_corpus::docalign::{pair_documents_with, PairingOptions, PairingOutcome};
use crisis_corpus::document::Document;
use crisis_corpus::greenreport::{
    estimate_emissions, IntensityTable, PowerConfig, TimeBand, GREEN_ADVISORY,
};
use crisis_corpus::langdetect::{detect_file_language, ProfileSet};
use crisis_corpus::normalize::{normalize_text, Encoding, RawText};
use crisis_corpus::pipeline::formats::{read_tsv_str, write_tsv};
use crisis_corpus::pipeline::{
    collect_text_files, load_documents, load_mixed_documents, resolve_profiles_dir, run,
    OutputFormat, PipelineConfig, PipelineError, Preset,
};
use crisis_corpus::sentalign::{align_documents, flatten, AlignOptions};

#[derive(Parser)]
#[command(
    name = "crisis-corpus",
    version,
    about = "Builds cleaned, sentence-aligned parallel corpora from raw bilingual text",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize text files into a mirror directory
    Normalize(NormalizeArgs),
    /// Identify the language of each text file in a directory
    Detect(DetectArgs),
    /// Pair source documents with their target-language counterparts
    Pair(PairArgs),
    /// Sentence-align paired documents and print tab-separated pairs
    Align(AlignArgs),
    /// Filter a file of tab-separated sentence pairs
    Clean(CleanArgs),
    /// Run the whole pipeline and write corpus files plus a manifest
    Run(RunArgs),
    /// Estimate energy use and emissions for a given run duration
    Report(ReportArgs),
}

// `FromStr` for these types reports errors as plain strings, so clap
// needs explicit parser functions rather than the value_parser! macro.
fn parse_encoding(s: &str) -> Result<Encoding, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn parse_band(s: &str) -> Result<TimeBand, String> {
    s.parse()
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

/// Input selection shared by `pair`, `align`, and `run`.
#[derive(Args)]
struct CorpusInput {
    /// Directory of source-language text files
    #[arg(long = "src-dir", value_name = "DIR")]
    src_dir: Option<PathBuf>,
    /// Directory of target-language text files
    #[arg(long = "tgt-dir", value_name = "DIR")]
    tgt_dir: Option<PathBuf>,
    /// One directory holding both sides, split by filename markers
    #[arg(long = "mixed-dir", value_name = "DIR")]
    mixed_dir: Option<PathBuf>,
    /// Source language tag, e.g. en
    #[arg(long = "src-lang", value_name = "TAG")]
    src_lang: Option<String>,
    /// Target language tag, e.g. ga
    #[arg(long = "tgt-lang", value_name = "TAG")]
    tgt_lang: Option<String>,
    /// Input encoding: utf-8, utf-16le, or utf-16be
    #[arg(long, value_name = "NAME", value_parser = parse_encoding)]
    encoding: Option<Encoding>,
    /// Settings file applied before command-line flags
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl CorpusInput {
    /// Defaults, then the config file, then explicit flags.
    fn to_config(&self) -> Result<PipelineConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                PipelineConfig::from_config_text(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        if let Some(dir) = &self.src_dir {
            config.source_dir = Some(dir.clone());
        }
        if let Some(dir) = &self.tgt_dir {
            config.target_dir = Some(dir.clone());
        }
        if let Some(dir) = &self.mixed_dir {
            config.mixed_dir = Some(dir.clone());
        }
        if let Some(lang) = &self.src_lang {
            config.source_lang = lang.clone();
        }
        if let Some(lang) = &self.tgt_lang {
            config.target_lang = lang.clone();
        }
        if let Some(encoding) = self.encoding {
            config.encoding = encoding;
        }
        Ok(config)
    }
}

/// Loads both document sides according to the configured input layout.
fn load_sides(config: &PipelineConfig) -> Result<(Vec<Document>, Vec<Document>)> {
    if let Some(mixed) = &config.mixed_dir {
        let mut warnings = Vec::new();
        let sides = load_mixed_documents(mixed, config, &mut warnings)?;
        for warning in warnings {
            eprintln!("warning: {warning}");
        }
        Ok(sides)
    } else {
        let src = config
            .source_dir
            .as_ref()
            .ok_or_else(|| anyhow!("--src-dir and --tgt-dir (or --mixed-dir) are required"))?;
        let tgt = config
            .target_dir
            .as_ref()
            .ok_or_else(|| anyhow!("--tgt-dir is required alongside --src-dir"))?;
        Ok((
            load_documents(src, &config.source_lang, config.encoding)?,
            load_documents(tgt, &config.target_lang, config.encoding)?,
        ))
    }
}

fn pair_sides(config: &PipelineConfig) -> Result<PairingOutcome> {
    let (sources, targets) = load_sides(config)?;
    let options = PairingOptions {
        bounds: config.ratio_bounds,
        max_iterations: config.max_iterations,
        rules: config.break_rules(),
        source_marker: config.source_marker.clone(),
        target_marker: config.target_marker.clone(),
    };
    Ok(pair_documents_with(sources, targets, &options)?)
}

fn load_profiles(explicit: Option<&Path>) -> Result<ProfileSet> {
    let config = PipelineConfig {
        profiles_dir: explicit.map(Path::to_path_buf),
        ..PipelineConfig::default()
    };
    let dir = resolve_profiles_dir(&config);
    ProfileSet::load_dir(&dir).with_context(|| format!("loading profiles from {}", dir.display()))
}

#[derive(Args)]
struct NormalizeArgs {
    /// Directory of text files to normalize
    #[arg(long = "src-dir", value_name = "DIR")]
    src_dir: PathBuf,
    /// Directory to write normalized copies into
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Input encoding: utf-8, utf-16le, or utf-16be
    #[arg(long, value_name = "NAME", value_parser = parse_encoding)]
    encoding: Option<Encoding>,
}

fn normalize_cmd(args: &NormalizeArgs) -> Result<()> {
    let encoding = args.encoding.unwrap_or(Encoding::Utf8);
    let files = collect_text_files(&args.src_dir)?;
    for (id, path) in &files {
        let raw = RawText::read(path, encoding)
            .with_context(|| format!("reading {}", path.display()))?
            .with_context(|| format!("decoding {}", path.display()))?;
        let normalized = normalize_text(&raw.content);
        let dest = args.out.join(id);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        let mut content = normalized.content;
        if !content.is_empty() && !content.ends_with('\n') {
            content.push('\n');
        }
        fs::write(&dest, content).with_context(|| format!("writing {}", dest.display()))?;
        println!("normalized {id} ({} lines)", normalized.line_count);
    }
    eprintln!("{} files normalized into {}", files.len(), args.out.display());
    Ok(())
}

#[derive(Args)]
struct DetectArgs {
    /// Directory of text files to identify
    #[arg(long = "src-dir", value_name = "DIR")]
    src_dir: PathBuf,
    /// Directory of language profiles (default: $CRISIS_CORPUS_PROFILES, then ./profiles)
    #[arg(long, value_name = "DIR")]
    profiles: Option<PathBuf>,
    /// Input encoding: utf-8, utf-16le, or utf-16be
    #[arg(long, value_name = "NAME", value_parser = parse_encoding)]
    encoding: Option<Encoding>,
}

fn detect_cmd(args: &DetectArgs) -> Result<()> {
    let profiles = load_profiles(args.profiles.as_deref())?;
    let documents = load_documents(
        &args.src_dir,
        "und",
        args.encoding.unwrap_or(Encoding::Utf8),
    )?;
    for doc in &documents {
        if doc.segments.is_empty() {
            println!("{}\t-\tempty", doc.id);
            continue;
        }
        let detection = detect_file_language(doc, &profiles)?;
        println!(
            "{}\t{}\t{:.2}",
            doc.id, detection.language, detection.confidence
        );
    }
    Ok(())
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    input: CorpusInput,
}

fn pair_cmd(args: &PairArgs) -> Result<()> {
    let outcome = pair_sides(&args.input.to_config()?)?;
    for pair in &outcome.pairs {
        println!(
            "{}\t{}\t{:.4}\t{}",
            pair.source.id, pair.target.id, pair.ratio, pair.accepted_iteration
        );
    }
    for unpaired in &outcome.unpaired {
        eprintln!(
            "unpaired: {} ({})",
            unpaired.document.id, unpaired.document.language
        );
    }
    eprintln!(
        "{} pairs, {} unpaired",
        outcome.pairs.len(),
        outcome.unpaired.len()
    );
    Ok(())
}

#[derive(Args)]
struct AlignArgs {
    #[command(flatten)]
    input: CorpusInput,
    /// Disable 2-2 alignment beads
    #[arg(long = "no-two-two")]
    no_two_two: bool,
}

fn align_cmd(args: &AlignArgs) -> Result<()> {
    let mut config = args.input.to_config()?;
    if args.no_two_two {
        config.allow_two_two = false;
    }
    let outcome = pair_sides(&config)?;
    let options = AlignOptions {
        allow_two_two: config.allow_two_two,
    };
    let mut beads = 0;
    let mut printed = 0;
    let mut dropped = 0;
    for pair in &outcome.pairs {
        let alignment = align_documents(&pair.source, &pair.target, &options)?;
        let flat = flatten(&alignment);
        beads += alignment.beads.len();
        dropped += flat.dropped;
        for (source, target) in &flat.pairs {
            println!("{source}\t{target}");
            printed += 1;
        }
    }
    eprintln!(
        "{} document pairs, {beads} beads, {printed} sentence pairs, {dropped} dropped",
        outcome.pairs.len()
    );
    Ok(())
}

#[derive(Args)]
struct CleanArgs {
    /// File of tab-separated sentence pairs (source TAB target per line)
    #[arg(value_name = "FILE")]
    input: PathBuf,
    /// Expected source language tag
    #[arg(long = "src-lang", value_name = "TAG", default_value = "en")]
    src_lang: String,
    /// Expected target language tag
    #[arg(long = "tgt-lang", value_name = "TAG", default_value = "ga")]
    tgt_lang: String,
    /// Directory of language profiles (default: $CRISIS_CORPUS_PROFILES, then ./profiles)
    #[arg(long, value_name = "DIR")]
    profiles: Option<PathBuf>,
    /// Write surviving pairs here instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Remove pairs with an entirely alphabetic side (the literal
    /// reading) instead of requiring each side to contain a letter
    #[arg(long = "strict-6b")]
    strict_6b: bool,
}

fn clean_cmd(args: &CleanArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let pairs = read_tsv_str(&text, &args.src_lang, &args.tgt_lang);
    let total = pairs.len();
    let profiles = load_profiles(args.profiles.as_deref())?;
    let options = CleanOptions {
        nonalpha: if args.strict_6b {
            NonAlphaRule::LettersOnly
        } else {
            NonAlphaRule::RequireLetters
        },
        ..CleanOptions::default()
    };
    let (kept, report) = clean_pairs_with(pairs, &profiles, &options)?;
    match &args.out {
        Some(path) => {
            write_tsv(&kept, path).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            for pair in &kept {
                println!("{}\t{}", pair.source_text, pair.target_text);
            }
        }
    }
    eprintln!(
        "kept {} of {total} pairs ({} empty, {} non-alphabetic, {} wrong-language removed; \
         {} short sides skipped)",
        report.kept,
        report.removed_empty,
        report.removed_nonalpha,
        report.removed_wrong_language,
        report.skipped_langcheck_short
    );
    Ok(())
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: CorpusInput,
    /// Directory of language profiles (default: $CRISIS_CORPUS_PROFILES, then ./profiles)
    #[arg(long, value_name = "DIR")]
    profiles: Option<PathBuf>,
    /// Output directory for corpus files and the manifest
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format, repeatable: moses, tsv, tmx (default: all three)
    #[arg(long = "format", value_name = "FORMAT", value_parser = parse_format)]
    formats: Vec<OutputFormat>,
    /// Remove pairs with an entirely alphabetic side (the literal
    /// reading) instead of requiring each side to contain a letter
    #[arg(long = "strict-6b")]
    strict_6b: bool,
    /// Disable 2-2 alignment beads
    #[arg(long = "no-two-two")]
    no_two_two: bool,
    /// Grid region for the emissions estimate
    #[arg(long, value_name = "NAME")]
    region: Option<String>,
    /// Device power draw in watts
    #[arg(long = "power-watts", value_name = "WATTS")]
    power_watts: Option<f64>,
    /// Power usage effectiveness multiplier of the facility
    #[arg(long, value_name = "FACTOR")]
    pue: Option<f64>,
    /// Time-of-day band for grid intensity: day, night, or flat
    #[arg(long, value_name = "BAND", value_parser = parse_band)]
    band: Option<TimeBand>,
    /// Grid-intensity table (JSON) replacing the built-in values
    #[arg(long, value_name = "FILE")]
    intensity: Option<PathBuf>,
    /// Workflow label recorded in the manifest: rapid, intermediate, or bespoke
    #[arg(long, value_name = "NAME", value_parser = parse_preset)]
    preset: Option<Preset>,
}

fn run_cmd(args: &RunArgs) -> Result<()> {
    let mut config = args.input.to_config()?;
    if let Some(dir) = &args.profiles {
        config.profiles_dir = Some(dir.clone());
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if !args.formats.is_empty() {
        let mut formats = Vec::new();
        for format in &args.formats {
            if !formats.contains(format) {
                formats.push(*format);
            }
        }
        config.output_formats = formats;
    }
    if args.strict_6b {
        config.strict_nonalpha = true;
    }
    if args.no_two_two {
        config.allow_two_two = false;
    }
    if let Some(region) = &args.region {
        config.power.region = region.clone();
    }
    if let Some(watts) = args.power_watts {
        config.power.device_power_watts = watts;
    }
    if let Some(pue) = args.pue {
        config.power.pue = pue;
    }
    if let Some(band) = args.band {
        config.power.time_of_day_band = band;
    }
    if let Some(path) = &args.intensity {
        config.intensity_path = Some(path.clone());
    }
    if let Some(preset) = args.preset {
        config.preset = preset;
    }

    let manifest = run(&config)?;
    for warning in &manifest.warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "{} source / {} target documents, {} document pairs, {} beads, {} sentence pairs kept",
        manifest.documents.source_documents,
        manifest.documents.target_documents,
        manifest.pairing.pairs,
        manifest.alignment.beads,
        manifest.cleaning.kept
    );
    for output in &manifest.outputs {
        println!("wrote {}", config.output_dir.join(&output.file).display());
    }
    println!("wrote {}", config.output_dir.join("manifest.json").display());
    println!();
    println!("{}", manifest.green.to_text());
    println!();
    println!("{GREEN_ADVISORY}");
    Ok(())
}

#[derive(Args)]
struct ReportArgs {
    /// Run duration in seconds
    #[arg(long = "duration-seconds", value_name = "SECONDS")]
    duration_seconds: f64,
    /// Device power draw in watts
    #[arg(long = "power-watts", value_name = "WATTS", default_value_t = 100.0)]
    power_watts: f64,
    /// Power usage effectiveness multiplier of the facility
    #[arg(long, value_name = "FACTOR", default_value_t = 1.0)]
    pue: f64,
    /// Grid region for the emissions estimate
    #[arg(long, value_name = "NAME", default_value = "ireland")]
    region: String,
    /// Time-of-day band for grid intensity: day, night, or flat
    #[arg(long, value_name = "BAND", value_parser = parse_band)]
    band: Option<TimeBand>,
    /// Grid-intensity table (JSON) replacing the built-in values
    #[arg(long, value_name = "FILE")]
    intensity: Option<PathBuf>,
}

fn report_cmd(args: &ReportArgs) -> Result<()> {
    let table = match &args.intensity {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            IntensityTable::from_json(&text)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => IntensityTable::builtin(),
    };
    let config = PowerConfig::new(
        args.power_watts,
        args.pue,
        args.region.clone(),
        args.band.unwrap_or_default(),
    );
    let report = estimate_emissions(args.duration_seconds, &config, &table)?;
    println!("{}", report.to_text());
    println!();
    println!("{GREEN_ADVISORY}");
    Ok(())
}

fn main() -> ExitCode {
    // Die quietly when the reader closes the pipe, like other
    // line-oriented tools: `crisis-corpus align ... | head` must not
    // panic on the leftover lines.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    let (name, result) = match &cli.command {
        Command::Normalize(args) => ("normalize", normalize_cmd(args)),
        Command::Detect(args) => ("detect", detect_cmd(args)),
        Command::Pair(args) => ("pair", pair_cmd(args)),
        Command::Align(args) => ("align", align_cmd(args)),
        Command::Clean(args) => ("clean", clean_cmd(args)),
        Command::Run(args) => ("run", run_cmd(args)),
        Command::Report(args) => ("report", report_cmd(args)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            // Pipeline errors already carry their own stage tag.
            if let Some(pipeline_error) = error.downcast_ref::<PipelineError>() {
                eprintln!("error: {pipeline_error}");
            } else {
                eprintln!("error: [{name}] {error:#}");
            }
            ExitCode::FAILURE
        }
    }
}
