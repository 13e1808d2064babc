//! Pipeline configuration: defaults, validation, and the key=value
//! config-file syntax.
//!
//! The defaults reproduce the standard processing constants exactly —
//! ratio bounds 0.75/1.33, three pairing passes, the 40-character
//! detection threshold, 50-line head / 100-line stride file sampling,
//! and the two built-in break patterns. Changing any of them is a
//! deliberate deviation; the full configuration is snapshotted into the
//! run manifest so such deviations are always on record.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clean::MIN_LANGCHECK_CHARS;
use crate::docalign::{BreakPattern, BreakRules, RatioBounds, MAX_ITERATIONS};
use crate::greenreport::{GreenReportError, PowerConfig};
use crate::langdetect::{valid_language_tag, FILE_SAMPLE_HEAD, FILE_SAMPLE_STRIDE};
use crate::normalize::Encoding;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("no input: set source_dir and target_dir, or mixed_dir")]
    MissingInputDirs,
    #[error("conflicting input: mixed_dir excludes source_dir/target_dir")]
    ConflictingInputDirs,
    #[error("invalid language tag {0:?} (expected 2-3 lowercase ASCII letters)")]
    InvalidLanguageTag(String),
    #[error("source and target language are both {0:?}")]
    SameLanguage(String),
    #[error("max_iterations must be 1..={MAX_ITERATIONS}, got {0}")]
    InvalidIterations(u8),
    #[error("file_sample_stride must be at least 1")]
    InvalidStride,
    #[error("ratio bounds must satisfy 0 < min <= max, got {min}..{max}")]
    InvalidBounds { min: f64, max: f64 },
    #[error("at least one output format is required")]
    NoOutputFormats,
    #[error(transparent)]
    Power(#[from] GreenReportError),
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: invalid value for {key:?}: {message}")]
    InvalidValue {
        line: usize,
        key: String,
        message: String,
    },
}

/// Corpus output container formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Two plain-text files, one sentence per line, line i ↔ line i.
    Moses,
    /// One `source<TAB>target` line per pair.
    Tsv,
    /// TMX 1.4 translation memory document.
    Tmx,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 3] = [OutputFormat::Moses, OutputFormat::Tsv, OutputFormat::Tmx];

    pub fn label(self) -> &'static str {
        match self {
            OutputFormat::Moses => "moses",
            OutputFormat::Tsv => "tsv",
            OutputFormat::Tmx => "tmx",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutputFormat::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| format!("unknown format {s:?} (expected moses, tsv, or tmx)"))
    }
}

/// Workflow phase label recorded in the manifest. Presets do not change
/// processing behaviour — they document which phase of a deployment a
/// corpus was built for, so downstream consumers can weigh it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// First hours: ship whatever aligns.
    #[default]
    Rapid,
    /// Days: refreshed data, tightened review.
    Intermediate,
    /// Steady state: curated, domain-adapted corpus building.
    Bespoke,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Rapid, Preset::Intermediate, Preset::Bespoke];

    pub fn label(self) -> &'static str {
        match self {
            Preset::Rapid => "rapid",
            Preset::Intermediate => "intermediate",
            Preset::Bespoke => "bespoke",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| format!("unknown preset {s:?} (expected rapid, intermediate, or bespoke)"))
    }
}

/// Everything a pipeline run needs to know.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Directory of source-language `*.txt` files.
    pub source_dir: Option<PathBuf>,
    /// Directory of target-language `*.txt` files.
    pub target_dir: Option<PathBuf>,
    /// Single directory holding both sides, distinguished by language
    /// markers in file names (`notice.en.txt` / `notice.ga.txt`).
    pub mixed_dir: Option<PathBuf>,
    pub source_lang: String,
    pub target_lang: String,
    /// Language-profile directory; `None` falls back to the
    /// `CRISIS_CORPUS_PROFILES` environment variable, then `./profiles`.
    pub profiles_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub output_formats: Vec<OutputFormat>,
    /// Input byte encoding; byte-order marks override it per file.
    pub encoding: Encoding,
    pub ratio_bounds: RatioBounds,
    /// Document-pairing passes to run (1..=3).
    pub max_iterations: u8,
    /// Sides shorter than this skip the cleaning language check.
    pub min_langdetect_chars: usize,
    /// Leading lines sampled for whole-file language detection.
    pub file_sample_head: usize,
    /// Every `stride`-th line is sampled beyond the head.
    pub file_sample_stride: usize,
    pub break_patterns: Vec<BreakPattern>,
    /// File-name language marker on the source side; the source language
    /// tag when `None`.
    pub source_marker: Option<String>,
    /// Same for the target side.
    pub target_marker: Option<String>,
    /// Use the stricter letters-only reading of the non-alphabetical
    /// cleaning rule.
    pub strict_nonalpha: bool,
    /// Permit 2-2 beads during sentence alignment.
    pub allow_two_two: bool,
    pub power: PowerConfig,
    /// Custom carbon-intensity table; the bundled table when `None`.
    pub intensity_path: Option<PathBuf>,
    pub preset: Preset,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            source_dir: None,
            target_dir: None,
            mixed_dir: None,
            source_lang: "en".to_owned(),
            target_lang: "ga".to_owned(),
            profiles_dir: None,
            output_dir: PathBuf::from("out"),
            output_formats: OutputFormat::ALL.to_vec(),
            encoding: Encoding::default(),
            ratio_bounds: RatioBounds::default(),
            max_iterations: MAX_ITERATIONS,
            min_langdetect_chars: MIN_LANGCHECK_CHARS,
            file_sample_head: FILE_SAMPLE_HEAD,
            file_sample_stride: FILE_SAMPLE_STRIDE,
            break_patterns: BreakRules::default().patterns,
            source_marker: None,
            target_marker: None,
            strict_nonalpha: false,
            allow_two_two: true,
            power: PowerConfig::default(),
            intensity_path: None,
            preset: Preset::default(),
        }
    }
}

impl PipelineConfig {
    /// Checks the configuration for contradictions; called by `run`.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match (&self.mixed_dir, &self.source_dir, &self.target_dir) {
            (Some(_), None, None) => {}
            (None, Some(_), Some(_)) => {}
            (Some(_), _, _) => return Err(ConfigError::ConflictingInputDirs),
            _ => return Err(ConfigError::MissingInputDirs),
        }
        for lang in [&self.source_lang, &self.target_lang] {
            if !valid_language_tag(lang) {
                return Err(ConfigError::InvalidLanguageTag(lang.clone()));
            }
        }
        if self.source_lang == self.target_lang {
            return Err(ConfigError::SameLanguage(self.source_lang.clone()));
        }
        if !(1..=MAX_ITERATIONS).contains(&self.max_iterations) {
            return Err(ConfigError::InvalidIterations(self.max_iterations));
        }
        if self.file_sample_stride == 0 {
            return Err(ConfigError::InvalidStride);
        }
        let RatioBounds { min, max } = self.ratio_bounds;
        if !(min > 0.0 && max >= min && max.is_finite()) {
            return Err(ConfigError::InvalidBounds { min, max });
        }
        if self.output_formats.is_empty() {
            return Err(ConfigError::NoOutputFormats);
        }
        self.power.validate()?;
        Ok(())
    }

    /// Break patterns as rules for the pairing stage.
    pub fn break_rules(&self) -> BreakRules {
        BreakRules::new(self.break_patterns.clone())
    }

    /// Parses a config file into defaults + overrides.
    pub fn from_config_text(text: &str) -> Result<PipelineConfig, ConfigError> {
        let mut config = PipelineConfig::default();
        config.apply_config_text(text)?;
        Ok(config)
    }

    /// Applies `key = value` lines to this configuration.
    ///
    /// Blank lines and `#` comments are ignored. `format` and
    /// `break_pattern` are repeatable; their first occurrence clears the
    /// inherited list, later ones append. All other keys assign.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut formats_reset = false;
        let mut patterns_reset = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected key = value, got {trimmed:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let invalid = |message: String| ConfigError::InvalidValue {
                line,
                key: key.to_owned(),
                message,
            };
            match key {
                "source_dir" => self.source_dir = Some(PathBuf::from(value)),
                "target_dir" => self.target_dir = Some(PathBuf::from(value)),
                "mixed_dir" => self.mixed_dir = Some(PathBuf::from(value)),
                "source_lang" => self.source_lang = value.to_owned(),
                "target_lang" => self.target_lang = value.to_owned(),
                "profiles_dir" => self.profiles_dir = Some(PathBuf::from(value)),
                "output_dir" => self.output_dir = PathBuf::from(value),
                "format" => {
                    if !formats_reset {
                        self.output_formats.clear();
                        formats_reset = true;
                    }
                    self.output_formats
                        .push(value.parse::<OutputFormat>().map_err(invalid)?);
                }
                "encoding" => self.encoding = value.parse().map_err(invalid)?,
                "ratio_min" => self.ratio_bounds.min = parse_num(value).map_err(invalid)?,
                "ratio_max" => self.ratio_bounds.max = parse_num(value).map_err(invalid)?,
                "max_iterations" => self.max_iterations = parse_num(value).map_err(invalid)?,
                "min_langdetect_chars" => {
                    self.min_langdetect_chars = parse_num(value).map_err(invalid)?;
                }
                "file_sample_head" => self.file_sample_head = parse_num(value).map_err(invalid)?,
                "file_sample_stride" => {
                    self.file_sample_stride = parse_num(value).map_err(invalid)?;
                }
                "break_pattern" => {
                    if !patterns_reset {
                        self.break_patterns.clear();
                        patterns_reset = true;
                    }
                    let pattern = value
                        .parse::<BreakPattern>()
                        .map_err(|e| invalid(e.to_string()))?;
                    self.break_patterns.push(pattern);
                }
                "source_marker" => self.source_marker = Some(value.to_owned()),
                "target_marker" => self.target_marker = Some(value.to_owned()),
                "strict_nonalpha" => self.strict_nonalpha = parse_bool(value).map_err(invalid)?,
                "allow_two_two" => self.allow_two_two = parse_bool(value).map_err(invalid)?,
                "device_power_watts" => {
                    self.power.device_power_watts = parse_num(value).map_err(invalid)?;
                }
                "pue" => self.power.pue = parse_num(value).map_err(invalid)?,
                "region" => self.power.region = value.to_owned(),
                "time_band" => {
                    self.power.time_of_day_band = value.parse().map_err(invalid)?;
                }
                "intensity_file" => self.intensity_path = Some(PathBuf::from(value)),
                "preset" => self.preset = value.parse().map_err(invalid)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_owned(),
                    })
                }
            }
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| e.to_string())
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got {value:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn runnable() -> PipelineConfig {
        PipelineConfig {
            source_dir: Some(PathBuf::from("src")),
            target_dir: Some(PathBuf::from("tgt")),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn defaults_carry_the_documented_constants() {
        let config = PipelineConfig::default();
        assert_eq!(config.ratio_bounds.min, 0.75);
        assert_eq!(config.ratio_bounds.max, 1.33);
        assert_eq!(config.max_iterations, 3);
        assert_eq!(config.min_langdetect_chars, 40);
        assert_eq!(config.file_sample_head, 50);
        assert_eq!(config.file_sample_stride, 100);
        assert_eq!(
            config.break_patterns,
            [BreakPattern::LetterParen, BreakPattern::NumberDot]
        );
        assert_eq!(config.output_formats, OutputFormat::ALL);
        assert_eq!(config.preset, Preset::Rapid);
    }

    #[test]
    fn validation_requires_exactly_one_input_layout() {
        assert!(matches!(
            PipelineConfig::default().validate(),
            Err(ConfigError::MissingInputDirs)
        ));
        let mut both = runnable();
        both.mixed_dir = Some(PathBuf::from("mixed"));
        assert!(matches!(
            both.validate(),
            Err(ConfigError::ConflictingInputDirs)
        ));
        let mut mixed_only = PipelineConfig::default();
        mixed_only.mixed_dir = Some(PathBuf::from("mixed"));
        assert!(mixed_only.validate().is_ok());
        assert!(runnable().validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_settings() {
        let mut c = runnable();
        c.source_lang = "English".to_owned();
        assert!(matches!(c.validate(), Err(ConfigError::InvalidLanguageTag(_))));

        let mut c = runnable();
        c.target_lang = "en".to_owned();
        assert!(matches!(c.validate(), Err(ConfigError::SameLanguage(_))));

        for bad in [0, 4] {
            let mut c = runnable();
            c.max_iterations = bad;
            assert!(matches!(c.validate(), Err(ConfigError::InvalidIterations(b)) if b == bad));
        }

        let mut c = runnable();
        c.file_sample_stride = 0;
        assert!(matches!(c.validate(), Err(ConfigError::InvalidStride)));

        let mut c = runnable();
        c.ratio_bounds = RatioBounds { min: 1.5, max: 0.5 };
        assert!(matches!(c.validate(), Err(ConfigError::InvalidBounds { .. })));

        let mut c = runnable();
        c.output_formats.clear();
        assert!(matches!(c.validate(), Err(ConfigError::NoOutputFormats)));

        let mut c = runnable();
        c.power.pue = 0.5;
        assert!(matches!(c.validate(), Err(ConfigError::Power(_))));
    }

    #[test]
    fn config_text_overrides_defaults() {
        let text = "\
# toy corpus build
source_dir = data/en
target_dir = data/ga
source_lang = en
target_lang = ga
output_dir = build/out
format = tsv
format = tmx
ratio_min = 0.5
ratio_max = 2.0
max_iterations = 2
break_pattern = number-dot
break_pattern = regex:[ivx]+\\)
strict_nonalpha = true
allow_two_two = false
device_power_watts = 250
pue = 1.5
region = france
time_band = night
preset = bespoke
";
        let config = PipelineConfig::from_config_text(text).unwrap();
        assert_eq!(config.source_dir.as_deref(), Some(std::path::Path::new("data/en")));
        assert_eq!(config.output_dir, PathBuf::from("build/out"));
        assert_eq!(config.output_formats, [OutputFormat::Tsv, OutputFormat::Tmx]);
        assert_eq!(config.ratio_bounds, RatioBounds { min: 0.5, max: 2.0 });
        assert_eq!(config.max_iterations, 2);
        assert_eq!(config.break_patterns.len(), 2);
        assert_eq!(config.break_patterns[1].to_string(), "regex:[ivx]+\\)");
        assert!(config.strict_nonalpha);
        assert!(!config.allow_two_two);
        assert_eq!(config.power.device_power_watts, 250.0);
        assert_eq!(config.power.region, "france");
        assert_eq!(config.preset, Preset::Bespoke);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn config_text_reports_line_numbers() {
        let err = PipelineConfig::from_config_text("source_dir = x\nnot a setting\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));

        let err = PipelineConfig::from_config_text("\n\nmystery = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 3, key } if key == "mystery"));

        let err = PipelineConfig::from_config_text("max_iterations = many\n").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { line: 1, .. }));

        let err = PipelineConfig::from_config_text("format = parquet\n").unwrap_err();
        assert!(matches!(err, ConfigError::InvalidValue { line: 1, .. }));
    }

    #[test]
    fn config_survives_a_serde_round_trip() {
        let mut config = runnable();
        config.break_patterns.push(BreakPattern::custom("[ivx]+\\)").unwrap());
        config.intensity_path = Some(PathBuf::from("grid.json"));
        let json = serde_json::to_string(&config).unwrap();
        let back: PipelineConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn labels_round_trip() {
        for format in OutputFormat::ALL {
            assert_eq!(format.label().parse::<OutputFormat>().unwrap(), format);
        }
        for preset in Preset::ALL {
            assert_eq!(preset.label().parse::<Preset>().unwrap(), preset);
        }
        assert!("csv".parse::<OutputFormat>().is_err());
        assert!("slow".parse::<Preset>().is_err());
    }
}
