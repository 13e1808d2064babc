//! Energy and emissions estimates for pipeline runs.
//!
//! Processing text costs electricity, and where and when a job runs
//! changes its carbon footprint far more than most code-level tweaks do.
//! This module makes that visible with the simplest auditable model:
//!
//! ```text
//! energy_kwh     = device_power_watts × duration_seconds / 3.6e6 × PUE
//! emissions_kg   = energy_kwh × grid_intensity_g_per_kwh / 1000
//! ```
//!
//! Grid intensity comes from an editable JSON table keyed by region, with
//! separate day/night/flat bands so the time-of-day effect is visible in
//! the numbers. The bundled table carries a handful of illustrative
//! regions; treat the values as configuration to be replaced with current
//! data, not as authoritative measurements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Joules per kilowatt-hour (3.6e6): the only unit constant in the model.
pub const JOULES_PER_KWH: f64 = 3_600_000.0;

/// Informational note printed alongside reports. Non-normative: it makes
/// no compliance claims and the numbers it accompanies are estimates.
pub const GREEN_ADVISORY: &str = "\
Advisory (informational, not a compliance statement): emission estimates\n\
depend on nameplate power, PUE, and the configured grid-intensity table.\n\
Scheduling heavy jobs in low-intensity regions or overnight bands, and\n\
right-sizing hardware to the job, usually reduces emissions more than\n\
code-level tuning. Replace the bundled intensity values with current data\n\
from your energy provider before drawing conclusions.";

#[derive(Debug, Error)]
pub enum GreenReportError {
    #[error("invalid power config: device power {watts} W, PUE {pue} (need power > 0 and PUE >= 1)")]
    InvalidPowerConfig { watts: f64, pue: f64 },
    #[error("negative run duration {seconds} s")]
    NegativeDuration { seconds: f64 },
    #[error("no carbon intensity for region {region:?} in band {band:?}")]
    UnknownRegion { region: String, band: TimeBand },
    #[error("monotonic clock ran backwards between start and stop")]
    ClockError,
}

/// Time-of-day band a run is billed against in the intensity table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeBand {
    Day,
    Night,
    /// Time-independent average.
    #[default]
    Flat,
}

impl TimeBand {
    pub const ALL: [TimeBand; 3] = [TimeBand::Day, TimeBand::Night, TimeBand::Flat];

    pub fn label(self) -> &'static str {
        match self {
            TimeBand::Day => "day",
            TimeBand::Night => "night",
            TimeBand::Flat => "flat",
        }
    }
}

impl fmt::Display for TimeBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TimeBand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimeBand::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| format!("unknown time band {s:?} (expected day, night, or flat)"))
    }
}

/// Power draw and siting of the hardware a run executes on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Nameplate draw of the device, in watts.
    pub device_power_watts: f64,
    /// Facility overhead multiplier; 1.0 means no overhead.
    pub pue: f64,
    /// Key into the intensity table.
    pub region: String,
    pub time_of_day_band: TimeBand,
}

impl PowerConfig {
    pub fn new(device_power_watts: f64, pue: f64, region: impl Into<String>, band: TimeBand) -> Self {
        PowerConfig {
            device_power_watts,
            pue,
            region: region.into(),
            time_of_day_band: band,
        }
    }

    /// Rejects non-positive power and PUE below 1 (a facility cannot
    /// deliver more energy to the device than it draws from the grid).
    pub fn validate(&self) -> Result<(), GreenReportError> {
        if self.device_power_watts > 0.0 && self.pue >= 1.0 {
            Ok(())
        } else {
            Err(GreenReportError::InvalidPowerConfig {
                watts: self.device_power_watts,
                pue: self.pue,
            })
        }
    }
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig::new(100.0, 1.0, "ireland", TimeBand::Flat)
    }
}

/// Per-band grid intensity of one region, in gCO₂ per kWh. Bands a table
/// does not provide are absent rather than zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionIntensity {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub night: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat: Option<f64>,
}

impl RegionIntensity {
    pub fn for_band(&self, band: TimeBand) -> Option<f64> {
        match band {
            TimeBand::Day => self.day,
            TimeBand::Night => self.night,
            TimeBand::Flat => self.flat,
        }
    }
}

/// Region → per-band intensity map, as loaded from a JSON file of the
/// form `{"<region>": {"day": g, "night": g, "flat": g}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntensityTable(pub BTreeMap<String, RegionIntensity>);

impl IntensityTable {
    /// The intensity table bundled with the crate (illustrative values).
    pub fn builtin() -> IntensityTable {
        serde_json::from_str(include_str!("../data/intensity.json"))
            .expect("bundled intensity table parses")
    }

    pub fn from_json(json: &str) -> Result<IntensityTable, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn get(&self, region: &str) -> Option<&RegionIntensity> {
        self.0.get(region)
    }

    /// Intensity for a region and band, or [`GreenReportError::UnknownRegion`]
    /// when either level is missing.
    pub fn intensity(&self, region: &str, band: TimeBand) -> Result<f64, GreenReportError> {
        self.0
            .get(region)
            .and_then(|r| r.for_band(band))
            .ok_or_else(|| GreenReportError::UnknownRegion {
                region: region.to_owned(),
                band,
            })
    }
}

/// The estimate for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GreenReport {
    pub duration_seconds: f64,
    pub energy_kwh: f64,
    pub intensity_g_per_kwh: f64,
    pub emissions_kgco2: f64,
}

impl GreenReport {
    /// Human-readable rendering for terminal output.
    pub fn to_text(&self) -> String {
        format!(
            "green report\n  duration:  {:.3} s\n  energy:    {:.6} kWh\n  intensity: {:.1} gCO2/kWh\n  emissions: {:.6} kgCO2",
            self.duration_seconds, self.energy_kwh, self.intensity_g_per_kwh, self.emissions_kgco2
        )
    }
}

/// Computes the green report for a run of `duration_seconds`.
pub fn estimate_emissions(
    duration_seconds: f64,
    config: &PowerConfig,
    table: &IntensityTable,
) -> Result<GreenReport, GreenReportError> {
    config.validate()?;
    // `>= 0.0` is false for NaN, so non-numbers are rejected here too.
    if !(duration_seconds >= 0.0) {
        return Err(GreenReportError::NegativeDuration {
            seconds: duration_seconds,
        });
    }
    let intensity = table.intensity(&config.region, config.time_of_day_band)?;
    let energy_kwh = config.device_power_watts * duration_seconds / JOULES_PER_KWH * config.pue;
    let emissions_kgco2 = energy_kwh * intensity / 1000.0;
    Ok(GreenReport {
        duration_seconds,
        energy_kwh,
        intensity_g_per_kwh: intensity,
        emissions_kgco2,
    })
}

/// Wall-clock tracker for a pipeline run, backed by the monotonic clock.
#[derive(Debug, Clone, Copy)]
pub struct Tracker {
    started: Instant,
}

impl Tracker {
    pub fn start() -> Tracker {
        Tracker {
            started: Instant::now(),
        }
    }

    /// Seconds elapsed since [`Tracker::start`]; never negative.
    pub fn elapsed_seconds(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}

/// Seconds between two instants, or [`GreenReportError::ClockError`] when
/// `stop` precedes `start`.
pub fn duration_between(start: Instant, stop: Instant) -> Result<f64, GreenReportError> {
    stop.checked_duration_since(start)
        .map(|d| d.as_secs_f64())
        .ok_or(GreenReportError::ClockError)
}

/// Runs `work` and returns its result with the measured duration in
/// seconds.
pub fn track<T>(work: impl FnOnce() -> T) -> (T, f64) {
    let tracker = Tracker::start();
    let result = work();
    (result, tracker.elapsed_seconds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_rel(actual: f64, expected: f64) {
        let tol = 1e-9 * expected.abs().max(1e-12);
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual}"
        );
    }

    fn table_with(region: &str, value: f64) -> IntensityTable {
        let mut table = IntensityTable::default();
        table.0.insert(
            region.to_owned(),
            RegionIntensity {
                day: Some(value),
                night: Some(value),
                flat: Some(value),
            },
        );
        table
    }

    #[test]
    fn two_hours_at_hundred_watts() {
        let config = PowerConfig::new(100.0, 1.0, "r", TimeBand::Flat);
        let report = estimate_emissions(7200.0, &config, &table_with("r", 500.0)).unwrap();
        assert_rel(report.energy_kwh, 0.2);
        assert_rel(report.emissions_kgco2, 0.1);
    }

    #[test]
    fn zero_duration_is_all_zeroes() {
        let config = PowerConfig::new(100.0, 1.0, "r", TimeBand::Flat);
        let report = estimate_emissions(0.0, &config, &table_with("r", 500.0)).unwrap();
        assert_eq!(report.energy_kwh, 0.0);
        assert_eq!(report.emissions_kgco2, 0.0);
    }

    #[test]
    fn pue_scales_the_energy() {
        let config = PowerConfig::new(250.0, 1.5, "r", TimeBand::Flat);
        let report = estimate_emissions(3600.0, &config, &table_with("r", 300.0)).unwrap();
        assert_rel(report.energy_kwh, 0.375);
        assert_rel(report.emissions_kgco2, 0.1125);
    }

    #[test]
    fn negative_and_nan_durations_are_rejected() {
        let config = PowerConfig::default();
        let table = IntensityTable::builtin();
        for bad in [-1.0, f64::NAN, f64::NEG_INFINITY] {
            assert!(matches!(
                estimate_emissions(bad, &config, &table),
                Err(GreenReportError::NegativeDuration { .. })
            ));
        }
    }

    #[test]
    fn invalid_power_configs_are_rejected() {
        let table = IntensityTable::builtin();
        for (watts, pue) in [(0.0, 1.0), (-5.0, 1.0), (100.0, 0.99), (100.0, f64::NAN)] {
            let config = PowerConfig::new(watts, pue, "ireland", TimeBand::Flat);
            assert!(matches!(
                estimate_emissions(10.0, &config, &table),
                Err(GreenReportError::InvalidPowerConfig { .. })
            ));
        }
    }

    #[test]
    fn unknown_region_and_missing_band_are_rejected() {
        let config = PowerConfig::new(100.0, 1.0, "atlantis", TimeBand::Flat);
        assert!(matches!(
            estimate_emissions(10.0, &config, &IntensityTable::builtin()),
            Err(GreenReportError::UnknownRegion { region, .. }) if region == "atlantis"
        ));

        let partial = IntensityTable::from_json(r#"{"r": {"flat": 100.0}}"#).unwrap();
        let config = PowerConfig::new(100.0, 1.0, "r", TimeBand::Day);
        assert!(matches!(
            estimate_emissions(10.0, &config, &partial),
            Err(GreenReportError::UnknownRegion { band: TimeBand::Day, .. })
        ));
    }

    #[test]
    fn builtin_table_has_the_documented_regions() {
        let table = IntensityTable::builtin();
        for region in ["eu-average", "france", "iceland", "ireland", "poland"] {
            let entry = table.get(region).unwrap();
            for band in TimeBand::ALL {
                assert!(entry.for_band(band).unwrap() > 0.0);
            }
        }
        assert_eq!(table.intensity("ireland", TimeBand::Day).unwrap(), 450.0);
        assert_eq!(table.intensity("france", TimeBand::Night).unwrap(), 60.0);
    }

    #[test]
    fn night_band_cuts_emissions_where_intensity_is_lower() {
        let table = IntensityTable::builtin();
        let day = estimate_emissions(
            3600.0,
            &PowerConfig::new(200.0, 1.2, "ireland", TimeBand::Day),
            &table,
        )
        .unwrap();
        let night = estimate_emissions(
            3600.0,
            &PowerConfig::new(200.0, 1.2, "ireland", TimeBand::Night),
            &table,
        )
        .unwrap();
        assert!(night.emissions_kgco2 < day.emissions_kgco2);
        assert_eq!(night.energy_kwh, day.energy_kwh);
    }

    #[test]
    fn report_text_carries_the_numbers() {
        let report = GreenReport {
            duration_seconds: 7200.0,
            energy_kwh: 0.2,
            intensity_g_per_kwh: 500.0,
            emissions_kgco2: 0.1,
        };
        let text = report.to_text();
        assert!(text.contains("0.200000 kWh"));
        assert!(text.contains("500.0 gCO2/kWh"));
        assert!(text.contains("0.100000 kgCO2"));
    }

    #[test]
    fn time_band_labels_round_trip() {
        for band in TimeBand::ALL {
            assert_eq!(band.label().parse::<TimeBand>().unwrap(), band);
        }
        assert!("dawn".parse::<TimeBand>().is_err());
    }

    #[test]
    fn tracker_measures_elapsed_work() {
        let (value, seconds) = track(|| {
            std::thread::sleep(std::time::Duration::from_millis(20));
            42
        });
        assert_eq!(value, 42);
        assert!(seconds >= 0.02);
        assert!(seconds < 5.0, "scheduling slack exceeded: {seconds} s");
    }

    #[test]
    fn instant_ordering_is_enforced() {
        let earlier = Instant::now();
        let later = Instant::now();
        assert_eq!(duration_between(earlier, earlier).unwrap(), 0.0);
        assert!(duration_between(earlier, later).unwrap() >= 0.0);
        // A stop instant before the start instant is a contract violation,
        // not a zero-length run.
        let long_ago = earlier.checked_sub(std::time::Duration::from_secs(1));
        if let Some(long_ago) = long_ago {
            assert!(matches!(
                duration_between(later, long_ago),
                Err(GreenReportError::ClockError)
            ));
        }
    }

    proptest! {
        #[test]
        fn doubling_duration_exactly_doubles_the_outputs(
            watts in 1.0f64..2000.0,
            pue in 1.0f64..2.5,
            duration in 0.0f64..1e6,
            intensity in 1.0f64..1500.0,
        ) {
            let config = PowerConfig::new(watts, pue, "r", TimeBand::Flat);
            let table = table_with("r", intensity);
            let single = estimate_emissions(duration, &config, &table).unwrap();
            let double = estimate_emissions(2.0 * duration, &config, &table).unwrap();
            // Scaling by two is exact in binary floating point, so the
            // doubled run must match bit for bit.
            prop_assert_eq!(double.energy_kwh, 2.0 * single.energy_kwh);
            prop_assert_eq!(double.emissions_kgco2, 2.0 * single.emissions_kgco2);
            prop_assert!(single.energy_kwh >= 0.0);
            prop_assert!(single.emissions_kgco2 >= 0.0);
        }
    }
}
