//! Flat `key = value` run configuration. Blank lines and lines starting with
//! `#` are ignored. Command-line flags override file values.

use std::path::{Path, PathBuf};

use hydrosar::speckle::SpeckleParams;
use hydrosar::threshold::DEFAULT_BINS;
use hydrosar::water::{Combine, Connectivity, MaskParams};
use hydrosar::analysis::DEFAULT_MAX_LAG;

use crate::exit::{CmdResult, Failure};

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "HYDROSAR_CONFIG";

/// Every accepted key with its default and meaning.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("window", "7", "refined Lee window size (odd, >= 5)"),
    ("looks", "4.4", "equivalent number of looks of the SAR input"),
    ("min_valid", "9", "minimum valid pixels in a filter sub-window"),
    ("nbins", "256", "histogram bins for Otsu thresholds"),
    ("combine", "and", "VV/VH water rule: and, or, vv, vh"),
    ("connectivity", "8", "component connectivity: 4 or 8"),
    ("min_pixels", "25", "smallest water component kept, in pixels"),
    ("units", "db", "scene file units: db or linear"),
    ("jobs", "0", "worker threads for scene processing, 0 = all cores"),
    ("max_lag", "3", "largest rainfall-to-extent lag tested, in months"),
    ("latitude_weighting", "true", "cos(latitude) weights in zonal means"),
    ("reservoir", "", "reservoir identifier written to extent rows"),
    ("vv_dir", "", "directory of YYYY-MM-DD.asc VV scenes"),
    ("vh_dir", "", "directory of YYYY-MM-DD.asc VH scenes"),
    ("out_csv", "", "water extent CSV to write"),
    ("mask_out_dir", "", "directory for per-scene water masks"),
    ("daily_dir", "", "directory of YYYY-MM-DD.asc daily rainfall grids"),
    ("mode", "", "rain mode: annual-mean, monthly-climatology, zonal"),
    ("polygon", "", "GeoJSON basin polygon"),
    ("start_year", "", "first year of the rainfall period"),
    ("end_year", "", "last year of the rainfall period"),
    ("out", "", "rain output file or directory"),
    ("extent_csv", "", "extent series for analyze"),
    ("rain_csv", "", "rainfall series for analyze"),
    ("out_dir", "", "analyze output directory"),
];

/// Documentation string of a config key, empty for unknown keys.
pub fn doc(key: &str) -> &'static str {
    KEYS.iter().find(|k| k.0 == key).map_or("", |k| k.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputUnits {
    Decibel,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RainMode {
    AnnualMean,
    MonthlyClimatology,
    Zonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub speckle: SpeckleParams,
    pub mask: MaskParams,
    pub nbins: usize,
    pub units: InputUnits,
    pub jobs: usize,
    pub max_lag: usize,
    pub latitude_weighting: bool,
    pub reservoir: Option<String>,
    pub vv_dir: Option<PathBuf>,
    pub vh_dir: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub mask_out_dir: Option<PathBuf>,
    pub daily_dir: Option<PathBuf>,
    pub mode: Option<RainMode>,
    pub polygon: Option<PathBuf>,
    pub start_year: Option<i32>,
    pub end_year: Option<i32>,
    pub out: Option<PathBuf>,
    pub extent_csv: Option<PathBuf>,
    pub rain_csv: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            speckle: SpeckleParams::default(),
            mask: MaskParams::default(),
            nbins: DEFAULT_BINS,
            units: InputUnits::Decibel,
            jobs: 0,
            max_lag: DEFAULT_MAX_LAG,
            latitude_weighting: true,
            reservoir: None,
            vv_dir: None,
            vh_dir: None,
            out_csv: None,
            mask_out_dir: None,
            daily_dir: None,
            mode: None,
            polygon: None,
            start_year: None,
            end_year: None,
            out: None,
            extent_csv: None,
            rain_csv: None,
            out_dir: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "window" => self.speckle.window = num(key, value)?,
            "looks" => self.speckle.looks = num(key, value)?,
            "min_valid" => self.speckle.min_valid = num(key, value)?,
            "nbins" => self.nbins = num(key, value)?,
            "combine" => {
                self.mask.combine = match value {
                    "and" => Combine::And,
                    "or" => Combine::Or,
                    "vv" => Combine::VvOnly,
                    "vh" => Combine::VhOnly,
                    _ => return Err(format!("combine must be and, or, vv or vh, got {value:?}")),
                }
            }
            "connectivity" => {
                self.mask.connectivity = match value {
                    "4" => Connectivity::Four,
                    "8" => Connectivity::Eight,
                    _ => return Err(format!("connectivity must be 4 or 8, got {value:?}")),
                }
            }
            "min_pixels" => self.mask.min_pixels = num(key, value)?,
            "units" => {
                self.units = match value {
                    "db" => InputUnits::Decibel,
                    "linear" => InputUnits::Linear,
                    _ => return Err(format!("units must be db or linear, got {value:?}")),
                }
            }
            "jobs" => self.jobs = num(key, value)?,
            "max_lag" => self.max_lag = num(key, value)?,
            "latitude_weighting" => self.latitude_weighting = num(key, value)?,
            "reservoir" => self.reservoir = (!value.is_empty()).then(|| value.to_string()),
            "vv_dir" => self.vv_dir = opt_path(value),
            "vh_dir" => self.vh_dir = opt_path(value),
            "out_csv" => self.out_csv = opt_path(value),
            "mask_out_dir" => self.mask_out_dir = opt_path(value),
            "daily_dir" => self.daily_dir = opt_path(value),
            "mode" => {
                self.mode = match value {
                    "" => None,
                    "annual-mean" => Some(RainMode::AnnualMean),
                    "monthly-climatology" => Some(RainMode::MonthlyClimatology),
                    "zonal" => Some(RainMode::Zonal),
                    _ => {
                        return Err(format!(
                            "mode must be annual-mean, monthly-climatology or zonal, got {value:?}"
                        ))
                    }
                }
            }
            "polygon" => self.polygon = opt_path(value),
            "start_year" => {
                self.start_year = if value.is_empty() { None } else { Some(num(key, value)?) }
            }
            "end_year" => {
                self.end_year = if value.is_empty() { None } else { Some(num(key, value)?) }
            }
            "out" => self.out = opt_path(value),
            "extent_csv" => self.extent_csv = opt_path(value),
            "rain_csv" => self.rain_csv = opt_path(value),
            "out_dir" => self.out_dir = opt_path(value),
            _ => return Err(format!("unknown config key {key:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: duplicate key {key:?}", i + 1));
            }
            cfg.set(key, value).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(cfg)
    }

    /// Loads `explicit`, else the file named by [`CONFIG_ENV`], else the
    /// defaults.
    pub fn load(explicit: Option<&Path>) -> CmdResult<Self> {
        let from_env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        let Some(path) = explicit.map(Path::to_path_buf).or(from_env) else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Failure::io(&path, e))?;
        RunConfig::parse(&text)
            .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))
    }

    /// Applies command-line overrides given as `(key, value)` pairs.
    pub fn apply<'a>(
        &mut self,
        overrides: impl IntoIterator<Item = (&'a str, Option<String>)>,
    ) -> CmdResult {
        for (key, value) in overrides {
            if let Some(v) = value {
                self.set(key, &v)
                    .map_err(|e| Failure::Input(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        Ok(())
    }
}

pub fn require<T: Clone>(value: &Option<T>, flag: &str) -> CmdResult<T> {
    value
        .clone()
        .ok_or_else(|| Failure::Input(format!("missing --{flag} (or `{}` in the config file)", flag.replace('-', "_"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_defaults_match_default() {
        let mut cfg = RunConfig::default();
        for (key, default, _) in KEYS {
            cfg.set(key, default).unwrap();
        }
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let cfg = RunConfig::parse("# comment\nwindow = 9\n\ncombine=or\nvv_dir = a/b\n").unwrap();
        assert_eq!(cfg.speckle.window, 9);
        assert_eq!(cfg.mask.combine, Combine::Or);
        assert_eq!(cfg.vv_dir, Some(PathBuf::from("a/b")));

        let err = RunConfig::parse("window = 7\nwindoe = 9\n").unwrap_err();
        assert!(err.contains("line 2") && err.contains("windoe"), "{err}");
        assert!(RunConfig::parse("window 7").is_err());
        assert!(RunConfig::parse("window = 7\nwindow = 9").is_err());
        assert!(RunConfig::parse("connectivity = 6").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = RunConfig::parse("min_pixels = 10\nnbins = 64\n").unwrap();
        cfg.apply([("min_pixels", Some("30".to_string())), ("nbins", None)]).unwrap();
        assert_eq!(cfg.mask.min_pixels, 30);
        assert_eq!(cfg.nbins, 64);
        assert!(matches!(
            cfg.apply([("window", Some("x".to_string()))]),
            Err(Failure::Input(_))
        ));
    }
}
