//! Experiment configuration: scenario parameters plus run selection,
//! output paths and the flat key-value config file format.

use std::path::{Path, PathBuf};

use crate::arch::ArchKind;
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Everything one `run` invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    /// Architectures to drive, in reporting order.
    pub architectures: Vec<ArchKind>,
    pub out_dir: PathBuf,
    /// Presentation moving-average window for the curve file; 0 or 1
    /// writes the raw curve.
    pub smoothing_window: usize,
    /// Dump factor matrices and weights of the first run's final state.
    pub dump_state: bool,
    /// Worker threads for parallel runs; 0 uses all cores.
    pub jobs: usize,
    /// Retain desired/estimate streams in memory (tests, small runs).
    pub keep_signals: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            architectures: ArchKind::ALL.to_vec(),
            out_dir: PathBuf::from("out"),
            smoothing_window: 512,
            dump_state: false,
            jobs: 0,
            keep_signals: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.architectures.is_empty() {
            return Err(Error::Config("select at least one architecture".into()));
        }
        Ok(())
    }

    /// Load a config file on top of the defaults.
    pub fn from_ini_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = Self::default();
        cfg.apply_ini_text(&text)?;
        Ok(cfg)
    }

    /// Apply flat `key = value` lines. `#` and `;` start comments,
    /// `[section]` headers are tolerated and ignored, unknown keys are
    /// rejected.
    pub fn apply_ini_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "config line {} is not `key = value`: {raw:?}",
                    lineno + 1
                )));
            };
            self.apply_key(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.scenario;
        match key.to_ascii_lowercase().as_str() {
            "filter_order" | "p" => s.filter_order = parse(key, value)?,
            "rank" | "r" => s.rank = parse(key, value)?,
            "tensor_order" | "m" => s.tensor_order = parse(key, value)?,
            "n_bins" => s.n_bins = parse(key, value)?,
            "delta_x" => s.delta_x = parse(key, value)?,
            "ar_coeff" => s.ar_coeff = parse(key, value)?,
            "snr_db" => s.snr_db = parse(key, value)?,
            "n_samples" => s.n_samples = parse(key, value)?,
            "n_runs" => s.n_runs = parse(key, value)?,
            "epsilon" => s.epsilon = parse(key, value)?,
            "seed" => s.master_seed = parse(key, value)?,
            "mu_tensor_tlms2r" => s.mu_tensor.tlms2r = parse(key, value)?,
            "mu_tensor_ttlms" => s.mu_tensor.ttlms = parse(key, value)?,
            "mu_tensor_ctlms" => s.mu_tensor.ctlms = parse(key, value)?,
            "mu_lms_tlms2r" => s.mu_lms.tlms2r = parse(key, value)?,
            "mu_lms_ttlms" => s.mu_lms.ttlms = parse(key, value)?,
            "mu_lms_ctlms" => s.mu_lms.ctlms = parse(key, value)?,
            "arch" => self.architectures = parse_arch_list(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "smoothing_window" => self.smoothing_window = parse(key, value)?,
            "dump_state" => self.dump_state = parse_bool(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "keep_signals" => self.keep_signals = parse_bool(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown key {other:?}")));
            }
        }
        Ok(())
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {value:?} for {key}"))),
    }
}

/// Parse `all` or a comma-separated architecture list, deduplicated but
/// order-preserving.
pub fn parse_arch_list(value: &str) -> Result<Vec<ArchKind>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(ArchKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in value.split(',') {
        let kind = ArchKind::parse(part)
            .ok_or_else(|| Error::Config(format!("unknown architecture {part:?}")))?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty architecture list".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_round_trip_overrides_defaults() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_ini_text(
            "# benchmark setup\n\
             p = 8\n\
             rank = 4\n\
             snr_db = inf\n\
             ar_coeff = 0.5\n\
             n_samples = 2000\n\
             n_runs = 3\n\
             mu_tensor_ctlms = 0.05\n\
             arch = ctlms,ttlms\n\
             dump_state = yes\n\
             seed = 99\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario.filter_order, 8);
        assert_eq!(cfg.scenario.rank, 4);
        assert_eq!(cfg.scenario.snr_db, f64::INFINITY);
        assert_eq!(cfg.scenario.ar_coeff, 0.5);
        assert_eq!(cfg.scenario.n_samples, 2000);
        assert_eq!(cfg.scenario.n_runs, 3);
        assert_eq!(cfg.scenario.mu_tensor.ctlms, 0.05);
        assert_eq!(cfg.scenario.master_seed, 99);
        assert_eq!(cfg.architectures, vec![ArchKind::Ctlms, ArchKind::Ttlms]);
        assert!(cfg.dump_state);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = ExperimentConfig::default();
        let err = cfg.apply_ini_text("not_a_key = 3\n").unwrap_err();
        assert!(err.to_string().contains("not_a_key"));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_ini_text("just words\n").is_err());
        assert!(cfg.apply_ini_text("p = not_a_number\n").is_err());
    }

    #[test]
    fn arch_list_all_and_dedup() {
        assert_eq!(parse_arch_list("all").unwrap(), ArchKind::ALL.to_vec());
        assert_eq!(
            parse_arch_list("ctlms, ctlms, tlms2r").unwrap(),
            vec![ArchKind::Ctlms, ArchKind::Tlms2r]
        );
        assert!(parse_arch_list("nope").is_err());
    }
}
