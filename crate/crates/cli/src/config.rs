//! Experiment configuration: defaults, an optional `key = value` file, then
//! command-line flags on top.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toyworld_core::experiment::{ExperimentMode, ExperimentSpec};
use toyworld_core::lifetable::DEFAULT_HORIZON;

use crate::error::{CliError, CliResult};

pub const DEFAULT_CUTOFFS: [usize; 3] = [5, 9, 13];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub modes: Vec<ExperimentMode>,
    pub cutoffs: Vec<usize>,
    pub half_bare_mass_sq: f64,
    pub dimension: u32,
    pub horizon: usize,
    pub death_level: usize,
    pub out: PathBuf,
    pub format: Format,
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modes: ExperimentMode::ALL.to_vec(),
            cutoffs: DEFAULT_CUTOFFS.to_vec(),
            half_bare_mass_sq: 0.1,
            dimension: 1,
            horizon: DEFAULT_HORIZON,
            death_level: 1,
            out: PathBuf::from("out"),
            format: Format::Csv,
            plot: false,
        }
    }
}

/// Values a user may set; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub modes: Option<Vec<ExperimentMode>>,
    pub cutoffs: Option<Vec<usize>>,
    pub half_bare_mass_sq: Option<f64>,
    pub dimension: Option<u32>,
    pub horizon: Option<usize>,
    pub death_level: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<bool>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| CliError::BadArgs(format!("config key '{key}': {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl Overrides {
    /// Parses `key = value` lines. `#` starts a comment; list values are
    /// comma separated.
    pub fn from_config_text(text: &str) -> CliResult<Self> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::BadArgs(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "mode" => o.modes = Some(parse_list(&key, value)?),
                "n" | "cutoff" => o.cutoffs = Some(parse_list(&key, value)?),
                "a2m2-half" => o.half_bare_mass_sq = Some(parse(&key, value)?),
                "dim" => o.dimension = Some(parse(&key, value)?),
                "horizon" => o.horizon = Some(parse(&key, value)?),
                "death-state" => o.death_level = Some(parse(&key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.format = Some(parse(&key, value)?),
                "plot" => o.plot = Some(parse(&key, value)?),
                other => return Err(CliError::BadArgs(format!("unknown config key '{other}'"))),
            }
        }
        Ok(o)
    }

    pub fn from_config_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::BadArgs(format!("{}: {e}", path.display())))?;
        Self::from_config_text(&text)
    }

    pub fn apply(self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.modes {
            cfg.modes = v;
        }
        if let Some(v) = self.cutoffs {
            cfg.cutoffs = v;
        }
        if let Some(v) = self.half_bare_mass_sq {
            cfg.half_bare_mass_sq = v;
        }
        if let Some(v) = self.dimension {
            cfg.dimension = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.death_level {
            cfg.death_level = v;
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if let Some(v) = self.plot {
            cfg.plot = v;
        }
    }
}

impl ExperimentConfig {
    /// Defaults, then the config file, then flags.
    pub fn layered(file: Option<&Path>, flags: Overrides) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = file {
            Overrides::from_config_file(path)?.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.modes.is_empty() {
            return Err(CliError::BadArgs("no mode selected".into()));
        }
        if self.cutoffs.is_empty() {
            return Err(CliError::BadArgs("no cutoff selected".into()));
        }
        if let Some(n) = self.cutoffs.iter().find(|&&n| n < 3) {
            return Err(CliError::BadArgs(format!("cutoff N = {n}; need N >= 3")));
        }
        if !self.half_bare_mass_sq.is_finite() {
            return Err(CliError::BadArgs("a2m2-half must be finite".into()));
        }
        if self.horizon == 0 {
            return Err(CliError::BadArgs("horizon must be positive".into()));
        }
        if self.death_level == 0 {
            return Err(CliError::BadArgs("death-state is a 1-based level".into()));
        }
        Ok(())
    }

    /// One spec per (mode, N), ordered by mode then N.
    pub fn specs(&self) -> Vec<ExperimentSpec> {
        let mut modes = self.modes.clone();
        modes.sort();
        modes.dedup();
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.sort_unstable();
        cutoffs.dedup();
        let mut out = Vec::new();
        for &mode in &modes {
            for &n in &cutoffs {
                let mut spec = ExperimentSpec::new(mode, n);
                spec.half_bare_mass_sq = self.half_bare_mass_sq;
                spec.dimension = self.dimension;
                spec.horizon = self.horizon;
                spec.death_level = self.death_level;
                out.push(spec);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_setup() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.cutoffs, vec![5, 9, 13]);
        assert_eq!(cfg.half_bare_mass_sq, 0.1);
        assert_eq!(cfg.dimension, 1);
        assert_eq!(cfg.specs().len(), 9);
    }

    #[test]
    fn config_text() {
        let o = Overrides::from_config_text(
            "# comment\nmode = quantum1, realquantum1\nN = 5,9\na2m2_half = 0.2 # trailing\nplot = true\n",
        )
        .unwrap();
        assert_eq!(o.modes, Some(vec![ExperimentMode::Quantum1, ExperimentMode::RealQuantum1]));
        assert_eq!(o.cutoffs, Some(vec![5, 9]));
        assert_eq!(o.half_bare_mass_sq, Some(0.2));
        assert_eq!(o.plot, Some(true));
        assert!(Overrides::from_config_text("colour = red").is_err());
        assert!(Overrides::from_config_text("just words").is_err());
        assert!(Overrides::from_config_text("N = five").is_err());
    }

    #[test]
    fn flags_beat_file() {
        let mut cfg = ExperimentConfig::default();
        Overrides::from_config_text("N = 9\ndim = 2").unwrap().apply(&mut cfg);
        Overrides {
            cutoffs: Some(vec![5]),
            ..Default::default()
        }
        .apply(&mut cfg);
        assert_eq!(cfg.cutoffs, vec![5]);
        assert_eq!(cfg.dimension, 2);
    }

    #[test]
    fn specs_are_sorted_and_unique() {
        let cfg = ExperimentConfig {
            modes: vec![ExperimentMode::Quantum1Sp, ExperimentMode::Quantum1, ExperimentMode::Quantum1],
            cutoffs: vec![9, 5, 9],
            ..Default::default()
        };
        let keys: Vec<_> = cfg.specs().iter().map(|s| (s.mode, s.cutoff)).collect();
        assert_eq!(
            keys,
            vec![
                (ExperimentMode::Quantum1, 5),
                (ExperimentMode::Quantum1, 9),
                (ExperimentMode::Quantum1Sp, 5),
                (ExperimentMode::Quantum1Sp, 9),
            ]
        );
    }
}
