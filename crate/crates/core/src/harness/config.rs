//! `key = value` sweep configuration with `#` comments.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gates::{GateFamily, GateSpec};
use crate::simulate::DEFAULT_STEPS_PER_PI;

pub const MIN_STEPS_PER_PI: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub families: Vec<GateFamily>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub steps_per_pi: usize,
    /// Worker threads; 0 lets the pool pick.
    pub jobs: usize,
    pub gate: GateSpec,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            families: GateFamily::ALL.to_vec(),
            betas: linspace(-0.1, 0.1, 41),
            gammas: vec![0.0],
            steps_per_pi: DEFAULT_STEPS_PER_PI,
            jobs: 0,
            gate: GateSpec::not(),
            out: None,
        }
    }
}

/// `points` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        n => (0..n)
            .map(|k| {
                if k == n - 1 {
                    end
                } else {
                    start + (end - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}`", value.trim())))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_number(key, s))
        .collect()
}

pub fn parse_families(value: &str) -> Result<Vec<GateFamily>> {
    let trimmed = value.trim();
    if trimmed.eq_ignore_ascii_case("all") {
        return Ok(GateFamily::ALL.to_vec());
    }
    trimmed.split(',').map(|s| s.parse()).collect()
}

/// Optional beta range from `beta_min`, `beta_max`, `beta_points`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BetaRange {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl BetaRange {
    pub fn is_set(&self) -> bool {
        self.min.is_some() || self.max.is_some() || self.points.is_some()
    }

    /// Fills unset fields from the defaults (-0.1, 0.1, 41).
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.min.unwrap_or(-0.1), self.max.unwrap_or(0.1), self.points.unwrap_or(41))
    }
}

impl SweepConfig {
    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut range = BetaRange::default();
        let mut explicit_betas = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().replace('-', "_");
            match key.as_str() {
                "families" | "family" => self.families = parse_families(value)?,
                "betas" => explicit_betas = Some(parse_list::<f64>(&key, value)?),
                "beta_min" => range.min = Some(parse_number(&key, value)?),
                "beta_max" => range.max = Some(parse_number(&key, value)?),
                "beta_points" => range.points = Some(parse_number(&key, value)?),
                "gammas" | "gamma" => self.gammas = parse_list(&key, value)?,
                "steps_per_pi" => self.steps_per_pi = parse_number(&key, value)?,
                "jobs" => self.jobs = parse_number(&key, value)?,
                "gate" => self.gate = GateSpec::named(value.trim())?,
                "out" => self.out = Some(PathBuf::from(value.trim())),
                other => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if let Some(b) = explicit_betas {
            self.betas = b;
        } else if range.is_set() {
            self.betas = range.grid();
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::Config("no gate families selected".into()));
        }
        if self.betas.is_empty() {
            return Err(Error::Config("beta grid is empty".into()));
        }
        if self.gammas.is_empty() {
            return Err(Error::Config("gamma grid is empty".into()));
        }
        if self.steps_per_pi < MIN_STEPS_PER_PI {
            return Err(Error::Config(format!(
                "steps-per-pi must be at least {MIN_STEPS_PER_PI}, got {}",
                self.steps_per_pi
            )));
        }
        if let Some(b) = self.betas.iter().find(|b| !b.is_finite() || b.abs() > crate::pulses::MAX_BETA) {
            return Err(Error::Config(format!("beta {b} is out of range")));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
            return Err(Error::Config(format!("gamma {g} must be a non-negative rate")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_sweep_range() {
        let c = SweepConfig::default();
        assert_eq!(c.betas.len(), 41);
        assert_eq!(c.betas[0], -0.1);
        assert_eq!(c.betas[40], 0.1);
        assert!(c.betas[20].abs() < 1e-18);
        c.validate().unwrap();
    }

    #[test]
    fn parses_text_with_comments() {
        let mut c = SweepConfig::default();
        c.apply_text(
            "# demo\nfamilies = dg, sr-ngqc\nbeta_min = 0\nbeta_max = 0.1 # inline\nbeta_points = 3\ngammas = 0, 1e-4\nsteps_per_pi = 400\n",
        )
        .unwrap();
        assert_eq!(c.families, vec![GateFamily::Dg, GateFamily::SrNgqc]);
        assert_eq!(c.betas, vec![0.0, 0.05, 0.1]);
        assert_eq!(c.gammas, vec![0.0, 1e-4]);
        assert_eq!(c.steps_per_pi, 400);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = SweepConfig::default();
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("no equals sign").is_err());
        assert!(c.apply_text("families = xyz").is_err());
        c.steps_per_pi = 10;
        assert!(c.validate().is_err());
    }
}
