use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LearnerConfig;
use crate::metrics::StrategyRecording;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    NoConflict,
    Conflict,
    Random,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 3] = [SuiteKind::NoConflict, SuiteKind::Conflict, SuiteKind::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteKind::NoConflict => "no-conflict",
            SuiteKind::Conflict => "conflict",
            SuiteKind::Random => "random",
        }
    }

    /// Largest payoff of a game in this suite.
    pub fn max_payoff(self) -> f64 {
        match self {
            SuiteKind::Random => 8.0,
            _ => 4.0,
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (expected no-conflict, conflict or random)")))
    }
}

/// Everything that determines a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: SuiteKind,
    pub sweeps: usize,
    pub repetitions: usize,
    /// Number of random games; ignored by the pairwise suites.
    pub games: usize,
    pub roster: Vec<String>,
    pub seed: u64,
    pub alpha: f64,
    pub epsilon: f64,
    pub regmat_delta: f64,
    pub regmat_gamma: f64,
    pub wolf_base: f64,
    pub recording: StrategyRecording,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let learner = LearnerConfig::default();
        Self {
            suite: SuiteKind::NoConflict,
            sweeps: 25,
            repetitions: 100_000,
            games: 500,
            roster: ["jal", "cjal", "wolfphc", "regmat", "nashq"].map(String::from).to_vec(),
            seed: 0,
            alpha: learner.alpha,
            epsilon: learner.epsilon,
            regmat_delta: learner.regmat_delta,
            regmat_gamma: learner.regmat_gamma,
            wolf_base: learner.wolf_base,
            recording: StrategyRecording::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn learner_config(&self) -> LearnerConfig {
        LearnerConfig {
            alpha: self.alpha,
            epsilon: self.epsilon,
            regmat_delta: self.regmat_delta,
            regmat_gamma: self.regmat_gamma,
            wolf_base: self.wolf_base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::Config("`sweeps` must be at least 1".into()));
        }
        if self.repetitions < 5 {
            return Err(Error::Config(format!("`repetitions` must be at least 5, got {}", self.repetitions)));
        }
        if self.roster.is_empty() {
            return Err(Error::Config("`roster` is empty".into()));
        }
        if self.suite == SuiteKind::Random && self.games == 0 {
            return Err(Error::Config("`games` must be at least 1".into()));
        }
        self.learner_config().validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = SuiteConfig::from_toml_str(
            "suite = \"no-conflict\"\nsweeps = 1\nrepetitions = 1000\nroster = [\"jal\", \"cjal\"]\n",
        )
        .unwrap();
        assert_eq!(c.sweeps, 1);
        assert_eq!(c.roster, vec!["jal", "cjal"]);
        assert_eq!(c.alpha, 0.1);
        assert_eq!(c.recording, StrategyRecording::Policy);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = SuiteConfig::from_toml_str("suite = \"conflict\"\nsweep = 3\n").unwrap_err();
        assert!(err.to_string().contains("sweep"), "{err}");
    }

    #[test]
    fn guards() {
        assert!(SuiteConfig::from_toml_str("repetitions = 0\n").is_err());
        assert!(SuiteConfig::from_toml_str("roster = []\n").is_err());
        assert!(SuiteConfig::from_toml_str("epsilon = 2.0\n").is_err());
    }

    #[test]
    fn roundtrip() {
        let c = SuiteConfig {
            suite: SuiteKind::Random,
            ..SuiteConfig::default()
        };
        assert_eq!(SuiteConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
        assert_eq!("conflict".parse::<SuiteKind>().unwrap(), SuiteKind::Conflict);
        assert!("mixed".parse::<SuiteKind>().is_err());
    }
}
