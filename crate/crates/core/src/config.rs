use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("invalid ranking weights: {0}")]
    Weights(String),
}

/// `score = coverage_weight * coverage + specificity_weight * specificity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingWeights {
    pub coverage_weight: f64,
    pub specificity_weight: f64,
}

impl Default for RankingWeights {
    fn default() -> Self {
        Self {
            coverage_weight: 0.7,
            specificity_weight: 0.3,
        }
    }
}

impl RankingWeights {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let (c, s) = (self.coverage_weight, self.specificity_weight);
        if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) {
            return Err(ConfigError::Weights(format!(
                "weights must lie in [0, 1], got {c} and {s}"
            )));
        }
        if (c + s - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Weights(format!(
                "weights must sum to 1, got {}",
                c + s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    /// Origin allowed by CORS, e.g. the UI dev server.
    #[serde(default)]
    pub cors_origin: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub ranking: RankingWeights,
    #[serde(default)]
    pub service: ServiceConfig,
}

impl Config {
    /// Parses TOML and validates the ranking weights.
    pub fn parse(raw: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(raw).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        config.ranking.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c = Config::parse(
            "[ranking]\ncoverage_weight = 0.6\nspecificity_weight = 0.4\n[service]\ncors_origin = \"http://localhost:5173\"\n",
        )
        .unwrap();
        assert_eq!(c.ranking.coverage_weight, 0.6);
        assert_eq!(
            c.service.cors_origin.as_deref(),
            Some("http://localhost:5173")
        );
        assert_eq!(
            Config::parse("").unwrap().ranking,
            RankingWeights::default()
        );
        assert!(matches!(
            Config::parse("[ranking]\ncoverage_weight = 0.7\nspecificity_weight = 0.7\n"),
            Err(ConfigError::Weights(_))
        ));
        assert!(matches!(
            Config::parse("[ranking]\ncoverage_weight = 1.5\nspecificity_weight = -0.5\n"),
            Err(ConfigError::Weights(_))
        ));
        assert!(matches!(
            Config::parse("ranking = 3"),
            Err(ConfigError::Syntax(_))
        ));
    }
}
