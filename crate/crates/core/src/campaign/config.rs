use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::DEFAULT_STEP_BUDGET;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid campaign configuration: {0}")]
pub struct ConfigError(pub String);

/// Cap on dimension values: one cap for every dimension or one per name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaxSize {
    Uniform(usize),
    PerDim(BTreeMap<String, usize>),
}

impl MaxSize {
    pub fn cap(&self, dim: &str) -> Option<usize> {
        match self {
            MaxSize::Uniform(n) => Some(*n),
            MaxSize::PerDim(map) => map.get(dim).copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeMode {
    /// Step `k` exercises every shape whose longest path costs at most `k`.
    #[default]
    CostBudget,
    /// Every step exercises the single shape at the size caps.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StopRule {
    Saturation { window: u64 },
    LongestPath,
    KMax,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::Saturation { window: 3 }
    }
}

impl StopRule {
    /// Window used by the saturation detector in reports.
    pub fn window(&self) -> u64 {
        match self {
            StopRule::Saturation { window } => *window,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    /// Elements are drawn from `[0, domain)`.
    pub domain: u64,
    pub max_size: MaxSize,
    pub k_max: u64,
    /// Random inputs per step.
    pub batch: usize,
    pub seed: u64,
    pub shape_mode: ShapeMode,
    pub stop_rule: StopRule,
    pub step_budget: u64,
    /// Keep partial paths of executions that fault.
    pub include_errored_paths: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            domain: 1000,
            max_size: MaxSize::Uniform(10),
            k_max: 1000,
            batch: 100,
            seed: 1,
            shape_mode: ShapeMode::CostBudget,
            stop_rule: StopRule::default(),
            step_budget: DEFAULT_STEP_BUDGET,
            include_errored_paths: false,
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: CampaignConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError(m.to_string()));
        if self.domain == 0 {
            return fail("domain must be positive");
        }
        match &self.max_size {
            MaxSize::Uniform(0) => return fail("max_size must be positive"),
            MaxSize::PerDim(map) if map.values().any(|v| *v == 0) => {
                return fail("every max_size entry must be positive")
            }
            _ => {}
        }
        if self.k_max == 0 {
            return fail("k_max must be positive");
        }
        if self.batch == 0 {
            return fail("batch must be positive");
        }
        if self.step_budget == 0 {
            return fail("step_budget must be positive");
        }
        if let StopRule::Saturation { window: 0 } = self.stop_rule {
            return fail("saturation window must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let cfg = CampaignConfig::from_json(
            r#"{"domain": 1000, "max_size": {"m": 2, "n": 2, "q": 2}, "k_max": 50,
                "batch": 16, "seed": 7, "shape_mode": "cost-budget",
                "stop_rule": {"type": "saturation", "window": 3}, "step_budget": 1000}"#,
        )
        .unwrap();
        assert_eq!(cfg.max_size.cap("n"), Some(2));
        assert_eq!(cfg.stop_rule, StopRule::Saturation { window: 3 });
        assert_eq!(cfg.batch, 16);

        let cfg =
            CampaignConfig::from_json(r#"{"max_size": 5, "stop_rule": {"type": "longest-path"}}"#)
                .unwrap();
        assert_eq!(cfg.max_size, MaxSize::Uniform(5));
        assert_eq!(cfg.stop_rule, StopRule::LongestPath);
    }

    #[test]
    fn rejects_non_positive_values() {
        assert!(CampaignConfig::from_json(r#"{"batch": 0}"#).is_err());
        assert!(CampaignConfig::from_json(r#"{"domain": 0}"#).is_err());
        assert!(
            CampaignConfig::from_json(r#"{"stop_rule": {"type": "saturation", "window": 0}}"#)
                .is_err()
        );
        assert!(CampaignConfig::from_json(r#"{"max_size": {"d": 0}}"#).is_err());
    }
}
