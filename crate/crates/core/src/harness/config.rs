use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{AckModel, DEFAULT_DST_LEVEL};
use crate::convexpd::PDParams;
use crate::dynamiccast::Policy;
use crate::subgrad::Schedule;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Coded LP against the Steiner tree approximation on directed graphs.
    StaticWireline,
    /// Coded LP against the incremental power heuristic on geometric
    /// wireless networks.
    StaticWireless,
    /// Primal-dual dynamics with exponential arc costs.
    ConvexPd,
    /// The five reliable unicast schemes on lossy geometric networks.
    UnicastBench,
    /// Dynamic membership policies.
    Dynamic,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::StaticWireline => "static_wireline",
            Scenario::StaticWireless => "static_wireless",
            Scenario::ConvexPd => "convex_pd",
            Scenario::UnicastBench => "unicast_bench",
            Scenario::Dynamic => "dynamic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceConfig {
    /// Network sizes; each gets `replications` instances.
    pub nodes: Vec<usize>,
    /// Side of the square for lossless geometric networks.
    pub side: f64,
    pub radius: f64,
    pub sinks: usize,
    pub rate: f64,
    /// Extra-arc probability for random directed graphs.
    pub density: f64,
    pub max_cost: u32,
    pub capacity: Option<f64>,
    /// Fixed network document instead of random instances.
    pub network: Option<PathBuf>,
    /// Source and sink names in `network`.
    pub source: Option<String>,
    pub sink_names: Vec<String>,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            nodes: vec![20],
            side: 10.0,
            radius: 3.0,
            sinks: 4,
            rate: 1.0,
            density: 0.15,
            max_cost: 10,
            capacity: None,
            network: None,
            source: None,
            sink_names: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub schedule: Schedule,
    /// Subgradient iterations; 0 skips the subgradient solver.
    pub iterations: usize,
    pub dst_level: usize,
    pub pd: PDParams,
    /// Smoothing exponent of the primal-dual cost.
    pub smoothing: u32,
    /// Monte Carlo packets per unicast estimate.
    pub packets: usize,
    pub acks: AckModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            schedule: Schedule::default(),
            iterations: 50,
            dst_level: DEFAULT_DST_LEVEL,
            pd: PDParams { beta: 1e-3, gamma: 1e-3, iterations: 50_000, record_every: 100, ..PDParams::default() },
            smoothing: 4,
            packets: 2000,
            acks: AckModel::Lossy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicSettings {
    pub birth: f64,
    pub death: f64,
    pub horizon: usize,
    pub policies: Vec<Policy>,
    pub freeze_two_phase: bool,
}

impl Default for DynamicSettings {
    fn default() -> Self {
        DynamicSettings {
            birth: 0.2,
            death: 0.3,
            horizon: 10_000,
            policies: vec![Policy::FixedBroadcast, Policy::MyopicTwoPhase],
            freeze_two_phase: true,
        }
    }
}

/// One experiment, read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Instances per size; trajectories per policy for `dynamic`.
    pub replications: usize,
    pub output: PathBuf,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
    pub instance: InstanceConfig,
    pub solver: SolverConfig,
    pub dynamic: DynamicSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: Scenario::StaticWireline,
            seed: 0,
            replications: 10,
            output: PathBuf::from("out"),
            workers: None,
            instance: InstanceConfig::default(),
            solver: SolverConfig::default(),
            dynamic: DynamicSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Read a config; a relative `instance.network` resolves against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(net), Some(dir)) = (&cfg.instance.network, path.parent()) {
            if net.is_relative() {
                cfg.instance.network = Some(dir.join(net));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1");
        }
        let inst = &self.instance;
        if let Some(net) = &inst.network {
            if !net.exists() {
                return Err(Error::Config(format!("network file {} does not exist", net.display())));
            }
            if inst.source.is_none() || inst.sink_names.is_empty() {
                return bad("a network file needs `source` and `sink_names`");
            }
        } else if inst.nodes.is_empty() || inst.nodes.iter().any(|&n| n < 2) {
            return bad("`nodes` must list sizes of at least 2");
        }
        if inst.sinks == 0 || !(inst.rate > 0.0) {
            return bad("`sinks` and `rate` must be positive");
        }
        if self.scenario == Scenario::Dynamic {
            if self.dynamic.policies.is_empty() {
                return bad("at least one policy is required");
            }
            crate::dynamiccast::MembershipProcess { birth: self.dynamic.birth, death: self.dynamic.death }
                .validate()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        self.solver.schedule.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.solver.pd.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_file() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            scenario = "static_wireless"
            replications = 3
            [instance]
            nodes = [20, 30]
            [solver]
            schedule = { kind = "power_alpha", alpha = 0.8 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.scenario, Scenario::StaticWireless);
        assert_eq!(cfg.instance.nodes, vec![20, 30]);
        assert_eq!(cfg.instance.sinks, 4);
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trips() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_fields_and_zero_replications() {
        assert!(ExperimentConfig::from_toml("scenario = \"dynamic\"\nbogus = 1").is_err());
        let cfg = ExperimentConfig { replications: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn missing_network_file_is_reported() {
        let mut cfg = ExperimentConfig::default();
        cfg.instance.network = Some(PathBuf::from("/definitely/not/here.json"));
        cfg.instance.source = Some("s".into());
        cfg.instance.sink_names = vec!["t".into()];
        assert!(cfg.validate().is_err());
    }
}
