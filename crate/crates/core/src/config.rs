//! TOML run and suite configuration files.
//!
//! Relative paths inside a file are resolved against the file's directory.
//! Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::engine::{BalanceSemantics, Bank, PayoffParams, SimConfig};
use crate::experiments::{parse_bank, ExperimentKind, Group, NetworkSource, SuiteSpec};
use crate::graph::GraphFormat;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SemanticsKey {
    #[default]
    Live,
    Snapshot,
}

impl From<SemanticsKey> for BalanceSemantics {
    fn from(k: SemanticsKey) -> Self {
        match k {
            SemanticsKey::Live => BalanceSemantics::Live,
            SemanticsKey::Snapshot => BalanceSemantics::Snapshot,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffKeys {
    coop_reward: Option<u64>,
    defect_penalty: Option<u64>,
    betrayal_transfer: Option<u64>,
}

impl PayoffKeys {
    fn resolve(self) -> PayoffParams {
        let d = PayoffParams::default();
        PayoffParams {
            coop_reward: self.coop_reward.unwrap_or(d.coop_reward),
            defect_penalty: self.defect_penalty.unwrap_or(d.defect_penalty),
            betrayal_transfer: self.betrayal_transfer.unwrap_or(d.betrayal_transfer),
        }
    }
}

fn default_iterations() -> usize {
    1000
}

fn default_initial_balance() -> u64 {
    100
}

fn default_format() -> GraphFormat {
    GraphFormat::Snap
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    graph: PathBuf,
    #[serde(default = "default_format")]
    format: GraphFormat,
    experiment: u32,
    group: String,
    bank: String,
    seed: u64,
    #[serde(default = "default_iterations")]
    iterations: usize,
    #[serde(default = "default_initial_balance")]
    initial_balance: u64,
    #[serde(default)]
    balance_semantics: SemanticsKey,
    out: Option<PathBuf>,
    #[serde(default)]
    payoff: PayoffKeys,
}

/// A single simulation run as described by a config file.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub format: GraphFormat,
    pub group: Group,
    pub sim: SimConfig,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkEntry {
    name: String,
    path: PathBuf,
    #[serde(default = "default_format")]
    format: GraphFormat,
}

fn default_replicates() -> usize {
    5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    experiment: u32,
    base_seed: u64,
    #[serde(default = "default_replicates")]
    replicates: usize,
    #[serde(default = "default_iterations")]
    iterations: usize,
    #[serde(default = "default_initial_balance")]
    initial_balance: u64,
    #[serde(default)]
    balance_semantics: SemanticsKey,
    groups: Option<Vec<String>>,
    banks: Option<Vec<String>>,
    out: Option<PathBuf>,
    #[serde(default)]
    payoff: PayoffKeys,
    networks: Vec<NetworkEntry>,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub spec: SuiteSpec,
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn experiment_kind(n: u32) -> Result<ExperimentKind, String> {
    ExperimentKind::from_number(n).ok_or_else(|| format!("experiment must be 1 or 2, got {n}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|message| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let file: RunFile = toml::from_str(text).map_err(|e| e.message().to_string())?;
        let group = experiment_kind(file.experiment)?.parse_group(&file.group)?;
        let bank: Bank = parse_bank(&file.bank)?;
        let sim = SimConfig {
            iterations: file.iterations,
            initial_balance: file.initial_balance,
            payoff: file.payoff.resolve(),
            bank,
            seed: file.seed,
            semantics: file.balance_semantics.into(),
        };
        sim.validate().map_err(|e| e.to_string())?;
        Ok(RunConfig {
            graph: resolve(base, file.graph),
            format: file.format,
            group,
            sim,
            out: file.out.map(|p| resolve(base, p)),
        })
    }
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|message| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let file: SuiteFile = toml::from_str(text).map_err(|e| e.message().to_string())?;
        let kind = experiment_kind(file.experiment)?;
        if file.networks.is_empty() {
            return Err("suite needs at least one network".into());
        }
        let mut names: Vec<&str> = file.networks.iter().map(|n| n.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err("network names must be unique".into());
        }
        if file.replicates == 0 {
            return Err("replicates must be at least 1".into());
        }

        let groups = match file.groups {
            Some(labels) if labels.is_empty() => return Err("groups must not be empty".into()),
            Some(labels) => labels
                .iter()
                .map(|l| kind.parse_group(l))
                .collect::<Result<Vec<_>, _>>()?,
            None => kind.standard_groups(),
        };
        let banks = match file.banks {
            Some(labels) if labels.is_empty() => return Err("banks must not be empty".into()),
            Some(labels) => labels
                .iter()
                .map(|l| parse_bank(l))
                .collect::<Result<Vec<_>, _>>()?,
            None => crate::experiments::standard_banks(),
        };
        let networks = file
            .networks
            .into_iter()
            .map(|n| NetworkSource {
                name: n.name,
                path: resolve(base, n.path),
                format: n.format,
            })
            .collect();

        let spec = SuiteSpec {
            networks,
            groups,
            banks,
            base_seed: file.base_seed,
            replicates: file.replicates,
            iterations: file.iterations,
            initial_balance: file.initial_balance,
            payoff: file.payoff.resolve(),
            semantics: file.balance_semantics.into(),
        };
        spec.sim_config(Bank::Infinite, 0)
            .validate()
            .map_err(|e| e.to_string())?;
        Ok(SuiteConfig {
            spec,
            out: file.out.map(|p| resolve(base, p)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ProportionGroup;

    const RUN: &str = r#"
graph = "data/facebook_combined.txt"
experiment = 1
group = "2:2:2:2"
bank = "10000"
seed = 42
"#;

    #[test]
    fn run_defaults() {
        let cfg = RunConfig::parse(RUN, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.graph, PathBuf::from("/cfg/data/facebook_combined.txt"));
        assert_eq!(cfg.format, GraphFormat::Snap);
        assert_eq!(cfg.group, Group::Proportion(ProportionGroup::new(2, 2, 2, 2).unwrap()));
        assert_eq!(cfg.sim.bank, Bank::Finite(10_000));
        assert_eq!(cfg.sim.iterations, 1000);
        assert_eq!(cfg.sim.initial_balance, 100);
        assert_eq!(cfg.sim.payoff, PayoffParams::default());
        assert_eq!(cfg.sim.semantics, BalanceSemantics::Live);
        assert_eq!(cfg.out, None);
    }

    #[test]
    fn run_full() {
        let text = r#"
graph = "/abs/otc.csv"
format = "bitcoin-otc"
experiment = 2
group = "T,D,C"
bank = "inf"
seed = 1
iterations = 10
initial_balance = 50
balance_semantics = "snapshot"
out = "results"

[payoff]
coop_reward = 2
"#;
        let cfg = RunConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.graph, PathBuf::from("/abs/otc.csv"));
        assert_eq!(cfg.format, GraphFormat::BitcoinOtc);
        assert_eq!(cfg.group.to_string(), "T,D,C");
        assert_eq!(cfg.sim.bank, Bank::Infinite);
        assert_eq!(cfg.sim.semantics, BalanceSemantics::Snapshot);
        assert_eq!(cfg.sim.payoff.coop_reward, 2);
        assert_eq!(cfg.sim.payoff.defect_penalty, 2);
        assert_eq!(cfg.out, Some(PathBuf::from("/cfg/results")));
    }

    #[test]
    fn run_rejects_unknown_and_missing_keys() {
        let unknown = format!("{RUN}colour = \"red\"\n");
        assert!(RunConfig::parse(&unknown, Path::new(".")).unwrap_err().contains("colour"));
        let missing = RUN.replace("seed = 42\n", "");
        assert!(RunConfig::parse(&missing, Path::new(".")).unwrap_err().contains("seed"));
    }

    #[test]
    fn run_rejects_bad_values() {
        for (from, to) in [
            ("experiment = 1", "experiment = 3"),
            ("group = \"2:2:2:2\"", "group = \"D,C,T\""),
            ("bank = \"10000\"", "bank = \"lots\""),
        ] {
            assert!(RunConfig::parse(&RUN.replace(from, to), Path::new(".")).is_err(), "{to}");
        }
        let zero_iters = format!("{RUN}iterations = 0\n");
        assert!(RunConfig::parse(&zero_iters, Path::new(".")).is_err());
    }

    const SUITE: &str = r#"
experiment = 2
base_seed = 9

[[networks]]
name = "facebook"
path = "facebook_combined.txt"

[[networks]]
name = "otc"
path = "soc-sign-bitcoinotc.csv"
format = "bitcoin-otc"
"#;

    #[test]
    fn suite_defaults_to_standard_grid() {
        let cfg = SuiteConfig::parse(SUITE, Path::new("/d")).unwrap();
        assert_eq!(cfg.spec.groups.len(), 6);
        assert_eq!(cfg.spec.banks.len(), 3);
        assert_eq!(cfg.spec.replicates, 5);
        assert_eq!(cfg.spec.run_keys().len(), 2 * 6 * 3 * 5);
        assert_eq!(cfg.spec.networks[1].path, PathBuf::from("/d/soc-sign-bitcoinotc.csv"));
    }

    #[test]
    fn suite_explicit_lists() {
        let text = SUITE.replace(
            "base_seed = 9\n",
            "base_seed = 9\ngroups = [\"D,C,T\"]\nbanks = [\"0\", \"inf\"]\nreplicates = 2\n",
        );
        let cfg = SuiteConfig::parse(&text, Path::new(".")).unwrap();
        assert_eq!(cfg.spec.run_keys().len(), 2 * 2 * 2);
    }

    #[test]
    fn suite_rejects_duplicates_and_empties() {
        let dup = SUITE.replace("name = \"otc\"", "name = \"facebook\"");
        assert!(SuiteConfig::parse(&dup, Path::new(".")).is_err());
        let empty = SUITE.replace("base_seed = 9\n", "base_seed = 9\nbanks = []\n");
        assert!(SuiteConfig::parse(&empty, Path::new(".")).is_err());
        let no_nets = "experiment = 1\nbase_seed = 1\nnetworks = []\n";
        assert!(SuiteConfig::parse(no_nets, Path::new(".")).is_err());
    }
}
