//! Agent assignment recipes and multi-run sweeps.
//!
//! Two recipes exist. A [`ProportionGroup`] shuffles the nodes and hands out
//! kinds in fixed D, C, T, R order according to proportions measured in
//! eighths. A [`DegreeGroup`] splits the degree ranking into thirds, gives
//! each third one kind and then turns a random quarter of every third into
//! Random agents.
//!
//! [`run_suite`] crosses networks, groups, bank settings and replicates. Each
//! run gets a seed derived from the suite's base seed and the run's key, so
//! any single run can be reproduced in isolation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{self, shuffle_in_place, shuffle_order, BalanceSemantics, Bank, PayoffParams, RunResult, SimConfig};
use crate::graph::{Graph, GraphFormat};
use crate::strategy::AgentKind;

/// `num / den` rounded to the nearest integer, halves rounded up.
fn round_half_up(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

/// Kind proportions in eighths, in D, C, T, R order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProportionGroup {
    eighths: [u32; 4],
}

impl ProportionGroup {
    /// Builds a group from D, C, T, R shares measured in eighths (12.5%).
    pub fn new(defector: u32, cooperator: u32, tit_for_tat: u32, random: u32) -> Result<Self, String> {
        let eighths = [defector, cooperator, tit_for_tat, random];
        let total: u32 = eighths.iter().sum();
        if total != 8 {
            return Err(format!(
                "proportions must add up to 8 eighths (100%), got {total}"
            ));
        }
        Ok(ProportionGroup { eighths })
    }

    /// The seven groups of the proportions experiment, control first.
    pub fn standard() -> Vec<ProportionGroup> {
        [
            [2, 2, 2, 2],
            [3, 1, 2, 2],
            [3, 2, 1, 2],
            [2, 3, 1, 2],
            [1, 3, 2, 2],
            [2, 1, 3, 2],
            [1, 2, 3, 2],
        ]
        .into_iter()
        .map(|eighths| ProportionGroup { eighths })
        .collect()
    }

    pub fn eighths(&self) -> [u32; 4] {
        self.eighths
    }

    /// Share of `kind` as a percentage.
    pub fn percent(&self, kind: AgentKind) -> f64 {
        let idx = AgentKind::ALL.iter().position(|&k| k == kind).unwrap();
        self.eighths[idx] as f64 * 12.5
    }

    /// Node counts per kind for `n` nodes, in D, C, T, R order.
    ///
    /// Segment ends are the cumulative fractions of `n`, rounded half up, so
    /// the counts always sum to `n`.
    pub fn counts(&self, n: usize) -> [usize; 4] {
        let mut counts = [0; 4];
        let mut cumulative = 0u64;
        let mut prev = 0usize;
        for (i, &share) in self.eighths.iter().enumerate() {
            cumulative += share as u64;
            let end = round_half_up(cumulative * n as u64, 8) as usize;
            counts[i] = end - prev;
            prev = end;
        }
        counts
    }
}

impl fmt::Display for ProportionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [d, c, t, r] = self.eighths;
        write!(f, "{d}:{c}:{t}:{r}")
    }
}

impl FromStr for ProportionGroup {
    type Err = String;

    /// Accepts `3:1:2:2` or `D:C:T:R=3:1:2:2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim();
        let body = body
            .split_once('=')
            .map(|(_, rhs)| rhs)
            .unwrap_or(body);
        let parts: Vec<u32> = body
            .split(':')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("invalid proportion group `{s}`"))?;
        match parts.as_slice() {
            &[d, c, t, r] => ProportionGroup::new(d, c, t, r),
            _ => Err(format!("proportion group `{s}` must have 4 parts")),
        }
    }
}

/// Kinds for the top, middle and bottom thirds of the degree ranking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreeGroup {
    tiers: [AgentKind; 3],
}

impl DegreeGroup {
    pub fn new(top: AgentKind, middle: AgentKind, bottom: AgentKind) -> Result<Self, String> {
        let mut tiers = [top, middle, bottom];
        tiers.sort();
        if tiers != [AgentKind::Cooperator, AgentKind::Defector, AgentKind::TitForTat] {
            return Err("degree group must order Defector, Cooperator and Tit-for-Tat once each".into());
        }
        Ok(DegreeGroup {
            tiers: [top, middle, bottom],
        })
    }

    /// The six groups of the degree experiment.
    pub fn standard() -> Vec<DegreeGroup> {
        use AgentKind::*;
        [
            [Defector, Cooperator, TitForTat],
            [Defector, TitForTat, Cooperator],
            [Cooperator, Defector, TitForTat],
            [Cooperator, TitForTat, Defector],
            [TitForTat, Cooperator, Defector],
            [TitForTat, Defector, Cooperator],
        ]
        .into_iter()
        .map(|tiers| DegreeGroup { tiers })
        .collect()
    }

    pub fn tiers(&self) -> [AgentKind; 3] {
        self.tiers
    }
}

impl fmt::Display for DegreeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.tiers;
        write!(f, "{},{},{}", a.code(), b.code(), c.code())
    }
}

impl FromStr for DegreeGroup {
    type Err = String;

    /// Accepts `D,C,T` (whitespace allowed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kinds: Vec<AgentKind> = s
            .split(',')
            .map(|p| p.parse::<AgentKind>())
            .collect::<Result<_, _>>()?;
        match kinds.as_slice() {
            &[a, b, c] => DegreeGroup::new(a, b, c),
            _ => Err(format!("degree group `{s}` must name 3 kinds")),
        }
    }
}

/// Kind for each node, shuffled into the proportions of `group`.
///
/// Draws `n - 1` values from `rng` for the shuffle.
pub fn assign_proportional(node_count: usize, group: &ProportionGroup, rng: &mut ChaCha8Rng) -> Vec<AgentKind> {
    let order = shuffle_order(node_count, rng);
    let mut kinds = vec![AgentKind::Random; node_count];
    let mut positions = order.into_iter();
    for (kind, count) in AgentKind::ALL.into_iter().zip(group.counts(node_count)) {
        for node in positions.by_ref().take(count) {
            kinds[node] = kind;
        }
    }
    kinds
}

/// Sizes of the top, middle and bottom thirds for `n` nodes.
pub fn degree_thirds(n: usize) -> [usize; 3] {
    let n = n as u64;
    let first = round_half_up(n, 3);
    let second = round_half_up(2 * n, 3);
    [first as usize, (second - first) as usize, (n - second) as usize]
}

/// Kind for each node from its degree third, with a random quarter of each
/// third (rounded half up) overwritten by Random agents.
///
/// Thirds are processed top to bottom; each shuffles a copy of its members
/// with `rng` and converts the first quarter.
pub fn assign_by_degree(graph: &Graph, group: &DegreeGroup, rng: &mut ChaCha8Rng) -> Vec<AgentKind> {
    let ranked = graph.degree_ranked_nodes();
    let mut kinds = vec![AgentKind::Random; ranked.len()];
    let mut rest = ranked.as_slice();
    for (kind, size) in group.tiers.into_iter().zip(degree_thirds(ranked.len())) {
        let (third, tail) = rest.split_at(size);
        rest = tail;
        for &node in third {
            kinds[node] = kind;
        }
        let mut members = third.to_vec();
        shuffle_in_place(&mut members, rng);
        let randoms = round_half_up(size as u64, 4) as usize;
        for &node in &members[..randoms] {
            kinds[node] = AgentKind::Random;
        }
    }
    kinds
}

/// One assignment recipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Proportion(ProportionGroup),
    Degree(DegreeGroup),
}

impl Group {
    pub fn assign(&self, graph: &Graph, rng: &mut ChaCha8Rng) -> Vec<AgentKind> {
        match self {
            Group::Proportion(p) => assign_proportional(graph.node_count(), p, rng),
            Group::Degree(d) => assign_by_degree(graph, d, rng),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Proportion(p) => p.fmt(f),
            Group::Degree(d) => d.fmt(f),
        }
    }
}

/// Which experiment a suite runs, fixing how group labels are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Proportions,
    Degree,
}

impl ExperimentKind {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(ExperimentKind::Proportions),
            2 => Some(ExperimentKind::Degree),
            _ => None,
        }
    }

    pub fn parse_group(self, label: &str) -> Result<Group, String> {
        match self {
            ExperimentKind::Proportions => label.parse().map(Group::Proportion),
            ExperimentKind::Degree => label.parse().map(Group::Degree),
        }
    }

    pub fn standard_groups(self) -> Vec<Group> {
        match self {
            ExperimentKind::Proportions => ProportionGroup::standard().into_iter().map(Group::Proportion).collect(),
            ExperimentKind::Degree => DegreeGroup::standard().into_iter().map(Group::Degree).collect(),
        }
    }
}

/// Bank settings compared in every experiment: empty, 10,000 units, unlimited.
pub fn standard_banks() -> Vec<Bank> {
    vec![Bank::Finite(0), Bank::Finite(10_000), Bank::Infinite]
}

/// Short label for a bank setting: the initial balance, or `inf`.
pub fn bank_label(bank: &Bank) -> String {
    match bank {
        Bank::Finite(b) => b.to_string(),
        Bank::Infinite => "inf".to_string(),
    }
}

pub fn parse_bank(label: &str) -> Result<Bank, String> {
    match label.trim() {
        "inf" | "infinite" => Ok(Bank::Infinite),
        other => other
            .parse::<u64>()
            .map(Bank::Finite)
            .map_err(|_| format!("invalid bank setting `{label}` (expected a balance or `inf`)")),
    }
}

/// RNG used to build the assignment of a run with seed `seed`.
///
/// It shares the seed with the run's engine stream but reads a different
/// ChaCha stream, so the two never overlap.
pub fn assignment_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSource {
    pub name: String,
    pub path: PathBuf,
    pub format: GraphFormat,
}

#[derive(Clone, Debug)]
pub struct SuiteSpec {
    pub networks: Vec<NetworkSource>,
    pub groups: Vec<Group>,
    pub banks: Vec<Bank>,
    pub base_seed: u64,
    pub replicates: usize,
    pub iterations: usize,
    pub initial_balance: u64,
    pub payoff: PayoffParams,
    pub semantics: BalanceSemantics,
}

impl SuiteSpec {
    /// A suite with the standard groups and bank settings of `kind` and the
    /// default run parameters.
    pub fn standard(kind: ExperimentKind, networks: Vec<NetworkSource>, base_seed: u64) -> Self {
        SuiteSpec {
            networks,
            groups: kind.standard_groups(),
            banks: standard_banks(),
            base_seed,
            replicates: 5,
            iterations: 1000,
            initial_balance: 100,
            payoff: PayoffParams::default(),
            semantics: BalanceSemantics::Live,
        }
    }

    /// All run keys, network-major, then group, bank and replicate.
    pub fn run_keys(&self) -> Vec<RunKey> {
        let mut keys = Vec::new();
        for network in &self.networks {
            for group in &self.groups {
                for bank in &self.banks {
                    for replicate in 0..self.replicates {
                        keys.push(RunKey {
                            network: network.name.clone(),
                            group: *group,
                            bank: *bank,
                            replicate,
                        });
                    }
                }
            }
        }
        keys
    }

    pub fn sim_config(&self, bank: Bank, seed: u64) -> SimConfig {
        SimConfig {
            iterations: self.iterations,
            initial_balance: self.initial_balance,
            payoff: self.payoff,
            bank,
            seed,
            semantics: self.semantics,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub network: String,
    pub group: Group,
    pub bank: Bank,
    pub replicate: usize,
}

impl RunKey {
    /// Seed for this run: FNV-1a over the base seed and the key's labels,
    /// finished with the SplitMix64 mixer.
    pub fn seed(&self, base_seed: u64) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
            h ^= 0xff;
            h = h.wrapping_mul(PRIME);
        };
        feed(&base_seed.to_le_bytes());
        feed(self.network.as_bytes());
        feed(self.group.to_string().as_bytes());
        feed(bank_label(&self.bank).as_bytes());
        feed(&(self.replicate as u64).to_le_bytes());

        let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// File-name friendly form, e.g. `facebook__3-1-2-2__inf__r0`.
    pub fn slug(&self) -> String {
        let group: String = self
            .group
            .to_string()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
            .collect();
        format!("{}__{}__{}__r{}", self.network, group, bank_label(&self.bank), self.replicate)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub final_gini: f64,
    pub converged_at: Option<usize>,
    pub iterations_executed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow {
    pub key: RunKey,
    pub outcome: Result<RunSummary, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanRow {
    pub network: String,
    pub group: Group,
    pub bank: Bank,
    /// Successful replicates contributing to the mean.
    pub replicates: usize,
    pub mean_final_gini: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    /// One row per run key, in [`SuiteSpec::run_keys`] order.
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Mean final Gini over replicates for each (network, group, bank),
    /// in first-seen order. Cells without a successful run are omitted.
    pub fn means(&self) -> Vec<MeanRow> {
        let mut out: Vec<MeanRow> = Vec::new();
        for row in &self.rows {
            let Ok(summary) = &row.outcome else { continue };
            let cell = out.iter_mut().find(|m| {
                m.network == row.key.network && m.group == row.key.group && m.bank == row.key.bank
            });
            match cell {
                Some(m) => {
                    m.mean_final_gini += summary.final_gini;
                    m.replicates += 1;
                }
                None => out.push(MeanRow {
                    network: row.key.network.clone(),
                    group: row.key.group,
                    bank: row.key.bank,
                    replicates: 1,
                    mean_final_gini: summary.final_gini,
                }),
            }
        }
        for m in &mut out {
            m.mean_final_gini /= m.replicates as f64;
        }
        out
    }

    pub fn mean(&self, network: &str, group: &Group, bank: &Bank) -> Option<f64> {
        self.means()
            .into_iter()
            .find(|m| m.network == network && &m.group == group && &m.bank == bank)
            .map(|m| m.mean_final_gini)
    }
}

/// Runs one key end to end on an already loaded graph.
pub fn run_one(graph: &Graph, spec: &SuiteSpec, key: &RunKey) -> Result<(u64, RunResult), String> {
    let seed = key.seed(spec.base_seed);
    let kinds = key.group.assign(graph, &mut assignment_rng(seed));
    let result = engine::run(graph, &kinds, &spec.sim_config(key.bank, seed)).map_err(|e| e.to_string())?;
    Ok((seed, result))
}

/// Executes every run of `spec` on up to `workers` threads.
///
/// Each network is loaded once; a network that fails to load marks all of its
/// runs as failed without affecting other networks. `on_run` is called from
/// worker threads as runs finish, in no particular order. The returned rows
/// follow [`SuiteSpec::run_keys`] regardless of completion order.
pub fn run_suite<F>(spec: &SuiteSpec, workers: usize, on_run: F) -> SuiteReport
where
    F: Fn(&RunKey, &RunResult) + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("failed to build worker pool");

    pool.install(|| {
        let graphs: Vec<(String, Result<Arc<Graph>, String>)> = spec
            .networks
            .par_iter()
            .map(|n| {
                let loaded = n.format.load_path(&n.path).map(Arc::new).map_err(|e| e.to_string());
                (n.name.clone(), loaded)
            })
            .collect();
        let graph_for = |name: &str| -> &Result<Arc<Graph>, String> {
            &graphs.iter().find(|(n, _)| n == name).expect("network registered").1
        };

        let rows = spec
            .run_keys()
            .into_par_iter()
            .map(|key| {
                let outcome = match graph_for(&key.network) {
                    Err(e) => Err(format!("network {}: {e}", key.network)),
                    Ok(graph) => run_one(graph, spec, &key).map(|(seed, result)| {
                        on_run(&key, &result);
                        RunSummary {
                            seed,
                            final_gini: result.final_gini(),
                            converged_at: result.converged_at,
                            iterations_executed: result.iterations_executed(),
                        }
                    }),
                };
                SuiteRow { key, outcome }
            })
            .collect();
        SuiteReport { rows }
    })
}
