//! The transaction simulation loop.
//!
//! A run shuffles the nodes once, then repeats iterations over that fixed
//! order. In each iteration every node with a positive balance and at least
//! one neighbor samples one neighbor uniformly and plays a single Prisoner's
//! Dilemma game with it. Games are settled against node balances and the
//! bank, and the Gini coefficient of node balances is recorded after every
//! iteration. The run stops early once an iteration leaves every balance
//! unchanged.
//!
//! # Random stream
//!
//! Each run owns one [`ChaCha8Rng`] seeded from [`SimConfig::seed`]. Draws
//! happen in this order, and nowhere else:
//!
//! 1. the node order, via [`shuffle_in_place`] (`n - 1` draws);
//! 2. per game, one draw to pick the opponent among the current node's
//!    neighbors (skipped nodes draw nothing);
//! 3. per game, one draw for each Random agent's decision, current node
//!    first, then opponent.
//!
//! Integer ranges are always sampled as `u64` so the stream does not depend
//! on the platform's pointer width.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::metrics::gini_sorted;
use crate::strategy::{Action, ActionMemory, AgentKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("assignment covers {assigned} nodes but the graph has {nodes}")]
    AssignmentSize { assigned: usize, nodes: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Payoff magnitudes, in whole balance units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PayoffParams {
    /// Paid by the bank to each player when both stay silent.
    pub coop_reward: u64,
    /// Surrendered to the bank by each player when both betray.
    pub defect_penalty: u64,
    /// Moved from the silent player to the betrayer.
    pub betrayal_transfer: u64,
}

impl Default for PayoffParams {
    fn default() -> Self {
        PayoffParams {
            coop_reward: 1,
            defect_penalty: 2,
            betrayal_transfer: 3,
        }
    }
}

impl PayoffParams {
    fn validate(&self) -> Result<(), EngineError> {
        if self.coop_reward == 0 || self.defect_penalty == 0 || self.betrayal_transfer == 0 {
            return Err(EngineError::InvalidConfig(
                "payoff amounts must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// External authority that rewards mutual cooperation and collects on mutual
/// defection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bank {
    Finite(u64),
    Infinite,
}

impl Bank {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Bank::Infinite)
    }

    /// Whether the bank can pay `amount` in total.
    pub fn can_pay(&self, amount: u64) -> bool {
        match *self {
            Bank::Finite(balance) => balance >= amount,
            Bank::Infinite => true,
        }
    }

    fn apply(&mut self, delta: i64) {
        if let Bank::Finite(balance) = self {
            *balance = balance
                .checked_add_signed(delta)
                .expect("bank balance went negative");
        }
    }
}

/// Which balances a game reads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BalanceSemantics {
    /// Games see every earlier transfer, including those from the same
    /// iteration. A node drained mid-iteration cannot play again.
    #[default]
    Live,
    /// Skip checks and transfer amounts use each node's balance from the start
    /// of the iteration, and a game overwrites both players' balances with
    /// `start + delta`, so a later write replaces an earlier one. This does
    /// not conserve capital when a node plays twice in one iteration.
    Snapshot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub iterations: usize,
    pub initial_balance: u64,
    pub payoff: PayoffParams,
    pub bank: Bank,
    pub seed: u64,
    pub semantics: BalanceSemantics,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            iterations: 1000,
            initial_balance: 100,
            payoff: PayoffParams::default(),
            bank: Bank::Finite(0),
            seed: 0,
            semantics: BalanceSemantics::Live,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.iterations == 0 {
            return Err(EngineError::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.initial_balance == 0 {
            return Err(EngineError::InvalidConfig(
                "initial balance must be at least 1".into(),
            ));
        }
        self.payoff.validate()
    }
}

/// Balance changes produced by one game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub a_delta: i64,
    pub b_delta: i64,
    /// Change in a finite bank's balance; `None` when the bank is infinite.
    pub bank_delta: Option<i64>,
}

/// Settles one game between `a` and `b`, both with positive balances.
///
/// Payments out of a node are clamped to its balance. A finite bank rewards
/// mutual silence only if it can pay both players in full; otherwise nobody
/// is paid.
pub fn resolve_game(
    a: Action,
    b: Action,
    a_bal: u64,
    b_bal: u64,
    bank: Bank,
    p: &PayoffParams,
) -> GameOutcome {
    let finite = |delta: i64| (!bank.is_infinite()).then_some(delta);
    match (a, b) {
        (Action::Silent, Action::Betray) => {
            let t = p.betrayal_transfer.min(a_bal) as i64;
            GameOutcome {
                a_delta: -t,
                b_delta: t,
                bank_delta: finite(0),
            }
        }
        (Action::Betray, Action::Silent) => {
            let t = p.betrayal_transfer.min(b_bal) as i64;
            GameOutcome {
                a_delta: t,
                b_delta: -t,
                bank_delta: finite(0),
            }
        }
        (Action::Silent, Action::Silent) => {
            let reward = p.coop_reward;
            if bank.can_pay(2 * reward) {
                let r = reward as i64;
                GameOutcome {
                    a_delta: r,
                    b_delta: r,
                    bank_delta: finite(-2 * r),
                }
            } else {
                GameOutcome {
                    a_delta: 0,
                    b_delta: 0,
                    bank_delta: finite(0),
                }
            }
        }
        (Action::Betray, Action::Betray) => {
            let t1 = p.defect_penalty.min(a_bal) as i64;
            let t2 = p.defect_penalty.min(b_bal) as i64;
            GameOutcome {
                a_delta: -t1,
                b_delta: -t2,
                bank_delta: finite(t1 + t2),
            }
        }
    }
}

/// Fisher–Yates shuffle: for `i` from `len - 1` down to `1`, draw
/// `j` uniformly in `0..=i` and swap positions `i` and `j`.
pub fn shuffle_in_place<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

/// A uniformly random permutation of `0..n`.
pub fn shuffle_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..n).collect();
    shuffle_in_place(&mut order, rng);
    order
}

/// Audit counters for one iteration, plus the state at its end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IterationStats {
    pub games_played: u64,
    /// Turns that produced no game: zero balance on either side, or a node
    /// without neighbors.
    pub games_skipped: u64,
    /// Total paid into the bank by mutual defection.
    pub bank_inflow: u64,
    /// Total paid out by the bank for mutual cooperation.
    pub bank_outflow: u64,
    /// Bank balance at the end of the iteration; `None` for an infinite bank.
    pub bank_balance: Option<u64>,
    pub total_node_balance: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Gini coefficient after each executed iteration.
    pub gini_series: Vec<f64>,
    /// 1-based iteration after which no balance had changed, if the run
    /// stopped early for that reason.
    pub converged_at: Option<usize>,
    pub final_balances: Vec<u64>,
    pub final_bank: Bank,
    pub iteration_stats: Vec<IterationStats>,
}

impl RunResult {
    pub fn iterations_executed(&self) -> usize {
        self.gini_series.len()
    }

    pub fn final_gini(&self) -> f64 {
        *self.gini_series.last().expect("a run executes at least one iteration")
    }
}

/// A run in progress, advanced one iteration at a time.
pub struct Simulation<'g> {
    graph: &'g Graph,
    kinds: Vec<AgentKind>,
    cfg: SimConfig,
    rng: ChaCha8Rng,
    order: Vec<NodeId>,
    balances: Vec<u64>,
    start: Vec<u64>,
    memory: ActionMemory,
    bank: Bank,
    iteration: usize,
    converged_at: Option<usize>,
    sorted: Vec<u64>,
}

impl<'g> Simulation<'g> {
    pub fn new(
        graph: &'g Graph,
        assignment: &[AgentKind],
        cfg: &SimConfig,
    ) -> Result<Self, EngineError> {
        cfg.validate()?;
        let n = graph.node_count();
        if assignment.len() != n {
            return Err(EngineError::AssignmentSize {
                assigned: assignment.len(),
                nodes: n,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let order = shuffle_order(n, &mut rng);
        Ok(Simulation {
            graph,
            kinds: assignment.to_vec(),
            cfg: cfg.clone(),
            rng,
            order,
            balances: vec![cfg.initial_balance; n],
            start: vec![cfg.initial_balance; n],
            memory: ActionMemory::new(n),
            bank: cfg.bank,
            iteration: 0,
            converged_at: None,
            sorted: Vec::with_capacity(n),
        })
    }

    pub fn balances(&self) -> &[u64] {
        &self.balances
    }

    pub fn bank(&self) -> Bank {
        self.bank
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    /// Number of iterations executed so far.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Whether the run is over, by convergence or by reaching the cap.
    pub fn is_finished(&self) -> bool {
        self.converged_at.is_some() || self.iteration >= self.cfg.iterations
    }

    /// Executes one iteration and returns its Gini coefficient and stats, or
    /// `None` if the run is already finished.
    pub fn step(&mut self) -> Option<(f64, IterationStats)> {
        if self.is_finished() {
            return None;
        }
        self.start.copy_from_slice(&self.balances);
        let mut stats = IterationStats::default();
        let live = self.cfg.semantics == BalanceSemantics::Live;

        for k in 0..self.order.len() {
            let current = self.order[k];
            let neighbors = self.graph.neighbors(current);
            let effective = |node: NodeId| {
                if live {
                    self.balances[node]
                } else {
                    self.start[node]
                }
            };
            let current_bal = effective(current);
            if current_bal == 0 || neighbors.is_empty() {
                stats.games_skipped += 1;
                continue;
            }
            let opponent = neighbors[self.rng.gen_range(0..neighbors.len() as u64) as usize];
            let opponent_bal = effective(opponent);
            if opponent_bal == 0 {
                stats.games_skipped += 1;
                continue;
            }

            let a = self.kinds[current].decide(self.memory.last(opponent), &mut self.rng);
            let b = self.kinds[opponent].decide(self.memory.last(current), &mut self.rng);
            let outcome = resolve_game(a, b, current_bal, opponent_bal, self.bank, &self.cfg.payoff);

            let settle = |base: u64, delta: i64| {
                base.checked_add_signed(delta)
                    .expect("node balance went negative")
            };
            self.balances[current] = settle(current_bal, outcome.a_delta);
            self.balances[opponent] = settle(opponent_bal, outcome.b_delta);

            let to_bank = -(outcome.a_delta + outcome.b_delta);
            if to_bank > 0 {
                stats.bank_inflow += to_bank as u64;
            } else {
                stats.bank_outflow += (-to_bank) as u64;
            }
            if let Some(delta) = outcome.bank_delta {
                self.bank.apply(delta);
            }

            self.memory.record(current, a);
            self.memory.record(opponent, b);
            stats.games_played += 1;
        }

        self.iteration += 1;
        self.sorted.clear();
        self.sorted.extend_from_slice(&self.balances);
        self.sorted.sort_unstable();
        let gini = gini_sorted(&self.sorted);
        stats.total_node_balance = self.balances.iter().sum();
        stats.bank_balance = match self.bank {
            Bank::Finite(b) => Some(b),
            Bank::Infinite => None,
        };
        if self.balances == self.start {
            self.converged_at = Some(self.iteration);
        }
        Some((gini, stats))
    }

    pub fn into_result(self, gini_series: Vec<f64>, iteration_stats: Vec<IterationStats>) -> RunResult {
        RunResult {
            gini_series,
            converged_at: self.converged_at,
            final_balances: self.balances,
            final_bank: self.bank,
            iteration_stats,
        }
    }
}

/// Runs a full simulation of `graph` with one agent kind per node.
pub fn run(graph: &Graph, assignment: &[AgentKind], cfg: &SimConfig) -> Result<RunResult, EngineError> {
    let mut sim = Simulation::new(graph, assignment, cfg)?;
    let mut gini_series = Vec::with_capacity(cfg.iterations);
    let mut stats = Vec::with_capacity(cfg.iterations);
    while let Some((g, s)) = sim.step() {
        gini_series.push(g);
        stats.push(s);
    }
    Ok(sim.into_result(gini_series, stats))
}
