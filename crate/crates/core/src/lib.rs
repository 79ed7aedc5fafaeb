//! Iterated Prisoner's Dilemma transactions between strategy-driven agents on
//! real-world networks, with an external bank and per-iteration Gini
//! coefficient tracking.
//!
//! - [`graph`]: network loading and normalization.
//! - [`strategy`]: agent kinds and the last-action memory.
//! - [`engine`]: the simulation loop.
//! - [`metrics`]: the Gini coefficient.
//! - [`experiments`]: assignment recipes and sweeps.
//! - [`config`], [`report`], [`plot`], [`cli`]: the command-line front end.

pub mod cli;
pub mod config;
pub mod engine;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod plot;
pub mod report;
pub mod strategy;

pub use engine::{run, BalanceSemantics, Bank, PayoffParams, RunResult, SimConfig};
pub use graph::{Graph, GraphFormat, NodeId};
pub use metrics::gini;
pub use strategy::{Action, AgentKind};
