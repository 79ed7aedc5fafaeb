//! Agent decision models and the global last-action memory.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::graph::NodeId;

/// A player's move in a single game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    /// Stay silent, i.e. cooperate.
    Silent,
    /// Betray, i.e. defect.
    Betray,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Cooperator,
    Defector,
    TitForTat,
    Random,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::Defector,
        AgentKind::Cooperator,
        AgentKind::TitForTat,
        AgentKind::Random,
    ];

    /// Single-letter code: D, C, T or R.
    pub fn code(self) -> char {
        match self {
            AgentKind::Defector => 'D',
            AgentKind::Cooperator => 'C',
            AgentKind::TitForTat => 'T',
            AgentKind::Random => 'R',
        }
    }

    pub fn from_code(c: char) -> Option<AgentKind> {
        match c.to_ascii_uppercase() {
            'D' => Some(AgentKind::Defector),
            'C' => Some(AgentKind::Cooperator),
            'T' => Some(AgentKind::TitForTat),
            'R' => Some(AgentKind::Random),
            _ => None,
        }
    }

    /// Chooses an action against an opponent whose globally last recorded
    /// action is `opponent_last`.
    ///
    /// Only [`AgentKind::Random`] touches `rng`, consuming exactly one draw.
    pub fn decide<R: Rng + ?Sized>(self, opponent_last: Option<Action>, rng: &mut R) -> Action {
        match self {
            AgentKind::Cooperator => Action::Silent,
            AgentKind::Defector => Action::Betray,
            AgentKind::TitForTat => opponent_last.unwrap_or(Action::Silent),
            AgentKind::Random => {
                if rng.gen::<bool>() {
                    Action::Silent
                } else {
                    Action::Betray
                }
            }
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentKind::Cooperator => "cooperator",
            AgentKind::Defector => "defector",
            AgentKind::TitForTat => "tit-for-tat",
            AgentKind::Random => "random",
        })
    }
}

impl FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            return AgentKind::from_code(c).ok_or_else(|| format!("unknown agent kind `{s}`"));
        }
        match s.to_ascii_lowercase().as_str() {
            "cooperator" => Ok(AgentKind::Cooperator),
            "defector" => Ok(AgentKind::Defector),
            "tit-for-tat" | "titfortat" => Ok(AgentKind::TitForTat),
            "random" => Ok(AgentKind::Random),
            _ => Err(format!("unknown agent kind `{s}`")),
        }
    }
}

/// Last action each node played in any game, against any partner.
#[derive(Clone, Debug, Default)]
pub struct ActionMemory {
    last: Vec<Option<Action>>,
}

impl ActionMemory {
    pub fn new(node_count: usize) -> Self {
        ActionMemory {
            last: vec![None; node_count],
        }
    }

    pub fn record(&mut self, node: NodeId, action: Action) {
        self.last[node] = Some(action);
    }

    pub fn last(&self, node: NodeId) -> Option<Action> {
        self.last[node]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for last in [None, Some(Action::Silent), Some(Action::Betray)] {
            assert_eq!(AgentKind::Cooperator.decide(last, &mut rng), Action::Silent);
            assert_eq!(AgentKind::Defector.decide(last, &mut rng), Action::Betray);
        }
        assert_eq!(AgentKind::TitForTat.decide(None, &mut rng), Action::Silent);
        assert_eq!(AgentKind::TitForTat.decide(Some(Action::Betray), &mut rng), Action::Betray);
        assert_eq!(AgentKind::TitForTat.decide(Some(Action::Silent), &mut rng), Action::Silent);
    }

    #[test]
    fn non_random_kinds_consume_no_draws() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for kind in [AgentKind::Cooperator, AgentKind::Defector, AgentKind::TitForTat] {
            kind.decide(Some(Action::Betray), &mut a);
        }
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn random_consumes_one_draw() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        AgentKind::Random.decide(None, &mut a);
        let _: bool = b.gen();
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn random_is_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let silent = (0..10_000)
            .filter(|_| AgentKind::Random.decide(None, &mut rng) == Action::Silent)
            .count();
        let frac = silent as f64 / 10_000.0;
        assert!((0.48..=0.52).contains(&frac), "silent fraction {frac}");
    }

    #[test]
    fn memory_last_write_wins() {
        let mut mem = ActionMemory::new(5);
        assert_eq!(mem.last(3), None);
        mem.record(3, Action::Betray);
        assert_eq!(mem.last(3), Some(Action::Betray));
        mem.record(1, Action::Silent);
        mem.record(1, Action::Betray);
        assert_eq!(mem.last(1), Some(Action::Betray));
        assert_eq!(mem.last(0), None);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("T".parse::<AgentKind>(), Ok(AgentKind::TitForTat));
        assert_eq!("defector".parse::<AgentKind>(), Ok(AgentKind::Defector));
        assert!("x".parse::<AgentKind>().is_err());
    }
}
