mod common;

use std::collections::HashSet;

use common::random_graph;
use netgini::experiments::{assign_by_degree, assign_proportional, degree_thirds, DegreeGroup, ProportionGroup};
use netgini::AgentKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counts from cumulative boundaries rounded half up in floating point.
fn counts_oracle(n: usize, eighths: [u32; 4]) -> [usize; 4] {
    let mut out = [0; 4];
    let mut cum = 0u32;
    let mut prev = 0usize;
    for (i, e) in eighths.into_iter().enumerate() {
        cum += e;
        let boundary = (n as f64 * cum as f64 / 8.0 + 0.5).floor() as usize;
        out[i] = boundary - prev;
        prev = boundary;
    }
    out
}

fn tally(kinds: &[AgentKind]) -> [usize; 4] {
    let mut t = [0; 4];
    for k in kinds {
        t[AgentKind::ALL.iter().position(|a| a == k).unwrap()] += 1;
    }
    t
}

#[test]
fn facebook_sized_counts() {
    let group: ProportionGroup = "3:1:2:2".parse().unwrap();
    assert_eq!(group.counts(4039), [1515, 505, 1009, 1010]);
    assert_eq!(group.counts(4039), counts_oracle(4039, [3, 1, 2, 2]));
}

#[test]
fn degree_thirds_small() {
    assert_eq!(degree_thirds(9), [3, 3, 3]);
    assert_eq!(degree_thirds(10), [3, 4, 3]);
    assert_eq!(degree_thirds(4039), [1346, 1347, 1346]);
}

#[test]
fn degree_assignment_follows_ranking() {
    // Star plus a path: node 0 has the top degree.
    let g = netgini::Graph::from_edges(10, &[(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9)]);
    let group = DegreeGroup::new(AgentKind::Defector, AgentKind::Cooperator, AgentKind::TitForTat).unwrap();
    let kinds = assign_by_degree(&g, &group, &mut ChaCha8Rng::seed_from_u64(2));
    let ranked = g.degree_ranked_nodes();
    assert_eq!(ranked[0], 0);
    let tiers = [&ranked[..3], &ranked[3..7], &ranked[7..]];
    for (tier, (expected, randoms)) in tiers.iter().zip([(AgentKind::Defector, 1), (AgentKind::Cooperator, 1), (AgentKind::TitForTat, 1)]) {
        let r = tier.iter().filter(|&&v| kinds[v] == AgentKind::Random).count();
        assert_eq!(r, randoms);
        assert!(tier.iter().all(|&v| kinds[v] == expected || kinds[v] == AgentKind::Random));
    }
}

proptest! {
    #[test]
    fn proportional_counts_match_oracle(n in 1usize..5000, idx in 0usize..7, seed: u64) {
        let group = ProportionGroup::standard()[idx];
        let kinds = assign_proportional(n, &group, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(kinds.len(), n);
        prop_assert_eq!(tally(&kinds), counts_oracle(n, group.eighths()));
    }

    #[test]
    fn degree_assignment_partitions(n in 3usize..120, p in 0.01f64..0.3, seed: u64, idx in 0usize..6) {
        let g = random_graph(n, p, seed);
        let group = DegreeGroup::standard()[idx];
        let kinds = assign_by_degree(&g, &group, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let ranked = g.degree_ranked_nodes();
        prop_assert_eq!(ranked.iter().collect::<HashSet<_>>().len(), n);
        let sizes = degree_thirds(n);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        let mut start = 0;
        for (size, kind) in sizes.into_iter().zip(group.tiers()) {
            let tier = &ranked[start..start + size];
            start += size;
            let randoms = tier.iter().filter(|&&v| kinds[v] == AgentKind::Random).count();
            prop_assert_eq!(randoms, (size + 2) / 4);
            prop_assert!(tier.iter().all(|&v| kinds[v] == kind || kinds[v] == AgentKind::Random));
        }
        for w in ranked.windows(2) {
            let (a, b) = (g.degree(w[0]), g.degree(w[1]));
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
    }
}
