#![allow(dead_code)]

use std::path::{Path, PathBuf};

use netgini::experiments::NetworkSource;
use netgini::{Graph, GraphFormat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi G(n, p) graph drawn from `seed`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn data_dir() -> PathBuf {
    std::env::var_os("NETGINI_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub const FACEBOOK: (&str, &str, GraphFormat) = ("facebook", "facebook_combined.txt", GraphFormat::Snap);
pub const PHYSICS: (&str, &str, GraphFormat) = ("physics", "ca-GrQc.txt", GraphFormat::Snap);
pub const BITCOIN: (&str, &str, GraphFormat) = ("bitcoin-otc", "soc-sign-bitcoinotc.csv", GraphFormat::BitcoinOtc);

/// The network file if present, or a diagnostic naming the expected path.
pub fn network(which: (&str, &str, GraphFormat)) -> Result<NetworkSource, String> {
    let (name, file, format) = which;
    let path = data_dir().join(file);
    if path.is_file() {
        Ok(NetworkSource {
            name: name.to_string(),
            path,
            format,
        })
    } else {
        Err(format!(
            "dataset missing: {} (download it from SNAP, see README)",
            path.display()
        ))
    }
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
