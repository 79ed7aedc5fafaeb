//! Undirected simple graphs loaded from SNAP edge lists and the Bitcoin OTC CSV.
//!
//! Every loader normalizes its input the same way: self-loops are dropped,
//! duplicate and reverse-duplicate edges are merged, and the original dataset
//! labels are remapped to contiguous ids `0..node_count` in order of first
//! appearance. Adjacency lists are sorted, so loading the same file twice
//! yields an identical [`Graph`].

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Dense node identifier, `0..Graph::node_count()`.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("graph has no edges after normalization")]
    EmptyEdgeSet,
    #[error("{}: {source}", path.display())]
    Open { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Input format of a network file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    /// Whitespace-separated integer pairs, `#` comments.
    Snap,
    /// `SOURCE,TARGET,RATING,TIME` rows; rating, time and direction are discarded.
    BitcoinOtc,
}

impl GraphFormat {
    pub fn load<R: BufRead>(self, reader: R) -> Result<Graph, GraphError> {
        match self {
            GraphFormat::Snap => load_snap_edge_list(reader),
            GraphFormat::BitcoinOtc => load_bitcoin_otc_csv(reader),
        }
    }

    /// Opens and parses the file at `path`. Parse errors do not carry the
    /// path; open failures do.
    pub fn load_path(self, path: &Path) -> Result<Graph, GraphError> {
        let file = File::open(path).map_err(|source| GraphError::Open {
            path: path.to_path_buf(),
            source,
        })?;
        self.load(BufReader::new(file))
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::Snap => "snap",
            GraphFormat::BitcoinOtc => "bitcoin-otc",
        })
    }
}

impl std::str::FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "snap" => Ok(GraphFormat::Snap),
            "bitcoin-otc" => Ok(GraphFormat::BitcoinOtc),
            other => Err(format!("unknown graph format `{other}` (expected snap or bitcoin-otc)")),
        }
    }
}

/// Immutable undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    labels: Vec<i64>,
}

impl Graph {
    /// Builds a graph from raw labelled edges.
    ///
    /// Labels are assigned ids in order of first appearance (scanning each edge
    /// left to right). Self-loops still register their label, so a node that
    /// only ever appears on a self-loop ends up isolated.
    pub fn from_labelled_edges<I>(edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut ids: HashMap<i64, NodeId> = HashMap::new();
        let mut labels = Vec::new();
        let mut adjacency: Vec<Vec<NodeId>> = Vec::new();

        let mut intern = |label: i64, adjacency: &mut Vec<Vec<NodeId>>| -> NodeId {
            *ids.entry(label).or_insert_with(|| {
                labels.push(label);
                adjacency.push(Vec::new());
                adjacency.len() - 1
            })
        };

        for (a, b) in edges {
            let u = intern(a, &mut adjacency);
            let v = intern(b, &mut adjacency);
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }

        let mut directed = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            directed += list.len();
        }
        if directed == 0 {
            return Err(GraphError::EmptyEdgeSet);
        }

        Ok(Graph {
            adjacency,
            edge_count: directed / 2,
            labels,
        })
    }

    /// Builds a graph directly on ids `0..node_count` (labels equal ids).
    ///
    /// Unlike [`Graph::from_labelled_edges`], nodes without edges are kept and
    /// an empty edge set is allowed.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in edges {
            assert!(u < node_count && v < node_count, "edge ({u}, {v}) out of range");
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        let mut directed = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            directed += list.len();
        }
        Graph {
            adjacency,
            edge_count: directed / 2,
            labels: (0..node_count as i64).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Original dataset label of `node`.
    pub fn label(&self, node: NodeId) -> i64 {
        self.labels[node]
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Node ids by degree, highest first; equal degrees in ascending id order.
    pub fn degree_ranked_nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = (0..self.node_count()).collect();
        nodes.sort_by(|&a, &b| self.degree(b).cmp(&self.degree(a)).then(a.cmp(&b)));
        nodes
    }

    /// Writes the normalized graph as a SNAP-style edge list over dense ids,
    /// followed by the id to label mapping as comment lines.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# nodes: {} edges: {}", self.node_count(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u}\t{v}")?;
        }
        writeln!(out, "# id\tlabel")?;
        for (id, label) in self.labels.iter().enumerate() {
            writeln!(out, "# {id}\t{label}")?;
        }
        Ok(())
    }
}

fn parse_label(token: &str, line: usize) -> Result<i64, GraphError> {
    token.trim().parse::<i64>().map_err(|_| GraphError::Parse {
        line,
        reason: format!("expected an integer node label, found `{token}`"),
    })
}

/// Reads a SNAP plain-text edge list.
pub fn load_snap_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(GraphError::Parse {
                line: lineno,
                reason: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        edges.push((parse_label(tokens[0], lineno)?, parse_label(tokens[1], lineno)?));
    }
    Graph::from_labelled_edges(edges)
}

/// Reads the Bitcoin OTC `SOURCE,TARGET,RATING,TIME` CSV as an undirected,
/// unweighted graph.
pub fn load_bitcoin_otc_csv<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(GraphError::Parse {
                line: lineno,
                reason: format!("expected 4 comma-separated columns, found {}", fields.len()),
            });
        }
        edges.push((parse_label(fields[0], lineno)?, parse_label(fields[1], lineno)?));
    }
    Graph::from_labelled_edges(edges)
}
