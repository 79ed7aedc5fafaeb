//! Subcommand implementations behind the `netgini` binary.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, RunConfig, SuiteConfig};
use crate::engine::{self, RunResult};
use crate::experiments::{assignment_rng, run_suite, SuiteReport};
use crate::graph::{GraphError, GraphFormat};
use crate::plot::{self, PlotError, Series};
use crate::report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("all {0} suite runs failed")]
    AllRunsFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io { .. } => 4,
            CliError::AllRunsFailed(_) => 5,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Read { path, source } => CliError::Io { path, source },
            ConfigError::Invalid { .. } => CliError::Config(e.to_string()),
        }
    }
}

fn graph_error(path: &Path, e: GraphError) -> CliError {
    match e {
        GraphError::Open { path, source } => CliError::Io { path, source },
        GraphError::Io(source) => CliError::io(path, source),
        other => CliError::Parse(format!("{}: {other}", path.display())),
    }
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Runs one configured simulation and writes `gini_series.csv` and
/// `summary.txt` into the output directory.
pub fn cmd_run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<RunResult, CliError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(seed) = seed {
        cfg.sim.seed = seed;
    }
    let out = out
        .map(Path::to_path_buf)
        .or(cfg.out.clone())
        .ok_or_else(|| CliError::Config("no output directory: set `out` or pass --out".into()))?;

    let graph = cfg.format.load_path(&cfg.graph).map_err(|e| graph_error(&cfg.graph, e))?;
    let kinds = cfg.group.assign(&graph, &mut assignment_rng(cfg.sim.seed));
    let result = engine::run(&graph, &kinds, &cfg.sim).map_err(|e| CliError::Config(e.to_string()))?;

    create_dir(&out)?;
    write_file(&out.join("gini_series.csv"), |w| report::write_gini_series(w, &result))?;
    write_file(&out.join("summary.txt"), |w| report::write_run_summary(w, &result, cfg.sim.seed))?;
    Ok(result)
}

pub struct SuiteOptions<'a> {
    pub out: Option<&'a Path>,
    pub seed: Option<u64>,
    pub workers: usize,
    pub replicates: Option<usize>,
}

/// Runs a suite, writing one series CSV per run under `runs/`, plus
/// `suite_summary.csv` and `suite_means.csv`.
pub fn cmd_suite(config: &Path, opts: &SuiteOptions<'_>) -> Result<SuiteReport, CliError> {
    let mut cfg = SuiteConfig::load(config)?;
    if let Some(seed) = opts.seed {
        cfg.spec.base_seed = seed;
    }
    if let Some(k) = opts.replicates {
        if k == 0 {
            return Err(CliError::Config("--replicates must be at least 1".into()));
        }
        cfg.spec.replicates = k;
    }
    let out = opts
        .out
        .map(Path::to_path_buf)
        .or(cfg.out.clone())
        .ok_or_else(|| CliError::Config("no output directory: set `out` or pass --out".into()))?;
    let runs_dir = out.join("runs");
    create_dir(&runs_dir)?;

    let write_errors = std::sync::Mutex::new(Vec::new());
    let report = run_suite(&cfg.spec, opts.workers, |key, result| {
        let path = runs_dir.join(format!("{}.csv", key.slug()));
        if let Err(e) = write_file(&path, |w| report::write_gini_series(w, result)) {
            write_errors.lock().unwrap().push(e);
        }
    });
    if let Some(e) = write_errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }

    write_file(&out.join("suite_summary.csv"), |w| report::write_suite_summary(w, &report))?;
    write_file(&out.join("suite_means.csv"), |w| report::write_suite_means(w, &report))?;

    if !report.rows.is_empty() && report.failures() == report.rows.len() {
        return Err(CliError::AllRunsFailed(report.rows.len()));
    }
    Ok(report)
}

/// Draws every series CSV onto one SVG chart.
pub fn cmd_plot(inputs: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let mut series = Vec::with_capacity(inputs.len());
    for path in inputs {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let s = Series::from_csv(&plot::series_name(path), file).map_err(|e| match e {
            PlotError::Malformed { message, .. } => CliError::Parse(format!("{}: {message}", path.display())),
            other => CliError::Parse(format!("{}: {other}", path.display())),
        })?;
        series.push(s);
    }
    let svg = plot::render_svg(&series).map_err(|e| CliError::Parse(e.to_string()))?;
    write_file(out, |w| w.write_all(svg.as_bytes()))
}

/// Loads a network file and writes its normalized edge list.
pub fn cmd_convert(input: &Path, format: GraphFormat, out: &Path) -> Result<(usize, usize), CliError> {
    let graph = format.load_path(input).map_err(|e| graph_error(input, e))?;
    write_file(out, |w| graph.write_edge_list(w))?;
    Ok((graph.node_count(), graph.edge_count()))
}
