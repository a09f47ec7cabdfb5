//! Run configuration, dispatch and machine-readable output.
//!
//! Node ids in every document are 1-based. Floats are rounded to 12
//! significant digits before serialization, so identical runs produce
//! byte-identical output.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{normalized_stationary, relaxation_trace, stationary, RELAXATION_TV};
use crate::community::{self, AverageSource, DEFAULT_MARGINAL_BAND};
use crate::datasets::Builtin;
use crate::evolution::{finite_time_matrix, transition_series, AveragingWindow, TransitionMatrix, DEFAULT_STEPS};
use crate::graph::Graph;
use crate::loaders::{load_edge_list, load_pajek};
use crate::operators::{CoinKind, OperatorError, WalkOperator, DEFAULT_DENSE_CAP};
use crate::spectral::{
    argument_histogram, decompose, degeneracy_report, infinite_time_matrix, ipr, ArgumentHistogram,
    DecompositionChecks, DegeneracyReport, SpectralDecomposition, SpectralError, DEFAULT_DEGENERACY_TOL,
};

/// Largest `D` for which averaging defaults to the infinite-time path.
pub const AUTO_INFINITE_MAX_ARCS: usize = 2000;
pub const DEFAULT_BINS: usize = 20;

/// Failure of a run, grouped by process exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Data(_) => 3,
            Self::Numerical(_) => 4,
        }
    }
}

impl From<SpectralError> for RunError {
    fn from(err: SpectralError) -> Self {
        match err {
            SpectralError::Operator(e) => e.into(),
            SpectralError::InvalidEigenstate { .. }
            | SpectralError::TooFewBins(_)
            | SpectralError::NotACycle(_)
            | SpectralError::LoopTooLong(_)
            | SpectralError::BadPattern { .. } => Self::Config(err.to_string()),
            SpectralError::Graph(_) | SpectralError::DimensionMismatch { .. } => Self::Data(err.to_string()),
            _ => Self::Numerical(err.to_string()),
        }
    }
}

impl From<OperatorError> for RunError {
    fn from(err: OperatorError) -> Self {
        match err {
            OperatorError::DenseCapExceeded { dim, cap } => Self::Config(format!(
                "dense operator would be {dim}×{dim}, above the cap of {cap}; raise --dense-cap or ARCWALK_DENSE_CAP"
            )),
            other => Self::Data(other.to_string()),
        }
    }
}

/// Where the graph comes from: `builtin:NAME`, `edges:PATH` or `pajek:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    Builtin(Builtin),
    EdgeList(PathBuf),
    Pajek(PathBuf),
}

impl FromStr for GraphSource {
    type Err = String;

    /// A bare builtin name such as `karate` is accepted too.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some(("builtin", name)) => name.parse().map(Self::Builtin).map_err(|e| e.to_string()),
            Some(("edges", path)) if !path.is_empty() => Ok(Self::EdgeList(path.into())),
            Some(("pajek", path)) if !path.is_empty() => Ok(Self::Pajek(path.into())),
            _ => s.parse().map(Self::Builtin).map_err(|_| {
                format!("invalid graph source {s:?} (expected builtin:NAME, edges:PATH or pajek:PATH)")
            }),
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Builtin(b) => write!(f, "builtin:{b}"),
            Self::EdgeList(p) => write!(f, "edges:{}", p.display()),
            Self::Pajek(p) => write!(f, "pajek:{}", p.display()),
        }
    }
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph, RunError> {
        let read = |path: &PathBuf| {
            std::fs::read_to_string(path).map_err(|e| RunError::Data(format!("cannot read {}: {e}", path.display())))
        };
        let parsed = match self {
            Self::Builtin(b) => return b.build().map_err(|e| RunError::Config(e.to_string())),
            Self::EdgeList(path) => load_edge_list(&read(path)?),
            Self::Pajek(path) => load_pajek(&read(path)?),
        };
        parsed.map_err(|e| RunError::Data(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Evolve,
    Average,
    Spectrum,
    Detect,
    Sweep,
    Classical,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Evolve => "evolve",
            Self::Average => "average",
            Self::Spectrum => "spectrum",
            Self::Detect => "detect",
            Self::Sweep => "sweep",
            Self::Classical => "classical",
        })
    }
}

/// Which time average feeds `average`, `detect` and `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Infinite-time for `D ≤ 2000`, finite-time otherwise.
    #[default]
    Auto,
    Finite,
    Infinite,
}

impl FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "finite" | "average-finite" => Ok(Self::Finite),
            "infinite" | "average-infinite" => Ok(Self::Infinite),
            _ => Err(format!("unknown averaging mode {s:?} (expected average-finite or average-infinite)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `q = 1/D`.
    Auto,
    Value(f64),
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        let q: f64 = s.parse().map_err(|_| format!("invalid threshold {s:?}"))?;
        if q > 0.0 && q.is_finite() {
            Ok(Self::Value(q))
        } else {
            Err(format!("threshold must be positive, got {s}"))
        }
    }
}

impl Threshold {
    pub fn resolve(self, graph: &Graph) -> f64 {
        match self {
            Self::Auto => 1.0 / graph.arc_count() as f64,
            Self::Value(q) => q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub coin: CoinKind,
    pub task: Task,
    pub averaging: Averaging,
    /// 1-based start nodes for `evolve` and `classical`.
    pub start: Vec<usize>,
    pub steps: usize,
    pub include_initial: bool,
    pub threshold: Threshold,
    pub q_list: Vec<f64>,
    pub dense_cap: usize,
    pub degeneracy_tol: f64,
    pub bins: usize,
    pub marginal_band: f64,
}

impl RunConfig {
    pub fn new(graph: GraphSource, task: Task) -> Self {
        Self {
            graph,
            coin: CoinKind::Fourier,
            task,
            averaging: Averaging::Auto,
            start: vec![1],
            steps: DEFAULT_STEPS,
            include_initial: false,
            threshold: Threshold::Auto,
            q_list: Vec::new(),
            dense_cap: DEFAULT_DENSE_CAP,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            bins: DEFAULT_BINS,
            marginal_band: DEFAULT_MARGINAL_BAND,
        }
    }

    /// Checks everything that does not need the graph.
    pub fn validate(&self) -> Result<(), RunError> {
        let fail = |msg: String| Err(RunError::Config(msg));
        if self.steps == 0 {
            return fail("--steps must be at least 1".into());
        }
        if matches!(self.task, Task::Evolve | Task::Classical) && self.start.is_empty() {
            return fail("--start needs at least one node".into());
        }
        if self.start.contains(&0) {
            return fail("node ids are 1-based".into());
        }
        if self.task == Task::Sweep {
            if self.q_list.is_empty() {
                return fail("sweep needs --q-list".into());
            }
            if self.q_list.iter().any(|q| !(*q > 0.0 && q.is_finite())) {
                return fail("--q-list values must be positive".into());
            }
            if self.q_list.windows(2).any(|w| w[0] >= w[1]) {
                return fail("--q-list must be strictly ascending".into());
            }
        }
        if self.degeneracy_tol.is_nan() || self.degeneracy_tol <= 0.0 {
            return fail("--degeneracy-tol must be positive".into());
        }
        if self.bins < 2 {
            return fail("--bins must be at least 2".into());
        }
        if self.marginal_band.is_nan() || self.marginal_band < 0.0 {
            return fail("marginal band must be non-negative".into());
        }
        Ok(())
    }

    fn resolved_averaging(&self, graph: &Graph) -> Averaging {
        match self.averaging {
            Averaging::Auto if graph.arc_count() <= AUTO_INFINITE_MAX_ARCS => Averaging::Infinite,
            Averaging::Auto => Averaging::Finite,
            other => other,
        }
    }

    fn window(&self) -> AveragingWindow {
        AveragingWindow {
            steps: self.steps,
            include_initial: self.include_initial,
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_all(values: &[f64]) -> Vec<f64> {
    values.iter().copied().map(round_sig).collect()
}

fn fmt_float(x: f64) -> String {
    format!("{:?}", round_sig(x))
}

/// CSV heatmap: a header of column ids, then one line per row id.
pub fn emit_heatmap_csv(rows: &[Vec<f64>], row_ids: &[usize], col_ids: &[usize]) -> String {
    let mut lines = Vec::with_capacity(rows.len() + 1);
    let header: Vec<String> = std::iter::once("l".to_string())
        .chain(col_ids.iter().map(|id| id.to_string()))
        .collect();
    lines.push(header.join(","));
    for (row, id) in rows.iter().zip(row_ids) {
        let cells: Vec<String> = std::iter::once(id.to_string()).chain(row.iter().map(|&v| fmt_float(v))).collect();
        lines.push(cells.join(","));
    }
    lines.join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub source: String,
    pub nodes: usize,
    pub arcs: usize,
    pub edges: usize,
    pub betti: usize,
    pub bipartite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub averaging: Option<AverageSource>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub start: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degeneracy_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub marginal_band: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: Task,
    pub coin: CoinKind,
    pub graph: GraphStats,
    pub parameters: Parameters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: usize,
    pub probability: Vec<f64>,
    pub normalized: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: usize,
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPayload {
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
    pub probability: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
    pub max_asymmetry: f64,
    pub max_row_sum_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub argument: f64,
    pub group: usize,
    pub ipr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPayload {
    pub eigenvalues: Vec<Eigenpair>,
    pub degeneracy: DegeneracyReport,
    pub histogram: ArgumentHistogram,
    pub mean_ipr: f64,
    pub checks: DecompositionChecks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityEntry {
    pub hub: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub node: usize,
    pub community: usize,
    pub hub: usize,
    pub margin: f64,
    /// Hubs against which the node lies inside the marginal band.
    pub marginal_against: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPayload {
    pub threshold: f64,
    pub hubs: Vec<usize>,
    pub communities: Vec<CommunityEntry>,
    pub nodes: Vec<NodeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub count: usize,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrace {
    pub start: usize,
    pub relaxation_step: Option<usize>,
    pub tv_distance: Vec<f64>,
    /// Distribution after the last step.
    pub last: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPayload {
    pub stationary: Vec<f64>,
    pub normalized_stationary: Vec<f64>,
    pub relaxation_tv: f64,
    pub traces: Vec<ClassicalTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Evolve { trajectories: Vec<Trajectory> },
    Average(MatrixPayload),
    Spectrum(SpectrumPayload),
    Detect(PartitionPayload),
    Sweep { rows: Vec<SweepRow> },
    Classical(ClassicalPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub metadata: Metadata,
    pub payload: Payload,
}

impl OutputDocument {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = match &self.payload {
            Payload::Evolve { trajectories } => {
                let mut lines = vec!["start,t,l,p,P".to_string()];
                for traj in trajectories {
                    for frame in &traj.frames {
                        for (l, (p, pn)) in frame.probability.iter().zip(&frame.normalized).enumerate() {
                            lines.push(format!("{},{},{},{},{}", traj.start, frame.t, l + 1, fmt_float(*p), fmt_float(*pn)));
                        }
                    }
                }
                lines.join("\n")
            }
            Payload::Average(m) => emit_heatmap_csv(&m.normalized, &m.row_ids, &m.col_ids),
            Payload::Spectrum(s) => {
                let mut lines = vec!["index,re,im,argument,group,ipr".to_string()];
                for e in &s.eigenvalues {
                    lines.push(format!(
                        "{},{},{},{},{},{}",
                        e.index,
                        fmt_float(e.re),
                        fmt_float(e.im),
                        fmt_float(e.argument),
                        e.group,
                        fmt_float(e.ipr)
                    ));
                }
                lines.join("\n")
            }
            Payload::Detect(p) => {
                let mut lines = vec!["node,community,hub,margin,marginal_against".to_string()];
                for n in &p.nodes {
                    let against: Vec<String> = n.marginal_against.iter().map(|h| h.to_string()).collect();
                    lines.push(format!(
                        "{},{},{},{},{}",
                        n.node,
                        n.community,
                        n.hub,
                        fmt_float(n.margin),
                        against.join(";")
                    ));
                }
                lines.join("\n")
            }
            Payload::Sweep { rows } => {
                let mut lines = vec!["q,count,sizes".to_string()];
                for r in rows {
                    let sizes: Vec<String> = r.sizes.iter().map(|s| s.to_string()).collect();
                    lines.push(format!("{},{},{}", fmt_float(r.threshold), r.count, sizes.join(";")));
                }
                lines.join("\n")
            }
            Payload::Classical(c) => {
                let mut lines = vec!["start,t,tv_distance".to_string()];
                for trace in &c.traces {
                    for (idx, tv) in trace.tv_distance.iter().enumerate() {
                        lines.push(format!("{},{},{}", trace.start, idx + 1, fmt_float(*tv)));
                    }
                }
                lines.join("\n")
            }
        };
        out.push('\n');
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn graph_stats(config: &RunConfig, graph: &Graph) -> Result<GraphStats, RunError> {
    Ok(GraphStats {
        source: config.graph.to_string(),
        nodes: graph.node_count(),
        arcs: graph.arc_count(),
        edges: graph.edge_count(),
        betti: graph.betti_number().map_err(|e| RunError::Data(e.to_string()))?,
        bipartite: graph.is_bipartite(),
    })
}

fn start_nodes(config: &RunConfig, graph: &Graph) -> Result<Vec<usize>, RunError> {
    config
        .start
        .iter()
        .map(|&id| {
            if id >= 1 && id <= graph.node_count() {
                Ok(id - 1)
            } else {
                Err(RunError::Config(format!("start node {id} is not in 1..={}", graph.node_count())))
            }
        })
        .collect()
}

fn decomposition(config: &RunConfig, graph: &Graph) -> Result<SpectralDecomposition, RunError> {
    let dense = WalkOperator::new(graph, config.coin).materialize_dense(config.dense_cap)?;
    Ok(decompose(&dense, config.degeneracy_tol)?)
}

fn averaged_matrix(config: &RunConfig, graph: &Graph) -> Result<(TransitionMatrix, AverageSource), RunError> {
    match config.resolved_averaging(graph) {
        Averaging::Infinite => {
            let dec = decomposition(config, graph)?;
            Ok((infinite_time_matrix(&dec, graph)?, AverageSource::InfiniteTime))
        }
        _ => {
            let op = WalkOperator::new(graph, config.coin);
            let matrix = finite_time_matrix(&op, config.window()).map_err(|e| RunError::Config(e.to_string()))?;
            let source = AverageSource::FiniteTime {
                steps: config.steps,
                include_initial: config.include_initial,
            };
            Ok((matrix, source))
        }
    }
}

fn matrix_rows(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    values.chunks(n).map(round_all).collect()
}

/// Executes one configured analysis.
pub fn run(config: &RunConfig) -> Result<OutputDocument, RunError> {
    config.validate()?;
    let graph = config.graph.load()?;
    let n = graph.node_count();
    let ids: Vec<usize> = (1..=n).collect();
    let mut parameters = Parameters {
        averaging: None,
        start: None,
        steps: None,
        threshold: None,
        q_list: None,
        degeneracy_tol: None,
        bins: None,
        marginal_band: None,
    };

    let payload = match config.task {
        Task::Evolve => {
            let op = WalkOperator::new(&graph, config.coin);
            let starts = start_nodes(config, &graph)?;
            parameters.start = Some(config.start.clone());
            parameters.steps = Some(config.steps);
            let trajectories = starts
                .iter()
                .map(|&s| {
                    let rows = transition_series(&op, s, config.steps).expect("start validated");
                    Trajectory {
                        start: s + 1,
                        frames: rows
                            .into_iter()
                            .enumerate()
                            .map(|(t, row)| Frame {
                                t,
                                probability: round_all(&row.probability),
                                normalized: round_all(&row.normalized),
                            })
                            .collect(),
                    }
                })
                .collect();
            Payload::Evolve { trajectories }
        }
        Task::Average => {
            let (matrix, source) = averaged_matrix(config, &graph)?;
            record_source(&mut parameters, source, config);
            Payload::Average(MatrixPayload {
                row_ids: ids.clone(),
                col_ids: ids,
                probability: matrix_rows(&matrix.probability, n),
                normalized: matrix_rows(&matrix.normalized, n),
                max_asymmetry: round_sig(matrix.asymmetry()),
                max_row_sum_error: round_sig(matrix.row_sum_error()),
            })
        }
        Task::Spectrum => {
            let dec = decomposition(config, &graph)?;
            parameters.degeneracy_tol = Some(config.degeneracy_tol);
            parameters.bins = Some(config.bins);
            let iprs = ipr(&dec, &graph)?;
            let mut group_of = vec![0; dec.dim()];
            for (g, members) in dec.groups().iter().enumerate() {
                members.iter().for_each(|&m| group_of[m] = g);
            }
            let eigenvalues = (0..dec.dim())
                .map(|mu| Eigenpair {
                    index: mu + 1,
                    re: round_sig(dec.eigenvalues()[mu].re),
                    im: round_sig(dec.eigenvalues()[mu].im),
                    argument: round_sig(dec.arguments()[mu]),
                    group: group_of[mu] + 1,
                    ipr: round_sig(iprs[mu]),
                })
                .collect();
            let mut degeneracy = degeneracy_report(&dec, &graph)?;
            for g in &mut degeneracy.groups {
                g.re = round_sig(g.re);
                g.im = round_sig(g.im);
                g.argument = round_sig(g.argument);
            }
            let mut histogram = argument_histogram(&dec, config.bins)?;
            histogram.edges = round_all(&histogram.edges);
            let checks = dec.checks();
            Payload::Spectrum(SpectrumPayload {
                eigenvalues,
                degeneracy,
                histogram,
                mean_ipr: round_sig(iprs.iter().sum::<f64>() / iprs.len() as f64),
                checks: DecompositionChecks {
                    input_unitarity: round_sig(checks.input_unitarity),
                    max_residual: round_sig(checks.max_residual),
                    max_modulus_error: round_sig(checks.max_modulus_error),
                    max_orthonormality_error: round_sig(checks.max_orthonormality_error),
                },
            })
        }
        Task::Detect => {
            let (matrix, source) = averaged_matrix(config, &graph)?;
            record_source(&mut parameters, source, config);
            let q = config.threshold.resolve(&graph);
            parameters.threshold = Some(round_sig(q));
            parameters.marginal_band = Some(config.marginal_band);
            let partition =
                community::detect(&matrix, &graph, q, source).map_err(|e| RunError::Config(e.to_string()))?;
            let margins = community::margin_report(&partition, &matrix, config.marginal_band);
            let communities = partition
                .communities()
                .into_iter()
                .zip(&partition.hubs)
                .map(|(members, &hub)| CommunityEntry {
                    hub: hub + 1,
                    members: members.iter().map(|m| m + 1).collect(),
                })
                .collect();
            let nodes = margins
                .iter()
                .map(|m| NodeEntry {
                    node: m.node + 1,
                    community: m.community + 1,
                    hub: partition.hubs[m.community] + 1,
                    margin: round_sig(partition.margins[m.node]),
                    marginal_against: m.against.iter().filter(|h| h.marginal).map(|h| h.hub + 1).collect(),
                })
                .collect();
            Payload::Detect(PartitionPayload {
                threshold: round_sig(q),
                hubs: partition.hubs.iter().map(|h| h + 1).collect(),
                communities,
                nodes,
            })
        }
        Task::Sweep => {
            let (matrix, source) = averaged_matrix(config, &graph)?;
            record_source(&mut parameters, source, config);
            parameters.q_list = Some(config.q_list.clone());
            let result = community::sweep(&matrix, &graph, &config.q_list, source)
                .map_err(|e| RunError::Config(e.to_string()))?;
            Payload::Sweep {
                rows: result
                    .entries
                    .into_iter()
                    .map(|e| SweepRow {
                        threshold: e.threshold,
                        count: e.count,
                        sizes: e.sizes,
                    })
                    .collect(),
            }
        }
        Task::Classical => {
            let starts = start_nodes(config, &graph)?;
            parameters.start = Some(config.start.clone());
            parameters.steps = Some(config.steps);
            let data = |e: crate::classical::ClassicalError| RunError::Data(e.to_string());
            let traces = starts
                .iter()
                .map(|&s| {
                    let trace = relaxation_trace(&graph, s, config.steps).map_err(data)?;
                    Ok(ClassicalTrace {
                        start: s + 1,
                        relaxation_step: trace.relaxation_step,
                        tv_distance: round_all(&trace.tv_distance),
                        last: round_all(&trace.distributions.last().expect("steps >= 1").probability),
                    })
                })
                .collect::<Result<_, RunError>>()?;
            Payload::Classical(ClassicalPayload {
                stationary: round_all(&stationary(&graph).map_err(data)?),
                normalized_stationary: round_all(&normalized_stationary(&graph).map_err(data)?),
                relaxation_tv: RELAXATION_TV,
                traces,
            })
        }
    };

    Ok(OutputDocument {
        metadata: Metadata {
            tool: "arcwalk".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: config.task,
            coin: config.coin,
            graph: graph_stats(config, &graph)?,
            parameters,
        },
        payload,
    })
}

fn record_source(parameters: &mut Parameters, source: AverageSource, config: &RunConfig) {
    parameters.averaging = Some(source);
    if matches!(source, AverageSource::InfiniteTime) {
        parameters.degeneracy_tol = Some(config.degeneracy_tol);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_identity() {
        let csv = emit_heatmap_csv(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1, 2], &[1, 2]);
        assert_eq!(csv, "l,1,2\n1,1.0,0.0\n2,0.0,1.0");
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(2.0 / 3.0 * 1e-5), 6.66666666667e-6);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-1234.5678901234567), -1234.56789012);
    }

    #[test]
    fn parse_sources_and_flags() {
        assert_eq!(
            "builtin:karate".parse::<GraphSource>(),
            Ok(GraphSource::Builtin(Builtin::Karate))
        );
        assert_eq!("cycle(5)".parse::<GraphSource>(), Ok(GraphSource::Builtin(Builtin::Cycle(5))));
        assert_eq!(
            "pajek:usair97.net".parse::<GraphSource>(),
            Ok(GraphSource::Pajek("usair97.net".into()))
        );
        assert!("edges:".parse::<GraphSource>().is_err());
        assert!("builtin:lattice".parse::<GraphSource>().is_err());
        assert_eq!("auto".parse::<Threshold>(), Ok(Threshold::Auto));
        assert_eq!("0.5".parse::<Threshold>(), Ok(Threshold::Value(0.5)));
        assert!("-1".parse::<Threshold>().is_err());
        assert!("0".parse::<Threshold>().is_err());
        assert_eq!("average-infinite".parse::<Averaging>(), Ok(Averaging::Infinite));
        assert_eq!("CSV".parse::<OutputFormat>(), Ok(OutputFormat::Csv));
    }

    #[test]
    fn validation_and_exit_codes() {
        let mut config = RunConfig::new(GraphSource::Builtin(Builtin::Karate), Task::Sweep);
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
        config.q_list = vec![0.2, 0.1];
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);

        let mut config = RunConfig::new(GraphSource::Builtin(Builtin::Karate), Task::Evolve);
        config.start = vec![35];
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);

        let config = RunConfig::new(GraphSource::EdgeList("/nonexistent/graph.edges".into()), Task::Average);
        assert_eq!(run(&config).unwrap_err().exit_code(), 3);

        let mut config = RunConfig::new(GraphSource::Builtin(Builtin::Karate), Task::Spectrum);
        config.dense_cap = 10;
        assert_eq!(run(&config).unwrap_err().exit_code(), 2);
        assert_eq!(RunError::from(SpectralError::NoConvergence).exit_code(), 4);
    }

    #[test]
    fn auto_averaging_switches_on_size() {
        let config = RunConfig::new(GraphSource::Builtin(Builtin::Karate), Task::Detect);
        assert_eq!(config.resolved_averaging(&crate::datasets::karate()), Averaging::Infinite);
        let big = crate::datasets::cycle(1001).unwrap();
        assert_eq!(config.resolved_averaging(&big), Averaging::Finite);
    }

    #[test]
    fn documents_round_trip() {
        let mut config = RunConfig::new(GraphSource::Builtin(Builtin::House), Task::Evolve);
        config.steps = 5;
        for task in [Task::Evolve, Task::Average, Task::Spectrum, Task::Detect, Task::Classical] {
            config.task = task;
            let doc = run(&config).unwrap();
            let json = doc.to_json();
            assert_eq!(OutputDocument::from_json(&json).unwrap(), doc, "{task}");
            assert_eq!(run(&config).unwrap().to_json(), json);
            assert!(!doc.to_csv().is_empty());
        }
    }
}
