//! Walk states, node probabilities and transition probabilities.
//!
//! The transition probability `p(i→l; t)` averages the node-`l` probability
//! over the `kᵢ` basis states leaving node `i`; the normalized form divides by
//! the target degree, `P(i→l; t) = p(i→l; t) / k_l`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::operators::WalkOperator;
use crate::parallel::map_indices;

/// Default number of steps for finite-time averages.
pub const DEFAULT_STEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvolutionError {
    #[error("node {node} slot {slot} is not an arc of the graph")]
    InvalidArc { node: usize, slot: usize },
    #[error("node {0} is not in the graph")]
    InvalidNode(usize),
    #[error("averaging window needs at least one step")]
    EmptyWindow,
}

/// Complex amplitudes over the arc basis at a given time step.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
    time: usize,
}

impl WalkState {
    pub fn from_parts(amplitudes: Vec<Complex64>, time: usize) -> Self {
        Self { amplitudes, time }
    }

    /// Unit amplitude on the arc `node → neighbors(node)[slot]`, at `t = 0`.
    pub fn basis(graph: &Graph, node: usize, slot: usize) -> Result<Self, EvolutionError> {
        let arc = graph
            .arc(node, slot)
            .ok_or(EvolutionError::InvalidArc { node, slot })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); graph.arc_count()];
        amplitudes[arc] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, time: 0 })
    }

    /// Equal amplitude `1/√D` on every arc.
    pub fn uniform(graph: &Graph) -> Self {
        let d = graph.arc_count();
        let value = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![value; d],
            time: 0,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `p(i; t) = Σⱼ |ψᵢⱼ(t)|²` for every node.
    pub fn node_probability(&self, graph: &Graph) -> Vec<f64> {
        node_probability_of(graph, &self.amplitudes)
    }
}

pub fn basis_state(graph: &Graph, node: usize, slot: usize) -> Result<WalkState, EvolutionError> {
    WalkState::basis(graph, node, slot)
}

pub fn node_probability(graph: &Graph, state: &WalkState) -> Vec<f64> {
    state.node_probability(graph)
}

pub(crate) fn node_probability_of(graph: &Graph, amplitudes: &[Complex64]) -> Vec<f64> {
    (0..graph.node_count())
        .map(|node| amplitudes[graph.arc_range(node)].iter().map(|a| a.norm_sqr()).sum())
        .collect()
}

fn accumulate_node_probability(graph: &Graph, amplitudes: &[Complex64], into: &mut [f64]) {
    for (node, slot) in into.iter_mut().enumerate() {
        *slot += amplitudes[graph.arc_range(node)]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>();
    }
}

/// Transition probabilities out of one initial node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    /// Initial node, 0-based.
    pub source: usize,
    /// `p(i→l)` for every target `l`.
    pub probability: Vec<f64>,
    /// `P(i→l) = p(i→l) / k_l`.
    pub normalized: Vec<f64>,
}

impl TransitionRow {
    pub fn from_probability(graph: &Graph, source: usize, probability: Vec<f64>) -> Self {
        let normalized = probability
            .iter()
            .enumerate()
            .map(|(l, p)| p / graph.degree(l) as f64)
            .collect();
        Self {
            source,
            probability,
            normalized,
        }
    }

    pub fn total(&self) -> f64 {
        self.probability.iter().sum()
    }
}

/// Which time steps enter a finite-time average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AveragingWindow {
    pub steps: usize,
    /// Average over `t = 0..T−1` instead of the default `t = 1..=T`.
    pub include_initial: bool,
}

impl AveragingWindow {
    pub fn new(steps: usize) -> Self {
        Self {
            steps,
            include_initial: false,
        }
    }

    pub fn with_initial(steps: usize) -> Self {
        Self {
            steps,
            include_initial: true,
        }
    }

    fn first(&self) -> usize {
        usize::from(!self.include_initial)
    }

    fn last(&self) -> usize {
        self.first() + self.steps - 1
    }
}

fn check_node(graph: &Graph, node: usize) -> Result<(), EvolutionError> {
    if node < graph.node_count() {
        Ok(())
    } else {
        Err(EvolutionError::InvalidNode(node))
    }
}

/// Evolves every basis state leaving `source` up to `last` steps and calls
/// `visit(t, amplitudes)` after each step, including `t = 0`.
fn evolve_from(op: &WalkOperator<'_>, source: usize, last: usize, mut visit: impl FnMut(usize, &[Complex64])) {
    let graph = op.graph();
    let d = op.dim();
    let mut current = vec![Complex64::new(0.0, 0.0); d];
    let mut next = vec![Complex64::new(0.0, 0.0); d];
    for arc in graph.arc_range(source) {
        current.fill(Complex64::new(0.0, 0.0));
        current[arc] = Complex64::new(1.0, 0.0);
        visit(0, &current);
        for t in 1..=last {
            op.step_into(&current, &mut next).expect("buffers sized to D");
            std::mem::swap(&mut current, &mut next);
            visit(t, &current);
        }
    }
}

/// `p(i→l; t)` and `P(i→l; t)` at a single time step.
pub fn transition_probability(
    op: &WalkOperator<'_>,
    source: usize,
    time: usize,
) -> Result<TransitionRow, EvolutionError> {
    let graph = op.graph();
    check_node(graph, source)?;
    let mut acc = vec![0.0; graph.node_count()];
    evolve_from(op, source, time, |t, amps| {
        if t == time {
            accumulate_node_probability(graph, amps, &mut acc);
        }
    });
    let k = graph.degree(source) as f64;
    acc.iter_mut().for_each(|p| *p /= k);
    Ok(TransitionRow::from_probability(graph, source, acc))
}

/// Transition rows for every `t = 0..=last`, sharing one set of evolutions.
pub fn transition_series(
    op: &WalkOperator<'_>,
    source: usize,
    last: usize,
) -> Result<Vec<TransitionRow>, EvolutionError> {
    let graph = op.graph();
    check_node(graph, source)?;
    let n = graph.node_count();
    let mut acc = vec![vec![0.0; n]; last + 1];
    evolve_from(op, source, last, |t, amps| {
        accumulate_node_probability(graph, amps, &mut acc[t]);
    });
    let k = graph.degree(source) as f64;
    Ok(acc
        .into_iter()
        .map(|mut row| {
            row.iter_mut().for_each(|p| *p /= k);
            TransitionRow::from_probability(graph, source, row)
        })
        .collect())
}

/// Arithmetic mean of the transition row over the window's time steps.
pub fn finite_time_average(
    op: &WalkOperator<'_>,
    source: usize,
    window: AveragingWindow,
) -> Result<TransitionRow, EvolutionError> {
    let graph = op.graph();
    check_node(graph, source)?;
    if window.steps == 0 {
        return Err(EvolutionError::EmptyWindow);
    }
    let mut acc = vec![0.0; graph.node_count()];
    let first = window.first();
    evolve_from(op, source, window.last(), |t, amps| {
        if t >= first {
            accumulate_node_probability(graph, amps, &mut acc);
        }
    });
    let scale = 1.0 / (graph.degree(source) as f64 * window.steps as f64);
    acc.iter_mut().for_each(|p| *p *= scale);
    Ok(TransitionRow::from_probability(graph, source, acc))
}

/// Square matrix of averaged transition probabilities, one row per initial node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub size: usize,
    /// Row-major `p(i→l)`.
    pub probability: Vec<f64>,
    /// Row-major `P(i→l)`.
    pub normalized: Vec<f64>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<TransitionRow>) -> Self {
        let size = rows.len();
        let mut probability = Vec::with_capacity(size * size);
        let mut normalized = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.source, i, "rows must be in node order");
            assert_eq!(row.probability.len(), size);
            probability.extend(row.probability);
            normalized.extend(row.normalized);
        }
        Self {
            size,
            probability,
            normalized,
        }
    }

    /// Builds a matrix from row-major normalized values and node degrees.
    pub fn from_normalized(normalized: Vec<f64>, degrees: &[usize]) -> Self {
        let size = degrees.len();
        assert_eq!(normalized.len(), size * size);
        let probability = normalized
            .iter()
            .enumerate()
            .map(|(idx, v)| v * degrees[idx % size] as f64)
            .collect();
        Self {
            size,
            probability,
            normalized,
        }
    }

    pub fn p(&self, source: usize, target: usize) -> f64 {
        self.probability[source * self.size + target]
    }

    /// Normalized entry `P(source → target)`.
    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.normalized[source * self.size + target]
    }

    pub fn normalized_row(&self, source: usize) -> &[f64] {
        &self.normalized[source * self.size..(source + 1) * self.size]
    }

    pub fn probability_row(&self, source: usize) -> &[f64] {
        &self.probability[source * self.size..(source + 1) * self.size]
    }

    pub fn max_normalized(&self) -> f64 {
        self.normalized.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `|P(i→l) − P(l→i)|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.size;
        (0..n)
            .flat_map(|i| (0..n).map(move |l| (i, l)))
            .map(|(i, l)| (self.get(i, l) - self.get(l, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Σ_l p(i→l) − 1|` over rows.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.size)
            .map(|i| (self.probability_row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference of the normalized matrices.
    pub fn max_normalized_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.size, other.size);
        self.normalized
            .iter()
            .zip(&other.normalized)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Finite-time averages for every initial node.
pub fn finite_time_matrix(op: &WalkOperator<'_>, window: AveragingWindow) -> Result<TransitionMatrix, EvolutionError> {
    if window.steps == 0 {
        return Err(EvolutionError::EmptyWindow);
    }
    let n = op.graph().node_count();
    let rows = map_indices(n, |i| finite_time_average(op, i, window).expect("node and window validated"));
    Ok(TransitionMatrix::from_rows(rows))
}
