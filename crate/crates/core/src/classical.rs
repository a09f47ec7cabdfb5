//! Classical random walk on the same graph, evolved as an exact distribution.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

/// Total-variation distance below which the walk counts as relaxed.
pub const RELAXATION_TV: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("distribution has {found} entries, graph has {expected} nodes")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("start node {0} out of range")]
    InvalidNode(usize),
    #[error("trace needs at least one step")]
    NoSteps,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Probability over nodes at time `time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDistribution {
    pub probability: Vec<f64>,
    pub time: usize,
}

impl ClassicalDistribution {
    pub fn delta(graph: &Graph, node: usize) -> Result<Self, ClassicalError> {
        if node >= graph.node_count() {
            return Err(ClassicalError::InvalidNode(node));
        }
        let mut probability = vec![0.0; graph.node_count()];
        probability[node] = 1.0;
        Ok(Self { probability, time: 0 })
    }

    pub fn total(&self) -> f64 {
        self.probability.iter().sum()
    }

    pub fn total_variation(&self, other: &[f64]) -> f64 {
        0.5 * self.probability.iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// One step: `p'(l) = Σ_{i ~ l} p(i)/kᵢ`.
pub fn classical_step(graph: &Graph, dist: &ClassicalDistribution) -> Result<ClassicalDistribution, ClassicalError> {
    let n = graph.node_count();
    if dist.probability.len() != n {
        return Err(ClassicalError::DimensionMismatch {
            expected: n,
            found: dist.probability.len(),
        });
    }
    let mut next = vec![0.0; n];
    for (i, &p) in dist.probability.iter().enumerate() {
        let share = p / graph.degree(i) as f64;
        for &l in graph.neighbors(i) {
            next[l] += share;
        }
    }
    Ok(ClassicalDistribution {
        probability: next,
        time: dist.time + 1,
    })
}

/// Stationary distribution `k_l / D`.
pub fn stationary(graph: &Graph) -> Result<Vec<f64>, ClassicalError> {
    graph.require_connected()?;
    let d = graph.arc_count() as f64;
    Ok(graph.degrees().iter().map(|&k| k as f64 / d).collect())
}

/// Stationary distribution divided by degree; `1/D` at every node.
pub fn normalized_stationary(graph: &Graph) -> Result<Vec<f64>, ClassicalError> {
    Ok(stationary(graph)?
        .iter()
        .zip(graph.degrees())
        .map(|(p, k)| p / k as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTrace {
    pub start: usize,
    /// Distributions at `t = 1..=T`.
    pub distributions: Vec<ClassicalDistribution>,
    /// Total-variation distance to the stationary distribution at each step.
    pub tv_distance: Vec<f64>,
    /// First step with distance below [`RELAXATION_TV`], if reached.
    pub relaxation_step: Option<usize>,
}

pub fn relaxation_trace(graph: &Graph, start: usize, steps: usize) -> Result<RelaxationTrace, ClassicalError> {
    if steps == 0 {
        return Err(ClassicalError::NoSteps);
    }
    let target = stationary(graph)?;
    let mut current = ClassicalDistribution::delta(graph, start)?;
    let mut distributions = Vec::with_capacity(steps);
    let mut tv_distance = Vec::with_capacity(steps);
    for _ in 0..steps {
        current = classical_step(graph, &current)?;
        tv_distance.push(current.total_variation(&target));
        distributions.push(current.clone());
    }
    let relaxation_step = tv_distance.iter().position(|&tv| tv < RELAXATION_TV).map(|idx| idx + 1);
    Ok(RelaxationTrace {
        start,
        distributions,
        tv_distance,
        relaxation_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    #[test]
    fn path_swaps() {
        let g = datasets::path(2).unwrap();
        let d = ClassicalDistribution::delta(&g, 0).unwrap();
        assert_eq!(classical_step(&g, &d).unwrap().probability, vec![0.0, 1.0]);
    }

    #[test]
    fn stationary_is_fixed() {
        let g = datasets::karate();
        let pi = stationary(&g).unwrap();
        let next = classical_step(&g, &ClassicalDistribution { probability: pi.clone(), time: 0 }).unwrap();
        let drift = next.probability.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-12);
        assert!(normalized_stationary(&g).unwrap().iter().all(|&v| (v - 1.0 / 156.0).abs() < 1e-12));
    }

    #[test]
    fn bipartite_cycle_never_relaxes() {
        let g = datasets::cycle(4).unwrap();
        let trace = relaxation_trace(&g, 0, 50).unwrap();
        assert_eq!(trace.relaxation_step, None);
        assert!(trace.tv_distance.iter().all(|&tv| (tv - 0.5).abs() < 1e-12));
    }

    #[test]
    fn errors() {
        let g = datasets::cycle(4).unwrap();
        let bad = ClassicalDistribution { probability: vec![1.0], time: 0 };
        assert!(matches!(classical_step(&g, &bad), Err(ClassicalError::DimensionMismatch { .. })));
        assert_eq!(relaxation_trace(&g, 0, 0), Err(ClassicalError::NoSteps));
        assert_eq!(relaxation_trace(&g, 9, 3), Err(ClassicalError::InvalidNode(9)));
        let disconnected = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(stationary(&disconnected), Err(ClassicalError::Graph(_))));
    }
}
