//! Threshold community detection on averaged, degree-normalized transition
//! probabilities.
//!
//! Candidates are visited in order of decreasing degree (ties by lower id).
//! An unclassified candidate becomes a hub and collects every unclassified
//! node `l` with `P̄(hub→l) > q`. A candidate that was already absorbed into
//! some community instead adds its own over-threshold nodes to that
//! community. The sweep stops once every node is assigned. When two hubs both
//! exceed `q` on a node, the one visited first keeps it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::TransitionMatrix;
use crate::graph::Graph;

/// Default half-width of the marginal band, as a fraction of `q`.
pub const DEFAULT_MARGINAL_BAND: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommunityError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),
    #[error("matrix is {found}×{found} but the graph has {expected} nodes")]
    SizeMismatch { expected: usize, found: usize },
    #[error("threshold list is empty")]
    EmptySweep,
    #[error("threshold list must be strictly ascending")]
    UnsortedSweep,
}

/// Which average the partition was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AverageSource {
    InfiniteTime,
    FiniteTime { steps: usize, include_initial: bool },
}

impl fmt::Display for AverageSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InfiniteTime => f.write_str("infinite-time"),
            Self::FiniteTime { steps, .. } => write!(f, "finite-time({steps})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Hub of each community (0-based node ids), in creation order.
    pub hubs: Vec<usize>,
    /// Community index of every node.
    pub assignment: Vec<usize>,
    /// `P̄(hub→l) − q` against the hub of `l`'s own community.
    pub margins: Vec<f64>,
    pub threshold: f64,
    pub source: AverageSource,
}

impl CommunityPartition {
    pub fn len(&self) -> usize {
        self.hubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.hubs.len()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.hubs.len()];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }
}

/// Node visiting order: degree descending, then id ascending.
pub fn candidate_order(degrees: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
    order
}

fn check_threshold(q: f64) -> Result<(), CommunityError> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(CommunityError::InvalidThreshold(q))
    }
}

pub fn detect(
    matrix: &TransitionMatrix,
    graph: &Graph,
    q: f64,
    source: AverageSource,
) -> Result<CommunityPartition, CommunityError> {
    if matrix.size != graph.node_count() {
        return Err(CommunityError::SizeMismatch {
            expected: graph.node_count(),
            found: matrix.size,
        });
    }
    detect_with_degrees(matrix, &graph.degrees(), q, source)
}

/// [`detect`] against an explicit degree sequence.
pub fn detect_with_degrees(
    matrix: &TransitionMatrix,
    degrees: &[usize],
    q: f64,
    source: AverageSource,
) -> Result<CommunityPartition, CommunityError> {
    let n = degrees.len();
    if n == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    if matrix.size != n {
        return Err(CommunityError::SizeMismatch {
            expected: n,
            found: matrix.size,
        });
    }
    check_threshold(q)?;

    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut hubs = Vec::new();
    let mut remaining = n;
    for candidate in candidate_order(degrees) {
        if remaining == 0 {
            break;
        }
        let community = match assignment[candidate] {
            Some(c) => c,
            None => {
                hubs.push(candidate);
                assignment[candidate] = Some(hubs.len() - 1);
                remaining -= 1;
                hubs.len() - 1
            }
        };
        let row = matrix.normalized_row(candidate);
        for (l, slot) in assignment.iter_mut().enumerate() {
            if slot.is_none() && row[l] > q {
                *slot = Some(community);
                remaining -= 1;
            }
        }
    }

    let assignment: Vec<usize> = assignment.into_iter().map(|c| c.expect("every node is visited")).collect();
    let margins = assignment
        .iter()
        .enumerate()
        .map(|(l, &c)| matrix.get(hubs[c], l) - q)
        .collect();
    Ok(CommunityPartition {
        hubs,
        assignment,
        margins,
        threshold: q,
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub threshold: f64,
    pub count: usize,
    /// Community sizes in creation order.
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
    pub source: AverageSource,
}

/// Runs [`detect`] for each threshold in a strictly ascending list.
pub fn sweep(
    matrix: &TransitionMatrix,
    graph: &Graph,
    thresholds: &[f64],
    source: AverageSource,
) -> Result<SweepResult, CommunityError> {
    if thresholds.is_empty() {
        return Err(CommunityError::EmptySweep);
    }
    for &q in thresholds {
        check_threshold(q)?;
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CommunityError::UnsortedSweep);
    }
    let partitions = crate::parallel::map_indices(thresholds.len(), |idx| {
        detect(matrix, graph, thresholds[idx], source)
    });
    let entries = partitions
        .into_iter()
        .map(|p| {
            p.map(|p| SweepEntry {
                threshold: p.threshold,
                count: p.len(),
                sizes: p.sizes(),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepResult { entries, source })
}

/// `P̄(hub→node) − q` for one node against one hub.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubMargin {
    pub hub: usize,
    pub margin: f64,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMargins {
    pub node: usize,
    pub community: usize,
    pub against: Vec<HubMargin>,
}

impl NodeMargins {
    pub fn is_marginal(&self) -> bool {
        self.against.iter().any(|m| m.marginal)
    }

    pub fn against_hub(&self, hub: usize) -> Option<&HubMargin> {
        self.against.iter().find(|m| m.hub == hub)
    }
}

/// Margins of every node against every hub. A margin with
/// `|margin| < band · q` is flagged as marginal.
pub fn margin_report(partition: &CommunityPartition, matrix: &TransitionMatrix, band: f64) -> Vec<NodeMargins> {
    let q = partition.threshold;
    (0..partition.assignment.len())
        .map(|node| NodeMargins {
            node,
            community: partition.assignment[node],
            against: partition
                .hubs
                .iter()
                .map(|&hub| {
                    let margin = matrix.get(hub, node) - q;
                    HubMargin {
                        hub,
                        margin,
                        marginal: hub != node && margin.abs() < band * q,
                    }
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, entries: &[(usize, usize, f64)], base: f64) -> TransitionMatrix {
        let mut normalized = vec![base; n * n];
        for &(i, l, v) in entries {
            normalized[i * n + l] = v;
            normalized[l * n + i] = v;
        }
        TransitionMatrix::from_normalized(normalized, &vec![1; n])
    }

    #[test]
    fn candidate_order_breaks_ties_by_id() {
        assert_eq!(candidate_order(&[2, 3, 3, 1, 2]), vec![1, 2, 0, 4, 3]);
    }

    #[test]
    fn absorbed_candidate_extends_its_community() {
        // 0 takes 1; 1 (already absorbed) then pulls in 2; 3 stays alone
        let m = matrix(4, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0), (0, 1, 0.5), (1, 2, 0.5)], 0.0);
        let p = detect_with_degrees(&m, &[3, 2, 1, 1], 0.1, AverageSource::InfiniteTime).unwrap();
        assert_eq!(p.hubs, vec![0, 3]);
        assert_eq!(p.assignment, vec![0, 0, 0, 1]);
        assert_eq!(p.sizes(), vec![3, 1]);
        // node 2 joined through node 1, so it sits below q against hub 0
        assert!((p.margins[2] + 0.1).abs() < 1e-15);
    }

    #[test]
    fn extremes_of_threshold() {
        let m = matrix(3, &[(0, 1, 0.2), (1, 2, 0.3), (0, 2, 0.1)], 0.4);
        let low = detect_with_degrees(&m, &[2, 2, 2], 1e-9, AverageSource::InfiniteTime).unwrap();
        assert_eq!(low.len(), 1);
        let high = detect_with_degrees(&m, &[2, 2, 2], 10.0, AverageSource::InfiniteTime).unwrap();
        assert_eq!(high.hubs, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        let m = matrix(2, &[], 0.5);
        let src = AverageSource::InfiniteTime;
        assert_eq!(detect_with_degrees(&m, &[1, 1], 0.0, src), Err(CommunityError::InvalidThreshold(0.0)));
        assert!(matches!(
            detect_with_degrees(&m, &[1, 1], f64::NAN, src),
            Err(CommunityError::InvalidThreshold(_))
        ));
        assert_eq!(detect_with_degrees(&m, &[], 0.1, src), Err(CommunityError::EmptyGraph));
        assert!(matches!(
            detect_with_degrees(&m, &[1, 1, 1], 0.1, src),
            Err(CommunityError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn margins_flag_the_band() {
        let m = matrix(3, &[(0, 1, 0.105), (0, 2, 0.5)], 1.0);
        let p = detect_with_degrees(&m, &[2, 1, 1], 0.1, AverageSource::InfiniteTime).unwrap();
        let report = margin_report(&p, &m, DEFAULT_MARGINAL_BAND);
        assert!(report[1].is_marginal());
        assert!(!report[2].is_marginal());
        assert!(!report[0].is_marginal());
    }
}
