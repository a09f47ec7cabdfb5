//! Undirected simple graphs and the directed-arc basis built on top of them.
//!
//! Every undirected edge `{i, j}` contributes two arcs, `i→j` and `j→i`. Arcs
//! are numbered node by node: the arcs leaving node `i` occupy the contiguous
//! range `offset(i)..offset(i) + degree(i)`, in ascending order of the head
//! node. The total number of arcs is the walk dimension `D = Σ kᵢ`.
//!
//! Node ids are 0-based here. Loaders and the report layer convert to the
//! 1-based ids used in figures and data files.

use std::collections::VecDeque;
use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("edge ({a}, {b}) references a node outside 0..{n}")]
    NodeOutOfRange { a: usize, b: usize, n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({a}, {b})")]
    DuplicateEdge { a: usize, b: usize },
    #[error("node {node} has no links")]
    IsolatedNode { node: usize },
    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },
}

/// Position of an arc inside the per-node blocks: the arc `tail → neighbors(tail)[slot]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcIndex {
    pub tail: usize,
    pub slot: usize,
}

/// Immutable undirected simple graph with canonically ordered adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    heads: Vec<usize>,
    tails: Vec<usize>,
    reverse: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph on nodes `0..node_count` from undirected edges.
    ///
    /// Rejects self-loops, duplicate edges (in either orientation) and nodes
    /// without links. Connectivity is not required here; see
    /// [`Graph::require_connected`].
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(GraphError::NodeOutOfRange { a, b, n: node_count });
            }
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for (node, list) in adjacency.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(GraphError::IsolatedNode { node });
            }
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (node.min(w[0]), node.max(w[0]));
                return Err(GraphError::DuplicateEdge { a, b });
            }
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for list in &adjacency {
            offsets.push(offsets.last().unwrap() + list.len());
        }
        let heads: Vec<usize> = adjacency.iter().flatten().copied().collect();
        let tails: Vec<usize> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| std::iter::repeat(i).take(list.len()))
            .collect();
        let reverse = (0..heads.len())
            .map(|arc| {
                let (i, j) = (tails[arc], heads[arc]);
                // adjacency lists are sorted, so the back-arc is a binary search away
                let slot = adjacency[j].binary_search(&i).expect("adjacency is symmetric");
                offsets[j] + slot
            })
            .collect();

        Ok(Self {
            offsets,
            heads,
            tails,
            reverse,
            labels: None,
        })
    }

    /// Attaches display labels (one per node), e.g. airport names from a Pajek file.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.node_count(), "one label per node");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Walk dimension `D = Σ kᵢ`, twice the number of undirected edges.
    pub fn arc_count(&self) -> usize {
        self.heads.len()
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Neighbors of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.heads[self.arc_range(node)]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Flat arc indices of the arcs leaving `node`.
    pub fn arc_range(&self, node: usize) -> Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    /// Flat index of `tail → neighbors(tail)[slot]`, or `None` if out of range.
    pub fn arc(&self, tail: usize, slot: usize) -> Option<usize> {
        if tail >= self.node_count() || slot >= self.degree(tail) {
            return None;
        }
        Some(self.offsets[tail] + slot)
    }

    /// Flat index of the arc `tail → head`, if that edge exists.
    pub fn arc_between(&self, tail: usize, head: usize) -> Option<usize> {
        if tail >= self.node_count() {
            return None;
        }
        let slot = self.neighbors(tail).binary_search(&head).ok()?;
        Some(self.offsets[tail] + slot)
    }

    pub fn arc_index(&self, arc: usize) -> ArcIndex {
        let tail = self.tails[arc];
        ArcIndex {
            tail,
            slot: arc - self.offsets[tail],
        }
    }

    pub fn tail(&self, arc: usize) -> usize {
        self.tails[arc]
    }

    pub fn head(&self, arc: usize) -> usize {
        self.heads[arc]
    }

    /// The arc traversed in the opposite direction.
    pub fn reverse(&self, arc: usize) -> usize {
        self.reverse[arc]
    }

    /// Arc-reversal permutation as a slice, `reverse_map()[a] == reverse(a)`.
    pub fn reverse_map(&self) -> &[usize] {
        &self.reverse
    }

    /// Node owning each arc, i.e. its tail.
    pub fn arc_tails(&self) -> &[usize] {
        &self.tails
    }

    /// Undirected edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.arc_count())
            .filter(|&arc| self.tails[arc] < self.heads[arc])
            .map(|arc| (self.tails[arc], self.heads[arc]))
            .collect()
    }

    /// Connected components as a component id per node.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.node_count();
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if component[w] == usize::MAX {
                        component[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (count, component)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 == 1
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        match self.components().0 {
            1 => Ok(()),
            components => Err(GraphError::Disconnected { components }),
        }
    }

    /// First Betti number `|E| − |V| + 1` (cycle rank) of a connected graph.
    pub fn betti_number(&self) -> Result<usize, GraphError> {
        self.require_connected()?;
        Ok(self.edge_count() + 1 - self.node_count())
    }

    /// Two-colouring test by breadth-first search.
    pub fn is_bipartite(&self) -> bool {
        let n = self.node_count();
        let mut colour = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for start in 0..n {
            if colour[start] != u8::MAX {
                continue;
            }
            colour[start] = 0;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if colour[w] == u8::MAX {
                        colour[w] = 1 - colour[v];
                        queue.push_back(w);
                    } else if colour[w] == colour[v] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_dimensions() {
        let g = triangle();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.arc_count(), 6);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(2), &[0, 1]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::from_edges(2, &[(1, 1), (0, 1)]),
            Err(GraphError::SelfLoop { node: 1 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 2), (1, 0)]),
            Err(GraphError::DuplicateEdge { a: 0, b: 1 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1)]),
            Err(GraphError::IsolatedNode { node: 2 })
        );
        assert_eq!(Graph::from_edges(0, &[]), Err(GraphError::Empty));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 5)]),
            Err(GraphError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn arc_bijection_and_reverse() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (3, 4), (1, 2)]).unwrap();
        for arc in 0..g.arc_count() {
            let ArcIndex { tail, slot } = g.arc_index(arc);
            assert_eq!(g.arc(tail, slot), Some(arc));
            let back = g.reverse(arc);
            assert_eq!(g.tail(back), g.head(arc));
            assert_eq!(g.head(back), g.tail(arc));
            assert_eq!(g.reverse(back), arc);
        }
        assert_eq!(g.arc(4, 1), None);
        assert_eq!(g.arc(9, 0), None);
    }

    #[test]
    fn betti_and_bipartite() {
        let g = triangle();
        assert_eq!(g.betti_number(), Ok(1));
        assert!(!g.is_bipartite());

        let square = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(square.is_bipartite());
        assert_eq!(square.betti_number(), Ok(1));

        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.betti_number(), Ok(0));
        assert!(star.is_bipartite());
    }

    #[test]
    fn disconnected_has_no_betti_number() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(g.betti_number(), Err(GraphError::Disconnected { components: 2 }));
        assert!(!g.is_connected());
    }
}
