//! Bundled and generated networks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::loaders::load_edge_list;

/// Zachary's karate club (34 members, 78 ties) as a 1-based edge list.
pub const KARATE_EDGES: &str = include_str!("../data/karate.edges");

/// Members of the instructor's faction (node 1) in the club's eventual split.
pub const KARATE_INSTRUCTOR_GROUP: [usize; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 11, 12, 13, 14, 17, 18, 20, 22];
/// Members of the administrator's faction (node 34).
pub const KARATE_ADMINISTRATOR_GROUP: [usize; 18] =
    [9, 10, 15, 16, 19, 21, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34];

/// Hubs of the three-community network, 1-based.
pub const THREE_COMMUNITY_HUBS: [usize; 3] = [1, 13, 21];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("unknown builtin graph {0:?} (expected three_community, karate, house, cycle(n), path(n) or complete(n))")]
    Unknown(String),
    #[error("{name}({n}) needs n >= {min}")]
    TooSmall { name: &'static str, n: usize, min: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    ThreeCommunity,
    Karate,
    /// A square and a triangle sharing one edge (5 nodes, 6 edges).
    House,
    Cycle(usize),
    Path(usize),
    Complete(usize),
}

impl FromStr for Builtin {
    type Err = DatasetError;

    /// Accepts `cycle(6)` as well as `cycle:6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_ascii_lowercase();
        let unknown = || DatasetError::Unknown(s.to_string());
        match name.as_str() {
            "three_community" | "three-community" => return Ok(Self::ThreeCommunity),
            "karate" => return Ok(Self::Karate),
            "house" => return Ok(Self::House),
            _ => {}
        }
        let (family, arg) = if let Some((family, rest)) = name.split_once('(') {
            (family, rest.strip_suffix(')').ok_or_else(unknown)?)
        } else {
            name.split_once(':').ok_or_else(unknown)?
        };
        let n: usize = arg.trim().parse().map_err(|_| unknown())?;
        match family {
            "cycle" => Ok(Self::Cycle(n)),
            "path" => Ok(Self::Path(n)),
            "complete" => Ok(Self::Complete(n)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ThreeCommunity => f.write_str("three_community"),
            Self::Karate => f.write_str("karate"),
            Self::House => f.write_str("house"),
            Self::Cycle(n) => write!(f, "cycle({n})"),
            Self::Path(n) => write!(f, "path({n})"),
            Self::Complete(n) => write!(f, "complete({n})"),
        }
    }
}

impl Builtin {
    pub fn build(self) -> Result<Graph, DatasetError> {
        let graph = match self {
            Self::ThreeCommunity => three_community(),
            Self::Karate => karate(),
            Self::House => house(),
            Self::Cycle(n) => cycle(n)?,
            Self::Path(n) => path(n)?,
            Self::Complete(n) => complete(n)?,
        };
        Ok(graph)
    }
}

/// Looks up a builtin graph by name, e.g. `builtin("cycle(4)")`.
pub fn builtin(name: &str) -> Result<Graph, DatasetError> {
    name.parse::<Builtin>()?.build()
}

fn expect_valid(result: Result<Graph, GraphError>) -> Graph {
    result.expect("generated graphs are simple and connected")
}

pub fn karate() -> Graph {
    load_edge_list(KARATE_EDGES).expect("bundled karate edge list is valid")
}

/// Three 7-node communities `{1–7}, {8–14}, {15–21}` with hubs 1, 13 and 21.
///
/// Each hub links to the six other members of its community, the six members
/// form a ring, and the three hubs form a triangle: 39 edges, `D = 78`.
pub fn three_community() -> Graph {
    let groups: [(usize, [usize; 6]); 3] = [
        (1, [2, 3, 4, 5, 6, 7]),
        (13, [8, 9, 10, 11, 12, 14]),
        (21, [15, 16, 17, 18, 19, 20]),
    ];
    let mut edges = Vec::with_capacity(39);
    for (hub, members) in groups {
        for (idx, &m) in members.iter().enumerate() {
            edges.push((hub - 1, m - 1));
            edges.push((m - 1, members[(idx + 1) % 6] - 1));
        }
    }
    edges.extend([(0, 12), (12, 20), (0, 20)]);
    expect_valid(Graph::from_edges(21, &edges))
}

pub fn house() -> Graph {
    expect_valid(Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)]))
}

pub fn cycle(n: usize) -> Result<Graph, DatasetError> {
    if n < 3 {
        return Err(DatasetError::TooSmall { name: "cycle", n, min: 3 });
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(expect_valid(Graph::from_edges(n, &edges)))
}

pub fn path(n: usize) -> Result<Graph, DatasetError> {
    if n < 2 {
        return Err(DatasetError::TooSmall { name: "path", n, min: 2 });
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(expect_valid(Graph::from_edges(n, &edges)))
}

pub fn complete(n: usize) -> Result<Graph, DatasetError> {
    if n < 2 {
        return Err(DatasetError::TooSmall { name: "complete", n, min: 2 });
    }
    let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    Ok(expect_valid(Graph::from_edges(n, &edges)))
}
