//! Immutable simple undirected graphs with bit-parallel adjacency rows.
//!
//! Vertices are `0..n`. Rows are [`VertexSet`]s, so neighborhood
//! intersections (`|N(v) ∩ S|`) are single popcount passes — the query the
//! extraction algorithms lean on hardest. Graphs never mutate after
//! construction; algorithms carry vertex sets instead.

use crate::bitset::VertexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0} rejected")]
    SelfLoop(usize),
    #[error("crossing_status requires disjoint sets, but {0} is in both")]
    OverlappingSets(usize),
    #[error("crossing_status requires non-empty sets")]
    EmptySet,
    #[error("vertex set is not a subset of the graph's vertices")]
    InvalidSubset,
    #[error("malformed graph input: {0}")]
    Parse(String),
}

/// How one vertex set sits against another across the bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingStatus {
    /// Every pair (one from each side) is adjacent.
    Complete,
    /// No pair is adjacent.
    Empty,
    /// Some pairs are adjacent and some are not.
    Mixed,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<VertexSet>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are collapsed;
    /// out-of-range endpoints and self-loops are rejected.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut rows = vec![VertexSet::empty(n); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            rows[u].insert(v);
            rows[v].insert(u);
        }
        let edge_count = rows.iter().map(VertexSet::len).sum::<usize>() / 2;
        Ok(Graph { n, rows, edge_count })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            rows: vec![VertexSet::empty(n); n],
            edge_count: 0,
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let mut rows = Vec::with_capacity(n);
        for v in 0..n {
            let mut row = VertexSet::full(n);
            row.remove(v);
            rows.push(row);
        }
        Graph {
            n,
            rows,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds directly from adjacency rows. Symmetry and irreflexivity are
    /// debug-asserted; callers constructing rows must uphold them.
    pub(crate) fn from_rows(rows: Vec<VertexSet>) -> Graph {
        let n = rows.len();
        #[cfg(debug_assertions)]
        {
            for (v, row) in rows.iter().enumerate() {
                debug_assert_eq!(row.universe(), n);
                debug_assert!(!row.contains(v), "self-loop at {v}");
                for u in row.iter() {
                    debug_assert!(rows[u].contains(v), "asymmetry at ({v},{u})");
                }
            }
        }
        let edge_count = rows.iter().map(VertexSet::len).sum::<usize>() / 2;
        Graph { n, rows, edge_count }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.rows[u].contains(v)
    }

    /// Neighborhood `N(v)` as a set.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].len()
    }

    /// `|N(v) ∩ s|`.
    #[inline]
    pub fn degree_into(&self, v: usize, s: &VertexSet) -> usize {
        self.rows[v].intersection_len(s)
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// All vertices as a set.
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for v in self.rows[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_edgeless(&self) -> bool {
        self.edge_count == 0
    }

    /// Complement graph: `uv` adjacent iff `u ≠ v` and not adjacent here.
    pub fn complement(&self) -> Graph {
        let rows: Vec<VertexSet> = (0..self.n)
            .map(|v| {
                let mut row = self.rows[v].complement();
                row.remove(v);
                row
            })
            .collect();
        let edge_count = self.n * self.n.saturating_sub(1) / 2 - self.edge_count;
        Graph {
            n: self.n,
            rows,
            edge_count,
        }
    }

    /// Induced subgraph on `s`, plus the mapping from new indices back to
    /// host indices (`mapping[new] = old`).
    pub fn induced(&self, s: &VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        if s.universe() != self.n {
            return Err(GraphError::InvalidSubset);
        }
        let mapping = s.to_vec();
        let m = mapping.len();
        let mut back = vec![usize::MAX; self.n];
        for (new, &old) in mapping.iter().enumerate() {
            back[old] = new;
        }
        let mut rows = vec![VertexSet::empty(m); m];
        for (new, &old) in mapping.iter().enumerate() {
            for w in self.rows[old].intersection(s).iter() {
                rows[new].insert(back[w]);
            }
        }
        let edge_count = rows.iter().map(VertexSet::len).sum::<usize>() / 2;
        Ok((Graph { n: m, rows, edge_count }, mapping))
    }

    /// Classifies the edges between two disjoint non-empty sets.
    pub fn crossing_status(&self, a: &VertexSet, b: &VertexSet) -> Result<CrossingStatus, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptySet);
        }
        if let Some(v) = a.intersection(b).first() {
            return Err(GraphError::OverlappingSets(v));
        }
        let b_len = b.len();
        let mut crossing = 0usize;
        for v in a.iter() {
            crossing += self.degree_into(v, b);
        }
        Ok(if crossing == 0 {
            CrossingStatus::Empty
        } else if crossing == a.len() * b_len {
            CrossingStatus::Complete
        } else {
            CrossingStatus::Mixed
        })
    }

    /// Connected components of the subgraph induced on `within`,
    /// largest first (ties by smallest contained vertex).
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut remaining = within.clone();
        let mut comps = Vec::new();
        while let Some(start) = remaining.first() {
            let mut comp = VertexSet::empty(self.n);
            let mut frontier = vec![start];
            comp.insert(start);
            remaining.remove(start);
            while let Some(v) = frontier.pop() {
                let reach = self.rows[v].intersection(&remaining);
                for w in reach.iter() {
                    comp.insert(w);
                    remaining.remove(w);
                    frontier.push(w);
                }
            }
            comps.push(comp);
        }
        comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c.first()));
        comps
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertices())
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edge_count)
    }
}

// ---------------------------------------------------------------------------
// Serialization: JSON {"n": .., "edges": [[u,v],..]} and edge-list text
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            n: self.n,
            edges: self.edges(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Graph, GraphError> {
        let doc: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Graph::build(doc.n, &doc.edges)
    }

    /// Whitespace edge-list text: first line `n m`, then `m` lines `u v`.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_edge_list_text(text: &str) -> Result<Graph, GraphError> {
        let mut tokens = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| GraphError::Parse(format!("expected integer, got {t:?}")))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| GraphError::Parse(format!("missing {what}")))?
        };
        let n = next("vertex count")?;
        let m = next("edge count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let u = next("edge endpoint")?;
            let v = next("edge endpoint")?;
            edges.push((u, v));
        }
        Graph::build(n, &edges)
    }
}
