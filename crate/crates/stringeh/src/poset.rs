//! Strict partial orders stored as full transitive closures.
//!
//! The extraction algorithms query comparability of arbitrary pairs all the
//! time, so the closure is materialized as bitset rows in both directions
//! (`below[x]` = everything above `x`, `above[x]` = everything below it).
//! Target sizes stay modest (n ≲ 10⁴), so the quadratic storage is fine.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("element {element} out of range for poset on {n} elements")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("relations contain a cycle: {}", format_cycle(.0))]
    Cycle(Vec<usize>),
    #[error("malformed poset input: {0}")]
    Parse(String),
}

fn format_cycle(cycle: &[usize]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" ≺ ")
}

/// A strict partial order `≺` on `0..n`, stored as its transitive closure.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    /// `below[x]` = `{y : x ≺ y}`.
    below: Vec<VertexSet>,
    /// `above[y]` = `{x : x ≺ y}`.
    above: Vec<VertexSet>,
}

/// A total order refining a poset, as the permutation listing elements in
/// increasing order plus its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExtension {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl LinearExtension {
    pub fn from_order(order: Vec<usize>) -> LinearExtension {
        let mut position = vec![0usize; order.len()];
        for (pos, &v) in order.iter().enumerate() {
            position[v] = pos;
        }
        LinearExtension { order, position }
    }

    /// Elements in increasing order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of `v` in the order.
    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `A <_l B`: every element of `a` precedes every element of `b`.
    pub fn set_precedes(&self, a: &VertexSet, b: &VertexSet) -> bool {
        let max_a = a.iter().map(|v| self.position(v)).max();
        let min_b = b.iter().map(|v| self.position(v)).min();
        match (max_a, min_b) {
            (Some(ma), Some(mb)) => ma < mb,
            _ => true,
        }
    }
}

impl Poset {
    /// Builds the poset generated by `pairs` (each `(x, y)` meaning `x ≺ y`),
    /// taking the transitive closure. Rejects inputs whose directed reading
    /// contains a cycle, reporting one offending cycle.
    pub fn from_relations(n: usize, pairs: &[(usize, usize)]) -> Result<Poset, PosetError> {
        let mut direct = vec![VertexSet::empty(n); n];
        for &(x, y) in pairs {
            if x >= n {
                return Err(PosetError::ElementOutOfRange { element: x, n });
            }
            if y >= n {
                return Err(PosetError::ElementOutOfRange { element: y, n });
            }
            if x == y {
                return Err(PosetError::Cycle(vec![x]));
            }
            direct[x].insert(y);
        }

        let topo = topological_order(n, &direct)?;

        // Closure by sweeping in reverse topological order:
        // below[x] = ⋃_{x→y} ({y} ∪ below[y]).
        let mut below = vec![VertexSet::empty(n); n];
        for &x in topo.iter().rev() {
            let mut acc = VertexSet::empty(n);
            for y in direct[x].iter() {
                acc.insert(y);
                acc.union_with(&below[y]);
            }
            below[x] = acc;
        }
        Ok(Poset::from_below(below))
    }

    fn from_below(below: Vec<VertexSet>) -> Poset {
        let n = below.len();
        let mut above = vec![VertexSet::empty(n); n];
        for (x, row) in below.iter().enumerate() {
            debug_assert!(!row.contains(x), "irreflexivity violated at {x}");
            for y in row.iter() {
                debug_assert!(!below[y].contains(x), "antisymmetry violated at ({x},{y})");
                above[y].insert(x);
            }
        }
        Poset { n, below, above }
    }

    /// Intersection of explicit linear orders: `x ≺ y` iff `x` precedes `y`
    /// in every order. Each order must be a permutation of `0..n`.
    pub fn from_orders(orders: &[Vec<usize>]) -> Result<Poset, PosetError> {
        let n = orders.first().map_or(0, Vec::len);
        let mut positions = Vec::with_capacity(orders.len());
        for order in orders {
            if order.len() != n {
                return Err(PosetError::Parse("orders have mismatched lengths".into()));
            }
            let mut pos = vec![usize::MAX; n];
            for (p, &v) in order.iter().enumerate() {
                if v >= n {
                    return Err(PosetError::ElementOutOfRange { element: v, n });
                }
                if pos[v] != usize::MAX {
                    return Err(PosetError::Parse(format!("order repeats element {v}")));
                }
                pos[v] = p;
            }
            positions.push(pos);
        }
        let mut below = vec![VertexSet::empty(n); n];
        for x in 0..n {
            for y in 0..n {
                if x != y && positions.iter().all(|pos| pos[x] < pos[y]) {
                    below[x].insert(y);
                }
            }
        }
        Ok(Poset::from_below(below))
    }

    /// Intersection of `k` uniformly random linear orders, seeded.
    /// `k = 1` yields a chain; large `k` approaches an antichain.
    pub fn random_dimension_k(n: usize, k: usize, seed: u64) -> Poset {
        assert!(k >= 1, "dimension must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut orders = Vec::with_capacity(k);
        for _ in 0..k {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            orders.push(order);
        }
        Poset::from_orders(&orders).expect("random permutations are valid orders")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `x ≺ y`?
    #[inline]
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.below[x].contains(y)
    }

    /// `x ≺ y` or `y ≺ x`?
    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.precedes(x, y) || self.precedes(y, x)
    }

    /// `{y : x ≺ y}`.
    pub fn successors(&self, x: usize) -> &VertexSet {
        &self.below[x]
    }

    /// `{y : y ≺ x}`.
    pub fn predecessors(&self, x: usize) -> &VertexSet {
        &self.above[x]
    }

    /// Number of ordered pairs in the closure.
    pub fn relation_size(&self) -> usize {
        self.below.iter().map(VertexSet::len).sum()
    }

    /// Deterministic linear extension: Kahn's procedure, always emitting the
    /// smallest available index first.
    pub fn linear_extension(&self) -> LinearExtension {
        let mut indegree: Vec<usize> = (0..self.n).map(|v| self.above[v].len()).collect();
        let mut heap: BinaryHeap<std::cmp::Reverse<usize>> = (0..self.n)
            .filter(|&v| indegree[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(std::cmp::Reverse(v)) = heap.pop() {
            order.push(v);
            for w in self.below[v].iter() {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    heap.push(std::cmp::Reverse(w));
                }
            }
        }
        debug_assert_eq!(order.len(), self.n, "posets are acyclic by construction");
        LinearExtension::from_order(order)
    }

    /// True iff every related pair respects the linear order.
    pub fn check_linear_extension(&self, le: &LinearExtension) -> bool {
        if le.len() != self.n {
            return false;
        }
        (0..self.n).all(|x| self.below[x].iter().all(|y| le.position(x) < le.position(y)))
    }

    /// Graph with an edge for every comparable pair.
    pub fn comparability_graph(&self) -> Graph {
        let rows: Vec<VertexSet> = (0..self.n)
            .map(|v| self.below[v].union(&self.above[v]))
            .collect();
        Graph::from_rows(rows)
    }

    /// Complement of the comparability graph.
    pub fn incomparability_graph(&self) -> Graph {
        self.comparability_graph().complement()
    }

    /// Induced subposet on the given host elements; element `i` of the result
    /// corresponds to `elements[i]`. `elements` must be strictly increasing.
    pub fn induced(&self, elements: &[usize]) -> Poset {
        let m = elements.len();
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let mut below = vec![VertexSet::empty(m); m];
        for (i, &x) in elements.iter().enumerate() {
            for (j, &y) in elements.iter().enumerate() {
                if i != j && self.precedes(x, y) {
                    below[i].insert(j);
                }
            }
        }
        Poset::from_below(below)
    }

    /// Cover pairs (the transitive reduction): `x ≺ y` with nothing between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in self.below[x].iter() {
                if self.below[x].intersection(&self.above[y]).is_empty() {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

fn topological_order(n: usize, direct: &[VertexSet]) -> Result<Vec<usize>, PosetError> {
    let mut indegree = vec![0usize; n];
    for row in direct {
        for y in row.iter() {
            indegree[y] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for w in direct[v].iter() {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                stack.push(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    Err(PosetError::Cycle(find_cycle(n, direct, &indegree)))
}

/// Walks forward through vertices still carrying in-degree until a vertex
/// repeats, then returns the loop portion.
fn find_cycle(n: usize, direct: &[VertexSet], indegree: &[usize]) -> Vec<usize> {
    let start = (0..n).find(|&v| indegree[v] > 0).expect("cycle exists");
    let mut seen_at = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    loop {
        if seen_at[v] != usize::MAX {
            return path[seen_at[v]..].to_vec();
        }
        seen_at[v] = path.len();
        path.push(v);
        v = direct[v]
            .iter()
            .find(|&w| indegree[w] > 0)
            .expect("vertices on a cycle keep positive in-degree");
    }
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poset(n={}, relations={})", self.n, self.relation_size())
    }
}

// ---------------------------------------------------------------------------
// Serialization: JSON {"n": .., "relations": [[x,y],..]} (any generating set)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PosetJson {
    n: usize,
    relations: Vec<(usize, usize)>,
}

impl Poset {
    /// Serializes as the cover relations; the closure is recomputed on load.
    pub fn to_json(&self) -> String {
        let doc = PosetJson {
            n: self.n,
            relations: self.covers(),
        };
        serde_json::to_string(&doc).expect("poset serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Poset, PosetError> {
        let doc: PosetJson =
            serde_json::from_str(text).map_err(|e| PosetError::Parse(e.to_string()))?;
        Poset::from_relations(doc.n, &doc.relations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Poset {
        let pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Poset::from_relations(n, &pairs).unwrap()
    }

    fn diamond() -> Poset {
        Poset::from_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn chain_closure_adds_transitive_pair() {
        let p = chain(3);
        assert!(p.precedes(0, 2));
        assert_eq!(p.relation_size(), 3);
    }

    #[test]
    fn antichain_has_empty_relation() {
        let p = Poset::from_relations(3, &[]).unwrap();
        assert_eq!(p.relation_size(), 0);
    }

    #[test]
    fn diamond_closure() {
        let p = diamond();
        assert!(p.precedes(0, 3));
        assert!(!p.comparable(1, 2));
        assert_eq!(p.relation_size(), 5);
    }

    #[test]
    fn cycle_is_rejected_with_witness() {
        let err = Poset::from_relations(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap_err();
        match err {
            PosetError::Cycle(cycle) => {
                assert!(cycle.len() >= 2);
                // The reported walk really is a cycle of the input relations.
                let direct: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (2, 0), (2, 3)];
                for w in cycle.windows(2) {
                    assert!(direct.contains(&(w[0], w[1])));
                }
                assert!(direct.contains(&(*cycle.last().unwrap(), cycle[0])));
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn linear_extension_examples() {
        assert_eq!(chain(3).linear_extension().order(), &[0, 1, 2]);
        let antichain = Poset::from_relations(3, &[]).unwrap();
        assert_eq!(antichain.linear_extension().order(), &[0, 1, 2]);
        assert_eq!(diamond().linear_extension().order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn linear_extension_always_validates() {
        for seed in 0..20 {
            let p = Poset::random_dimension_k(40, 2 + (seed as usize % 3), seed);
            assert!(p.check_linear_extension(&p.linear_extension()));
        }
    }

    #[test]
    fn check_linear_extension_examples() {
        let c = chain(3);
        assert!(c.check_linear_extension(&LinearExtension::from_order(vec![0, 1, 2])));
        assert!(!c.check_linear_extension(&LinearExtension::from_order(vec![2, 1, 0])));
        assert!(diamond().check_linear_extension(&LinearExtension::from_order(vec![0, 2, 1, 3])));
    }

    #[test]
    fn comparability_graph_examples() {
        assert!(chain(4).comparability_graph().is_complete());
        assert!(Poset::from_relations(4, &[]).unwrap().comparability_graph().is_edgeless());
        assert_eq!(diamond().comparability_graph().edge_count(), 5);
    }

    #[test]
    fn incomparability_complements_comparability() {
        for seed in 0..10 {
            let p = Poset::random_dimension_k(30, 2, seed);
            let total = p.comparability_graph().edge_count() + p.incomparability_graph().edge_count();
            assert_eq!(total, 30 * 29 / 2);
        }
    }

    #[test]
    fn dimension_one_is_a_chain() {
        let p = Poset::random_dimension_k(12, 1, 7);
        assert!(p.comparability_graph().is_complete());
    }

    #[test]
    fn opposite_orders_force_antichain() {
        let p = Poset::from_orders(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(p.relation_size(), 0);
    }

    #[test]
    fn dimension_two_density_concentrates_near_half() {
        // For two random orders each pair agrees with probability 1/2.
        let n = 100;
        let total_pairs = (n * (n - 1) / 2) as f64;
        let trials = 40;
        let mut mean = 0.0;
        for seed in 0..trials {
            let p = Poset::random_dimension_k(n, 2, seed);
            mean += p.comparability_graph().edge_count() as f64 / total_pairs;
        }
        mean /= trials as f64;
        assert!((mean - 0.5).abs() < 0.05, "mean density {mean} far from 1/2");
    }

    #[test]
    fn dimension_two_matches_inversion_graph() {
        // The incomparability graph of the poset built from orders (L1, L2)
        // is the inversion graph of the permutation mapping L1-positions to
        // L2-positions. Brute-force check on small n.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = 8;
            let mut l1: Vec<usize> = (0..n).collect();
            let mut l2: Vec<usize> = (0..n).collect();
            l1.shuffle(&mut rng);
            l2.shuffle(&mut rng);
            let p = Poset::from_orders(&[l1.clone(), l2.clone()]).unwrap();
            let g = p.incomparability_graph();
            let mut pos1 = vec![0; n];
            let mut pos2 = vec![0; n];
            for (i, &v) in l1.iter().enumerate() {
                pos1[v] = i;
            }
            for (i, &v) in l2.iter().enumerate() {
                pos2[v] = i;
            }
            for x in 0..n {
                for y in x + 1..n {
                    let inverted = (pos1[x] < pos1[y]) != (pos2[x] < pos2[y]);
                    assert_eq!(g.has_edge(x, y), inverted);
                }
            }
        }
    }

    #[test]
    fn induced_subposet_restricts_relation() {
        let p = diamond();
        let q = p.induced(&[0, 1, 3]);
        assert!(q.precedes(0, 1));
        assert!(q.precedes(1, 2));
        assert!(q.precedes(0, 2));
        assert_eq!(q.relation_size(), 3);
    }

    #[test]
    fn json_roundtrip_via_covers() {
        let p = Poset::random_dimension_k(25, 2, 3);
        let q = Poset::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
    }
}
