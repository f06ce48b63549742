//! Balanced vertex separators and the anticomplete split they induce.
//!
//! A separator is a vertex set whose removal leaves every connected
//! component with at most 2n/3 vertices. The exact strategy enumerates
//! subsets by increasing size (so the first hit is minimum); the greedy one
//! strips the highest-degree vertex of the largest component until the bound
//! holds. Packing the components onto two sides gives disjoint sets with no
//! edges between them.

use crate::bitset::VertexSet;
use crate::graph::{CrossingStatus, Graph};
use thiserror::Error;

/// Hard cap for the exact subset enumeration.
pub const EXACT_CAP: usize = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("exact separator search caps at {EXACT_CAP} vertices, graph has {0}")]
    TooLargeForExact(usize),
    #[error("greedy separator exceeded its removal budget without meeting the bound")]
    GreedyBudgetExhausted,
    #[error("split needs at least 2 vertices outside the separator, got {0}")]
    DegenerateSplit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatorStrategy {
    /// Minimum-size separator by subset enumeration; requires `n ≤ 22`.
    Exact,
    /// Highest-degree removal from the largest component.
    Greedy,
}

#[derive(Debug, Clone)]
pub struct SeparatorResult {
    pub separator: VertexSet,
    /// Connected components of `g − S`, largest first.
    pub components: Vec<VertexSet>,
}

impl SeparatorResult {
    pub fn balance_bound(&self, n: usize) -> bool {
        self.components.iter().all(|c| 3 * c.len() <= 2 * n)
    }
}

/// Finds a separator: every component of `g − S` has at most `2n/3` vertices.
pub fn find_balanced_separator(
    g: &Graph,
    strategy: SeparatorStrategy,
) -> Result<SeparatorResult, SeparatorError> {
    match strategy {
        SeparatorStrategy::Exact => exact_separator(g),
        SeparatorStrategy::Greedy => greedy_separator(g),
    }
}

fn meets_bound(g: &Graph, n: usize, removed: &VertexSet) -> bool {
    let rest = removed.complement();
    g.components_within(&rest)
        .iter()
        .all(|c| 3 * c.len() <= 2 * n)
}

fn result_for(g: &Graph, separator: VertexSet) -> SeparatorResult {
    let rest = separator.complement();
    let components = g.components_within(&rest);
    SeparatorResult { separator, components }
}

fn exact_separator(g: &Graph) -> Result<SeparatorResult, SeparatorError> {
    let n = g.n();
    if n > EXACT_CAP {
        return Err(SeparatorError::TooLargeForExact(n));
    }
    for size in 0..=n {
        if let Some(sep) = first_valid_subset(g, n, size) {
            return Ok(result_for(g, sep));
        }
    }
    unreachable!("removing all vertices always satisfies the bound");
}

/// Lexicographically first subset of the given size meeting the bound.
fn first_valid_subset(g: &Graph, n: usize, size: usize) -> Option<VertexSet> {
    let mut chosen: Vec<usize> = (0..size).collect();
    loop {
        let set = VertexSet::from_indices(n, chosen.iter().copied());
        if meets_bound(g, n, &set) {
            return Some(set);
        }
        if !next_combination(&mut chosen, n) {
            return None;
        }
    }
}

fn next_combination(chosen: &mut [usize], n: usize) -> bool {
    let k = chosen.len();
    for i in (0..k).rev() {
        if chosen[i] < n - k + i {
            chosen[i] += 1;
            for j in i + 1..k {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn greedy_separator(g: &Graph) -> Result<SeparatorResult, SeparatorError> {
    let n = g.n();
    let budget = n.div_ceil(3);
    let mut separator = VertexSet::empty(n);
    let mut remaining = g.vertices();
    for _ in 0..=budget {
        let comps = g.components_within(&remaining);
        match comps.first() {
            Some(largest) if 3 * largest.len() > 2 * n => {
                // Remove the highest-degree vertex of the offender
                // (degree within it; ties to the smallest index).
                let victim = largest
                    .iter()
                    .max_by_key(|&v| (g.degree_into(v, largest), std::cmp::Reverse(v)))
                    .expect("largest component is non-empty");
                separator.insert(victim);
                remaining.remove(victim);
            }
            _ => return Ok(result_for(g, separator)),
        }
    }
    Err(SeparatorError::GreedyBudgetExhausted)
}

/// Trivial fallback: removing any ⌈n/3⌉ vertices leaves at most ⌊2n/3⌋
/// vertices in total, so the component bound holds outright.
pub fn fallback_separator(g: &Graph) -> SeparatorResult {
    let n = g.n();
    let separator = VertexSet::from_indices(n, 0..n.div_ceil(3));
    result_for(g, separator)
}

/// Packs the components onto two sides (largest first, onto the lighter
/// side), then trims the larger side to equalize. No edges cross the sides.
pub fn split_from_separator(
    g: &Graph,
    sep: &SeparatorResult,
) -> Result<(VertexSet, VertexSet), SeparatorError> {
    let n = g.n();
    let outside: usize = sep.components.iter().map(VertexSet::len).sum();
    if outside < 2 {
        return Err(SeparatorError::DegenerateSplit(outside));
    }
    let mut x1 = VertexSet::empty(n);
    let mut x2 = VertexSet::empty(n);
    for c in &sep.components {
        if x1.len() <= x2.len() {
            x1.union_with(c);
        } else {
            x2.union_with(c);
        }
    }
    let target = x1.len().min(x2.len());
    if target == 0 {
        return Err(SeparatorError::DegenerateSplit(outside));
    }
    trim_to(&mut x1, target);
    trim_to(&mut x2, target);
    debug_assert_eq!(g.crossing_status(&x1, &x2), Ok(CrossingStatus::Empty));
    Ok((x1, x2))
}

/// Drops the largest indices until the set has `target` elements.
fn trim_to(s: &mut VertexSet, target: usize) {
    let extra: Vec<usize> = s.to_vec().split_off(target);
    for v in extra {
        s.remove(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> Graph {
        Graph::build(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    fn grid(rows: usize, cols: usize) -> Graph {
        let mut edges = Vec::new();
        let idx = |r: usize, c: usize| r * cols + c;
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        Graph::build(rows * cols, &edges).unwrap()
    }

    #[test]
    fn path_nine_splits_at_the_middle() {
        let g = path(9);
        let sep = find_balanced_separator(&g, SeparatorStrategy::Exact).unwrap();
        assert_eq!(sep.separator.to_vec(), vec![4]);
        let sizes: Vec<usize> = sep.components.iter().map(VertexSet::len).collect();
        assert_eq!(sizes, vec![4, 4]);
        let (x1, x2) = split_from_separator(&g, &sep).unwrap();
        assert_eq!((x1.len(), x2.len()), (4, 4));
        assert_eq!(g.crossing_status(&x1, &x2), Ok(CrossingStatus::Empty));
    }

    #[test]
    fn complete_five_needs_two_removals() {
        let g = Graph::complete(5);
        let sep = find_balanced_separator(&g, SeparatorStrategy::Exact).unwrap();
        assert_eq!(sep.separator.len(), 2);
        assert!(sep.balance_bound(5));
    }

    #[test]
    fn four_by_four_grid_separator_is_small() {
        let g = grid(4, 4);
        let sep = find_balanced_separator(&g, SeparatorStrategy::Exact).unwrap();
        assert!(sep.separator.len() <= 4, "got {}", sep.separator.len());
        assert!(sep.balance_bound(16));
    }

    #[test]
    fn already_balanced_graph_needs_no_separator() {
        let g = Graph::build(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let sep = find_balanced_separator(&g, SeparatorStrategy::Exact).unwrap();
        assert!(sep.separator.is_empty());
        let (x1, x2) = split_from_separator(&g, &sep).unwrap();
        assert_eq!((x1.len(), x2.len()), (3, 3));
    }

    #[test]
    fn exact_cap_enforced() {
        let g = Graph::empty(30);
        assert!(matches!(
            find_balanced_separator(&g, SeparatorStrategy::Exact),
            Err(SeparatorError::TooLargeForExact(30))
        ));
    }

    #[test]
    fn greedy_meets_the_bound_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let n = rng.gen_range(6..60);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.1) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::build(n, &edges).unwrap();
            let sep = find_balanced_separator(&g, SeparatorStrategy::Greedy).unwrap();
            assert!(sep.balance_bound(n));
        }
    }

    #[test]
    fn fallback_always_meets_the_bound() {
        let g = path(10);
        let sep = fallback_separator(&g);
        assert!(sep.balance_bound(10));
        assert_eq!(sep.separator.len(), 4);
    }

    #[test]
    fn exact_split_properties_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let n = rng.gen_range(4..=12);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::build(n, &edges).unwrap();
            let sep = find_balanced_separator(&g, SeparatorStrategy::Exact).unwrap();
            assert!(sep.balance_bound(n));
            if let Ok((x1, x2)) = split_from_separator(&g, &sep) {
                assert_eq!(x1.len(), x2.len());
                assert_eq!(g.crossing_status(&x1, &x2), Ok(CrossingStatus::Empty));
            }
        }
    }
}
