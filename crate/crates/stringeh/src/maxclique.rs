//! Exact maximum clique / maximum independent set for small graphs.
//!
//! Branch and bound over u64 candidate masks with a greedy-coloring upper
//! bound. Serves as the cross-validation oracle for the cograph DP and the
//! end-to-end pipeline, hence the hard vertex cap.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_EXACT_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamseyOracleError {
    #[error("graph has {n} vertices, exceeding the exact-search cap {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// A clique and an independent set of the same graph. Exact maxima when
/// produced by [`brute_force_ramsey`]; certified lower bounds when produced
/// by the cograph recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyResult {
    pub clique: Vec<usize>,
    pub independent: Vec<usize>,
    /// Present on recursion outputs: the exponent the sizes are certified
    /// for and the number of cotree leaves backing the product bound.
    pub certified: Option<CertifiedBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBound {
    pub exponent: f64,
    pub leaf_count: usize,
}

impl RamseyResult {
    pub fn best_len(&self) -> usize {
        self.clique.len().max(self.independent.len())
    }
}

/// Exact maximum clique and maximum independent set, `n ≤ cap ≤ 64`.
pub fn brute_force_ramsey(g: &Graph, cap: usize) -> Result<RamseyResult, RamseyOracleError> {
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(RamseyOracleError::TooLarge { n: g.n(), cap });
    }
    let clique = max_clique_small(g);
    let independent = max_clique_small(&g.complement());
    Ok(RamseyResult {
        clique,
        independent,
        certified: None,
    })
}

/// Exact maximum clique for `n ≤ 64`, as a sorted vertex list.
pub fn max_clique_small(g: &Graph) -> Vec<usize> {
    let n = g.n();
    debug_assert!(n <= 64);
    if n == 0 {
        return Vec::new();
    }
    let adj: Vec<u64> = (0..n).map(|v| mask_of(g.neighbors(v))).collect();

    // Order vertices by descending degree; greedy coloring follows this order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));

    let mut best: u64 = 1 << order[0];
    let mut current: u64 = 0;
    let all: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    expand(&adj, &order, all, &mut current, &mut best);

    let mut out: Vec<usize> = (0..n).filter(|&v| best >> v & 1 == 1).collect();
    out.sort_unstable();
    debug_assert!(out
        .iter()
        .enumerate()
        .all(|(i, &u)| out[i + 1..].iter().all(|&v| g.has_edge(u, v))));
    out
}

fn mask_of(s: &VertexSet) -> u64 {
    let mut m = 0u64;
    for v in s.iter() {
        m |= 1 << v;
    }
    m
}

fn expand(adj: &[u64], order: &[usize], candidates: u64, current: &mut u64, best: &mut u64) {
    if candidates == 0 {
        if current.count_ones() > best.count_ones() {
            *best = *current;
        }
        return;
    }
    // Greedy coloring bound: candidates are partitioned into color classes;
    // a clique takes at most one vertex per class.
    let (colored, bounds) = color_order(adj, order, candidates);
    for idx in (0..colored.len()).rev() {
        if current.count_ones() + bounds[idx] <= best.count_ones() {
            return;
        }
        let v = colored[idx];
        *current |= 1 << v;
        let next = candidates
            & adj[v]
            & colored[..idx].iter().fold(0u64, |acc, &u| acc | (1 << u));
        expand(adj, order, next, current, best);
        *current &= !(1 << v);
    }
}

/// Greedy coloring of the candidate set in the global order; returns the
/// vertices sorted by color and the color number (bound) of each prefix.
fn color_order(adj: &[u64], order: &[usize], candidates: u64) -> (Vec<usize>, Vec<u32>) {
    let mut classes: Vec<u64> = Vec::new();
    for &v in order {
        if candidates >> v & 1 == 0 {
            continue;
        }
        match classes.iter_mut().find(|class| **class & adj[v] == 0) {
            Some(class) => *class |= 1 << v,
            None => classes.push(1 << v),
        }
    }
    let mut colored = Vec::with_capacity(candidates.count_ones() as usize);
    let mut bounds = Vec::with_capacity(colored.capacity());
    for (color, class) in classes.iter().enumerate() {
        let mut members = *class;
        while members != 0 {
            let v = members.trailing_zeros() as usize;
            members &= members - 1;
            colored.push(v);
            bounds.push(color as u32 + 1);
        }
    }
    (colored, bounds)
}
