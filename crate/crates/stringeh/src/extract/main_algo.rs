//! The bucketed extraction algorithm on a sparse comparability pair.
//!
//! Input: sides `A <_l B` of equal size `m` with crossing comparability
//! degrees at most `ε·m` both ways. Output: pairwise-anticomplete blocks
//! `X₁, …, X_t` with `δ·(m/|X_i|)^{1/2} < t`.
//!
//! Vertices of `B` are bucketed dyadically by `|N(v) ∩ A|`. The algorithm
//! walks the bucket bound `J` downward, maintaining leftover sets `A'`, `B'`
//! and three state properties re-checked after every step:
//!
//!   1. `|A| + |A'| = |B| + |B'| = m`
//!   2. `|A'|, |B'| ≤ 2·Σ_{i=J+1}^{J₀} t_i` where `t_j = √m·2^{j/2}`
//!   3. every `v ∈ B` has `|N(v) ∩ A| < 2^J`
//!
//! A populated bucket `k` triggers the sub-algorithm: repeatedly strip
//! vertices of `A` heavy into the working set `W_l`, then either at least
//! half of `W_l` keeps `≥ 2^{k-1}` neighbors (Case 1: a seeded sampling round
//! isolates single-neighbor cells that group into the output blocks) or the
//! working set halves (Case 2) until it is small enough to discard.

use crate::bitset::VertexSet;
use crate::certificate::{BlockCertificate, BlockKind};
use crate::extract::{AlgoConfig, ExtractError};
use crate::graph::{CrossingStatus, Graph};
use crate::poset::{LinearExtension, Poset};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs the algorithm with the configured `epsilon` and a fresh RNG seeded
/// from `config.seed`. The returned certificate is expressed against
/// `host_n = |A|`, the side size the guarantee is stated for, and carries the
/// largest exponent its own blocks support.
pub fn main_algorithm(
    p: &Poset,
    a: &VertexSet,
    b: &VertexSet,
    le: &LinearExtension,
    config: &AlgoConfig,
) -> Result<BlockCertificate, ExtractError> {
    let comp = p.comparability_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    main_algorithm_impl(&comp, a, b, le, config.epsilon, config, &mut rng)
}

pub(crate) fn main_algorithm_impl(
    comp: &Graph,
    a0: &VertexSet,
    b0: &VertexSet,
    le: &LinearExtension,
    epsilon: f64,
    config: &AlgoConfig,
    rng: &mut ChaCha8Rng,
) -> Result<BlockCertificate, ExtractError> {
    let mut state = MainState::new(comp, a0, b0, le, epsilon, config)?;
    state.check_bucket_sum()?;
    state.check_properties()?;

    loop {
        if state.j == 0 {
            // Property 3 at J = 0: no edges remain between A and B.
            let x1 = state.a.clone();
            let x2 = state.b.clone();
            return state.emit_pair(x1, x2);
        }

        let buckets = state.bucketize()?;
        let k = (1..=state.j)
            .rev()
            .find(|&k| state.t_j(k) < buckets[k as usize].len() as f64);

        let Some(k) = k else {
            // Every bucket 1..J is small, so the zero-degree bucket holds at
            // least half of the side.
            let v0 = &buckets[0];
            if 2 * v0.len() < state.m {
                return Err(ExtractError::Internal(format!(
                    "no active bucket but |V_0| = {} < m/2 = {}",
                    v0.len(),
                    state.m as f64 / 2.0
                )));
            }
            let x2 = state.a.clone();
            return state.emit_pair(v0.clone(), x2);
        };

        // Dump buckets above k and lower the bound.
        for i in (k + 1)..=state.j {
            state.move_b_to_leftover(&buckets[i as usize]);
        }
        state.j = k;
        state.check_properties()?;

        match state.run_sub_algorithm(buckets[k as usize].clone(), k, rng)? {
            SubOutcome::Blocks(blocks) => return state.emit_blocks(blocks),
            SubOutcome::Exhausted => {
                // Working set dumped; J was lowered to k-1 inside.
                state.check_properties()?;
            }
        }
    }
}

enum SubOutcome {
    Blocks(Vec<VertexSet>),
    Exhausted,
}

struct MainState<'g> {
    comp: &'g Graph,
    m: usize,
    a: VertexSet,
    a_left: VertexSet,
    b: VertexSet,
    b_left: VertexSet,
    j: i64,
    j0: i64,
    epsilon: f64,
    delta: f64,
    retry_cap: usize,
}

impl<'g> MainState<'g> {
    fn new(
        comp: &'g Graph,
        a0: &VertexSet,
        b0: &VertexSet,
        le: &LinearExtension,
        epsilon: f64,
        config: &AlgoConfig,
    ) -> Result<Self, ExtractError> {
        config.validate()?;
        let m = a0.len();
        if m == 0 || m != b0.len() {
            return Err(ExtractError::Precondition(format!(
                "sides must be equal and non-empty, got |A| = {m}, |B| = {}",
                b0.len()
            )));
        }
        if !a0.is_disjoint(b0) {
            return Err(ExtractError::Precondition("sides overlap".into()));
        }
        if !le.set_precedes(a0, b0) {
            return Err(ExtractError::Precondition(
                "A must precede B in the linear extension".into(),
            ));
        }
        let limit = epsilon * m as f64 + 1e-9;
        for v in a0.iter() {
            if comp.degree_into(v, b0) as f64 > limit {
                return Err(ExtractError::Precondition(format!(
                    "vertex {v} of A has {} neighbors in B, above eps*m = {limit:.3}",
                    comp.degree_into(v, b0)
                )));
            }
        }
        for w in b0.iter() {
            if comp.degree_into(w, a0) as f64 > limit {
                return Err(ExtractError::Precondition(format!(
                    "vertex {w} of B has {} neighbors in A, above eps*m = {limit:.3}",
                    comp.degree_into(w, a0)
                )));
            }
        }
        let j0 = {
            let em = epsilon * m as f64;
            if em >= 1.0 {
                (em.log2().floor() as i64) + 1
            } else {
                0
            }
        };
        Ok(MainState {
            comp,
            m,
            a: a0.clone(),
            a_left: VertexSet::empty(comp.n()),
            b: b0.clone(),
            b_left: VertexSet::empty(comp.n()),
            j: j0,
            j0,
            epsilon,
            delta: config.delta,
            retry_cap: config.retry_cap,
        })
    }

    fn t_j(&self, j: i64) -> f64 {
        (self.m as f64).sqrt() * 2f64.powf(j as f64 / 2.0)
    }

    /// `Σ_{i=from}^{J₀} t_i`.
    fn tail_sum(&self, from: i64) -> f64 {
        (from..=self.j0).map(|i| self.t_j(i)).sum()
    }

    /// The bucket-sum bound: `Σ_{i=1}^{J₀} t_i < m/4`. Holds for the paper
    /// epsilon by direct summation; rejected here for epsilons too large.
    fn check_bucket_sum(&self) -> Result<(), ExtractError> {
        let total = self.tail_sum(1);
        if total >= self.m as f64 / 4.0 {
            return Err(ExtractError::Precondition(format!(
                "bucket sum {total:.3} ≥ m/4 = {:.3}; epsilon = {} is too large",
                self.m as f64 / 4.0,
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Properties 1–3, checked after every main-algorithm step.
    fn check_properties(&self) -> Result<(), ExtractError> {
        if self.a.len() + self.a_left.len() != self.m || self.b.len() + self.b_left.len() != self.m
        {
            return Err(ExtractError::Internal(format!(
                "property 1 violated: |A|+|A'| = {}, |B|+|B'| = {}, m = {}",
                self.a.len() + self.a_left.len(),
                self.b.len() + self.b_left.len(),
                self.m
            )));
        }
        let bound = 2.0 * self.tail_sum(self.j + 1) + 1e-9;
        if self.a_left.len() as f64 > bound || self.b_left.len() as f64 > bound {
            return Err(ExtractError::Internal(format!(
                "property 2 violated: |A'| = {}, |B'| = {}, bound = {bound:.3} at J = {}",
                self.a_left.len(),
                self.b_left.len(),
                self.j
            )));
        }
        let cap = 1u64 << self.j.min(62);
        for v in self.b.iter() {
            let d = self.comp.degree_into(v, &self.a) as u64;
            if d >= cap {
                return Err(ExtractError::Internal(format!(
                    "property 3 violated: vertex {v} has {d} ≥ 2^{} neighbors in A",
                    self.j
                )));
            }
        }
        Ok(())
    }

    /// Partition of B by dyadic degree into A: index 0 holds the zero-degree
    /// bucket, index `i ≥ 1` the vertices with `2^{i-1} ≤ |N(v)∩A| < 2^i`.
    fn bucketize(&self) -> Result<Vec<VertexSet>, ExtractError> {
        let n = self.comp.n();
        let mut buckets = vec![VertexSet::empty(n); (self.j + 1) as usize];
        for v in self.b.iter() {
            let d = self.comp.degree_into(v, &self.a);
            let i = if d == 0 {
                0
            } else {
                64 - (d as u64).leading_zeros() as i64
            };
            if i > self.j {
                return Err(ExtractError::Internal(format!(
                    "property 3 violated during bucketing: vertex {v} lands in bucket {i} > J = {}",
                    self.j
                )));
            }
            buckets[i as usize].insert(v);
        }
        Ok(buckets)
    }

    fn move_b_to_leftover(&mut self, set: &VertexSet) {
        debug_assert!(set.is_subset_of(&self.b));
        self.b.subtract(set);
        self.b_left.union_with(set);
    }

    fn move_a_to_leftover(&mut self, set: &VertexSet) {
        debug_assert!(set.is_subset_of(&self.a));
        self.a.subtract(set);
        self.a_left.union_with(set);
    }

    fn run_sub_algorithm(
        &mut self,
        w0: VertexSet,
        k: i64,
        rng: &mut ChaCha8Rng,
    ) -> Result<SubOutcome, ExtractError> {
        let t_k = self.t_j(k);
        let threshold = 1u64 << (k - 1).min(62);
        let mut w = w0;
        let mut heavy_total = 0.0f64;

        loop {
            if (w.len() as f64) < 2.0 * t_k {
                self.move_b_to_leftover(&w);
                self.j = k - 1;
                return Ok(SubOutcome::Exhausted);
            }
            let wl = w.len();
            let x_l = wl as f64 / t_k;
            let delta_l = (wl as f64) * (wl as f64) / self.m as f64;

            let mut heavy = VertexSet::empty(self.comp.n());
            for v in self.a.iter() {
                if self.comp.degree_into(v, &w) as f64 >= delta_l {
                    heavy.insert(v);
                }
            }
            // Edge counting between the heavy set and W bounds |H_l| < t_k/x_l,
            // and the per-activation total below t_k.
            if heavy.len() as f64 >= t_k / x_l + 1e-9 {
                return Err(ExtractError::Internal(format!(
                    "heavy set bound violated: |H_l| = {} ≥ t_k/x_l = {:.3}",
                    heavy.len(),
                    t_k / x_l
                )));
            }
            heavy_total += heavy.len() as f64;
            if heavy_total >= t_k + 1e-9 {
                return Err(ExtractError::Internal(format!(
                    "sub-algorithm accounting violated: Σ|H_l| = {heavy_total} ≥ t_k = {t_k:.3}"
                )));
            }
            self.move_a_to_leftover(&heavy);

            let mut survivors = VertexSet::empty(self.comp.n());
            for v in w.iter() {
                if self.comp.degree_into(v, &self.a) as u64 >= threshold {
                    survivors.insert(v);
                }
            }
            // Monotone safety: degrees into A only decrease, so the survivors
            // recomputed over all of B coincide with those inside W.
            let mut over_b = VertexSet::empty(self.comp.n());
            for v in self.b.iter() {
                if self.comp.degree_into(v, &self.a) as u64 >= threshold {
                    over_b.insert(v);
                }
            }
            if over_b != survivors {
                return Err(ExtractError::Internal(
                    "monotone safety violated: high-degree set escaped the working set".into(),
                ));
            }

            if 2 * survivors.len() >= wl {
                // Case 1.
                return self
                    .case_one(&w, &survivors, k, delta_l, rng)
                    .map(SubOutcome::Blocks);
            }
            // Case 2: the working set at least halves.
            w = survivors;
        }
    }

    /// Case 1: sample `S ⊆ A` at rate `2^{-k}` until the single-neighbor set
    /// `Y` reaches `|W_l|/12`, then group the per-pivot cells `Y_v` greedily
    /// into blocks of size at least `Δ'_l = min(ε·m, Δ_l)`.
    fn case_one(
        &mut self,
        w: &VertexSet,
        t_set: &VertexSet,
        k: i64,
        delta_l: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<VertexSet>, ExtractError> {
        let p = 2f64.powi(-(k as i32));
        let wl = w.len();
        let mut chosen: Option<(VertexSet, Vec<usize>)> = None;
        for _ in 0..self.retry_cap {
            let mut s = VertexSet::empty(self.comp.n());
            for v in self.a.iter() {
                if rng.gen_bool(p) {
                    s.insert(v);
                }
            }
            let y: Vec<usize> = t_set
                .iter()
                .filter(|&v| self.comp.degree_into(v, &s) == 1)
                .collect();
            if 12 * y.len() >= wl {
                chosen = Some((s, y));
                break;
            }
        }
        let Some((s, y)) = chosen else {
            return Err(ExtractError::RetryCapExhausted(format!(
                "no sample reached |Y| ≥ |W_l|/12 = {:.2} within {} attempts (k = {k})",
                wl as f64 / 12.0,
                self.retry_cap
            )));
        };

        let delta_prime = (self.epsilon * self.m as f64).min(delta_l);

        // Cells keyed by the unique sampled neighbor.
        let mut cells: Vec<(usize, VertexSet)> = Vec::new();
        for &v in &y {
            let pivot = self
                .comp
                .neighbors(v)
                .intersection(&s)
                .first()
                .expect("good vertices have exactly one sampled neighbor");
            match cells.iter_mut().find(|(u, _)| *u == pivot) {
                Some((_, cell)) => cell.insert(v),
                None => {
                    let mut cell = VertexSet::empty(self.comp.n());
                    cell.insert(v);
                    cells.push((pivot, cell));
                }
            }
        }
        for (pivot, cell) in &cells {
            if cell.len() as f64 > delta_prime + 1e-9 {
                return Err(ExtractError::Internal(format!(
                    "cell of pivot {pivot} has {} > Δ'_l = {delta_prime:.3} vertices",
                    cell.len()
                )));
            }
        }
        cells.sort_by_key(|(u, cell)| (std::cmp::Reverse(cell.len()), *u));

        // Greedy grouping: close a group once it reaches Δ'_l, fold the final
        // partial group into the last closed one.
        let mut blocks: Vec<VertexSet> = Vec::new();
        let mut current = VertexSet::empty(self.comp.n());
        for (_, cell) in &cells {
            current.union_with(cell);
            if current.len() as f64 >= delta_prime {
                blocks.push(std::mem::replace(
                    &mut current,
                    VertexSet::empty(self.comp.n()),
                ));
            }
        }
        if !current.is_empty() {
            match blocks.last_mut() {
                Some(last) => last.union_with(&current),
                None => blocks.push(current),
            }
        }

        let t = blocks.len();
        if t < 2 {
            return Err(ExtractError::EpsilonTooLarge(format!(
                "Case-1 grouping yielded t = {t} at k = {k}, |W_l| = {wl}, |Y| = {}, Δ'_l = {delta_prime:.3}; \
                 the configured epsilon does not leave room for two groups",
                y.len()
            )));
        }
        if (t as f64) < y.len() as f64 / (3.0 * delta_prime) - 1e-9 {
            return Err(ExtractError::Internal(format!(
                "group count {t} below |Y|/(3Δ'_l) = {:.3}",
                y.len() as f64 / (3.0 * delta_prime)
            )));
        }
        Ok(blocks)
    }

    /// Emits a two-block certificate after verifying the anticompleteness and
    /// the `δ·(m/|X_i|)^{1/2} < t` guarantee.
    fn emit_pair(&self, x1: VertexSet, x2: VertexSet) -> Result<BlockCertificate, ExtractError> {
        self.emit_blocks(vec![x1, x2])
    }

    fn emit_blocks(&self, blocks: Vec<VertexSet>) -> Result<BlockCertificate, ExtractError> {
        let t = blocks.len();
        for (i, x) in blocks.iter().enumerate() {
            if x.is_empty() {
                return Err(ExtractError::Internal(format!("emitted empty block {i}")));
            }
            let ratio = self.m as f64 / x.len() as f64;
            if self.delta * ratio.sqrt() >= t as f64 {
                return Err(ExtractError::Internal(format!(
                    "output guarantee violated: δ·(m/|X_{i}|)^(1/2) = {:.4} ≥ t = {t}",
                    self.delta * ratio.sqrt()
                )));
            }
        }
        for i in 0..t {
            for j in i + 1..t {
                if self.comp.crossing_status(&blocks[i], &blocks[j])
                    != Ok(CrossingStatus::Empty)
                {
                    return Err(ExtractError::Internal(format!(
                        "emitted blocks {i} and {j} with comparability edges between them"
                    )));
                }
            }
        }
        let exponent = witness_exponent(t, self.m, &blocks);
        BlockCertificate::new(BlockKind::Empty, blocks, exponent, self.m)
            .map_err(|e| ExtractError::Internal(format!("emitted malformed certificate: {e}")))
    }
}

/// Largest exponent `c ≤ 1` with `t ≥ (host_n/|X_i|)^c` for every block.
fn witness_exponent(t: usize, host_n: usize, blocks: &[VertexSet]) -> f64 {
    let mut c = 1.0f64;
    for x in blocks {
        let ratio = host_n as f64 / x.len() as f64;
        if ratio > 1.0 {
            c = c.min((t as f64).ln() / ratio.ln());
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::validate_certificate;
    use crate::extract::sparse::{sparse_or_split, SparseOrSplit};
    use crate::poset::Poset;

    fn halves(n: usize) -> (VertexSet, VertexSet) {
        (
            VertexSet::from_indices(2 * n, 0..n),
            VertexSet::from_indices(2 * n, n..2 * n),
        )
    }

    /// Height-2 poset: elements of B lie above prescribed subsets of A.
    /// A = 0..m, B = m..2m; relations are (a, m + b_idx).
    fn bipartite_poset(m: usize, b_neighbors: &[Vec<usize>]) -> Poset {
        assert!(b_neighbors.len() <= m);
        let mut pairs = Vec::new();
        for (bi, nbrs) in b_neighbors.iter().enumerate() {
            for &a in nbrs {
                pairs.push((a, m + bi));
            }
        }
        // Pad B to exactly m elements (the rest incomparable).
        Poset::from_relations(2 * m, &pairs).unwrap()
    }

    #[test]
    fn no_crossing_edges_gives_two_blocks() {
        // Two antichains with nothing between them.
        let p = Poset::from_relations(20, &[]).unwrap();
        let le = p.linear_extension();
        let (a, b) = halves(10);
        let cert = main_algorithm(&p, &a, &b, &le, &AlgoConfig::default()).unwrap();
        assert_eq!(cert.t(), 2);
        let comp = p.comparability_graph();
        assert!(validate_certificate(&comp, &cert).pass);
        // δ·(m/|X_i|)^(1/2) < 2 for both blocks.
        for x in &cert.blocks {
            assert!(0.01 * (10.0 / x.len() as f64).sqrt() < 2.0);
        }
    }

    #[test]
    fn tiny_sides_force_zero_crossing_branch() {
        // eps*m < 1 means the precondition forbids any crossing edge.
        let p = Poset::from_relations(4, &[]).unwrap();
        let le = p.linear_extension();
        let (a, b) = halves(2);
        let cert = main_algorithm(&p, &a, &b, &le, &AlgoConfig::default()).unwrap();
        assert_eq!(cert.t(), 2);
    }

    #[test]
    fn precondition_rejects_unbalanced_sides() {
        let p = Poset::from_relations(4, &[]).unwrap();
        let le = p.linear_extension();
        let a = VertexSet::from_indices(4, [0]);
        let b = VertexSet::from_indices(4, [1, 2]);
        assert!(matches!(
            main_algorithm(&p, &a, &b, &le, &AlgoConfig::default()),
            Err(ExtractError::Precondition(_))
        ));
    }

    #[test]
    fn case_one_fires_on_single_neighbor_bucket() {
        // m = 8192, 260 B-vertices each with one private A-neighbor: bucket
        // k = 1 is active (t_1 ≈ 128 < 260) and no vertex of A is heavy, so
        // at least half of W keeps its neighbor and Case 1 runs.
        let m = 8192;
        let neighbors: Vec<Vec<usize>> = (0..260).map(|i| vec![i]).collect();
        let p = bipartite_poset(m, &neighbors);
        let le = p.linear_extension();
        let (a, b) = halves(m);
        let cfg = AlgoConfig::default();
        let cert = main_algorithm(&p, &a, &b, &le, &cfg).unwrap();
        assert!(cert.t() >= 2, "expected multiple blocks, got {}", cert.t());
        let comp = p.comparability_graph();
        assert!(validate_certificate(&comp, &cert).pass);
        // Case 1 groups cells of size ≥ Δ'_l = min(eps·m, Δ_0) ≈ 8.25, so the
        // block count lands well above the two-block exits.
        assert!(cert.t() >= 3);
    }

    #[test]
    fn case_two_strips_hub_followers() {
        // Nine heavy hubs with 15 followers each plus 125 private vertices:
        // removing the hubs drops 135 of 260 working vertices below 2^{k-1},
        // so Case 2 shrinks W to the 125 privates, which is below 2·t_1 and
        // gets dumped; the run ends in the J = 0 exit.
        let m = 8192;
        let mut neighbors: Vec<Vec<usize>> = Vec::new();
        for hub in 0..9usize {
            for _ in 0..15 {
                neighbors.push(vec![hub]);
            }
        }
        for priv_idx in 0..125usize {
            neighbors.push(vec![9 + priv_idx]);
        }
        assert_eq!(neighbors.len(), 260);
        let p = bipartite_poset(m, &neighbors);
        let le = p.linear_extension();
        let (a, b) = halves(m);
        let cert = main_algorithm(&p, &a, &b, &le, &AlgoConfig::default()).unwrap();
        assert_eq!(cert.t(), 2);
        let comp = p.comparability_graph();
        assert!(validate_certificate(&comp, &cert).pass);
    }

    #[test]
    fn sparse_pairs_from_random_posets_extract_cleanly() {
        let cfg = AlgoConfig::default();
        for seed in 0..50 {
            let p = Poset::random_dimension_k(2000, 2, seed);
            let le = p.linear_extension();
            match sparse_or_split(&p, &le, 0.3, cfg.epsilon).unwrap() {
                SparseOrSplit::Sparse { a, b } => {
                    let cert = main_algorithm(&p, &a, &b, &le, &cfg).unwrap();
                    let comp = p.comparability_graph();
                    assert!(validate_certificate(&comp, &cert).pass, "seed {seed}");
                }
                SparseOrSplit::Split { .. } => {}
            }
        }
    }
}
