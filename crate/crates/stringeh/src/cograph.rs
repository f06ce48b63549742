//! Cotrees and the certificate-to-homogeneous-set recursion.
//!
//! A block oracle refines vertex sets into pairwise-complete or
//! pairwise-anticomplete blocks; recording each refinement as a join/union
//! node grows a cotree whose leaves end up singletons. Leftover vertices of a
//! refined set (outside the union of its blocks) are discarded. Because
//! every certificate satisfies `t ≥ (|X|/|X_i|)^c`, the potential
//! `Σ_{Y} |Y|^c` never decreases, so the final tree keeps at least `n^c`
//! leaves; cograph perfection (via the tree DP here) then converts the
//! leaves into a clique or independent set of size `n^{c/2}`.

use crate::bitset::VertexSet;
use crate::certificate::{validate_certificate, BlockCertificate, BlockKind};
use crate::graph::Graph;
use crate::maxclique::{CertifiedBound, RamseyResult};
use crate::poset::Poset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack for floating-point potential comparisons.
const FLOAT_GUARD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CographError {
    #[error("oracle failed on a {n}-vertex sub-instance: {message}\nsub-instance for repro: {instance}")]
    OracleFailed {
        n: usize,
        message: String,
        instance: String,
    },
    #[error("oracle contract violation: {reason}\nsub-instance for repro: {instance}")]
    OracleContract { reason: String, instance: String },
    #[error("cotree has a non-singleton leaf of size {0}")]
    NonSingletonLeaf(usize),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("malformed cotree input: {0}")]
    Parse(String),
}

/// Rooted tree over disjoint vertex-set leaves; children of a join node are
/// pairwise complete in the represented graph, children of a union node
/// pairwise anticomplete.
#[derive(Debug, Clone, PartialEq)]
pub enum Cotree {
    Leaf(VertexSet),
    Join(Vec<Cotree>),
    Union(Vec<Cotree>),
}

impl Cotree {
    pub fn leaf_count(&self) -> usize {
        match self {
            Cotree::Leaf(_) => 1,
            Cotree::Join(children) | Cotree::Union(children) => {
                children.iter().map(Cotree::leaf_count).sum()
            }
        }
    }

    pub fn leaves(&self) -> Vec<&VertexSet> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a VertexSet>) {
        match self {
            Cotree::Leaf(s) => out.push(s),
            Cotree::Join(children) | Cotree::Union(children) => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// Host vertices covered by the tree.
    pub fn vertex_set(&self, universe: usize) -> VertexSet {
        let mut s = VertexSet::empty(universe);
        for leaf in self.leaves() {
            s.union_with(leaf);
        }
        s
    }
}

/// Refines `g` into a cotree with singleton leaves using `oracle` on every
/// sub-instance of at least 2 vertices. Oracle replies are validated against
/// the sub-instance, their exponent is required to be at least `c`, and the
/// potential inequality `Σ|X_i|^c ≥ |X|^c` is checked at every refinement.
/// `witness` (when present) is restricted to each sub-instance and handed to
/// the oracle alongside the induced subgraph.
pub fn qeh_recursion<F, E>(
    g: &Graph,
    witness: Option<&Poset>,
    oracle: &F,
    c: f64,
) -> Result<Cotree, CographError>
where
    F: Fn(&Graph, Option<&Poset>) -> Result<BlockCertificate, E>,
    E: std::fmt::Display,
{
    refine(g, witness, oracle, c, g.vertices())
}

fn refine<F, E>(
    g: &Graph,
    witness: Option<&Poset>,
    oracle: &F,
    c: f64,
    set: VertexSet,
) -> Result<Cotree, CographError>
where
    F: Fn(&Graph, Option<&Poset>) -> Result<BlockCertificate, E>,
    E: std::fmt::Display,
{
    let size = set.len();
    if size <= 1 {
        return Ok(Cotree::Leaf(set));
    }
    let (sub, mapping) = g
        .induced(&set)
        .map_err(|e| CographError::Internal(format!("induced subgraph failed: {e}")))?;
    let sub_witness = witness.map(|p| p.induced(&mapping));
    let instance = || serialize_instance(&sub, sub_witness.as_ref());

    let cert = oracle(&sub, sub_witness.as_ref()).map_err(|e| CographError::OracleFailed {
        n: size,
        message: e.to_string(),
        instance: instance(),
    })?;
    let report = validate_certificate(&sub, &cert);
    if !report.pass {
        return Err(CographError::OracleContract {
            reason: report.violation.unwrap_or_default(),
            instance: instance(),
        });
    }
    if cert.exponent < c * (1.0 - FLOAT_GUARD) {
        return Err(CographError::OracleContract {
            reason: format!(
                "certificate exponent {} below the required {c}",
                cert.exponent
            ),
            instance: instance(),
        });
    }

    // Potential step: Σ|X_i|^c ≥ |X|^c. Implied by the size inequality, but
    // asserted in the form the recursion's conclusion depends on.
    let potential: f64 = cert
        .blocks
        .iter()
        .map(|x| (x.len() as f64).powf(c))
        .sum();
    if potential < (size as f64).powf(c) * (1.0 - FLOAT_GUARD) {
        return Err(CographError::OracleContract {
            reason: format!(
                "potential decreased: Σ|X_i|^c = {potential:.6} < |X|^c = {:.6}",
                (size as f64).powf(c)
            ),
            instance: instance(),
        });
    }

    let mut children = Vec::with_capacity(cert.t());
    for block in &cert.blocks {
        let host_block =
            VertexSet::from_indices(g.n(), block.iter().map(|local| mapping[local]));
        children.push(refine(g, witness, oracle, c, host_block)?);
    }
    Ok(match cert.kind {
        BlockKind::Complete => Cotree::Join(children),
        BlockKind::Empty => Cotree::Union(children),
    })
}

fn serialize_instance(sub: &Graph, witness: Option<&Poset>) -> String {
    let witness_json = witness.map_or("null".to_string(), Poset::to_json);
    format!("{{\"graph\":{},\"witness\":{}}}", sub.to_json(), witness_json)
}

/// Exact maximum clique of the cograph represented by a singleton-leaf
/// cotree, as host vertices (one witness vertex per chosen leaf).
pub fn cotree_max_clique(tree: &Cotree) -> Result<VertexSet, CographError> {
    let (clique, _) = dp(tree)?;
    Ok(collect(tree, clique))
}

/// Exact maximum independent set of the represented cograph.
pub fn cotree_max_independent(tree: &Cotree) -> Result<VertexSet, CographError> {
    let (_, independent) = dp(tree)?;
    Ok(collect(tree, independent))
}

fn collect(tree: &Cotree, vertices: Vec<usize>) -> VertexSet {
    let universe = tree
        .leaves()
        .first()
        .map_or(0, |leaf| leaf.universe());
    VertexSet::from_indices(universe, vertices)
}

/// Tree DP: at a join node clique sizes add and independent sizes maximize;
/// dually at a union node.
fn dp(tree: &Cotree) -> Result<(Vec<usize>, Vec<usize>), CographError> {
    match tree {
        Cotree::Leaf(s) => {
            if s.len() != 1 {
                return Err(CographError::NonSingletonLeaf(s.len()));
            }
            let v = s.first().expect("leaf has one vertex");
            Ok((vec![v], vec![v]))
        }
        Cotree::Join(children) => {
            let parts: Vec<(Vec<usize>, Vec<usize>)> =
                children.iter().map(dp).collect::<Result<_, _>>()?;
            let clique = parts.iter().flat_map(|(c, _)| c.iter().copied()).collect();
            let independent = parts
                .into_iter()
                .map(|(_, i)| i)
                .max_by_key(Vec::len)
                .unwrap_or_default();
            Ok((clique, independent))
        }
        Cotree::Union(children) => {
            let parts: Vec<(Vec<usize>, Vec<usize>)> =
                children.iter().map(dp).collect::<Result<_, _>>()?;
            let independent = parts.iter().flat_map(|(_, i)| i.iter().copied()).collect();
            let clique = parts
                .into_iter()
                .map(|(c, _)| c)
                .max_by_key(Vec::len)
                .unwrap_or_default();
            Ok((clique, independent))
        }
    }
}

/// Runs the recursion and converts the resulting cotree into a verified
/// clique or independent set of `g` of size at least `n^{c/2}` (the larger of
/// the two DP answers; both are returned).
pub fn homogeneous_from_certificates<F, E>(
    g: &Graph,
    witness: Option<&Poset>,
    oracle: &F,
    c: f64,
) -> Result<RamseyResult, CographError>
where
    F: Fn(&Graph, Option<&Poset>) -> Result<BlockCertificate, E>,
    E: std::fmt::Display,
{
    let n = g.n();
    let tree = qeh_recursion(g, witness, oracle, c)?;
    let leaf_count = tree.leaf_count();
    if (leaf_count as f64) < (n as f64).powf(c) * (1.0 - FLOAT_GUARD) {
        return Err(CographError::Internal(format!(
            "leaf count {leaf_count} below n^c = {:.4}",
            (n as f64).powf(c)
        )));
    }

    let clique = cotree_max_clique(&tree)?.to_vec();
    let independent = cotree_max_independent(&tree)?.to_vec();

    // Product bound for cographs: ω·α covers every leaf.
    if clique.len() * independent.len() < leaf_count {
        return Err(CographError::Internal(format!(
            "product bound failed: {} * {} < {leaf_count} leaves",
            clique.len(),
            independent.len()
        )));
    }
    verify_homogeneous(g, &clique, true)?;
    verify_homogeneous(g, &independent, false)?;

    let best = clique.len().max(independent.len());
    if (best as f64) < (n as f64).powf(c / 2.0) * (1.0 - FLOAT_GUARD) {
        return Err(CographError::Internal(format!(
            "largest homogeneous set has {best} vertices, below n^(c/2) = {:.4}",
            (n as f64).powf(c / 2.0)
        )));
    }
    Ok(RamseyResult {
        clique,
        independent,
        certified: Some(CertifiedBound {
            exponent: c,
            leaf_count,
        }),
    })
}

fn verify_homogeneous(g: &Graph, vertices: &[usize], complete: bool) -> Result<(), CographError> {
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if g.has_edge(u, v) != complete {
                return Err(CographError::Internal(format!(
                    "returned set is not homogeneous: pair ({u},{v}) breaks it"
                )));
            }
        }
    }
    Ok(())
}

/// The graph a singleton-leaf cotree represents: leaves are vertices, two
/// vertices adjacent iff their lowest common ancestor is a join node.
pub fn realized_graph(tree: &Cotree, universe: usize) -> Graph {
    let mut edges = Vec::new();
    collect_edges(tree, &mut edges);
    Graph::build(universe, &edges).expect("cotree leaves index into the universe")
}

fn collect_edges(tree: &Cotree, edges: &mut Vec<(usize, usize)>) {
    if let Cotree::Join(children) | Cotree::Union(children) = tree {
        for c in children {
            collect_edges(c, edges);
        }
        if let Cotree::Join(children) = tree {
            for i in 0..children.len() {
                let vi: Vec<usize> = children[i].leaves().iter().flat_map(|s| s.iter()).collect();
                for child in &children[i + 1..] {
                    for &u in &vi {
                        for leaf in child.leaves() {
                            for v in leaf.iter() {
                                edges.push((u, v));
                            }
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization: nested {"kind":"join"|"union"|"leaf", ...}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CotreeJson {
    Leaf { vertices: Vec<usize> },
    Join { children: Vec<CotreeJson> },
    Union { children: Vec<CotreeJson> },
}

impl Cotree {
    pub fn to_json(&self, universe: usize) -> String {
        serde_json::to_string(&encode(self, universe)).expect("cotree serialization cannot fail")
    }

    pub fn from_json(text: &str, universe: usize) -> Result<Cotree, CographError> {
        let doc: CotreeJson =
            serde_json::from_str(text).map_err(|e| CographError::Parse(e.to_string()))?;
        decode(&doc, universe)
    }
}

fn encode(tree: &Cotree, _universe: usize) -> CotreeJson {
    match tree {
        Cotree::Leaf(s) => CotreeJson::Leaf { vertices: s.to_vec() },
        Cotree::Join(children) => CotreeJson::Join {
            children: children.iter().map(|c| encode(c, _universe)).collect(),
        },
        Cotree::Union(children) => CotreeJson::Union {
            children: children.iter().map(|c| encode(c, _universe)).collect(),
        },
    }
}

fn decode(doc: &CotreeJson, universe: usize) -> Result<Cotree, CographError> {
    Ok(match doc {
        CotreeJson::Leaf { vertices } => {
            if let Some(&v) = vertices.iter().find(|&&v| v >= universe) {
                return Err(CographError::Parse(format!(
                    "leaf vertex {v} out of range for universe {universe}"
                )));
            }
            Cotree::Leaf(VertexSet::from_indices(universe, vertices.iter().copied()))
        }
        CotreeJson::Join { children } => Cotree::Join(
            children
                .iter()
                .map(|c| decode(c, universe))
                .collect::<Result<_, _>>()?,
        ),
        CotreeJson::Union { children } => Cotree::Union(
            children
                .iter()
                .map(|c| decode(c, universe))
                .collect::<Result<_, _>>()?,
        ),
    })
}

// ---------------------------------------------------------------------------
// Test support: random singleton-leaf cotrees
// ---------------------------------------------------------------------------

/// Random cotree whose leaves are exactly the singletons of `0..n`.
pub fn random_cotree<R: rand::Rng>(n: usize, rng: &mut R) -> Cotree {
    let indices: Vec<usize> = (0..n).collect();
    build_random(&indices, n, rng)
}

fn build_random<R: rand::Rng>(indices: &[usize], universe: usize, rng: &mut R) -> Cotree {
    if indices.len() == 1 {
        return Cotree::Leaf(VertexSet::from_indices(universe, [indices[0]]));
    }
    let parts = rng.gen_range(2..=indices.len().min(4));
    // Random composition of the index slice into `parts` non-empty pieces.
    let mut cuts: Vec<usize> = (1..indices.len()).collect();
    use rand::seq::SliceRandom;
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..parts - 1].to_vec();
    cuts.sort_unstable();
    cuts.push(indices.len());
    let mut children = Vec::with_capacity(parts);
    let mut start = 0;
    for cut in cuts {
        children.push(build_random(&indices[start..cut], universe, rng));
        start = cut;
    }
    if rng.gen_bool(0.5) {
        Cotree::Join(children)
    } else {
        Cotree::Union(children)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::ExtractError;
    use crate::maxclique::brute_force_ramsey;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Toy oracle: splits a homogeneous graph into all singletons; otherwise
    /// peels off the first two vertices as singleton blocks.
    fn toy_oracle(g: &Graph, _w: Option<&Poset>) -> Result<BlockCertificate, ExtractError> {
        let n = g.n();
        let kind = if g.is_complete() {
            BlockKind::Complete
        } else if g.is_edgeless() {
            BlockKind::Empty
        } else {
            let kind = if g.has_edge(0, 1) {
                BlockKind::Complete
            } else {
                BlockKind::Empty
            };
            let blocks = vec![
                VertexSet::from_indices(n, [0]),
                VertexSet::from_indices(n, [1]),
            ];
            return BlockCertificate::new(kind, blocks, 0.1, n)
                .map_err(|e| ExtractError::Internal(e.to_string()));
        };
        let blocks: Vec<VertexSet> = (0..n).map(|v| VertexSet::from_indices(n, [v])).collect();
        BlockCertificate::new(kind, blocks, 1.0, n)
            .map_err(|e| ExtractError::Internal(e.to_string()))
    }

    #[test]
    fn complete_graph_becomes_one_join_node() {
        let g = Graph::complete(4);
        let tree = qeh_recursion(&g, None, &toy_oracle, 0.1).unwrap();
        match &tree {
            Cotree::Join(children) => {
                assert_eq!(children.len(), 4);
                assert!(children.iter().all(|c| matches!(c, Cotree::Leaf(s) if s.len() == 1)));
            }
            other => panic!("expected a join node, got {other:?}"),
        }
    }

    #[test]
    fn empty_graph_becomes_one_union_node() {
        let g = Graph::empty(4);
        let tree = qeh_recursion(&g, None, &toy_oracle, 0.1).unwrap();
        match &tree {
            Cotree::Union(children) => assert_eq!(children.len(), 4),
            other => panic!("expected a union node, got {other:?}"),
        }
    }

    #[test]
    fn dp_examples() {
        let n = 5;
        let leaf = |v: usize| Cotree::Leaf(VertexSet::from_indices(n, [v]));
        let join3 = Cotree::Join(vec![leaf(0), leaf(1), leaf(2)]);
        assert_eq!(cotree_max_clique(&join3).unwrap().len(), 3);
        assert_eq!(cotree_max_independent(&join3).unwrap().len(), 1);

        let tree = Cotree::Union(vec![
            Cotree::Join(vec![leaf(0), leaf(1)]),
            Cotree::Join(vec![leaf(2), leaf(3), leaf(4)]),
        ]);
        assert_eq!(cotree_max_clique(&tree).unwrap().len(), 3);
        assert_eq!(cotree_max_independent(&tree).unwrap().len(), 2);
    }

    #[test]
    fn dp_rejects_non_singleton_leaves() {
        let tree = Cotree::Join(vec![
            Cotree::Leaf(VertexSet::from_indices(4, [0, 1])),
            Cotree::Leaf(VertexSet::from_indices(4, [2])),
        ]);
        assert!(matches!(
            cotree_max_clique(&tree),
            Err(CographError::NonSingletonLeaf(2))
        ));
    }

    #[test]
    fn dp_matches_brute_force_on_random_cotrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.gen_range(2..=16);
            let tree = random_cotree(n, &mut rng);
            let g = realized_graph(&tree, n);
            let exact = brute_force_ramsey(&g, 24).unwrap();
            let clique = cotree_max_clique(&tree).unwrap();
            let independent = cotree_max_independent(&tree).unwrap();
            assert_eq!(clique.len(), exact.clique.len());
            assert_eq!(independent.len(), exact.independent.len());
            // Product bound.
            assert!(clique.len() * independent.len() >= tree.leaf_count());
        }
    }

    #[test]
    fn homogeneous_on_cycle_with_toy_oracle() {
        let c5 = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let r = homogeneous_from_certificates(&c5, None, &toy_oracle, 0.1).unwrap();
        assert!(r.best_len() >= 2);
    }

    #[test]
    fn oracle_contract_violations_are_caught() {
        // Oracle that claims an exponent its blocks cannot support.
        let lying_oracle = |g: &Graph, _w: Option<&Poset>| -> Result<BlockCertificate, ExtractError> {
            let n = g.n();
            Ok(BlockCertificate {
                kind: if g.has_edge(0, 1) {
                    BlockKind::Complete
                } else {
                    BlockKind::Empty
                },
                blocks: vec![
                    VertexSet::from_indices(n, [0]),
                    VertexSet::from_indices(n, [1]),
                ],
                exponent: 1.0,
                host_n: n,
            })
        };
        let g = Graph::complete(6);
        let err = qeh_recursion(&g, None, &lying_oracle, 1.0).unwrap_err();
        assert!(matches!(err, CographError::OracleContract { .. }));
        assert!(err.to_string().contains("sub-instance"));
    }

    #[test]
    fn cotree_json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tree = random_cotree(9, &mut rng);
        let parsed = Cotree::from_json(&tree.to_json(9), 9).unwrap();
        assert_eq!(parsed, tree);
    }
}
