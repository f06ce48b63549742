//! Block-certificate extraction from comparability and incomparability
//! graphs: degree peeling, the sparse-or-split dichotomy, the bucketed main
//! algorithm, and the wrappers that assemble validated certificates with a
//! closed-form exponent.

pub mod main_algo;
pub mod peel;
pub mod sparse;

pub use main_algo::main_algorithm;
pub use peel::peel_to_bounded_max_degree;
pub use sparse::{sparse_or_split, SparseOrSplit};

use crate::certificate::{validate_certificate, BlockCertificate, BlockKind};
use crate::graph::Graph;
use crate::poset::Poset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("witness mismatch: graph is not the incomparability graph of the poset")]
    WitnessMismatch,
    #[error("sampling retry cap exhausted: {0}")]
    RetryCapExhausted(String),
    #[error("epsilon too large: {0}")]
    EpsilonTooLarge(String),
    #[error("internal bookkeeping assertion failed: {0}")]
    Internal(String),
}

/// Tunables of the extraction pipeline. `epsilon` and `delta` default to the
/// values the output guarantee is proved for; `epsilon_safe` is the smaller
/// fallback that keeps `|Y|/(12·√ε) ≥ 6` and hence always leaves room for two
/// Case-1 groups. All randomness flows from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlgoConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_safe: f64,
    pub retry_cap: usize,
    pub seed: u64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            epsilon: 1.0 / 500.0,
            delta: 1.0 / 100.0,
            epsilon_safe: 1.0 / 5184.0,
            retry_cap: 1000,
            seed: 0,
        }
    }
}

impl AlgoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Switches the primary epsilon to the safe fallback value.
    pub fn with_safe_epsilon(mut self) -> Self {
        self.epsilon = self.epsilon_safe;
        self
    }

    pub fn validate(&self) -> Result<(), ExtractError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ExtractError::Precondition(format!(
                "epsilon must be in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ExtractError::Precondition(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.epsilon_safe > 0.0 && self.epsilon_safe < 1.0) {
            return Err(ExtractError::Precondition(format!(
                "epsilon_safe must be in (0, 1), got {}",
                self.epsilon_safe
            )));
        }
        if self.retry_cap == 0 {
            return Err(ExtractError::Precondition("retry_cap must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// The certificate exponent implied by `(alpha, epsilon, delta)`:
/// with `α₁ = α/4` and `β = α₁²ε/24`, the smallest of the constants making
/// both exit routes valid — `δ√β·(n/|X_i|)^{1/2} ≥ (n/|X_i|)^c` whenever the
/// left side is at least 2, and `2 ≥ (1/β)^c` for the split route.
pub fn exponent_for(alpha: f64, epsilon: f64, delta: f64) -> f64 {
    let beta = beta_for(alpha, epsilon);
    let route_main = std::f64::consts::LN_2 / (2.0 * (2.0 / (delta * beta.sqrt())).ln());
    let route_split = std::f64::consts::LN_2 / (1.0 / beta).ln();
    route_main.min(route_split)
}

pub fn beta_for(alpha: f64, epsilon: f64) -> f64 {
    let alpha1 = alpha / 4.0;
    alpha1 * alpha1 * epsilon / 24.0
}

/// Extraction result plus which epsilon actually produced it.
#[derive(Debug, Clone)]
pub struct ExtractionReport {
    pub certificate: BlockCertificate,
    pub epsilon_used: f64,
    pub restarted_with_safe_epsilon: bool,
}

/// Anticomplete blocks in the comparability graph of `p`.
///
/// Requires `n ≥ 2` and at most `(1-alpha)·n(n-1)/2` comparability edges.
/// The certificate carries `c = exponent_for(alpha, ε, δ)` and is validated
/// against the comparability graph before being returned. If Case-1 grouping
/// cannot produce two blocks under the configured epsilon, the whole
/// extraction restarts once with `epsilon_safe`.
pub fn extract_blocks_comparability(
    p: &Poset,
    alpha: f64,
    config: &AlgoConfig,
) -> Result<BlockCertificate, ExtractError> {
    extract_blocks_comparability_report(p, alpha, config).map(|r| r.certificate)
}

pub fn extract_blocks_comparability_report(
    p: &Poset,
    alpha: f64,
    config: &AlgoConfig,
) -> Result<ExtractionReport, ExtractError> {
    config.validate()?;
    let n = p.len();
    if n < 2 {
        return Err(ExtractError::Degenerate(format!(
            "extraction needs n ≥ 2, got {n}"
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ExtractError::Precondition(format!(
            "alpha must be in (0, 1], got {alpha}"
        )));
    }
    let comp = p.comparability_graph();
    let max_edges = (1.0 - alpha) * (n * (n - 1)) as f64 / 2.0;
    if comp.edge_count() as f64 > max_edges + 1e-9 {
        return Err(ExtractError::Precondition(format!(
            "comparability graph has {} edges, extraction requires at most {:.3}",
            comp.edge_count(),
            max_edges
        )));
    }
    let le = p.linear_extension();

    match attempt_extraction(p, &comp, &le, alpha, config.epsilon, config) {
        Ok(certificate) => Ok(ExtractionReport {
            certificate,
            epsilon_used: config.epsilon,
            restarted_with_safe_epsilon: false,
        }),
        Err(ExtractError::EpsilonTooLarge(why)) if config.epsilon > config.epsilon_safe => {
            let certificate =
                attempt_extraction(p, &comp, &le, alpha, config.epsilon_safe, config).map_err(
                    |e| match e {
                        ExtractError::EpsilonTooLarge(more) => ExtractError::Internal(format!(
                            "safe-epsilon restart still failed ({why}); then: {more}"
                        )),
                        other => other,
                    },
                )?;
            Ok(ExtractionReport {
                certificate,
                epsilon_used: config.epsilon_safe,
                restarted_with_safe_epsilon: true,
            })
        }
        Err(e) => Err(e),
    }
}

fn attempt_extraction(
    p: &Poset,
    comp: &Graph,
    le: &crate::poset::LinearExtension,
    alpha: f64,
    epsilon: f64,
    config: &AlgoConfig,
) -> Result<BlockCertificate, ExtractError> {
    let n = p.len();
    let c = exponent_for(alpha, epsilon, config.delta);
    let blocks = match sparse::sparse_or_split_impl(p, comp, le, alpha, epsilon)? {
        SparseOrSplit::Split { x1, x2 } => vec![x1, x2],
        SparseOrSplit::Sparse { a, b } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let inner =
                main_algo::main_algorithm_impl(comp, &a, &b, le, epsilon, config, &mut rng)?;
            inner.blocks
        }
    };
    let certificate = BlockCertificate::new(BlockKind::Empty, blocks, c, n)
        .map_err(|e| ExtractError::Internal(format!("malformed certificate assembled: {e}")))?;
    let report = validate_certificate(comp, &certificate);
    if !report.pass {
        return Err(ExtractError::Internal(format!(
            "assembled certificate failed validation: {}",
            report.violation.unwrap_or_default()
        )));
    }
    Ok(certificate)
}

/// Complete blocks in an incomparability graph, witnessed by its poset.
///
/// Requires `g = incomparability_graph(p)` and at least `alpha·n(n-1)/2`
/// edges in `g`; runs the comparability extraction on `p` and re-reads the
/// anticomplete blocks as complete blocks of `g`.
pub fn extract_blocks_incomparability(
    g: &Graph,
    p: &Poset,
    alpha: f64,
    config: &AlgoConfig,
) -> Result<BlockCertificate, ExtractError> {
    if *g != p.incomparability_graph() {
        return Err(ExtractError::WitnessMismatch);
    }
    let n = g.n();
    let min_edges = alpha * (n * n.saturating_sub(1)) as f64 / 2.0;
    if (g.edge_count() as f64) < min_edges - 1e-9 {
        return Err(ExtractError::Precondition(format!(
            "incomparability graph has {} edges, extraction requires at least {:.3}",
            g.edge_count(),
            min_edges
        )));
    }
    let cert = extract_blocks_comparability(p, alpha, config)?.with_kind(BlockKind::Complete);
    let report = validate_certificate(g, &cert);
    if !report.pass {
        return Err(ExtractError::Internal(format!(
            "relabeled certificate failed validation against the incomparability graph: {}",
            report.violation.unwrap_or_default()
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::validate_certificate;

    #[test]
    fn antichain_extracts_valid_certificate() {
        let p = Poset::from_relations(10, &[]).unwrap();
        let cert = extract_blocks_comparability(&p, 1.0, &AlgoConfig::default()).unwrap();
        let report = validate_certificate(&p.comparability_graph(), &cert);
        assert!(report.pass, "{:?}", report.violation);
    }

    #[test]
    fn two_disjoint_chains_yield_the_chains() {
        let mut pairs = Vec::new();
        for i in 0..49 {
            pairs.push((i, i + 1));
            pairs.push((50 + i, 51 + i));
        }
        let p = Poset::from_relations(100, &pairs).unwrap();
        let cert = extract_blocks_comparability(&p, 0.4, &AlgoConfig::default()).unwrap();
        assert_eq!(cert.t(), 2);
        let sizes: Vec<usize> = cert.blocks.iter().map(|b| b.len()).collect();
        assert_eq!(sizes, vec![50, 50]);
    }

    #[test]
    fn random_dimension_three_posets_extract() {
        let cfg = AlgoConfig::default();
        for seed in 0..20 {
            let p = Poset::random_dimension_k(500, 3, seed);
            let comp = p.comparability_graph();
            let slack = 1.0 - comp.edge_count() as f64 / ((500.0 * 499.0) / 2.0);
            let alpha = slack * 0.9;
            let cert = extract_blocks_comparability(&p, alpha, &cfg.with_seed(seed)).unwrap();
            assert!(validate_certificate(&comp, &cert).pass, "seed {seed}");
        }
    }

    #[test]
    fn incomparability_needs_matching_witness() {
        let p = Poset::from_relations(5, &[]).unwrap();
        let wrong = Graph::empty(5);
        assert!(matches!(
            extract_blocks_incomparability(&wrong, &p, 0.5, &AlgoConfig::default()),
            Err(ExtractError::WitnessMismatch)
        ));
    }

    #[test]
    fn chain_fails_incomparability_precondition() {
        let pairs: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        let p = Poset::from_relations(10, &pairs).unwrap();
        let g = p.incomparability_graph();
        assert!(matches!(
            extract_blocks_incomparability(&g, &p, 0.3, &AlgoConfig::default()),
            Err(ExtractError::Precondition(_))
        ));
    }

    #[test]
    fn antichain_complete_graph_gets_complete_blocks() {
        let p = Poset::from_relations(10, &[]).unwrap();
        let g = p.incomparability_graph();
        assert!(g.is_complete());
        let cert = extract_blocks_incomparability(&g, &p, 1.0, &AlgoConfig::default()).unwrap();
        assert_eq!(cert.kind, BlockKind::Complete);
        assert!(validate_certificate(&g, &cert).pass);
    }

    #[test]
    fn dimension_two_incomparability_extracts() {
        let cfg = AlgoConfig::default();
        for seed in 0..10 {
            let p = Poset::random_dimension_k(1000, 2, seed);
            let g = p.incomparability_graph();
            let cert = extract_blocks_incomparability(&g, &p, 0.3, &cfg.with_seed(seed)).unwrap();
            assert_eq!(cert.kind, BlockKind::Complete);
            assert!(validate_certificate(&g, &cert).pass);
        }
    }

    #[test]
    fn tiny_posets_are_rejected() {
        let p = Poset::from_relations(1, &[]).unwrap();
        assert!(matches!(
            extract_blocks_comparability(&p, 0.5, &AlgoConfig::default()),
            Err(ExtractError::Degenerate(_))
        ));
    }

    #[test]
    fn exponent_formula_is_monotone_in_alpha() {
        let c_small = exponent_for(0.1, 1.0 / 500.0, 0.01);
        let c_big = exponent_for(0.9, 1.0 / 500.0, 0.01);
        assert!(c_small > 0.0 && c_big > c_small && c_big < 0.5);
    }
}
