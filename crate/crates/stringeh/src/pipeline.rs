//! End-to-end dichotomy for string graphs: sparse instances split along a
//! balanced separator, dense instances extract complete blocks through an
//! incomparability witness, and the cograph recursion turns either kind of
//! certificate into a verified clique or independent set.
//!
//! Every emitted certificate carries the exponent
//! `c = min{c₀, 1/log₂(1/λ)}` for the configuration in force and is
//! re-validated before leaving the pipeline.

use crate::bitset::VertexSet;
use crate::certificate::{validate_certificate, BlockCertificate, BlockKind, ValidationReport};
use crate::cograph::{homogeneous_from_certificates, CographError};
use crate::extract::{
    exponent_for, extract_blocks_comparability_report, AlgoConfig, ExtractError,
};
use crate::geometry::{intersection_graph, witness_from_curves, CurveFamily};
use crate::graph::Graph;
use crate::maxclique::RamseyResult;
use crate::poset::Poset;
use crate::separator::{
    fallback_separator, find_balanced_separator, split_from_separator, SeparatorError,
    SeparatorStrategy,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("external witness oracle required: {0}")]
    OracleRequired(String),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error(transparent)]
    Recursion(#[from] CographError),
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// How the dense branch obtains its poset witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMode {
    /// A witness poset must accompany the input.
    Provided,
    /// Reconstruct the witness from permutation-segment geometry.
    DimensionTwo,
    /// Dense instances are rejected outright.
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Sparse/dense edge-density threshold: separator path iff `m ≤ λn²`.
    pub lambda: f64,
    pub algo: AlgoConfig,
    #[serde(with = "strategy_serde")]
    pub separator_strategy: SeparatorStrategy,
    pub dense_witness: WitnessMode,
    pub output_format: OutputFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            lambda: 0.01,
            algo: AlgoConfig::default(),
            separator_strategy: SeparatorStrategy::Greedy,
            dense_witness: WitnessMode::DimensionTwo,
            output_format: OutputFormat::Json,
        }
    }
}

mod strategy_serde {
    use super::SeparatorStrategy;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(s: &SeparatorStrategy, ser: S) -> Result<S::Ok, S::Error> {
        match s {
            SeparatorStrategy::Exact => "exact".serialize(ser),
            SeparatorStrategy::Greedy => "greedy".serialize(ser),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<SeparatorStrategy, D::Error> {
        match String::deserialize(de)?.as_str() {
            "exact" => Ok(SeparatorStrategy::Exact),
            "greedy" => Ok(SeparatorStrategy::Greedy),
            other => Err(serde::de::Error::custom(format!(
                "unknown separator strategy {other:?}"
            ))),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(PipelineError::Degenerate(format!(
                "lambda must be in (0, 1), got {}",
                self.lambda
            )));
        }
        self.algo.validate()?;
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.algo.seed = seed;
        self
    }

    /// The exponent every certificate of this configuration carries:
    /// `min{c₀(2λ, ε, δ), 1/log₂(1/λ)}`.
    pub fn exponent(&self) -> f64 {
        self.exponent_at(self.algo.epsilon)
    }

    fn exponent_at(&self, epsilon: f64) -> f64 {
        let dense = exponent_for(self.dense_alpha(), epsilon, self.algo.delta);
        let sparse = 1.0 / (1.0 / self.lambda).log2();
        dense.min(sparse)
    }

    /// Density handed to the incomparability extraction: more than `λn²`
    /// edges means at least `2λ·n(n-1)/2`.
    pub fn dense_alpha(&self) -> f64 {
        2.0 * self.lambda
    }
}

/// Derives independent child seeds from one root seed (splitmix64 steps).
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// One block certificate for a string graph, by the sparse/dense dichotomy.
///
/// Graphs that are already homogeneous (edgeless or complete) certify
/// themselves with singleton blocks. Otherwise, at most `λn²` edges routes
/// to the separator split (two anticomplete sides), and more than `λn²`
/// edges routes through the poset witness to the complete-block extraction.
pub fn string_quasi_eh(
    g: &Graph,
    witness: Option<&Poset>,
    cfg: &PipelineConfig,
) -> Result<BlockCertificate, PipelineError> {
    cfg.validate()?;
    let n = g.n();
    if n < 2 {
        return Err(PipelineError::Degenerate(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    let c = cfg.exponent();

    let cert = if g.is_edgeless() {
        singleton_certificate(g, BlockKind::Empty, c)?
    } else if g.is_complete() {
        singleton_certificate(g, BlockKind::Complete, c)?
    } else if g.edge_count() as f64 <= cfg.lambda * (n * n) as f64 {
        separator_certificate(g, cfg, c)?
    } else {
        dense_certificate(g, witness, cfg)?
    };

    let report = validate_certificate(g, &cert);
    if !report.pass {
        return Err(PipelineError::Internal(format!(
            "pipeline certificate failed validation: {}",
            report.violation.unwrap_or_default()
        )));
    }
    Ok(cert)
}

fn singleton_certificate(
    g: &Graph,
    kind: BlockKind,
    c: f64,
) -> Result<BlockCertificate, PipelineError> {
    let n = g.n();
    let blocks: Vec<VertexSet> = (0..n).map(|v| VertexSet::from_indices(n, [v])).collect();
    BlockCertificate::new(kind, blocks, c.min(1.0), n)
        .map_err(|e| PipelineError::Internal(format!("singleton certificate: {e}")))
}

fn separator_certificate(
    g: &Graph,
    cfg: &PipelineConfig,
    c: f64,
) -> Result<BlockCertificate, PipelineError> {
    let attempt = |sep: &crate::separator::SeparatorResult| -> Result<BlockCertificate, PipelineError> {
        let (x1, x2) = split_from_separator(g, sep)?;
        let cert = BlockCertificate::new(BlockKind::Empty, vec![x1, x2], c, g.n())
            .map_err(|e| PipelineError::Internal(format!("separator certificate: {e}")))?;
        let report = validate_certificate(g, &cert);
        if report.pass {
            Ok(cert)
        } else {
            Err(PipelineError::Internal(
                report.violation.unwrap_or_default(),
            ))
        }
    };
    match find_balanced_separator(g, cfg.separator_strategy) {
        Ok(sep) => match attempt(&sep) {
            Ok(cert) => Ok(cert),
            // A lopsided split can miss the size inequality; the trivial
            // separator always yields near-equal thirds.
            Err(_) => attempt(&fallback_separator(g)),
        },
        Err(SeparatorError::GreedyBudgetExhausted) => attempt(&fallback_separator(g)),
        Err(e) => Err(e.into()),
    }
}

fn dense_certificate(
    g: &Graph,
    witness: Option<&Poset>,
    cfg: &PipelineConfig,
) -> Result<BlockCertificate, PipelineError> {
    let Some(p) = witness else {
        let hint = match cfg.dense_witness {
            WitnessMode::Fail => "dense-instance handling is disabled (witness mode: fail)",
            WitnessMode::Provided => "no witness poset was provided",
            WitnessMode::DimensionTwo => {
                "no witness could be reconstructed from the input geometry"
            }
        };
        return Err(PipelineError::OracleRequired(format!(
            "{hint}; extracting a dense incomparability subgraph from an arbitrary dense \
             string graph is an external result outside this library's scope"
        )));
    };
    if cfg.dense_witness == WitnessMode::Fail {
        return Err(PipelineError::OracleRequired(
            "dense-instance handling is disabled (witness mode: fail)".into(),
        ));
    }
    if *g != p.incomparability_graph() {
        return Err(ExtractError::WitnessMismatch.into());
    }
    let report = extract_blocks_comparability_report(p, cfg.dense_alpha(), &cfg.algo)?;
    let c_emitted = cfg.exponent_at(report.epsilon_used);
    Ok(report
        .certificate
        .with_kind(BlockKind::Complete)
        .with_exponent(c_emitted))
}

/// Certified clique or independent set: runs the recursion with
/// [`string_quasi_eh`] as the block oracle, restricting the witness to each
/// sub-instance. The result induces a homogeneous set in `g` of size at
/// least `n^{c/2}` and is verified before returning.
pub fn string_eh(
    g: &Graph,
    witness: Option<&Poset>,
    cfg: &PipelineConfig,
) -> Result<RamseyResult, PipelineError> {
    cfg.validate()?;
    let c = cfg.exponent();
    let oracle =
        |sub: &Graph, w: Option<&Poset>| -> Result<BlockCertificate, PipelineError> {
            string_quasi_eh(sub, w, cfg)
        };
    Ok(homogeneous_from_certificates(g, witness, &oracle, c)?)
}

/// Builds the graph and (mode permitting) the witness for a curve family,
/// then runs the certificate pipeline.
pub fn string_quasi_eh_from_curves(
    family: &CurveFamily,
    cfg: &PipelineConfig,
) -> Result<(Graph, Option<Poset>, BlockCertificate), PipelineError> {
    let g = intersection_graph(family);
    let witness = match cfg.dense_witness {
        WitnessMode::DimensionTwo => witness_from_curves(family),
        _ => None,
    };
    let cert = string_quasi_eh(&g, witness.as_ref(), cfg)?;
    Ok((g, witness, cert))
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

/// One pipeline invocation, reproducibly described: input digest, seed,
/// config, certificate with its validator verdict, and the recursion output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub input_digest: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub certificate: serde_json::Value,
    pub validator: ValidationReport,
    pub ramsey: Option<RamseyResult>,
    pub wall_time_ms: f64,
}

/// FNV-1a digest of the canonical input text.
pub fn input_digest(text: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Runs certificate extraction plus the recursion on one instance and
/// assembles the record. The certificate is re-validated before persisting.
pub fn run_pipeline(
    input_text: &str,
    g: &Graph,
    witness: Option<&Poset>,
    cfg: &PipelineConfig,
) -> Result<RunRecord, PipelineError> {
    let start = std::time::Instant::now();
    let cert = string_quasi_eh(g, witness, cfg)?;
    let ramsey = string_eh(g, witness, cfg)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let validator = validate_certificate(g, &cert);
    if !validator.pass {
        return Err(PipelineError::Internal(
            "certificate failed re-validation before persisting".into(),
        ));
    }
    let certificate: serde_json::Value = serde_json::from_str(&cert.to_json())
        .map_err(|e| PipelineError::Internal(e.to_string()))?;
    Ok(RunRecord {
        input_digest: input_digest(input_text),
        seed: cfg.algo.seed,
        config: *cfg,
        certificate,
        validator,
        ramsey: Some(ramsey),
        wall_time_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::permutation_to_segments;
    use crate::maxclique::brute_force_ramsey;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(rng);
        pi
    }

    #[test]
    fn empty_graph_goes_sparse_with_full_cover() {
        let g = Graph::empty(100);
        let cfg = PipelineConfig::default();
        let cert = string_quasi_eh(&g, None, &cfg).unwrap();
        assert_eq!(cert.kind, BlockKind::Empty);
        assert_eq!(cert.t(), 100);
    }

    #[test]
    fn complete_graph_with_witness_gets_complete_blocks() {
        let p = Poset::from_relations(100, &[]).unwrap();
        let g = p.incomparability_graph();
        let cfg = PipelineConfig::default();
        let cert = string_quasi_eh(&g, Some(&p), &cfg).unwrap();
        assert_eq!(cert.kind, BlockKind::Complete);
        assert!(validate_certificate(&g, &cert).pass);
    }

    #[test]
    fn sparse_but_nonempty_graph_uses_separator_path() {
        // A path on 100 vertices: 99 edges ≤ 0.01·100².
        let edges: Vec<(usize, usize)> = (0..99).map(|i| (i, i + 1)).collect();
        let g = Graph::build(100, &edges).unwrap();
        let cfg = PipelineConfig::default();
        let cert = string_quasi_eh(&g, None, &cfg).unwrap();
        assert_eq!(cert.kind, BlockKind::Empty);
        assert_eq!(cert.t(), 2);
        assert!(validate_certificate(&g, &cert).pass);
    }

    #[test]
    fn dense_graph_without_witness_is_rejected() {
        let p = Poset::random_dimension_k(30, 2, 5);
        let g = p.incomparability_graph();
        assert!(g.edge_count() as f64 > 0.01 * 900.0);
        let cfg = PipelineConfig::default();
        assert!(matches!(
            string_quasi_eh(&g, None, &cfg),
            Err(PipelineError::OracleRequired(_))
        ));
    }

    #[test]
    fn certificates_from_random_permutations_validate() {
        let cfg = PipelineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..10 {
            let pi = random_permutation(500, &mut rng);
            let (family, _) = permutation_to_segments(&pi).unwrap();
            let (g, witness, cert) =
                string_quasi_eh_from_curves(&family, &cfg.with_seed(trial)).unwrap();
            assert!(witness.is_some());
            assert!(validate_certificate(&g, &cert).pass);
        }
    }

    #[test]
    fn identity_permutation_yields_full_independent_set() {
        let pi: Vec<usize> = (0..30).collect();
        let (family, witness) = permutation_to_segments(&pi).unwrap();
        let g = intersection_graph(&family);
        let cfg = PipelineConfig::default();
        let r = string_eh(&g, Some(&witness), &cfg).unwrap();
        assert_eq!(r.independent.len(), 30);
    }

    #[test]
    fn reversal_permutation_yields_full_clique() {
        let pi: Vec<usize> = (0..30).rev().collect();
        let (family, witness) = permutation_to_segments(&pi).unwrap();
        let g = intersection_graph(&family);
        let cfg = PipelineConfig::default();
        let r = string_eh(&g, Some(&witness), &cfg).unwrap();
        assert_eq!(r.clique.len(), 30);
    }

    #[test]
    fn recursion_output_is_sandwiched_on_small_instances() {
        let cfg = PipelineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..40 {
            let n = rng.gen_range(2..=20);
            let pi = random_permutation(n, &mut rng);
            let (family, witness) = permutation_to_segments(&pi).unwrap();
            let g = intersection_graph(&family);
            let r = string_eh(&g, Some(&witness), &cfg.with_seed(trial)).unwrap();
            let exact = brute_force_ramsey(&g, 24).unwrap();
            assert!(r.clique.len() <= exact.clique.len());
            assert!(r.independent.len() <= exact.independent.len());
            let c = cfg.exponent();
            assert!(r.best_len() as f64 >= (n as f64).powf(c / 2.0) - 1e-9);
        }
    }

    #[test]
    fn medium_permutation_meets_certified_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(400);
        let pi = random_permutation(400, &mut rng);
        let (family, witness) = permutation_to_segments(&pi).unwrap();
        let g = intersection_graph(&family);
        let cfg = PipelineConfig::default();
        let r = string_eh(&g, Some(&witness), &cfg).unwrap();
        let c = cfg.exponent();
        assert!(r.best_len() as f64 >= 400f64.powf(c / 2.0));
    }

    #[test]
    fn run_records_are_deterministic_modulo_time() {
        let pi = vec![3, 1, 4, 0, 2, 5, 7, 6];
        let (family, witness) = permutation_to_segments(&pi).unwrap();
        let g = intersection_graph(&family);
        let cfg = PipelineConfig::default().with_seed(9);
        let r1 = run_pipeline("x", &g, Some(&witness), &cfg);
        let r2 = run_pipeline("x", &g, Some(&witness), &cfg);
        let (mut a, mut b) = (r1.unwrap(), r2.unwrap());
        a.wall_time_ms = 0.0;
        b.wall_time_ms = 0.0;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn split_seed_is_stable_and_spread() {
        let s1 = split_seed(42, 0);
        let s2 = split_seed(42, 1);
        assert_ne!(s1, s2);
        assert_eq!(s1, split_seed(42, 0));
    }
}
