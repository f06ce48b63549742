//! Machine-checkable homogeneous block certificates.
//!
//! A certificate asserts that `t ≥ 2` disjoint vertex blocks of a host graph
//! are pairwise complete or pairwise anticomplete, and that every block is
//! large enough for the exponent it carries: `t ≥ (host_n / |X_i|)^c`.

use crate::bitset::VertexSet;
use crate::graph::{CrossingStatus, Graph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack absorbing floating-point roundoff in `(n/|X|)^c`
/// comparisons. The underlying inequalities hold over the reals.
const FLOAT_GUARD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("a certificate needs at least 2 blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("blocks {0} and {1} overlap")]
    OverlappingBlocks(usize, usize),
    #[error("exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("malformed certificate input: {0}")]
    Parse(String),
}

/// Whether blocks are pairwise complete or pairwise anticomplete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Complete,
    Empty,
}

impl BlockKind {
    pub fn crossing(self) -> CrossingStatus {
        match self {
            BlockKind::Complete => CrossingStatus::Complete,
            BlockKind::Empty => CrossingStatus::Empty,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockCertificate {
    pub kind: BlockKind,
    pub blocks: Vec<VertexSet>,
    /// Exponent `c` the size inequality is claimed for.
    pub exponent: f64,
    /// Reference vertex count the inequality is stated against.
    pub host_n: usize,
}

impl BlockCertificate {
    /// Structural checks only (block count, non-emptiness, disjointness,
    /// exponent sign); the graph-dependent checks live in
    /// [`validate_certificate`].
    pub fn new(
        kind: BlockKind,
        blocks: Vec<VertexSet>,
        exponent: f64,
        host_n: usize,
    ) -> Result<BlockCertificate, CertificateError> {
        if blocks.len() < 2 {
            return Err(CertificateError::TooFewBlocks(blocks.len()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(CertificateError::EmptyBlock(i));
            }
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    return Err(CertificateError::OverlappingBlocks(i, j));
                }
            }
        }
        if !(exponent > 0.0) {
            return Err(CertificateError::BadExponent(exponent));
        }
        Ok(BlockCertificate {
            kind,
            blocks,
            exponent,
            host_n,
        })
    }

    pub fn t(&self) -> usize {
        self.blocks.len()
    }

    pub fn min_block_len(&self) -> usize {
        self.blocks.iter().map(VertexSet::len).min().unwrap_or(0)
    }

    /// A copy with the opposite kind label, for reading the same blocks
    /// against the complement graph.
    pub fn with_kind(&self, kind: BlockKind) -> BlockCertificate {
        let mut c = self.clone();
        c.kind = kind;
        c
    }

    /// A copy claiming a smaller exponent (weakening is always sound).
    pub fn with_exponent(&self, exponent: f64) -> BlockCertificate {
        let mut c = self.clone();
        c.exponent = exponent;
        c
    }

    /// Does `t ≥ (host_n/|X_i|)^c` hold for every block?
    pub fn size_inequality_holds(&self) -> bool {
        self.first_size_violation().is_none()
    }

    fn first_size_violation(&self) -> Option<(usize, f64)> {
        let t = self.t() as f64;
        for (i, b) in self.blocks.iter().enumerate() {
            let required = (self.host_n as f64 / b.len() as f64).powf(self.exponent);
            if t < required * (1.0 - FLOAT_GUARD) {
                return Some((i, required));
            }
        }
        None
    }
}

/// Outcome of checking a certificate against a concrete graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    /// First violated condition, if any.
    pub violation: Option<String>,
    pub t: usize,
    pub min_block: usize,
    pub exponent: f64,
}

/// Checks block disjointness, the pairwise crossing status against `g`, and
/// the size inequality. Report-only: never errors.
pub fn validate_certificate(g: &Graph, cert: &BlockCertificate) -> ValidationReport {
    let report = |violation: Option<String>| ValidationReport {
        pass: violation.is_none(),
        violation,
        t: cert.t(),
        min_block: cert.min_block_len(),
        exponent: cert.exponent,
    };

    if cert.t() < 2 {
        return report(Some(format!("only {} blocks (need t ≥ 2)", cert.t())));
    }
    for (i, b) in cert.blocks.iter().enumerate() {
        if b.is_empty() {
            return report(Some(format!("block {i} is empty")));
        }
        if b.universe() != g.n() || b.iter().any(|v| v >= g.n()) {
            return report(Some(format!("block {i} does not index into the graph")));
        }
    }
    for i in 0..cert.t() {
        for j in i + 1..cert.t() {
            if !cert.blocks[i].is_disjoint(&cert.blocks[j]) {
                return report(Some(format!("blocks {i} and {j} overlap")));
            }
        }
    }
    let want = cert.kind.crossing();
    for i in 0..cert.t() {
        for j in i + 1..cert.t() {
            match g.crossing_status(&cert.blocks[i], &cert.blocks[j]) {
                Ok(status) if status == want => {}
                Ok(status) => {
                    return report(Some(format!(
                        "blocks {i},{j} are {status:?}, expected {want:?}"
                    )))
                }
                Err(e) => return report(Some(format!("blocks {i},{j}: {e}"))),
            }
        }
    }
    if let Some((i, required)) = cert.first_size_violation() {
        return report(Some(format!(
            "block {i}: t = {} < (n/|X_i|)^c = ({}/{})^{} = {:.6}",
            cert.t(),
            cert.host_n,
            cert.blocks[i].len(),
            cert.exponent,
            required
        )));
    }
    report(None)
}

// ---------------------------------------------------------------------------
// Serialization:
// {"kind":"complete"|"empty","t":int,"c":float,"host_n":int,"blocks":[[v,..],..]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    kind: BlockKind,
    t: usize,
    c: f64,
    host_n: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockCertificate {
    pub fn to_json(&self) -> String {
        let doc = CertificateJson {
            kind: self.kind,
            t: self.t(),
            c: self.exponent,
            host_n: self.host_n,
            blocks: self.blocks.iter().map(VertexSet::to_vec).collect(),
        };
        serde_json::to_string(&doc).expect("certificate serialization cannot fail")
    }

    /// Parses and structurally checks a certificate. The declared `t` must
    /// match the number of blocks. `universe` sizes the block sets (pass the
    /// host graph's vertex count).
    pub fn from_json(text: &str, universe: usize) -> Result<BlockCertificate, CertificateError> {
        let doc: CertificateJson =
            serde_json::from_str(text).map_err(|e| CertificateError::Parse(e.to_string()))?;
        if doc.t != doc.blocks.len() {
            return Err(CertificateError::Parse(format!(
                "declared t = {} but {} blocks present",
                doc.t,
                doc.blocks.len()
            )));
        }
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for vs in &doc.blocks {
            if let Some(&v) = vs.iter().find(|&&v| v >= universe) {
                return Err(CertificateError::Parse(format!(
                    "block vertex {v} out of range for universe {universe}"
                )));
            }
            blocks.push(VertexSet::from_indices(universe, vs.iter().copied()));
        }
        BlockCertificate::new(doc.kind, blocks, doc.c, doc.host_n)
    }
}
