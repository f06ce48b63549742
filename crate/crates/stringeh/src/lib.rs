//! Homogeneous block certificates for incomparability and string graphs.
//!
//! The library extracts families of `t ≥ 2` disjoint vertex blocks that are
//! pairwise complete or pairwise anticomplete, with every block large enough
//! that `t ≥ (n/|X_i|)^c` — a machine-checkable certificate — and converts
//! such certificates into large cliques or independent sets through a
//! cograph recursion.
//!
//! Module map:
//! - [`bitset`], [`graph`]: bit-parallel vertex sets and immutable graphs.
//! - [`poset`]: strict partial orders, linear extensions, comparability and
//!   incomparability graphs, random dimension-k generators.
//! - [`extract`]: degree peeling, the sparse-or-split dichotomy, the bucketed
//!   main algorithm, and the certificate-producing wrappers.
//! - [`certificate`]: the block-certificate type and its validator.
//! - [`cograph`]: cotrees, the certificate recursion, the clique/independent
//!   tree DP, and [`maxclique`] as the exact cross-check oracle.
//! - [`geometry`]: integer curves, exact intersection predicates, and
//!   permutation-segment realizations of incomparability graphs.
//! - [`separator`]: balanced separators and anticomplete splits.
//! - [`pipeline`]: the sparse/dense dichotomy over string graphs and the
//!   end-to-end clique-or-independent-set driver.
//!
//! Runnable walkthroughs for each capability live in `examples/`; the thin
//! `stringeh` binary exposes generation, extraction, verification, and
//! benchmarking as subcommands.

#![forbid(unsafe_code)]

pub mod bitset;
pub mod certificate;
pub mod cograph;
pub mod extract;
pub mod geometry;
pub mod graph;
pub mod maxclique;
pub mod pipeline;
pub mod poset;
pub mod separator;

pub use bitset::VertexSet;
pub use certificate::{validate_certificate, BlockCertificate, BlockKind, ValidationReport};
pub use cograph::{
    cotree_max_clique, cotree_max_independent, homogeneous_from_certificates, qeh_recursion,
    Cotree,
};
pub use extract::{
    extract_blocks_comparability, extract_blocks_incomparability, main_algorithm,
    peel_to_bounded_max_degree, sparse_or_split, AlgoConfig, SparseOrSplit,
};
pub use geometry::{
    intersection_graph, permutation_to_segments, segments_intersect, CurveFamily,
};
pub use graph::{CrossingStatus, Graph};
pub use maxclique::{brute_force_ramsey, RamseyResult};
pub use pipeline::{string_eh, string_quasi_eh, PipelineConfig, RunRecord, WitnessMode};
pub use poset::{LinearExtension, Poset};
pub use separator::{
    find_balanced_separator, split_from_separator, SeparatorResult, SeparatorStrategy,
};
