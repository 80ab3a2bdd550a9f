//! Binary stochastic chains with variable-length memory: exact laws,
//! flip-noise channels, and context-tree recovery.
//!
//! The pipeline this crate implements end to end:
//!
//! 1. [`tree`] — parse and validate a probabilistic context tree, and
//!    compute its intrinsic constants (α, β_k, β, β*, c = 1 + 4ββ*/α).
//! 2. [`chain`] — embed the tree as an order-h Markov chain, solve its
//!    stationary measure, answer cylinder and conditional queries
//!    exactly, and draw stationary sample paths.
//! 3. [`noise`] — pass samples through a Bernoulli flip channel and
//!    compute the observed chain's law exactly by a forward pass over
//!    hidden states; certify that observed conditionals stay within
//!    `c·ε` of the hidden ones and that the floor bounds hold.
//! 4. [`estimator`] — count windows, form smoothed conditionals, and
//!    recover the context tree by threshold pruning.
//! 5. [`bounds`] / [`experiment`] — evaluate the explicit recovery error
//!    bound and measure recovery frequency over seeded (ε, n) grids.
//!
//! Sequences everywhere put the most recent symbol on the right; see
//! [`seq::Seq`]. All randomness is seeded explicitly ([`rng`]).

pub mod bounds;
pub mod chain;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod noise;
pub mod rng;
pub mod seq;
pub mod tree;

pub use chain::{ChainLaw, MarkovEmbedding, SamplePath, StationaryMeasure};
pub use error::Error;
pub use estimator::{
    compare_truncated, count_naive, estimate_tree, CountTrie, EstimatedTree, TruncationReport,
};
pub use noise::{DeltaWindow, FloorReport, GapCertificate, NoiseChannel, PerturbedLaw};
pub use seq::{Seq, Symbol};
pub use tree::{ContextTree, TreeConstants};
