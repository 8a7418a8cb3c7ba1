//! Polar codes decoded as path searches on the code tree.
//!
//! The crate covers the whole chain needed to study successive cancellation
//! (SC) decoding and its tree-search refinements:
//!
//! * [`code`]: code definition, bit-reversal, encoding and the SC union bound.
//! * [`construction`]: per-channel reliability estimates and information set
//!   selection (Bhattacharyya recursion, Gaussian approximation, genie-aided
//!   Monte Carlo).
//! * [`channel`]: BEC and binary-input AWGN simulation and per-symbol log-APPs.
//! * [`metrics`]: the log-APP path metric engine with copy-on-write path state
//!   and the metric-operation counter.
//! * [`decoders`]: SC, list (SCL), stack (SCS) and hybrid (SCH) decoders with
//!   threshold pruning, plus a brute-force ML oracle.
//! * [`sim`]: seeded Monte-Carlo BLER/complexity sweeps and results export.
//!
//! With the default `parallel` feature, Monte-Carlo loops run on rayon; without
//! it every loop runs sequentially and produces identical results.

pub mod channel;
pub mod code;
pub mod construction;
pub mod decoders;
mod error;
pub mod exec;
pub mod metrics;
pub mod rng;
pub mod sim;

pub use channel::{ChannelModel, ChannelSpec, Observation};
pub use code::CodeConfig;
pub use construction::{Method, ReliabilityProfile};
pub use decoders::{Algorithm, DecodeOutcome, DecoderConfig, DecoderSpec, Pruning};
pub use error::{Error, Result};
pub use exec::Execution;
pub use metrics::{DecodingPath, MetricEngine, MetricMode};
pub use sim::{ExperimentSpec, SimRecord, StoppingRule};
