//! Abstract polymer models, the polymer clique dynamics, and randomized
//! approximation of polymer partition functions.
//!
//! A polymer model is a finite set of weighted polymers with a symmetric
//! incompatibility relation. Its partition function sums the weight products
//! of all families of pairwise compatible polymers. Given a cover of the
//! polymers by cliques (sets of mutually incompatible polymers), the clique
//! dynamics resamples one clique per step and mixes quickly whenever the
//! clique dynamics condition holds. Chained over growing unions of cliques,
//! it gives an estimator of the partition function.
//!
//! ```
//! use polymer_core::{CliqueCover, PolymerModel, partition_function_exact};
//!
//! let half = 0.5f64.ln();
//! let model = PolymerModel::from_log_weights(&[half, half], &[(0, 1)]).unwrap();
//! let log_z = partition_function_exact(&model, None).unwrap();
//! assert!((log_z.exp() - 2.0).abs() < 1e-12);
//! # let _ = CliqueCover::trivial(2);
//! ```
//!
//! Weights and partition functions are carried as natural logarithms.
//! The [`hardcore`] module builds the polymer models for the hard-core model
//! on bipartite expander graphs.

pub mod conditions;
pub mod cover;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod family;
pub mod hardcore;
pub mod io;
pub mod logspace;
pub mod model;
mod par;
pub mod random;
pub mod rng;
pub mod truncation;

pub use conditions::{
    check_clique_dynamics, check_clique_truncation, check_fernandez_procacci,
    check_strong_condition, mixing_time_bound, CliqueTruncationReport, ConditionReport, GrowthFn,
    MixingBound, MixingBoundInputs,
};
pub use cover::{
    clique_distribution, validate_clique_cover, CliqueCover, CliqueDistribution, CoverReport,
};
pub use dynamics::{
    chain_step, empirical_tv, run_chain, transition_matrix, ChainState, CliqueDynamics,
    CliqueOutcome, TransitionMatrix,
};
pub use error::{Error, Result};
pub use estimator::{
    approximate_partition_function, median_amplify, sample_gibbs, sample_schedule,
    AmplifiedEstimate, EstimateResult, EstimatorConfig, PreparedEstimator, RatioEstimate,
    SampleSchedule, SamplerBackend,
};
pub use family::{
    enumerate_families, gibbs_probability, partition_function_exact, DEFAULT_ENUMERATION_CAP,
};
pub use io::{model_from_json, model_to_json, ModelDocument};
pub use model::{Polymer, PolymerFamily, PolymerModel};
pub use truncation::{
    truncate, truncation_threshold, verify_truncation_quality, QualityMode, Truncation,
    TruncationPlan, TruncationQuality,
};
