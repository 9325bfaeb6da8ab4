//! Top-k feature importance ranking with minipatch ensembles.
//!
//! Two estimators are provided. The rank-averaging ensemble ([`run_ramp`])
//! draws many minipatches (joint subsamples of observations and features),
//! ranks features within each patch with a pluggable procedure
//! ([`RankerSpec`]), and averages each feature's within-patch ranks over the
//! patches containing it. The recursive-halving estimator ([`run_rampart`])
//! repeats that pass on a shrinking candidate pool, keeping the better half
//! each round, so later rounds spend their budget separating the features
//! that actually matter for the top k.
//!
//! The crate also ships the evaluation toolkit used to study these
//! estimators end to end: synthetic benchmark generation with known ground
//! truth ([`synth`]), rank-quality metrics ([`metrics`]), and fully
//! deterministic seeded sampling ([`sampling`]) so every run is reproducible
//! across thread counts.

pub mod data;
pub mod error;
pub mod metrics;
pub mod ramp;
pub mod rampart;
pub mod rankers;
pub mod sampling;
pub mod synth;

pub use data::{true_ranks, Dataset, Task, TrueImportance};
pub use error::{Error, Result};
pub use metrics::{aggregate, exact_topk, rbo, top_k_by_rank};
pub use ramp::{
    finalize_ranks, rank_full_data, run_ramp, AveragedRanks, RampParams, RampResult, RampWarning,
};
pub use rampart::{
    compute_schedule, run_rampart, survivors, Allocation, HalvingSchedule, RampartIteration,
    RampartResult,
};
pub use rankers::{
    noisy_oracle_rank, oracle_rank, rank_minipatch, score_to_rank, PatchRanks, RankVector,
    RankerSpec, TreeParams,
};
pub use sampling::{derive_rng, sample_minipatch, MinipatchIndex, RngHandle};
pub use synth::{
    apply_link, gen_appendix_b, gen_features, gen_response, generate, make_beta, Covariance,
    GenConfig, Scenario, SynthDataset,
};
