//! Level-1 accounting and the multi-level picture built from it:
//! exRec classification with boundary truncation, sparsity estimates, the
//! threshold recursion and memory-lifetime experiments.

mod exrec;
mod flow;
mod lifetime;
mod sparsity;
mod sweep;

pub use exrec::{
    block_health, classify_exrec, classify_slice, count_c_bound, exrecs_in, influence_neighborhood, partition_exrecs,
    verify_good_correct, ExRecId, ExRecReport, Partition, SweepOrder, Tiling, EXACT_CLUSTER_CAP,
};
pub use flow::{levels_for_log_ratio, max_levels_per_doubling, renorm_flow, required_levels, threshold, RenormFlow};
pub use lifetime::{k_max, lifetime_experiment, lifetime_trial, LifetimeConfig, LifetimeRow, LifetimeSummary};
pub use sparsity::{estimate_level_noise, SparsityConfig, SparsityPoint, SparsityReport};
pub use sweep::{placement_sweep, placement_trial, PlacementOutcome, SweepSummary};
