//! Brute-force checks on small finite instances.
mod generate;
mod sweep;
mod theorem;

pub use generate::{
    metric_closure, random_instance, random_instance_with, FiniteInstance, GenParams, Profile, MAX_POINTS, MIN_POINTS,
};
pub use sweep::{
    property_sweep, replay, run_case, sample_trace, sweep_cases, CaseOutcome, CaseSpec, Property, SweepReport,
    ViolationDump, ZERO_PROBS,
};
pub use theorem::{discretized_remark, intersection_images, verify_on, verify_unified_theorem, TheoremCheck};
