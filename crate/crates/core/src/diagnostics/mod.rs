//! Convergence verdicts and condition-system checkers.
mod finite_graph;
mod report;
mod sequence;
mod systems;

pub use finite_graph::{PicardGraph, MAX_EXACT_POINTS};
pub use report::{ConditionEntry, ConditionReport, Mode, Status, System, Verdict, Witness};
pub use sequence::{converges_to, is_cauchy, DEFAULT_WINDOW};
pub use systems::{
    analyze_trace, check_a_conditions, check_b_conditions, check_c_conditions, check_e_conditions,
    check_f_conditions, check_tau_axioms, common_points, forward_limits, validate_picard, CheckOptions, TraceData,
};
