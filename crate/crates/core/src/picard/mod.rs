//! Generalized Picard iteration and nonvariant-point search.
mod engine;
mod rule;

pub use engine::{
    classify_point, find_invariant_point, find_invariant_point_from, iterate, points_from_jsonl, Classification,
    Outcome, PicardTrace, SearchConfig, SearchResult, StepRecord, Termination,
};
pub use rule::{select_next, Selection, SelectionRule, SlackSchedule};
