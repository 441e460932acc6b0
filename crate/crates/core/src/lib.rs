#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod diagnostics;
pub mod error;
pub mod oracle;
pub mod picard;
pub mod qspace;
pub mod setmap;
