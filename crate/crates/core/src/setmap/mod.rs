//! Set-valued maps and the bridges from preorders, utilities and
//! generalized distances to quasi-metric data.

mod bridge;
mod image;
mod maps;
mod order;

pub use bridge::{tau_to_quasimetric, utility_pseudometric, TauFunction, TauQuasiMetric, UtilityPseudoMetric};
pub use image::{Image, Inclusion, SupValue, DEFAULT_GRID};
pub use maps::{DescentMap, ExtensionalMap, IdentityMap, IntervalMap, PredicateMap, SetValuedMap};
pub use order::{preorder_for_space, ExtReal, FinitePreorder, Preorder, RealOrder, RelationPreorder, Utility};
