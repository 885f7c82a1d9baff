//! The continued-fraction family: polynomial data for the partial
//! numerators/denominators, the structural constants, and the fundamental
//! recurrence with Moebius evaluation on top of it.

mod bipoly;
mod recurrence;
mod spec;

pub use bipoly::BiPolynomial;
pub use recurrence::{
    moebius_apply, moebius_invert, run_recurrence, run_recurrence_certified, ApproximantState,
    RecurrenceEngine,
};
pub use spec::{builtin_families, family_by_name, partial_terms, FamilyConfig, FamilySpec};
