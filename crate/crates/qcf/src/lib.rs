//! Computational laboratory for a family of q-continued fractions on the
//! unit circle: exact evaluation and classification at roots of unity,
//! high-precision approximant computation, construction of points where the
//! continued fraction diverges in the general sense, and empirical
//! verification of the quantitative bounds that drive the construction.
//!
//! Module map:
//! - [`scalars`]: exact cyclotomic arithmetic and precision-tracked complex
//!   big-floats, plus the projective layer with the chordal metric.
//! - [`family`]: the continued-fraction family data (polynomial coefficients,
//!   structural constants) and the fundamental recurrence engine.
//! - [`symbolic`]: `P_n(q)`, `Q_n(q)` as integer polynomials and the
//!   Lipschitz constants controlling their variation on the unit circle.
//! - [`periodic`]: period-block analysis at roots of unity — eigenvalue
//!   classification, limit values, Schur/Zhang cross-checks, and the
//!   constructive constants of the growth lemmas.
//! - [`pointgen`]: regular continued fractions and congruence-steered
//!   construction of divergence points.
//! - [`harness`]: the experiments — two-limit reports, bound audits, and the
//!   general-divergence witness package.

pub mod error;
pub mod family;
pub mod harness;
pub mod periodic;
pub mod pointgen;
pub mod scalars;
pub mod symbolic;

pub use error::QcfError;
