//! Numeric foundations: exact cyclotomic integers for root-of-unity work and
//! precision-contracted complex big-floats for everything else.
//!
//! All types here are immutable values and all operations are pure; the
//! module is safe for concurrent use with no shared mutable state (the
//! cyclotomic-polynomial cache is behind a lock, the big-float constants
//! cache is thread-local).

mod bigfloat;
mod cyclotomic;
mod projective;
mod traits;

pub use bigfloat::{
    bf_from_bigint, bf_from_ratio, bf_pi, bf_to_f64, certified_floor, certified_sign,
    certify_complex, pow2 as bigfloat_pow2, rel_agree, rel_agree_complex, sin_cos_two_pi, BigComplex, RM,
};
pub use cyclotomic::{cyclotomic_polynomial, sqrt_of_integer_as_cyclotomic, CyclotomicElement, Embedder};
pub use projective::{chordal_distance, ProjectivePoint};
pub use traits::{Scalar, ZeroUndecided};
