//! The extended complex plane: finite points and ∞, with the chordal metric.

use astro_float::BigFloat;

use super::bigfloat::{BigComplex, RM};

/// A point of the Riemann sphere. Infinity compares equal only to Infinity.
#[derive(Clone, Debug)]
pub enum ProjectivePoint {
    Finite(BigComplex),
    Infinity,
}

impl ProjectivePoint {
    pub fn finite(z: BigComplex) -> Self {
        ProjectivePoint::Finite(z)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjectivePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&BigComplex> {
        match self {
            ProjectivePoint::Finite(z) => Some(z),
            ProjectivePoint::Infinity => None,
        }
    }
}

/// Chordal metric: d(w,z) = |z−w| / (√(1+|w|²)·√(1+|z|²)) for finite pairs,
/// d(w,∞) = 1/√(1+|w|²), d(∞,∞) = 0.
pub fn chordal_distance(w: &ProjectivePoint, z: &ProjectivePoint, precision_bits: usize) -> BigFloat {
    let p = precision_bits;
    let one = BigFloat::from_i64(1, p);
    match (w, z) {
        (ProjectivePoint::Infinity, ProjectivePoint::Infinity) => BigFloat::from_i64(0, p),
        (ProjectivePoint::Finite(a), ProjectivePoint::Infinity)
        | (ProjectivePoint::Infinity, ProjectivePoint::Finite(a)) => {
            let den = one.add(&a.norm_sqr(), p, RM).sqrt(p, RM);
            one.div(&den, p, RM)
        }
        (ProjectivePoint::Finite(a), ProjectivePoint::Finite(b)) => {
            let num = b.sub(a).abs();
            let da = one.add(&a.norm_sqr(), p, RM).sqrt(p, RM);
            let db = one.add(&b.norm_sqr(), p, RM).sqrt(p, RM);
            num.div(&da.mul(&db, p, RM), p, RM)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::bigfloat::rel_agree;

    #[test]
    fn zero_to_infinity_is_one() {
        let d = chordal_distance(
            &ProjectivePoint::finite(BigComplex::zero(96)),
            &ProjectivePoint::Infinity,
            96,
        );
        assert!(rel_agree(&d, &BigFloat::from_i64(1, 96), 90));
    }

    #[test]
    fn same_point_distance_zero() {
        let w = ProjectivePoint::finite(BigComplex::from_i64(3, 4, 96));
        let d = chordal_distance(&w, &w, 96);
        assert!(d.is_zero());
    }

    #[test]
    fn one_to_minus_one_is_one() {
        let a = ProjectivePoint::finite(BigComplex::from_i64(1, 0, 96));
        let b = ProjectivePoint::finite(BigComplex::from_i64(-1, 0, 96));
        let d = chordal_distance(&a, &b, 96);
        assert!(rel_agree(&d, &BigFloat::from_i64(1, 96), 90));
    }

    #[test]
    fn infinity_equal_only_to_infinity() {
        let d = chordal_distance(&ProjectivePoint::Infinity, &ProjectivePoint::Infinity, 64);
        assert!(d.is_zero());
    }
}
