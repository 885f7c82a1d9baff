//! The scalar abstraction shared by the recurrence engine: exact cyclotomic
//! elements, complex big-floats, and (in the symbolic module) integer
//! polynomials in q.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::bigfloat::BigComplex;
use super::cyclotomic::CyclotomicElement;

/// Raised when a backend cannot decide zero-ness at its working precision.
#[derive(Debug, Clone, Copy)]
pub struct ZeroUndecided;

pub trait Scalar: Clone + Send + Sync {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// An integer constant in the same ring/context as `self`.
    fn from_int(&self, n: &BigInt) -> Self;
    fn pow_u(&self, e: u64) -> Self;
    /// Exact backends answer definitively; the float backend refuses to call
    /// a small value zero (a value below 2^(−p/2) is undecided, triggering
    /// escalation upstream).
    fn provably_zero(&self) -> Result<bool, ZeroUndecided>;
}

impl Scalar for CyclotomicElement {
    fn add(&self, rhs: &Self) -> Self {
        CyclotomicElement::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        CyclotomicElement::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        CyclotomicElement::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        CyclotomicElement::neg(self)
    }
    fn from_int(&self, n: &BigInt) -> Self {
        CyclotomicElement::from_int(self.order(), n)
    }
    fn pow_u(&self, e: u64) -> Self {
        CyclotomicElement::pow_u(self, e)
    }
    fn provably_zero(&self) -> Result<bool, ZeroUndecided> {
        Ok(self.is_zero())
    }
}

impl Scalar for BigComplex {
    fn add(&self, rhs: &Self) -> Self {
        BigComplex::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        BigComplex::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        BigComplex::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        BigComplex::neg(self)
    }
    fn from_int(&self, n: &BigInt) -> Self {
        BigComplex::from_bigint(n, self.precision_bits())
    }
    fn pow_u(&self, e: u64) -> Self {
        BigComplex::pow_u(self, e)
    }
    fn provably_zero(&self) -> Result<bool, ZeroUndecided> {
        if BigComplex::is_zero(self) {
            return Ok(true);
        }
        let p = self.precision_bits();
        let window = super::bigfloat::pow2(-((p / 2) as i64), p);
        let below = |x: &astro_float::BigFloat| matches!(x.abs().cmp(&window), Some(o) if o < 0);
        if below(self.re()) && below(self.im()) {
            Err(ZeroUndecided)
        } else {
            Ok(false)
        }
    }
}

impl Scalar for BigRational {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn pow_u(&self, e: u64) -> Self {
        let mut acc = BigRational::from_integer(BigInt::from(1));
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc *= &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }
    fn provably_zero(&self) -> Result<bool, ZeroUndecided> {
        Ok(num_traits::Zero::is_zero(self))
    }
}
