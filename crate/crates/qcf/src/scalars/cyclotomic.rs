//! Exact arithmetic in cyclotomic rings.
//!
//! Elements are stored as length-`m` rational coefficient vectors modulo
//! `x^m − 1` (cheap multiplication: exponents fold mod m). Exact equality
//! and zero tests reduce modulo the m-th cyclotomic polynomial `Φ_m` on
//! demand. Ring operations never round.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::bigfloat::{bf_from_ratio, BigComplex};

/// Σ cⱼ ζ_mʲ with ζ_m = exp(2πi/m); coefficients reduced modulo x^m − 1.
#[derive(Clone, Debug)]
pub struct CyclotomicElement {
    m: u64,
    coeffs: Vec<BigRational>,
}

fn ratz() -> BigRational {
    BigRational::zero()
}

// integer fast paths: the recurrence keeps coefficients in ℤ almost always,
// where num-rational's reduce-on-every-op gcd is pure overhead
fn rat_add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::new_raw(a.numer() + b.numer(), BigInt::one())
    } else {
        a + b
    }
}

fn rat_sub(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::new_raw(a.numer() - b.numer(), BigInt::one())
    } else {
        a - b
    }
}

fn rat_mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        BigRational::new_raw(a.numer() * b.numer(), BigInt::one())
    } else {
        a * b
    }
}

impl CyclotomicElement {
    pub fn zero(m: u64) -> Self {
        assert!(m >= 1);
        Self {
            m,
            coeffs: vec![ratz(); m as usize],
        }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_rational(m: u64, q: BigRational) -> Self {
        let mut e = Self::zero(m);
        e.coeffs[0] = q;
        e
    }

    pub fn from_int(m: u64, n: &BigInt) -> Self {
        Self::from_rational(m, BigRational::from_integer(n.clone()))
    }

    /// ζ_m^e (exponent taken mod m).
    pub fn root_power(m: u64, e: i64) -> Self {
        let mut el = Self::zero(m);
        let idx = e.rem_euclid(m as i64) as usize;
        el.coeffs[idx] = BigRational::one();
        el
    }

    pub fn from_coeffs(m: u64, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), m as usize);
        Self { m, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (a, b) = Self::align(self, rhs);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| rat_add(x, y))
            .collect();
        Self { m: a.m, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.m);
        }
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| rat_mul(c, s)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = Self::align(self, rhs);
        let m = a.m as usize;
        // convolution mod x^m − 1; iterate over the sparser operand
        let (outer, inner) = if a.nnz() <= b.nnz() { (&a, &b) } else { (&b, &a) };
        let mut out = vec![ratz(); m];
        for (i, ci) in outer.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in inner.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let k = (i + j) % m;
                out[k] = rat_add(&out[k], &rat_mul(ci, cj));
            }
        }
        Self { m: a.m, coeffs: out }
    }

    pub fn pow_u(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one(self.m);
        }
        // monomial fast path: (c ζ^j)^e = c^e ζ^(je mod m)
        let nz: Vec<usize> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect();
        if nz.len() == 1 {
            let j = nz[0] as u64;
            let mut c = BigRational::one();
            let base = &self.coeffs[nz[0]];
            let mut k = e;
            let mut b = base.clone();
            while k > 0 {
                if k & 1 == 1 {
                    c *= &b;
                }
                b = &b * &b;
                k >>= 1;
            }
            let mut out = Self::zero(self.m);
            out.coeffs[((j as u128 * e as u128) % self.m as u128) as usize] = c;
            return out;
        }
        let mut acc = Self::one(self.m);
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Complex conjugation: ζ^j ↦ ζ^(m−j).
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut out = vec![ratz(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[(m - j) % m] = c.clone();
        }
        Self {
            m: self.m,
            coeffs: out,
        }
    }

    /// Lift into the order-L ring (L must be a multiple of m).
    pub fn lift_to_order(&self, l: u64) -> Self {
        assert!(l % self.m == 0, "order {l} is not a multiple of {}", self.m);
        let k = (l / self.m) as usize;
        let mut out = vec![ratz(); l as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[j * k] = c.clone();
            }
        }
        Self { m: l, coeffs: out }
    }

    fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.m == b.m {
            (a.clone(), b.clone())
        } else {
            let l = num_integer::lcm(a.m, b.m);
            (a.lift_to_order(l), b.lift_to_order(l))
        }
    }

    /// Canonical coefficients after reduction mod Φ_m (length deg Φ_m).
    pub fn reduced(&self) -> Vec<BigRational> {
        let phi = cyclotomic_polynomial(self.m);
        poly_rem_by_monic(&self.coeffs, &phi)
    }

    /// Exact zero test via Φ_m reduction.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        self.reduced().iter().all(|c| c.is_zero())
    }

    pub fn eq_exact(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_zero()
    }

    /// Some(value) iff the element lies in ℚ.
    pub fn rational_value(&self) -> Option<BigRational> {
        let red = self.reduced();
        if red.iter().skip(1).all(|c| c.is_zero()) {
            Some(red.first().cloned().unwrap_or_else(ratz))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.rational_value().is_some()
    }

    /// Evaluate Σ cⱼ exp(2πij/m) at the requested precision (guard digits
    /// included; relative error stays below 4·2^(−p)·Σ|cⱼ|). The guard
    /// scales with the coefficient magnitudes so the absolute error also
    /// stays near 2^(−p) unless the value itself is that large.
    pub fn embed(&self, precision_bits: usize) -> BigComplex {
        Embedder::with_extra_bits(self.m, precision_bits, self.coeff_bits()).embed(self)
    }

    /// Largest numerator bit length across coefficients.
    pub fn coeff_bits(&self) -> usize {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Canonical representative: coefficients reduced mod Φ_m, padded back
    /// to length m. Shrinks the huge coefficients that products accumulate.
    pub fn canonicalize(&self) -> Self {
        let mut coeffs = self.reduced();
        coeffs.resize(self.m as usize, ratz());
        Self {
            m: self.m,
            coeffs,
        }
    }

    /// Multiply by ζ_m^e — a coefficient rotation.
    pub fn mul_root_power(&self, e: i64) -> Self {
        let m = self.m as usize;
        let shift = e.rem_euclid(self.m as i64) as usize;
        let mut out = vec![ratz(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[(j + shift) % m] = c.clone();
            }
        }
        Self {
            m: self.m,
            coeffs: out,
        }
    }

    /// Σ|cⱼ| — used for embedding error budgets.
    pub fn coeff_abs_sum(&self) -> BigRational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Batch embedding with the ζ_m power table computed once — the per-call
/// trigonometry dominates when many elements of the same order are embedded.
pub struct Embedder {
    m: u64,
    target: usize,
    guard: usize,
    zeta_pows: Vec<BigComplex>,
}

impl Embedder {
    pub fn new(m: u64, precision_bits: usize) -> Self {
        Self::with_extra_bits(m, precision_bits, 0)
    }

    /// `extra_bits` should cover the coefficient magnitudes of the elements
    /// to be embedded (their largest numerator bit length).
    pub fn with_extra_bits(m: u64, precision_bits: usize, extra_bits: usize) -> Self {
        let guard = precision_bits + 32 + extra_bits + (64 - m.leading_zeros() as usize);
        let zeta = BigComplex::exp_two_pi_i(&BigRational::new(BigInt::one(), BigInt::from(m)), guard);
        let mut zeta_pows = Vec::with_capacity(m as usize);
        zeta_pows.push(BigComplex::one(guard));
        for j in 1..m as usize {
            let next = zeta_pows[j - 1].mul(&zeta);
            zeta_pows.push(next);
        }
        Self {
            m,
            target: precision_bits,
            guard,
            zeta_pows,
        }
    }

    pub fn embed(&self, e: &CyclotomicElement) -> BigComplex {
        assert_eq!(e.order(), self.m);
        let mut acc = BigComplex::zero(self.guard);
        for (j, c) in e.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&self.zeta_pows[j].scale(&bf_from_ratio(c, self.guard)));
        }
        acc.with_precision(self.target)
    }
}

/// Remainder of `poly` (rational coefficients, any length) by the monic
/// integer polynomial `divisor` (ascending coefficients).
fn poly_rem_by_monic(poly: &[BigRational], divisor: &[BigInt]) -> Vec<BigRational> {
    let dd = divisor.len() - 1;
    let mut rem: Vec<BigRational> = poly.to_vec();
    while rem.len() > dd {
        let lead = rem.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let off = rem.len() - dd;
        for (i, c) in divisor.iter().take(dd).enumerate() {
            if !c.is_zero() {
                let t = rat_mul(&lead, &BigRational::new_raw(c.clone(), BigInt::one()));
                rem[off + i] = rat_sub(&rem[off + i], &t);
            }
        }
    }
    rem.resize(dd.max(1), ratz());
    rem
}

/// Exact division of integer polynomials (remainder must vanish).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().unwrap().clone();
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = &rem[i] / &lead;
        debug_assert_eq!(&c * &lead, rem[i]);
        quot[i - dd] = c.clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            let t = &c * dj;
            rem[i - dd + j] -= t;
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

static PHI_CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();

/// The m-th cyclotomic polynomial Φ_m, ascending integer coefficients,
/// computed as (x^m − 1) / Π_{d|m, d<m} Φ_d and cached.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            poly = poly_div_exact(&poly, &phi_d);
        }
    }
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// √n as an exact cyclotomic element (positive real branch for n > 0,
/// +i·√|n| for n < 0), built from quadratic Gauss sums:
/// √2 = ζ₈ + ζ₈⁻¹, and for odd prime p the sum Σⱼ ζ_p^(j²) equals √p when
/// p ≡ 1 (mod 4) and i√p when p ≡ 3 (mod 4).
pub fn sqrt_of_integer_as_cyclotomic(n: &BigInt) -> CyclotomicElement {
    if n.is_zero() {
        return CyclotomicElement::zero(1);
    }
    let neg = n.is_negative();
    let mut abs = n.abs();
    // split off the square part
    let mut square_root = BigInt::one();
    let mut squarefree: Vec<u64> = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= abs {
        let mut cnt = 0u32;
        while (&abs % &d).is_zero() {
            abs /= &d;
            cnt += 1;
        }
        for _ in 0..cnt / 2 {
            square_root *= &d;
        }
        if cnt % 2 == 1 {
            squarefree.push(u64::try_from(&d).expect("small prime factor"));
        }
        d += 1;
    }
    if abs > BigInt::one() {
        squarefree.push(u64::try_from(&abs).expect("small prime factor"));
    }

    let mut acc = CyclotomicElement::from_int(1, &square_root);
    for p in squarefree {
        let piece = if p == 2 {
            let mut e = CyclotomicElement::zero(8);
            // ζ₈ + ζ₈⁷
            e = e
                .add(&CyclotomicElement::root_power(8, 1))
                .add(&CyclotomicElement::root_power(8, 7));
            e
        } else if p % 4 == 1 {
            gauss_sum(p)
        } else {
            // √p = ζ₄³ · (i√p)
            let g = gauss_sum(p).lift_to_order(4 * p);
            g.mul(&CyclotomicElement::root_power(4 * p, 3 * (p as i64)))
        };
        let l = num_integer::lcm(acc.order(), piece.order());
        acc = acc.lift_to_order(l).mul(&piece.lift_to_order(l));
    }
    if neg {
        let l = num_integer::lcm(acc.order(), 4);
        acc = acc.lift_to_order(l).mul(&CyclotomicElement::root_power(l, (l / 4) as i64));
    }
    acc
}

fn gauss_sum(p: u64) -> CyclotomicElement {
    let mut e = CyclotomicElement::zero(p);
    for j in 0..p {
        let idx = ((j as u128 * j as u128) % p as u128) as usize;
        e.coeffs[idx] += BigRational::one();
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::bigfloat::{pow2, rel_agree, RM};
    use astro_float::BigFloat;

    #[test]
    fn one_plus_zeta2_is_zero() {
        let e = CyclotomicElement::one(2).add(&CyclotomicElement::root_power(2, 1));
        assert!(e.is_zero());
    }

    #[test]
    fn full_geometric_sum_vanishes() {
        let mut e = CyclotomicElement::zero(3);
        for j in 0..3 {
            e = e.add(&CyclotomicElement::root_power(3, j));
        }
        assert!(e.is_zero());
    }

    #[test]
    fn zeta5_minus_zeta5_sq_nonzero() {
        // oracle: reduce mod Φ₅ with an independent division routine
        let e = CyclotomicElement::root_power(5, 1).sub(&CyclotomicElement::root_power(5, 2));
        assert!(!e.is_zero());
        let phi5 = cyclotomic_polynomial(5);
        assert_eq!(
            phi5.as_slice(),
            &[
                BigInt::one(),
                BigInt::one(),
                BigInt::one(),
                BigInt::one(),
                BigInt::one()
            ]
        );
        // by hand: ζ − ζ² has reduced coefficients (0, 1, −1, 0)
        let red = e.reduced();
        assert_eq!(red[1], BigRational::one());
        assert_eq!(red[2], -BigRational::one());
    }

    #[test]
    fn embed_zeta4_is_i() {
        let e = CyclotomicElement::root_power(4, 1);
        let z = e.embed(64);
        assert!(rel_agree(z.im(), &BigFloat::from_i64(1, 64), 60));
        let tiny = pow2(-60, 64);
        assert!(matches!(z.re().abs().cmp(&tiny), Some(o) if o < 0));
    }

    #[test]
    fn embed_golden_cosine() {
        // ζ₅ + ζ₅⁴ = 2cos(2π/5) = (√5−1)/2, oracle via big-float trig at
        // doubled precision
        let e = CyclotomicElement::root_power(5, 1).add(&CyclotomicElement::root_power(5, 4));
        let z = e.embed(128);
        let p = 256;
        let five = BigFloat::from_i64(5, p);
        let expect = five
            .sqrt(p, RM)
            .sub(&BigFloat::from_i64(1, p), p, RM)
            .div(&BigFloat::from_i64(2, p), p, RM);
        assert!(rel_agree(z.re(), &expect, 120));
    }

    #[test]
    fn sqrt_gauss_sums_square_back() {
        for n in [2i64, 5, 8, 9, 12, 3, 7, -1, -4, -5, 45] {
            let w = sqrt_of_integer_as_cyclotomic(&BigInt::from(n));
            let sq = w.mul(&w);
            assert!(
                sq.sub(&CyclotomicElement::from_int(w.order(), &BigInt::from(n)))
                    .is_zero(),
                "sqrt({n})^2 != {n}"
            );
            // positive branch: embedding has positive real part (n>0) or
            // positive imaginary part (n<0)
            let z = w.embed(96);
            if n > 0 {
                assert!(!z.re().is_negative() && !z.re().is_zero());
            } else {
                assert!(!z.im().is_negative() && !z.im().is_zero());
            }
        }
    }

    #[test]
    fn lift_preserves_value() {
        let e = CyclotomicElement::root_power(6, 1).add(&CyclotomicElement::one(6));
        let l = e.lift_to_order(30);
        let a = e.embed(128);
        let b = l.embed(128);
        assert!(rel_agree(a.re(), b.re(), 110));
        assert!(rel_agree(a.im(), b.im(), 110));
    }
}
