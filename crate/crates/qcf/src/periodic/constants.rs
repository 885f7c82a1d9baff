//! Constructive computation of the growth-lemma constants.
//!
//! In the tabulated progressions all block data (T, D, K₅, T', K₄, |a_km|)
//! are fixed integers depending only on s, so every constant lives in the
//! real quadratic field ℚ(√K₅) and every minimality decision is exact.
//! The D-constants cover the equal-eigenvalue case, the C-constants the
//! distinct-modulus case; each N_i is the minimal index satisfying its
//! defining inequality, bumped where needed to keep the declared orderings
//! N₁<N₃<N₄<N₇<N₈ and N₂<N₅<N₆<N₉<N₁₀.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{QcfError, Result};
use crate::scalars::{bf_from_ratio, RM};

use super::block::{BlockAnalysis, Classification};

/// a + b√n with a, b ∈ ℚ and a fixed rational radicand n ≥ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRat {
    pub a: BigRational,
    pub b: BigRational,
    pub n: BigRational,
}

impl QuadRat {
    pub fn rational(a: BigRational, n: &BigRational) -> Self {
        Self {
            a,
            b: BigRational::zero(),
            n: n.clone(),
        }
    }

    pub fn from_i64(v: i64, n: &BigRational) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)), n)
    }

    pub fn sqrt_radicand(n: &BigRational) -> Self {
        Self {
            a: BigRational::zero(),
            b: BigRational::one(),
            n: n.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            n: self.n.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            n: self.n.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a * &rhs.a + &self.b * &rhs.b * &self.n,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            n: self.n.clone(),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        // (a+b√n)/(c+d√n) = (a+b√n)(c−d√n)/(c²−d²n)
        let den = &rhs.a * &rhs.a - &rhs.b * &rhs.b * &rhs.n;
        assert!(!den.is_zero(), "division by zero in QuadRat");
        let num = self.mul(&Self {
            a: rhs.a.clone(),
            b: -rhs.b.clone(),
            n: rhs.n.clone(),
        });
        Self {
            a: num.a / &den,
            b: num.b / &den,
            n: self.n.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a.clone(),
            b: -self.b.clone(),
            n: self.n.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of a + b√n.
    pub fn sign(&self) -> i8 {
        if self.b.is_zero() {
            return sign_of(&self.a);
        }
        if self.a.is_zero() {
            return sign_of(&self.b);
        }
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a² with b²n
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.n;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn lt(&self, rhs: &Self) -> bool {
        self.sub(rhs).sign() < 0
    }

    pub fn le(&self, rhs: &Self) -> bool {
        self.sub(rhs).sign() <= 0
    }

    pub fn max(&self, rhs: &Self) -> Self {
        if self.lt(rhs) {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, rhs: &Self) -> Self {
        if rhs.lt(self) {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::rational(BigRational::one(), &self.n);
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

    pub fn to_bigfloat(&self, p: usize) -> BigFloat {
        let g = p + 16;
        let root = bf_from_ratio(&self.n, g).sqrt(g, RM);
        bf_from_ratio(&self.a, g).add(&bf_from_ratio(&self.b, g).mul(&root, g, RM), p, RM)
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalars::bf_to_f64(&self.to_bigfloat(64))
    }
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_negative() {
        -1
    } else {
        1
    }
}

/// Exact rational square root (both parts perfect squares).
fn rational_sqrt_exact(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &(&ns * &ns) == q.numer() && &(&ds * &ds) == q.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

/// Equal-eigenvalue constants (Lemmas on |Q_{jkm−1}| = j·D₂·D₁^j and the
/// 1/j decay envelopes). All values rational in the tabulated progressions.
#[derive(Clone, Debug)]
pub struct DConstants {
    pub d1: QuadRat,
    pub d2: QuadRat,
    pub d3: QuadRat,
    pub d4: QuadRat,
    pub d5: QuadRat,
    pub d6: QuadRat,
    pub d7: QuadRat,
    pub d8: QuadRat,
    pub d9: QuadRat,
    pub d10: QuadRat,
    pub d11: QuadRat,
    pub d12: QuadRat,
    pub d13: QuadRat,
    pub d14: QuadRat,
    pub d15: QuadRat,
    pub d2_prime: QuadRat,
    pub n1: u64,
    pub n3: u64,
    pub n4: u64,
    pub n7: u64,
    pub n8: u64,
}

/// Distinct-modulus constants (geometric C₈^j envelopes).
#[derive(Clone, Debug)]
pub struct CConstants {
    pub c1: QuadRat,
    pub c2: QuadRat,
    pub c3: QuadRat,
    pub c4: QuadRat,
    pub c5: QuadRat,
    pub c6: QuadRat,
    pub c7: QuadRat,
    pub c8: QuadRat,
    pub c9: QuadRat,
    pub c10: QuadRat,
    pub c11: QuadRat,
    pub c12: QuadRat,
    pub c13: QuadRat,
    pub c14: QuadRat,
    pub c15: QuadRat,
    pub c16: QuadRat,
    pub c17: QuadRat,
    pub c10_prime: QuadRat,
    pub c2_prime: QuadRat,
    pub n2: u64,
    pub n5: u64,
    pub n6: u64,
    pub n9: u64,
    pub n10: u64,
}

#[derive(Clone, Debug)]
pub struct ConstantsReport {
    pub family: String,
    pub m: u64,
    pub r: u64,
    pub classification: Classification,
    /// |G(q)| — constant across the progression
    pub g_abs: QuadRat,
    pub d_constants: Option<DConstants>,
    pub c_constants: Option<CConstants>,
    /// N' = N₈ (equal case) or N₁₀ (distinct case)
    pub n_prime: u64,
}

const N_SEARCH_CAP: u64 = 1_000_000;

fn minimal_n(mut pred: impl FnMut(u64) -> bool, floor: u64) -> Result<u64> {
    let mut n = floor.max(1);
    while n < N_SEARCH_CAP {
        if pred(n) {
            return Ok(n);
        }
        n += 1;
    }
    Err(QcfError::BadConfig(
        "minimality search for a lemma constant exceeded its cap".into(),
    ))
}

/// Extract the rational block data needed for the constants; errors outside
/// the tabulated progressions.
struct RationalBlock {
    t: BigRational,
    t_prime: BigRational,
    k5: BigRational,
    k4: BigRational,
    a_abs: BigRational,
}

fn rational_block(analysis: &BlockAnalysis) -> Result<RationalBlock> {
    let b = &analysis.block;
    let gone = |what: &str| {
        QcfError::BadConfig(format!(
            "growth constants need progression data: {what} is not rational at m={}, r={}",
            b.root.m, b.root.r
        ))
    };
    let t = b.trace.rational_value().ok_or_else(|| gone("T"))?;
    let t_prime = b.t_prime.rational_value().ok_or_else(|| gone("T'"))?;
    let k5 = b.k5.rational_value().ok_or_else(|| gone("K5"))?;
    let k4sq = b
        .q_km1
        .mul(&b.q_km1.conj())
        .rational_value()
        .ok_or_else(|| gone("|Q_{km-1}|^2"))?;
    let k4 = rational_sqrt_exact(&k4sq).ok_or_else(|| gone("|Q_{km-1}|"))?;
    let aabs_sq = b
        .a_km
        .mul(&b.a_km.conj())
        .rational_value()
        .ok_or_else(|| gone("|a_km|^2"))?;
    let a_abs = rational_sqrt_exact(&aabs_sq).ok_or_else(|| gone("|a_km|"))?;
    Ok(RationalBlock {
        t,
        t_prime,
        k5,
        k4,
        a_abs,
    })
}

/// Compute the constants constructively, as the minimal values satisfying
/// the defining inequalities of the growth lemmas.
pub fn growth_constants(analysis: &BlockAnalysis, eta: &BigRational) -> Result<ConstantsReport> {
    let rb = rational_block(analysis)?;
    let b = &analysis.block;
    match analysis.classification {
        Classification::EqualEigenvalues => {
            let n0 = BigRational::zero();
            let q = |v: BigRational| QuadRat::rational(v, &n0);
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let tp_abs = rb.t_prime.abs();
            if tp_abs.is_zero() {
                return Err(QcfError::BadConfig(
                    "equal-eigenvalue block with T' = 0 (G would vanish)".into(),
                ));
            }
            let d1v = rb.t.abs() * &half;
            let d1 = q(d1v.clone());
            let d2 = q(&rb.k4 / &d1v);
            let two_d1 = &d1v + &d1v;
            let n1 = minimal_n(|n| &two_d1 / BigRational::from_integer(BigInt::from(n)) < tp_abs, 1)?;
            let denom_ad = (&rb.a_abs * &d1v) * BigRational::from_integer(BigInt::from(2));
            let d4 = q((&two_d1 + &tp_abs) / &denom_ad);
            let d3 = q((&tp_abs - &two_d1 / BigRational::from_integer(BigInt::from(n1))) / &denom_ad);
            let d5 = d2.div(&d4);
            let d6 = d2.div(&d3);
            let two_k4 = &rb.k4 + &rb.k4;
            let d7 = q(rb.t.abs() / &two_k4);
            let n3 = minimal_n(
                |n| &rb.t.abs() / BigRational::from_integer(BigInt::from(n)) < tp_abs,
                n1 + 1,
            )?;
            let tt = rb.t.abs() * &tp_abs;
            let d8 = q(&tt / (&two_k4 * (&rb.t.abs() + &tp_abs)));
            let d9 = q(
                &tt / (&two_k4
                    * (&tp_abs - &rb.t.abs() / BigRational::from_integer(BigInt::from(n3)))),
            );
            let g_abs_v = &tp_abs / &two_k4;
            let g_abs = q(g_abs_v.clone());
            let m_big = d7.max(&d9);
            let m_small = d7.min(&d8);
            let n4 = {
                let mb = m_big.a.clone();
                minimal_n(
                    |n| &mb / BigRational::from_integer(BigInt::from(n)) < g_abs_v,
                    n3 + 1,
                )?
            };
            let d10 = m_small.div(&g_abs.mul(&g_abs.add(&m_big)));
            let d11 = m_big.div(&g_abs.mul(&g_abs.sub(&q(
                &m_big.a / BigRational::from_integer(BigInt::from(n4)),
            ))));
            let d12 = m_big.clone();
            let d2_prime = d2.min(&d3);
            let n7 = {
                // N₇ ≥ ⌈1/D₂'⌉
                let inv = BigRational::one() / &d2_prime.a;
                let c = inv.ceil().to_integer();
                let c64 = u64::try_from(&c)
                    .map_err(|_| QcfError::BadConfig("⌈1/D₂'⌉ out of range".into()))?;
                minimal_n(|_| true, c64.max(n4 + 1))?
            };
            let d13p = q(BigRational::from_integer(BigInt::from(3)))
                .add(&g_abs)
                .add(&q(&d12.a / BigRational::from_integer(BigInt::from(n7))));
            let d13 = q(BigRational::from_integer(BigInt::from(2))).mul(&d13p).div(&d2_prime);
            let n8 = {
                let need = (&d12.a + &d12.a + &d13.a) / &g_abs_v; // (2D₁₂+D₁₃)/|G|
                minimal_n(
                    |n| BigRational::from_integer(BigInt::from(n)) >= need,
                    n7 + 1,
                )?
            };
            let four = BigRational::from_integer(BigInt::from(4));
            let d14 = q((&four / &g_abs_v).max(&four * eta.abs() / &g_abs_v));
            let d15 = q(&four * &d13.a / (&g_abs_v * &g_abs_v));
            Ok(ConstantsReport {
                family: b.family.clone(),
                m: b.root.m,
                r: b.root.r,
                classification: analysis.classification,
                g_abs,
                n_prime: n8,
                d_constants: Some(DConstants {
                    d1,
                    d2,
                    d3,
                    d4,
                    d5,
                    d6,
                    d7,
                    d8,
                    d9,
                    d10,
                    d11,
                    d12,
                    d13,
                    d14,
                    d15,
                    d2_prime,
                    n1,
                    n3,
                    n4,
                    n7,
                    n8,
                }),
                c_constants: None,
            })
        }
        Classification::DistinctModulus => {
            let n = rb.k5.clone();
            if !n.is_positive() || rb.t.is_zero() {
                return Err(QcfError::BadConfig(
                    "distinct-modulus constants need K5 > 0 and T ≠ 0 in the progression".into(),
                ));
            }
            let q = |v: BigRational| QuadRat::rational(v, &n);
            let sqrt_k5 = QuadRat::sqrt_radicand(&n);
            let half = q(BigRational::new(BigInt::one(), BigInt::from(2)));
            let sigma_t: i8 = if rb.t.is_negative() { -1 } else { 1 };
            // λ₁ dominant: |λ₁| = (|T| + √K₅)/2, |λ₂| = |D|/|λ₁|
            let lam1 = q(rb.t.abs()).add(&sqrt_k5).mul(&half);
            let dval = (&rb.t * &rb.t - &rb.k5) / BigRational::from_integer(BigInt::from(4));
            let lam2 = q(dval.abs()).div(&lam1);
            let c1 = lam1.clone();
            let c8 = lam2.div(&lam1);
            // |x₁| = |T' + σ_T√K₅|/(2K₄), |y₁| = |T' − σ_T√K₅|/(2K₄)
            let two_k4 = q(&rb.k4 + &rb.k4);
            let signed_sqrt = if sigma_t < 0 { sqrt_k5.neg() } else { sqrt_k5.clone() };
            let x_abs = q(rb.t_prime.clone()).add(&signed_sqrt).abs().div(&two_k4);
            let y_abs = q(rb.t_prime.clone()).sub(&signed_sqrt).abs().div(&two_k4);
            if x_abs.is_zero() || y_abs.is_zero() {
                return Err(QcfError::BadConfig(
                    "degenerate eigenvector components (x₁ or y₁ = 0)".into(),
                ));
            }
            let xy_dist = sqrt_k5.div(&q(rb.k4.clone()));
            let xy_ratio = x_abs.div(&y_abs);
            let one = q(BigRational::one());
            let c2 = one.sub(&c8).div(&xy_dist);
            let c3 = one.add(&c8).div(&xy_dist);
            let n2 = minimal_n(|j| xy_ratio.mul(&c8.pow(j)).lt(&one), 1)?;
            let y_over = y_abs.div(&q(rb.a_abs.clone()).mul(&xy_dist));
            let c4 = y_over.mul(&one.sub(&xy_ratio.mul(&c8.pow(n2))));
            let c5 = y_over.mul(&one.add(&xy_ratio.mul(&c8)));
            let c6 = c2.div(&c5);
            let c7 = c3.div(&c4);
            let c9 = xy_dist.div(&one.add(&c8));
            let c10 = xy_dist.div(&one.sub(&c8));
            let inv_ratio = y_abs.div(&x_abs);
            let n5 = minimal_n(|j| c8.pow(j).lt(&inv_ratio), n2 + 1)?;
            let c11 = xy_dist.div(&inv_ratio.add(&c8));
            let c12 = xy_dist.div(&inv_ratio.sub(&c8.pow(n5)));
            let m_small = c9.min(&c11);
            let m_big = c10.max(&c12);
            let g_abs = x_abs.clone();
            let n6 = minimal_n(|j| m_big.mul(&c8.pow(j)).lt(&g_abs), n5 + 1)?;
            let c13 = m_small.div(&g_abs.mul(&g_abs.add(&m_big)));
            let c14 = m_big.div(&g_abs.mul(&g_abs.sub(&m_big.mul(&c8.pow(n6)))));
            let c10_prime = c10.max(&c12);
            let c2_prime = c2.min(&c4);
            let n9 = minimal_n(|j| !c2_prime.mul(&c1.pow(j)).lt(&one), n6 + 1)?;
            let c15p = q(BigRational::from_integer(BigInt::from(3)))
                .add(&g_abs)
                .add(&c10_prime.mul(&c8.pow(n9)));
            let c15 = q(BigRational::from_integer(BigInt::from(2))).mul(&c15p).div(&c2_prime);
            let half_g = g_abs.mul(&half);
            let two = q(BigRational::from_integer(BigInt::from(2)));
            let n10 = minimal_n(
                |j| {
                    c10_prime
                        .mul(&c8.pow(j))
                        .add(&c15.div(&two.mul(&c1.pow(j))))
                        .le(&half_g)
                },
                n9 + 1,
            )?;
            let four = q(BigRational::from_integer(BigInt::from(4)));
            let c16 = four.div(&g_abs).max(&four.mul(&q(eta.abs())).div(&g_abs));
            let c17 = four.mul(&c15).div(&g_abs.mul(&g_abs));
            Ok(ConstantsReport {
                family: b.family.clone(),
                m: b.root.m,
                r: b.root.r,
                classification: analysis.classification,
                g_abs,
                n_prime: n10,
                d_constants: None,
                c_constants: Some(CConstants {
                    c1,
                    c2,
                    c3,
                    c4,
                    c5,
                    c6,
                    c7,
                    c8,
                    c9,
                    c10,
                    c11,
                    c12,
                    c13,
                    c14,
                    c15,
                    c16,
                    c17,
                    c10_prime,
                    c2_prime,
                    n2,
                    n5,
                    n6,
                    n9,
                    n10,
                }),
            })
        }
        Classification::EqualModulusDistinct => Err(QcfError::BadConfig(
            "no growth constants in the divergent (equal-modulus) case".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_by_name;
    use crate::periodic::block::{block_matrix, classify, BlockMatrix, RootOfUnity};

    fn rr_constants() -> ConstantsReport {
        let rr = family_by_name("rr").unwrap();
        let a = classify(block_matrix(&rr, &RootOfUnity::new(1, 0).unwrap()).unwrap()).unwrap();
        growth_constants(&a, &rr.eta).unwrap()
    }

    #[test]
    fn rr_m1_c_constants_from_quadratic_formula() {
        // oracle: λ = (1±√5)/2 by the quadratic formula, so C₁ = φ and
        // C₈ = 1/φ² = (3−√5)/2
        let rep = rr_constants();
        let c = rep.c_constants.as_ref().unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((c.c1.to_f64() - phi).abs() < 1e-12);
        assert!((c.c8.to_f64() - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        // exact form of C₈: (3−√5)/2
        assert_eq!(c.c8.a, BigRational::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(c.c8.b, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        // orderings declared ahead of the lemmas
        assert!(c.n2 < c.n5 && c.n5 < c.n6 && c.n6 < c.n9 && c.n9 < c.n10);
        assert_eq!(rep.n_prime, c.n10);
        // all constants positive
        for v in [
            &c.c1, &c.c2, &c.c3, &c.c4, &c.c5, &c.c6, &c.c7, &c.c8, &c.c9, &c.c10, &c.c11,
            &c.c12, &c.c13, &c.c14, &c.c15, &c.c16, &c.c17,
        ] {
            assert!(v.sign() > 0);
        }
    }

    #[test]
    fn synthetic_equal_block_d_constants() {
        // [[2,−1],[1,0]]: λ = 1, D₁ = |λ₁| = 1, D₂ = |Q_{km−1}/λ₁| = 1,
        // so |Q_{jkm−1}| = j exactly
        let blk = BlockMatrix::synthetic("synthetic", [[2, -1], [1, 0]]).unwrap();
        let a = classify(blk).unwrap();
        assert_eq!(a.classification, Classification::EqualEigenvalues);
        let eta = BigRational::new(BigInt::one(), BigInt::from(2));
        let rep = growth_constants(&a, &eta).unwrap();
        let d = rep.d_constants.as_ref().unwrap();
        assert_eq!(d.d1.a, BigRational::one());
        assert_eq!(d.d2.a, BigRational::one());
        assert!(d.n1 < d.n3 && d.n3 < d.n4 && d.n4 < d.n7 && d.n7 < d.n8);
        for v in [
            &d.d1, &d.d2, &d.d3, &d.d4, &d.d5, &d.d6, &d.d7, &d.d8, &d.d9, &d.d10, &d.d11,
            &d.d12, &d.d13, &d.d14, &d.d15,
        ] {
            assert!(v.sign() > 0, "nonpositive constant");
        }
    }

    #[test]
    fn quadrat_sign_edge_cases() {
        let n = BigRational::from_integer(BigInt::from(5));
        // 3 − √5 > 0, 2 − √5 < 0, (√5)² − 5 = 0
        let a = QuadRat::from_i64(3, &n).sub(&QuadRat::sqrt_radicand(&n));
        assert_eq!(a.sign(), 1);
        let b = QuadRat::from_i64(2, &n).sub(&QuadRat::sqrt_radicand(&n));
        assert_eq!(b.sign(), -1);
        let c = QuadRat::sqrt_radicand(&n)
            .mul(&QuadRat::sqrt_radicand(&n))
            .sub(&QuadRat::from_i64(5, &n));
        assert_eq!(c.sign(), 0);
    }
}
