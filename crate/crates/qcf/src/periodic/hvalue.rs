//! H(q) = q^η／G(q) at roots of unity: exact representation, the finite
//! value table keyed by residue classes, and Schur's closed form for the
//! Rogers-Ramanujan fraction as an independent oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

use crate::error::{QcfError, Result};
use crate::family::FamilySpec;
use crate::scalars::{
    sqrt_of_integer_as_cyclotomic, BigComplex, CyclotomicElement,
};

use super::block::{BlockAnalysis, Classification, RootOfUnity};

/// H(q) = q^η/G(q) in exact form: q^η = exp(2πi·angle) with the principal
/// lift angle = η·r/m ∈ [0,1), and G = (T' + σ√K₅)/(2Q_{km−1}).
#[derive(Clone, Debug)]
pub struct ExactH {
    pub family: String,
    pub m: u64,
    pub r: u64,
    /// (m mod d, r mod d)
    pub class_key: (u32, u32),
    /// q^η as an exact angle fraction of a full turn
    pub q_eta_angle: BigRational,
    /// T' + σ√K₅ — the G numerator parts
    pub g_alpha: CyclotomicElement,
    /// coefficient of √K₅ in the G numerator (0 or ±1)
    pub g_beta: BigRational,
    /// 2·Q_{km−1}
    pub g_den: CyclotomicElement,
    /// the radicand K₅ (integer in the tabulated progressions)
    pub k5: CyclotomicElement,
}

impl ExactH {
    /// High-precision embedding of H = q^η · (2Q_{km−1}) / (T' + σ√K₅).
    pub fn embed(&self, p: usize) -> BigComplex {
        let g = p + 32;
        let qeta = BigComplex::exp_two_pi_i(&self.q_eta_angle, g);
        let w = self.k5.embed(g).sqrt();
        let num = self
            .g_alpha
            .embed(g)
            .add(&w.scale(&crate::scalars::bf_from_ratio(&self.g_beta, g)));
        qeta.mul(&self.g_den.embed(g)).div(&num).with_precision(p)
    }

    /// Exact equality of two H values (same family progression, hence same
    /// integer radicand): collapses √K₅ to its Gauss-sum form and compares
    /// by cross-multiplication in a common cyclotomic field — no division,
    /// no rounding.
    pub fn eq_exact(&self, other: &ExactH) -> Result<bool> {
        let k5a = self
            .k5
            .rational_value()
            .ok_or_else(|| QcfError::BadConfig("K5 not rational; exact H comparison needs the tabulated progression".into()))?;
        let k5b = other.k5.rational_value().ok_or_else(|| {
            QcfError::BadConfig("K5 not rational; exact H comparison needs the tabulated progression".into())
        })?;
        if k5a != k5b {
            return Ok(false);
        }
        if !k5a.denom().is_one() {
            return Err(QcfError::BadConfig("K5 not an integer".into()));
        }
        let w = sqrt_of_integer_as_cyclotomic(k5a.numer());
        // numerators N_i = α_i + β_i·w, denominators D_i = q_i^η·2Q^{(i)};
        // H_i = q_i^η·2Q^{(i)}/N_i, so H₁ = H₂ ⟺ D₁·N₂ = D₂·N₁.
        let (a1, f1) = angle_to_root(&self.q_eta_angle);
        let (a2, f2) = angle_to_root(&other.q_eta_angle);
        let l = lcm_many(&[
            self.g_alpha.order(),
            other.g_alpha.order(),
            self.g_den.order(),
            other.g_den.order(),
            w.order(),
            f1,
            f2,
        ]);
        let lift = |e: &CyclotomicElement| e.lift_to_order(l);
        let n1 = lift(&self.g_alpha).add(&lift(&w).scale(&self.g_beta));
        let n2 = lift(&other.g_alpha).add(&lift(&w).scale(&other.g_beta));
        let d1 = lift(&a1).mul(&lift(&self.g_den));
        let d2 = lift(&a2).mul(&lift(&other.g_den));
        Ok(d1.mul(&n2).eq_exact(&d2.mul(&n1)))
    }
}

/// exp(2πi·t) for rational t as an exact root of unity (element, order).
fn angle_to_root(t: &BigRational) -> (CyclotomicElement, u64) {
    let tm = t - t.floor();
    let den = u64::try_from(tm.denom()).expect("angle denominator fits u64");
    let num = u64::try_from(tm.numer()).expect("angle numerator fits u64");
    (CyclotomicElement::root_power(den, num as i64), den)
}

fn lcm_many(xs: &[u64]) -> u64 {
    xs.iter().fold(1u64, |a, b| num_integer::lcm(a, *b))
}

/// H(q) from a convergent block analysis, with the principal branch
/// q^η := exp(2πi·η·r/m).
pub fn h_value(spec: &FamilySpec, analysis: &BlockAnalysis) -> Result<ExactH> {
    let b = &analysis.block;
    let (m, r) = (b.root.m, b.root.r);
    if analysis.divergent() {
        return Err(QcfError::UndefinedH {
            m,
            r,
            reason: "G(q) diverges".into(),
        });
    }
    let num = analysis.limit_num.as_ref().unwrap();
    let den = analysis.limit_den.as_ref().unwrap();
    // G = 0 ⟺ numerator vanishes; exact test via the norm α² − β²K₅ plus a
    // certified branch check when the norm vanishes
    if g_numerator_is_zero(analysis)? {
        return Err(QcfError::UndefinedH {
            m,
            r,
            reason: "G(q) = 0".into(),
        });
    }
    let angle = &spec.eta * b.root.angle();
    let beta_rat = if analysis.classification == Classification::DistinctModulus {
        BigRational::from_integer(BigInt::from(analysis.sigma as i64))
    } else {
        BigRational::zero()
    };
    Ok(ExactH {
        family: spec.name.clone(),
        m,
        r,
        class_key: ((m % spec.d as u64) as u32, (r % spec.d as u64) as u32),
        q_eta_angle: &angle - angle.floor(),
        g_alpha: num.alpha.clone(),
        g_beta: beta_rat,
        g_den: den.clone(),
        k5: b.k5.clone(),
    })
}

fn g_numerator_is_zero(analysis: &BlockAnalysis) -> Result<bool> {
    let num = analysis.limit_num.as_ref().unwrap();
    let b = &analysis.block;
    if num.beta.is_zero() {
        return Ok(num.alpha.is_zero());
    }
    // α + σβw = 0 requires α² = β²K₅ (norm condition)
    let norm = num
        .alpha
        .mul(&num.alpha)
        .sub(&num.beta.mul(&num.beta).mul(&b.k5));
    if !norm.is_zero() {
        return Ok(false);
    }
    // norm vanishes: α = ±βw; decide the sign by certified embedding of
    // |α + σβw| against |α| (they differ by 0 vs 2|α| — distinguishable
    // unless α = 0, which forces β = 0 too here)
    if num.alpha.is_zero() {
        return Ok(num.beta.is_zero());
    }
    let sigma = analysis.sigma;
    let a = num.alpha.clone();
    let be = num.beta.clone();
    let k5 = b.k5.clone();
    let sign = crate::scalars::certified_sign(
        move |p| {
            let w = k5.embed(p).sqrt();
            let bw = be.embed(p).mul(&w);
            let signed = if sigma < 0 { bw.neg() } else { bw };
            let v = a.embed(p).add(&signed).abs();
            // compare against |α|: positive ⟹ nonzero numerator
            v.sub(&a.embed(p).abs(), p, crate::scalars::RM)
        },
        192,
        1 << 15,
    )?;
    Ok(sign < 0)
}

/// The finitely many H values of one family, keyed by (m mod d, r mod d).
#[derive(Debug, Default)]
pub struct HValueTable {
    pub family: String,
    pub by_class: BTreeMap<(u32, u32), ExactH>,
    pub invariance_violations: Vec<((u32, u32), (u64, u64), (u64, u64))>,
}

impl HValueTable {
    pub fn new(family: &str) -> Self {
        Self {
            family: family.to_string(),
            by_class: BTreeMap::new(),
            invariance_violations: Vec::new(),
        }
    }

    /// Record an H value; exact residue-class invariance is re-verified
    /// against the stored representative.
    pub fn insert(&mut self, h: ExactH) -> Result<()> {
        if let Some(prev) = self.by_class.get(&h.class_key) {
            if !prev.eq_exact(&h)? {
                self.invariance_violations
                    .push((h.class_key, (prev.m, prev.r), (h.m, h.r)));
            }
            return Ok(());
        }
        self.by_class.insert(h.class_key, h);
        Ok(())
    }

    /// Number of distinct recorded values.
    pub fn value_count(&self) -> usize {
        self.by_class.len()
    }

    /// Exact distinctness of the two condition-(7) residues at m ≡ s.
    pub fn residues_distinct(&self, s: u32, d: u32, r: u32, u: u32) -> Result<Option<bool>> {
        let a = self.by_class.get(&(s % d, r % d));
        let b = self.by_class.get(&(s % d, u % d));
        match (a, b) {
            (Some(x), Some(y)) => Ok(Some(!x.eq_exact(y)?)),
            _ => Ok(None),
        }
    }
}

/// Schur's evaluation of the Rogers-Ramanujan fraction at a primitive m-th
/// root of unity.
#[derive(Clone, Debug, PartialEq)]
pub enum SchurValue {
    /// m ≡ 0 (mod 5)
    Divergent,
    /// λ·K(λ)·q^((1−λσm)/5) stored as (a + b√5)·exp(2πi·angle)
    Value {
        angle: BigRational,
        coeff_a: BigRational,
        coeff_b: BigRational,
    },
}

impl SchurValue {
    pub fn embed(&self, p: usize) -> Option<BigComplex> {
        match self {
            SchurValue::Divergent => None,
            SchurValue::Value {
                angle,
                coeff_a,
                coeff_b,
            } => {
                let g = p + 32;
                let root = BigComplex::exp_two_pi_i(angle, g);
                let sqrt5 = crate::scalars::bf_from_bigint(&BigInt::from(5), g).sqrt(g, crate::scalars::RM);
                let c = crate::scalars::bf_from_ratio(coeff_a, g).add(
                    &crate::scalars::bf_from_ratio(coeff_b, g).mul(&sqrt5, g, crate::scalars::RM),
                    g,
                    crate::scalars::RM,
                );
                Some(root.scale(&c).with_precision(p))
            }
        }
    }
}

/// K(q) per Schur: divergent iff m ≡ 0 (mod 5); otherwise
/// λ·q^((1−λσm)/5)·K(λ) with λ the Legendre symbol (m|5), σ the least
/// positive residue of m mod 5, K(1) = φ and K(−1) = 1/φ.
pub fn schur_value(root: &RootOfUnity) -> SchurValue {
    let m = root.m;
    let sigma = m % 5;
    if sigma == 0 {
        return SchurValue::Divergent;
    }
    let lambda: i64 = if sigma == 1 || sigma == 4 { 1 } else { -1 };
    // exponent e = (1 − λσm)/5 ∈ ℤ
    let e = (BigInt::one() - BigInt::from(lambda) * BigInt::from(sigma) * BigInt::from(m))
        / BigInt::from(5);
    let angle = BigRational::new(BigInt::from(root.r) * e, BigInt::from(m));
    let angle = &angle - angle.floor();
    // λ·K(λ): φ = (1+√5)/2 for λ = 1; −1/φ = (1−√5)/2 for λ = −1
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (ca, cb) = if lambda == 1 {
        (half.clone(), half)
    } else {
        (half.clone(), -half)
    };
    SchurValue::Value {
        angle,
        coeff_a: ca,
        coeff_b: cb,
    }
}

/// Legendre symbol (m|5) — exposed for reports.
pub fn legendre_mod5(m: u64) -> i64 {
    match m % 5 {
        1 | 4 => 1,
        2 | 3 => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_by_name;
    use crate::periodic::block::{block_matrix, classify};
    use crate::scalars::rel_agree;
    use astro_float::BigFloat;

    fn phi(p: usize) -> BigFloat {
        BigFloat::from_i64(5, p)
            .sqrt(p, crate::scalars::RM)
            .add(&BigFloat::from_i64(1, p), p, crate::scalars::RM)
            .div(&BigFloat::from_i64(2, p), p, crate::scalars::RM)
    }

    #[test]
    fn schur_endpoints() {
        let v1 = schur_value(&RootOfUnity::new(1, 0).unwrap());
        let z = v1.embed(192).unwrap();
        assert!(rel_agree(z.re(), &phi(192), 180));
        let v5 = schur_value(&RootOfUnity::new(5, 2).unwrap());
        assert_eq!(v5, SchurValue::Divergent);
    }

    #[test]
    fn schur_m3_by_hand() {
        // λ = (3|5) = −1, σ = 3, exponent (1+9)/5 = 2: K = −q²/φ
        let root = RootOfUnity::new(3, 1).unwrap();
        let v = schur_value(&root);
        let z = v.embed(256).unwrap();
        let p = 256;
        let q2 = BigComplex::exp_two_pi_i(&BigRational::new(BigInt::from(2), BigInt::from(3)), p);
        let want = q2.scale(&BigFloat::from_i64(1, p).div(&phi(p), p, crate::scalars::RM)).neg();
        assert!(rel_agree(z.re(), want.re(), 240));
        assert!(rel_agree(z.im(), want.im(), 240));
        // cross-check against the block classification limit at m=3
        let rr = family_by_name("rr").unwrap();
        let a = classify(block_matrix(&rr, &root).unwrap()).unwrap();
        let g = a.limit_embed(256).unwrap();
        assert!(rel_agree(g.re(), z.re(), 240));
        assert!(rel_agree(g.im(), z.im(), 240));
    }

    #[test]
    fn rr_h_value_matches_table_row() {
        // m ≡ 1 mod 5, residue r: H = 2·exp(2πi r/5)/(1+√5)
        let rr = family_by_name("rr").unwrap();
        for (m, r) in [(6u64, 1u64), (11, 2), (11, 8), (16, 3)] {
            let root = RootOfUnity::new(m, r).unwrap();
            let a = classify(block_matrix(&rr, &root).unwrap()).unwrap();
            let h = h_value(&rr, &a).unwrap();
            let z = h.embed(224);
            let p = 224;
            let want = BigComplex::exp_two_pi_i(
                &BigRational::new(BigInt::from(r % 5), BigInt::from(5)),
                p,
            )
            .scale(
                &BigFloat::from_i64(2, p).div(
                    &BigFloat::from_i64(1, p).add(&BigFloat::from_i64(5, p).sqrt(p, crate::scalars::RM), p, crate::scalars::RM),
                    p,
                    crate::scalars::RM,
                ),
            );
            assert!(rel_agree(z.re(), want.re(), 200), "H re at ({m},{r})");
            assert!(rel_agree(z.im(), want.im(), 200), "H im at ({m},{r})");
        }
    }

    #[test]
    fn h_residue_invariance_exact() {
        // H at (m, r) equals H at (m+d, r') with r' ≡ r (mod d), exactly
        let rr = family_by_name("rr").unwrap();
        let mut table = HValueTable::new("rr");
        for (m, r) in [(6u64, 1u64), (11, 6), (16, 11), (21, 16), (6, 5), (11, 10)] {
            let root = RootOfUnity::new(m, r).unwrap();
            let a = classify(block_matrix(&rr, &root).unwrap()).unwrap();
            table.insert(h_value(&rr, &a).unwrap()).unwrap();
        }
        assert!(table.invariance_violations.is_empty());
        // distinct residues r=1, u=2 give distinct values
        let mut t2 = HValueTable::new("rr");
        for (m, r) in [(6u64, 1u64), (11, 2)] {
            let root = RootOfUnity::new(m, r).unwrap();
            let a = classify(block_matrix(&rr, &root).unwrap()).unwrap();
            t2.insert(h_value(&rr, &a).unwrap()).unwrap();
        }
        assert_eq!(t2.residues_distinct(1, 5, 1, 2).unwrap(), Some(true));
    }
}
