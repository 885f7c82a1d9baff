//! Elements of ℤ[q][x]: the f_s and g_s polynomials of a family.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalars::Scalar;

/// A finite set of (coefficient, q-exponent, x-exponent) terms; no duplicate
/// exponent pairs, no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPolynomial {
    terms: Vec<(BigInt, u32, u32)>,
}

impl BiPolynomial {
    pub fn new(raw: Vec<(BigInt, u32, u32)>) -> Self {
        let mut terms: Vec<(BigInt, u32, u32)> = Vec::new();
        for (c, qe, xe) in raw {
            if c.is_zero() {
                continue;
            }
            if let Some(t) = terms.iter_mut().find(|t| t.1 == qe && t.2 == xe) {
                t.0 += c;
            } else {
                terms.push((c, qe, xe));
            }
        }
        terms.retain(|t| !t.0.is_zero());
        terms.sort_by_key(|t| (t.1, t.2));
        Self { terms }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![(BigInt::from(c), 0, 0)])
    }

    pub fn from_triples(raw: &[(i64, u32, u32)]) -> Self {
        Self::new(
            raw.iter()
                .map(|&(c, qe, xe)| (BigInt::from(c), qe, xe))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[(BigInt, u32, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest x-exponent.
    pub fn x_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.2).max().unwrap_or(0)
    }

    /// Largest q-exponent.
    pub fn q_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// Σ|coefficients|.
    pub fn coeff_abs_sum(&self) -> BigInt {
        self.terms.iter().map(|t| t.0.clone().abs()).sum()
    }

    /// Substitute x ← xval (a power of q) and collapse: Σ c·q^qe·xval^xe.
    /// `q_powers[i]` must hold q^i for i ≤ the max q-exponent.
    pub fn eval<S: Scalar>(&self, q_powers: &[S], xval: &S) -> S {
        let zero = q_powers[0].from_int(&BigInt::zero());
        let mut acc = zero.clone();
        let xd = self.x_degree() as usize;
        let mut xpows: Vec<S> = Vec::with_capacity(xd + 1);
        xpows.push(q_powers[0].clone()); // x^0 = 1 (q_powers[0] is one)
        for i in 1..=xd {
            xpows.push(xpows[i - 1].mul(xval));
        }
        for (c, qe, xe) in &self.terms {
            let mut term = q_powers[*qe as usize].mul(&xpows[*xe as usize]);
            term = term.mul(&term.from_int(c));
            acc = acc.add(&term);
        }
        acc
    }

    /// Coefficient sum at q = x = 1.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.iter().map(|t| t.0.clone()).sum()
    }
}

/// Config wire format: arrays of [coeff, q_exp, x_exp] integer triples.
impl Serialize for BiPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let triples: Vec<(String, u32, u32)> = self
            .terms
            .iter()
            .map(|(c, qe, xe)| (c.to_string(), *qe, *xe))
            .collect();
        triples.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let triples: Vec<(serde_json::Value, u32, u32)> = Vec::deserialize(d)?;
        let mut raw = Vec::new();
        for (c, qe, xe) in triples {
            let coeff = match &c {
                serde_json::Value::Number(n) => BigInt::from(
                    n.as_i64()
                        .ok_or_else(|| serde::de::Error::custom("coefficient out of i64 range"))?,
                ),
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| serde::de::Error::custom(format!("bad coefficient: {e}")))?,
                _ => return Err(serde::de::Error::custom("coefficient must be int or string")),
            };
            raw.push((coeff, qe, xe));
        }
        Ok(BiPolynomial::new(raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn duplicate_terms_merge_and_zeros_drop() {
        let p = BiPolynomial::from_triples(&[(1, 0, 1), (2, 0, 1), (3, 1, 0), (-3, 1, 0)]);
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0], (BigInt::from(3), 0, 1));
    }

    #[test]
    fn eval_rational_backend() {
        // f = q x + q^2 x^2 at q = 1/2, x = q^3 = 1/8:
        // (1/2)(1/8) + (1/4)(1/64) = 1/16 + 1/256 = 17/256
        let f = BiPolynomial::from_triples(&[(1, 1, 1), (1, 2, 2)]);
        let q = BigRational::new(BigInt::from(1), BigInt::from(2));
        let qp: Vec<BigRational> = (0..3u64).map(|i| Scalar::pow_u(&q, i)).collect();
        let x = Scalar::pow_u(&q, 3);
        let v = f.eval(&qp, &x);
        assert_eq!(v, BigRational::new(BigInt::from(17), BigInt::from(256)));
    }
}
