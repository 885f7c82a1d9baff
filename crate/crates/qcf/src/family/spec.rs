//! Family definitions: the tuple (k, f₁..f_k, g₀..g_{k−1}, b₀, η, d, s, r, u)
//! plus the four built-in families and the configuration file format.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{QcfError, Result};
use crate::scalars::Scalar;

use super::bipoly::BiPolynomial;

/// One continued fraction G(q) of the family form, with the structural
/// constants of its root-of-unity theory.
///
/// Index convention: for n ≥ 1 write n = n'·k + s' with n' = ⌊(n−1)/k⌋ and
/// s' = n − n'·k ∈ {1..k}; then aₙ = f_{s'}(q^{n'}) and b_{n−1} = g_{s'−1}(q^{n'})
/// (equivalently b_j = g_{j mod k}(q^{⌊j/k⌋}) for j ≥ 1). b₀ is stored
/// separately as a polynomial in q alone.
///
/// The stored polynomials carry their q-coefficients explicitly so that the
/// ⌊(n−1)/k⌋ convention reproduces the classical expansions: the
/// Rogers-Ramanujan fraction has f₁ = qx (a_n = qⁿ), not the bare x of a
/// shifted indexing.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub name: String,
    pub k: u32,
    pub f: Vec<BiPolynomial>,
    pub g: Vec<BiPolynomial>,
    pub b0: BiPolynomial,
    pub eta: BigRational,
    pub d: u32,
    pub s: u32,
    pub r: u32,
    pub u: u32,
    /// The Göllnitz-Gordon condition set is conjectural; checks run in
    /// exploratory (report, don't assert) mode for experimental families.
    pub experimental: bool,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.f.len() != self.k as usize || self.g.len() != self.k as usize {
            return Err(QcfError::BadConfig(format!(
                "family {}: need k ≥ 1 with exactly k f-polynomials and k g-polynomials",
                self.name
            )));
        }
        if self.r == self.u || self.r >= self.d || self.u >= self.d {
            return Err(QcfError::BadConfig(format!(
                "family {}: residues r, u must be distinct in 0..d",
                self.name
            )));
        }
        if self.s == 0 || self.s > self.d {
            return Err(QcfError::BadConfig(format!(
                "family {}: s must lie in 1..=d",
                self.name
            )));
        }
        if self.b0.terms().iter().any(|t| t.2 != 0) {
            return Err(QcfError::BadConfig(format!(
                "family {}: b0 must be a polynomial in q only",
                self.name
            )));
        }
        Ok(())
    }

    /// Largest q-exponent appearing in any coefficient polynomial.
    pub fn max_q_exp(&self) -> u32 {
        self.f
            .iter()
            .chain(self.g.iter())
            .chain(std::iter::once(&self.b0))
            .map(|p| p.q_degree())
            .max()
            .unwrap_or(0)
    }

    /// Largest x-exponent across the f and g polynomials.
    pub fn max_x_exp(&self) -> u32 {
        self.f
            .iter()
            .chain(self.g.iter())
            .map(|p| p.x_degree())
            .max()
            .unwrap_or(0)
    }
}

/// aₙ and b_{n−1} at a concrete (or symbolic) q.
pub fn partial_terms<S: Scalar>(spec: &FamilySpec, n: u64, q: &S) -> (S, S) {
    assert!(n >= 1);
    let k = spec.k as u64;
    let np = (n - 1) / k;
    let sp = (n - np * k) as usize; // 1..=k
    let q_powers: Vec<S> = {
        let mut v = Vec::with_capacity(spec.max_q_exp() as usize + 1);
        v.push(q.from_int(&BigInt::from(1)));
        for i in 1..=spec.max_q_exp() as usize {
            v.push(v[i - 1].mul(q));
        }
        v
    };
    let x = q.pow_u(np);
    let a = spec.f[sp - 1].eval(&q_powers, &x);
    let b = if n == 1 {
        // b₀ is a polynomial in q alone
        spec.b0.eval(&q_powers, &q_powers[0])
    } else {
        // b_{n-1} = g_{s'-1}(q^{n'})
        spec.g[sp - 1].eval(&q_powers, &x)
    };
    (a, b)
}

/// The four families of the root-of-unity theory plus the (experimental)
/// Göllnitz-Gordon fraction.
pub fn builtin_families() -> Vec<FamilySpec> {
    let one = BiPolynomial::constant(1);
    let rr = FamilySpec {
        name: "rogers-ramanujan".into(),
        k: 1,
        f: vec![BiPolynomial::from_triples(&[(1, 1, 1)])], // a_n = q^n
        g: vec![one.clone()],
        b0: one.clone(),
        eta: BigRational::new(BigInt::from(1), BigInt::from(5)),
        d: 5,
        s: 1,
        r: 1,
        u: 2,
        experimental: false,
    };
    let s1 = FamilySpec {
        name: "s1".into(),
        k: 2,
        f: vec![
            BiPolynomial::from_triples(&[(1, 1, 2)]),           // q x^2
            BiPolynomial::from_triples(&[(1, 1, 1), (1, 2, 2)]), // q x + q^2 x^2
        ],
        g: vec![one.clone(), one.clone()],
        b0: one.clone(),
        eta: BigRational::new(BigInt::from(1), BigInt::from(8)),
        d: 8,
        s: 1,
        r: 1,
        u: 2,
        experimental: false,
    };
    let s2 = FamilySpec {
        name: "s2".into(),
        k: 2,
        f: vec![
            BiPolynomial::from_triples(&[(1, 1, 2), (1, 2, 4)]), // q x^2 + q^2 x^4
            BiPolynomial::from_triples(&[(1, 4, 4)]),            // q^4 x^4
        ],
        g: vec![one.clone(), one.clone()],
        b0: one.clone(),
        eta: BigRational::new(BigInt::from(1), BigInt::from(2)),
        d: 8,
        s: 1,
        r: 1,
        u: 2,
        experimental: false,
    };
    let s3 = FamilySpec {
        name: "s3".into(),
        k: 1,
        f: vec![BiPolynomial::from_triples(&[(1, 1, 1), (1, 2, 2)])], // a_n = q^n + q^{2n}
        g: vec![one.clone()],
        b0: one.clone(),
        eta: BigRational::new(BigInt::from(1), BigInt::from(3)),
        d: 6,
        s: 1,
        r: 1,
        u: 2,
        experimental: false,
    };
    // Göllnitz-Gordon: a_n = q^{2n}, b_n = 1 + q^{2n+1}; its condition data
    // (η, progression, residues) has not been established — exploratory
    // values mirror the S₂ analogy and are only used in report mode.
    let gg = FamilySpec {
        name: "gollnitz-gordon".into(),
        k: 1,
        f: vec![BiPolynomial::from_triples(&[(1, 2, 2)])], // q^2 x^2
        g: vec![BiPolynomial::from_triples(&[(1, 0, 0), (1, 1, 2)])], // 1 + q x^2
        b0: BiPolynomial::from_triples(&[(1, 0, 0), (1, 1, 0)]), // 1 + q
        eta: BigRational::new(BigInt::from(1), BigInt::from(2)),
        d: 8,
        s: 1,
        r: 1,
        u: 2,
        experimental: true,
    };
    vec![rr, s1, s2, s3, gg]
}

pub fn family_by_name(name: &str) -> Result<FamilySpec> {
    builtin_families()
        .into_iter()
        .find(|f| f.name == name || short_alias(&f.name) == name)
        .ok_or_else(|| QcfError::BadConfig(format!("unknown family '{name}'")))
}

fn short_alias(name: &str) -> &'static str {
    match name {
        "rogers-ramanujan" => "rr",
        "s1" => "s1",
        "s2" => "s2",
        "s3" => "s3",
        "gollnitz-gordon" => "gg",
        _ => "",
    }
}

/// Wire format for family configuration files.
#[derive(Serialize, Deserialize)]
pub struct FamilyConfig {
    pub name: String,
    pub k: u32,
    pub eta: String,
    pub d: u32,
    pub s: u32,
    pub r: u32,
    pub u: u32,
    pub b0: BiPolynomial,
    pub f: Vec<BiPolynomial>,
    pub g: Vec<BiPolynomial>,
    #[serde(default)]
    pub experimental: bool,
}

impl FamilyConfig {
    pub fn from_spec(spec: &FamilySpec) -> Self {
        Self {
            name: spec.name.clone(),
            k: spec.k,
            eta: format!("{}/{}", spec.eta.numer(), spec.eta.denom()),
            d: spec.d,
            s: spec.s,
            r: spec.r,
            u: spec.u,
            b0: spec.b0.clone(),
            f: spec.f.clone(),
            g: spec.g.clone(),
            experimental: spec.experimental,
        }
    }

    pub fn into_spec(self) -> Result<FamilySpec> {
        let eta = parse_eta(&self.eta)?;
        let spec = FamilySpec {
            name: self.name,
            k: self.k,
            f: self.f,
            g: self.g,
            b0: self.b0,
            eta,
            d: self.d,
            s: self.s,
            r: self.r,
            u: self.u,
            experimental: self.experimental,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_eta(s: &str) -> Result<BigRational> {
    let parts: Vec<&str> = s.split('/').collect();
    let bad = || QcfError::BadConfig(format!("bad eta '{s}', expected \"p/q\""));
    match parts.as_slice() {
        [n] => Ok(BigRational::from_integer(
            n.trim().parse::<BigInt>().map_err(|_| bad())?,
        )),
        [n, d] => {
            let num = n.trim().parse::<BigInt>().map_err(|_| bad())?;
            let den = d.trim().parse::<BigInt>().map_err(|_| bad())?;
            if den == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn qpoly_like(sym: &BigRational) -> BigRational {
        sym.clone()
    }

    #[test]
    fn rr_partial_terms_symbolic_via_rational_probe() {
        // a₇ = q⁷, b₆ = 1 — probed at q = 2 (injective on monomials)
        let rr = family_by_name("rr").unwrap();
        let q = BigRational::from_integer(BigInt::from(2));
        let (a7, b6) = partial_terms(&rr, 7, &qpoly_like(&q));
        assert_eq!(a7, BigRational::from_integer(BigInt::from(128)));
        assert!(b6.is_one());
        let (a1, b0) = partial_terms(&rr, 1, &q);
        assert_eq!(a1, q);
        assert!(b0.is_one());
    }

    #[test]
    fn s1_block_pattern_matches_expansion() {
        // S₁ = 1 + q/1 + (q+q²)/1 + q³/1 + (q²+q⁴)/1 + ⋯, checked at q = 3
        let s1 = family_by_name("s1").unwrap();
        let q = BigRational::from_integer(BigInt::from(3));
        let qi = |e: u64| Scalar::pow_u(&q, e);
        let expect = [
            qi(1),            // a₁ = q
            &qi(1) + &qi(2),  // a₂ = q + q²
            qi(3),            // a₃ = q³
            &qi(2) + &qi(4),  // a₄ = q² + q⁴
            qi(5),            // a₅ = q⁵
            &qi(3) + &qi(6),  // a₆ = q³ + q⁶
        ];
        for (i, want) in expect.iter().enumerate() {
            let (a, b) = partial_terms(&s1, i as u64 + 1, &q);
            assert_eq!(&a, want, "a_{}", i + 1);
            assert!(b.is_one());
        }
    }

    #[test]
    fn any_spec_at_q_one_gives_coefficient_sums() {
        for spec in builtin_families() {
            let q = BigRational::one();
            for n in 1..=6u64 {
                let (a, _) = partial_terms(&spec, n, &q);
                let k = spec.k as u64;
                let sp = (n - (n - 1) / k * k) as usize;
                assert_eq!(
                    a,
                    BigRational::from_integer(spec.f[sp - 1].eval_at_one()),
                    "{} a_{n} at q=1",
                    spec.name
                );
            }
        }
    }

    #[test]
    fn gg_partial_denominators() {
        // b₀ = 1+q, b₁ = 1+q³, b₂ = 1+q⁵ at q = 2: 3, 9, 33
        let gg = family_by_name("gg").unwrap();
        let q = BigRational::from_integer(BigInt::from(2));
        let (_, b0) = partial_terms(&gg, 1, &q);
        let (_, b1) = partial_terms(&gg, 2, &q);
        let (_, b2) = partial_terms(&gg, 3, &q);
        assert_eq!(b0, BigRational::from_integer(BigInt::from(3)));
        assert_eq!(b1, BigRational::from_integer(BigInt::from(9)));
        assert_eq!(b2, BigRational::from_integer(BigInt::from(33)));
        // a₁ = q², a₂ = q⁴
        let (a1, _) = partial_terms(&gg, 1, &q);
        let (a2, _) = partial_terms(&gg, 2, &q);
        assert_eq!(a1, BigRational::from_integer(BigInt::from(4)));
        assert_eq!(a2, BigRational::from_integer(BigInt::from(16)));
    }

    #[test]
    fn config_round_trip() {
        for spec in builtin_families() {
            let cfg = FamilyConfig::from_spec(&spec);
            let json = serde_json::to_string_pretty(&cfg).unwrap();
            let back: FamilyConfig = serde_json::from_str(&json).unwrap();
            let spec2 = back.into_spec().unwrap();
            assert_eq!(spec.name, spec2.name);
            assert_eq!(spec.k, spec2.k);
            assert_eq!(spec.eta, spec2.eta);
            assert_eq!(spec.f, spec2.f);
            assert_eq!(spec.g, spec2.g);
        }
    }
}
