//! P_n(q) and Q_n(q) expanded as integer polynomials, and the Lipschitz
//! constants κ_n, ν_n, γ(n) that control |Q_n(x)−Q_n(y)| on the unit circle.
//!
//! The constants come from the δ recursion
//! δ_n = max{ Σᵢ i·|γᵢ|, 1, δ_{n−1}+1 } (δ_{−1} = 0) applied to the
//! coefficients of Q_n (giving κ_n) and of P_n (giving ν_n), with
//! γ(n) = max(κ_n, ν_n). Both sequences are strictly increasing, so
//! γ(n) ≥ n.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QcfError, Result};
use crate::family::{run_recurrence, FamilySpec};
use crate::scalars::{BigComplex, Scalar, ZeroUndecided};

/// Integer polynomial in q, sparse exponent map, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPolynomial {
    coeffs: BTreeMap<u64, BigInt>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !n.is_zero() {
            coeffs.insert(0, n);
        }
        Self { coeffs }
    }

    pub fn monomial(c: BigInt, e: u64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, BigInt> {
        &self.coeffs
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Σᵢ i·|γᵢ| — the weighted coefficient sum of the δ recursion.
    pub fn weighted_abs_sum(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|(e, c)| BigInt::from(*e) * c.abs())
            .sum()
    }

    /// Evaluate at an arbitrary scalar.
    pub fn eval_scalar<S: Scalar>(&self, q: &S) -> S {
        let mut acc = q.from_int(&BigInt::zero());
        let mut last_e = 0u64;
        let mut pow = q.from_int(&BigInt::one());
        for (e, c) in &self.coeffs {
            pow = pow.mul(&q.pow_u(e - last_e));
            last_e = *e;
            acc = acc.add(&pow.mul(&pow.from_int(c)));
        }
        acc
    }

    pub fn eval_complex(&self, q: &BigComplex) -> BigComplex {
        self.eval_scalar(q)
    }
}

impl Scalar for QPolynomial {
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (e, c) in &rhs.coeffs {
            let entry = out.entry(*e).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                out.remove(e);
            }
        }
        Self { coeffs: out }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                let entry = out.entry(e1 + e2).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { coeffs: out }
    }

    fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    fn from_int(&self, n: &BigInt) -> Self {
        Self::constant(n.clone())
    }

    fn pow_u(&self, e: u64) -> Self {
        if e == 0 {
            return Self::constant(BigInt::one());
        }
        if self.coeffs.len() == 1 {
            let (exp, c) = self.coeffs.iter().next().unwrap();
            let mut cp = BigInt::one();
            let mut base = c.clone();
            let mut k = e;
            while k > 0 {
                if k & 1 == 1 {
                    cp *= &base;
                }
                base = &base * &base;
                k >>= 1;
            }
            return Self::monomial(cp, exp * e);
        }
        let mut acc = Self::constant(BigInt::one());
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = Scalar::mul(&acc, &base);
            }
            base = Scalar::mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn provably_zero(&self) -> std::result::Result<bool, ZeroUndecided> {
        Ok(self.is_zero())
    }
}

/// Exact expansions of P_n(q), Q_n(q) for n = 0..=N.
///
/// Degrees grow quadratically; `term_budget` caps the total stored term
/// count and fails loudly beyond it.
pub fn expand(
    spec: &FamilySpec,
    n_max: u64,
    term_budget: usize,
) -> Result<(Vec<QPolynomial>, Vec<QPolynomial>)> {
    let q = QPolynomial::monomial(BigInt::one(), 1);
    let mut eng = crate::family::RecurrenceEngine::new(spec, &q);
    let mut ps = Vec::with_capacity(n_max as usize + 1);
    let mut qs = Vec::with_capacity(n_max as usize + 1);
    ps.push(eng.state().p.clone());
    qs.push(eng.state().q.clone());
    let mut used: usize = ps[0].term_count() + qs[0].term_count();
    for _ in 0..n_max {
        let st = eng.advance()?;
        used += st.p.term_count() + st.q.term_count();
        if used > term_budget {
            return Err(QcfError::BudgetExceeded(format!(
                "expansion reached {used} stored terms at n={} (budget {term_budget})",
                st.n
            )));
        }
        ps.push(st.p.clone());
        qs.push(st.q.clone());
    }
    Ok((ps, qs))
}

/// Default expansion budget: 5·10⁵ stored terms.
pub const DEFAULT_TERM_BUDGET: usize = 500_000;

/// Per-index records (n, κ_n, ν_n, γ(n)).
#[derive(Clone, Debug)]
pub struct LipschitzTable {
    pub rows: Vec<LipschitzRow>,
}

#[derive(Clone, Debug)]
pub struct LipschitzRow {
    pub n: u64,
    pub kappa: BigInt,
    pub nu: BigInt,
    pub gamma: BigInt,
}

impl LipschitzTable {
    pub fn gamma(&self, n: u64) -> &BigInt {
        &self.rows[n as usize].gamma
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,kappa,nu,gamma\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.n, r.kappa, r.nu, r.gamma));
        }
        out
    }
}

fn delta_step(prev: &BigInt, weighted: BigInt) -> BigInt {
    weighted.max(BigInt::one()).max(prev + BigInt::one())
}

/// κ_n from Q_n, ν_n from P_n by the δ recursion with δ_{−1} = 0.
pub fn lipschitz_constants(spec: &FamilySpec, n_max: u64, term_budget: usize) -> Result<LipschitzTable> {
    let (ps, qs) = expand(spec, n_max, term_budget)?;
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    let mut kappa_prev = BigInt::zero();
    let mut nu_prev = BigInt::zero();
    for n in 0..=n_max {
        let kappa = delta_step(&kappa_prev, qs[n as usize].weighted_abs_sum());
        let nu = delta_step(&nu_prev, ps[n as usize].weighted_abs_sum());
        let gamma = kappa.clone().max(nu.clone());
        rows.push(LipschitzRow {
            n,
            kappa: kappa.clone(),
            nu: nu.clone(),
            gamma,
        });
        kappa_prev = kappa;
        nu_prev = nu;
    }
    Ok(LipschitzTable { rows })
}

/// Property-test hook: both Lipschitz inequalities at one (n, x, y) pair on
/// the unit circle at working precision.
pub fn lipschitz_check(
    spec: &FamilySpec,
    table: &LipschitzTable,
    n: u64,
    x: &BigComplex,
    y: &BigComplex,
) -> Result<bool> {
    let p = x.precision_bits().min(y.precision_bits());
    let sx = run_recurrence(spec, x, n)?;
    let sy = run_recurrence(spec, y, n)?;
    let dxy = x.sub(y).abs();
    let row = &table.rows[n as usize];
    let slack = crate::scalars::bigfloat_pow2(-(p as i64 / 2), p);
    let q_ok = {
        let lhs = sx[n as usize].q.sub(&sy[n as usize].q).abs();
        let rhs = crate::scalars::bf_from_bigint(&row.kappa, p)
            .mul(&dxy, p, crate::scalars::RM)
            .add(&slack, p, crate::scalars::RM);
        matches!(lhs.cmp(&rhs), Some(o) if o <= 0)
    };
    let p_ok = {
        let lhs = sx[n as usize].p.sub(&sy[n as usize].p).abs();
        let rhs = crate::scalars::bf_from_bigint(&row.nu, p)
            .mul(&dxy, p, crate::scalars::RM)
            .add(&slack, p, crate::scalars::RM);
        matches!(lhs.cmp(&rhs), Some(o) if o <= 0)
    };
    Ok(q_ok && p_ok)
}

/// A certified overestimate of log₂ γ(n), usable at indices far beyond any
/// expansion budget.
///
/// With A = max_s Σ|coeffs of f_s|, B the same over the g's and b₀, X the
/// largest x-exponent and E the largest q-exponent, the coefficient-sum
/// chain obeys s_n ≤ S₀·(A+B)ⁿ and deg ≤ n·(nX+E+X), so
/// κ_n, ν_n ≤ 2·S₀·(X+E+1)·n²·(A+B)ⁿ + n. Any e exceeding 2π·2^(this bound)
/// also exceeds 2πγ(n).
pub fn gamma_log2_upper_bound(spec: &FamilySpec, n: &BigInt) -> BigInt {
    let a: BigInt = spec
        .f
        .iter()
        .map(|p| p.coeff_abs_sum())
        .max()
        .unwrap_or_else(BigInt::one);
    let b: BigInt = spec
        .g
        .iter()
        .chain(std::iter::once(&spec.b0))
        .map(|p| p.coeff_abs_sum())
        .max()
        .unwrap_or_else(BigInt::one);
    let base = (&a + &b).max(BigInt::from(2));
    let bits_base = base.bits(); // 2^bits ≥ base+... base < 2^bits_base
    let s0 = BigInt::from(4); // covers the initial values of both chains
    let xe = BigInt::from((spec.max_x_exp() + spec.max_q_exp() + 1) as u64);
    // log2 bound: n·bits_base + 2·bits(n) + bits(S₀·(X+E+1)) + 2
    let nbits = BigInt::from(n.bits());
    n * BigInt::from(bits_base) + BigInt::from(2) * nbits + BigInt::from((s0 * xe).bits()) + 2
}

/// Exact γ where the expansion budget allows, certified overestimate beyond:
/// returns log₂ of a bound on γ(n) (exact mode returns ⌈log₂ γ(n)⌉ alongside
/// the exact value).
pub enum GammaBound {
    /// Exact table value γ(n).
    Exact(BigInt),
    /// Certified overestimate: γ(n) ≤ 2^bits.
    Log2(BigInt),
}

impl GammaBound {
    /// log₂ upper bound as a BigInt (exact values round up).
    pub fn log2_ceil(&self) -> BigInt {
        match self {
            GammaBound::Exact(g) => BigInt::from(g.bits()),
            GammaBound::Log2(b) => b.clone(),
        }
    }
}

pub fn gamma_bound(spec: &FamilySpec, n: &BigInt, expand_limit: u64, term_budget: usize) -> GammaBound {
    if let Some(nn) = n.to_u64() {
        if nn <= expand_limit {
            if let Ok(table) = lipschitz_constants(spec, nn, term_budget) {
                return GammaBound::Exact(table.rows[nn as usize].gamma.clone());
            }
        }
    }
    GammaBound::Log2(gamma_log2_upper_bound(spec, n))
}

/// Substituting a concrete q into the expansion reproduces the direct
/// recurrence — used by tests; exposed for the verification harness.
pub fn expansion_matches_recurrence(spec: &FamilySpec, n_max: u64, q: &BigRational) -> Result<bool> {
    let (ps, qs) = expand(spec, n_max, DEFAULT_TERM_BUDGET)?;
    let states = run_recurrence(spec, q, n_max)?;
    for (n, st) in states.iter().enumerate() {
        if ps[n].eval_scalar(q) != st.p || qs[n].eval_scalar(q) != st.q {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family_by_name;

    #[test]
    fn rr_small_expansions() {
        let rr = family_by_name("rr").unwrap();
        let (ps, qs) = expand(&rr, 3, 10_000).unwrap();
        // oracle: hand recurrence with b = 1, a_n = q^n:
        // P₁ = 1 + q, Q₂ = 1 + q², Q₃ = 1 + q² + q³
        let q = QPolynomial::monomial(BigInt::one(), 1);
        let one = QPolynomial::constant(BigInt::one());
        assert_eq!(ps[1], Scalar::add(&one, &q));
        assert_eq!(qs[2], Scalar::add(&one, &QPolynomial::monomial(BigInt::one(), 2)));
        let q2q3 = Scalar::add(
            &QPolynomial::monomial(BigInt::one(), 2),
            &QPolynomial::monomial(BigInt::one(), 3),
        );
        assert_eq!(qs[3], Scalar::add(&one, &q2q3));
    }

    #[test]
    fn rr_lipschitz_values() {
        // κ₀ = 1 (empty weighted sum, max(0,1,1)); κ₂ = 3, κ₃ = 5 by the
        // hand δ recursion
        let rr = family_by_name("rr").unwrap();
        let t = lipschitz_constants(&rr, 6, 10_000).unwrap();
        assert_eq!(t.rows[0].kappa, BigInt::from(1));
        assert_eq!(t.rows[2].kappa, BigInt::from(3));
        assert_eq!(t.rows[3].kappa, BigInt::from(5));
        // strict monotonicity and γ(n) ≥ n
        for w in t.rows.windows(2) {
            assert!(w[1].kappa > w[0].kappa);
            assert!(w[1].nu > w[0].nu);
        }
        for r in &t.rows {
            assert!(r.gamma >= BigInt::from(r.n));
        }
    }

    #[test]
    fn expansion_substitution_homomorphism() {
        for name in ["rr", "s1", "s2", "s3", "gg"] {
            let spec = family_by_name(name).unwrap();
            let q = BigRational::new(BigInt::from(2), BigInt::from(3));
            assert!(expansion_matches_recurrence(&spec, 14, &q).unwrap(), "{name}");
        }
    }

    #[test]
    fn budget_fails_loudly() {
        let rr = family_by_name("rr").unwrap();
        let err = expand(&rr, 200, 50).unwrap_err();
        assert!(matches!(err, QcfError::BudgetExceeded(_)));
    }

    #[test]
    fn gamma_upper_bound_dominates_exact() {
        let rr = family_by_name("rr").unwrap();
        let t = lipschitz_constants(&rr, 40, 100_000).unwrap();
        for n in [5u64, 17, 40] {
            let bound = gamma_log2_upper_bound(&rr, &BigInt::from(n));
            let exact_bits = BigInt::from(t.rows[n as usize].gamma.bits());
            assert!(bound >= exact_bits, "n={n}: {bound} < {exact_bits}");
        }
    }

    #[test]
    fn lipschitz_check_hand_case() {
        // n=3, x=1, y=−1: |Q₃(1)−Q₃(−1)| = 2 ≤ κ₃·|x−y| = 10
        let rr = family_by_name("rr").unwrap();
        let t = lipschitz_constants(&rr, 3, 10_000).unwrap();
        let x = BigComplex::from_i64(1, 0, 128);
        let y = BigComplex::from_i64(-1, 0, 128);
        assert!(lipschitz_check(&rr, &t, 3, &x, &y).unwrap());
        // x = y: both sides zero
        assert!(lipschitz_check(&rr, &t, 3, &x, &x).unwrap());
    }
}
