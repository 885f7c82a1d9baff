//! The fundamental recurrence P_n = b_n P_{n−1} + a_n P_{n−2} (same for Q)
//! with initial conditions P_{−1} = 1, Q_{−1} = 0, P₀ = b₀, Q₀ = 1.
//!
//! States carry (P_n, P_{n−1}, Q_n, Q_{n−1}) and the running product of
//! partial numerators; quotients are never formed inside the engine — Q_n
//! can vanish at roots of unity, so division happens only at presentation
//! time through the Moebius layer.

use num_bigint::BigInt;

use crate::error::{QcfError, Result};
use crate::scalars::{BigComplex, ProjectivePoint, Scalar};

use super::spec::FamilySpec;

/// Recurrence state at index n.
#[derive(Clone, Debug)]
pub struct ApproximantState<S> {
    pub n: u64,
    /// P_n
    pub p: S,
    /// P_{n−1}
    pub p_prev: S,
    /// Q_n
    pub q: S,
    /// Q_{n−1}
    pub q_prev: S,
    /// Π_{i=1..n} a_i
    pub a_prod: S,
    /// whether some a_i evaluated to exact zero so far
    pub any_a_zero: bool,
    /// whether some float-backend a_i fell below the zero window and the
    /// verdict was left undecided (escalate precision to resolve)
    pub any_a_undecided: bool,
}

impl<S: Scalar> ApproximantState<S> {
    /// P_n·Q_{n−1} − P_{n−1}·Q_n − (−1)^{n−1}·Π a_i; exactly zero when the
    /// determinant identity holds.
    pub fn determinant_residual(&self) -> S {
        let det = self.p.mul(&self.q_prev).sub(&self.p_prev.mul(&self.q));
        let signed = if self.n % 2 == 1 {
            self.a_prod.clone()
        } else {
            self.a_prod.neg()
        };
        det.sub(&signed)
    }
}

/// Streaming evaluator of the recurrence; `advance` moves one index forward.
pub struct RecurrenceEngine<'a, S: Scalar> {
    spec: &'a FamilySpec,
    q_powers: Vec<S>,
    xpow_a: S,
    xpow_b: S,
    state: ApproximantState<S>,
}

impl<'a, S: Scalar> RecurrenceEngine<'a, S> {
    pub fn new(spec: &'a FamilySpec, q: &S) -> Self {
        let one = q.from_int(&BigInt::from(1));
        let zero = q.from_int(&BigInt::from(0));
        // always keep q itself at index 1: the x-power updates need it even
        // when every coefficient polynomial is q-free
        let top = spec.max_q_exp().max(1) as usize;
        let mut q_powers = Vec::with_capacity(top + 1);
        q_powers.push(one.clone());
        for i in 1..=top {
            q_powers.push(q_powers[i - 1].mul(q));
        }
        let b0 = spec.b0.eval(&q_powers, &one);
        let state = ApproximantState {
            n: 0,
            p: b0,
            p_prev: one.clone(),
            q: one.clone(),
            q_prev: zero,
            a_prod: one.clone(),
            any_a_zero: false,
            any_a_undecided: false,
        };
        Self {
            spec,
            q_powers,
            xpow_a: one.clone(),
            xpow_b: one,
            state,
        }
    }

    pub fn state(&self) -> &ApproximantState<S> {
        &self.state
    }

    /// Advance to index n+1. A float-backend a_n below the zero window is
    /// recorded as undecided on the state rather than called zero; callers
    /// that need certainty escalate precision (see `run_recurrence_certified`).
    pub fn advance(&mut self) -> Result<&ApproximantState<S>> {
        let q = &self.q_powers[1];
        let n = self.state.n + 1;
        let k = self.spec.k as u64;
        let np = (n - 1) / k;
        let sp = (n - np * k) as usize;
        if n > 1 && (n - 1) % k == 0 {
            // block boundary for the a-side: n' incremented
            self.xpow_a = self.xpow_a.mul(q);
        }
        if n % k == 0 {
            // b_n's block index ⌊n/k⌋ incremented
            self.xpow_b = self.xpow_b.mul(q);
        }
        let a_n = self.spec.f[sp - 1].eval(&self.q_powers, &self.xpow_a);
        let b_n = self.spec.g[(n % k) as usize].eval(&self.q_powers, &self.xpow_b);

        let (a_zero, a_undecided) = match a_n.provably_zero() {
            Ok(z) => (z, false),
            Err(_) => (false, true),
        };

        let p_new = b_n.mul(&self.state.p).add(&a_n.mul(&self.state.p_prev));
        let q_new = b_n.mul(&self.state.q).add(&a_n.mul(&self.state.q_prev));
        self.state = ApproximantState {
            n,
            p_prev: std::mem::replace(&mut self.state.p, p_new.clone()),
            p: p_new,
            q_prev: std::mem::replace(&mut self.state.q, q_new.clone()),
            q: q_new,
            a_prod: self.state.a_prod.mul(&a_n),
            any_a_zero: self.state.any_a_zero || a_zero,
            any_a_undecided: self.state.any_a_undecided || a_undecided,
        };
        Ok(&self.state)
    }

    /// Run to index `target`, returning the final state.
    pub fn run_to(&mut self, target: u64) -> Result<&ApproximantState<S>> {
        while self.state.n < target {
            self.advance()?;
        }
        Ok(&self.state)
    }
}

/// All states for n = 0..=N (collecting; use `RecurrenceEngine` directly for
/// long streaming runs).
pub fn run_recurrence<S: Scalar>(
    spec: &FamilySpec,
    q: &S,
    n_max: u64,
) -> Result<Vec<ApproximantState<S>>> {
    let mut eng = RecurrenceEngine::new(spec, q);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(eng.state().clone());
    for _ in 0..n_max {
        out.push(eng.advance()?.clone());
    }
    Ok(out)
}

/// Float-backend run that escalates the working precision until no a_n zero
/// test is left undecided, erring with `PrecisionExhausted` at `max_bits`.
pub fn run_recurrence_certified(
    spec: &FamilySpec,
    q_at: impl Fn(usize) -> BigComplex,
    n_max: u64,
    start_bits: usize,
    max_bits: usize,
) -> Result<Vec<ApproximantState<BigComplex>>> {
    let mut p = start_bits;
    loop {
        let states = run_recurrence(spec, &q_at(p), n_max)?;
        if !states.last().map(|s| s.any_a_undecided).unwrap_or(false) {
            return Ok(states);
        }
        p *= 2;
        if p > max_bits {
            return Err(QcfError::PrecisionExhausted(format!(
                "a_n zero tests undecided up to {max_bits} bits"
            )));
        }
    }
}

/// S_n(w) = (P_n + w·P_{n−1}) / (Q_n + w·Q_{n−1}) with projective
/// conventions.
pub fn moebius_apply(
    state: &ApproximantState<BigComplex>,
    w: &ProjectivePoint,
) -> Result<ProjectivePoint> {
    let (num, den) = match w {
        ProjectivePoint::Infinity => (state.p_prev.clone(), state.q_prev.clone()),
        ProjectivePoint::Finite(w) => (
            state.p.add(&w.mul(&state.p_prev)),
            state.q.add(&w.mul(&state.q_prev)),
        ),
    };
    if den.is_zero() {
        if num.is_zero() {
            return Err(QcfError::Indeterminate);
        }
        return Ok(ProjectivePoint::Infinity);
    }
    Ok(ProjectivePoint::finite(num.div(&den)))
}

/// The unique v with S_n(v) = g (valid while the determinant invariant is
/// nonzero).
pub fn moebius_invert(
    state: &ApproximantState<BigComplex>,
    g: &ProjectivePoint,
) -> Result<ProjectivePoint> {
    match g {
        ProjectivePoint::Infinity => {
            // pole preimage: v = −Q_n/Q_{n−1}
            if state.q_prev.is_zero() {
                if state.q.is_zero() {
                    return Err(QcfError::Indeterminate);
                }
                return Ok(ProjectivePoint::Infinity);
            }
            Ok(ProjectivePoint::finite(state.q.div(&state.q_prev).neg()))
        }
        ProjectivePoint::Finite(g) => {
            let num = g.mul(&state.q).sub(&state.p);
            let den = state.p_prev.sub(&g.mul(&state.q_prev));
            if den.is_zero() {
                if num.is_zero() {
                    return Err(QcfError::Indeterminate);
                }
                return Ok(ProjectivePoint::Infinity);
            }
            Ok(ProjectivePoint::finite(num.div(&den)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::spec::{builtin_families, family_by_name};
    use crate::scalars::chordal_distance;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    #[test]
    fn rr_first_step_symbolic_shape() {
        // P₁ = 1 + q, Q₁ = 1 — probe at two rational points pins the line
        let rr = family_by_name("rr").unwrap();
        for qv in [2i64, 7] {
            let q = BigRational::from_integer(BigInt::from(qv));
            let states = run_recurrence(&rr, &q, 1).unwrap();
            assert_eq!(states[1].p, &q + BigRational::one());
            assert!(states[1].q.is_one());
        }
    }

    #[test]
    fn rr_at_one_gives_fibonacci_ratios() {
        // oracle: brute-force Fibonacci recurrence
        let rr = family_by_name("rr").unwrap();
        let q = BigRational::one();
        let states = run_recurrence(&rr, &q, 10).unwrap();
        let mut fib = vec![BigInt::from(1), BigInt::from(1)];
        for i in 2..14 {
            let next = &fib[i - 1] + &fib[i - 2];
            fib.push(next);
        }
        // P_n = F_{n+2}, Q_n = F_{n+1}
        for (n, st) in states.iter().enumerate() {
            assert_eq!(st.p, BigRational::from_integer(fib[n + 1].clone()));
            assert_eq!(st.q, BigRational::from_integer(fib[n].clone()));
        }
        assert_eq!(
            states[10].p.clone() / states[10].q.clone(),
            BigRational::new(BigInt::from(144), BigInt::from(89))
        );
    }

    #[test]
    fn determinant_invariant_exact() {
        for spec in builtin_families() {
            let q = BigRational::new(BigInt::from(3), BigInt::from(7));
            let states = run_recurrence(&spec, &q, 12).unwrap();
            for st in &states {
                assert!(
                    st.determinant_residual().is_zero(),
                    "{} at n={}",
                    spec.name,
                    st.n
                );
            }
        }
    }

    #[test]
    fn worpitzky_region_convergence() {
        // |q| = 1/5 keeps |a_n| ≤ 1/4 for the Rogers-Ramanujan family: the
        // approximants are Cauchy and the tail K_{n≥1}(a_n/1) stays in
        // |w| < 1/2
        let rr = family_by_name("rr").unwrap();
        let q = BigComplex::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(5)), 192);
        let states = run_recurrence(&rr, &q, 60).unwrap();
        let val = |st: &ApproximantState<BigComplex>| st.p.div(&st.q);
        let late = val(&states[60]);
        for n in 50..60 {
            let d = val(&states[n]).sub(&late).abs();
            assert!(
                matches!(d.cmp(&crate::scalars::bigfloat_pow2(-40, 192)), Some(o) if o < 0),
                "approximants not Cauchy at n={n}"
            );
        }
        // tail: drop b₀ = 1 — tail value w satisfies G = 1 + w
        let one = BigComplex::one(192);
        for n in 2..=60 {
            let w = val(&states[n]).sub(&one);
            let half = astro_float::BigFloat::from_f64(0.5, 192);
            assert!(
                matches!(w.abs().cmp(&half), Some(o) if o < 0),
                "tail approximant left |w| < 1/2 at n={n}"
            );
        }
    }

    #[test]
    fn moebius_special_points() {
        let rr = family_by_name("rr").unwrap();
        let q = BigComplex::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(3)), 160);
        let states = run_recurrence(&rr, &q, 8).unwrap();
        let st = &states[8];
        // w = 0 → P_n/Q_n
        let at0 = moebius_apply(st, &ProjectivePoint::finite(BigComplex::zero(160))).unwrap();
        let classical = st.p.div(&st.q);
        assert!(at0.as_finite().unwrap().sub(&classical).abs().is_zero() || {
            let d = at0.as_finite().unwrap().sub(&classical).abs();
            matches!(d.cmp(&crate::scalars::bigfloat_pow2(-120, 160)), Some(o) if o < 0)
        });
        // w = ∞ → P_{n−1}/Q_{n−1}
        let atinf = moebius_apply(st, &ProjectivePoint::Infinity).unwrap();
        let prev = st.p_prev.div(&st.q_prev);
        assert!(
            matches!(atinf.as_finite().unwrap().sub(&prev).abs().cmp(&crate::scalars::bigfloat_pow2(-120, 160)), Some(o) if o < 0)
        );
        // w = −Q_n/Q_{n−1} → ∞
        let pole = st.q.div(&st.q_prev).neg();
        let atpole = moebius_apply(st, &ProjectivePoint::finite(pole.clone())).unwrap();
        // numerically the denominator is ~0; chordal distance to ∞ is tiny
        let d = chordal_distance(&atpole, &ProjectivePoint::Infinity, 160);
        assert!(matches!(d.cmp(&astro_float::BigFloat::from_f64(1e-20, 160)), Some(o) if o < 0));
        // inversion round-trips
        let g = moebius_apply(st, &ProjectivePoint::finite(BigComplex::from_i64(2, 1, 160))).unwrap();
        let v = moebius_invert(st, &g).unwrap();
        let d2 = v
            .as_finite()
            .unwrap()
            .sub(&BigComplex::from_i64(2, 1, 160))
            .abs();
        assert!(matches!(d2.cmp(&crate::scalars::bigfloat_pow2(-100, 160)), Some(o) if o < 0));
    }
}
