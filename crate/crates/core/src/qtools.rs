//! Shifted factorials, Gaussian polynomials (ordinary and primed),
//! q-multinomials and the infinite products that appear on product sides.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{int, Exponent, LaurentSeries};

/// Number of factors in a shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    Finite(i64),
    Infinite,
}

/// `(±q^start; q^step)_length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PochhammerSpec {
    pub start: Exponent,
    pub step: Exponent,
    pub length: Length,
    /// When set the factors are `(1 + q^e)` instead of `(1 - q^e)`.
    pub negated_base: bool,
}

impl PochhammerSpec {
    pub fn new(start: Exponent, step: Exponent, length: Length) -> Self {
        assert!(step > Exponent::zero(), "Pochhammer step must be positive");
        PochhammerSpec {
            start,
            step,
            length,
            negated_base: false,
        }
    }

    pub fn finite(start: Exponent, step: Exponent, n: i64) -> Self {
        Self::new(start, step, Length::Finite(n))
    }

    pub fn infinite(start: Exponent, step: Exponent) -> Self {
        Self::new(start, step, Length::Infinite)
    }

    /// Switches to `(-q^start; q^step)`.
    pub fn negated(mut self) -> Self {
        self.negated_base = true;
        self
    }

    fn sign(&self) -> i64 {
        if self.negated_base {
            1
        } else {
            -1
        }
    }
}

/// Evaluates a shifted factorial.
///
/// Finite non-negative lengths are exact when `bound` is `None`. Negative
/// lengths use `(a)_n = 1/(a q^n)_{-n}` and infinite lengths need a `bound`.
pub fn pochhammer(spec: &PochhammerSpec, bound: Option<Exponent>) -> Result<LaurentSeries> {
    let sign = spec.sign();
    match spec.length {
        Length::Finite(n) if n >= 0 => {
            let exps: Vec<Exponent> = (0..n).map(|j| spec.start + spec.step * int(j)).collect();
            finite_product(&exps, sign, bound)
        }
        Length::Finite(n) => {
            let bound = bound.ok_or_else(|| {
                Error::InvalidParameters("negative-length shifted factorial needs a bound".into())
            })?;
            let mut acc = LaurentSeries::one().truncate(bound);
            for j in 1..=-n {
                let e = spec.start - spec.step * int(j);
                acc = acc.div_binomial(e, sign, bound)?;
            }
            Ok(acc)
        }
        Length::Infinite => {
            let Some(bound) = bound.filter(|_| spec.start > Exponent::zero()) else {
                return Err(Error::NonTerminatingProduct {
                    start: spec.start,
                    step: spec.step,
                });
            };
            let mut exps = Vec::new();
            let mut e = spec.start;
            while e < bound {
                exps.push(e);
                e += spec.step;
            }
            finite_product(&exps, sign, Some(bound))
        }
    }
}

/// `∏ (1 + sign·q^e)` over the given exponents.
fn finite_product(exps: &[Exponent], sign: i64, bound: Option<Exponent>) -> Result<LaurentSeries> {
    if sign < 0 && exps.iter().any(|e| e.is_zero()) {
        return Ok(LaurentSeries::zero());
    }
    let Some(bound) = bound else {
        let mut acc = LaurentSeries::one();
        for e in exps {
            acc = acc.mul_binomial(*e, sign);
        }
        return Ok(acc);
    };
    // Factors with negative exponent lower the valuation; multiply them in
    // exactly and compensate in the bound used for the rest.
    let mut low = LaurentSeries::one();
    let mut shift = Exponent::zero();
    for e in exps.iter().filter(|e| **e <= Exponent::zero()) {
        low = low.mul_binomial(*e, sign);
        if *e < Exponent::zero() {
            shift += *e;
        }
    }
    let inner_bound = bound - shift;
    let mut acc = LaurentSeries::one().truncate(inner_bound);
    for e in exps
        .iter()
        .filter(|e| **e > Exponent::zero() && **e < inner_bound)
    {
        acc = acc.mul_binomial(*e, sign);
    }
    Ok((&low * &acc).truncate(bound))
}

/// `(q^c; q)_n`, exact for `n >= 0`.
pub fn qpoch(c: Exponent, n: i64) -> Result<LaurentSeries> {
    pochhammer(&PochhammerSpec::finite(c, int(1), n), None)
}

/// `(q)_n` for `n >= 0`, exact.
pub fn qfact(n: i64) -> LaurentSeries {
    assert!(n >= 0);
    qpoch(int(1), n).expect("non-negative length is exact")
}

/// `1/(q^c; q^step)_n` for `n >= 0`, known below `bound`.
pub fn inv_qpoch(c: Exponent, step: Exponent, n: i64, bound: Exponent) -> Result<LaurentSeries> {
    div_qpoch(&LaurentSeries::one(), c, step, n, bound)
}

/// `s/(q^c; q^step)_n` for `n >= 0`, known below `bound` (exact `s` stays
/// exact when `n = 0`).
pub fn div_qpoch(
    s: &LaurentSeries,
    c: Exponent,
    step: Exponent,
    n: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    if n == 0 {
        return Ok(s.clone());
    }
    let mut acc = s.truncate(bound);
    for j in 0..n {
        acc = acc.div_binomial(c + step * int(j), -1, bound)?;
    }
    Ok(acc)
}

/// `1/(q)_n` for `n >= 0` (or `1/(q)_∞` for `None`), known below `bound`.
pub fn inv_qfact(n: Option<i64>, bound: Exponent) -> Result<LaurentSeries> {
    match n {
        Some(n) => inv_qpoch(int(1), int(1), n, bound),
        None => {
            let last = bound.ceil().to_integer().max(0);
            inv_qpoch(int(1), int(1), last, bound)
        }
    }
}

/// `lim_{a→∞} a^{-n} (a)_n = (-1)^n q^{n(n-1)/2}`.
pub fn limit_shifted_factorial(n: i64) -> LaurentSeries {
    assert!(n >= 0);
    let s = if n % 2 == 0 { 1 } else { -1 };
    LaurentSeries::term(s, int(n * (n - 1) / 2))
}

type BinomCache = RwLock<HashMap<(i64, i64), LaurentSeries>>;

fn binom_cache() -> &'static BinomCache {
    static CACHE: OnceLock<BinomCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gaussian polynomial `[top; bottom]`: zero unless `0 <= bottom <= top`.
pub fn gauss_binom(top: i64, bottom: i64) -> LaurentSeries {
    if bottom < 0 || top - bottom < 0 {
        return LaurentSeries::zero();
    }
    let key = (top, bottom.min(top - bottom));
    if let Some(hit) = binom_cache().read().unwrap().get(&key) {
        return hit.clone();
    }
    let p = LaurentSeries::from_dense(1, 0, binom_coeffs(key.0, key.1), None);
    binom_cache().write().unwrap().insert(key, p.clone());
    p
}

/// Coefficients of `[top; s]` built from `∏_{j=1}^{s} (1 - q^{top-s+j})/(1 - q^j)`.
fn binom_coeffs(top: i64, s: i64) -> Vec<BigInt> {
    let other = (top - s) as usize;
    let mut p: Vec<BigInt> = vec![BigInt::from(1)];
    for j in 1..=s as usize {
        // multiply by (1 - q^{other + j})
        let shift = other + j;
        let mut next = vec![BigInt::zero(); p.len() + shift];
        for (t, c) in p.iter().enumerate() {
            next[t] += c;
            next[t + shift] -= c;
        }
        // divide by (1 - q^j): r_t = p_t + r_{t-j}
        let len = next.len() - j;
        let mut r = next;
        for t in j..r.len() {
            let prev = r[t - j].clone();
            r[t] += prev;
        }
        debug_assert!(r[len..].iter().all(|c| c.is_zero()));
        r.truncate(len);
        p = r;
    }
    p
}

/// Primed Gaussian polynomial with `m = top - bottom`, `n = bottom`:
/// `(q^{n+1})_m/(q)_m` for `m >= 0` and zero otherwise.
pub fn gauss_binom_primed(top: i64, bottom: i64) -> LaurentSeries {
    let (n, m) = (bottom, top - bottom);
    if m < 0 {
        return LaurentSeries::zero();
    }
    if n >= 0 {
        return gauss_binom(n + m, n);
    }
    if n + m >= 0 {
        // the numerator contains the factor (1 - q^0)
        return LaurentSeries::zero();
    }
    let sign = if m % 2 == 0 { 1 } else { -1 };
    gauss_binom(-n - 1, m)
        .shift(int(m * n + m * (m + 1) / 2))
        .scale(sign)
}

/// Lowest exponent of the primed Gaussian polynomial `[m+n; n]'`, or `None`
/// when it vanishes.
pub fn primed_min_exponent(n: i64, m: i64) -> Option<i64> {
    if m < 0 || (n < 0 && n + m >= 0) {
        return None;
    }
    if n >= 0 {
        return Some(0);
    }
    Some(m * n + m * (m + 1) / 2)
}

/// Base of a q-multinomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Q,
    InverseQ,
}

/// `(q)_k / ((q)_{v_1} ··· (q)_{v_{N-1}} (q)_{k - Σv})` in base `q` or `1/q`.
pub fn q_multinomial(k: i64, v: &[i64], base: Base) -> LaurentSeries {
    let rest = k - v.iter().sum::<i64>();
    if rest < 0 || v.iter().any(|&x| x < 0) {
        return LaurentSeries::zero();
    }
    let mut acc = LaurentSeries::one();
    let mut remaining = k;
    for &x in v {
        acc = &acc * &gauss_binom(remaining, x);
        remaining -= x;
    }
    match base {
        Base::Q => acc,
        Base::InverseQ => {
            // (q^{-1};q^{-1})_n = (-1)^n q^{-n(n+1)/2} (q)_n, factor by factor;
            // the signs cancel since the parts sum to k.
            let tri = |n: i64| n * (n + 1) / 2;
            let e = tri(k) - v.iter().map(|&x| tri(x)).sum::<i64>() - tri(rest);
            acc.shift(int(-e))
        }
    }
}

/// Degree of the base-q multinomial with parts `v` and `k - Σv`.
pub fn multinomial_degree(k: i64, v: &[i64]) -> i64 {
    let rest = k - v.iter().sum::<i64>();
    let sq: i64 = v.iter().map(|x| x * x).sum::<i64>() + rest * rest;
    (k * k - sq) / 2
}

/// Product `∏_{j>=1} (1 - q^j)^{-1}` over the `j` surviving every congruence
/// exclusion, optionally multiplied by extra shifted factorials.
#[derive(Clone, Debug, Default)]
pub struct ResidueProduct {
    conditions: Vec<(i64, Vec<i64>)>,
    extra: Vec<PochhammerSpec>,
}

impl ResidueProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Excludes every `j` with `j mod modulus` in `residues` (negative
    /// residues are reduced, so `±i` can be passed directly).
    pub fn exclude(mut self, modulus: i64, residues: &[i64]) -> Self {
        assert!(modulus > 0);
        let r = residues.iter().map(|x| x.rem_euclid(modulus)).collect();
        self.conditions.push((modulus, r));
        self
    }

    /// Multiplies the result by an (infinite) shifted factorial.
    pub fn times(mut self, spec: PochhammerSpec) -> Self {
        self.extra.push(spec);
        self
    }

    pub fn allows(&self, j: i64) -> bool {
        self.conditions
            .iter()
            .all(|(m, r)| !r.contains(&j.rem_euclid(*m)))
    }

    pub fn eval(&self, bound: Exponent) -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::one().truncate(bound);
        let top = bound.ceil().to_integer();
        for j in 1..top {
            if self.allows(j) {
                acc = acc.div_binomial(int(j), -1, bound)?;
            }
        }
        for spec in &self.extra {
            acc = &acc * &pochhammer(spec, Some(bound))?;
        }
        Ok(acc)
    }
}

/// `∏_{j>=1, j mod modulus ∉ excluded} (1 - q^j)^{-1}`.
pub fn residue_product(modulus: i64, excluded: &[i64], bound: Exponent) -> Result<LaurentSeries> {
    ResidueProduct::new().exclude(modulus, excluded).eval(bound)
}

/// True when every coefficient of an exact polynomial is non-negative.
pub fn has_nonnegative_coeffs(p: &LaurentSeries) -> bool {
    p.terms().all(|(_, c)| !c.is_negative())
}
