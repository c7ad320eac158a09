//! Truncated Laurent series in fractional powers of `q` with exact integer
//! coefficients.
//!
//! A series lives on the grid `(1/D)·Z`: the coefficient `coeffs[j]` belongs to
//! `q^((lo + j)/D)`. A series is either *exact* (a finite Laurent polynomial,
//! `order == None`) or *truncated*, in which case every coefficient of
//! `q^(e/D)` with `e >= order` is unknown.
//!
//! Values are kept in canonical form: no leading or trailing zero
//! coefficients, and `D` is the smallest denominator that represents every
//! nonzero exponent and the truncation order. Structural equality is therefore
//! semantic equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational exponent of `q`.
pub type Exponent = Rational64;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Exponent {
    Rational64::new(n, d)
}

/// Shorthand for the integer exponent `n`.
pub fn int(n: i64) -> Exponent {
    Rational64::from_integer(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    denom: i64,
    lo: i64,
    coeffs: Vec<BigInt>,
    order: Option<i64>,
}

/// First exponent at which two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub exponent: Exponent,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^({}) lhs={} rhs={}", self.exponent, self.lhs, self.rhs)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Smallest integer `>= x`, for positive grid scaling.
fn ceil_on_grid(x: Exponent, grid: i64) -> i64 {
    let scaled = x * int(grid);
    scaled.ceil().to_integer()
}

fn to_small(c: &BigInt) -> Option<i64> {
    c.to_i64()
}

impl LaurentSeries {
    // ------------------------------------------------------------------
    // construction
    // ------------------------------------------------------------------

    /// Builds a series from a dense window and canonicalizes it.
    ///
    /// `coeffs[j]` is the coefficient of `q^((lo + j)/denom)`; `order` is the
    /// truncation numerator on the same grid (`None` for exact).
    pub fn from_dense(denom: i64, lo: i64, coeffs: Vec<BigInt>, order: Option<i64>) -> Self {
        assert!(denom >= 1, "grid denominator must be positive");
        let mut s = LaurentSeries {
            denom,
            lo,
            coeffs,
            order,
        };
        s.canonicalize();
        s
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        LaurentSeries {
            denom: 1,
            lo: 0,
            coeffs: Vec::new(),
            order: None,
        }
    }

    /// `O(q^order)`: nothing known below `order` except that it vanishes.
    pub fn zero_to(order: Exponent) -> Self {
        Self::from_dense(*order.denom(), 0, Vec::new(), Some(*order.numer()))
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 1)
    }

    /// `c·q^(e/D)`, exact.
    pub fn monomial(c: impl Into<BigInt>, e: i64, denom: i64) -> Self {
        Self::from_dense(denom, e, vec![c.into()], None)
    }

    /// `c·q^e` for a rational exponent.
    pub fn term(c: impl Into<BigInt>, e: Exponent) -> Self {
        Self::monomial(c, *e.numer(), *e.denom())
    }

    /// `q^e`.
    pub fn q_pow(e: Exponent) -> Self {
        Self::term(1, e)
    }

    /// Exact integer-exponent polynomial `c[0] + c[1] q + ...`.
    pub fn from_ints(c: &[i64]) -> Self {
        Self::from_dense(1, 0, c.iter().map(|&x| BigInt::from(x)).collect(), None)
    }

    /// Builds an exact series from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let terms: Vec<(Exponent, BigInt)> =
            terms.into_iter().map(|(e, c)| (e, c.into())).collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let denom = terms.iter().fold(1i64, |d, (e, _)| lcm(d, *e.denom()));
        let nums: Vec<i64> = terms
            .iter()
            .map(|(e, _)| (e * int(denom)).to_integer())
            .collect();
        let lo = *nums.iter().min().unwrap();
        let hi = *nums.iter().max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (n, (_, c)) in nums.iter().zip(terms) {
            coeffs[(n - lo) as usize] += c;
        }
        Self::from_dense(denom, lo, coeffs, None)
    }

    fn canonicalize(&mut self) {
        if let Some(o) = self.order {
            let keep = (o - self.lo).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.lo += k as i64;
            }
        }
        if self.denom == 1 {
            return;
        }
        let mut g = self.denom;
        if let Some(o) = self.order {
            g = g.gcd(&o);
        }
        if !self.coeffs.is_empty() {
            g = g.gcd(&self.lo);
            for (j, c) in self.coeffs.iter().enumerate() {
                if g == 1 {
                    break;
                }
                if !c.is_zero() {
                    g = g.gcd(&(j as i64));
                }
            }
        }
        if g > 1 {
            self.denom /= g;
            self.lo /= g;
            if let Some(o) = self.order.as_mut() {
                *o /= g;
            }
            let stride = g as usize;
            self.coeffs = self.coeffs.iter().step_by(stride).cloned().collect();
        }
    }

    // ------------------------------------------------------------------
    // inspection
    // ------------------------------------------------------------------

    /// Canonical grid denominator `D`.
    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Truncation bound, `None` when the series is exact.
    pub fn order(&self) -> Option<Exponent> {
        self.order.map(|o| rat(o, self.denom))
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    /// True when no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exponent> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(rat(self.lo, self.denom))
        }
    }

    /// Lower bound for the exponents this series can carry: the valuation, or
    /// the order for a truncated zero. `None` for the exact zero.
    pub fn min_exponent(&self) -> Option<Exponent> {
        self.valuation().or_else(|| self.order())
    }

    /// Highest exponent carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<Exponent> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(rat(self.lo + self.coeffs.len() as i64 - 1, self.denom))
        }
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        let (lo, d) = (self.lo, self.denom);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(j, c)| (rat(lo + j as i64, d), c))
    }

    /// Number of nonzero terms.
    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Coefficient of `q^e`.
    pub fn coeff_at(&self, e: Exponent) -> Result<BigInt> {
        if let Some(o) = self.order() {
            if e >= o {
                return Err(Error::OrderExceeded {
                    requested: e,
                    available: o,
                });
            }
        }
        let scaled = e * int(self.denom);
        if !scaled.is_integer() {
            return Ok(BigInt::zero());
        }
        let idx = scaled.to_integer() - self.lo;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            return Ok(BigInt::zero());
        }
        Ok(self.coeffs[idx as usize].clone())
    }

    /// Compares the coefficients of all exponents `< bound`.
    ///
    /// `Ok(None)` means the windows agree; `Ok(Some(m))` reports the lowest
    /// differing exponent. Fails with `OrderExceeded` when `bound` lies beyond
    /// either series' known window.
    pub fn eq_up_to(&self, other: &Self, bound: Exponent) -> Result<Option<Mismatch>> {
        for s in [self, other] {
            if let Some(o) = s.order() {
                if bound > o {
                    return Err(Error::OrderExceeded {
                        requested: bound,
                        available: o,
                    });
                }
            }
        }
        let mut a = self.terms().take_while(|(e, _)| *e < bound).peekable();
        let mut b = other.terms().take_while(|(e, _)| *e < bound).peekable();
        let zero = BigInt::zero();
        loop {
            let (ea, eb) = (a.peek().map(|t| t.0), b.peek().map(|t| t.0));
            let (e, ca, cb) = match (ea, eb) {
                (None, None) => return Ok(None),
                (Some(x), None) => (x, a.next().unwrap().1, &zero),
                (None, Some(y)) => (y, &zero, b.next().unwrap().1),
                (Some(x), Some(y)) if x < y => (x, a.next().unwrap().1, &zero),
                (Some(x), Some(y)) if y < x => (y, &zero, b.next().unwrap().1),
                (Some(x), Some(_)) => (x, a.next().unwrap().1, b.next().unwrap().1),
            };
            if ca != cb {
                return Ok(Some(Mismatch {
                    exponent: e,
                    lhs: ca.clone(),
                    rhs: cb.clone(),
                }));
            }
        }
    }

    /// Boolean form of [`eq_up_to`](Self::eq_up_to).
    pub fn agrees_up_to(&self, other: &Self, bound: Exponent) -> Result<bool> {
        Ok(self.eq_up_to(other, bound)?.is_none())
    }

    // ------------------------------------------------------------------
    // grid helpers
    // ------------------------------------------------------------------

    fn order_on(&self, grid: i64) -> Option<i64> {
        self.order.map(|o| o * (grid / self.denom))
    }

    /// Nonzero terms as `(numerator on grid, coefficient)`.
    fn terms_on(&self, grid: i64) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        let f = grid / self.denom;
        let lo = self.lo;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(j, c)| ((lo + j as i64) * f, c))
    }

    /// Dense window of this series rescaled to `grid` (a multiple of `denom`).
    fn dense_on(&self, grid: i64) -> (i64, Vec<BigInt>) {
        let f = grid / self.denom;
        if f == 1 {
            return (self.lo, self.coeffs.clone());
        }
        if self.coeffs.is_empty() {
            return (0, Vec::new());
        }
        let len = (self.coeffs.len() - 1) * f as usize + 1;
        let mut out = vec![BigInt::zero(); len];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * f as usize] = c.clone();
        }
        (self.lo * f, out)
    }

    // ------------------------------------------------------------------
    // arithmetic
    // ------------------------------------------------------------------

    /// Forgets every coefficient at exponents `>= bound`.
    pub fn truncate(&self, bound: Exponent) -> Self {
        let grid = lcm(self.denom, *bound.denom());
        let b = (bound * int(grid)).to_integer();
        let order = Some(self.order_on(grid).map_or(b, |o| o.min(b)));
        let (lo, coeffs) = self.dense_on(grid);
        Self::from_dense(grid, lo, coeffs, order)
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        if k.is_zero() {
            return match self.order() {
                None => Self::zero(),
                Some(_) => Self::from_dense(self.denom, 0, Vec::new(), self.order),
            };
        }
        let coeffs = self.coeffs.iter().map(|c| c * &k).collect();
        Self::from_dense(self.denom, self.lo, coeffs, self.order)
    }

    /// Multiplies by `q^e` (exact shift, order shifts along).
    pub fn shift(&self, e: Exponent) -> Self {
        let grid = lcm(self.denom, *e.denom());
        let s = (e * int(grid)).to_integer();
        let (lo, coeffs) = self.dense_on(grid);
        let lo = if coeffs.is_empty() { 0 } else { lo + s };
        Self::from_dense(grid, lo, coeffs, self.order_on(grid).map(|o| o + s))
    }

    /// Multiplies by `(1 + sign·q^e)`.
    pub fn mul_binomial(&self, e: Exponent, sign: i64) -> Self {
        let t = self.shift(e);
        if sign >= 0 {
            self + &t
        } else {
            self - &t
        }
    }

    /// Divides by `(1 + sign·q^e)` with `sign = ±1`, expanding in ascending
    /// powers of `q`; the result is known below `bound` (and below this
    /// series' own order).
    pub fn div_binomial(&self, e: Exponent, sign: i64, bound: Exponent) -> Result<Self> {
        debug_assert!(sign == 1 || sign == -1);
        if e.is_zero() {
            return Err(Error::NonUnitLeadingCoefficient);
        }
        if e < Exponent::zero() {
            // 1/(1 + s q^e) = s q^{-e} / (1 + s q^{-e})
            let flipped = self.shift(-e).scale(sign);
            return flipped.div_binomial(-e, sign, bound);
        }
        let grid = lcm(lcm(self.denom, *e.denom()), *bound.denom());
        let step = (e * int(grid)).to_integer() as usize;
        let mut order = (bound * int(grid)).to_integer();
        if let Some(o) = self.order_on(grid) {
            order = order.min(o);
        }
        if self.coeffs.is_empty() {
            return Ok(Self::from_dense(grid, 0, Vec::new(), self.order_on(grid)));
        }
        let (lo, mut c) = self.dense_on(grid);
        let len = (order - lo).max(0) as usize;
        c.resize(len.max(c.len()), BigInt::zero());
        c.truncate(len);
        if let Some(small) = small_vec(&c) {
            let mut v = small;
            let mut ok = true;
            for t in step..v.len() {
                let prev = v[t - step];
                let next = if sign > 0 {
                    v[t].checked_sub(prev)
                } else {
                    v[t].checked_add(prev)
                };
                match next {
                    Some(x) => v[t] = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let coeffs = v.into_iter().map(BigInt::from).collect();
                return Ok(Self::from_dense(grid, lo, coeffs, Some(order)));
            }
        }
        for t in step..c.len() {
            let prev = c[t - step].clone();
            if sign > 0 {
                c[t] -= prev;
            } else {
                c[t] += prev;
            }
        }
        Ok(Self::from_dense(grid, lo, c, Some(order)))
    }

    /// Multiplicative inverse, known below `bound` (and below what this
    /// series' own truncation permits).
    ///
    /// Requires the lowest coefficient to be `±1`.
    pub fn invert(&self, bound: Exponent) -> Result<Self> {
        let lead = self
            .coeffs
            .first()
            .ok_or(Error::NonUnitLeadingCoefficient)?;
        let unit: i64 = if lead.is_one() {
            1
        } else if (-lead).is_one() {
            -1
        } else {
            return Err(Error::NonUnitLeadingCoefficient);
        };
        let v = self.valuation().unwrap();
        let mut out_order = bound;
        if let Some(o) = self.order() {
            out_order = out_order.min(o - v - v);
        }
        let grid = lcm(self.denom, *out_order.denom());
        let f = grid / self.denom;
        let n_terms = ceil_on_grid(out_order + v, grid).max(0) as usize;
        // normalized a' = a / (unit q^v): a'_0 = 1
        let tail: Vec<(usize, BigInt)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j * f as usize, c * unit))
            .filter(|(j, _)| *j < n_terms)
            .collect();
        let mut w: Vec<BigInt> = Vec::with_capacity(n_terms);
        let small_tail: Option<Vec<(usize, i128)>> = tail
            .iter()
            .map(|(j, c)| to_small(c).map(|x| (*j, x as i128)))
            .collect();
        let mut done = false;
        if let Some(st) = small_tail {
            let mut ws: Vec<i128> = Vec::with_capacity(n_terms);
            let mut ok = true;
            'outer: for t in 0..n_terms {
                let mut acc: i128 = if t == 0 { 1 } else { 0 };
                for &(j, a) in &st {
                    if j > t {
                        break;
                    }
                    let prod = match a.checked_mul(ws[t - j]) {
                        Some(p) => p,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    };
                    acc = match acc.checked_sub(prod) {
                        Some(x) => x,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    };
                }
                if acc.unsigned_abs() > (1u128 << 100) {
                    ok = false;
                    break;
                }
                ws.push(acc);
            }
            if ok {
                w = ws.into_iter().map(|x| BigInt::from(x) * unit).collect();
                done = true;
            }
        }
        if !done {
            w.clear();
            for t in 0..n_terms {
                let mut acc = if t == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
                for (j, a) in &tail {
                    if *j > t {
                        break;
                    }
                    acc -= a * &w[t - j];
                }
                w.push(acc);
            }
            for c in w.iter_mut() {
                *c *= unit;
            }
        }
        let lo = (-v * int(grid)).to_integer();
        let order = (out_order * int(grid)).to_integer();
        Ok(Self::from_dense(grid, lo, w, Some(order)))
    }

    /// Formal substitution `q -> q^s` for a positive rational `s`.
    pub fn substitute_power(&self, s: Exponent) -> Result<Self> {
        if s <= Exponent::zero() {
            return Err(Error::InvalidParameters(format!(
                "substitution power must be positive, got {s}"
            )));
        }
        let (a, b) = (*s.numer(), *s.denom());
        let grid = self.denom * b;
        let order = self.order.map(|o| o * a);
        if self.coeffs.is_empty() {
            return Ok(Self::from_dense(grid, 0, Vec::new(), order));
        }
        let len = (self.coeffs.len() - 1) * a as usize + 1;
        let mut c = vec![BigInt::zero(); len];
        for (j, x) in self.coeffs.iter().enumerate() {
            c[j * a as usize] = x.clone();
        }
        Ok(Self::from_dense(grid, self.lo * a, c, order))
    }

    /// `q -> q^{-1}` for an exact Laurent polynomial.
    pub fn reflect(&self) -> Result<Self> {
        if !self.is_exact() {
            return Err(Error::InvalidParameters(
                "q -> 1/q needs an exact Laurent polynomial".into(),
            ));
        }
        if self.coeffs.is_empty() {
            return Ok(Self::zero());
        }
        let hi = self.lo + self.coeffs.len() as i64 - 1;
        let c: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        Ok(Self::from_dense(self.denom, -hi, c, None))
    }

    /// Sum of many series in one pass.
    pub fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a LaurentSeries>,
    {
        let items: Vec<&LaurentSeries> = items.into_iter().collect();
        if items.is_empty() {
            return Self::zero();
        }
        let grid = items.iter().fold(1, |g, s| lcm(g, s.denom));
        let order = items.iter().filter_map(|s| s.order_on(grid)).min();
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for s in &items {
            if let Some((e, _)) = s.terms_on(grid).next() {
                lo = lo.min(e);
                let top = (s.lo + s.coeffs.len() as i64 - 1) * (grid / s.denom);
                hi = hi.max(top);
            }
        }
        if lo > hi {
            return Self::from_dense(grid, 0, Vec::new(), order);
        }
        if let Some(o) = order {
            hi = hi.min(o - 1);
        }
        if lo > hi {
            return Self::from_dense(grid, 0, Vec::new(), order);
        }
        let mut acc = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for s in &items {
            for (e, c) in s.terms_on(grid) {
                if e > hi {
                    break;
                }
                acc[(e - lo) as usize] += c;
            }
        }
        Self::from_dense(grid, lo, acc, order)
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let grid = lcm(self.denom, other.denom);
        let order = match (self.order_on(grid), other.order_on(grid)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let (la, ca) = self.dense_on(grid);
        let (lb, cb) = other.dense_on(grid);
        if ca.is_empty() && cb.is_empty() {
            return Self::from_dense(grid, 0, Vec::new(), order);
        }
        let lo = match (ca.is_empty(), cb.is_empty()) {
            (true, _) => lb,
            (_, true) => la,
            _ => la.min(lb),
        };
        let hi_a = la + ca.len() as i64;
        let hi_b = lb + cb.len() as i64;
        let mut hi = match (ca.is_empty(), cb.is_empty()) {
            (true, _) => hi_b,
            (_, true) => hi_a,
            _ => hi_a.max(hi_b),
        };
        if let Some(o) = order {
            hi = hi.min(o.max(lo));
        }
        let mut out = vec![BigInt::zero(); (hi - lo) as usize];
        for (j, c) in ca.into_iter().enumerate() {
            let idx = la + j as i64 - lo;
            if idx < out.len() as i64 {
                out[idx as usize] += c;
            }
        }
        for (j, c) in cb.into_iter().enumerate() {
            let idx = lb + j as i64 - lo;
            if idx < out.len() as i64 {
                if negate_other {
                    out[idx as usize] -= c;
                } else {
                    out[idx as usize] += c;
                }
            }
        }
        Self::from_dense(grid, lo, out, order)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let grid = lcm(self.denom, other.denom);
        let (a_exact_zero, b_exact_zero) = (
            self.coeffs.is_empty() && self.order.is_none(),
            other.coeffs.is_empty() && other.order.is_none(),
        );
        if a_exact_zero || b_exact_zero {
            return Self::zero();
        }
        let va = self.terms_on(grid).next().map(|t| t.0);
        let vb = other.terms_on(grid).next().map(|t| t.0);
        let oa = self.order_on(grid);
        let ob = other.order_on(grid);
        let va_eff = va.or(oa).unwrap();
        let vb_eff = vb.or(ob).unwrap();
        let order = [oa.map(|o| o + vb_eff), ob.map(|o| o + va_eff)]
            .into_iter()
            .flatten()
            .min();
        let (Some(va), Some(vb)) = (va, vb) else {
            return Self::from_dense(grid, 0, Vec::new(), order);
        };
        let limit = order.unwrap_or(i64::MAX);
        let ta: Vec<(i64, &BigInt)> = self
            .terms_on(grid)
            .take_while(|t| t.0 + vb < limit)
            .collect();
        let tb: Vec<(i64, &BigInt)> = other
            .terms_on(grid)
            .take_while(|t| t.0 + va < limit)
            .collect();
        let lo = va + vb;
        let hi_a = ta.last().map_or(va, |t| t.0);
        let hi_b = tb.last().map_or(vb, |t| t.0);
        let hi = (hi_a + hi_b).min(limit - 1);
        if hi < lo {
            return Self::from_dense(grid, 0, Vec::new(), order);
        }
        let len = (hi - lo + 1) as usize;
        let coeffs = mul_kernel(&ta, &tb, lo, len);
        Self::from_dense(grid, lo, coeffs, order)
    }
}

fn small_vec(c: &[BigInt]) -> Option<Vec<i128>> {
    const CAP: i128 = 1 << 100;
    c.iter()
        .map(|x| to_small(x).map(|v| v as i128).filter(|v| v.abs() < CAP))
        .collect()
}

/// Sparse-by-dense Cauchy product on a shared grid.
///
/// Uses `i128` accumulation when every coefficient fits in `i64` and the
/// worst-case sum cannot overflow; otherwise falls back to big integers.
fn mul_kernel(ta: &[(i64, &BigInt)], tb: &[(i64, &BigInt)], lo: i64, len: usize) -> Vec<BigInt> {
    let (short, long) = if ta.len() <= tb.len() {
        (ta, tb)
    } else {
        (tb, ta)
    };
    let sa: Option<Vec<(i64, i64)>> = short
        .iter()
        .map(|(e, c)| to_small(c).map(|v| (*e, v)))
        .collect();
    let sb: Option<Vec<(i64, i64)>> = long
        .iter()
        .map(|(e, c)| to_small(c).map(|v| (*e, v)))
        .collect();
    if let (Some(sa), Some(sb)) = (sa, sb) {
        let ma = sa
            .iter()
            .map(|t| t.1.unsigned_abs() as u128)
            .max()
            .unwrap_or(0);
        let mb = sb
            .iter()
            .map(|t| t.1.unsigned_abs() as u128)
            .max()
            .unwrap_or(0);
        let bits = |x: u128| 128 - x.leading_zeros();
        let count_bits = 64 - (sa.len().min(sb.len()) as u64).leading_zeros();
        if bits(ma) + bits(mb) + count_bits < 126 {
            let mut acc = vec![0i128; len];
            let hi = lo + len as i64;
            for &(ea, ca) in &sa {
                let ca = ca as i128;
                for &(eb, cb) in &sb {
                    let e = ea + eb;
                    if e >= hi {
                        break;
                    }
                    acc[(e - lo) as usize] += ca * cb as i128;
                }
            }
            return acc.into_iter().map(BigInt::from).collect();
        }
    }
    let mut acc = vec![BigInt::zero(); len];
    let hi = lo + len as i64;
    for (ea, ca) in short {
        for (eb, cb) in long {
            let e = ea + eb;
            if e >= hi {
                break;
            }
            acc[(e - lo) as usize] += *ca * *cb;
        }
    }
    acc
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(rhs, false)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_impl(rhs, true)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(-1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: &LaurentSeries) -> LaurentSeries {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(-1)
    }
}

impl Default for LaurentSeries {
    fn default() -> Self {
        Self::zero()
    }
}

/// Canonical text form: `c0*q^(e0/D) + c1*q^(e1/D) + ...`, ascending.
impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*q^({}/{})", c, self.lo + j as i64, self.denom)?;
        }
        Ok(())
    }
}

/// JSON envelope: `{"denom": D, "order": O, "terms": [[e_num, "coeff"], ...]}`.
#[derive(Serialize, Deserialize)]
struct SeriesJson {
    denom: i64,
    order: Option<i64>,
    terms: Vec<(i64, String)>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (self.lo + j as i64, c.to_string()))
            .collect();
        SeriesJson {
            denom: self.denom,
            order: self.order,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SeriesJson::deserialize(d)?;
        if raw.denom < 1 {
            return Err(D::Error::custom("denom must be positive"));
        }
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (e, c) in raw.terms {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            terms.push((rat(e, raw.denom), c));
        }
        let exact = LaurentSeries::from_terms(terms);
        Ok(match raw.order {
            None => exact,
            Some(o) => exact.truncate(rat(o, raw.denom)),
        })
    }
}

impl LaurentSeries {
    /// Coefficient table rows `(exponent numerator, denominator, coefficient)`
    /// for every exponent on the canonical grid below `bound` (or over the
    /// whole support for exact series when `bound` is `None`).
    pub fn table(&self, bound: Option<Exponent>) -> Vec<(i64, i64, BigInt)> {
        let bound = bound.or(self.order());
        self.terms()
            .filter(|(e, _)| bound.is_none_or(|b| *e < b))
            .map(|(e, c)| {
                let e = e * int(self.denom);
                (e.to_integer(), self.denom, c.clone())
            })
            .collect()
    }

    /// Absolute value of the largest coefficient.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// True when every known coefficient is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}
