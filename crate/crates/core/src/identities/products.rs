//! Sum and product sides of the Andrews–Gordon, Bressoud and
//! Göllnitz–Gordon type families, and the auxiliary sums used to pass from
//! the level-2 identity to the latter.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtools::{div_qpoch, gauss_binom, pochhammer, PochhammerSpec, ResidueProduct};
use crate::report::{compare, exact_compare, VerificationReport};
use crate::series::{int, rat, Exponent, LaurentSeries};

/// Which Göllnitz–Gordon type family: `(q^2;q^2)` or `(q^4;q^4)` as the last
/// denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GgVariant {
    N2a,
    N2b,
}

fn check_ki(k: i64, i: i64, top: i64) -> Result<()> {
    if k < 2 || i < 1 || i > top {
        return Err(Error::InvalidParameters(format!(
            "need k >= 2 and 1 <= i <= {top}, got k={k}, i={i}"
        )));
    }
    Ok(())
}

fn check_delta(delta: i64) -> Result<()> {
    if delta != 0 && delta != 1 {
        return Err(Error::InvalidParameters(format!(
            "δ must be 0 or 1, got {delta}"
        )));
    }
    Ok(())
}

/// Shape of a multisum over `N_1 >= ... >= N_{k-1} >= 0`:
/// `q^{Σ quad_j N_j² + lin Σ_{j>=i} N_j} × first(N_1)` over
/// `∏_{j<k-1} (q^b;q^b)_{N_j - N_{j+1}} · (q^{b'};q^{b'})_{N_{k-1}}`.
struct Multisum<'a> {
    k: i64,
    i: i64,
    quad: &'a dyn Fn(i64) -> i64,
    lin: i64,
    base: i64,
    last_base: i64,
    first: Option<&'a dyn Fn(i64) -> LaurentSeries>,
}

impl Multisum<'_> {
    fn exponent(&self, chain: &[i64]) -> i64 {
        chain
            .iter()
            .enumerate()
            .map(|(idx, &x)| {
                let j = idx as i64 + 1;
                (self.quad)(j) * x * x + if j >= self.i { self.lin * x } else { 0 }
            })
            .sum()
    }

    fn eval(&self, bound: Exponent) -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::zero_to(bound);
        let mut chains = Vec::new();
        self.descend(&mut Vec::new(), 0, bound, &mut chains);
        for r in chains {
            let mut t = LaurentSeries::q_pow(int(self.exponent(&r)));
            if let Some(f) = self.first {
                t = &t * &f(r[0]);
            }
            let mut t = t.truncate(bound);
            for w in r.windows(2) {
                t = div_qpoch(&t, int(self.base), int(self.base), w[0] - w[1], bound)?;
            }
            let last = *r.last().expect("k >= 2");
            t = div_qpoch(&t, int(self.last_base), int(self.last_base), last, bound)?;
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn descend(&self, cur: &mut Vec<i64>, floor: i64, bound: Exponent, out: &mut Vec<Vec<i64>>) {
        if cur.len() as i64 == self.k - 1 {
            out.push(cur.clone());
            return;
        }
        let j = cur.len() as i64 + 1;
        let top = cur.last().copied();
        let mut r = 0;
        loop {
            if top.is_some_and(|t| r > t) {
                break;
            }
            let add = (self.quad)(j) * r * r + if j >= self.i { self.lin * r } else { 0 };
            if int(floor + add) >= bound {
                break;
            }
            cur.push(r);
            self.descend(cur, floor + add, bound, out);
            cur.pop();
            r += 1;
        }
    }
}

/// `Σ q^{N_1²+...+N_{k-1}² + N_i+...+N_{k-1}} / ((q)_{n_1} ··· (q)_{n_{k-2}}
/// (q^{2-δ};q^{2-δ})_{n_{k-1}})` with `N_j = n_j + ... + n_{k-1}`.
///
/// Accepts `1 <= i <= k`; the product side exists for `i <= k + δ - 1`.
pub fn ag_bressoud_sum(k: i64, i: i64, delta: i64, bound: Exponent) -> Result<LaurentSeries> {
    check_delta(delta)?;
    check_ki(k, i, k)?;
    Multisum {
        k,
        i,
        quad: &|_| 1,
        lin: 1,
        base: 1,
        last_base: 2 - delta,
        first: None,
    }
    .eval(bound)
}

/// `∏_{j ≢ 0, ±i mod 2k+δ} (1-q^j)^{-1}`.
pub fn ag_bressoud_product(k: i64, i: i64, delta: i64, bound: Exponent) -> Result<LaurentSeries> {
    check_delta(delta)?;
    check_ki(k, i, k + delta - 1)?;
    ResidueProduct::new()
        .exclude(2 * k + delta, &[0, i, -i])
        .eval(bound)
}

fn gg_top(k: i64, variant: GgVariant) -> i64 {
    match variant {
        GgVariant::N2a => k,
        GgVariant::N2b => k - 1,
    }
}

/// `Σ q^{N_1² + 2N_2²+...+2N_{k-1}² + 2N_i+...+2N_{k-1}} (-q;q²)_{N_1}` over
/// `(q²;q²)_{n_1} ··· (q²;q²)_{n_{k-2}}` and `(q²;q²)_{n_{k-1}}` (N2a) or
/// `(q⁴;q⁴)_{n_{k-1}}` (N2b).
pub fn gg_sum(k: i64, i: i64, variant: GgVariant, bound: Exponent) -> Result<LaurentSeries> {
    check_ki(k, i, gg_top(k, variant))?;
    let first = |n: i64| {
        pochhammer(&PochhammerSpec::finite(int(1), int(2), n).negated(), None)
            .expect("finite length is exact")
    };
    Multisum {
        k,
        i,
        quad: &|j| if j == 1 { 1 } else { 2 },
        lin: 2,
        base: 2,
        last_base: match variant {
            GgVariant::N2a => 2,
            GgVariant::N2b => 4,
        },
        first: Some(&first),
    }
    .eval(bound)
}

/// N2a: `∏_{j ≢ 2 mod 4; j ≢ 0, ±(2i-1) mod 4k} (1-q^j)^{-1}`.
/// N2b: `(-q^{2k-1};q^{4k-2})_∞ ∏_{j ≢ 2 mod 4; j ≢ 0 mod 8k-4;
/// j ≢ 2k-1, ±(2i-1) mod 4k-2} (1-q^j)^{-1}`.
pub fn gg_product(k: i64, i: i64, variant: GgVariant, bound: Exponent) -> Result<LaurentSeries> {
    check_ki(k, i, gg_top(k, variant))?;
    let odd = 2 * i - 1;
    let p = match variant {
        GgVariant::N2a => ResidueProduct::new()
            .exclude(4, &[2])
            .exclude(4 * k, &[0, odd, -odd]),
        GgVariant::N2b => ResidueProduct::new()
            .exclude(4, &[2])
            .exclude(8 * k - 4, &[0])
            .exclude(4 * k - 2, &[2 * k - 1, odd, -odd])
            .times(PochhammerSpec::infinite(int(2 * k - 1), int(4 * k - 2)).negated()),
    };
    p.eval(bound)
}

/// `Σ_{n=0}^{r+w/2} q^{n(n-w)/2} [r+w/2; n]` and
/// `(-q^{(1-w)/2})_{w/2} (-q^{1/2})_r`, both exact.
pub fn binomial_aux_sides(w: i64, r: i64) -> (LaurentSeries, LaurentSeries) {
    let top = r + w / 2;
    let mut lhs = LaurentSeries::zero();
    for n in 0..=top {
        lhs = &lhs + &gauss_binom(top, n).shift(rat(n * (n - w), 2));
    }
    let a = pochhammer(
        &PochhammerSpec::finite(rat(1 - w, 2), int(1), w / 2).negated(),
        None,
    );
    let b = pochhammer(
        &PochhammerSpec::finite(rat(1, 2), int(1), r).negated(),
        None,
    );
    let rhs = &a.expect("finite") * &b.expect("finite");
    (lhs, rhs)
}

/// `Σ_{η>=0} q^{η(η-w)/2}/(q)_η` and `(-q^{(1-w)/2})_{w/2} (-q^{1/2})_∞`,
/// known below `bound`.
pub fn eta_aux_sides(w: i64, bound: Exponent) -> Result<(LaurentSeries, LaurentSeries)> {
    let mut lhs = LaurentSeries::zero_to(bound);
    let mut eta = 0;
    // η(η-w)/2 is increasing once η >= w/2
    loop {
        let e = rat(eta * (eta - w), 2);
        if e >= bound && 2 * eta >= w {
            break;
        }
        if e < bound {
            let t = LaurentSeries::q_pow(e).truncate(bound);
            lhs = &lhs + &div_qpoch(&t, int(1), int(1), eta, bound)?;
        }
        eta += 1;
    }
    let a = pochhammer(
        &PochhammerSpec::finite(rat(1 - w, 2), int(1), w / 2).negated(),
        None,
    )?;
    let low = a.valuation().unwrap_or_else(|| int(0)).min(int(0));
    let b = pochhammer(
        &PochhammerSpec::infinite(rat(1, 2), int(1)).negated(),
        Some(bound - low),
    )?;
    Ok((lhs, (&a * &b).truncate(bound)))
}

/// Checks both auxiliary sums for an even `|λ| = w`: the finite one exactly
/// at `r_1`, the η-sum below `bound`.
pub fn corollary_proof_sum_checks(w: i64, r1: i64, bound: Exponent) -> VerificationReport {
    let mut report = VerificationReport::new("corollary-aux", bound)
        .with("lambda_weight", w)
        .with("r1", r1);
    report = report.run(|| {
        if w < 0 || w % 2 != 0 || r1 < 0 {
            return Err(Error::InvalidParameters(format!(
                "need an even |λ| >= 0 and r1 >= 0, got {w}, {r1}"
            )));
        }
        let (lhs, rhs) = binomial_aux_sides(w, r1);
        if let Some(m) = exact_compare(&lhs, &rhs)? {
            return Ok(Some(m));
        }
        let (lhs, rhs) = eta_aux_sides(w, bound)?;
        compare(&lhs, &rhs, bound)
    });
    report
}

/// The level-2 sum side summed over σ, written in `q²`: the bridge from the
/// bilateral identity at `N = 2`, `λ = ∅` to the Göllnitz–Gordon sums.
pub fn level_two_bridge(k: i64, i: i64, delta: i64, bound: Exponent) -> Result<LaurentSeries> {
    use crate::identities::{thm44_rhs, IdentityCell};
    use crate::lattice::Partition;
    let half = bound / int(2);
    let mut acc = LaurentSeries::zero_to(half);
    for sigma in 0..=1 {
        let cell = IdentityCell::new(2, delta, k, i, Partition::empty(), sigma)?;
        acc = &acc + &thm44_rhs(&cell, half)?;
    }
    acc.substitute_power(int(2))
}

/// `Σ_{j∈Z} (-1)^j q^{js + j(j-1)/2}` and `(q^s)_∞ (q^{1-s})_∞ (q)_∞` for
/// `0 < s < 1`, known below `bound`.
pub fn triple_product_sides(
    s: Rational64,
    bound: Exponent,
) -> Result<(LaurentSeries, LaurentSeries)> {
    if s <= int(0) || s >= int(1) {
        return Err(Error::InvalidParameters(format!("need 0 < s < 1, got {s}")));
    }
    let e = |j: i64| s * int(j) + rat(j * (j - 1), 2);
    let mut lhs = LaurentSeries::zero_to(bound);
    for dir in [1i64, -1] {
        // both half-lines have increasing exponents
        let mut j = if dir == 1 { 0 } else { -1 };
        while e(j) < bound {
            let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
            lhs = &lhs + &LaurentSeries::term(sign, e(j)).truncate(bound);
            j += dir;
        }
    }
    let a = pochhammer(&PochhammerSpec::infinite(s, int(1)), Some(bound))?;
    let b = pochhammer(&PochhammerSpec::infinite(int(1) - s, int(1)), Some(bound))?;
    let c = pochhammer(&PochhammerSpec::infinite(int(1), int(1)), Some(bound))?;
    Ok((lhs, (&(&a * &b) * &c).truncate(bound)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partitions of `n` into parts allowed by `ok`, by direct recursion.
    fn count_partitions(n: i64, ok: &dyn Fn(i64) -> bool) -> i64 {
        fn go(n: i64, max: i64, ok: &dyn Fn(i64) -> bool) -> i64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n))
                .filter(|&p| ok(p))
                .map(|p| go(n - p, p, ok))
                .sum()
        }
        go(n, n, ok)
    }

    #[test]
    fn rogers_ramanujan_counts() {
        let s = ag_bressoud_sum(2, 2, 1, int(25)).unwrap();
        for n in 0..25 {
            let c = count_partitions(n, &|p| p % 5 == 1 || p % 5 == 4);
            assert_eq!(s.coeff_at(int(n)).unwrap(), c.into(), "q^{n}");
        }
    }

    #[test]
    fn small_families_match_products() {
        let b = int(20);
        for k in 2..=3 {
            for delta in 0..=1 {
                for i in 1..=k + delta - 1 {
                    let s = ag_bressoud_sum(k, i, delta, b).unwrap();
                    let p = ag_bressoud_product(k, i, delta, b).unwrap();
                    assert_eq!(s.eq_up_to(&p, b).unwrap(), None, "k={k} i={i} δ={delta}");
                }
            }
            for (variant, top) in [(GgVariant::N2a, k), (GgVariant::N2b, k - 1)] {
                for i in 1..=top {
                    let s = gg_sum(k, i, variant, b).unwrap();
                    let p = gg_product(k, i, variant, b).unwrap();
                    assert_eq!(s.eq_up_to(&p, b).unwrap(), None, "{variant:?} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn auxiliary_sums() {
        assert_eq!(
            binomial_aux_sides(0, 1).0,
            LaurentSeries::from_terms([(int(0), 1), (rat(1, 2), 1)])
        );
        for w in [0, 2, 4] {
            for r in 0..=4 {
                assert!(
                    corollary_proof_sum_checks(w, r, int(12)).passed(),
                    "w={w} r={r}"
                );
            }
        }
    }

    #[test]
    fn bridge_gives_gollnitz_gordon_sums() {
        let b = int(16);
        let a = level_two_bridge(3, 2, 1, b).unwrap();
        assert_eq!(
            a.eq_up_to(&gg_sum(3, 2, GgVariant::N2a, b).unwrap(), b)
                .unwrap(),
            None
        );
        let a = level_two_bridge(3, 1, 0, b).unwrap();
        assert_eq!(
            a.eq_up_to(&gg_sum(3, 1, GgVariant::N2b, b).unwrap(), b)
                .unwrap(),
            None
        );
    }

    #[test]
    fn jacobi_triple_product() {
        for s in [rat(1, 2), rat(1, 3), rat(2, 5)] {
            let (l, r) = triple_product_sides(s, int(15)).unwrap();
            assert_eq!(l.eq_up_to(&r, int(15)).unwrap(), None, "s={s}");
        }
    }
}
