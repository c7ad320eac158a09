//! Level-N string functions in Hecke's indefinite form and in lattice-sum
//! form, and the regrouping of the higher-level Bailey lemma by residue
//! classes of `L`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::bailey::BaileyPair;
use crate::error::{Error, Result};
use crate::lattice::{Partition, SigmaContext};
use crate::qtools::{div_qpoch, qfact};
use crate::series::{int, Exponent, LaurentSeries};

use super::lemma::{div_aq_inf, eta_sum, l_range, quad_floor};

/// Level `N`, weight `ℓ` and index `m` of a string function `c_m^ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StringFunctionIndex {
    pub n: i64,
    pub ell: i64,
    pub m: i64,
}

impl StringFunctionIndex {
    /// Needs `N >= 1`, `0 <= ℓ <= N` and `ℓ - m` even.
    pub fn new(n: i64, ell: i64, m: i64) -> Result<Self> {
        if n < 1 || ell < 0 || ell > n {
            return Err(Error::InvalidParameters(format!(
                "need N >= 1 and 0 <= l <= N, got N={n}, l={ell}"
            )));
        }
        if (ell - m).rem_euclid(2) != 0 {
            return Err(Error::InvalidParameters(format!(
                "l - m must be even, got l={ell}, m={m}"
            )));
        }
        Ok(StringFunctionIndex { n, ell, m })
    }

    /// The equivalent index with `|m| <= ℓ`, using `c_m^ℓ = c_{-m}^ℓ =
    /// c_{m+2N}^ℓ = c_{N-m}^{N-ℓ}`.
    pub fn normalized(self) -> Self {
        let n = self.n;
        let m = ((self.m + n).rem_euclid(2 * n) - n).abs();
        let (ell, m) = if m > self.ell {
            (n - self.ell, n - m)
        } else {
            (self.ell, m)
        };
        StringFunctionIndex { n, ell, m }
    }

    /// `h = ℓ(ℓ+2)/(4(N+2)) - m²/(4N)`.
    pub fn h(self) -> Rational64 {
        let n = self.n;
        Rational64::new(self.ell * (self.ell + 2), 4 * (n + 2))
            - Rational64::new(self.m * self.m, 4 * n)
    }
}

/// `Σ (-1)^j q^{j(j+c)/2 + k((j+k)(N+2)+ℓ+1)}` over `j >= j_pos, k >= 0`
/// minus the same over `j <= j_pos - 1, k < 0`, below `bound`.
fn hecke_double_sum(n: i64, ell: i64, c: i64, j_pos: i64, bound: Exponent) -> LaurentSeries {
    let f = |j: i64, k: i64| int(j * (j + c) / 2 + k * ((j + k) * (n + 2) + ell + 1));
    let sign = |j: i64| if j.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut acc = LaurentSeries::zero_to(bound);
    // j, k >= 0: f is non-negative and increasing in both
    let mut j = j_pos;
    while f(j, 0) < bound {
        let mut k = 0;
        while f(j, k) < bound {
            acc = &acc + &LaurentSeries::term(sign(j), f(j, k)).truncate(bound);
            k += 1;
        }
        j += 1;
    }
    // j < j_pos, k < 0: f(j, -1) is increasing in -j and f in -k
    let mut j = j_pos - 1;
    while f(j, -1) < bound {
        let mut k = -1;
        while f(j, k) < bound {
            acc = &acc - &LaurentSeries::term(sign(j), f(j, k)).truncate(bound);
            k -= 1;
        }
        j -= 1;
    }
    acc
}

/// `c_m^ℓ = q^h/(q)_∞³ × (Hecke bracket)`, for `|m| <= ℓ <= N`.
pub fn hecke_form(idx: StringFunctionIndex, bound: Exponent) -> Result<LaurentSeries> {
    let StringFunctionIndex { n, ell, m } = idx;
    if m.abs() > ell {
        return Err(Error::InvalidParameters(format!(
            "the double-sum form needs |m| <= l, got l={ell}, m={m}"
        )));
    }
    let h = idx.h();
    let b = bound - h;
    let mut s =
        &hecke_double_sum(n, ell, ell + m + 1, 0, b) + &hecke_double_sum(n, ell, ell - m + 1, 1, b);
    let ends = b.ceil().to_integer().max(0);
    for _ in 0..3 {
        s = div_qpoch(&s, int(1), int(1), ends, b)?;
    }
    Ok(s.shift(h))
}

/// The string function at any index, through symmetry normalization and the
/// Hecke form.
pub fn string_function(idx: StringFunctionIndex, bound: Exponent) -> Result<LaurentSeries> {
    hecke_form(idx.normalized(), bound)
}

/// `q^{ℓ(N-ℓ)/(2N(N+2))}/(q)_∞ Σ_{η>=0} q^{η C^{-1}(η - e_ℓ)}/(q)_η`
/// over `η` with `(m - ℓ)/(2N) - (C^{-1}η)_1 ∈ Z`, for `0 <= ℓ <= N-1`.
pub fn lattice_string_function(idx: StringFunctionIndex, bound: Exponent) -> Result<LaurentSeries> {
    let StringFunctionIndex { n, ell, m } = idx;
    if ell > n - 1 {
        return Err(Error::InvalidParameters(format!(
            "the lattice form needs l <= N-1, got N={n}, l={ell}"
        )));
    }
    let lambda = if ell == 0 {
        Partition::empty()
    } else {
        Partition::single(ell)
    };
    // at L = 0 the σ restriction with modulus exponent m mod 2N is the class of m
    let ctx = SigmaContext::new(n, m.rem_euclid(2 * n), lambda, 0)?;
    let x = Rational64::new(ell * (n - ell), 2 * n * (n + 2));
    let b = bound - x;
    let e = eta_sum(&ctx, 0, b)?;
    Ok(div_aq_inf(&e, 0, b)?.shift(x))
}

/// One `p` of the regrouped sum: `2p` and `Σ_{L in class} q^{(ℓL+L²)/N} α_L`.
struct PClass {
    two_p: i64,
    alpha_sum: LaurentSeries,
}

fn p_classes(bp: &BaileyPair, n: i64, last: i64, bound: Exponent) -> Vec<PClass> {
    let ell = bp.ell;
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut out = Vec::new();
    for t in 0..=n / 2 {
        let two_p = ell.rem_euclid(2) + 2 * t;
        let mut set = vec![two_p.rem_euclid(2 * n), (-two_p).rem_euclid(2 * n)];
        set.sort_unstable();
        set.dedup();
        if seen.contains(&set) {
            continue;
        }
        let mut s = LaurentSeries::zero_to(bound);
        for l in 0..=last {
            let a = &bp.alpha[l as usize];
            if !a.is_zero() && set.contains(&(2 * l + ell).rem_euclid(2 * n)) {
                s = &s + &a.shift(Rational64::new(ell * l + l * l, n)).truncate(bound);
            }
        }
        seen.push(set);
        out.push(PClass {
            two_p,
            alpha_sum: s,
        });
    }
    out
}

fn e55_setup(
    bp: &BaileyPair,
    n: i64,
    ell_p: i64,
    sigma: i64,
    bound: Exponent,
) -> Result<(SigmaContext, Vec<PClass>)> {
    let lambda = if ell_p == 0 {
        Partition::empty()
    } else {
        Partition::single(ell_p)
    };
    let ctx = SigmaContext::new(n, bp.ell, lambda, sigma)?;
    let last = l_range(
        &bp.alpha_tail,
        bp.alpha.len() as i64 - 1,
        bp.ell,
        n,
        quad_floor(&ctx),
        bound,
        "Σ α",
    )?;
    // the class sums carry the lattice sum's negative valuation too
    let classes = p_classes(bp, n, last, bound - quad_floor(&ctx));
    Ok((ctx, classes))
}

/// The higher-level Bailey lemma's left side with `λ = (ℓ')`, summed as
/// `Σ_p (η sum of class p) × (α sum over L + ℓ/2 ≡ ±p mod N)`.
pub fn e55_lhs(
    bp: &BaileyPair,
    n: i64,
    ell_p: i64,
    sigma: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    let (ctx, classes) = e55_setup(bp, n, ell_p, sigma, bound)?;
    let mut acc = LaurentSeries::zero_to(bound);
    for c in classes {
        let Some(v) = c.alpha_sum.valuation() else {
            continue;
        };
        let l0 = ((c.two_p - bp.ell) / 2).rem_euclid(n);
        let e = eta_sum(&ctx, l0, bound - v)?;
        acc = &acc + &(&e * &c.alpha_sum).truncate(bound);
    }
    div_aq_inf(&acc, bp.ell, bound)
}

/// The same sum written with level-N string functions:
/// `q^{-ℓ'(N-ℓ')/(2N(N+2))} (q)_ℓ Σ_p c^{ℓ'}_{2p+σN} × (α sum of class p)`.
pub fn e55_string_form(
    bp: &BaileyPair,
    n: i64,
    ell_p: i64,
    sigma: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    let (_, classes) = e55_setup(bp, n, ell_p, sigma, bound)?;
    let x = Rational64::new(ell_p * (n - ell_p), 2 * n * (n + 2));
    let mut acc = LaurentSeries::zero_to(bound + x);
    for c in classes {
        let Some(v) = c.alpha_sum.valuation() else {
            continue;
        };
        let idx = StringFunctionIndex::new(n, ell_p, c.two_p + sigma * n)?;
        let s = string_function(idx, bound + x - v)?;
        acc = &acc + &(&s * &c.alpha_sum).truncate(bound + x);
    }
    Ok((&acc.shift(-x) * &qfact(bp.ell)).truncate(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bailey::{seed_pair, Seed};
    use crate::identities::hl_lemma_lhs;
    use crate::qtools::inv_qfact;
    use crate::series::rat;

    #[test]
    fn normalization() {
        let i = StringFunctionIndex::new(3, 1, 5).unwrap().normalized();
        assert_eq!((i.ell, i.m), (1, 1));
        let i = StringFunctionIndex::new(2, 0, 2).unwrap().normalized();
        assert_eq!((i.ell, i.m), (2, 0));
        let i = StringFunctionIndex::new(3, 2, -2).unwrap().normalized();
        assert_eq!((i.ell, i.m), (2, 2));
    }

    #[test]
    fn leading_terms() {
        let c = string_function(StringFunctionIndex::new(2, 0, 0).unwrap(), int(10)).unwrap();
        assert_eq!(c.valuation(), Some(int(0)));
        assert_eq!(c.coeff_at(int(0)).unwrap(), 1.into());
        let one = string_function(StringFunctionIndex::new(1, 0, 0).unwrap(), int(12)).unwrap();
        assert_eq!(
            one.eq_up_to(&inv_qfact(None, int(12)).unwrap(), int(12))
                .unwrap(),
            None
        );
    }

    #[test]
    fn hecke_matches_lattice_form() {
        let b = int(10);
        for n in 1..=3 {
            for ell in 0..n {
                for m in -2 * n..=2 * n {
                    let Ok(idx) = StringFunctionIndex::new(n, ell, m) else {
                        continue;
                    };
                    let h = string_function(idx, b).unwrap();
                    let l = lattice_string_function(idx, b).unwrap();
                    assert_eq!(h.eq_up_to(&l, b).unwrap(), None, "N={n} l={ell} m={m}");
                }
            }
        }
    }

    #[test]
    fn raw_reflection() {
        let b = rat(21, 2);
        for n in 1..=3 {
            for ell in 0..=n {
                for m in (-ell..=ell).step_by(2) {
                    let a = hecke_form(StringFunctionIndex::new(n, ell, m).unwrap(), b).unwrap();
                    let c = hecke_form(StringFunctionIndex::new(n, ell, -m).unwrap(), b).unwrap();
                    assert_eq!(a.eq_up_to(&c, b).unwrap(), None, "N={n} l={ell} m={m}");
                }
            }
        }
    }

    #[test]
    fn regrouping_matches_lemma() {
        let b = int(10);
        for seed in [Seed::I, Seed::II, Seed::III(1)] {
            let bp = seed_pair(seed, 10, b + int(4)).unwrap();
            for n in 1..=3 {
                for ell_p in 0..n {
                    let lambda = if ell_p == 0 {
                        Partition::empty()
                    } else {
                        Partition::single(ell_p)
                    };
                    for sigma in SigmaContext::admissible_sigmas(n, bp.ell, &lambda) {
                        let a = e55_lhs(&bp, n, ell_p, sigma, b).unwrap();
                        let h = hl_lemma_lhs(&bp, n, &lambda, sigma, b).unwrap();
                        assert_eq!(
                            a.eq_up_to(&h, b).unwrap(),
                            None,
                            "{seed:?} N={n} l'={ell_p} σ={sigma}"
                        );
                        let s = e55_string_form(&bp, n, ell_p, sigma, b).unwrap();
                        assert_eq!(
                            s.eq_up_to(&h, b).unwrap(),
                            None,
                            "string {seed:?} N={n} l'={ell_p} σ={sigma}"
                        );
                    }
                }
            }
        }
    }
}
