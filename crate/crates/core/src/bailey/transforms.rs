//! Maps taking Bailey pairs to Bailey pairs.

use crate::error::{Error, Result};
use crate::qtools::div_qpoch;
use crate::series::{int, Exponent, LaurentSeries};

use super::conjugate::{RhoKernel, RhoParam};
use super::pairs::{BaileyPair, Tail};

/// `β'_L = (1/D(L)) Σ_r x^r H(r) mid(L-r) β_r/(q)_{L-r}`, shared by the
/// transforms that keep the `β` side of the two-parameter lemma.
fn beta_prime(
    k: &RhoKernel,
    beta: &[LaurentSeries],
    bound: Exponent,
) -> Result<Vec<LaurentSeries>> {
    (0..beta.len() as i64)
        .map(|l| {
            let mut acc = LaurentSeries::zero_to(bound);
            for r in 0..=l {
                let b = &beta[r as usize];
                if b.is_zero() {
                    continue;
                }
                let num = &(&k.weight(r)? * &k.mid(l - r)?) * b;
                acc = &acc + &div_qpoch(&num, int(1), int(1), l - r, bound)?;
            }
            k.div_d(&acc, l, bound)
        })
        .collect()
}

/// `F(L) = x^L H(L)/D(L)` applied to `s`.
fn apply_f(k: &RhoKernel, l: i64, s: &LaurentSeries, bound: Exponent) -> Result<LaurentSeries> {
    if s.is_zero() {
        return Ok(s.truncate(bound));
    }
    k.div_d(&(&k.weight(l)? * s), l, bound)
}

/// `s (1 - q^ℓ)/(1 - q^{ℓ+n})`, i.e. `s (a)_n/(aq)_n` collapsed.
fn ratio(ell: i64, n: i64, s: &LaurentSeries, bound: Exponent) -> Result<LaurentSeries> {
    if n == 0 {
        return Ok(s.clone());
    }
    s.mul_binomial(int(ell), -1)
        .div_binomial(int(ell + n), -1, bound)
}

fn check_len(bp: &BaileyPair) -> usize {
    bp.l_max() as usize + 1
}

fn need_positive_ell(bp: &BaileyPair) -> Result<()> {
    if bp.ell < 1 {
        return Err(Error::InvalidParameters(format!(
            "lowering the modulus needs ℓ >= 1, got {}",
            bp.ell
        )));
    }
    Ok(())
}

/// The two-parameter transform keeping the modulus:
/// `α'_L = x^L H(L) α_L / D(L)` and `β'_L` as in [`beta_prime`], `x = aq`.
pub fn transform_ab(
    bp: &BaileyPair,
    r1: RhoParam,
    r2: RhoParam,
    bound: Exponent,
) -> Result<BaileyPair> {
    let n = check_len(bp);
    let k = RhoKernel::new(bp.ell + 1, r1, r2);
    k.check(n as i64)?;
    let alpha = (0..n)
        .map(|l| apply_f(&k, l as i64, &bp.alpha[l], bound))
        .collect::<Result<Vec<_>>>()?;
    let beta = beta_prime(&k, &bp.beta[..n], bound)?;
    Ok(BaileyPair {
        ell: bp.ell,
        alpha,
        beta,
        alpha_tail: if bp.alpha_tail == Tail::Zero {
            Tail::Zero
        } else {
            Tail::Unknown
        },
        beta_tail: Tail::Unknown,
    })
}

/// Transform lowering the modulus to `aq^{-1}` with kernels in `x = a`:
/// `α'_L = F(L)[(a)_{2L}/(aq)_{2L} α_L - a q^{2L-2} (a)_{2L-2}/(aq)_{2L-2} α_{L-1}]`
/// and `α'_0 = α_0`.
pub fn transform_lattice(
    bp: &BaileyPair,
    r1: RhoParam,
    r2: RhoParam,
    bound: Exponent,
) -> Result<BaileyPair> {
    need_positive_ell(bp)?;
    let n = check_len(bp);
    let ell = bp.ell;
    let k = RhoKernel::new(ell, r1, r2);
    k.check(n as i64)?;
    let mut alpha = vec![bp.alpha[0].truncate(bound)];
    for l in 1..n as i64 {
        let cur = ratio(ell, 2 * l, &bp.alpha[l as usize], bound)?;
        let prev =
            ratio(ell, 2 * l - 2, &bp.alpha[l as usize - 1], bound)?.shift(int(ell + 2 * l - 2));
        alpha.push(apply_f(&k, l, &(&cur - &prev), bound)?);
    }
    let beta = beta_prime(&k, &bp.beta[..n], bound)?;
    Ok(BaileyPair {
        ell: ell - 1,
        alpha,
        beta,
        alpha_tail: Tail::Unknown,
        beta_tail: Tail::Unknown,
    })
}

/// Transform keeping the modulus with
/// `α'_L = a^L q^{L(L+1)} S(L) - a^{L-1} q^{L(L-1)} S(L-1)`, where
/// `S(L) = Σ_{r<=L} q^{r-r²} H(r)/D(r) α_r`, and `β'_L = q^L` times the
/// two-parameter `β'_L`.
pub fn transform_chain_q(
    bp: &BaileyPair,
    r1: RhoParam,
    r2: RhoParam,
    bound: Exponent,
) -> Result<BaileyPair> {
    let n = check_len(bp);
    let ell = bp.ell;
    let k = RhoKernel::new(ell + 1, r1, r2);
    k.check(n as i64)?;
    let mut partial = Vec::with_capacity(n);
    let mut acc = LaurentSeries::zero_to(bound);
    for r in 0..n as i64 {
        let a = &bp.alpha[r as usize];
        if !a.is_zero() {
            let w = &k.h(r)?.shift(int(r - r * r)) * a;
            acc = &acc + &k.div_d(&w, r, bound)?;
        }
        partial.push(acc.clone());
    }
    let mut alpha = Vec::with_capacity(n);
    for l in 0..n as i64 {
        let mut v = partial[l as usize].shift(int(ell * l + l * (l + 1)));
        if l > 0 {
            v = &v - &partial[l as usize - 1].shift(int(ell * (l - 1) + l * (l - 1)));
        }
        alpha.push(v.truncate(bound));
    }
    let beta = beta_prime(&k, &bp.beta[..n], bound)?
        .into_iter()
        .enumerate()
        .map(|(l, b)| b.shift(int(l as i64)).truncate(bound))
        .collect();
    Ok(BaileyPair {
        ell,
        alpha,
        beta,
        alpha_tail: Tail::Unknown,
        beta_tail: Tail::Unknown,
    })
}

/// Transform lowering the modulus to `aq^{-1}` with kernels in `x = aq`:
/// `α'_L = F(L)(a)_{2L}/(aq)_{2L} α_L - F(L-1) a q^{2L-2} (a)_{2L-2}/(aq)_{2L-2} α_{L-1}`
/// and `α'_0 = α_0`; `β'` as in the two-parameter transform.
pub fn transform_lattice2(
    bp: &BaileyPair,
    r1: RhoParam,
    r2: RhoParam,
    bound: Exponent,
) -> Result<BaileyPair> {
    need_positive_ell(bp)?;
    let n = check_len(bp);
    let ell = bp.ell;
    let k = RhoKernel::new(ell + 1, r1, r2);
    k.check(n as i64)?;
    let mut alpha = vec![bp.alpha[0].truncate(bound)];
    for l in 1..n as i64 {
        let cur = apply_f(
            &k,
            l,
            &ratio(ell, 2 * l, &bp.alpha[l as usize], bound)?,
            bound,
        )?;
        let prev_in =
            ratio(ell, 2 * l - 2, &bp.alpha[l as usize - 1], bound)?.shift(int(ell + 2 * l - 2));
        let prev = apply_f(&k, l - 1, &prev_in, bound)?;
        alpha.push(&cur - &prev);
    }
    let beta = beta_prime(&k, &bp.beta[..n], bound)?;
    Ok(BaileyPair {
        ell: ell - 1,
        alpha,
        beta,
        alpha_tail: Tail::Unknown,
        beta_tail: Tail::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bailey::pairs::{beta_from_alpha, verify_bailey};
    use crate::qtools::inv_qfact;
    use crate::series::rat;

    fn sample_pair(ell: i64, bound: Exponent) -> BaileyPair {
        let alpha = vec![
            LaurentSeries::from_ints(&[1, 2]),
            LaurentSeries::from_ints(&[0, -1, 0, 3]),
            LaurentSeries::from_ints(&[2]),
            LaurentSeries::zero(),
            LaurentSeries::from_ints(&[0, 0, 1, -1]),
        ];
        beta_from_alpha(ell, alpha, Tail::Zero, bound).unwrap()
    }

    fn rhos() -> Vec<(RhoParam, RhoParam)> {
        vec![
            (RhoParam::Infinity, RhoParam::Infinity),
            (RhoParam::Finite(rat(1, 2)), RhoParam::Infinity),
            (RhoParam::Finite(rat(1, 2)), RhoParam::Finite(rat(3, 2))),
        ]
    }

    #[test]
    fn unit_pair_is_fixed_at_infinity() {
        let b = int(20);
        let bp = BaileyPair::unit(0, 4, b).unwrap();
        let out = transform_ab(&bp, RhoParam::Infinity, RhoParam::Infinity, b).unwrap();
        for l in 0..=4 {
            assert!(out.beta[l].agrees_up_to(&bp.beta[l], b).unwrap());
        }
    }

    #[test]
    fn kronecker_beta_maps_to_inverse_factorial() {
        let b = int(20);
        let mut beta = vec![LaurentSeries::zero(); 5];
        beta[0] = LaurentSeries::one();
        let bp = BaileyPair {
            ell: 1,
            alpha: vec![LaurentSeries::zero(); 5],
            beta,
            alpha_tail: Tail::Unknown,
            beta_tail: Tail::Zero,
        };
        let out = transform_ab(&bp, RhoParam::Infinity, RhoParam::Infinity, b).unwrap();
        for l in 0..=4 {
            assert!(out.beta[l]
                .agrees_up_to(&inv_qfact(Some(l as i64), b).unwrap(), b)
                .unwrap());
        }
    }

    #[test]
    fn outputs_are_bailey_pairs() {
        let work = int(40);
        let b = int(18);
        for ell in 1..3 {
            let bp = sample_pair(ell, work);
            for (r1, r2) in rhos() {
                for (name, out) in [
                    ("ab", transform_ab(&bp, r1, r2, work).unwrap()),
                    ("lattice", transform_lattice(&bp, r1, r2, work).unwrap()),
                    ("chain", transform_chain_q(&bp, r1, r2, work).unwrap()),
                    ("lattice2", transform_lattice2(&bp, r1, r2, work).unwrap()),
                ] {
                    assert_eq!(
                        verify_bailey(&out, b).unwrap(),
                        None,
                        "{name} ℓ={ell} {r1:?} {r2:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn lowering_keeps_alpha_zero() {
        let b = int(20);
        let bp = sample_pair(2, b);
        for f in [transform_lattice, transform_lattice2] {
            let out = f(&bp, RhoParam::Infinity, RhoParam::Infinity, b).unwrap();
            assert_eq!(out.ell, 1);
            assert_eq!(out.alpha[0], bp.alpha[0].truncate(b));
        }
        let low = sample_pair(0, b);
        assert!(transform_lattice(&low, RhoParam::Infinity, RhoParam::Infinity, b).is_err());
    }

    #[test]
    fn chain_limit_at_one() {
        let b = int(20);
        let bp = sample_pair(0, b);
        let out = transform_chain_q(&bp, RhoParam::Infinity, RhoParam::Infinity, b).unwrap();
        assert_eq!(out.alpha[0], bp.alpha[0].truncate(b));
        assert_eq!(out.beta[0], bp.beta[0].truncate(b));
        for l in 0..5i64 {
            let mut s = LaurentSeries::zero();
            for r in 0..l {
                s = &s + &bp.alpha[r as usize];
            }
            let want = &bp.alpha[l as usize].shift(int(l * (l + 1)))
                - &s.shift(int(l * (l - 1))).mul_binomial(int(2 * l), -1);
            assert!(out.alpha[l as usize].agrees_up_to(&want, b).unwrap());
            let mut beta = LaurentSeries::zero_to(b);
            for r in 0..=l {
                let t = &bp.beta[r as usize].shift(int(r * r + l))
                    * &inv_qfact(Some(l - r), b).unwrap();
                beta = &beta + &t;
            }
            assert!(out.beta[l as usize].agrees_up_to(&beta, b).unwrap());
        }
    }
}
