//! The two sides `f1`, `f2` of the polynomial identity behind the (Γ, Δ)
//! pairs, their recurrences and the telescopic expansions.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BinomialKind, IntVec};
use crate::qtools::{gauss_binom, gauss_binom_primed, qpoch};
use crate::report::{compare, exact_compare, VerificationReport};
use crate::series::{int, Exponent, LaurentSeries};

use super::hierarchy::{delta_inner, gamma_inner, HlParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    F1,
    F2,
}

fn check_range(p: &HlParams, l: i64, k: i64) -> Result<()> {
    if l < 0 || l > p.m || k < 0 || k > p.m - l {
        return Err(Error::InvalidParameters(format!(
            "need 0 <= L <= M and 0 <= k <= M - L, got M={}, L={l}, k={k}",
            p.m
        )));
    }
    Ok(())
}

/// Left side: the `(η, i)` sum of Γ_{L,k} without its prefactor, known below
/// `bound`.
pub fn f1(p: &HlParams, l: i64, k: i64, bound: Exponent) -> Result<LaurentSeries> {
    check_range(p, l, k)?;
    gamma_inner(p, l, k, bound, BinomialKind::Primed)
}

/// Right side: `Σ_{r=L+k}^M q^{(r+L+ℓ)(r-L-Nk)/N} [M-L-k; M-r] (q^{ℓ+1+L+r})_{M-r}`
/// times the Δ-type sum at `r`; exact.
pub fn f2(p: &HlParams, l: i64, k: i64) -> Result<LaurentSeries> {
    check_range(p, l, k)?;
    let n = p.ctx.n();
    let ell = p.ctx.ell();
    let mut acc = LaurentSeries::zero();
    for r in l + k..=p.m {
        let e = Rational64::new((r + l + ell) * (r - l - n * k), n);
        let w = &gauss_binom(p.m - l - k, p.m - r) * &qpoch(int(ell + 1 + l + r), p.m - r)?;
        acc = &acc + &(&w * &delta_inner(&p.ctx, r)).shift(e);
    }
    Ok(acc)
}

fn eval(side: Side, p: &HlParams, l: i64, k: i64, bound: Exponent) -> Result<LaurentSeries> {
    match side {
        Side::F1 => f1(p, l, k, bound),
        Side::F2 => Ok(f2(p, l, k)?.truncate(bound)),
    }
}

fn with_m(p: &HlParams, m: i64) -> HlParams {
    HlParams {
        m,
        ctx: p.ctx.clone(),
    }
}

/// Checks the relation that applies at `(M, L, k)`:
/// the step `f(M,L,k) = f(M-1,L,k) + q^{M+L+ℓ}(f(M,L,k+1) - f(M-1,L,k))` for
/// `k < M-L`, the boundary `f(M,L,k) = q^{-(2L+ℓ+1)(N-1)/N} f(M,L+1,k-1)` for
/// `k = M-L >= 1`, and `f1(M,M,0) = f2(M,M,0)` at `L = M`.
pub fn check_recurrences(
    side: Side,
    p: &HlParams,
    l: i64,
    k: i64,
    bound: Exponent,
) -> VerificationReport {
    let n = p.ctx.n();
    let ell = p.ctx.ell();
    let (target, check): (&str, Box<dyn FnOnce() -> _>) = if k < p.m - l {
        (
            "recurrence-step",
            Box::new(move || {
                let lhs = eval(side, p, l, k, bound)?;
                let prev = eval(side, &with_m(p, p.m - 1), l, k, bound)?;
                let up = eval(side, p, l, k + 1, bound)?;
                let rhs = &prev + &(&up - &prev).shift(int(p.m + l + ell));
                compare(&lhs, &rhs, bound)
            }),
        )
    } else if k >= 1 {
        (
            "recurrence-boundary",
            Box::new(move || {
                let s = Rational64::new((2 * l + ell + 1) * (n - 1), n);
                let lhs = eval(side, p, l, k, bound)?;
                let rhs = eval(side, p, l + 1, k - 1, bound + s)?.shift(-s);
                compare(&lhs, &rhs, bound)
            }),
        )
    } else {
        (
            "initial-condition",
            Box::new(move || {
                let lhs = f1(p, l, k, bound)?;
                let rhs = f2(p, l, k)?;
                compare(&lhs, &rhs, bound)
            }),
        )
    };
    let side_name = match side {
        Side::F1 => "f1",
        Side::F2 => "f2",
    };
    hl_cell(VerificationReport::new(target, bound), p)
        .with("side", side_name)
        .with("L", l)
        .with("k", k)
        .run(check)
}

/// Checks `f1 = f2` at `(M, L, k)` below `bound`.
pub fn check_f1_f2(p: &HlParams, l: i64, k: i64, bound: Exponent) -> VerificationReport {
    hl_cell(VerificationReport::new("f1-f2", bound), p)
        .with("L", l)
        .with("k", k)
        .run(|| compare(&f1(p, l, k, bound)?, &f2(p, l, k)?, bound))
}

pub(crate) fn hl_cell(r: VerificationReport, p: &HlParams) -> VerificationReport {
    r.with("M", p.m)
        .with("N", p.ctx.n())
        .with("ell", p.ctx.ell())
        .with("lambda", p.ctx.lambda())
        .with("sigma", p.ctx.sigma())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Telescope {
    /// Lowered tops for `j <= p`.
    R,
    /// Lowered tops for `j >= p`.
    B,
}

fn primed_product(
    a: &[i64],
    b: &[i64],
    top_drop: impl Fn(usize) -> i64,
    bottom_drop: impl Fn(usize) -> i64,
) -> LaurentSeries {
    let mut acc = LaurentSeries::one();
    for j in 0..a.len() {
        acc = &acc * &gauss_binom_primed(a[j] + b[j] - top_drop(j), a[j] - bottom_drop(j));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Both sides of the telescopic expansion of `∏_j [A_j + B_j; A_j]'`.
pub fn telescopic_sides(
    a: &IntVec,
    b: &IntVec,
    variant: Telescope,
) -> Result<(LaurentSeries, LaurentSeries)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidParameters(
            "A and B need the same nonzero length".into(),
        ));
    }
    let lhs = primed_product(a, b, |_| 0, |_| 0);
    let mut rhs = primed_product(a, b, |_| 1, |_| 0);
    for p in 0..a.len() {
        let lowered = |j: usize| -> i64 {
            let hit = match variant {
                Telescope::R => j <= p,
                Telescope::B => j >= p,
            };
            i64::from(hit)
        };
        let t = primed_product(a, b, lowered, |j| i64::from(j == p));
        // B_p may be negative: q^{B_p} is then a Laurent monomial
        rhs = &rhs + &t.shift(int(b[p]));
    }
    Ok((lhs, rhs))
}

pub fn telescopic_check(n: i64, a: &IntVec, b: &IntVec, variant: Telescope) -> VerificationReport {
    let bound = int(0);
    let mut r = VerificationReport::new("telescopic", bound)
        .with("N", n)
        .with("variant", format!("{variant:?}"))
        .with("A", format!("{a:?}"))
        .with("B", format!("{b:?}"));
    r.order = "exact".into();
    r.run(|| {
        if a.len() as i64 != n - 1 {
            return Err(Error::InvalidParameters(format!(
                "A needs length N-1 = {}",
                n - 1
            )));
        }
        let (lhs, rhs) = telescopic_sides(a, b, variant)?;
        exact_compare(&lhs, &rhs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Partition, SigmaContext};
    use crate::report::Status;

    fn params(m: i64, n: i64, ell: i64, lambda: &[i64], sigma: i64) -> HlParams {
        let ctx =
            SigmaContext::new(n, ell, Partition::new(lambda.to_vec()).unwrap(), sigma).unwrap();
        HlParams::new(m, ctx).unwrap()
    }

    fn grid() -> Vec<HlParams> {
        let mut out = Vec::new();
        for n in 1..=3 {
            for ell in 0..=1 {
                for lambda in Partition::all(n - 1, 1) {
                    for sigma in SigmaContext::admissible_sigmas(n, ell, &lambda) {
                        for m in 0..=3 {
                            let ctx = SigmaContext::new(n, ell, lambda.clone(), sigma).unwrap();
                            out.push(HlParams::new(m, ctx).unwrap());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn sides_agree_and_recur() {
        let b = int(14);
        for p in grid() {
            for l in 0..=p.m {
                for k in 0..=p.m - l {
                    let r = check_f1_f2(&p, l, k, b);
                    assert_eq!(r.status, Status::Pass, "{}", r.key());
                    for side in [Side::F1, Side::F2] {
                        if l == p.m && side == Side::F2 {
                            continue;
                        }
                        let r = check_recurrences(side, &p, l, k, b);
                        assert_eq!(r.status, Status::Pass, "{} {:?}", r.key(), r.mismatch);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_one_by_hand() {
        // N=1: f1 = 1 and f2 = Σ_r q^{(r+L+ℓ)(r-L-k)} [M-L-k; M-r] (q^{ℓ+1+L+r})_{M-r}
        let p = params(2, 1, 0, &[], 0);
        assert_eq!(
            f1(&p, 0, 1, int(10)).unwrap(),
            LaurentSeries::one().truncate(int(10))
        );
        // M=2, L=0, k=1: r=1 gives [1;1](q^2)_1 = 1 - q^2; r=2 gives q^{2} [1;0] = q^2
        assert_eq!(f2(&p, 0, 1).unwrap(), LaurentSeries::one());
    }

    #[test]
    fn boundary_exponent_vanishes_at_rank_one() {
        let p = params(3, 1, 1, &[], 1);
        let r = check_recurrences(Side::F2, &p, 1, 2, int(12));
        assert_eq!(r.target, "recurrence-boundary");
        assert!(r.passed());
    }

    #[test]
    fn telescopic_expansions() {
        for n in 2..=4usize {
            let d = n - 1;
            let total = 7usize.pow(2 * d as u32);
            for code in 0..total {
                let mut c = code;
                let mut v = Vec::with_capacity(2 * d);
                for _ in 0..2 * d {
                    v.push((c % 7) as i64 - 3);
                    c /= 7;
                }
                let (a, b) = v.split_at(d);
                for variant in [Telescope::R, Telescope::B] {
                    let r = telescopic_check(n as i64, &a.to_vec(), &b.to_vec(), variant);
                    assert!(r.passed(), "{}", r.key());
                }
            }
        }
    }

    #[test]
    fn rank_two_is_gauss_recurrence() {
        for a in -3..=3 {
            for b in -3..=3 {
                let (lhs, rhs) = telescopic_sides(&vec![a], &vec![b], Telescope::R).unwrap();
                let direct = &gauss_binom_primed(a + b - 1, a)
                    + &gauss_binom_primed(a + b - 1, a - 1).shift(int(b));
                assert_eq!(rhs, direct);
                assert_eq!(lhs, rhs, "A={a} B={b}");
            }
        }
    }
}
