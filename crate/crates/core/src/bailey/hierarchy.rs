//! The lattice (Γ, Δ) pairs and the conjugate pairs they induce.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_delta_support, enumerate_gamma_support, BinomialKind, SigmaContext,
};
use crate::qtools::{div_qpoch, gauss_binom, gauss_binom_primed, q_multinomial, Base};
use crate::series::{int, Exponent, LaurentSeries, Mismatch};

use super::pairs::{div_weights, ConjugatePair, Tail};

/// Data fixing one (Γ, Δ) pair: `M` and the σ context (`N, ℓ, λ, σ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HlParams {
    pub m: i64,
    pub ctx: SigmaContext,
}

impl HlParams {
    pub fn new(m: i64, ctx: SigmaContext) -> Result<Self> {
        if m < 0 {
            return Err(Error::InvalidParameters(format!("M = {m} must be >= 0")));
        }
        if ctx.ell() < 0 {
            return Err(Error::InvalidParameters(format!(
                "ℓ = {} must be >= 0",
                ctx.ell()
            )));
        }
        Ok(HlParams { m, ctx })
    }

    fn n(&self) -> i64 {
        self.ctx.n()
    }

    fn ell(&self) -> i64 {
        self.ctx.ell()
    }
}

/// `Σ_n q^{n C^{-1}(n - e_λ)} ∏ [m_j + n_j; n_j]` over the σ-restricted
/// `(m, n)` system at `L`; a finite sum.
pub fn delta_inner(ctx: &SigmaContext, l: i64) -> LaurentSeries {
    let cd = ctx.cartan();
    let mut acc = LaurentSeries::zero();
    for pt in enumerate_delta_support(ctx, l) {
        let mut t = LaurentSeries::q_pow(cd.quad_form(&pt.n, ctx.e_lambda()));
        for (&n, &m) in pt.n.iter().zip(&pt.m) {
            t = &t * &gauss_binom(m + n, n);
        }
        acc = &acc + &t;
    }
    acc
}

/// `Δ_{L,k} = a^{L/N} q^{L²/N - kL}/(q)_{M-L} · Σ_n (...)`, zero outside
/// `M >= L >= k >= 0`.
pub fn hl_delta(p: &HlParams, l: i64, k: i64, bound: Exponent) -> Result<LaurentSeries> {
    if k < 0 || l < k || l > p.m {
        return Ok(LaurentSeries::zero());
    }
    let n = p.n();
    let lead = Rational64::new(p.ell() * l + l * l, n) - int(k * l);
    let s = delta_inner(&p.ctx, l).shift(lead);
    div_qpoch(&s, int(1), int(1), p.m - l, bound)
}

/// The σ-restricted sum over `(η, i)` inside Γ_{L,k} (without prefactor),
/// known below `bound`.
pub fn gamma_inner(
    p: &HlParams,
    l: i64,
    k: i64,
    bound: Exponent,
    kind: BinomialKind,
) -> Result<LaurentSeries> {
    let cd = p.ctx.cartan();
    let n = p.n();
    let points = enumerate_gamma_support(&p.ctx, p.m, l, k, bound, kind)?;
    let mut acc = LaurentSeries::zero_to(bound);
    let mut e1 = cd.unit(1);
    for x in e1.iter_mut() {
        *x *= 2 * l + p.ell();
    }
    for pt in points {
        let shifted: Vec<i64> = pt.i.iter().zip(&e1).map(|(a, b)| a + b).collect();
        let e = Rational64::new(-cd.scaled_bilinear(&pt.i, &shifted), n)
            + cd.quad_form(&pt.eta, p.ctx.e_lambda());
        let mut t = q_multinomial(k, &pt.i, Base::InverseQ).shift(e);
        for (&h, &mu) in pt.eta.iter().zip(&pt.mu) {
            let b = match kind {
                BinomialKind::Primed => gauss_binom_primed(mu + h, h),
                BinomialKind::Unprimed => gauss_binom(mu + h, h),
            };
            t = &t * &b;
        }
        acc = &acc + &t.truncate(bound);
    }
    Ok(acc)
}

/// `Γ_{L,k} = a^{L/N+k} q^{L²/N+kL}/((q)_{M-L-k}(aq)_{L+M}) · Σ_{η,i} (...)`.
///
/// `BinomialKind::Unprimed` with `k = 0` gives the form with ordinary
/// Gaussian polynomials and `η >= 0`.
pub fn hl_gamma(
    p: &HlParams,
    l: i64,
    k: i64,
    bound: Exponent,
    kind: BinomialKind,
) -> Result<LaurentSeries> {
    if k < 0 || l < 0 || l + k > p.m {
        return Ok(LaurentSeries::zero());
    }
    let n = p.n();
    let lead = Rational64::new(p.ell() * l + l * l, n) + int(p.ell() * k + k * l);
    let inner = gamma_inner(p, l, k, bound - lead, kind)?;
    div_weights(&inner.shift(lead), p.ell(), p.m - l - k, l + p.m, bound)
}

/// Tabulated Γ_{L,k} and Δ_{L,k} for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaDeltaPair {
    pub ell: i64,
    pub m: i64,
    /// Keyed by `(L, k)` with `L + k <= M`.
    pub gamma: BTreeMap<(i64, i64), LaurentSeries>,
    /// Keyed by `(L, k)` with `M >= L >= k`.
    pub delta: BTreeMap<(i64, i64), LaurentSeries>,
}

pub fn hl_gamma_delta(p: &HlParams, bound: Exponent) -> Result<GammaDeltaPair> {
    let mut gamma = BTreeMap::new();
    let mut delta = BTreeMap::new();
    for k in 0..=p.m {
        for l in 0..=p.m - k {
            gamma.insert((l, k), hl_gamma(p, l, k, bound, BinomialKind::Primed)?);
        }
        for l in k..=p.m {
            delta.insert((l, k), hl_delta(p, l, k, bound)?);
        }
    }
    Ok(GammaDeltaPair {
        ell: p.ell(),
        m: p.m,
        gamma,
        delta,
    })
}

/// Checks `Γ_{L,k} = Σ_{r>=L+k} Δ_{r,k}/((q)_{r-L-k}(aq)_{r+L})` for every
/// tabulated `(L, k)`, returning the first failing cell.
pub fn verify_gamma_delta(
    gd: &GammaDeltaPair,
    bound: Exponent,
) -> Result<Option<((i64, i64), Mismatch)>> {
    for (&(l, k), g) in &gd.gamma {
        let mut acc = LaurentSeries::zero_to(bound);
        for r in l + k..=gd.m {
            if let Some(d) = gd.delta.get(&(r, k)) {
                acc = &acc + &div_weights(d, gd.ell, r - l - k, r + l, bound)?;
            }
        }
        if let Some(m) = g.eq_up_to(&acc, bound)? {
            return Ok(Some(((l, k), m)));
        }
    }
    Ok(None)
}

/// The conjugate pair relative to `aq^k`: `γ_L = Γ_{L,k}` and
/// `δ_L = Δ_{L+k,k}/(aq)_k`, for `L = 0..=M-k`.
pub fn hl_conjugate(p: &HlParams, k: i64, bound: Exponent) -> Result<ConjugatePair> {
    if k < 0 || k > p.m {
        return Err(Error::InvalidParameters(format!(
            "need 0 <= k <= M, got k={k}, M={}",
            p.m
        )));
    }
    let top = p.m - k;
    let gamma = (0..=top)
        .map(|l| hl_gamma(p, l, k, bound, BinomialKind::Primed))
        .collect::<Result<Vec<_>>>()?;
    let delta = (0..=top)
        .map(|l| {
            div_qpoch(
                &hl_delta(p, l + k, k, bound)?,
                int(p.ell() + 1),
                int(1),
                k,
                bound,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugatePair {
        ell: p.ell() + k,
        gamma,
        delta,
        delta_support: Some(top),
        gamma_tail: Tail::Zero,
        delta_tail: Tail::Zero,
    })
}

/// The `k = 0` conjugate pair written with ordinary Gaussian polynomials.
pub fn hl_conjugate_unprimed(p: &HlParams, bound: Exponent) -> Result<ConjugatePair> {
    let gamma = (0..=p.m)
        .map(|l| hl_gamma(p, l, 0, bound, BinomialKind::Unprimed))
        .collect::<Result<Vec<_>>>()?;
    let delta = (0..=p.m)
        .map(|l| hl_delta(p, l, 0, bound))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugatePair {
        ell: p.ell(),
        gamma,
        delta,
        delta_support: Some(p.m),
        gamma_tail: Tail::Zero,
        delta_tail: Tail::Zero,
    })
}
