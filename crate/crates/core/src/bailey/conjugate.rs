//! The two-parameter family of conjugate pairs and its half-factor kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtools::{div_qpoch, limit_shifted_factorial, qpoch};
use crate::series::{int, Exponent, LaurentSeries};

use super::pairs::{div_weights, ConjugatePair, QuadFloor, Tail};

/// `ρ = q^c` or the limit `ρ → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoParam {
    Finite(Exponent),
    Infinity,
}

/// Kernels built from `(ρ_1)_r (ρ_2)_r (x/ρ_1ρ_2)^r`, `(x/ρ_1)_L (x/ρ_2)_L`
/// and `(x/ρ_1ρ_2)_n` with `x = q^{x_exp}`, in the normalization where the
/// `ρ → ∞` limit is finite.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RhoKernel {
    pub x: i64,
    pub r1: RhoParam,
    pub r2: RhoParam,
}

fn half_h(rho: RhoParam, r: i64) -> Result<LaurentSeries> {
    match rho {
        // (ρ)_r ρ^{-r}
        RhoParam::Finite(c) => Ok(qpoch(c, r)?.shift(-c * int(r))),
        RhoParam::Infinity => Ok(limit_shifted_factorial(r)),
    }
}

impl RhoKernel {
    pub fn new(x: i64, r1: RhoParam, r2: RhoParam) -> Self {
        RhoKernel { x, r1, r2 }
    }

    /// `(ρ_1)_r (ρ_2)_r (ρ_1ρ_2)^{-r}`, exact.
    pub fn h(&self, r: i64) -> Result<LaurentSeries> {
        Ok(&half_h(self.r1, r)? * &half_h(self.r2, r)?)
    }

    /// `x^r (ρ_1)_r (ρ_2)_r (ρ_1ρ_2)^{-r}`, exact.
    pub fn weight(&self, r: i64) -> Result<LaurentSeries> {
        Ok(self.h(r)?.shift(int(self.x * r)))
    }

    /// `s / ((x/ρ_1)_L (x/ρ_2)_L)`, known below `bound`.
    pub fn div_d(&self, s: &LaurentSeries, l: i64, bound: Exponent) -> Result<LaurentSeries> {
        let mut acc = s.truncate(bound);
        for rho in [self.r1, self.r2] {
            if let RhoParam::Finite(c) = rho {
                acc = div_qpoch(&acc, int(self.x) - c, int(1), l, bound)?;
            }
        }
        Ok(acc)
    }

    /// `(x/ρ_1ρ_2)_n`, which is 1 once either ρ is infinite.
    pub fn mid(&self, n: i64) -> Result<LaurentSeries> {
        match (self.r1, self.r2) {
            (RhoParam::Finite(c1), RhoParam::Finite(c2)) => qpoch(int(self.x) - c1 - c2, n),
            _ => Ok(LaurentSeries::one()),
        }
    }

    /// Rejects finite exponents that would invert a factor `(1 - q^0)`.
    pub fn check(&self, max_len: i64) -> Result<()> {
        for rho in [self.r1, self.r2] {
            if let RhoParam::Finite(c) = rho {
                let start = int(self.x) - c;
                if start.is_integer() && start <= int(0) && start > int(-max_len) {
                    return Err(Error::InvalidParameters(format!(
                        "ρ = q^{c} makes (x/ρ)_L vanish at x = q^{}",
                        self.x
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The conjugate pair with parameters `ρ_1, ρ_2` and `M` relative to `q^ℓ`,
/// stored for `L = 0..=M`.
///
/// `M = None` is the `M → ∞` limit, available when both ρ are infinite:
/// `γ_L = a^L q^{L²}/(aq)_∞` and `δ_L = a^L q^{L²}`, stored up to
/// `l_max`.
pub fn classical_conjugate(
    ell: i64,
    r1: RhoParam,
    r2: RhoParam,
    m: Option<i64>,
    l_max: i64,
    bound: Exponent,
) -> Result<ConjugatePair> {
    let k = RhoKernel::new(ell + 1, r1, r2);
    let Some(m) = m else {
        if r1 != RhoParam::Infinity || r2 != RhoParam::Infinity {
            return Err(Error::InvalidParameters(
                "the M → ∞ limit needs both ρ infinite".into(),
            ));
        }
        return infinite_limit(ell, l_max, bound);
    };
    if m < 0 {
        return Err(Error::InvalidParameters(format!("M = {m} must be >= 0")));
    }
    k.check(m + 1)?;
    let mut gamma = Vec::with_capacity(m as usize + 1);
    let mut delta = Vec::with_capacity(m as usize + 1);
    for l in 0..=m {
        let f = k.weight(l)?;
        // γ_L = F(L)/(D(L) (q)_{M-L} (aq)_{M+L})
        let g = k.div_d(&f, l, bound)?;
        gamma.push(div_weights(&g, ell, m - l, m + l, bound)?);
        // δ_L = F(L) mid(M-L)/(D(M) (q)_{M-L})
        let num = &f * &k.mid(m - l)?;
        let d = div_qpoch(&num, int(1), int(1), m - l, bound)?;
        delta.push(k.div_d(&d, m, bound)?);
    }
    Ok(ConjugatePair {
        ell,
        gamma,
        delta,
        delta_support: Some(m),
        gamma_tail: Tail::Zero,
        delta_tail: Tail::Zero,
    })
}

fn infinite_limit(ell: i64, l_max: i64, bound: Exponent) -> Result<ConjugatePair> {
    let floor = Tail::Floor(QuadFloor::new(int(1), int(ell), int(0)));
    let mut gamma = Vec::new();
    let mut delta = Vec::new();
    for l in 0..=l_max {
        let d = LaurentSeries::q_pow(int(ell * l + l * l));
        let ends = bound.ceil().to_integer().max(0);
        gamma.push(div_weights(&d, ell, 0, ends, bound)?);
        delta.push(d);
    }
    Ok(ConjugatePair {
        ell,
        gamma,
        delta,
        delta_support: None,
        gamma_tail: floor,
        delta_tail: floor,
    })
}
