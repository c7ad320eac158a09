//! Bailey pairs, conjugate pairs and the pairing identity.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtools::div_qpoch;
use crate::series::{int, Exponent, LaurentSeries, Mismatch};

/// Quadratic lower bound `a2 L² + a1 L + a0` on the valuation of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadFloor {
    pub a2: Rational64,
    pub a1: Rational64,
    pub a0: Rational64,
}

impl QuadFloor {
    pub fn new(a2: Rational64, a1: Rational64, a0: Rational64) -> Self {
        QuadFloor { a2, a1, a0 }
    }

    pub fn constant(a0: Rational64) -> Self {
        QuadFloor::new(Rational64::zero(), Rational64::zero(), a0)
    }

    pub fn eval(&self, l: i64) -> Rational64 {
        let l = int(l);
        self.a2 * l * l + self.a1 * l + self.a0
    }

    pub fn plus(&self, o: &QuadFloor) -> QuadFloor {
        QuadFloor::new(self.a2 + o.a2, self.a1 + o.a1, self.a0 + o.a0)
    }

    /// Smallest `L0 >= 0` with `eval(L) >= bound` for every `L >= L0`, if the
    /// floor grows.
    pub fn reaches(&self, bound: Rational64) -> Option<i64> {
        if self.a2.is_negative() || (self.a2.is_zero() && !self.a1.is_positive()) {
            return None;
        }
        // past the vertex the floor is increasing
        let start = if self.a2.is_positive() {
            (-self.a1 / (int(2) * self.a2)).ceil().to_integer().max(0)
        } else {
            0
        };
        let mut l = start;
        while self.eval(l) < bound {
            l += 1;
        }
        // walk back while the tail condition still holds
        while l > 0 && l > start && self.eval(l - 1) >= bound {
            l -= 1;
        }
        Some(l)
    }
}

/// What is known about a sequence beyond its stored entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// Every later entry vanishes.
    Zero,
    /// Every entry (stored or not) has valuation at least the floor.
    Floor(QuadFloor),
    Unknown,
}

impl Tail {
    fn floor(&self) -> Option<QuadFloor> {
        match self {
            Tail::Floor(f) => Some(*f),
            _ => None,
        }
    }
}

/// `(α, β)` relative to `a = q^ℓ`, stored for `L = 0..=L_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaileyPair {
    pub ell: i64,
    pub alpha: Vec<LaurentSeries>,
    pub beta: Vec<LaurentSeries>,
    pub alpha_tail: Tail,
    pub beta_tail: Tail,
}

impl BaileyPair {
    pub fn l_max(&self) -> i64 {
        self.alpha.len().min(self.beta.len()) as i64 - 1
    }

    /// Largest index with nonzero α when the α tail is known to vanish.
    pub fn support_bound(&self) -> Option<i64> {
        if self.alpha_tail != Tail::Zero {
            return None;
        }
        Some(
            self.alpha
                .iter()
                .rposition(|a| !a.is_zero())
                .map_or(0, |p| p as i64),
        )
    }

    /// The unit pair `α = (1, 0, 0, ...)`.
    pub fn unit(ell: i64, l_max: i64, bound: Exponent) -> Result<BaileyPair> {
        let mut alpha = vec![LaurentSeries::zero(); l_max as usize + 1];
        alpha[0] = LaurentSeries::one();
        beta_from_alpha(ell, alpha, Tail::Zero, bound)
    }
}

/// `(γ, δ)` relative to `a = q^ℓ`, stored for `L = 0..=L_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    pub ell: i64,
    pub gamma: Vec<LaurentSeries>,
    pub delta: Vec<LaurentSeries>,
    /// `δ_r = 0` (and hence `γ_r = 0`) for `r` beyond this index.
    pub delta_support: Option<i64>,
    pub gamma_tail: Tail,
    pub delta_tail: Tail,
}

impl ConjugatePair {
    pub fn l_max(&self) -> i64 {
        self.gamma.len().min(self.delta.len()) as i64 - 1
    }
}

/// First index where a defining relation fails, with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMismatch {
    pub index: i64,
    pub mismatch: Mismatch,
}

/// `1/((q)_m (q^{ℓ+1})_n)` applied to `s`, known below `bound`.
pub(crate) fn div_weights(
    s: &LaurentSeries,
    ell: i64,
    m: i64,
    n: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    let t = div_qpoch(s, int(1), int(1), m, bound)?;
    div_qpoch(&t, int(ell + 1), int(1), n, bound)
}

/// `β_L = Σ_{r<=L} α_r/((q)_{L-r}(aq)_{L+r})` for every stored `L`.
pub fn beta_values(
    ell: i64,
    alpha: &[LaurentSeries],
    bound: Exponent,
) -> Result<Vec<LaurentSeries>> {
    (0..alpha.len() as i64)
        .map(|l| {
            let mut acc = LaurentSeries::zero_to(bound);
            for r in 0..=l {
                let a = &alpha[r as usize];
                if !a.is_zero() {
                    acc = &acc + &div_weights(a, ell, l - r, l + r, bound)?;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Builds a Bailey pair from its α sequence.
pub fn beta_from_alpha(
    ell: i64,
    alpha: Vec<LaurentSeries>,
    alpha_tail: Tail,
    bound: Exponent,
) -> Result<BaileyPair> {
    let beta = beta_values(ell, &alpha, bound)?;
    Ok(BaileyPair {
        ell,
        alpha,
        beta,
        alpha_tail,
        beta_tail: Tail::Unknown,
    })
}

/// Number of `r >= L` that contribute to `γ_L` below `bound`.
fn gamma_range(
    l: i64,
    support: Option<i64>,
    tail: &Tail,
    stored: i64,
    bound: Exponent,
) -> Result<i64> {
    if let Some(m) = support {
        return Ok(m);
    }
    match tail {
        Tail::Zero => Ok(stored),
        Tail::Floor(f) => {
            let last = f
                .reaches(bound)
                .ok_or_else(|| Error::NonTerminatingSum("δ floor does not grow".into()))?;
            let last = (last - 1).max(l);
            if last > stored {
                return Err(Error::NonTerminatingSum(format!(
                    "δ needed up to {last}, stored up to {stored}"
                )));
            }
            Ok(last)
        }
        Tail::Unknown => Err(Error::NonTerminatingSum(
            "δ has neither finite support nor a growing floor".into(),
        )),
    }
}

/// `γ_L = Σ_{r>=L} δ_r/((q)_{r-L}(aq)_{r+L})` for `L = 0..=l_max`.
pub fn gamma_values(
    ell: i64,
    delta: &[LaurentSeries],
    delta_support: Option<i64>,
    delta_tail: &Tail,
    l_max: i64,
    bound: Exponent,
) -> Result<Vec<LaurentSeries>> {
    let stored = delta.len() as i64 - 1;
    if let Some(m) = delta_support {
        if m > stored {
            return Err(Error::InvalidParameters(format!(
                "δ support {m} exceeds stored length {stored}"
            )));
        }
    }
    (0..=l_max)
        .map(|l| {
            let last = gamma_range(l, delta_support, delta_tail, stored, bound)?;
            let mut acc = LaurentSeries::zero_to(bound);
            for r in l..=last {
                let d = &delta[r as usize];
                if !d.is_zero() {
                    acc = &acc + &div_weights(d, ell, r - l, r + l, bound)?;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Builds a conjugate pair from its δ sequence.
pub fn gamma_from_delta(
    ell: i64,
    delta: Vec<LaurentSeries>,
    delta_support: Option<i64>,
    delta_tail: Tail,
    l_max: i64,
    bound: Exponent,
) -> Result<ConjugatePair> {
    let gamma = gamma_values(ell, &delta, delta_support, &delta_tail, l_max, bound)?;
    Ok(ConjugatePair {
        ell,
        gamma,
        delta,
        delta_support,
        gamma_tail: Tail::Unknown,
        delta_tail,
    })
}

fn first_mismatch(
    lhs: &[LaurentSeries],
    rhs: &[LaurentSeries],
    bound: Exponent,
) -> Result<Option<PairMismatch>> {
    for (l, (a, b)) in lhs.iter().zip(rhs).enumerate() {
        if let Some(m) = a.eq_up_to(b, bound)? {
            return Ok(Some(PairMismatch {
                index: l as i64,
                mismatch: m,
            }));
        }
    }
    Ok(None)
}

/// Checks the Bailey relation on every stored index below `bound`.
pub fn verify_bailey(bp: &BaileyPair, bound: Exponent) -> Result<Option<PairMismatch>> {
    let n = bp.l_max() as usize + 1;
    let beta = beta_values(bp.ell, &bp.alpha[..n], bound)?;
    first_mismatch(&bp.beta[..n], &beta, bound)
}

/// Checks the conjugate relation on every stored γ below `bound`.
pub fn verify_conjugate(cp: &ConjugatePair, bound: Exponent) -> Result<Option<PairMismatch>> {
    let l_max = cp.gamma.len() as i64 - 1;
    let gamma = gamma_values(
        cp.ell,
        &cp.delta,
        cp.delta_support,
        &cp.delta_tail,
        l_max,
        bound,
    )?;
    first_mismatch(&cp.gamma, &gamma, bound)
}

/// Last index that matters in `Σ_L x_L y_L` below `bound`.
fn pairing_range(
    support: Option<i64>,
    left: &Tail,
    right: &Tail,
    stored: i64,
    bound: Exponent,
    what: &str,
) -> Result<i64> {
    if let Some(m) = support {
        if m > stored {
            return Err(Error::NonTerminatingSum(format!(
                "{what}: support {m} beyond stored index {stored}"
            )));
        }
        return Ok(m);
    }
    if *left == Tail::Zero || *right == Tail::Zero {
        return Ok(stored);
    }
    let (Some(f), Some(g)) = (left.floor(), right.floor()) else {
        return Err(Error::NonTerminatingSum(format!(
            "{what}: no valuation floor"
        )));
    };
    let from = f.plus(&g).reaches(bound).ok_or_else(|| {
        Error::NonTerminatingSum(format!("{what}: valuation floor does not grow"))
    })?;
    if from - 1 > stored {
        return Err(Error::NonTerminatingSum(format!(
            "{what}: terms needed up to {}, stored up to {stored}",
            from - 1
        )));
    }
    Ok(from - 1)
}

/// Both sides `Σ α_L γ_L` and `Σ β_L δ_L` of the pairing identity.
pub fn pairing_sum(
    bp: &BaileyPair,
    cp: &ConjugatePair,
    bound: Exponent,
) -> Result<(LaurentSeries, LaurentSeries)> {
    if bp.ell != cp.ell {
        return Err(Error::ModulusMismatch {
            left: bp.ell,
            right: cp.ell,
        });
    }
    let stored = bp.l_max().min(cp.l_max());
    let ag = pairing_range(
        cp.delta_support,
        &bp.alpha_tail,
        &cp.gamma_tail,
        stored,
        bound,
        "Σ α γ",
    )?;
    let bd = pairing_range(
        cp.delta_support,
        &bp.beta_tail,
        &cp.delta_tail,
        stored,
        bound,
        "Σ β δ",
    )?;
    let side = |x: &[LaurentSeries], y: &[LaurentSeries], last: i64| {
        let mut acc = LaurentSeries::zero_to(bound);
        for l in 0..=last.max(-1) {
            let (a, b) = (&x[l as usize], &y[l as usize]);
            if !a.is_zero() && !b.is_zero() {
                acc = &acc + &(a * b).truncate(bound);
            }
        }
        acc
    };
    Ok((
        side(&bp.alpha, &cp.gamma, ag),
        side(&bp.beta, &cp.delta, bd),
    ))
}
