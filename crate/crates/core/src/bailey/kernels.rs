//! Conjugate pairs transported along a Bailey-pair transform written as
//! lower-triangular kernels `α' = P α`, `β' = Q β`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qtools::div_qpoch;
use crate::series::{int, Exponent, LaurentSeries};

use super::pairs::{ConjugatePair, Tail};

/// Kernels of a map from pairs relative to `a` to pairs relative to `ab`,
/// `b = q^{b_exp}`; absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformKernel {
    pub p: BTreeMap<(i64, i64), LaurentSeries>,
    pub q: BTreeMap<(i64, i64), LaurentSeries>,
    pub b_exp: i64,
}

impl TransformKernel {
    pub fn identity(size: i64) -> Self {
        let diag: BTreeMap<_, _> = (0..=size).map(|l| ((l, l), LaurentSeries::one())).collect();
        TransformKernel {
            p: diag.clone(),
            q: diag,
            b_exp: 0,
        }
    }

    /// Kernels of the two-parameter transform with both ρ infinite:
    /// `P_{L,L} = a^L q^{L²}` and `Q_{L,k} = a^k q^{k²}/(q)_{L-k}`.
    pub fn infinite_rho(ell: i64, size: i64, bound: Exponent) -> Result<Self> {
        let mut p = BTreeMap::new();
        let mut q = BTreeMap::new();
        for l in 0..=size {
            p.insert((l, l), LaurentSeries::q_pow(int(ell * l + l * l)));
            for k in 0..=l {
                let w = LaurentSeries::q_pow(int(ell * k + k * k));
                q.insert((l, k), div_qpoch(&w, int(1), int(1), l - k, bound)?);
            }
        }
        Ok(TransformKernel { p, q, b_exp: 0 })
    }
}

/// `γ'_L = Σ_{k>=L} P_{k,L} γ_k`, `δ'_L = Σ_{k>=L} Q_{k,L} δ_k`, a conjugate
/// pair relative to `a b^{-1}`.
pub fn conjugate_transform(
    cp: &ConjugatePair,
    kernel: &TransformKernel,
    bound: Exponent,
) -> Result<ConjugatePair> {
    let Some(m) = cp.delta_support else {
        return Err(Error::NonTerminatingSum(
            "transporting a conjugate pair needs finite δ support".into(),
        ));
    };
    let m = m.min(cp.l_max());
    let column = |ker: &BTreeMap<(i64, i64), LaurentSeries>, xs: &[LaurentSeries], l: i64| {
        let mut acc = LaurentSeries::zero_to(bound);
        for k in l..=m {
            if let Some(w) = ker.get(&(k, l)) {
                let x = &xs[k as usize];
                if !x.is_zero() && !w.is_zero() {
                    acc = &acc + &(w * x).truncate(bound);
                }
            }
        }
        acc
    };
    let gamma = (0..=m).map(|l| column(&kernel.p, &cp.gamma, l)).collect();
    let delta = (0..=m).map(|l| column(&kernel.q, &cp.delta, l)).collect();
    Ok(ConjugatePair {
        ell: cp.ell - kernel.b_exp,
        gamma,
        delta,
        delta_support: Some(m),
        gamma_tail: Tail::Zero,
        delta_tail: Tail::Zero,
    })
}
