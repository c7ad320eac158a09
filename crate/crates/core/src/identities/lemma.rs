//! Both sides of the higher-level Bailey lemma and of the bilateral
//! identity built from the chained pairs.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::bailey::{delta_inner, BaileyPair, QuadFloor, Tail};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_eta_nonneg, Partition, SigmaContext};
use crate::qtools::div_qpoch;
use crate::series::{int, Exponent, LaurentSeries};

/// `-e_λ C^{-1} e_λ / 4`, a lower bound of `η C^{-1}(η - e_λ)` over real η.
pub(crate) fn quad_floor(ctx: &SigmaContext) -> Rational64 {
    let cd = ctx.cartan();
    let el = ctx.e_lambda();
    -Rational64::new(cd.scaled_bilinear(el, el), 4 * ctx.n())
}

/// `Σ_{η>=0} q^{η C^{-1}(η - e_λ)}/((q)_{η_1} ··· (q)_{η_{N-1}})` restricted
/// to the σ class at `L`, known below `bound`.
pub fn eta_sum(ctx: &SigmaContext, l: i64, bound: Exponent) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::zero_to(bound);
    for (eta, e) in enumerate_eta_nonneg(ctx, l, bound)? {
        let mut t = LaurentSeries::q_pow(e).truncate(bound);
        for &h in &eta {
            t = div_qpoch(&t, int(1), int(1), h, bound)?;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// Last `L` whose term `q^{(ℓL+L²)/N} x_L (...)` can reach below `bound`,
/// given the valuation floor of `x` and a lower bound `inner` on the
/// valuation of the lattice sum.
pub(crate) fn l_range(
    tail: &Tail,
    stored: i64,
    ell: i64,
    n: i64,
    inner: Rational64,
    bound: Exponent,
    what: &str,
) -> Result<i64> {
    match tail {
        Tail::Zero => Ok(stored),
        Tail::Floor(f) => {
            let g = f.plus(&QuadFloor::new(
                Rational64::new(1, n),
                Rational64::new(ell, n),
                inner,
            ));
            let from = g.reaches(bound).ok_or_else(|| {
                Error::NonTerminatingSum(format!("{what}: valuation floor does not grow"))
            })?;
            if from - 1 > stored {
                return Err(Error::NonTerminatingSum(format!(
                    "{what}: terms needed up to L={}, pair stored up to {stored}",
                    from - 1
                )));
            }
            Ok(from - 1)
        }
        Tail::Unknown => Err(Error::NonTerminatingSum(format!(
            "{what}: no valuation floor"
        ))),
    }
}

fn lemma_ctx(bp: &BaileyPair, n: i64, lambda: &Partition, sigma: i64) -> Result<SigmaContext> {
    SigmaContext::new(n, bp.ell, lambda.clone(), sigma)
}

/// `(1/(aq)_∞) Σ_L a^{L/N} q^{L²/N} α_L Σ_η q^{η C^{-1}(η-e_λ)}/(q)_η`.
pub fn hl_lemma_lhs(
    bp: &BaileyPair,
    n: i64,
    lambda: &Partition,
    sigma: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    let ctx = lemma_ctx(bp, n, lambda, sigma)?;
    let c = quad_floor(&ctx);
    let ell = bp.ell;
    let last = l_range(
        &bp.alpha_tail,
        bp.alpha.len() as i64 - 1,
        ell,
        n,
        c,
        bound,
        "Σ α",
    )?;
    let terms: Vec<(i64, Rational64, &LaurentSeries)> = (0..=last)
        .filter(|&l| !bp.alpha[l as usize].is_zero())
        .map(|l| {
            (
                l,
                Rational64::new(ell * l + l * l, n),
                &bp.alpha[l as usize],
            )
        })
        .collect();
    // the η sum depends on L only through L mod N
    let sums = class_sums(
        &ctx,
        terms
            .iter()
            .map(|&(l, e, a)| (l, e + a.valuation().unwrap_or_else(|| int(0)))),
        bound,
    )?;
    let mut acc = LaurentSeries::zero_to(bound);
    for (l, lead, a) in terms {
        let e = &sums[&l.rem_euclid(n)];
        acc = &acc + &(a * e).shift(lead).truncate(bound);
    }
    div_aq_inf(&acc, ell, bound)
}

/// `s/(q^{ℓ+1})_∞` known below `bound`.
pub(crate) fn div_aq_inf(s: &LaurentSeries, ell: i64, bound: Exponent) -> Result<LaurentSeries> {
    let low = s.valuation().unwrap_or_else(|| int(0)).min(int(0));
    let ends = (bound - low).ceil().to_integer().max(0);
    div_qpoch(s, int(ell + 1), int(1), ends, bound)
}

/// The η sum for each residue class of `L` mod N that occurs among `uses`,
/// each `(L, v)` needing the sum below `bound - v`.
pub(crate) fn class_sums(
    ctx: &SigmaContext,
    uses: impl Iterator<Item = (i64, Rational64)>,
    bound: Exponent,
) -> Result<HashMap<i64, LaurentSeries>> {
    let n = ctx.n();
    let mut need: HashMap<i64, (i64, Rational64)> = HashMap::new();
    for (l, v) in uses {
        let rel = bound - v;
        let slot = need.entry(l.rem_euclid(n)).or_insert((l, rel));
        if rel > slot.1 {
            slot.1 = rel;
        }
    }
    need.into_iter()
        .map(|(key, (l, rel))| Ok((key, eta_sum(ctx, l, rel)?)))
        .collect()
}

/// `Σ_L a^{L/N} q^{L²/N} β_L Σ_n q^{n C^{-1}(n-e_λ)} ∏ [m_j+n_j; n_j]`.
pub fn hl_lemma_rhs(
    bp: &BaileyPair,
    n: i64,
    lambda: &Partition,
    sigma: i64,
    bound: Exponent,
) -> Result<LaurentSeries> {
    let ctx = lemma_ctx(bp, n, lambda, sigma)?;
    let c = quad_floor(&ctx);
    let ell = bp.ell;
    let last = l_range(
        &bp.beta_tail,
        bp.beta.len() as i64 - 1,
        ell,
        n,
        c,
        bound,
        "Σ β",
    )?;
    let mut acc = LaurentSeries::zero_to(bound);
    for l in 0..=last {
        let b = &bp.beta[l as usize];
        if b.is_zero() {
            continue;
        }
        let lead = Rational64::new(ell * l + l * l, n);
        acc = &acc + &(b * &delta_inner(&ctx, l)).shift(lead).truncate(bound);
    }
    Ok(acc)
}

/// A cell of the bilateral identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCell {
    pub n: i64,
    pub delta: i64,
    pub k: i64,
    pub i: i64,
    pub lambda: Partition,
    pub sigma: i64,
}

impl IdentityCell {
    pub fn new(n: i64, delta: i64, k: i64, i: i64, lambda: Partition, sigma: i64) -> Result<Self> {
        if delta != 0 && delta != 1 {
            return Err(Error::InvalidParameters(format!(
                "δ must be 0 or 1, got {delta}"
            )));
        }
        if k < 2 || i < 1 || i > k {
            return Err(Error::InvalidParameters(format!(
                "need k >= 2 and 1 <= i <= k, got k={k}, i={i}"
            )));
        }
        SigmaContext::new(n, 0, lambda.clone(), sigma)?;
        Ok(IdentityCell {
            n,
            delta,
            k,
            i,
            lambda,
            sigma,
        })
    }

    fn ctx(&self) -> SigmaContext {
        SigmaContext::new(self.n, 0, self.lambda.clone(), self.sigma).expect("validated in new")
    }

    /// Whether the cell lies in the range of the single-sum product corollary
    /// (`i <= k + δ - 1`) as well as the theorem's (`i <= k`).
    pub fn in_product_range(&self) -> bool {
        self.i < self.k + self.delta
    }
}

/// `(1/(q)_∞) Σ_{j∈Z} (-1)^j q^{((2k+δ-2+2/N)j + 2k-2i+δ)j/2} Σ_η (...)`, the
/// η sum taken with `ℓ = 0` at `j`.
pub fn thm44_lhs(cell: &IdentityCell, bound: Exponent) -> Result<LaurentSeries> {
    let ctx = cell.ctx();
    let n = cell.n;
    let c = quad_floor(&ctx);
    let a2 = Rational64::new((2 * cell.k + cell.delta - 2) * n + 2, 2 * n);
    let a1 = Rational64::new(2 * cell.k - 2 * cell.i + cell.delta, 2);
    let expo = |j: i64| a2 * int(j * j) + a1 * int(j);
    // j >= 0 and j < 0 separately; each side's exponent increases in |j|
    // once past the vertex
    let mut js = Vec::new();
    for dir in [1i64, -1] {
        let mut j = if dir == 1 { 0 } else { -1 };
        loop {
            let e = expo(j);
            if e + c < bound {
                js.push((j, e));
            } else if past_vertex(a2, a1, j) {
                break;
            }
            j += dir;
        }
    }
    let sums = class_sums(&ctx, js.iter().copied(), bound)?;
    let mut acc = LaurentSeries::zero_to(bound);
    for (j, e) in js {
        let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
        acc = &acc + &sums[&j.rem_euclid(n)].shift(e).scale(sign).truncate(bound);
    }
    div_aq_inf(&acc, 0, bound)
}

/// Whether the quadratic `a2 j² + a1 j` is increasing in `|j|` from `j` on.
fn past_vertex(a2: Rational64, a1: Rational64, j: i64) -> bool {
    let vertex = -a1 / (int(2) * a2);
    if j >= 0 {
        int(j) >= vertex
    } else {
        int(j) <= vertex
    }
}

/// `Σ_{r_1>=...>=r_{k-1}>=0} q^{r_1²/N + r_2²+...+r_{k-1}² + r_i+...+r_{k-1}}
/// / ((q)_{r_1-r_2} ··· (q^{2-δ};q^{2-δ})_{r_{k-1}})` times the Δ-type sum
/// at `r_1`, enumerated directly.
pub fn thm44_rhs(cell: &IdentityCell, bound: Exponent) -> Result<LaurentSeries> {
    let ctx = cell.ctx();
    let n = cell.n;
    let c = quad_floor(&ctx);
    let (k, i, d) = (cell.k, cell.i, cell.delta);
    let mut acc = LaurentSeries::zero_to(bound);
    let mut r1 = 0;
    while Rational64::new(r1 * r1, n) + c < bound {
        let inner = delta_inner(&ctx, r1);
        if !inner.is_zero() {
            let mut chains = Vec::new();
            let mut cur = vec![r1];
            let head = Rational64::new(r1 * r1, n) + if i == 1 { int(r1) } else { int(0) } + c;
            descend(&mut cur, head, k, i, bound, &mut chains);
            for r in chains {
                let mut e = Rational64::new(r[0] * r[0], n);
                for (idx, &x) in r.iter().enumerate() {
                    let j = idx as i64 + 1;
                    if j >= 2 {
                        e += int(x * x);
                    }
                    if j >= i {
                        e += int(x);
                    }
                }
                let mut t = inner.shift(e).truncate(bound);
                for w in r.windows(2) {
                    t = div_qpoch(&t, int(1), int(1), w[0] - w[1], bound)?;
                }
                let last = *r.last().expect("k >= 2");
                t = div_qpoch(&t, int(2 - d), int(2 - d), last, bound)?;
                acc = &acc + &t;
            }
        }
        r1 += 1;
    }
    Ok(acc)
}

/// Extends the chain `cur` by `r_{len+1} <= r_len` while the exponent lower
/// bound `floor` stays below `bound`.
fn descend(
    cur: &mut Vec<i64>,
    floor: Rational64,
    k: i64,
    i: i64,
    bound: Exponent,
    out: &mut Vec<Vec<i64>>,
) {
    if cur.len() as i64 == k - 1 {
        out.push(cur.clone());
        return;
    }
    let j = cur.len() as i64 + 1;
    let top = *cur.last().expect("non-empty");
    for r in 0..=top {
        let add = int(r * r) + if j >= i { int(r) } else { int(0) };
        if floor + add >= bound {
            break;
        }
        cur.push(r);
        descend(cur, floor + add, k, i, bound, out);
        cur.pop();
    }
}
