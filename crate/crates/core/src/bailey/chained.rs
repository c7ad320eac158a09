//! Seed pairs relative to `q` and `1`, and the pairs obtained from them by
//! chains of transforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtools::div_qpoch;
use crate::series::{int, rat, Exponent, LaurentSeries};

use super::conjugate::RhoParam;
use super::pairs::{BaileyPair, PairMismatch, QuadFloor, Tail};
use super::transforms::{transform_ab, transform_chain_q, transform_lattice, transform_lattice2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seed {
    /// Relative to `q`, with `β_L = δ_{L,0}`.
    I,
    /// Relative to `q`, with `β_L = 1/(q²;q²)_L`.
    II,
    /// Relative to `1`, with `β_L = q^L/(q^{2-δ};q^{2-δ})_L`.
    III(i64),
}

/// `1 + q + ... + q^{2L}`, i.e. `(q²)_{2L}/(q)_{2L}`.
fn odd_block(l: i64) -> LaurentSeries {
    LaurentSeries::from_ints(&vec![1; 2 * l as usize + 1])
}

fn sign(l: i64) -> i64 {
    if l % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `α_L = (-1)^L q^{(A L - B) L/2} (1 + q^{C L})` for `L >= 1`, `α_0 = 1`.
fn two_term_alpha(l: i64, a: i64, b: i64, c: i64) -> LaurentSeries {
    if l == 0 {
        return LaurentSeries::one();
    }
    LaurentSeries::term(sign(l), rat((a * l - b) * l, 2)).mul_binomial(int(c * l), 1)
}

pub fn seed_pair(seed: Seed, l_max: i64, bound: Exponent) -> Result<BaileyPair> {
    let ls = 0..=l_max;
    match seed {
        Seed::I => Ok(BaileyPair {
            ell: 1,
            alpha: ls
                .clone()
                .map(|l| odd_block(l).shift(int(l * (l - 1) / 2)).scale(sign(l)))
                .collect(),
            beta: ls
                .map(|l| {
                    if l == 0 {
                        LaurentSeries::one()
                    } else {
                        LaurentSeries::zero()
                    }
                })
                .collect(),
            alpha_tail: Tail::Floor(QuadFloor::new(rat(1, 2), rat(-1, 2), int(0))),
            beta_tail: Tail::Zero,
        }),
        Seed::II => Ok(BaileyPair {
            ell: 1,
            alpha: ls
                .clone()
                .map(|l| odd_block(l).shift(int(l * l)).scale(sign(l)))
                .collect(),
            beta: ls
                .map(|l| div_qpoch(&LaurentSeries::one(), int(2), int(2), l, bound))
                .collect::<Result<_>>()?,
            alpha_tail: Tail::Floor(QuadFloor::new(int(1), int(0), int(0))),
            beta_tail: Tail::Floor(QuadFloor::constant(int(0))),
        }),
        Seed::III(d) => {
            check_delta(d)?;
            Ok(BaileyPair {
                ell: 0,
                alpha: ls
                    .clone()
                    .map(|l| two_term_alpha(l, d + 2, d + 2, d + 2))
                    .collect(),
                beta: ls
                    .map(|l| {
                        div_qpoch(
                            &LaurentSeries::q_pow(int(l)),
                            int(2 - d),
                            int(2 - d),
                            l,
                            bound,
                        )
                    })
                    .collect::<Result<_>>()?,
                alpha_tail: Tail::Floor(QuadFloor::new(rat(d + 2, 2), rat(-(d + 2), 2), int(0))),
                beta_tail: Tail::Floor(QuadFloor::new(int(0), int(1), int(0))),
            })
        }
    }
}

fn check_delta(d: i64) -> Result<()> {
    if d != 0 && d != 1 {
        return Err(Error::InvalidParameters(format!(
            "δ must be 0 or 1, got {d}"
        )));
    }
    Ok(())
}

/// One way of building the `(k, i, δ)` pair from a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ChainRoute {
    /// The q-weighted chain transform applied `steps` times to seed (III).
    Chain { steps: i64 },
    /// Two-parameter transforms, then the `x = aq` lattice transform.
    Lattice2 { before: i64, after: i64 },
    /// Two-parameter transforms, then the `x = a` lattice transform.
    Lattice { before: i64, after: i64 },
}

fn check_cell(k: i64, i: i64, d: i64) -> Result<()> {
    check_delta(d)?;
    if k < 2 || i < 1 || i > k {
        return Err(Error::InvalidParameters(format!(
            "need k >= 2 and 1 <= i <= k, got k={k}, i={i}"
        )));
    }
    Ok(())
}

/// Every transform route producing the `(k, i, δ)` pair; empty for
/// `(2, 2, 0)`, which is available only in closed form.
pub fn chain_routes(k: i64, i: i64, d: i64) -> Result<Vec<ChainRoute>> {
    check_cell(k, i, d)?;
    let mut out = Vec::new();
    if i == 1 {
        out.push(ChainRoute::Chain { steps: k - 2 });
        return Ok(out);
    }
    if i < k + d {
        out.push(ChainRoute::Lattice2 {
            before: k - i + d - 1,
            after: i - 2,
        });
    }
    if i >= 3 {
        out.push(ChainRoute::Lattice {
            before: k - i + d,
            after: i - 3,
        });
    }
    Ok(out)
}

/// Builds the pair along `route`, all ρ infinite.
pub fn compose_route(route: ChainRoute, d: i64, l_max: i64, bound: Exponent) -> Result<BaileyPair> {
    let inf = RhoParam::Infinity;
    let ab = |p: BaileyPair, n: i64| -> Result<BaileyPair> {
        let mut p = p;
        for _ in 0..n {
            p = transform_ab(&p, inf, inf, bound)?;
        }
        Ok(p)
    };
    let seed = if d == 1 { Seed::I } else { Seed::II };
    match route {
        ChainRoute::Chain { steps } => {
            let mut p = seed_pair(Seed::III(d), l_max, bound)?;
            for _ in 0..steps {
                p = transform_chain_q(&p, inf, inf, bound)?;
            }
            Ok(p)
        }
        ChainRoute::Lattice2 { before, after } => {
            let p = ab(seed_pair(seed, l_max, bound)?, before)?;
            ab(transform_lattice2(&p, inf, inf, bound)?, after)
        }
        ChainRoute::Lattice { before, after } => {
            let p = ab(seed_pair(seed, l_max, bound)?, before)?;
            ab(transform_lattice(&p, inf, inf, bound)?, after)
        }
    }
}

/// The `(k, i, δ)` pair relative to 1 written out directly:
/// `α_L = (-1)^L q^{((2k+δ-2)L-2k+2i-δ)L/2}(1 + q^{(2k-2i+δ)L})` and
/// `β_L = Σ q^{r_2²+...+r_{k-1}² + r_i+...+r_{k-1}} / ((q)_{L-r_2} ... (q^{2-δ};q^{2-δ})_{r_{k-1}})`
/// over `L = r_1 >= r_2 >= ... >= r_{k-1} >= 0`.
pub fn chained_closed_form(
    k: i64,
    i: i64,
    d: i64,
    l_max: i64,
    bound: Exponent,
) -> Result<BaileyPair> {
    check_cell(k, i, d)?;
    let alpha = (0..=l_max)
        .map(|l| two_term_alpha(l, 2 * k + d - 2, 2 * k - 2 * i + d, 2 * k - 2 * i + d))
        .collect();
    // t[r] holds the inner sum over r_j = r, from j = k-1 outwards
    let level_exp = |j: i64, r: i64| (if j >= 2 { r * r } else { 0 }) + if j >= i { r } else { 0 };
    let mut t: Vec<LaurentSeries> = (0..=l_max)
        .map(|r| {
            div_qpoch(
                &LaurentSeries::q_pow(int(level_exp(k - 1, r))),
                int(2 - d),
                int(2 - d),
                r,
                bound,
            )
        })
        .collect::<Result<_>>()?;
    for j in (1..k - 1).rev() {
        t = (0..=l_max)
            .map(|r| {
                let mut acc = LaurentSeries::zero_to(bound);
                for s in 0..=r {
                    acc = &acc + &div_qpoch(&t[s as usize], int(1), int(1), r - s, bound)?;
                }
                Ok(acc.shift(int(level_exp(j, r))).truncate(bound))
            })
            .collect::<Result<_>>()?;
    }
    let beta_floor = if i == 1 {
        QuadFloor::new(int(0), int(1), int(0))
    } else {
        QuadFloor::constant(int(0))
    };
    Ok(BaileyPair {
        ell: 0,
        alpha,
        beta: t,
        alpha_tail: Tail::Floor(QuadFloor::new(
            rat(2 * k + d - 2, 2),
            rat(-(2 * k - 2 * i + d), 2),
            int(0),
        )),
        beta_tail: Tail::Floor(beta_floor),
    })
}

/// Outcome of building a chained pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainedPair {
    pub pair: BaileyPair,
    /// Routes composed and checked against the closed form.
    pub routes: Vec<ChainRoute>,
}

/// Builds the `(k, i, δ)` pair by composing transforms along every route and
/// checking each against the closed form; the returned pair carries the
/// closed form's valuation floors.
pub fn chained_pair(k: i64, i: i64, d: i64, l_max: i64, bound: Exponent) -> Result<ChainedPair> {
    let closed = chained_closed_form(k, i, d, l_max, bound)?;
    let routes = chain_routes(k, i, d)?;
    for route in &routes {
        if let Some(m) = compare_route(*route, &closed, d, l_max, bound)? {
            return Err(Error::InvalidParameters(format!(
                "route {route:?} disagrees with the closed form at L={}: {}",
                m.index, m.mismatch
            )));
        }
    }
    Ok(ChainedPair {
        pair: closed,
        routes,
    })
}

/// First index where the composed pair differs from `closed`.
pub fn compare_route(
    route: ChainRoute,
    closed: &BaileyPair,
    d: i64,
    l_max: i64,
    bound: Exponent,
) -> Result<Option<PairMismatch>> {
    let built = compose_route(route, d, l_max, bound)?;
    if built.ell != closed.ell {
        return Err(Error::ModulusMismatch {
            left: built.ell,
            right: closed.ell,
        });
    }
    for (l, (a, b)) in built.alpha.iter().zip(&closed.alpha).enumerate() {
        if let Some(m) = a.eq_up_to(b, bound)? {
            return Ok(Some(PairMismatch {
                index: l as i64,
                mismatch: m,
            }));
        }
    }
    for (l, (a, b)) in built.beta.iter().zip(&closed.beta).enumerate() {
        if let Some(m) = a.eq_up_to(b, bound)? {
            return Ok(Some(PairMismatch {
                index: l as i64,
                mismatch: m,
            }));
        }
    }
    Ok(None)
}
