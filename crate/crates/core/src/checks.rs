//! One verification per parameter cell, each returning a report. These are
//! the units that sweeps and the acceptance suite fan out over.

use serde::{Deserialize, Serialize};

use crate::bailey::{
    chain_routes, chained_closed_form, check_f1_f2, check_recurrences, classical_conjugate,
    compare_route, conjugate_transform, hl_conjugate, hl_gamma_delta, seed_pair, verify_conjugate,
    verify_gamma_delta, HlParams, RhoParam, Seed, Side, TransformKernel,
};
use crate::error::{Error, Result};
use crate::identities::{
    ag_bressoud_product, ag_bressoud_sum, e55_lhs, e55_string_form, gg_product, gg_sum, hecke_form,
    hl_lemma_lhs, hl_lemma_rhs, lattice_string_function, level_two_bridge, string_function,
    thm44_lhs, thm44_rhs, GgVariant, IdentityCell, StringFunctionIndex,
};
use crate::lattice::{Partition, SigmaContext};
use crate::report::{compare, first_failure, VerificationReport};
use crate::series::{int, Exponent};

fn ctx_cell(
    r: VerificationReport,
    n: i64,
    ell: i64,
    lambda: &Partition,
    sigma: i64,
) -> VerificationReport {
    r.with("N", n)
        .with("ell", ell)
        .with("lambda", lambda)
        .with("sigma", sigma)
}

/// The level-N conjugate pair relative to `q^ℓ` satisfies the conjugate
/// relation at every `L <= M`.
pub fn conjugate_pair_check(
    n: i64,
    ell: i64,
    lambda: &Partition,
    sigma: i64,
    m: i64,
    bound: Exponent,
) -> VerificationReport {
    ctx_cell(
        VerificationReport::new("conjugate-pair", bound),
        n,
        ell,
        lambda,
        sigma,
    )
    .with("M", m)
    .run(|| {
        let p = HlParams::new(m, SigmaContext::new(n, ell, lambda.clone(), sigma)?)?;
        let cp = hl_conjugate(&p, 0, bound)?;
        Ok(verify_conjugate(&cp, bound)?.map(|e| e.mismatch))
    })
}

/// The (Γ, Δ) relation at every `(L, k)` with `L + k <= M`.
pub fn gamma_delta_check(
    n: i64,
    ell: i64,
    lambda: &Partition,
    sigma: i64,
    m: i64,
    bound: Exponent,
) -> VerificationReport {
    ctx_cell(
        VerificationReport::new("gamma-delta-pair", bound),
        n,
        ell,
        lambda,
        sigma,
    )
    .with("M", m)
    .run(|| {
        let p = HlParams::new(m, SigmaContext::new(n, ell, lambda.clone(), sigma)?)?;
        let gd = hl_gamma_delta(&p, bound)?;
        Ok(verify_gamma_delta(&gd, bound)?.map(|(_, e)| e))
    })
}

/// `f1 = f2` and, for both sides separately, whichever recurrence or
/// initial condition applies at each `(L, k)`; one report per check.
pub fn lemma33_checks(
    n: i64,
    ell: i64,
    lambda: &Partition,
    sigma: i64,
    m: i64,
    bound: Exponent,
) -> Vec<VerificationReport> {
    let p = match SigmaContext::new(n, ell, lambda.clone(), sigma).and_then(|c| HlParams::new(m, c))
    {
        Ok(p) => p,
        Err(e) => {
            return vec![ctx_cell(
                VerificationReport::new("lemma33", bound),
                n,
                ell,
                lambda,
                sigma,
            )
            .with("M", m)
            .settle(Err(e))]
        }
    };
    let mut out = Vec::new();
    for l in 0..=m {
        for k in 0..=m - l {
            out.push(check_f1_f2(&p, l, k, bound));
            for side in [Side::F1, Side::F2] {
                // at L = M only the initial condition applies, and it
                // involves both sides at once
                if l == m && side == Side::F2 {
                    continue;
                }
                out.push(check_recurrences(side, &p, l, k, bound));
            }
        }
    }
    out
}

/// A seed Bailey pair by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedName {
    I,
    Ii,
    /// Seed (III) with `δ = 0`.
    Iii0,
    /// Seed (III) with `δ = 1`.
    Iii1,
}

impl SeedName {
    pub const ALL: [SeedName; 4] = [SeedName::I, SeedName::Ii, SeedName::Iii0, SeedName::Iii1];

    pub fn seed(self) -> Seed {
        match self {
            SeedName::I => Seed::I,
            SeedName::Ii => Seed::II,
            SeedName::Iii0 => Seed::III(0),
            SeedName::Iii1 => Seed::III(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeedName::I => "I",
            SeedName::Ii => "II",
            SeedName::Iii0 => "III0",
            SeedName::Iii1 => "III1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        SeedName::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameters(format!("unknown seed pair {s:?}")))
    }

    /// Modulus exponent of the seed.
    pub fn ell(self) -> i64 {
        match self {
            SeedName::I | SeedName::Ii => 1,
            SeedName::Iii0 | SeedName::Iii1 => 0,
        }
    }
}

/// Enough terms of a seed pair for every level-N sum below `bound`.
fn seed_length(n: i64, bound: Exponent) -> i64 {
    // L²/N dominates every pair's own floor
    let b = bound.ceil().to_integer().max(0) + 2;
    let mut l = 0;
    while l * l < n * b {
        l += 1;
    }
    l + 2
}

/// Both sides of the higher-level Bailey lemma for a seed pair.
pub fn hl_lemma_check(
    seed: SeedName,
    n: i64,
    lambda: &Partition,
    sigma: i64,
    bound: Exponent,
) -> VerificationReport {
    VerificationReport::new("hl-lemma", bound)
        .with("pair", seed.name())
        .with("N", n)
        .with("lambda", lambda)
        .with("sigma", sigma)
        .run(|| {
            let bp = seed_pair(seed.seed(), seed_length(n, bound), bound + int(4))?;
            let lhs = hl_lemma_lhs(&bp, n, lambda, sigma, bound)?;
            let rhs = hl_lemma_rhs(&bp, n, lambda, sigma, bound)?;
            compare(&lhs, &rhs, bound)
        })
}

/// The lemma's left side against its residue-class regrouping and the
/// string-function form, for `λ = (ℓ')`.
pub fn e55_check(
    seed: SeedName,
    n: i64,
    ell_p: i64,
    sigma: i64,
    bound: Exponent,
) -> VerificationReport {
    VerificationReport::new("e55", bound)
        .with("pair", seed.name())
        .with("N", n)
        .with("ell_prime", ell_p)
        .with("sigma", sigma)
        .run(|| {
            let bp = seed_pair(seed.seed(), seed_length(n, bound), bound + int(4))?;
            let lambda = if ell_p == 0 {
                Partition::empty()
            } else {
                Partition::single(ell_p)
            };
            let direct = hl_lemma_lhs(&bp, n, &lambda, sigma, bound)?;
            first_failure([
                compare(&e55_lhs(&bp, n, ell_p, sigma, bound)?, &direct, bound),
                compare(
                    &e55_string_form(&bp, n, ell_p, sigma, bound)?,
                    &direct,
                    bound,
                ),
            ])
        })
}

/// Source of a bilateral-identity cell's `i`.
pub fn i_range_tag(i: i64, k: i64, delta: i64) -> &'static str {
    if i < k + delta {
        "theorem+corollary"
    } else {
        "theorem-only"
    }
}

/// Both sides of the bilateral identity at one cell.
pub fn thm44_check(cell: &IdentityCell, bound: Exponent) -> VerificationReport {
    VerificationReport::new("thm44", bound)
        .with("N", cell.n)
        .with("delta", cell.delta)
        .with("k", cell.k)
        .with("i", cell.i)
        .with("lambda", &cell.lambda)
        .with("sigma", cell.sigma)
        .with("range", i_range_tag(cell.i, cell.k, cell.delta))
        .run(|| compare(&thm44_lhs(cell, bound)?, &thm44_rhs(cell, bound)?, bound))
}

/// A single-sum family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorollaryFamily {
    N1,
    N2a,
    N2b,
}

impl CorollaryFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "N1" => Ok(CorollaryFamily::N1),
            "N2A" => Ok(CorollaryFamily::N2a),
            "N2B" => Ok(CorollaryFamily::N2b),
            _ => Err(Error::InvalidParameters(format!(
                "unknown corollary family {s:?}"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorollaryFamily::N1 => "N1",
            CorollaryFamily::N2a => "N2a",
            CorollaryFamily::N2b => "N2b",
        }
    }

    /// Largest `i` the sum side accepts.
    pub fn i_max(self, k: i64) -> i64 {
        match self {
            CorollaryFamily::N1 | CorollaryFamily::N2a => k,
            CorollaryFamily::N2b => k - 1,
        }
    }
}

/// Sum side against product side. For N1 with `δ = 0, i = k`, outside the
/// product's range, the sum is compared with the bilateral side at `N = 1`.
/// N2a/N2b cells additionally check the sum against the level-2 identity
/// summed over σ.
pub fn corollary_check(
    family: CorollaryFamily,
    k: i64,
    i: i64,
    delta: i64,
    bound: Exponent,
) -> VerificationReport {
    let mut r = VerificationReport::new("corollary", bound)
        .with("family", family.name())
        .with("k", k)
        .with("i", i);
    if family == CorollaryFamily::N1 {
        r = r
            .with("delta", delta)
            .with("range", i_range_tag(i, k, delta));
    }
    r.run(|| match family {
        CorollaryFamily::N1 => {
            let s = ag_bressoud_sum(k, i, delta, bound)?;
            if i < k + delta {
                compare(&s, &ag_bressoud_product(k, i, delta, bound)?, bound)
            } else {
                let cell = IdentityCell::new(1, delta, k, i, Partition::empty(), 0)?;
                compare(&s, &thm44_lhs(&cell, bound)?, bound)
            }
        }
        CorollaryFamily::N2a | CorollaryFamily::N2b => {
            let (v, d) = if family == CorollaryFamily::N2a {
                (GgVariant::N2a, 1)
            } else {
                (GgVariant::N2b, 0)
            };
            let s = gg_sum(k, i, v, bound)?;
            first_failure([
                compare(&s, &gg_product(k, i, v, bound)?, bound),
                compare(&level_two_bridge(k, i, d, bound)?, &s, bound),
            ])
        }
    })
}

/// The normalized string function against the lattice form and, where the
/// double-sum form applies directly, its images under the symmetries.
pub fn string_function_check(idx: StringFunctionIndex, bound: Exponent) -> VerificationReport {
    VerificationReport::new("string-functions", bound)
        .with("N", idx.n)
        .with("ell", idx.ell)
        .with("m", idx.m)
        .run(|| {
            let (n, ell, m) = (idx.n, idx.ell, idx.m);
            let c = string_function(idx, bound)?;
            let mut checks = Vec::new();
            if ell < n {
                checks.push(compare(&c, &lattice_string_function(idx, bound)?, bound));
            }
            let images = [
                (ell, -m),
                (ell, m + 2 * n),
                (ell, m - 2 * n),
                (n - ell, n - m),
            ];
            for (l2, m2) in images {
                let j = StringFunctionIndex::new(n, l2, m2)?;
                let other = if l2 < n {
                    lattice_string_function(j, bound)?
                } else {
                    hecke_form(j.normalized(), bound)?
                };
                checks.push(compare(&c, &other, bound));
            }
            if m.abs() <= ell {
                let raw = hecke_form(idx, bound)?;
                let reflected = hecke_form(StringFunctionIndex::new(n, ell, -m)?, bound)?;
                checks.push(compare(&raw, &reflected, bound));
            }
            first_failure(checks)
        })
}

/// Closed form of the `(k, i, δ)` chained pair against every composition
/// route that produces it.
/// Cells no route reaches are skipped.
pub fn chain_route_check(
    k: i64,
    i: i64,
    delta: i64,
    l_max: i64,
    bound: Exponent,
) -> VerificationReport {
    let r = VerificationReport::new("chain-closed-form", bound)
        .with("k", k)
        .with("i", i)
        .with("delta", delta)
        .with("L_max", l_max);
    let routes = match chain_routes(k, i, delta) {
        Ok(routes) if routes.is_empty() => return r.note("no composition route reaches this pair"),
        Ok(routes) => routes,
        Err(e) => return r.settle(Err(e)),
    };
    r.run(|| {
        let closed = chained_closed_form(k, i, delta, l_max, bound)?;
        let mut checks = Vec::new();
        for r in routes {
            checks.push(Ok(
                compare_route(r, &closed, delta, l_max, bound)?.map(|m| m.mismatch)
            ));
        }
        first_failure(checks)
    })
}

/// The ρ = ∞ kernel transports a finite conjugate pair to a conjugate pair:
/// the classical pair when `level` is `None`, else the level-N pair at
/// `(N, λ, σ)`.
pub fn kernel_check(
    level: Option<(i64, &Partition, i64)>,
    ell: i64,
    m: i64,
    bound: Exponent,
) -> VerificationReport {
    let mut r = VerificationReport::new("infinite-kernel", bound)
        .with("ell", ell)
        .with("M", m);
    r = match level {
        Some((n, lambda, sigma)) => r.with("N", n).with("lambda", lambda).with("sigma", sigma),
        None => r.with("N", "classical"),
    };
    r.run(|| {
        let cp = match level {
            None => classical_conjugate(
                ell,
                RhoParam::Infinity,
                RhoParam::Infinity,
                Some(m),
                m,
                bound,
            )?,
            Some((n, lambda, sigma)) => {
                let p = HlParams::new(m, SigmaContext::new(n, ell, lambda.clone(), sigma)?)?;
                hl_conjugate(&p, 0, bound)?
            }
        };
        let kernel = TransformKernel::infinite_rho(ell, m, bound)?;
        let out = conjugate_transform(&cp, &kernel, bound)?;
        Ok(verify_conjugate(&out, bound)?.map(|e| e.mismatch))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_checks_pass() {
        let b = int(10);
        let e = Partition::empty();
        assert!(conjugate_pair_check(2, 0, &e, 0, 2, b).passed());
        assert!(gamma_delta_check(2, 1, &Partition::single(1), 0, 2, b).passed());
        assert!(lemma33_checks(2, 0, &e, 1, 2, b).iter().all(|r| r.passed()));
        assert!(hl_lemma_check(SeedName::I, 2, &Partition::single(1), 0, b).passed());
        assert!(e55_check(SeedName::I, 2, 1, 0, b).passed());
        assert!(corollary_check(CorollaryFamily::N1, 3, 3, 0, b).passed());
        assert!(corollary_check(CorollaryFamily::N2b, 3, 2, 0, b).passed());
        assert!(string_function_check(StringFunctionIndex::new(3, 1, 3).unwrap(), b).passed());
        assert!(chain_route_check(3, 2, 1, 4, b).passed());
        assert!(kernel_check(Some((2, &Partition::single(1), 0)), 1, 3, b).passed());
    }

    #[test]
    fn invalid_cells_fail_with_detail() {
        let r = conjugate_pair_check(2, 0, &Partition::single(1), 0, 2, int(5));
        assert!(!r.passed());
        assert!(r.detail.unwrap().contains("even"));
        let r = chain_route_check(2, 2, 0, 3, int(5));
        assert_eq!(r.status, crate::report::Status::Skipped);
    }
}
