//! Worked examples and cross-path invariants of the public API.

use num_bigint::BigInt;

use qbailey_core::bailey::{
    classical_conjugate, hl_delta, pairing_sum, seed_pair, verify_bailey, HlParams, RhoParam, Seed,
};
use qbailey_core::identities::{
    ag_bressoud_sum, gg_sum, lattice_string_function, string_function, triple_product_sides,
    GgVariant, StringFunctionIndex,
};
use qbailey_core::lattice::{Partition, SigmaContext};
use qbailey_core::qtools::{gauss_binom, qfact};
use qbailey_core::{int, rat, LaurentSeries};

fn coeff(s: &LaurentSeries, e: i64) -> BigInt {
    s.coeff_at(int(e)).unwrap()
}

#[test]
fn rogers_ramanujan_coefficient_of_q4() {
    let s = ag_bressoud_sum(2, 2, 1, int(10)).unwrap();
    // 4 and 1+1+1+1
    assert_eq!(coeff(&s, 4), BigInt::from(2));
}

#[test]
fn gaussian_binomial_four_two() {
    let g = gauss_binom(4, 2);
    let c: Vec<BigInt> = (0..=4).map(|e| coeff(&g, e)).collect();
    assert_eq!(c, [1, 1, 2, 1, 1].map(BigInt::from));
    assert_eq!(g.degree(), Some(int(4)));
}

#[test]
fn sum_sides_have_nonnegative_coefficients() {
    let b = int(30);
    for k in 2..=4 {
        for delta in 0..=1 {
            for i in 1..=k {
                assert!(ag_bressoud_sum(k, i, delta, b).unwrap().is_nonnegative());
            }
        }
        for i in 1..=k {
            assert!(gg_sum(k, i, GgVariant::N2a, b).unwrap().is_nonnegative());
        }
        for i in 1..k {
            assert!(gg_sum(k, i, GgVariant::N2b, b).unwrap().is_nonnegative());
        }
    }
}

#[test]
fn triple_product_to_order_thirty() {
    for s in [rat(1, 2), rat(1, 3), rat(2, 5), rat(3, 4)] {
        let (lhs, rhs) = triple_product_sides(s, int(30)).unwrap();
        assert_eq!(lhs.eq_up_to(&rhs, int(30)).unwrap(), None, "s = {s}");
    }
}

#[test]
fn rank_one_delta_is_the_classical_delta() {
    let bound = int(25);
    for ell in 0..=2 {
        let ctx = SigmaContext::new(1, ell, Partition::empty(), ell % 2).unwrap();
        for m in 0..=4 {
            let p = HlParams::new(m, ctx.clone()).unwrap();
            let classical = classical_conjugate(
                ell,
                RhoParam::Infinity,
                RhoParam::Infinity,
                Some(m),
                m,
                bound,
            )
            .unwrap();
            for l in 0..=m {
                // a^L q^{L²}/(q)_{M-L}, written out independently
                let direct = (&LaurentSeries::q_pow(int(ell * l + l * l))
                    * &qfact(m - l).invert(bound).unwrap())
                    .truncate(bound);
                let level = hl_delta(&p, l, 0, bound).unwrap();
                assert_eq!(level.eq_up_to(&direct, bound).unwrap(), None);
                assert_eq!(
                    classical.delta[l as usize]
                        .eq_up_to(&direct, bound)
                        .unwrap(),
                    None
                );
            }
        }
    }
}

#[test]
fn pairing_of_verified_pairs_balances() {
    let bound = int(20);
    for seed in [Seed::I, Seed::II] {
        let bp = seed_pair(seed, 8, bound).unwrap();
        assert_eq!(verify_bailey(&bp, bound).unwrap(), None);
        let cp = classical_conjugate(
            bp.ell,
            RhoParam::Infinity,
            RhoParam::Infinity,
            None,
            8,
            bound,
        )
        .unwrap();
        let (ag, bd) = pairing_sum(&bp, &cp, bound).unwrap();
        assert_eq!(ag.eq_up_to(&bd, bound).unwrap(), None);
    }
}

#[test]
fn string_functions_sit_on_their_h_grid() {
    let bound = int(12);
    for n in 1..=4 {
        for ell in 0..n {
            for m in (-ell..=ell).step_by(2) {
                let idx = StringFunctionIndex::new(n, ell, m).unwrap();
                let c = string_function(idx, bound).unwrap();
                assert_eq!(
                    c.eq_up_to(&lattice_string_function(idx, bound).unwrap(), bound)
                        .unwrap(),
                    None
                );
                let lead = c.valuation().unwrap() - idx.normalized().h();
                assert!(lead.is_integer() && lead >= int(0), "N={n} l={ell} m={m}");
                for (e, _) in c.terms() {
                    assert!((e - idx.normalized().h()).is_integer());
                }
            }
        }
    }
}
