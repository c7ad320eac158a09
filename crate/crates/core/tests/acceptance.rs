//! Acceptance suite: one PASS/FAIL line per criterion. Every comparison is
//! exact equality on a truncation window.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use qbailey_core::bailey::{
    audit_summary, audit_transforms, telescopic_check, telescopic_sides, Telescope,
};
use qbailey_core::checks::{
    chain_route_check, conjugate_pair_check, corollary_check, e55_check, gamma_delta_check,
    hl_lemma_check, kernel_check, lemma33_checks, string_function_check, thm44_check,
    CorollaryFamily, SeedName,
};
use qbailey_core::identities::{ag_bressoud_sum, IdentityCell, StringFunctionIndex};
use qbailey_core::lattice::{Partition, SigmaContext};
use qbailey_core::qtools::gauss_binom_primed;
use qbailey_core::{int, Status, VerificationReport};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    summary: String,
}

fn tally(reports: &[VerificationReport]) -> Outcome {
    let pass = reports.iter().filter(|r| r.status == Status::Pass).count();
    let unverified = reports
        .iter()
        .filter(|r| r.status == Status::UnverifiedBound)
        .count();
    let skipped = reports
        .iter()
        .filter(|r| r.status == Status::Skipped)
        .count();
    let failed: Vec<&VerificationReport> = reports
        .iter()
        .filter(|r| r.status == Status::Fail)
        .collect();
    let mut summary = format!("{pass}/{} cells pass", reports.len());
    if skipped > 0 {
        summary.push_str(&format!(", {skipped} skipped"));
    }
    if unverified > 0 {
        summary.push_str(&format!(", {unverified} unverified-bound"));
    }
    if let Some(f) = failed.first() {
        summary.push_str(&format!("; first failure {}", f.key()));
        if let Some(m) = &f.mismatch {
            summary.push_str(&format!(" at q^{} ({} vs {})", m.exponent, m.lhs, m.rhs));
        }
        if let Some(d) = &f.detail {
            summary.push_str(&format!(": {d}"));
        }
    }
    Outcome {
        ok: failed.is_empty() && unverified == 0,
        summary,
    }
}

/// `(N, ℓ, λ, σ)` with `N <= 3`, `ℓ <= ell_max`, `|λ| <= weight`.
fn level_cells(ell_max: i64, weight: i64) -> Vec<(i64, i64, Partition, i64)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for ell in 0..=ell_max {
            for lambda in Partition::all(n - 1, weight) {
                for sigma in SigmaContext::admissible_sigmas(n, ell, &lambda) {
                    out.push((n, ell, lambda.clone(), sigma));
                }
            }
        }
    }
    out
}

fn hierarchy_grid() -> Vec<(i64, i64, Partition, i64, i64)> {
    level_cells(2, 4)
        .into_iter()
        .flat_map(|(n, ell, lambda, sigma)| {
            (0..=5).map(move |m| (n, ell, lambda.clone(), sigma, m))
        })
        .collect()
}

fn c1() -> Outcome {
    let b = int(25);
    let reports: Vec<_> = hierarchy_grid()
        .par_iter()
        .map(|(n, ell, lambda, sigma, m)| conjugate_pair_check(*n, *ell, lambda, *sigma, *m, b))
        .collect();
    tally(&reports)
}

fn c2() -> Outcome {
    let b = int(25);
    let reports: Vec<_> = hierarchy_grid()
        .par_iter()
        .map(|(n, ell, lambda, sigma, m)| gamma_delta_check(*n, *ell, lambda, *sigma, *m, b))
        .collect();
    tally(&reports)
}

fn c3() -> Outcome {
    let b = int(25);
    let reports: Vec<_> = hierarchy_grid()
        .par_iter()
        .flat_map(|(n, ell, lambda, sigma, m)| lemma33_checks(*n, *ell, lambda, *sigma, *m, b))
        .collect();
    tally(&reports)
}

fn c4() -> Outcome {
    let mut reports = Vec::new();
    let mut gauss_ok = true;
    for n in 2..=4usize {
        let d = n - 1;
        for code in 0..7usize.pow(2 * d as u32) {
            let mut c = code;
            let mut v = Vec::with_capacity(2 * d);
            for _ in 0..2 * d {
                v.push((c % 7) as i64 - 3);
                c /= 7;
            }
            let (a, bb) = v.split_at(d);
            for variant in [Telescope::R, Telescope::B] {
                reports.push(telescopic_check(
                    n as i64,
                    &a.to_vec(),
                    &bb.to_vec(),
                    variant,
                ));
            }
            if n == 2 {
                // the rank-one expansion is the primed Pascal recurrence
                let (a, bb) = (a[0], bb[0]);
                let (_, rhs) =
                    telescopic_sides(&vec![a], &vec![bb], Telescope::R).expect("valid lengths");
                let pascal = &gauss_binom_primed(a + bb - 1, a)
                    + &gauss_binom_primed(a + bb - 1, a - 1).shift(int(bb));
                gauss_ok &= rhs == pascal;
            }
        }
    }
    let mut o = tally(&reports);
    o.ok &= gauss_ok;
    o.summary.push_str(if gauss_ok {
        "; N=2 identical to the Pascal recurrence"
    } else {
        "; N=2 differs from the Pascal recurrence"
    });
    o
}

fn c5() -> Outcome {
    let b = int(20);
    let mut jobs = Vec::new();
    for seed in SeedName::ALL {
        for n in 1..=3 {
            for lambda in Partition::all(n - 1, 2) {
                for sigma in SigmaContext::admissible_sigmas(n, seed.ell(), &lambda) {
                    jobs.push((seed, n, lambda.clone(), sigma));
                }
            }
        }
    }
    let reports: Vec<_> = jobs
        .par_iter()
        .map(|(seed, n, lambda, sigma)| hl_lemma_check(*seed, *n, lambda, *sigma, b))
        .collect();
    tally(&reports)
}

fn c6() -> Outcome {
    let b = int(20);
    let mut cells = Vec::new();
    for delta in 0..=1 {
        for k in 2..=4 {
            for i in 1..=k {
                for (n, _, lambda, sigma) in level_cells(0, 2) {
                    cells.push(
                        IdentityCell::new(n, delta, k, i, lambda, sigma).expect("admissible cell"),
                    );
                }
            }
        }
    }
    let reports: Vec<_> = cells.par_iter().map(|c| thm44_check(c, b)).collect();
    let theorem_only = reports
        .iter()
        .filter(|r| r.cell["range"] == "theorem-only")
        .count();
    let mut o = tally(&reports);
    o.summary.push_str(&format!(
        " ({theorem_only} outside the single-sum corollary's i-range)"
    ));
    o
}

/// Number of partitions of each `n < top` into parts allowed by `ok`,
/// counted by the standard coin-change recursion over allowed parts.
fn restricted_partitions(top: usize, ok: impl Fn(usize) -> bool) -> Vec<BigInt> {
    let mut p = vec![BigInt::from(0); top];
    p[0] = BigInt::from(1);
    for part in (1..top).filter(|&j| ok(j)) {
        for n in part..top {
            let add = p[n - part].clone();
            p[n] += add;
        }
    }
    p
}

fn c7() -> Outcome {
    let b = int(40);
    let mut jobs = Vec::new();
    for delta in 0..=1 {
        for k in 2..=5 {
            for i in 1..=k + delta - 1 {
                jobs.push((k, i, delta));
            }
        }
    }
    let reports: Vec<_> = jobs
        .par_iter()
        .map(|&(k, i, delta)| corollary_check(CorollaryFamily::N1, k, i, delta, b))
        .collect();
    let mut o = tally(&reports);
    let mut rr_ok = true;
    for (i, residues) in [(2, [1, 4]), (1, [2, 3])] {
        let s = ag_bressoud_sum(2, i, 1, int(50)).expect("valid");
        let counts = restricted_partitions(50, |j| residues.contains(&(j % 5)));
        for (n, c) in counts.iter().enumerate() {
            rr_ok &= s.coeff_at(int(n as i64)).expect("inside window") == *c;
        }
    }
    o.ok &= rr_ok;
    o.summary.push_str(if rr_ok {
        "; k=2, δ=1 match partition counts to q^50"
    } else {
        "; k=2, δ=1 differ from partition counts"
    });
    o
}

fn c8() -> Outcome {
    let b = int(30);
    let mut jobs = Vec::new();
    for k in 2..=4 {
        for family in [CorollaryFamily::N2a, CorollaryFamily::N2b] {
            for i in 1..=family.i_max(k) {
                jobs.push((family, k, i));
            }
        }
    }
    let reports: Vec<_> = jobs
        .par_iter()
        .map(|&(f, k, i)| corollary_check(f, k, i, 0, b))
        .collect();
    tally(&reports)
}

fn c9() -> Outcome {
    let b = int(15);
    let mut idx = Vec::new();
    for n in 1..=3 {
        for ell in 0..n {
            for m in -2 * n..=2 * n {
                if let Ok(i) = StringFunctionIndex::new(n, ell, m) {
                    idx.push(i);
                }
            }
        }
    }
    let mut reports: Vec<_> = idx
        .par_iter()
        .map(|i| string_function_check(*i, b))
        .collect();
    for ell_p in 0..2 {
        let lambda = if ell_p == 0 {
            Partition::empty()
        } else {
            Partition::single(ell_p)
        };
        for sigma in SigmaContext::admissible_sigmas(2, SeedName::I.ell(), &lambda) {
            reports.push(e55_check(SeedName::I, 2, ell_p, sigma, int(12)));
        }
    }
    tally(&reports)
}

fn c10() -> Outcome {
    let seed = 20_240_611;
    let reports = audit_transforms(200, seed, int(20));
    let (pass, fail, _) = audit_summary(&reports);
    let mut chains = Vec::new();
    for delta in 0..=1 {
        for k in 2..=4 {
            for i in 1..=k {
                chains.push((k, i, delta));
            }
        }
    }
    let chain_reports: Vec<_> = chains
        .par_iter()
        .map(|&(k, i, d)| chain_route_check(k, i, d, 6, int(20)))
        .collect();
    let mut all = reports;
    all.extend(chain_reports);
    let mut o = tally(&all);
    o.summary = format!("audit seed {seed}: {pass} pass, {fail} fail; {}", o.summary);
    o
}

fn c11() -> Outcome {
    let b = int(25);
    let mut reports = Vec::new();
    for ell in 0..=2 {
        for m in 0..=5 {
            reports.push(kernel_check(None, ell, m, b));
        }
    }
    let level: Vec<_> = level_cells(2, 2)
        .into_iter()
        .flat_map(|(n, ell, lambda, sigma)| {
            (0..=4).map(move |m| (n, ell, lambda.clone(), sigma, m))
        })
        .collect();
    let level_reports: Vec<_> = level
        .par_iter()
        .map(|(n, ell, lambda, sigma, m)| kernel_check(Some((*n, lambda, *sigma)), *ell, *m, b))
        .collect();
    reports.extend(level_reports);
    tally(&reports)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "conjugate-pair hierarchy, N<=3, l<=2, |lambda|<=4, M<=5, q^25",
            c1,
        ),
        ("(Gamma,Delta) hierarchy, all k, q^25", c2),
        ("f1 = f2 with recurrences and initial condition, q^25", c3),
        ("telescopic expansions, N<=4, A,B in [-3,3]", c4),
        (
            "higher-level Bailey lemma, seeds I-III, N<=3, |lambda|<=2, q^20",
            c5,
        ),
        (
            "bilateral identity, delta in {0,1}, 2<=k<=4, i<=k, N<=3, q^20",
            c6,
        ),
        ("Andrews-Gordon/Bressoud sum = product, k<=5, q^40", c7),
        ("Gollnitz-Gordon type sums = products, k<=4, q^30", c8),
        (
            "string-function symmetries N<=3 q^15; class regrouping, pair I, N=2, q^12",
            c9,
        ),
        (
            "transform audit, 200 cases per transform, q^20; chain closed forms k<=4",
            c10,
        ),
        ("infinite-rho conjugate kernel, q^25", c11),
    ];
    let mut all_ok = true;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        all_ok &= o.ok;
        println!(
            "{} {:>2}. {name}: {} [{:.1}s]",
            if o.ok { "PASS" } else { "FAIL" },
            n + 1,
            o.summary,
            t.elapsed().as_secs_f64()
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
