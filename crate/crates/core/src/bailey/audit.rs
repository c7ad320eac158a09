//! Randomized re-verification of the pair transforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::report::{MismatchReport, Status, VerificationReport};
use crate::series::{int, rat, Exponent, LaurentSeries};

use super::conjugate::RhoParam;
use super::pairs::{beta_from_alpha, verify_bailey, BaileyPair, Tail};
use super::transforms::{transform_ab, transform_chain_q, transform_lattice, transform_lattice2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Ab,
    Lattice,
    ChainQ,
    Lattice2,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Ab,
        TransformKind::Lattice,
        TransformKind::ChainQ,
        TransformKind::Lattice2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Ab => "ab",
            TransformKind::Lattice => "lattice",
            TransformKind::ChainQ => "chain-q",
            TransformKind::Lattice2 => "lattice2",
        }
    }

    pub fn apply(
        self,
        bp: &BaileyPair,
        r1: RhoParam,
        r2: RhoParam,
        bound: Exponent,
    ) -> Result<BaileyPair> {
        match self {
            TransformKind::Ab => transform_ab(bp, r1, r2, bound),
            TransformKind::Lattice => transform_lattice(bp, r1, r2, bound),
            TransformKind::ChainQ => transform_chain_q(bp, r1, r2, bound),
            TransformKind::Lattice2 => transform_lattice2(bp, r1, r2, bound),
        }
    }
}

/// Finite ρ exponents used by the audit; none makes `x/ρ` an integer power.
const RHO_EXPONENTS: [(i64, i64); 5] = [(1, 2), (3, 2), (5, 2), (1, 3), (7, 3)];

fn random_rho(rng: &mut ChaCha8Rng) -> RhoParam {
    if rng.gen_bool(0.4) {
        RhoParam::Infinity
    } else {
        let (n, d) = *RHO_EXPONENTS.choose(rng).expect("non-empty");
        RhoParam::Finite(rat(n, d))
    }
}

fn rho_name(r: RhoParam) -> String {
    match r {
        RhoParam::Infinity => "inf".into(),
        RhoParam::Finite(c) => format!("q^{c}"),
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> LaurentSeries {
    let terms = rng.gen_range(0..=3);
    let mut s = LaurentSeries::zero();
    for _ in 0..terms {
        let c: i64 = rng.gen_range(-3..=3);
        let e: i64 = rng.gen_range(0..=4);
        s = &s + &LaurentSeries::term(c, int(e));
    }
    s
}

/// One randomized case: a finite-support pair, a transform and two ρ.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub index: u64,
    pub kind: TransformKind,
    pub ell: i64,
    pub alpha: Vec<LaurentSeries>,
    pub r1: RhoParam,
    pub r2: RhoParam,
}

/// Case `index` of transform `kind` under `seed`; every (kind, index) draws
/// from its own stream.
pub fn audit_case(seed: u64, kind: TransformKind, index: u64) -> AuditCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slot = TransformKind::ALL
        .iter()
        .position(|k| *k == kind)
        .expect("listed") as u64;
    rng.set_stream(index * TransformKind::ALL.len() as u64 + slot);
    let ell = rng.gen_range(1..=2);
    let l_max = rng.gen_range(2..=4);
    let mut alpha: Vec<LaurentSeries> = (0..=l_max).map(|_| random_poly(&mut rng)).collect();
    if alpha.iter().all(|a| a.is_zero()) {
        alpha[0] = LaurentSeries::one();
    }
    AuditCase {
        index,
        kind,
        ell,
        alpha,
        r1: random_rho(&mut rng),
        r2: random_rho(&mut rng),
    }
}

/// Precision headroom covering the negative valuations finite ρ introduce.
fn margin(case: &AuditCase) -> Exponent {
    let c = |r: RhoParam| match r {
        RhoParam::Finite(c) => c,
        RhoParam::Infinity => int(0),
    };
    (c(case.r1) + c(case.r2) + int(2)) * int(case.alpha.len() as i64) + int(4)
}

/// Builds the case's pair, transforms it and re-checks the Bailey relation
/// below `bound`.
pub fn run_case(case: &AuditCase, seed: u64, bound: Exponent) -> VerificationReport {
    let report = VerificationReport::new("transform-audit", bound)
        .with("case", case.index)
        .with("transform", case.kind.name())
        .with("ell", case.ell)
        .with("rho1", rho_name(case.r1))
        .with("rho2", rho_name(case.r2));
    let mut report = report.run(|| {
        let work = bound + margin(case);
        let bp = beta_from_alpha(case.ell, case.alpha.clone(), Tail::Zero, work)?;
        let out = case.kind.apply(&bp, case.r1, case.r2, work)?;
        Ok(verify_bailey(&out, bound)?.map(|m| m.mismatch))
    });
    report.seed = Some(seed);
    report
}

/// Runs `cases` randomized cases per transform in parallel, returned in
/// (transform, case) order.
pub fn audit_transforms(cases: u64, seed: u64, bound: Exponent) -> Vec<VerificationReport> {
    let jobs: Vec<(TransformKind, u64)> = TransformKind::ALL
        .iter()
        .flat_map(|&k| (0..cases).map(move |i| (k, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, i)| run_case(&audit_case(seed, k, i), seed, bound))
        .collect()
}

/// Summary counts of an audit.
pub fn audit_summary(reports: &[VerificationReport]) -> (usize, usize, Option<&MismatchReport>) {
    let passed = reports.iter().filter(|r| r.status == Status::Pass).count();
    let first = reports.iter().find_map(|r| r.mismatch.as_ref());
    (passed, reports.len() - passed, first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_reproducible() {
        let a = audit_case(7, TransformKind::Lattice, 3);
        let b = audit_case(7, TransformKind::Lattice, 3);
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.kind, TransformKind::Lattice);
        assert_ne!(audit_case(7, TransformKind::Lattice, 4).alpha, a.alpha);
        assert_ne!(audit_case(7, TransformKind::Ab, 3).alpha, a.alpha);
    }

    #[test]
    fn audit_passes() {
        let reports = audit_transforms(10, 11, int(14));
        for r in &reports {
            assert!(r.passed(), "{} {:?} {:?}", r.key(), r.mismatch, r.detail);
        }
        assert_eq!(audit_summary(&reports).0, 40);
    }
}
