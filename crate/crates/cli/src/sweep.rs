//! Expands a sweep config into cells and runs them on a worker pool.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use qbailey_core::bailey::{
    audit_transforms, check_f1_f2, check_recurrences, hl_conjugate, telescopic_check,
    verify_conjugate, HlParams, Side, Telescope,
};
use qbailey_core::checks::{
    conjugate_pair_check, corollary_check, gamma_delta_check, hl_lemma_check,
    string_function_check, thm44_check, CorollaryFamily, SeedName,
};
use qbailey_core::identities::{
    ag_bressoud_sum, gg_sum, string_function, GgVariant, IdentityCell, StringFunctionIndex,
};
use qbailey_core::lattice::{Partition, SigmaContext};
use qbailey_core::{int, rat, Exponent, LaurentSeries, Result, Status, VerificationReport};

use crate::config::{line_of, ConfigError, IntSet, LambdaSet, Params, SweepConfig};

/// One coefficient of a named series, tagged with the cell it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub cell: String,
    pub exponent_num: i64,
    pub denom: i64,
    pub coefficient: String,
}

#[derive(Default)]
pub struct Output {
    pub reports: Vec<VerificationReport>,
    pub tables: Vec<TableRow>,
}

type Work = Box<dyn Fn() -> Output + Send + Sync>;

pub enum Job {
    /// A cell rejected during expansion.
    Skipped(VerificationReport),
    /// `template` stands in for the cell if `work` panics.
    Run {
        template: VerificationReport,
        work: Work,
    },
}

fn skipped(template: VerificationReport, reason: impl Into<String>) -> Job {
    Job::Skipped(template.note(reason))
}

fn single(r: impl Fn() -> VerificationReport + Send + Sync + 'static) -> Work {
    Box::new(move || Output {
        reports: vec![r()],
        tables: Vec::new(),
    })
}

fn rows(cell: &str, s: &LaurentSeries, bound: Exponent) -> Vec<TableRow> {
    s.table(Some(bound))
        .into_iter()
        .map(|(e, d, c)| TableRow {
            cell: cell.to_string(),
            exponent_num: e,
            denom: d,
            coefficient: c.to_string(),
        })
        .collect()
}

/// Everything a sweep produced, sorted by cell key.
pub struct SweepResult {
    pub reports: Vec<VerificationReport>,
    pub tables: Vec<TableRow>,
}

impl SweepResult {
    pub fn count(&self, status: Status) -> usize {
        self.reports.iter().filter(|r| r.status == status).count()
    }

    /// 1 on any failure, else 3 on any unverified bound, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.count(Status::Fail) > 0 {
            1
        } else if self.count(Status::UnverifiedBound) > 0 {
            3
        } else {
            0
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{} reports: {} pass, {} fail, {} skipped, {} unverified-bound",
            self.reports.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped),
            self.count(Status::UnverifiedBound)
        )
    }

    pub fn write_reports(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for r in &self.reports {
            serde_json::to_writer(&mut *out, r)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_tables(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cell", "exponent_num", "denom", "coefficient"])?;
        for t in &self.tables {
            w.write_record([
                t.cell.as_str(),
                &t.exponent_num.to_string(),
                &t.denom.to_string(),
                &t.coefficient,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `jobs` on `workers` threads; the result does not depend on the
/// thread count.
pub fn run_jobs(jobs: Vec<Job>, workers: Option<usize>, timing: bool) -> SweepResult {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().expect("thread pool");
    let outputs: Vec<Output> = pool.install(|| {
        jobs.into_par_iter()
            .map(|job| match job {
                Job::Skipped(r) => Output {
                    reports: vec![r],
                    tables: Vec::new(),
                },
                Job::Run { template, work } => catch_unwind(AssertUnwindSafe(&work))
                    .unwrap_or_else(|p| {
                        let msg = p
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_default();
                        let mut r = template.note(format!("panic: {msg}"));
                        r.status = Status::Fail;
                        Output {
                            reports: vec![r],
                            tables: Vec::new(),
                        }
                    }),
            })
            .collect()
    });
    let mut reports = Vec::new();
    let mut tables = Vec::new();
    for o in outputs {
        reports.extend(o.reports);
        tables.extend(o.tables);
    }
    if !timing {
        for r in &mut reports {
            r.wall_ms = None;
        }
    }
    reports.sort_by_cached_key(|r| r.key());
    tables.sort_by(|a, b| {
        a.cell
            .cmp(&b.cell)
            .then(a.exponent_num.cmp(&b.exponent_num))
    });
    SweepResult { reports, tables }
}

/// Reads required or defaulted parameters, locating errors in the source.
struct Fields<'a> {
    src: &'a str,
    p: &'a Params,
}

impl Fields<'_> {
    fn missing(&self, field: &str, target: &str) -> ConfigError {
        ConfigError {
            line: line_of(self.src, "params"),
            field: Some(format!("params.{field}")),
            message: format!("required for target {target}"),
        }
    }

    fn req(&self, v: &Option<IntSet>, field: &str, target: &str) -> Result2<Vec<i64>> {
        v.as_ref()
            .map(IntSet::values)
            .ok_or_else(|| self.missing(field, target))
    }

    fn names(&self, v: &Option<Vec<String>>, field: &str, target: &str) -> Result2<Vec<String>> {
        v.clone().ok_or_else(|| self.missing(field, target))
    }

    fn bad(&self, field: &str, message: String) -> ConfigError {
        ConfigError {
            line: line_of(self.src, field),
            field: Some(format!("params.{field}")),
            message,
        }
    }

    /// Partitions for rank `n`: listed ones, or all with parts `<= n - 1`
    /// up to the weight (only `()` when absent).
    fn lambdas(&self, n: i64) -> Result2<Vec<std::result::Result<Partition, String>>> {
        Ok(match &self.p.lambda {
            None => vec![Ok(Partition::empty())],
            Some(LambdaSet::Weight { max_weight }) => Partition::all((n - 1).max(0), *max_weight)
                .into_iter()
                .map(Ok)
                .collect(),
            Some(LambdaSet::List(l)) => l
                .iter()
                .map(|parts| Partition::new(parts.clone()).map_err(|e| e.to_string()))
                .collect(),
        })
    }

    /// σ values to try: the listed ones, or those parity admits.
    fn sigmas(&self, n: i64, ell: i64, lambda: &Partition) -> Vec<i64> {
        match &self.p.sigma {
            Some(s) => s.values(),
            None => SigmaContext::admissible_sigmas(n, ell, lambda),
        }
    }
}

type Result2<T> = std::result::Result<T, ConfigError>;

fn cartesian(values: &[i64], len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                values.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Level-N cells over `(N, ℓ, λ, σ)` with `visit(n, ell, lambda, sigma)`
/// called on each context that passes validation.
fn level_cells(
    f: &Fields,
    target: &str,
    ells: &[i64],
    bound: Exponent,
    mut visit: impl FnMut(i64, i64, Partition, i64) -> Vec<Job>,
) -> Result2<Vec<Job>> {
    let mut jobs = Vec::new();
    for n in f.req(&f.p.n, "N", target)? {
        for &ell in ells {
            for lambda in f.lambdas(n)? {
                let base = VerificationReport::new(target, bound)
                    .with("N", n)
                    .with("ell", ell);
                let lambda = match lambda {
                    Ok(l) => l,
                    Err(e) => {
                        jobs.push(skipped(base, e));
                        continue;
                    }
                };
                let sigmas = f.sigmas(n, ell, &lambda);
                if sigmas.is_empty() {
                    jobs.push(skipped(
                        base.clone().with("lambda", &lambda),
                        "no sigma satisfies the parity constraint",
                    ));
                }
                for sigma in sigmas {
                    match SigmaContext::new(n, ell, lambda.clone(), sigma) {
                        Ok(_) => jobs.extend(visit(n, ell, lambda.clone(), sigma)),
                        Err(e) => jobs.push(skipped(
                            base.clone().with("lambda", &lambda).with("sigma", sigma),
                            e.to_string(),
                        )),
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn hl_params(n: i64, ell: i64, lambda: &Partition, sigma: i64, m: i64) -> Result<HlParams> {
    HlParams::new(m, SigmaContext::new(n, ell, lambda.clone(), sigma)?)
}

/// Expands the config into jobs in a fixed order.
pub fn expand(cfg: &SweepConfig, src: &str) -> Result2<Vec<Job>> {
    let f = Fields {
        src,
        p: &cfg.params,
    };
    let p = &cfg.params;
    let bound = cfg.order();
    let target = cfg.target.as_str();
    match target {
        "conjugate-pair" | "gamma-delta-pair" | "lemma33" | "recurrences" => {
            let ells = f.req(&p.ell, "ell", target)?;
            let ms = f.req(&p.big_m, "M", target)?;
            let corrupt = cfg.corrupt.clone();
            let den = cfg.order_denominator;
            level_cells(&f, target, &ells, bound, |n, ell, lambda, sigma| {
                let mut jobs = Vec::new();
                for &m in &ms {
                    let template = VerificationReport::new(target, bound)
                        .with("N", n)
                        .with("ell", ell)
                        .with("lambda", &lambda)
                        .with("sigma", sigma)
                        .with("M", m);
                    let params = match hl_params(n, ell, &lambda, sigma, m) {
                        Ok(p) => p,
                        Err(e) => {
                            jobs.push(skipped(template, e.to_string()));
                            continue;
                        }
                    };
                    let lambda = lambda.clone();
                    let work: Work = match target {
                        "conjugate-pair" => match &corrupt {
                            None => single(move || {
                                conjugate_pair_check(n, ell, &lambda, sigma, m, bound)
                            }),
                            Some(c) => {
                                let c = c.clone();
                                let t = template.clone().with(
                                    "corrupt",
                                    format!(
                                        "L={} {}*q^({}/{})",
                                        c.l, c.coefficient, c.exponent_numerator, den
                                    ),
                                );
                                single(move || {
                                    t.clone().run(|| {
                                        let mut cp = hl_conjugate(&params, 0, bound)?;
                                        let slot = usize::try_from(c.l)
                                            .ok()
                                            .filter(|&l| l < cp.delta.len())
                                            .ok_or_else(|| {
                                                qbailey_core::Error::InvalidParameters(format!(
                                                    "corrupt.L = {} outside 0..={}",
                                                    c.l,
                                                    cp.delta.len() - 1
                                                ))
                                            })?;
                                        let term = LaurentSeries::term(
                                            c.coefficient,
                                            rat(c.exponent_numerator, den),
                                        );
                                        cp.delta[slot] = &cp.delta[slot] + &term;
                                        Ok(verify_conjugate(&cp, bound)?.map(|e| e.mismatch))
                                    })
                                })
                            }
                        },
                        "gamma-delta-pair" => {
                            single(move || gamma_delta_check(n, ell, &lambda, sigma, m, bound))
                        }
                        "lemma33" => Box::new(move || Output {
                            reports: (0..=m)
                                .flat_map(|l| (0..=m - l).map(move |k| (l, k)))
                                .map(|(l, k)| check_f1_f2(&params, l, k, bound))
                                .collect(),
                            tables: Vec::new(),
                        }),
                        _ => Box::new(move || {
                            let mut reports = Vec::new();
                            for l in 0..=m {
                                for k in 0..=m - l {
                                    for side in [Side::F1, Side::F2] {
                                        // the initial condition at L = M pairs both sides
                                        if l == m && side == Side::F2 {
                                            continue;
                                        }
                                        reports.push(check_recurrences(side, &params, l, k, bound));
                                    }
                                }
                            }
                            Output {
                                reports,
                                tables: Vec::new(),
                            }
                        }),
                    };
                    jobs.push(Job::Run { template, work });
                }
                jobs
            })
        }
        "telescopic" => {
            let coords = f.req(&p.coord, "coord", target)?;
            let variants = match &p.variant {
                None => vec![Telescope::R, Telescope::B],
                Some(v) => v
                    .iter()
                    .map(|s| match s.to_ascii_uppercase().as_str() {
                        "R" => Ok(Telescope::R),
                        "B" => Ok(Telescope::B),
                        _ => {
                            Err(f.bad("variant", format!("unknown variant {s:?}; expected R or B")))
                        }
                    })
                    .collect::<Result2<_>>()?,
            };
            let mut jobs = Vec::new();
            for n in f.req(&p.n, "N", target)? {
                let template = VerificationReport::new(target, int(0)).with("N", n);
                if n < 2 {
                    jobs.push(skipped(template, "telescopic expansions need N >= 2"));
                    continue;
                }
                let vecs = cartesian(&coords, (n - 1) as usize);
                for &variant in &variants {
                    for a in &vecs {
                        for b in &vecs {
                            let (a, b) = (a.clone(), b.clone());
                            jobs.push(Job::Run {
                                template: template.clone(),
                                work: single(move || telescopic_check(n, &a, &b, variant)),
                            });
                        }
                    }
                }
            }
            Ok(jobs)
        }
        "hl-lemma" => {
            let pairs = match &p.pair {
                None => SeedName::ALL.to_vec(),
                Some(v) => v
                    .iter()
                    .map(|s| SeedName::parse(s).map_err(|e| f.bad("pair", e.to_string())))
                    .collect::<Result2<_>>()?,
            };
            let mut jobs = Vec::new();
            for seed in pairs {
                let ell = seed.ell();
                let mut cells = level_cells(&f, target, &[ell], bound, |n, _, lambda, sigma| {
                    let template = VerificationReport::new(target, bound)
                        .with("pair", seed.name())
                        .with("N", n)
                        .with("lambda", &lambda)
                        .with("sigma", sigma);
                    vec![Job::Run {
                        template,
                        work: single(move || hl_lemma_check(seed, n, &lambda, sigma, bound)),
                    }]
                })?;
                for j in &mut cells {
                    if let Job::Skipped(r) = j {
                        r.cell.insert("pair".into(), seed.name().into());
                    }
                }
                jobs.extend(cells);
            }
            Ok(jobs)
        }
        "thm44" => {
            let deltas = f.req(&p.delta, "delta", target)?;
            let ks = f.req(&p.k, "k", target)?;
            let is = f.req(&p.i, "i", target)?;
            level_cells(&f, target, &[0], bound, |n, _, lambda, sigma| {
                let mut jobs = Vec::new();
                for &delta in &deltas {
                    for &k in &ks {
                        for &i in &is {
                            let template = VerificationReport::new(target, bound)
                                .with("N", n)
                                .with("delta", delta)
                                .with("k", k)
                                .with("i", i)
                                .with("lambda", &lambda)
                                .with("sigma", sigma);
                            match IdentityCell::new(n, delta, k, i, lambda.clone(), sigma) {
                                Ok(cell) => jobs.push(Job::Run {
                                    template,
                                    work: single(move || thm44_check(&cell, bound)),
                                }),
                                Err(e) => jobs.push(skipped(template, e.to_string())),
                            }
                        }
                    }
                }
                jobs
            })
            .map(|jobs| {
                // the bilateral identity has no ℓ; drop it from rejected cells
                jobs.into_iter()
                    .map(|j| match j {
                        Job::Skipped(mut r) => {
                            r.cell.remove("ell");
                            Job::Skipped(r)
                        }
                        j => j,
                    })
                    .collect()
            })
        }
        "corollary" => {
            let families = f
                .names(&p.family, "family", target)?
                .iter()
                .map(|s| CorollaryFamily::parse(s).map_err(|e| f.bad("family", e.to_string())))
                .collect::<Result2<Vec<_>>>()?;
            let ks = f.req(&p.k, "k", target)?;
            let is = f.req(&p.i, "i", target)?;
            let mut jobs = Vec::new();
            for family in families {
                let deltas = if family == CorollaryFamily::N1 {
                    f.req(&p.delta, "delta", target)?
                } else {
                    vec![0]
                };
                for &delta in &deltas {
                    for &k in &ks {
                        for &i in &is {
                            let mut template = VerificationReport::new(target, bound)
                                .with("family", family.name())
                                .with("k", k)
                                .with("i", i);
                            if family == CorollaryFamily::N1 {
                                template = template.with("delta", delta);
                            }
                            if k < 2 || i < 1 || i > family.i_max(k) {
                                jobs.push(skipped(
                                    template,
                                    format!("needs k >= 2 and 1 <= i <= {}", family.i_max(k)),
                                ));
                                continue;
                            }
                            if family == CorollaryFamily::N1 && !(0..=1).contains(&delta) {
                                jobs.push(skipped(template, "delta must be 0 or 1"));
                                continue;
                            }
                            let want_tables = cfg.tables.is_some();
                            jobs.push(Job::Run {
                                template,
                                work: Box::new(move || {
                                    let r = corollary_check(family, k, i, delta, bound);
                                    let mut tables = Vec::new();
                                    if want_tables && r.passed() {
                                        let sum = match family {
                                            CorollaryFamily::N1 => {
                                                ag_bressoud_sum(k, i, delta, bound)
                                            }
                                            CorollaryFamily::N2a => {
                                                gg_sum(k, i, GgVariant::N2a, bound)
                                            }
                                            CorollaryFamily::N2b => {
                                                gg_sum(k, i, GgVariant::N2b, bound)
                                            }
                                        };
                                        if let Ok(s) = sum {
                                            tables = rows(&r.key(), &s, bound);
                                        }
                                    }
                                    Output {
                                        reports: vec![r],
                                        tables,
                                    }
                                }),
                            });
                        }
                    }
                }
            }
            Ok(jobs)
        }
        "string-functions" => {
            let ells = f.req(&p.ell, "ell", target)?;
            let ms = f.req(&p.m, "m", target)?;
            let mut jobs = Vec::new();
            for n in f.req(&p.n, "N", target)? {
                for &ell in &ells {
                    for &m in &ms {
                        let template = VerificationReport::new(target, bound)
                            .with("N", n)
                            .with("ell", ell)
                            .with("m", m);
                        let idx = match StringFunctionIndex::new(n, ell, m) {
                            Ok(idx) => idx,
                            Err(e) => {
                                jobs.push(skipped(template, e.to_string()));
                                continue;
                            }
                        };
                        let want_tables = cfg.tables.is_some();
                        jobs.push(Job::Run {
                            template,
                            work: Box::new(move || {
                                let r = string_function_check(idx, bound);
                                let mut tables = Vec::new();
                                if want_tables && r.passed() {
                                    if let Ok(s) = string_function(idx, bound) {
                                        tables = rows(&r.key(), &s, bound);
                                    }
                                }
                                Output {
                                    reports: vec![r],
                                    tables,
                                }
                            }),
                        });
                    }
                }
            }
            Ok(jobs)
        }
        "transforms-audit" => {
            let cases = p.cases.unwrap_or(10);
            let seed = p.seed.unwrap_or(0);
            let template = VerificationReport::new("transform-audit", bound)
                .with("cases", cases)
                .with("seed", seed);
            Ok(vec![Job::Run {
                template,
                work: Box::new(move || Output {
                    reports: audit_transforms(cases, seed, bound),
                    tables: Vec::new(),
                }),
            }])
        }
        other => Err(ConfigError {
            line: line_of(src, "target"),
            field: Some("target".into()),
            message: format!("unknown target {other:?}"),
        }),
    }
}
