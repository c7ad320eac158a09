//! Structured outcomes of truncated identity checks.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Exponent, LaurentSeries, Mismatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    UnverifiedBound,
}

/// First differing coefficient, with the exponent written as `num/den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchReport {
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

impl From<&Mismatch> for MismatchReport {
    fn from(m: &Mismatch) -> Self {
        MismatchReport {
            exponent: fmt_rational(m.exponent),
            lhs: m.lhs.to_string(),
            rhs: m.rhs.to_string(),
        }
    }
}

/// Rationals in reports are `num/den` strings (integers print bare).
pub fn fmt_rational(r: Exponent) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub target: String,
    /// Parameter cell; keys sort deterministically.
    pub cell: BTreeMap<String, String>,
    pub order: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mismatch: Option<MismatchReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}

impl VerificationReport {
    pub fn new(target: &str, order: Exponent) -> Self {
        VerificationReport {
            target: target.to_string(),
            cell: BTreeMap::new(),
            order: fmt_rational(order),
            status: Status::Skipped,
            mismatch: None,
            detail: None,
            seed: None,
            wall_ms: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.cell.insert(key.to_string(), value.to_string());
        self
    }

    /// Cell key used to sort report streams.
    pub fn key(&self) -> String {
        let mut s = self.target.clone();
        for (k, v) in &self.cell {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Records the outcome of a check that produced a window comparison.
    pub fn settle(mut self, outcome: Result<Option<Mismatch>>) -> Self {
        match outcome {
            Ok(None) => self.status = Status::Pass,
            Ok(Some(m)) => {
                self.status = Status::Fail;
                self.mismatch = Some(MismatchReport::from(&m));
            }
            Err(Error::EnumerationBoundUnverified(msg)) => {
                self.status = Status::UnverifiedBound;
                self.detail = Some(msg);
            }
            Err(e) => {
                self.status = Status::Fail;
                self.detail = Some(e.to_string());
            }
        }
        self
    }

    /// Runs `check`, records its outcome and wall time.
    pub fn run(self, check: impl FnOnce() -> Result<Option<Mismatch>>) -> Self {
        let t = Instant::now();
        let mut r = self.settle(check());
        r.wall_ms = Some(t.elapsed().as_secs_f64() * 1e3);
        r
    }

    pub fn note(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Compares two series below `bound`.
pub fn compare(
    lhs: &LaurentSeries,
    rhs: &LaurentSeries,
    bound: Exponent,
) -> Result<Option<Mismatch>> {
    lhs.eq_up_to(rhs, bound)
}

/// Compares two exact series everywhere.
pub fn exact_compare(lhs: &LaurentSeries, rhs: &LaurentSeries) -> Result<Option<Mismatch>> {
    let top = [lhs.degree(), rhs.degree()]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or_else(|| crate::series::int(0));
    lhs.eq_up_to(rhs, top + crate::series::int(1))
}

/// Folds several window checks, keeping the first failure.
pub fn first_failure<I>(checks: I) -> Result<Option<Mismatch>>
where
    I: IntoIterator<Item = Result<Option<Mismatch>>>,
{
    for c in checks {
        if let Some(m) = c? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
