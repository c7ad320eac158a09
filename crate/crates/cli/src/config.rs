//! Sweep configuration: a TOML file naming one target and the parameter
//! ranges to expand into cells.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use qbailey_core::{rat, Exponent};

/// Every target a sweep can run.
pub const TARGETS: &[&str] = &[
    "conjugate-pair",
    "gamma-delta-pair",
    "lemma33",
    "recurrences",
    "telescopic",
    "hl-lemma",
    "thm44",
    "corollary",
    "string-functions",
    "transforms-audit",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub target: String,
    /// The truncation order is `order_numerator / order_denominator` in
    /// powers of `q`; coefficients strictly below it are compared.
    pub order_numerator: i64,
    #[serde(default = "one")]
    pub order_denominator: i64,
    /// Worker threads; defaults to the number of cores.
    pub workers: Option<usize>,
    /// Adds per-cell wall time to reports (makes output non-reproducible).
    #[serde(default)]
    pub timing: bool,
    /// JSON-lines report file; stdout when absent.
    pub output: Option<PathBuf>,
    /// CSV coefficient tables for targets that produce a named series.
    pub tables: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
    /// Adds a term to one δ of every conjugate-pair cell before checking.
    pub corrupt: Option<Corruption>,
}

fn one() -> i64 {
    1
}

/// Parameter ranges. Each integer field takes a number, a list, or an
/// inclusive `{ from, to }` range; an empty range expands to no cells.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: Option<IntSet>,
    pub ell: Option<IntSet>,
    pub lambda: Option<LambdaSet>,
    /// Absent means every σ the parity constraint admits.
    pub sigma: Option<IntSet>,
    #[serde(rename = "M")]
    pub big_m: Option<IntSet>,
    pub k: Option<IntSet>,
    pub i: Option<IntSet>,
    pub delta: Option<IntSet>,
    pub m: Option<IntSet>,
    pub family: Option<Vec<String>>,
    pub pair: Option<Vec<String>>,
    pub variant: Option<Vec<String>>,
    /// Range of every entry of `A` and `B` in telescopic cells.
    pub coord: Option<IntSet>,
    pub cases: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IntSet {
    One(i64),
    List(Vec<i64>),
    Range { from: i64, to: i64 },
}

impl IntSet {
    pub fn values(&self) -> Vec<i64> {
        match self {
            IntSet::One(v) => vec![*v],
            IntSet::List(v) => v.clone(),
            IntSet::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

/// Explicit partitions, or all partitions with parts `<= N - 1` up to a
/// weight.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LambdaSet {
    List(Vec<Vec<i64>>),
    Weight { max_weight: i64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corruption {
    #[serde(rename = "L")]
    pub l: i64,
    /// Exponent of the added term, `numerator / order_denominator`.
    pub exponent_numerator: i64,
    #[serde(default = "one")]
    pub coefficient: i64,
}

/// A config problem, located by line when the source pins it down.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error")?;
        if let Some(l) = self.line {
            write!(f, " at line {l}")?;
        }
        if let Some(k) = &self.field {
            write!(f, " in field `{k}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl SweepConfig {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = toml::from_str(src).map_err(|e| ConfigError {
            line: e
                .span()
                .map(|s| src[..s.start.min(src.len())].matches('\n').count() + 1),
            field: None,
            message: e.message().to_string(),
        })?;
        let fail = |field: &str, message: String| ConfigError {
            line: line_of(src, field),
            field: Some(field.to_string()),
            message,
        };
        if !TARGETS.contains(&cfg.target.as_str()) {
            return Err(fail(
                "target",
                format!(
                    "unknown target {:?}; expected one of {}",
                    cfg.target,
                    TARGETS.join(", ")
                ),
            ));
        }
        if cfg.order_denominator < 1 {
            return Err(fail("order_denominator", "must be >= 1".into()));
        }
        if cfg.order_numerator < 1 {
            return Err(fail("order_numerator", "must be >= 1".into()));
        }
        if cfg.workers == Some(0) {
            return Err(fail("workers", "must be >= 1".into()));
        }
        if cfg.corrupt.is_some() && cfg.target != "conjugate-pair" {
            return Err(fail(
                "corrupt",
                "only applies to target conjugate-pair".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn order(&self) -> Exponent {
        rat(self.order_numerator, self.order_denominator)
    }
}

/// First line assigning `key` or opening a `[key]` table.
pub fn line_of(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
                || t == format!("[{key}]")
        })
        .map(|p| p + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_and_defaults() {
        let cfg = SweepConfig::parse(
            "target = \"thm44\"\norder_numerator = 20\n[params]\nN = { from = 1, to = 3 }\nk = [2, 3]\ni = 1\nlambda = { max_weight = 2 }\n",
        )
        .unwrap();
        assert_eq!(cfg.order(), rat(20, 1));
        assert_eq!(cfg.params.n.unwrap().values(), vec![1, 2, 3]);
        assert_eq!(cfg.params.k.unwrap().values(), vec![2, 3]);
        assert_eq!(cfg.params.i.unwrap().values(), vec![1]);
        assert!(matches!(
            cfg.params.lambda,
            Some(LambdaSet::Weight { max_weight: 2 })
        ));
        assert!(cfg.params.sigma.is_none());
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = SweepConfig::parse("order_numerator = 5\ntarget = \"nope\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(e.field.as_deref(), Some("target"));
        let e = SweepConfig::parse("target = \"thm44\"\norder_numerator = \"x\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e =
            SweepConfig::parse("target = \"thm44\"\norder_numerator = 5\nbogus = 1\n").unwrap_err();
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn empty_range_has_no_values() {
        assert!(IntSet::Range { from: 3, to: 1 }.values().is_empty());
    }
}
