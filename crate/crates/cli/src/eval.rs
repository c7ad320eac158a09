//! `eval`: one named series at given parameters, as a coefficient table.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use qbailey_core::bailey::{hl_delta, HlParams};
use qbailey_core::identities::{
    ag_bressoud_product, ag_bressoud_sum, gg_product, gg_sum, lattice_string_function,
    string_function, thm44_lhs, thm44_rhs, GgVariant, IdentityCell, StringFunctionIndex,
};
use qbailey_core::lattice::{Partition, SigmaContext};
use qbailey_core::qtools::{gauss_binom, residue_product};
use qbailey_core::{rat, Exponent, LaurentSeries};

/// Series names `eval` understands, with their parameters.
pub const SERIES: &[(&str, &str)] = &[
    ("gauss-binom", "top bottom"),
    ("residue-product", "mod exclude order"),
    ("string-function", "N l m order"),
    ("lattice-string-function", "N l m order"),
    ("hl-delta", "N ell lambda sigma M L k order"),
    ("ag-bressoud-sum", "k i delta order"),
    ("ag-bressoud-product", "k i delta order"),
    ("gg-sum", "k i variant order"),
    ("gg-product", "k i variant order"),
    ("thm44-lhs", "N delta k i lambda sigma order"),
    ("thm44-rhs", "N delta k i lambda sigma order"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `key=value` arguments; every key must be consumed.
struct Args {
    map: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Args {
    fn parse(raw: &[String]) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for a in raw {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {a:?}"))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("parameter {k} given twice"));
            }
        }
        Ok(Args {
            map,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn raw(&self, keys: &[&str]) -> Option<&str> {
        keys.iter().find_map(|k| {
            self.map.get(*k).map(|v| {
                self.used.borrow_mut().insert(k.to_string());
                v.as_str()
            })
        })
    }

    fn int(&self, keys: &[&str]) -> Result<i64, String> {
        let v = self
            .raw(keys)
            .ok_or_else(|| format!("missing parameter {}", keys[0]))?;
        v.parse()
            .map_err(|_| format!("parameter {} must be an integer, got {v:?}", keys[0]))
    }

    fn list(&self, key: &str) -> Result<Vec<i64>, String> {
        match self.raw(&[key]) {
            None | Some("") => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim().parse().map_err(|_| {
                        format!("parameter {key} must be a list of integers, got {v:?}")
                    })
                })
                .collect(),
        }
    }

    fn order(&self) -> Result<Exponent, String> {
        let v = self.raw(&["order"]).ok_or("missing parameter order")?;
        let bad = || format!("order must be an integer or a/b, got {v:?}");
        let (n, d) = match v.split_once('/') {
            Some((n, d)) => (
                n.parse().map_err(|_| bad())?,
                d.parse::<i64>().map_err(|_| bad())?,
            ),
            None => (v.parse().map_err(|_| bad())?, 1),
        };
        if d < 1 {
            return Err(bad());
        }
        Ok(rat(n, d))
    }

    fn partition(&self) -> Result<Partition, String> {
        Partition::new(self.list("lambda")?).map_err(|e| e.to_string())
    }

    fn variant(&self) -> Result<GgVariant, String> {
        match self.raw(&["variant"]).map(|s| s.to_ascii_uppercase()) {
            Some(v) if v == "N2A" => Ok(GgVariant::N2a),
            Some(v) if v == "N2B" => Ok(GgVariant::N2b),
            Some(v) => Err(format!("variant must be N2a or N2b, got {v:?}")),
            None => Err("missing parameter variant".into()),
        }
    }

    fn finish(&self) -> Result<(), String> {
        let used = self.used.borrow();
        match self.map.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(format!("unknown parameter {k}")),
            None => Ok(()),
        }
    }
}

/// The named series and the bound below which its table is printed
/// (`None` for exact polynomials).
pub fn evaluate(name: &str, raw: &[String]) -> Result<(LaurentSeries, Option<Exponent>), String> {
    let a = Args::parse(raw)?;
    let core = |e: qbailey_core::Error| e.to_string();
    let out = match name {
        "gauss-binom" => {
            let (top, bottom) = (a.int(&["top"])?, a.int(&["bottom"])?);
            (gauss_binom(top, bottom), None)
        }
        "residue-product" => {
            let (m, ex, b) = (a.int(&["mod"])?, a.list("exclude")?, a.order()?);
            (residue_product(m, &ex, b).map_err(core)?, Some(b))
        }
        "string-function" | "lattice-string-function" => {
            let idx =
                StringFunctionIndex::new(a.int(&["N"])?, a.int(&["l", "ell"])?, a.int(&["m"])?)
                    .map_err(core)?;
            let b = a.order()?;
            let s = if name == "string-function" {
                string_function(idx, b)
            } else {
                lattice_string_function(idx, b)
            };
            (s.map_err(core)?, Some(b))
        }
        "hl-delta" => {
            let ctx = SigmaContext::new(
                a.int(&["N"])?,
                a.int(&["ell", "l"])?,
                a.partition()?,
                a.int(&["sigma"])?,
            )
            .map_err(core)?;
            let p = HlParams::new(a.int(&["M"])?, ctx).map_err(core)?;
            let (l, k, b) = (a.int(&["L"])?, a.int(&["k"])?, a.order()?);
            (hl_delta(&p, l, k, b).map_err(core)?, Some(b))
        }
        "ag-bressoud-sum" | "ag-bressoud-product" => {
            let (k, i, d, b) = (
                a.int(&["k"])?,
                a.int(&["i"])?,
                a.int(&["delta"])?,
                a.order()?,
            );
            let s = if name == "ag-bressoud-sum" {
                ag_bressoud_sum(k, i, d, b)
            } else {
                ag_bressoud_product(k, i, d, b)
            };
            (s.map_err(core)?, Some(b))
        }
        "gg-sum" | "gg-product" => {
            let (k, i, v, b) = (a.int(&["k"])?, a.int(&["i"])?, a.variant()?, a.order()?);
            let s = if name == "gg-sum" {
                gg_sum(k, i, v, b)
            } else {
                gg_product(k, i, v, b)
            };
            (s.map_err(core)?, Some(b))
        }
        "thm44-lhs" | "thm44-rhs" => {
            let cell = IdentityCell::new(
                a.int(&["N"])?,
                a.int(&["delta"])?,
                a.int(&["k"])?,
                a.int(&["i"])?,
                a.partition()?,
                a.int(&["sigma"])?,
            )
            .map_err(core)?;
            let b = a.order()?;
            let s = if name == "thm44-lhs" {
                thm44_lhs(&cell, b)
            } else {
                thm44_rhs(&cell, b)
            };
            (s.map_err(core)?, Some(b))
        }
        _ => {
            let names: Vec<&str> = SERIES.iter().map(|(n, _)| *n).collect();
            return Err(format!(
                "unknown series {name:?}; expected one of {}",
                names.join(", ")
            ));
        }
    };
    a.finish()?;
    Ok(out)
}

/// Writes the table as CSV (`exponent_num,denom,coefficient`) or as the
/// series JSON envelope.
pub fn write(
    s: &LaurentSeries,
    bound: Option<Exponent>,
    format: Format,
    out: impl Write,
) -> Result<(), String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| e.to_string();
            w.write_record(["exponent_num", "denom", "coefficient"])
                .map_err(io)?;
            for (e, d, c) in s.table(bound) {
                w.write_record([e.to_string(), d.to_string(), c.to_string()])
                    .map_err(io)?;
            }
            w.flush().map_err(|e| e.to_string())
        }
        Format::Json => {
            let shown = match bound {
                Some(b) => s.truncate(b),
                None => s.clone(),
            };
            let mut out = out;
            serde_json::to_writer(&mut out, &shown).map_err(|e| e.to_string())?;
            writeln!(out).map_err(|e| e.to_string())
        }
    }
}
