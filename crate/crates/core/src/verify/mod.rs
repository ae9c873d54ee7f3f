//! Exhaustive verification of the group-theoretic facts behind the classifier.
//!
//! Results are emitted as [`VerifyRecord`]s, one per (case, n, check), in a
//! deterministic order regardless of how many worker threads ran them.

pub mod catalog;
pub mod checks;
pub mod section4;

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use catalog::{catalog, default_max_n, find_case, materialize, CartanFilter, GenSpec, ImageCase, Presentation};
pub use checks::{
    base_commutator_orders, check_cartan_sizes, check_degree_identity, check_golden_examples, check_inert_conjugacy,
    check_kernel_structure, check_reduction_lemmas, golden_examples, CartanSizeRow, ConjugacyReport, DegreeReport,
    GoldenReport, KernelRow, LemmaReport, INERT_AT_2_DISCS,
};
pub use section4::{
    bound_step, certify_step, commutator_order_table, nonsplit_quotient_formula, perturbation_quotient,
    split_quotient_formula, BoundStepReport, CommutatorRow, FormulaCheck, StepCertificate,
};

/// A group of checks runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Section4,
    Theorems,
    Conjugacy,
}

impl Suite {
    /// Every suite in run order.
    pub const ALL: [Suite; 4] = [Suite::Lemmas, Suite::Section4, Suite::Theorems, Suite::Conjugacy];

    /// Name used on the command line and in records.
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Section4 => "section4",
            Suite::Theorems => "theorems",
            Suite::Conjugacy => "conjugacy",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnsupportedInput(format!("unknown suite {s:?}")))
    }
}

/// One verification outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub suite: Suite,
    pub case: String,
    pub n: Option<u32>,
    pub check: String,
    pub pass: bool,
    pub values: Value,
}

fn record(suite: Suite, case: &str, n: Option<u32>, check: &str, pass: bool, values: Value) -> VerifyRecord {
    VerifyRecord { suite, case: case.to_string(), n, check: check.to_string(), pass, values }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn cap_for(case: &ImageCase, max_n: Option<u32>) -> u32 {
    max_n.map_or_else(|| default_max_n(case.p), |m| m.min(default_max_n(case.p)).max(1))
}

fn lemma_records(max_n: Option<u32>) -> Result<Vec<VerifyRecord>> {
    let mut jobs = Vec::new();
    for case in catalog() {
        let top = cap_for(&case, max_n).max(case.level_of_definition + 1);
        for n in 1..top {
            jobs.push((case.clone(), n));
        }
    }
    let mut out: Vec<VerifyRecord> = jobs
        .par_iter()
        .map(|(case, n)| {
            let r = check_reduction_lemmas(case, *n)?;
            Ok(record(Suite::Lemmas, &case.label, Some(*n), "reduction-lemmas", r.pass(), to_value(&r)))
        })
        .collect::<Result<_>>()?;
    for row in check_cartan_sizes(&[2, 3, 5, 7], 3)? {
        let label = format!("cartan-size-disc{}-p{}", row.order.disc(), row.p);
        out.push(record(
            Suite::Lemmas,
            &label,
            Some(row.n),
            "cartan-size",
            row.computed == row.expected,
            to_value(&row),
        ));
    }
    for row in check_kernel_structure(&[(2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)])? {
        let label = format!("kernel-disc{}-p{}", row.order.disc(), row.p);
        let pass = row.equal && row.formula_count as u64 == row.p * row.p;
        out.push(record(Suite::Lemmas, &label, Some(row.n), "kernel-matrices", pass, to_value(&row)));
    }
    Ok(out)
}

fn section4_records(max_n: Option<u32>) -> Result<Vec<VerifyRecord>> {
    let mut jobs = Vec::new();
    for case in catalog() {
        for n in 1..cap_for(&case, max_n) {
            jobs.push((case.clone(), n));
        }
    }
    let mut out: Vec<VerifyRecord> = jobs
        .par_iter()
        .map(|(case, n)| {
            let c = certify_step(case, *n)?;
            let pass = c.kernel_certificate.is_some();
            Ok(record(Suite::Section4, &case.label, Some(*n), "kappa-certificate", pass, to_value(&c)))
        })
        .collect::<Result<_>>()?;
    for (p, delta) in [(5u64, (-7i64, 4i64)), (7, (-1, 1))] {
        for n in 1..=2 {
            let s = split_quotient_formula(p, n, 2, 3)?;
            out.push(record(
                Suite::Section4,
                &format!("split-formula-p{p}"),
                Some(n),
                "quotient-formula",
                s.pass,
                to_value(&s),
            ));
            let ns = nonsplit_quotient_formula(p, n, delta, 2, 1)?;
            out.push(record(
                Suite::Section4,
                &format!("nonsplit-formula-p{p}"),
                Some(n),
                "quotient-formula",
                ns.pass,
                to_value(&ns),
            ));
        }
    }
    Ok(out)
}

fn theorem_records(max_n: Option<u32>) -> Result<Vec<VerifyRecord>> {
    let mut jobs = Vec::new();
    for case in catalog() {
        for &w in &case.witnesses {
            for n in 1..=cap_for(&case, max_n) {
                jobs.push((case.clone(), w, n));
            }
        }
    }
    let mut out: Vec<VerifyRecord> = jobs
        .par_iter()
        .map(|(case, w, n)| {
            let r = check_degree_identity(case, *w, *n)?;
            Ok(record(Suite::Theorems, &case.label, Some(*n), "degree-identity", r.pass, to_value(&r)))
        })
        .collect::<Result<_>>()?;
    for g in check_golden_examples()? {
        let label = format!("example-{}-{}-p{}", g.example.a, g.example.b, g.example.p);
        out.push(record(Suite::Theorems, &label, Some(g.example.n), "golden-example", g.pass, to_value(&g)));
    }
    Ok(out)
}

fn conjugacy_records() -> Result<Vec<VerifyRecord>> {
    let r = check_inert_conjugacy()?;
    let mut out = Vec::new();
    let orders_ok = r.orders.iter().all(|&(_, o)| o == 384);
    out.push(record(Suite::Conjugacy, "inert-normalizers-16", None, "orders", orders_ok, json!(r.orders)));
    for p in &r.pairs {
        let label = format!("disc{}-disc{}", p.disc_a, p.disc_b);
        out.push(record(Suite::Conjugacy, &label, None, "conjugate", p.verified, to_value(p)));
    }
    Ok(out)
}

/// Run one suite. `max_n` lowers the per-prime level caps (3 for odd p, 4 for p = 2).
pub fn run_suite(suite: Suite, max_n: Option<u32>) -> Result<Vec<VerifyRecord>> {
    let mut out = match suite {
        Suite::Lemmas => lemma_records(max_n)?,
        Suite::Section4 => section4_records(max_n)?,
        Suite::Theorems => theorem_records(max_n)?,
        Suite::Conjugacy => conjugacy_records()?,
    };
    out.sort_by(|a, b| (&a.case, a.n, &a.check).cmp(&(&b.case, b.n, &b.check)));
    Ok(out)
}
