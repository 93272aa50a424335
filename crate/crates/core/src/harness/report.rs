//! CSV and JSON renderings of reports.
//!
//! Every number is printed with 17 significant digits in lowercase scientific
//! notation, in both formats, so the two are textually interchangeable.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::value::RawValue;

use super::{CheckReport, ReportRow, TableRow, Tolerances};
use crate::kernel::{kernel_table, RuleOrder};

pub const CHECK_COLUMNS: [&str; 16] = [
    "name",
    "n",
    "reference",
    "rule_value",
    "remainder",
    "identity_residual",
    "identity_ok",
    "actual_error",
    "bound_convex",
    "bound_holder_best",
    "bound_powermean_best",
    "best_theorem",
    "best_q",
    "best_bound",
    "hypothesis_status",
    "hh_sanity",
];

pub const TABLE_COLUMNS: [&str; 7] = ["name", "n", "q", "actual_error", "eq3", "eq4", "eq7"];

/// `1.2345678901234567e-3` style, 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn tolerance_pairs(t: &Tolerances) -> [(&'static str, String); 5] {
    [
        ("identity", format_number(t.identity)),
        ("reference", format_number(t.reference)),
        ("convexity", format_number(t.convexity)),
        ("domination", format_number(t.domination)),
        ("convexity_grid", t.convexity_grid.to_string()),
    ]
}

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn check_fields(r: &ReportRow) -> [String; 16] {
    let q = &r.quadrature;
    [
        r.name.clone(),
        r.n.to_string(),
        format_number(q.reference),
        format_number(q.rule_value),
        format_number(q.remainder),
        format_number(r.identity_residual()),
        r.identity_ok.to_string(),
        format_number(r.actual_error()),
        format_number(r.bound_convex),
        format_opt(r.bound_holder_best),
        format_number(r.bound_powermean_best),
        r.best.theorem.to_string(),
        format_opt(r.best.q_used),
        format_number(r.best.value),
        r.hypothesis_status.to_string(),
        r.hh_sanity.to_string(),
    ]
}

/// CSV check report. Tolerances lead as `# key=value` comment lines.
pub fn write_check_csv<W: Write>(report: &CheckReport, mut out: W) -> io::Result<()> {
    for (key, value) in tolerance_pairs(&report.tolerances) {
        writeln!(out, "# tolerance.{key}={value}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHECK_COLUMNS).map_err(csv_error)?;
    for row in &report.rows {
        w.write_record(check_fields(row)).map_err(csv_error)?;
    }
    w.flush()
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("formatted numbers are valid JSON")
}

fn raw_opt(x: Option<f64>) -> Option<Box<RawValue>> {
    x.map(|v| raw(format_number(v)))
}

#[derive(Serialize)]
struct JsonRow<'a> {
    name: &'a str,
    n: u32,
    reference: Box<RawValue>,
    rule_value: Box<RawValue>,
    remainder: Box<RawValue>,
    identity_residual: Box<RawValue>,
    identity_ok: bool,
    actual_error: Box<RawValue>,
    bound_convex: Box<RawValue>,
    bound_holder_best: Option<Box<RawValue>>,
    bound_powermean_best: Box<RawValue>,
    best_theorem: String,
    best_q: Option<Box<RawValue>>,
    best_bound: Box<RawValue>,
    hypothesis_status: String,
    hh_sanity: String,
}

#[derive(Serialize)]
struct JsonSummary {
    rows: usize,
    identity_failures: usize,
    violations: usize,
    sanity_failures: usize,
    passed: bool,
}

#[derive(Serialize)]
struct JsonTolerances {
    identity: Box<RawValue>,
    reference: Box<RawValue>,
    convexity: Box<RawValue>,
    domination: Box<RawValue>,
    convexity_grid: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tolerances: JsonTolerances,
    rows: Vec<JsonRow<'a>>,
    summary: JsonSummary,
}

/// JSON check report with the same numeric text as the CSV.
pub fn write_check_json<W: Write>(report: &CheckReport, mut out: W) -> io::Result<()> {
    let t = &report.tolerances;
    let tolerances = JsonTolerances {
        identity: raw(format_number(t.identity)),
        reference: raw(format_number(t.reference)),
        convexity: raw(format_number(t.convexity)),
        domination: raw(format_number(t.domination)),
        convexity_grid: t.convexity_grid,
    };
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let q = &r.quadrature;
            JsonRow {
                name: &r.name,
                n: r.n.get(),
                reference: raw(format_number(q.reference)),
                rule_value: raw(format_number(q.rule_value)),
                remainder: raw(format_number(q.remainder)),
                identity_residual: raw(format_number(r.identity_residual())),
                identity_ok: r.identity_ok,
                actual_error: raw(format_number(r.actual_error())),
                bound_convex: raw(format_number(r.bound_convex)),
                bound_holder_best: raw_opt(r.bound_holder_best),
                bound_powermean_best: raw(format_number(r.bound_powermean_best)),
                best_theorem: r.best.theorem.to_string(),
                best_q: raw_opt(r.best.q_used),
                best_bound: raw(format_number(r.best.value)),
                hypothesis_status: r.hypothesis_status.to_string(),
                hh_sanity: r.hh_sanity.to_string(),
            }
        })
        .collect();
    let doc = JsonReport {
        tolerances,
        rows,
        summary: JsonSummary {
            rows: report.rows.len(),
            identity_failures: report.identity_failures(),
            violations: report.violations(),
            sanity_failures: report.sanity_failures(),
            passed: report.passed(),
        },
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io::Error::other)?;
    writeln!(out)?;
    out.flush()
}

/// Bound-comparison table with header `name,n,q,actual_error,eq3,eq4,eq7`.
/// `eq4` is empty where `q = 1`.
pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_COLUMNS).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.name.clone(),
            r.n.to_string(),
            format_number(r.q),
            format_number(r.actual_error),
            format_number(r.eq3),
            format_opt(r.eq4),
            format_number(r.eq7),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

/// `t,value` samples of the kernel on a 1e-3 grid.
pub fn write_kernel_csv<W: Write>(n: RuleOrder, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value"]).map_err(csv_error)?;
    for (t, v) in kernel_table(n) {
        w.write_record([format_number(t), format_number(v)])
            .map_err(csv_error)?;
    }
    w.flush()
}
