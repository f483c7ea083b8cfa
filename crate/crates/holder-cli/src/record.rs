//! Machine-readable output: the JSON record wrapping every command's
//! result, and shortest-round-trip number formatting for CSV.

use serde::Serialize;
use serde_json::{json, Map, Value};

use holder_bounds::hermite_hadamard::HHReport;
use holder_bounds::holder_integral::BoundChainReport;
use holder_bounds::holder_sum::SumChainReport;

/// Top-level JSON envelope: mode, echoed inputs, results, tool version.
#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub mode: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub version: String,
}

impl OutputRecord {
    pub fn new(mode: &str, inputs: Map<String, Value>, results: Value) -> Self {
        OutputRecord {
            mode: mode.to_string(),
            inputs,
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("record serializes");
        out.push('\n');
        out
    }
}

/// Shortest decimal representation that parses back to the same double.
pub fn fmt_num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float serializes")
}

pub fn chain_results(report: &BoundChainReport) -> Value {
    json!({
        "lhs": report.lhs,
        "refined_terms": report.refined_terms,
        "refined_total": report.refined_total,
        "classical": report.classical,
        "gap_refined": report.gap_refined,
        "gap_lhs": report.gap_lhs,
        "chain_ok": report.chain_ok,
        "tolerance": report.tolerance,
    })
}

pub fn sum_results(report: &SumChainReport) -> Value {
    json!({
        "lhs": report.lhs,
        "refined_terms": report.refined_terms,
        "refined_total": report.refined_total,
        "classical": report.classical,
        "gap_refined": report.gap_refined,
        "gap_lhs": report.gap_lhs,
        "chain_ok": report.chain_ok,
        "tolerance": report.tolerance,
    })
}

pub fn hh_results(report: &HHReport) -> Value {
    json!({
        "defect": report.defect,
        "dragomir": report.dragomir,
        "refined": report.refined,
        "convexity_ok": report.convexity_ok,
        "ordering_ok": report.ordering_ok,
    })
}

/// One CSV document: header plus rows, every number shortest-round-trip.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Common fields of the integral and sum chain reports, for CSV output.
pub struct ChainValues<'a> {
    pub lhs: f64,
    pub terms: &'a [f64],
    pub total: f64,
    pub classical: f64,
    pub gap_refined: f64,
    pub gap_lhs: f64,
    pub chain_ok: bool,
    pub tolerance: f64,
}

impl<'a> From<&'a BoundChainReport> for ChainValues<'a> {
    fn from(r: &'a BoundChainReport) -> Self {
        ChainValues {
            lhs: r.lhs,
            terms: &r.refined_terms,
            total: r.refined_total,
            classical: r.classical,
            gap_refined: r.gap_refined,
            gap_lhs: r.gap_lhs,
            chain_ok: r.chain_ok,
            tolerance: r.tolerance,
        }
    }
}

impl<'a> From<&'a SumChainReport> for ChainValues<'a> {
    fn from(r: &'a SumChainReport) -> Self {
        ChainValues {
            lhs: r.lhs,
            terms: &r.refined_terms,
            total: r.refined_total,
            classical: r.classical,
            gap_refined: r.gap_refined,
            gap_lhs: r.gap_lhs,
            chain_ok: r.chain_ok,
            tolerance: r.tolerance,
        }
    }
}

/// Chain-report CSV row shared by the integral and sum commands.
pub fn chain_csv(mode: &str, values: ChainValues<'_>) -> String {
    let row = vec![
        mode.to_string(),
        fmt_num(values.lhs),
        fmt_num(values.total),
        fmt_num(values.classical),
        fmt_num(values.gap_refined),
        fmt_num(values.gap_lhs),
        values.chain_ok.to_string(),
        fmt_num(values.tolerance),
        values
            .terms
            .iter()
            .map(|t| fmt_num(*t))
            .collect::<Vec<_>>()
            .join(";"),
    ];
    csv_document(
        &[
            "mode",
            "lhs",
            "refined_total",
            "classical",
            "gap_refined",
            "gap_lhs",
            "chain_ok",
            "tolerance",
            "refined_terms",
        ],
        &[row],
    )
}
