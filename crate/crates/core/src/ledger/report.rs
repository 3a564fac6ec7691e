use std::fmt::Write;
use std::time::Duration;

use serde::Serialize;

use crate::quad::QuadConfig;

use super::ClaimResult;

/// Version of the JSON report schema.
pub const REPORT_VERSION: u32 = 1;

/// Results of one run, ordered by claim id.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: QuadConfig<f64>,
    pub results: Vec<ClaimResult>,
    pub all_passed: bool,
    pub elapsed: Duration,
}

// Field order here is the key order of the JSON output.
#[derive(Serialize)]
struct JsonReport<'a> {
    version: u32,
    config: &'a QuadConfig<f64>,
    claims: Vec<JsonClaim<'a>>,
    all_passed: bool,
}

#[derive(Serialize)]
struct JsonClaim<'a> {
    id: &'a str,
    lhs: f64,
    rhs: f64,
    abs_diff: f64,
    passed: bool,
    evals: usize,
    ms: f64,
}

const TABLE_WIDTHS: [usize; 5] = [6, 22, 22, 9, 6];

impl Report {
    pub fn new(config: QuadConfig<f64>, results: Vec<ClaimResult>, elapsed: Duration) -> Self {
        let all_passed = results.iter().all(|r| r.passed);
        Self {
            config,
            results,
            all_passed,
            elapsed,
        }
    }

    pub fn passed_count(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn any_non_converged(&self) -> bool {
        self.results.iter().any(ClaimResult::non_converged)
    }

    /// Pretty-printed JSON; non-finite values are written as `null`.
    pub fn to_json(&self) -> String {
        let doc = JsonReport {
            version: REPORT_VERSION,
            config: &self.config,
            claims: self
                .results
                .iter()
                .map(|r| JsonClaim {
                    id: &r.claim_id,
                    lhs: r.lhs_value,
                    rhs: r.rhs_value,
                    abs_diff: r.abs_diff,
                    passed: r.passed,
                    evals: r.evaluations,
                    ms: (r.elapsed.as_secs_f64() * 1e6).round() / 1e3,
                })
                .collect(),
            all_passed: self.all_passed,
        };
        serde_json::to_string_pretty(&doc).expect("report serialises")
    }

    /// Fixed-width table, one row per claim, then a summary line and the
    /// messages of failed claims.
    pub fn to_table(&self) -> String {
        let [w_id, w_val, _, w_diff, w_status] = TABLE_WIDTHS;
        let mut out = String::new();
        writeln!(
            out,
            "{:<w_id$} {:>w_val$} {:>w_val$} {:>w_diff$} {:>w_status$}",
            "id", "lhs", "rhs", "|diff|", "status"
        )
        .ok();
        writeln!(
            out,
            "{}",
            "-".repeat(TABLE_WIDTHS.iter().sum::<usize>() + 4)
        )
        .ok();
        for r in &self.results {
            writeln!(
                out,
                "{:<w_id$} {:>w_val$.15e} {:>w_val$.15e} {:>w_diff$.2e} {:>w_status$}",
                r.claim_id,
                r.lhs_value,
                r.rhs_value,
                r.abs_diff,
                r.status()
            )
            .ok();
        }
        writeln!(
            out,
            "{}/{} claims passed",
            self.passed_count(),
            self.results.len()
        )
        .ok();
        for r in &self.results {
            if let Some(f) = &r.failure {
                writeln!(out, "{}: {}", r.claim_id, f.message).ok();
            }
        }
        out
    }
}
