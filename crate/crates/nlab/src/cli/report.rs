//! Report files: a flat, machine-readable record format plus a human table.
//!
//! The machine form is line-oriented with a fixed section order and stable
//! field order, so byte equality of two reports means equal results:
//!
//! ```text
//! #nlab-report v1
//! config <key>=<value>
//! row length=<j> pattern=<digits> count=<c> empirical=<f> expected=<f> deviation=<f>
//! curve n=<N> discrepancy=<f>
//! starred pattern=<p> n=<N> count=<c> frequency=<f> expected=<f|->
//! check id=<id> pass=<bool> measured=<f|-> detail=<text>
//! summary <key>=<value>
//! ```
//!
//! Every report embeds the full run configuration under `config`, so the run
//! can be reproduced exactly from the report alone.

use crate::analyze::{DiscrepancyCurve, FrequencyReport, StarredCount};

fn fmt_f64(x: f64) -> String {
    format!("{x:.9}")
}

#[derive(Debug, Clone)]
pub struct RowRecord {
    pub length: u32,
    pub pattern: String,
    pub count: u64,
    pub empirical: f64,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct StarredRecord {
    pub pattern: String,
    pub n: u64,
    pub count: u64,
    pub frequency: f64,
    pub expected: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub id: String,
    pub pass: bool,
    pub measured: Option<f64>,
    pub detail: String,
}

/// An in-memory report, serialized in one fixed order.
#[derive(Debug, Clone, Default)]
pub struct ReportDoc {
    pub config: Vec<(String, String)>,
    pub rows: Vec<RowRecord>,
    pub curve: Vec<(u64, f64)>,
    pub starred: Vec<StarredRecord>,
    pub checks: Vec<CheckRecord>,
    pub summary: Vec<(String, String)>,
}

impl ReportDoc {
    pub fn new() -> Self {
        ReportDoc::default()
    }

    pub fn config(&mut self, key: impl Into<String>, value: impl ToString) {
        self.config.push((key.into(), value.to_string()));
    }

    pub fn summary(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    fn pattern_text(base: u32, digits: &[u32]) -> String {
        if base <= 10 {
            digits.iter().map(|d| d.to_string()).collect()
        } else {
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn add_rows(&mut self, report: &FrequencyReport) {
        for row in &report.rows {
            self.rows.push(RowRecord {
                length: row.length,
                pattern: Self::pattern_text(report.base, row.pattern.digits()),
                count: row.count,
                empirical: row.empirical,
                expected: row.expected,
                deviation: row.deviation,
            });
        }
    }

    pub fn add_curve(&mut self, curve: &DiscrepancyCurve) {
        self.curve.extend(curve.points.iter().copied());
    }

    pub fn add_starred(&mut self, pattern: &str, count: &StarredCount, expected: Option<f64>) {
        self.starred.push(StarredRecord {
            pattern: pattern.to_string(),
            n: count.n,
            count: count.count,
            frequency: count.frequency,
            expected,
        });
    }

    pub fn add_check(&mut self, id: impl Into<String>, pass: bool, measured: Option<f64>, detail: impl Into<String>) {
        self.checks.push(CheckRecord {
            id: id.into(),
            pass,
            measured,
            detail: detail.into(),
        });
    }

    /// The machine-readable form.
    pub fn to_text(&self) -> String {
        let mut out = String::from("#nlab-report v1\n");
        for (k, v) in &self.config {
            out.push_str(&format!("config {k}={v}\n"));
        }
        for r in &self.rows {
            out.push_str(&format!(
                "row length={} pattern={} count={} empirical={} expected={} deviation={}\n",
                r.length,
                r.pattern,
                r.count,
                fmt_f64(r.empirical),
                fmt_f64(r.expected),
                fmt_f64(r.deviation)
            ));
        }
        for &(n, d) in &self.curve {
            out.push_str(&format!("curve n={n} discrepancy={}\n", fmt_f64(d)));
        }
        for s in &self.starred {
            let expected = s.expected.map(fmt_f64).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "starred pattern={} n={} count={} frequency={} expected={expected}\n",
                s.pattern,
                s.n,
                s.count,
                fmt_f64(s.frequency)
            ));
        }
        for c in &self.checks {
            let measured = c.measured.map(fmt_f64).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "check id={} pass={} measured={measured} detail={}\n",
                c.id, c.pass, c.detail
            ));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("summary {k}={v}\n"));
        }
        out
    }

    /// A fixed-width table for terminals.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        if !self.rows.is_empty() {
            out.push_str(&format!(
                "{:>4}  {:<12} {:>12}  {:>12}  {:>12}  {:>12}\n",
                "len", "pattern", "count", "empirical", "expected", "deviation"
            ));
            for r in &self.rows {
                out.push_str(&format!(
                    "{:>4}  {:<12} {:>12}  {:>12.9}  {:>12.9}  {:>+12.9}\n",
                    r.length, r.pattern, r.count, r.empirical, r.expected, r.deviation
                ));
            }
        }
        if !self.curve.is_empty() {
            out.push_str("\ndiscrepancy by horizon:\n");
            for &(n, d) in &self.curve {
                out.push_str(&format!("  N={n:<12} {d:.9}\n"));
            }
        }
        for s in &self.starred {
            let expected = s
                .expected
                .map(|e| format!("{e:.9}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "\nstarred {}: count {} of {} blocks, frequency {:.9}, expected {expected}\n",
                s.pattern, s.count, s.n, s.frequency
            ));
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let status = if c.pass { "pass" } else { "FAIL" };
                out.push_str(&format!("[{status}] {:<26} {}\n", c.id, c.detail));
            }
        }
        if !self.summary.is_empty() {
            out.push('\n');
            for (k, v) in &self.summary {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}
