//! Rendering of outcomes as text, JSON or CSV.

use std::collections::BTreeMap;

use anyhow::Result;
use clap::ValueEnum;
use mbtri_core::verify::CheckReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::run::{Outcome, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    /// Structured output.
    #[value(alias = "structured")]
    #[serde(alias = "structured")]
    Json,
    Csv,
}

/// First 16 hex digits of SHA-256 over the JSON of the sorted parameter map.
pub fn params_hash(params: &BTreeMap<String, String>) -> String {
    let json = serde_json::to_string(params).expect("string map serializes");
    hex::encode(&Sha256::digest(json.as_bytes())[..8])
}

#[derive(Debug, Default, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    /// Experimental checks that did not pass; never gating.
    pub flagged: usize,
    pub skipped: usize,
    pub worst_rel_err: Option<f64>,
}

impl Tally {
    fn add(&mut self, o: &Outcome) {
        match o.status() {
            Status::Pass => self.passed += 1,
            Status::Fail => self.failed += 1,
            Status::Flag => self.flagged += 1,
            Status::Skip => self.skipped += 1,
        }
        if let Outcome::Checked { report } = o {
            let e = report.rel_err;
            self.worst_rel_err = Some(match self.worst_rel_err {
                Some(w) if e <= w => w,
                _ => e,
            });
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    #[serde(flatten)]
    pub all: Tally,
    pub by_identity: BTreeMap<String, Tally>,
}

impl Summary {
    pub fn of(outcomes: &[Outcome]) -> Self {
        let mut s = Summary { total: outcomes.len(), ..Default::default() };
        for o in outcomes {
            s.all.add(o);
            s.by_identity.entry(o.identity().to_string()).or_default().add(o);
        }
        s
    }

    pub fn any_failed(&self) -> bool {
        self.all.failed > 0
    }
}

#[derive(Serialize)]
struct Case<'a> {
    index: usize,
    identity: &'a str,
    status: Status,
    params_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<&'a BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
}

fn case(index: usize, o: &Outcome) -> Case<'_> {
    let (report, params, reason) = match o {
        Outcome::Checked { report } => (Some(report), None, None),
        Outcome::Skipped { params, reason, .. } => (None, Some(params), Some(reason.as_str())),
    };
    Case {
        index,
        identity: o.identity(),
        status: o.status(),
        params_hash: params_hash(o.params()),
        report,
        params,
        reason,
    }
}

pub fn render(outcomes: &[Outcome], format: Format, detail: bool) -> Result<String> {
    let summary = Summary::of(outcomes);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                cases: Vec<Case<'a>>,
                summary: &'a Summary,
            }
            let doc = Doc { cases: outcomes.iter().enumerate().map(|(i, o)| case(i, o)).collect(), summary: &summary };
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["identity", "params_hash", "rel_err", "passed", "status"])?;
            for o in outcomes {
                let (rel, passed) = match o {
                    Outcome::Checked { report } => (format!("{:e}", report.rel_err), report.passed.to_string()),
                    Outcome::Skipped { .. } => (String::new(), "false".into()),
                };
                let status = serde_json::to_value(o.status())?.as_str().unwrap_or_default().to_string();
                w.write_record([o.identity(), &params_hash(o.params()), &rel, &passed, &status])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => Ok(text(outcomes, &summary, detail)),
    }
}

fn kv(params: &BTreeMap<String, String>) -> String {
    params.iter().filter(|(k, _)| k.as_str() != "grid").map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn text(outcomes: &[Outcome], summary: &Summary, detail: bool) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    for o in outcomes {
        match o {
            Outcome::Checked { report: r } => {
                let tag = match o.status() {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    _ => "FLAG",
                };
                if r.experimental {
                    if let Some(b) = r.diagnostics.iter().find(|d| d.starts_with("EXPERIMENTAL")) {
                        line(format!("*** {b} ***"));
                    }
                }
                let time = r.wall_time.map(|t| format!(" ({t:.3} s)")).unwrap_or_default();
                line(format!(
                    "[{tag}] {} {} rel_err={:.3e} tol={:e}{}{time}",
                    r.identity,
                    kv(&r.params),
                    r.rel_err,
                    r.tolerance,
                    if r.converged { "" } else { " UNCONVERGED" }
                ));
                line(format!("    lhs = {:.16e} {:+.16e}i", r.lhs.re, r.lhs.im));
                line(format!("    rhs = {:.16e} {:+.16e}i", r.rhs.re, r.rhs.im));
                if let Some(s) = r.symbolic {
                    line(format!("    symbolic: {}", if s { "exact match" } else { "MISMATCH" }));
                }
                if detail || o.status() != Status::Pass {
                    for d in &r.diagnostics {
                        line(format!("    | {d}"));
                    }
                }
            }
            Outcome::Skipped { identity, params, reason } => {
                line(format!("[SKIP] {identity} {}: {reason}", kv(params)));
            }
        }
    }
    let a = &summary.all;
    line(format!(
        "summary: {} cases, {} passed, {} failed, {} flagged, {} skipped",
        summary.total, a.passed, a.failed, a.flagged, a.skipped
    ));
    for (id, t) in &summary.by_identity {
        let worst = t.worst_rel_err.map(|w| format!("{w:.3e}")).unwrap_or_else(|| "-".into());
        line(format!(
            "  {id:<14} pass {:>3}  fail {:>3}  flag {:>3}  skip {:>3}  worst rel_err {worst}",
            t.passed, t.failed, t.flagged, t.skipped
        ));
    }
    out
}
