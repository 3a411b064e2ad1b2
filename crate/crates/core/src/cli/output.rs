//! JSON and CSV report writers.

use std::io::Write;

use serde::Serialize;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::verify::{Measurement, ReportVerdict, Status, VerificationReport};

#[derive(Serialize)]
pub struct RunReport<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub verdict: ReportVerdict,
    pub reports: &'a [VerificationReport],
}

pub fn overall(reports: &[VerificationReport]) -> ReportVerdict {
    if reports.iter().any(|r| r.verdict == ReportVerdict::Fail) {
        ReportVerdict::Fail
    } else if reports.iter().all(|r| r.verdict == ReportVerdict::Measured) {
        ReportVerdict::Measured
    } else {
        ReportVerdict::Pass
    }
}

pub fn to_json(config: &RunConfig, reports: &[VerificationReport]) -> Result<String> {
    let r = RunReport {
        tool: "hartogs",
        version: env!("CARGO_PKG_VERSION"),
        config,
        verdict: overall(reports),
        reports,
    };
    let mut s = serde_json::to_string_pretty(&r).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits, locale independent.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "Pass",
        Status::Fail => "Fail",
        Status::Measured => "Measured",
        Status::Diverged => "Diverged",
        Status::Inconclusive => "Inconclusive",
    }
}

pub const CSV_HEADER: [&str; 6] = [
    "scenario",
    "parameters",
    "quantity",
    "value",
    "error_estimate",
    "verdict",
];

pub fn csv_row(scenario: &str, params: &str, m: &Measurement) -> [String; 6] {
    [
        scenario.to_string(),
        params.to_string(),
        m.quantity.clone(),
        fmt_num(m.computed),
        m.error_estimate.map(fmt_num).unwrap_or_default(),
        status_name(m.status).to_string(),
    ]
}

pub fn write_csv<W: Write>(out: W, rows: impl IntoIterator<Item = [String; 6]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_rows(reports: &[VerificationReport]) -> Vec<[String; 6]> {
    reports
        .iter()
        .flat_map(|r| {
            let params = r.parameters.compact();
            r.measurements
                .iter()
                .map(move |m| csv_row(&r.scenario, &params, m))
                .collect::<Vec<_>>()
        })
        .collect()
}
