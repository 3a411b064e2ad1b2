//! Scenario harness: each scenario turns one claim about the Bergman
//! projection on the Hartogs triangle into exact checks, quadrature
//! measurements and a verdict.

mod families;
mod partial;
mod scenarios;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Cutoff};
use crate::geometry::RadialProfile;

pub use families::{random_bounded_terms, random_polynomial};
pub use partial::{disc_lp_norm, log_series};

/// Seed used when none is configured.
pub const DEFAULT_SEED: u64 = 2014;

/// Scenario parameters. Unset fields take per-scenario defaults; reports
/// carry the resolved values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_m_min: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_m_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_n_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
}

impl Params {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(&self, over: &Params) -> Params {
        macro_rules! pick {
            ($($f:ident),*) => {
                Params { $($f: over.$f.clone().or_else(|| self.$f.clone())),* }
            };
        }
        pick!(
            p,
            q,
            alpha,
            tol,
            seed,
            trials,
            degree,
            mu_max,
            n_max,
            box_m_min,
            box_m_max,
            box_n_max,
            chi,
            lambda,
            weight_exponent,
            q_values,
            backend
        )
    }

    /// `key=value` pairs in field order, for CSV rows.
    pub fn compact(&self) -> String {
        let v = serde_json::to_value(self).expect("params serialize");
        let obj = v.as_object().expect("params object");
        let mut parts = Vec::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(a) => a
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                other => other.to_string(),
            };
            parts.push(format!("{k}={s}"));
        }
        parts.join(";")
    }

    pub(crate) fn tol(&self) -> f64 {
        self.tol.unwrap_or(crate::quadrature::DEFAULT_TOL)
    }

    pub(crate) fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Checks `1/p + 1/q = 1` when both are present and returns `q`.
    pub(crate) fn conjugate_q(&self, p: f64) -> Result<f64> {
        let q = p / (p - 1.0);
        if let Some(given) = self.q {
            if (1.0 / p + 1.0 / given - 1.0).abs() > 1e-12 {
                return Err(Error::config(
                    "q",
                    format!("q = {given} is not conjugate to p = {p}; expected {q}"),
                ));
            }
        }
        Ok(q)
    }
}

/// Parses `one`, `step`, `step:a`, `smooth` or `smooth:a:b`.
pub fn parse_cutoff(s: &str) -> Result<Cutoff> {
    let parts: Vec<&str> = s.split(':').collect();
    let rat = |t: &str| parse_rational(t).map_err(|e| Error::config("chi", e.to_string()));
    let c = match parts.as_slice() {
        ["one"] => Cutoff::one(),
        ["step"] => Cutoff::default_step(),
        ["step", a] => Cutoff::step(rat(a)?),
        ["smooth"] => Cutoff::default_smooth(),
        ["smooth", a, b] => Cutoff::smoothstep(rat(a)?, rat(b)?),
        _ => {
            return Err(Error::config(
                "chi",
                format!("unknown cutoff '{s}' (one, step[:a], smooth[:a:b])"),
            ))
        }
    };
    Ok(c)
}

/// Parses `one` or `power:beta` (`lambda(r) = r^beta`).
pub fn parse_profile(s: &str) -> Result<RadialProfile> {
    match s.split_once(':') {
        None if s == "one" => Ok(RadialProfile::new("one", |_| 1.0)),
        Some(("power", b)) => {
            let beta: f64 = b
                .parse()
                .map_err(|_| Error::config("lambda", format!("bad exponent '{b}'")))?;
            Ok(RadialProfile::power(beta))
        }
        _ => Err(Error::config(
            "lambda",
            format!("unknown profile '{s}' (one, power:beta)"),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Measured,
    Diverged,
    Inconclusive,
}

/// One computed quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_exact: Option<String>,
    pub computed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub status: Status,
}

impl Measurement {
    pub fn measured(quantity: impl Into<String>, computed: f64) -> Self {
        Measurement {
            quantity: quantity.into(),
            claimed: None,
            claimed_exact: None,
            computed,
            computed_exact: None,
            error_estimate: None,
            tolerance: None,
            status: Status::Measured,
        }
    }

    /// Pass iff `|computed - claimed| <= tol`.
    pub fn compare(quantity: impl Into<String>, claimed: f64, computed: f64, tol: f64) -> Self {
        let ok = (computed - claimed).abs() <= tol;
        Measurement {
            claimed: Some(claimed),
            tolerance: Some(tol),
            status: if ok { Status::Pass } else { Status::Fail },
            ..Measurement::measured(quantity, computed)
        }
    }

    /// A yes/no property.
    pub fn check(quantity: impl Into<String>, ok: bool, computed: f64) -> Self {
        Measurement {
            status: if ok { Status::Pass } else { Status::Fail },
            ..Measurement::measured(quantity, computed)
        }
    }

    pub fn with_status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn with_error(mut self, e: f64) -> Self {
        self.error_estimate = Some(e);
        self
    }

    pub fn with_exact(mut self, claimed: Option<String>, computed: Option<String>) -> Self {
        self.claimed_exact = claimed;
        self.computed_exact = computed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportVerdict {
    Pass,
    Fail,
    Measured,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub claim: String,
    pub parameters: Params,
    pub tolerance: f64,
    pub verdict: ReportVerdict,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
    pub runtime_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Measurement> {
        self.measurements
            .iter()
            .filter(|m| m.status == Status::Fail)
    }

    pub fn measurement(&self, quantity: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.quantity == quantity)
    }
}

/// Accumulates measurements while a scenario runs.
pub(crate) struct ReportBuilder {
    measurements: Vec<Measurement>,
    notes: Vec<String>,
    measured_only: bool,
}

impl ReportBuilder {
    pub(crate) fn new(measured_only: bool) -> Self {
        ReportBuilder {
            measurements: Vec::new(),
            notes: Vec::new(),
            measured_only,
        }
    }

    pub(crate) fn push(&mut self, m: Measurement) {
        self.measurements.push(m);
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, info: &ScenarioInfo, params: Params, tol: f64) -> VerificationReport {
        let failed = self.measurements.iter().any(|m| m.status == Status::Fail);
        let verdict = if failed {
            ReportVerdict::Fail
        } else if self.measured_only {
            ReportVerdict::Measured
        } else {
            ReportVerdict::Pass
        };
        VerificationReport {
            scenario: info.id.to_string(),
            claim: info.claim.to_string(),
            parameters: params,
            tolerance: tol,
            verdict,
            measurements: self.measurements,
            notes: self.notes,
            runtime_seconds: None,
        }
    }
}

pub struct ScenarioInfo {
    pub id: &'static str,
    pub claim: &'static str,
    /// Boundedness claims can only be sampled; their reports are Measured.
    pub measured: bool,
    run: fn(&Params, &mut ReportBuilder) -> Result<Params>,
}

pub fn registry() -> &'static [ScenarioInfo] {
    scenarios::REGISTRY
}

pub fn scenario_ids() -> Vec<&'static str> {
    registry().iter().map(|s| s.id).collect()
}

pub fn lookup(id: &str) -> Result<&'static ScenarioInfo> {
    registry().iter().find(|s| s.id == id).ok_or_else(|| {
        Error::config(
            "scenario",
            format!(
                "unknown scenario '{id}'; known: {}",
                scenario_ids().join(", ")
            ),
        )
    })
}

/// Runs one scenario. Timing is recorded only when `timed` is set, so that
/// reports are reproducible byte for byte by default.
pub fn run_scenario(id: &str, params: &Params, timed: bool) -> Result<VerificationReport> {
    let info = lookup(id)?;
    let start = Instant::now();
    let mut b = ReportBuilder::new(info.measured);
    let resolved = (info.run)(params, &mut b)?;
    let tol = resolved.tol();
    let mut report = b.finish(info, resolved, tol);
    if timed {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// Runs scenarios in parallel; results come back in input order.
pub fn run_many(jobs: &[(String, Params)], timed: bool) -> Vec<Result<VerificationReport>> {
    jobs.par_iter()
        .map(|(id, p)| run_scenario(id, p, timed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_unique() {
        let ids = scenario_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn params_merge_and_compact() {
        let a = Params {
            p: Some(2.0),
            seed: Some(1),
            ..Params::default()
        };
        let b = Params {
            p: Some(3.0),
            ..Params::default()
        };
        let m = a.merged(&b);
        assert_eq!(m.p, Some(3.0));
        assert_eq!(m.seed, Some(1));
        assert_eq!(m.compact(), "p=3.0;seed=1");
    }

    #[test]
    fn conjugate_exponent_checked() {
        let p = Params {
            q: Some(3.0),
            ..Params::default()
        };
        assert!(p.conjugate_q(4.0 / 3.0).is_err());
        let p = Params {
            q: Some(4.0),
            ..Params::default()
        };
        assert!((p.conjugate_q(4.0 / 3.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cutoff_and_profile_parsing() {
        assert!(parse_cutoff("step").unwrap().vanishes_near_zero());
        assert!(parse_cutoff("one").unwrap().is_one());
        assert!(parse_cutoff("smooth:1/8:1/4").is_ok());
        assert!(parse_cutoff("ramp").is_err());
        assert_eq!(parse_profile("power:4").unwrap().eval(0.5), 0.0625);
        assert!(parse_profile("power:x").is_err());
    }
}
