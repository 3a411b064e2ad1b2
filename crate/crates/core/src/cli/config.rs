//! Run configuration: TOML files with one table per scenario, overridden by
//! command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verify::{lookup, scenario_ids, Params};

/// What to run. Output locations are deliberately not part of this record,
/// so that a report re-run from its embedded config is byte-identical.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenarios: Vec<String>,
    /// Parameters shared by all scenarios.
    #[serde(default)]
    pub defaults: Params,
    /// Per-scenario parameters.
    #[serde(default)]
    pub overrides: BTreeMap<String, Params>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    /// Expands `all` and rejects unknown ids and sections.
    pub fn validate(&mut self) -> Result<()> {
        if self.scenarios.iter().any(|s| s == "all") {
            self.scenarios = scenario_ids().into_iter().map(String::from).collect();
        }
        if self.scenarios.is_empty() {
            return Err(Error::config("scenarios", "no scenario selected"));
        }
        for id in &self.scenarios {
            lookup(id)?;
        }
        for id in self.overrides.keys() {
            lookup(id).map_err(|_| Error::config(id, "section does not name a known scenario"))?;
        }
        if let Some(t) = self.defaults.tol {
            if !(t > 0.0) {
                return Err(Error::config("tol", "must be positive"));
            }
        }
        Ok(())
    }

    /// `(id, params)` jobs: defaults, then the scenario section, then flags.
    pub fn jobs(&self, flags: &Params) -> Vec<(String, Params)> {
        self.scenarios
            .iter()
            .map(|id| {
                let base = match self.overrides.get(id) {
                    Some(o) => self.defaults.merged(o),
                    None => self.defaults.clone(),
                };
                (id.clone(), base.merged(flags))
            })
            .collect()
    }

    /// Folds command-line flags into the config so reports embed what ran.
    pub fn with_flags(&self, flags: &Params) -> RunConfig {
        let mut c = self.clone();
        c.defaults = c.defaults.merged(flags);
        for o in c.overrides.values_mut() {
            *o = o.merged(flags);
        }
        c
    }
}

fn table_params(name: &str, v: toml::Value) -> Result<Params> {
    v.try_into()
        .map_err(|e: toml::de::Error| Error::config(name, e.message().to_string()))
}

/// Parses a TOML run file:
///
/// ```toml
/// scenarios = ["tmu", "counterexample"]   # or "all"
/// [defaults]
/// seed = 2014
/// [counterexample]
/// p = 1.25
/// [output]
/// json = "report.json"
/// ```
pub fn parse_config(text: &str) -> Result<(RunConfig, OutputPaths)> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
    let mut cfg = RunConfig::default();
    let mut out = OutputPaths::default();
    for (key, value) in table {
        match key.as_str() {
            "scenarios" => {
                cfg.scenarios = match value {
                    toml::Value::String(s) => vec![s],
                    toml::Value::Array(a) => a
                        .into_iter()
                        .map(|v| match v {
                            toml::Value::String(s) => Ok(s),
                            other => Err(Error::config(
                                "scenarios",
                                format!("expected strings, found {other}"),
                            )),
                        })
                        .collect::<Result<_>>()?,
                    other => {
                        return Err(Error::config(
                            "scenarios",
                            format!("expected a list, found {other}"),
                        ))
                    }
                }
            }
            "defaults" => cfg.defaults = table_params("defaults", value)?,
            "output" => {
                let t = match value {
                    toml::Value::Table(t) => t,
                    _ => return Err(Error::config("output", "expected a table")),
                };
                for (k, v) in t {
                    let path = v.as_str().map(PathBuf::from).ok_or_else(|| {
                        Error::config(format!("output.{k}"), "expected a path string")
                    })?;
                    match k.as_str() {
                        "json" => out.json = Some(path),
                        "csv" => out.csv = Some(path),
                        _ => {
                            return Err(Error::config(
                                format!("output.{k}"),
                                "unknown output (json, csv)",
                            ))
                        }
                    }
                }
            }
            id => {
                lookup(id).map_err(|_| {
                    Error::config(
                        id,
                        "unknown section; expected a scenario id, defaults or output",
                    )
                })?;
                let p = table_params(id, value)?;
                cfg.overrides.insert(id.to_string(), p);
            }
        }
    }
    cfg.validate()?;
    Ok((cfg, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_outputs() {
        let (c, o) = parse_config(
            "scenarios = [\"tmu\", \"counterexample\"]\n[defaults]\nseed = 3\n[counterexample]\np = 1.25\n[output]\njson = \"r.json\"\n",
        )
        .unwrap();
        assert_eq!(c.scenarios, vec!["tmu", "counterexample"]);
        assert_eq!(c.defaults.seed, Some(3));
        assert_eq!(c.overrides["counterexample"].p, Some(1.25));
        assert_eq!(o.json, Some(PathBuf::from("r.json")));
        let flags = Params {
            p: Some(1.2),
            ..Params::default()
        };
        let jobs = c.jobs(&flags);
        assert_eq!(jobs[1].1.p, Some(1.2));
        assert_eq!(jobs[1].1.seed, Some(3));
    }

    #[test]
    fn rejects_unknown_things() {
        for bad in [
            "scenarios = [\"nope\"]",
            "scenarios = \"all\"\n[nope]\np = 2",
            "scenarios = \"all\"\n[tmu]\nmystery = 2",
            "scenarios = \"all\"\n[output]\npdf = \"x\"",
            "scenarios = []",
            "scenarios = \"all\"\n[defaults]\ntol = -1.0",
        ] {
            let e = parse_config(bad).unwrap_err();
            assert!(matches!(e, Error::Config { .. }), "{bad}: {e}");
        }
    }

    #[test]
    fn all_expands() {
        let (c, _) = parse_config("scenarios = \"all\"").unwrap();
        assert_eq!(c.scenarios.len(), scenario_ids().len());
    }
}
