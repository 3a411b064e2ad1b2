//! Command-line front end.

mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, OutputPaths, RunConfig};
pub use output::{csv_row, fmt_num, overall, report_rows, to_json, write_csv, CSV_HEADER};

use crate::bergman::{project, ProjectInput, ProjectionSpec};
use crate::error::{Error, Result};
use crate::exact::{exact_real, int, Cutoff};
use crate::geometry::{Domain, Weight};
use crate::quadrature::{lp_norm, MonomialTerm, QuadratureSpec, TermSum, Verdict};
use crate::series::ExactSeries;
use crate::verify::{registry, run_many, Params, ReportVerdict, VerificationReport};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "HARTOGS_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "hartogs",
    version,
    about = "Bergman projection and weighted Lp norms on the Hartogs triangle"
)]
struct Cli {
    /// List scenarios with their claims and exit.
    #[arg(long)]
    list: bool,
    /// Worker threads (default: HARTOGS_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List scenarios with their claims.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run one scenario, or `all`.
    Verify {
        id: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Run the scenarios of a config file or of an earlier report.
    Run {
        #[arg(long, conflicts_with = "from_report")]
        config: Option<PathBuf>,
        #[arg(long)]
        from_report: Option<PathBuf>,
        #[command(flatten)]
        flags: ParamFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Weighted Lp norm of a named function.
    Norm {
        #[command(flatten)]
        f: FunctionFlags,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Bergman projection of a named function, printed as a series.
    Project {
        #[arg(long = "f")]
        f: String,
        #[arg(long, default_value = "hartogs")]
        domain: String,
        #[arg(long, default_value = "exact")]
        backend: String,
        #[arg(long, default_value_t = -17, allow_hyphen_values = true)]
        box_m_min: i64,
        #[arg(long, default_value_t = 16)]
        box_m_max: i64,
        #[arg(long, default_value_t = 16)]
        box_n_max: i64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep p or q, one CSV row per value.
    Scan {
        #[command(flatten)]
        f: FunctionFlags,
        /// Name of the swept exponent, `p` or `q`.
        #[arg(long, default_value = "p")]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct ParamFlags {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    degree: Option<i64>,
    #[arg(long)]
    mu_max: Option<i64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    box_m_min: Option<i64>,
    #[arg(long)]
    box_m_max: Option<i64>,
    #[arg(long)]
    box_n_max: Option<i64>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    weight_exponent: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    q_values: Option<Vec<f64>>,
}

impl ParamFlags {
    fn to_params(&self) -> Params {
        Params {
            p: self.p,
            q: self.q,
            alpha: self.alpha,
            tol: self.tol,
            seed: self.seed,
            trials: self.trials,
            degree: self.degree,
            mu_max: self.mu_max,
            n_max: self.n_max,
            box_m_min: self.box_m_min,
            box_m_max: self.box_m_max,
            box_n_max: self.box_n_max,
            chi: self.chi.clone(),
            lambda: self.lambda.clone(),
            weight_exponent: self.weight_exponent,
            q_values: self.q_values.clone(),
            backend: None,
        }
    }
}

#[derive(Args, Debug, Default)]
struct OutFlags {
    /// JSON report path (default: stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// CSV table path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record per-scenario runtimes in the report.
    #[arg(long)]
    with_timing: bool,
}

#[derive(Args, Debug)]
struct FunctionFlags {
    /// inv-z1, one, z1z2, counterexample, counterexample-smooth or series:PATH.
    #[arg(long = "f")]
    f: String,
    /// none, delta1:GAMMA or p-2.
    #[arg(long, default_value = "none")]
    weight: String,
    #[arg(long, default_value = "hartogs")]
    domain: String,
    #[arg(long)]
    tol: Option<f64>,
}

/// Named test functions.
pub fn named_function(name: &str) -> Result<TermSum> {
    let one = || exact_real(int(1));
    let ce = |chi: Cutoff| {
        TermSum::single(MonomialTerm::new(int(1), int(0), -1, 0, one()).with_profile(chi))
    };
    Ok(match name {
        "inv-z1" => TermSum::single(MonomialTerm::monomial(-1, 0, one())),
        "one" => TermSum::single(MonomialTerm::monomial(0, 0, one())),
        "z1z2" => TermSum::single(MonomialTerm::monomial(1, 1, one())),
        "counterexample" => ce(Cutoff::default_step()),
        "counterexample-smooth" => ce(Cutoff::default_smooth()),
        other => match other.strip_prefix("series:") {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                TermSum::from_series(&ExactSeries::from_text(&text)?)?
            }
            None => {
                return Err(Error::config(
                    "f",
                    format!("unknown function '{other}' (inv-z1, one, z1z2, counterexample, counterexample-smooth, series:PATH)"),
                ))
            }
        },
    })
}

/// `none`, `delta1:GAMMA` or `p-2`.
pub fn parse_weight(s: &str, p: f64) -> Result<Weight> {
    match s {
        "none" | "1" => Ok(Weight::unit()),
        "p-2" => Ok(Weight::PowerDelta1(p - 2.0)),
        _ => match s.strip_prefix("delta1:") {
            Some(g) => g
                .parse()
                .map(Weight::PowerDelta1)
                .map_err(|_| Error::config("weight", format!("bad exponent '{g}'"))),
            None => Err(Error::config(
                "weight",
                format!("unknown weight '{s}' (none, delta1:GAMMA, p-2)"),
            )),
        },
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn init_workers(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::config(WORKERS_ENV, format!("not a count: '{v}'")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_rows(path: Option<&Path>, rows: Vec<[String; 6]>) -> Result<()> {
    match path {
        Some(p) => write_csv(fs::File::create(p)?, rows),
        None => write_csv(std::io::stdout().lock(), rows),
    }
}

/// Runs a configuration and writes its reports; returns the overall verdict.
pub fn execute(
    config: &RunConfig,
    flags: &Params,
    out: &OutputPaths,
    timed: bool,
) -> Result<ReportVerdict> {
    let mut config = config.with_flags(flags);
    config.validate()?;
    let jobs = config.jobs(&Params::default());
    let start = Instant::now();
    let reports: Vec<VerificationReport> =
        run_many(&jobs, timed).into_iter().collect::<Result<_>>()?;
    for r in &reports {
        let failed: Vec<&str> = r.failures().map(|m| m.quantity.as_str()).collect();
        eprintln!(
            "{:<8} {:<20} {}",
            format!("{:?}", r.verdict),
            r.scenario,
            failed.join("; ")
        );
    }
    eprintln!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    write_or_print(out.json.as_deref(), &to_json(&config, &reports)?)?;
    if let Some(csv) = &out.csv {
        write_rows(Some(csv), report_rows(&reports))?;
    }
    Ok(overall(&reports))
}

/// Reads the config embedded in a JSON report.
pub fn config_from_report(text: &str) -> Result<RunConfig> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::config("from-report", e.to_string()))?;
    let c = v
        .get("config")
        .cloned()
        .ok_or_else(|| Error::config("from-report", "report has no config"))?;
    serde_json::from_value(c).map_err(|e| Error::config("from-report", e.to_string()))
}

fn norm_rows(
    f_name: &str,
    weight: &str,
    domain: Domain,
    label: &str,
    p: f64,
    tol: f64,
) -> Result<Vec<[String; 6]>> {
    let f = named_function(f_name)?;
    let w = parse_weight(weight, p)?;
    let r = lp_norm(&f, p, domain, &w, &QuadratureSpec::default(), tol)?;
    let params = format!(
        "f={f_name};{label}={p};weight={};domain={}",
        w.describe(),
        domain.name()
    );
    let verdict = match r.verdict {
        Verdict::Converged => "Converged",
        Verdict::Diverged { .. } => "Diverged",
        Verdict::Inconclusive => "Inconclusive",
    };
    let row = |q: &str, v: f64, e: String| {
        [
            "norm".to_string(),
            params.clone(),
            q.to_string(),
            fmt_num(v),
            e,
            verdict.to_string(),
        ]
    };
    let mut rows = vec![row("lp_norm", r.value.re, fmt_num(r.error_estimate))];
    if let Verdict::Diverged {
        log_slope,
        growth_exponent,
    } = r.verdict
    {
        rows.push(row("log_slope", log_slope, String::new()));
        rows.push(row("growth_exponent", growth_exponent, String::new()));
    }
    Ok(rows)
}

fn dispatch(cli: Cli) -> Result<i32> {
    init_workers(cli.workers)?;
    if cli.list {
        print_list(false);
        return Ok(0);
    }
    let Some(cmd) = cli.command else {
        return Err(Error::config("command", "no subcommand given; try --help"));
    };
    match cmd {
        Command::List { json } => {
            print_list(json);
            Ok(0)
        }
        Command::Verify {
            id,
            config,
            flags,
            out,
        } => {
            let (mut cfg, mut paths) = match config {
                Some(path) => parse_config(&fs::read_to_string(path)?)?,
                None => (RunConfig::default(), OutputPaths::default()),
            };
            cfg.scenarios = vec![id];
            merge_paths(&mut paths, &out);
            finish(execute(&cfg, &flags.to_params(), &paths, out.with_timing)?)
        }
        Command::Run {
            config,
            from_report,
            flags,
            out,
        } => {
            let (cfg, mut paths) = match (config, from_report) {
                (Some(path), None) => parse_config(&fs::read_to_string(path)?)?,
                (None, Some(path)) => (
                    config_from_report(&fs::read_to_string(path)?)?,
                    OutputPaths::default(),
                ),
                _ => {
                    return Err(Error::config(
                        "config",
                        "give --config FILE or --from-report FILE",
                    ))
                }
            };
            merge_paths(&mut paths, &out);
            finish(execute(&cfg, &flags.to_params(), &paths, out.with_timing)?)
        }
        Command::Norm { f, p, csv } => {
            let domain: Domain = f.domain.parse()?;
            let rows = norm_rows(
                &f.f,
                &f.weight,
                domain,
                "p",
                p,
                f.tol.unwrap_or(crate::quadrature::DEFAULT_TOL),
            )?;
            write_rows(csv.as_deref(), rows)?;
            Ok(0)
        }
        Command::Project {
            f,
            domain,
            backend,
            box_m_min,
            box_m_max,
            box_n_max,
            tol,
            out,
        } => {
            let d: Domain = domain.parse()?;
            let func = named_function(&f)?;
            let mut spec = match backend.as_str() {
                "exact" => ProjectionSpec::default(),
                "numeric" => ProjectionSpec::numeric(),
                other => {
                    return Err(Error::config(
                        "backend",
                        format!("unknown backend '{other}' (exact, numeric)"),
                    ))
                }
            }
            .with_box(box_m_min, box_m_max, box_n_max);
            if let (Some(t), crate::bergman::ProjectionBackend::Numeric { tol, .. }) =
                (tol, &mut spec.backend)
            {
                *tol = t;
            }
            let proj = project(ProjectInput::Symbolic(&func), d, &spec)?;
            let text = match &proj.exact {
                Some(e) => e.to_text(),
                None => proj.series.to_text(),
            };
            eprintln!(
                "certified complete: {}; error estimate: {}",
                proj.certified_complete,
                fmt_num(proj.error_estimate)
            );
            write_or_print(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Scan {
            f,
            param,
            values,
            csv,
        } => {
            let domain: Domain = f.domain.parse()?;
            let tol = f.tol.unwrap_or(crate::quadrature::DEFAULT_TOL);
            let mut rows = Vec::new();
            if param != "p" && param != "q" {
                return Err(Error::config(
                    "param",
                    format!("unknown parameter '{param}' (p, q)"),
                ));
            }
            for v in values {
                if param == "q" && !(v > 1.0) {
                    return Err(Error::config("values", "q must exceed 1"));
                }
                rows.extend(norm_rows(&f.f, &f.weight, domain, &param, v, tol)?);
            }
            write_rows(csv.as_deref(), rows)?;
            Ok(0)
        }
    }
}

fn merge_paths(paths: &mut OutputPaths, out: &OutFlags) {
    if out.json.is_some() {
        paths.json = out.json.clone();
    }
    if out.csv.is_some() {
        paths.csv = out.csv.clone();
    }
}

fn finish(v: ReportVerdict) -> Result<i32> {
    Ok(if v == ReportVerdict::Fail { 1 } else { 0 })
}

fn print_list(json: bool) {
    if json {
        let v: Vec<serde_json::Value> = registry()
            .iter()
            .map(|s| serde_json::json!({ "id": s.id, "claim": s.claim, "measured": s.measured }))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("list serializes")
        );
    } else {
        for s in registry() {
            println!("{:<20} {}", s.id, s.claim);
        }
    }
}

/// Parses arguments, runs, and returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_functions_and_weights() {
        assert_eq!(named_function("inv-z1").unwrap().len(), 1);
        assert!(matches!(named_function("nope"), Err(Error::Config { .. })));
        assert!(matches!(parse_weight("p-2", 3.0).unwrap(), Weight::PowerDelta1(g) if g == 1.0));
        assert!(parse_weight("delta1:x", 3.0).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_cli(["hartogs", "verify", "nope"]), 2);
        assert_eq!(run_cli(["hartogs", "--bogus"]), 2);
        assert_eq!(run_cli(["hartogs", "list"]), 0);
    }

    #[test]
    fn config_round_trips_through_report() {
        let cfg = RunConfig {
            scenarios: vec!["tmu".into()],
            defaults: Params {
                mu_max: Some(4),
                ..Params::default()
            },
            ..RunConfig::default()
        };
        let json = to_json(&cfg, &[]).unwrap();
        assert_eq!(config_from_report(&json).unwrap(), cfg);
    }
}
