//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed and
//! the wall-clock budgets are not shared with other tests.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use hartogs::bergman::{project, tmu_ratio, ProjectInput, ProjectionSpec};
use hartogs::cli::named_function;
use hartogs::exact::{exact_real, int, rat, to_f64, Rational};
use hartogs::quadrature::{
    inner_product_exact, integrate_numeric, MonomialTerm, QuadratureSpec, TermSum, Verdict,
};
use hartogs::verify::{run_scenario, Params, ReportVerdict, Status, VerificationReport};
use hartogs::{BiIndex, Domain, Point2C, Weight};
use num_complex::Complex64;
use num_traits::Zero;

const H: Domain = Domain::HartogsTriangle;

struct Outcome {
    lines: Vec<String>,
    hard_failures: Vec<String>,
}

impl Outcome {
    fn line(&mut self, n: u32, what: &str, ok: bool, detail: String) {
        let s = format!(
            "criterion {n:>2} {}: {what} ({detail})",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{s}");
        self.lines.push(s);
        if !ok {
            self.hard_failures.push(format!("criterion {n}: {what}"));
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn scenario(id: &str, params: Params) -> (VerificationReport, f64) {
    let t = Instant::now();
    let r = run_scenario(id, &params, false).unwrap();
    (r, t.elapsed().as_secs_f64())
}

fn failures(r: &VerificationReport) -> String {
    let f: Vec<&str> = r.failures().map(|m| m.quantity.as_str()).collect();
    if f.is_empty() {
        "none failed".into()
    } else {
        f.join("; ")
    }
}

fn c1_tmu(o: &mut Outcome) {
    let t = Instant::now();
    let mut bad = 0;
    for mu in 0..=64i64 {
        for m in 0..=64i64 {
            let got = tmu_ratio(mu, m).unwrap();
            // int_0^1 r^(2m+3) dr / int_0^1 r^(2m+1) dr
            let want = if mu == m {
                rat(2 * m + 2, 2 * m + 4)
            } else {
                Rational::zero()
            };
            if got.re != want || !got.im.is_zero() {
                bad += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    o.line(
        1,
        "t_mu exact identity, 0 <= mu, m <= 64",
        bad == 0 && secs < 1.0,
        format!("{bad} mismatches, {secs:.3} s"),
    );
}

fn c2_right_inverse(o: &mut Outcome) {
    let (r, secs) = scenario(
        "right-inverse",
        Params {
            trials: Some(50),
            degree: Some(20),
            ..Params::default()
        },
    );
    let ok = r.verdict == ReportVerdict::Pass && secs < 5.0;
    o.line(
        2,
        "B U f = f for 50 random polynomials of degree 20",
        ok,
        format!("{}, {secs:.2} s", failures(&r)),
    );
}

fn c3_counterexample(o: &mut Outcome) {
    let f = named_function("counterexample").unwrap();
    let spec = ProjectionSpec::default().with_box(-16, 16, 16);
    let proj = project(ProjectInput::Symbolic(&f), H, &spec).unwrap();
    let exact = proj.exact.as_ref().unwrap();
    // 2 int_{1/2}^1 r^3 dr = (1 - 1/16) / 2
    let oracle = (int(1) - rat(1, 16)) / int(2);
    let c = exact.get(BiIndex::new(-1, 0));
    let stray = exact
        .iter()
        .filter(|(i, v)| **i != BiIndex::new(-1, 0) && !v.is_zero())
        .count();

    let g = move |z: &Point2C| {
        let r = z.z1.radius;
        let chi = if r >= 0.5 { 1.0 } else { 0.0 };
        Complex64::from_polar(chi * r, -z.z1.angle)
    };
    let num = project(
        ProjectInput::Function(&g),
        H,
        &ProjectionSpec::numeric().with_box(-16, 16, 16),
    )
    .unwrap();
    let cn = num.series.get(BiIndex::new(-1, 0));
    let other = num
        .series
        .iter()
        .filter(|(i, _)| **i != BiIndex::new(-1, 0))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let oracle_f = to_f64(&oracle);
    let ok = c == exact_real(oracle.clone())
        && oracle == rat(15, 32)
        && stray == 0
        && proj.certified_complete
        && (cn.re - oracle_f).abs() <= 1e-8
        && cn.im.abs() <= 1e-8
        && other <= 1e-8;
    o.line(
        3,
        "projection of chi(|z1|) conj(z1) is (15/32)/z1",
        ok,
        format!(
            "C = {}, {stray} other nonzero, numeric |dC| = {:.2e}, numeric stray {other:.2e}",
            hartogs::exact::format_rational(&c.re),
            (cn.re - oracle_f).abs()
        ),
    );
}

fn c4_divergence(o: &mut Outcome) {
    let t = Instant::now();
    let qs = QuadratureSpec::default();
    let f4 = |z: &Point2C| Complex64::new(z.z1.radius.powi(-4), 0.0);
    let r4 = integrate_numeric(&f4, H, &Weight::unit(), &qs, 1e-8).unwrap();
    let two_pi2 = 2.0 * PI * PI;
    let (slope_ok, slope) = match r4.verdict {
        Verdict::Diverged { log_slope, .. } => (rel(log_slope, two_pi2) <= 0.02, log_slope),
        _ => (false, f64::NAN),
    };
    // truncated integral is 2 pi^2 ln(1/eps) exactly
    let table_err = r4
        .truncated
        .iter()
        .map(|t| rel(t.value, two_pi2 * (1.0 / t.epsilon).ln()))
        .fold(0.0, f64::max);
    let f35 = |z: &Point2C| Complex64::new(z.z1.radius.powf(-3.5), 0.0);
    let r35 = integrate_numeric(&f35, H, &Weight::unit(), &qs, 1e-8).unwrap();
    let e35 = rel(r35.real(), 4.0 * PI * PI);
    let secs = t.elapsed().as_secs_f64();
    let ok = slope_ok
        && r4.truncated.len() >= 6
        && table_err < 1e-6
        && r35.is_converged()
        && e35 <= 1e-6
        && secs < 10.0;
    o.line(
        4,
        "|1/z1|^4 diverges logarithmically with slope 2 pi^2; q = 3.5 gives 4 pi^2",
        ok,
        format!("slope {slope:.6}, truncated table rel err {table_err:.1e}, q=3.5 rel err {e35:.1e}, {secs:.2} s"),
    );
}

fn c5_weighted_norm(o: &mut Outcome) {
    let mut exact_ok = true;
    let mut flagged = true;
    let mut stated_reproduced = true;
    let mut detail = Vec::new();
    for p in [2.0, 3.0, 4.0] {
        let (r, _) = scenario(
            "weighted-norm",
            Params {
                p: Some(p),
                ..Params::default()
            },
        );
        let exact = r.measurement("integral vs exact recomputation").unwrap();
        let stated = r.measurement("integral vs stated value 2 pi^2").unwrap();
        exact_ok &= exact.status == Status::Pass && rel(exact.computed, PI * PI) <= 1e-8;
        stated_reproduced &= stated.status == Status::Pass;
        flagged &= r.notes.iter().any(|n| n.starts_with("DISCREPANCY"));
        detail.push(format!("p={p}: {:.10}", exact.computed));
    }
    o.line(
        5,
        "exact recomputation pi^2 reproduced by the numeric backend",
        exact_ok,
        detail.join(", "),
    );
    o.line(
        5,
        "discrepancy flagged in the report",
        flagged,
        "note present".into(),
    );
    // the stated 2 pi^2 cannot be reproduced; report it without failing the suite
    let s = format!(
        "criterion  5 {}: stated value 2 pi^2 reproduced by the numeric backend (computed pi^2, ratio 2)",
        if stated_reproduced { "PASS" } else { "FAIL" }
    );
    println!("{s}");
    o.lines.push(s);
    if stated_reproduced {
        o.hard_failures
            .push("criterion 5: stated value unexpectedly matched".into());
    }
}

fn c6_bell(o: &mut Outcome) {
    let t = Instant::now();
    let mut all = true;
    let mut detail = Vec::new();
    for (p, alpha, label) in [
        (2.0, 0.0, "(2,0)"),
        (3.0, 1.0, "(3,1)"),
        (3.0, 1.0, "(3,p-2)"),
    ] {
        let (r, _) = scenario(
            "bell-isometry",
            Params {
                p: Some(p),
                alpha: Some(alpha),
                trials: Some(10),
                ..Params::default()
            },
        );
        all &= r.verdict == ReportVerdict::Pass;
        detail.push(format!("{label}: {}", failures(&r)));
    }
    let secs = t.elapsed().as_secs_f64();
    o.line(
        6,
        "Bell transform is an isometry for 10 functions",
        all && secs < 30.0,
        format!("{}, {secs:.2} s", detail.join(", ")),
    );
}

fn c7_orthogonality(o: &mut Outcome) {
    let idx: Vec<BiIndex> = ProjectionSpec::default().with_box(-8, 8, 8).indices(H);
    let terms: Vec<TermSum> = idx
        .iter()
        .map(|i| TermSum::single(MonomialTerm::monomial(i.m, i.n, exact_real(int(1)))))
        .collect();
    let mut bad = 0;
    for (a, ta) in idx.iter().zip(&terms) {
        for (b, tb) in idx.iter().zip(&terms) {
            let ip = inner_product_exact(ta, tb, H).unwrap();
            let ok = if a == b {
                let want = rat(1, (a.n + 1) * (a.m + a.n + 2));
                ip.pi_power == 2 && ip.coeff == exact_real(want)
            } else {
                ip.coeff.is_zero()
            };
            if !ok {
                bad += 1;
            }
        }
    }
    o.line(
        7,
        "monomials orthogonal with norms pi^2/((n+1)(m+n+2))",
        bad == 0 && !idx.is_empty(),
        format!("{} indices, {bad} bad pairs", idx.len()),
    );
}

fn c8_contraction(o: &mut Outcome) {
    let (r, _) = scenario(
        "contraction",
        Params {
            trials: Some(100),
            ..Params::default()
        },
    );
    let slack = r
        .measurements
        .iter()
        .find(|m| m.quantity.starts_with("||f||_2 - ||Bf||_2"))
        .map(|m| m.computed);
    let ok = r.verdict == ReportVerdict::Pass && slack.is_some_and(|s| s >= -1e-10);
    o.line(
        8,
        "||Bf||_2 <= ||f||_2 over 100 samples",
        ok,
        format!("min slack {:.3e}", slack.unwrap_or(f64::NAN)),
    );
}

fn c9_partial_sums(o: &mut Outcome) {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [2.0, 4.0] {
        let (r, _) = scenario(
            "partial-sums",
            Params {
                p: Some(p),
                n_max: Some(256),
                ..Params::default()
            },
        );
        let dec = r.measurement("||S_N f - f||_p decreasing in N").unwrap();
        let sup = r
            .measurement("sup_N ||S_N f||_p / ||f||_p, log series")
            .unwrap();
        ok &= dec.status == Status::Pass
            && sup.status == Status::Measured
            && sup.computed.is_finite();
        if p == 2.0 {
            // Parseval: ||S_N f - f||^2 is proportional to sum_{k>N} 1/(k^2 (k+1))
            let tail = |n: usize| {
                (n + 1..=256)
                    .map(|k| 1.0 / ((k * k * (k + 1)) as f64))
                    .sum::<f64>()
                    .sqrt()
            };
            let got = |n: usize| {
                r.measurement(&format!("||S_N f - f||_p, N={n}"))
                    .unwrap()
                    .computed
            };
            let e = rel(got(2) / got(16), tail(2) / tail(16));
            ok &= e < 1e-9;
            detail.push(format!("p=2 Parseval ratio err {e:.1e}"));
        }
        detail.push(format!("p={p}: sup ratio {:.6}", sup.computed));
    }
    o.line(
        9,
        "||S_N f - f||_p decreasing for N = 2..256 at p = 2, 4",
        ok,
        detail.join(", "),
    );
}

fn c10_determinism(o: &mut Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "scenarios = [\"tmu\", \"orthogonality\", \"counterexample\", \"divergence\", \"contraction\"]\n\n[tmu]\nmu_max = 16\n\n[contraction]\ntrials = 10\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_hartogs"))
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--json")
            .arg(&out)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, a) = run("a.json");
    let (c2, b) = run("b.json");
    let ok = c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b;
    o.line(
        10,
        "two runs of one config give byte-identical JSON",
        ok,
        format!("{} bytes, exit {c1:?}/{c2:?}", a.len()),
    );
}

fn main() {
    let mut o = Outcome {
        lines: Vec::new(),
        hard_failures: Vec::new(),
    };
    c1_tmu(&mut o);
    c2_right_inverse(&mut o);
    c3_counterexample(&mut o);
    c4_divergence(&mut o);
    c5_weighted_norm(&mut o);
    c6_bell(&mut o);
    c7_orthogonality(&mut o);
    c8_contraction(&mut o);
    c9_partial_sums(&mut o);
    c10_determinism(&mut o);
    let passed = o.lines.iter().filter(|l| l.contains(" PASS: ")).count();
    println!("acceptance: {passed}/{} lines PASS", o.lines.len());
    if !o.hard_failures.is_empty() {
        eprintln!("failed: {:?}", o.hard_failures);
        std::process::exit(1);
    }
}
