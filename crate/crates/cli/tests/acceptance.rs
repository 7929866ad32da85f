//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p wright-poisson-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use wright_poisson::distribution::spread;
use wright_poisson::estimation::{fit_full, fit_m, FullFitOptions};
use wright_poisson::special::{mittag_leffler, mittag_leffler2, mittag_leffler3, SeriesResult, Term, WrightSpec};
use wright_poisson::{CountData, SeriesControl, WrightPoisson};
use wright_poisson_cli::check::identity_points;

const SHAPES: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
const RATES: [f64; 3] = [0.1, 1.0, 5.0];
const SAMPLE_SEED: u64 = 20_240_917;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

type Outcome = Result<Verdict, String>;

fn ctrl() -> SeriesControl {
    SeriesControl::default()
}

fn grid() -> Result<Vec<WrightPoisson>, String> {
    let mut out = Vec::with_capacity(75);
    for &a in &SHAPES {
        for &b in &SHAPES {
            for &m in &RATES {
                out.push(WrightPoisson::new(a, b, m, ctrl()).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Relative agreement, falling back to log space when either value overflows.
fn rel_series(a: &SeriesResult, b: &SeriesResult) -> f64 {
    if a.value.is_finite() && b.value.is_finite() {
        rel(a.value, b.value)
    } else if a.sign == b.sign {
        (a.log_value - b.log_value).abs()
    } else {
        f64::INFINITY
    }
}

fn at(d: &WrightPoisson) -> String {
    format!("({}, {}, {})", d.alpha(), d.beta(), d.m())
}

/// Running maximum that remembers where it occurred; NaN counts as infinite.
#[derive(Default)]
struct Max {
    value: f64,
    at: String,
}

impl Max {
    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v > self.value || self.at.is_empty() {
            self.value = self.value.max(v);
            self.at = at();
        }
    }
}

fn classical_reduction() -> Outcome {
    let mut worst = Max::default();
    for m in [0.1, 1.0, 5.0, 20.0] {
        let d = WrightPoisson::new(1.0, 1.0, m, ctrl()).map_err(|e| e.to_string())?;
        let mut want = (-m).exp();
        for r in 0..=50u64 {
            if r > 0 {
                want *= m / r as f64;
            }
            worst.see(rel(d.pmf(r), want), || format!("m={m} r={r}"));
        }
    }
    Ok(verdict(
        worst.value <= 1e-12,
        format!("max rel error {:.3e} at {}", worst.value, worst.at),
    ))
}

fn normalization() -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in grid()? {
        let cutoff = d.mass_cutoff().map_err(|e| e.to_string())?;
        let total: f64 = (0..=cutoff).map(|r| d.pmf(r)).sum();
        lo = lo.min(total);
        hi = hi.max(total);
    }
    Ok(verdict(
        lo >= 1.0 - 1e-10 && hi <= 1.0 + 1e-12,
        format!("sums in [1{:+.3e}, 1{:+.3e}]", lo - 1.0, hi - 1.0),
    ))
}

fn pairwise(values: [f64; 3]) -> f64 {
    let [a, b, c] = values;
    spread(a, b).max(spread(a, c)).max(spread(b, c))
}

fn mean_methods() -> Outcome {
    let mut worst = Max::default();
    let mut pole = 0;
    for d in grid()? {
        let rep = d.moment_report().map_err(|e| e.to_string())?;
        if d.beta() == 1.0 {
            pole += 1;
        }
        worst.see(pairwise([rep.mean_series, rep.mean_closed_i, rep.mean_closed_ii]), || at(&d));
    }
    Ok(verdict(
        worst.value <= 1e-9,
        format!("max spread {:.3e} at {} ({pole} points with beta = 1)", worst.value, worst.at),
    ))
}

fn second_moment_methods() -> Outcome {
    let mut worst = Max::default();
    let mut nonzero = Vec::new();
    for d in grid()? {
        let rep = d.moment_report().map_err(|e| e.to_string())?;
        worst.see(pairwise([rep.m2_series, rep.m2_closed_i, rep.m2_closed_ii]), || at(&d));
        let spec = WrightSpec::new([(1.0, 1.0), (1.0, 1.0)], [(-1.0, 1.0), (d.beta(), d.alpha())], d.m())
            .map_err(|e| e.to_string())?;
        for k in 0..2 {
            if spec.term(k).map_err(|e| e.to_string())? != Term::Zero {
                nonzero.push(format!("{} k={k}", at(&d)));
            }
        }
    }
    Ok(verdict(
        worst.value <= 1e-9 && nonzero.is_empty(),
        format!(
            "max spread {:.3e} at {}; leading terms not exactly zero: {}",
            worst.value,
            worst.at,
            if nonzero.is_empty() { "none".into() } else { nonzero.join(", ") }
        ),
    ))
}

fn recurrence() -> Outcome {
    let mut worst = Max::default();
    for d in grid()? {
        for (r, chained) in d.log_pmf_walk().take(201) {
            worst.see((chained - d.log_pmf(r)).abs(), || format!("{} r={r}", at(&d)));
        }
    }
    Ok(verdict(
        worst.value <= 1e-12,
        format!("max rel error {:.3e} at {}", worst.value, worst.at),
    ))
}

fn mgf() -> Outcome {
    let h = 1e-5;
    let (mut series, mut zero, mut fd, mut fd_abs) = (Max::default(), Max::default(), Max::default(), 0.0f64);
    for d in grid()? {
        let e = |s: wright_poisson::Error| s.to_string();
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let closed = d.mgf(t).map_err(e)?;
            let summed = d.mgf_series(t).map_err(e)?;
            series.see(rel(closed, summed), || format!("{} t={t}", at(&d)));
        }
        zero.see((d.mgf(0.0).map_err(e)? - 1.0).abs(), || at(&d));
        let diff = (d.mgf(h).map_err(e)? - d.mgf(-h).map_err(e)?) / (2.0 * h);
        let mean = d.mean_series().map_err(e)?;
        fd.see(spread(diff, mean), || at(&d));
        fd_abs = fd_abs.max((diff - mean).abs());
    }
    Ok(verdict(
        series.value <= 1e-10 && zero.value <= 1e-14 && fd.value <= 1e-6,
        format!(
            "series {:.3e} at {}; |mgf(0)-1| {:.1e}; difference quotient {:.3e} relative to max(1, mean) at {} ({:.2e} absolute)",
            series.value, series.at, zero.value, fd.value, fd.at, fd_abs
        ),
    ))
}

fn mittag_leffler_identities() -> Outcome {
    let c = ctrl();
    let e = |s: wright_poisson::Error| s.to_string();
    let mut worst = Max::default();
    let points = identity_points();
    for &(alpha, z) in &points {
        worst.see(rel(mittag_leffler(1.0, z, &c).map_err(e)?.value, z.exp()), || format!("E_1({z})"));
        worst.see(rel(mittag_leffler(2.0, z * z, &c).map_err(e)?.value, z.cosh()), || format!("E_2({z}^2)"));
        if z != 0.0 {
            let got = mittag_leffler2(1.0, 2.0, z, &c).map_err(e)?.value;
            worst.see(rel(got, z.exp_m1() / z), || format!("E_1,2({z})"));
        }
        for beta in [0.5, 1.0, 2.0] {
            let three = mittag_leffler3(alpha, beta, 1.0, z, &c).map_err(e)?;
            let two = mittag_leffler2(alpha, beta, z, &c).map_err(e)?;
            worst.see(rel_series(&three, &two), || format!("E^1_{alpha},{beta}({z})"));
        }
    }
    Ok(verdict(
        worst.value <= 1e-12,
        format!("{} points, max rel error {:.3e} at {}", points.len(), worst.value, worst.at),
    ))
}

fn sampling() -> Outcome {
    let e = |s: wright_poisson::Error| s.to_string();
    let n = 100_000;
    let mut lines = Vec::new();
    let mut ok = true;
    for (a, b, m) in [(1.0, 1.0, 4.0), (2.0, 1.0, 1.0), (0.5, 1.5, 1.0)] {
        let d = WrightPoisson::new(a, b, m, ctrl()).map_err(e)?;
        let rep = d.moment_report().map_err(e)?;
        let batch = d.sample(n, SAMPLE_SEED).map_err(e)?;
        let again = d.sample(n, SAMPLE_SEED).map_err(e)?;
        let z = (batch.mean() - rep.mean_series) / (rep.variance / n as f64).sqrt();
        let repeatable = batch.values == again.values;
        ok &= z.abs() <= 3.0 && repeatable;
        lines.push(format!("({a}, {b}, {m}) z={z:+.2}{}", if repeatable { "" } else { " NOT repeatable" }));
    }
    Ok(verdict(ok, lines.join("; ")))
}

fn fitting() -> Outcome {
    let e = |s: wright_poisson::Error| s.to_string();
    let c = ctrl();
    let source = WrightPoisson::new(1.0, 1.0, 4.0, c).map_err(e)?;
    let data = CountData::new(source.sample(100_000, SAMPLE_SEED).map_err(e)?.values).map_err(e)?;
    let classical = fit_m(&data, 1.0, 1.0, &c).map_err(e)?;
    let full = fit_full(&data, &c, &FullFitOptions::default()).map_err(e)?;
    let m_error = (classical.m - data.mean()).abs();
    let gain = full.log_likelihood - classical.log_likelihood;
    Ok(verdict(
        m_error <= 1e-6 && gain >= -1e-3,
        format!(
            "|m_hat - mean| {m_error:.2e}; full fit ({:.4}, {:.4}, {:.4}) gains {gain:+.4e} log-likelihood",
            full.alpha, full.beta, full.m
        ),
    ))
}

fn binary(args: &[&str]) -> Result<(i32, String, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wright-poisson"))
        .args(args)
        .env_remove("WRIGHT_POISSON_REL_TOL")
        .output()
        .map_err(|e| format!("cannot run binary: {e}"))?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn cli_contract() -> Outcome {
    let mut problems = Vec::new();

    let (code, _, err) = binary(&["check"])?;
    if code != 0 {
        problems.push(format!("check exited {code}: {}", err.trim()));
    }

    let malformed: [&[&str]; 5] = [
        &["pmf", "--alpha", "1", "--beta", "1", "--m", "-1"],
        &["pmf", "--alpha", "0", "--beta", "1", "--m", "1"],
        &["moments", "--alpha", "1", "--beta", "nan", "--m", "1"],
        &["mgf", "--alpha", "one", "--beta", "1", "--m", "1"],
        &["pmf", "--alpha", "1", "--beta", "1"],
    ];
    for args in malformed {
        let (code, _, _) = binary(args)?;
        if code != 2 {
            problems.push(format!("`{}` exited {code}", args.join(" ")));
        }
    }

    let (code, text, _) = binary(&["--format", "json", "pmf", "--alpha", "1.5", "--beta", "0.5", "--m", "2", "--r-max", "30"])?;
    let d = WrightPoisson::new(1.5, 0.5, 2.0, ctrl()).map_err(|e| e.to_string())?;
    match serde_json::from_str::<Value>(&text) {
        Ok(v) if code == 0 => {
            let rows = v.as_array().cloned().unwrap_or_default();
            let exact = rows.len() == 31
                && rows
                    .iter()
                    .enumerate()
                    .all(|(r, row)| row["pmf"].as_f64() == Some(d.pmf(r as u64)));
            if !exact {
                problems.push("pmf JSON does not reproduce library values bit for bit".into());
            }
            let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            if again != v {
                problems.push("pmf JSON does not survive a second round trip".into());
            }
        }
        Ok(_) => problems.push(format!("pmf --format json exited {code}")),
        Err(err) => problems.push(format!("pmf JSON does not parse: {err}")),
    }

    for args in [
        &["--format", "json", "moments", "--alpha", "0.5", "--beta", "3", "--m", "5"][..],
        &["--format", "json", "mgf", "--alpha", "2", "--beta", "1", "--m", "1", "--t", "-1,0,1"],
        &["--format", "json", "sample", "--alpha", "1", "--beta", "1", "--m", "4", "--n", "20", "--seed", "9"],
        &["--format", "json", "check", "--grid-size", "3"],
    ] {
        let (code, text, _) = binary(args)?;
        match serde_json::from_str::<Value>(&text) {
            Ok(v) => {
                let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
                if code != 0 || again != v {
                    problems.push(format!("`{}` exited {code} or did not round-trip", args.join(" ")));
                }
            }
            Err(err) => problems.push(format!("`{}` JSON does not parse: {err}", args.join(" "))),
        }
    }

    let passed = problems.is_empty();
    Ok(verdict(
        passed,
        if passed {
            "check exits 0, 5 malformed invocations exit 2, 5 JSON outputs parse and round-trip".to_string()
        } else {
            problems.join("; ")
        },
    ))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    ("classical reduction", Duration::from_secs(1), classical_reduction),
    ("normalization", Duration::from_secs(5), normalization),
    ("mean methods", Duration::from_secs(5), mean_methods),
    ("second-moment methods", Duration::from_secs(5), second_moment_methods),
    ("recurrence", Duration::MAX, recurrence),
    ("mgf", Duration::MAX, mgf),
    ("Mittag-Leffler identities", Duration::MAX, mittag_leffler_identities),
    ("sampling", Duration::from_secs(10), sampling),
    ("fitting", Duration::MAX, fitting),
    ("cli contract", Duration::MAX, cli_contract),
];

fn main() -> ExitCode {
    let mut failures = 0;
    for (i, (name, budget, run)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= *budget;
        let passed = passed && in_time;
        let budget_note = if *budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {:?}", budget)
        };
        println!(
            "criterion {:>2}: {} {name}: {detail} [{:.3?}{budget_note}]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            elapsed
        );
        failures += usize::from(!passed);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
