//! The invariant suite behind `wright-poisson check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wright_poisson::distribution::spread;
use wright_poisson::special::{
    mittag_leffler, mittag_leffler2, mittag_leffler3, wright_series, SeriesResult, Term, WrightSpec,
};
use wright_poisson::{Error, SeriesControl, WrightPoisson};

use crate::output::{Cell, Report};
use crate::{CliError, Exit, Outcome};

pub const RATES: [f64; 3] = [0.1, 1.0, 5.0];
const IDENTITY_POINTS: usize = 200;
const IDENTITY_SEED: u64 = 0x5eed_0fab_1e00;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    /// Where the largest error occurred, or what went wrong.
    pub worst: String,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Largest error seen so far and where.
struct Worst {
    error: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            error: 0.0,
            at: String::new(),
        }
    }

    fn see(&mut self, error: f64, at: impl FnOnce() -> String) {
        // NaN counts as the worst possible outcome
        let error = if error.is_nan() { f64::INFINITY } else { error };
        if error > self.error || self.at.is_empty() {
            if error > self.error {
                self.error = error;
            }
            self.at = at();
        }
    }
}

fn label(d: &WrightPoisson) -> String {
    format!("alpha={} beta={} m={}", d.alpha(), d.beta(), d.m())
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Relative agreement of two series results, in log space when they overflow.
fn rel_series(a: &SeriesResult, b: &SeriesResult) -> f64 {
    if a.value.is_finite() && b.value.is_finite() {
        rel(a.value, b.value)
    } else if a.sign == b.sign {
        (a.log_value - b.log_value).abs()
    } else {
        f64::INFINITY
    }
}

type CheckFn = fn(&[WrightPoisson], &SeriesControl) -> Result<Worst, Error>;

fn classical_reduction(_: &[WrightPoisson], ctrl: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for m in [0.1, 1.0, 5.0, 20.0] {
        let d = WrightPoisson::new(1.0, 1.0, m, *ctrl)?;
        // m^r e^{-m} / r! built up by products
        let mut want = (-m).exp();
        for r in 0..=50u64 {
            if r > 0 {
                want *= m / r as f64;
            }
            w.see(rel(d.pmf(r), want), || format!("m={m} r={r}"));
        }
    }
    Ok(w)
}

fn normalization(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        let cutoff = d.mass_cutoff()?;
        let total: f64 = (0..=cutoff).map(|r| d.pmf(r)).sum();
        w.see((total - 1.0).abs(), || label(d));
    }
    Ok(w)
}

fn moment_groups(grid: &[WrightPoisson], second: bool) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        let rep = d.moment_report()?;
        let g = if second {
            [rep.m2_series, rep.m2_closed_i, rep.m2_closed_ii]
        } else {
            [rep.mean_series, rep.mean_closed_i, rep.mean_closed_ii]
        };
        let s = spread(g[0], g[1]).max(spread(g[0], g[2])).max(spread(g[1], g[2]));
        w.see(s, || label(d));
    }
    Ok(w)
}

fn mean_agreement(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    moment_groups(grid, false)
}

fn second_moment_agreement(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = moment_groups(grid, true)?;
    for d in grid {
        let spec = WrightSpec::new([(1.0, 1.0), (1.0, 1.0)], [(-1.0, 1.0), (d.beta(), d.alpha())], d.m())?;
        for k in 0..2 {
            if spec.term(k)? != Term::Zero {
                w.see(f64::INFINITY, || format!("{} 2Psi2 term {k} is not exactly zero", label(d)));
            }
        }
    }
    Ok(w)
}

fn variance_nonnegative(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        let rep = d.moment_report()?;
        w.see((-rep.variance).max(0.0), || label(d));
    }
    Ok(w)
}

fn recurrence(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        for (r, lp) in d.log_pmf_walk().take(201) {
            // a log difference is the relative error of the pmf itself
            w.see((lp - d.log_pmf(r)).abs(), || format!("{} r={r}", label(d)));
        }
    }
    Ok(w)
}

fn mgf_series(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            w.see(rel(d.mgf(t)?, d.mgf_series(t)?), || format!("{} t={t}", label(d)));
        }
    }
    Ok(w)
}

fn mgf_zero(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        w.see((d.mgf(0.0)? - 1.0).abs(), || label(d));
    }
    Ok(w)
}

/// Central difference at `h = 1e-5` against the mean, relative to `max(1, mean)`:
/// the difference carries an `h² E[X³] / 6` truncation term that grows with the mean.
fn mgf_derivative(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let h = 1e-5;
    let mut w = Worst::new();
    for d in grid {
        let fd = (d.mgf(h)? - d.mgf(-h)?) / (2.0 * h);
        let mean = d.mean_series()?;
        w.see(spread(fd, mean), || label(d));
    }
    Ok(w)
}

fn cdf_quantile(grid: &[WrightPoisson], _: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        let table = d.cdf_table()?;
        let drop = table.windows(2).map(|p| (p[0] - p[1]).max(0.0)).fold(0.0, f64::max);
        w.see(drop, || format!("{} cdf decrease", label(d)));
        for (r, &c) in table.iter().enumerate() {
            let p = (c - 1e-15).max(0.0);
            if p >= 1.0 {
                continue;
            }
            let q = d.quantile(p)?;
            if q > r as u64 {
                w.see(f64::INFINITY, || format!("{} quantile(cdf({r})) = {q}", label(d)));
            }
        }
    }
    Ok(w)
}

/// `(α, z)` uniformly from `(0, 3] × [−2, 2]`, fixed seed.
pub fn identity_points() -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SEED);
    (0..IDENTITY_POINTS)
        .map(|_| {
            let alpha = 3.0 - 3.0 * rng.random::<f64>();
            let z = -2.0 + 4.0 * rng.random::<f64>();
            (alpha, z)
        })
        .collect()
}

fn mittag_leffler_identities(_: &[WrightPoisson], ctrl: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for (alpha, z) in identity_points() {
        w.see(rel(mittag_leffler(1.0, z, ctrl)?.value, z.exp()), || format!("E_1({z})"));
        w.see(rel(mittag_leffler(2.0, z * z, ctrl)?.value, z.cosh()), || format!("E_2({z}^2)"));
        if z != 0.0 {
            let want = z.exp_m1() / z;
            w.see(rel(mittag_leffler2(1.0, 2.0, z, ctrl)?.value, want), || format!("E_1,2({z})"));
        }
        let a = mittag_leffler3(alpha, 1.0, 1.0, z, ctrl)?;
        let b = mittag_leffler2(alpha, 1.0, z, ctrl)?;
        w.see(rel_series(&a, &b), || format!("E^1_{alpha},1({z})"));
        let c = mittag_leffler(alpha, z, ctrl)?;
        w.see(rel_series(&b, &c), || format!("E_{alpha},1({z})"));
    }
    Ok(w)
}

fn wright_ml_equivalence(grid: &[WrightPoisson], ctrl: &SeriesControl) -> Result<Worst, Error> {
    let mut w = Worst::new();
    for d in grid {
        let spec = WrightSpec::new([(1.0, 1.0)], [(d.beta(), d.alpha())], d.m())?;
        let psi = wright_series(&spec, ctrl)?;
        let e = mittag_leffler3(d.alpha(), d.beta(), 1.0, d.m(), ctrl)?;
        w.see(rel_series(&psi, &e), || label(d));
    }
    Ok(w)
}

const CHECKS: &[(&str, f64, CheckFn)] = &[
    ("cdf-monotone-quantile", 0.0, cdf_quantile),
    ("classical-reduction", 1e-12, classical_reduction),
    ("mean-agreement", 1e-9, mean_agreement),
    ("mgf-derivative", 1e-6, mgf_derivative),
    ("mgf-series", 1e-10, mgf_series),
    ("mgf-zero", 1e-14, mgf_zero),
    ("mittag-leffler-identities", 1e-12, mittag_leffler_identities),
    ("normalization", 1e-10, normalization),
    ("recurrence", 1e-12, recurrence),
    ("second-moment-agreement", 1e-9, second_moment_agreement),
    ("variance-nonnegative", 0.0, variance_nonnegative),
    ("wright-ml-equivalence", 1e-12, wright_ml_equivalence),
];

/// Shape values `0.5, 1.0, ..., 0.5 * grid_size`.
pub fn shape_values(grid_size: usize) -> Vec<f64> {
    (1..=grid_size).map(|k| 0.5 * k as f64).collect()
}

pub fn grid(grid_size: usize, ctrl: &SeriesControl) -> Result<Vec<WrightPoisson>, Error> {
    let shapes = shape_values(grid_size);
    let mut out = Vec::new();
    for &a in &shapes {
        for &b in &shapes {
            for &m in &RATES {
                out.push(WrightPoisson::new(a, b, m, *ctrl)?);
            }
        }
    }
    Ok(out)
}

pub fn run_checks(grid_size: usize, tolerance: Option<f64>, ctrl: &SeriesControl) -> Result<Vec<CheckRow>, CliError> {
    if grid_size == 0 {
        return Err(CliError::Input("grid size must be >= 1".into()));
    }
    if let Some(t) = tolerance {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Input(format!("tolerance must be >= 0, got {t}")));
        }
    }
    let grid = grid(grid_size, ctrl)?;
    let mut rows: Vec<CheckRow> = CHECKS
        .iter()
        .map(|&(name, default_tol, f)| {
            let tolerance = tolerance.unwrap_or(default_tol);
            match f(&grid, ctrl) {
                Ok(w) => CheckRow {
                    name,
                    max_error: w.error,
                    tolerance,
                    worst: w.at,
                },
                Err(e) => CheckRow {
                    name,
                    max_error: f64::INFINITY,
                    tolerance,
                    worst: format!("error: {e}"),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.name.cmp(b.name));
    Ok(rows)
}

pub fn run(grid_size: usize, tolerance: Option<f64>, ctrl: &SeriesControl) -> Result<Outcome, CliError> {
    let rows = run_checks(grid_size, tolerance, ctrl)?;
    let mut report = Report::new(vec!["check", "status", "max_error", "tolerance", "worst_case"]);
    let mut failed = Vec::new();
    for row in &rows {
        let status = if row.passed() { "pass" } else { "fail" };
        if !row.passed() {
            failed.push(row.name);
        }
        report.push(vec![
            row.name.into(),
            status.into(),
            Cell::Float(row.max_error),
            Cell::Float(row.tolerance),
            row.worst.clone().into(),
        ]);
    }
    if failed.is_empty() {
        return Ok(Outcome::ok(report));
    }
    Ok(Outcome {
        report,
        exit: Exit::CheckFailed,
        message: Some(format!("failed checks: {}", failed.join(", "))),
    })
}
