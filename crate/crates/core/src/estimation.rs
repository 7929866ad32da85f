//! Count-data ingestion and maximum-likelihood fitting.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distribution::WrightPoisson;
use crate::error::{Error, Result};
use crate::special::{log_gamma, SeriesControl};

/// Observed counts with their sufficient statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountData {
    pub counts: Vec<u64>,
    pub n: usize,
    pub sum: u64,
    pub sum_sq: u128,
    /// value → multiplicity
    histogram: BTreeMap<u64, u64>,
}

impl CountData {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyData);
        }
        let mut sum: u64 = 0;
        let mut sum_sq: u128 = 0;
        let mut histogram = BTreeMap::new();
        for &c in &counts {
            sum = sum
                .checked_add(c)
                .ok_or_else(|| Error::domain("sum of counts overflows u64"))?;
            sum_sq += u128::from(c) * u128::from(c);
            *histogram.entry(c).or_insert(0) += 1;
        }
        Ok(CountData {
            n: counts.len(),
            counts,
            sum,
            sum_sq,
            histogram,
        })
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.n as f64
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.mean();
        ((self.sum_sq as f64) - n * mean * mean).max(0.0) / (n - 1.0)
    }

    /// Distinct values with their multiplicities, ascending.
    pub fn histogram(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.histogram.iter().map(|(&v, &c)| (v, c))
    }

    pub fn distinct(&self) -> usize {
        self.histogram.len()
    }
}

/// Column selector for delimited input: header name, or 0-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    /// A selector that is all digits is an index unless the header has a column
    /// with that exact name.
    pub fn parse(s: &str) -> Column {
        match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        }
    }
}

fn detect_delimiter(text: &str) -> u8 {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

fn parse_count(field: &str, line: u64) -> Result<u64> {
    let f = field.trim();
    if f.is_empty() {
        return Err(Error::Parse {
            line,
            message: "empty field".into(),
        });
    }
    match f.parse::<i128>() {
        Ok(v) if v < 0 => Err(Error::Parse {
            line,
            message: format!("negative count {f}"),
        }),
        Ok(v) => u64::try_from(v).map_err(|_| Error::Parse {
            line,
            message: format!("count {f} is too large"),
        }),
        Err(_) => Err(Error::Parse {
            line,
            message: format!("{f:?} is not a nonnegative integer"),
        }),
    }
}

fn looks_numeric(field: &str) -> bool {
    let f = field.trim();
    !f.is_empty() && (f.parse::<f64>().is_ok() || f.parse::<i128>().is_ok())
}

/// Parses counts from text: one integer per line, or comma/tab-delimited with an
/// optional header row.
pub fn parse_counts(text: &str, column: Option<&Column>) -> Result<CountData> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(detect_delimiter(text))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    // the reader's own line counter skips blank lines; count from byte offsets
    let line_of = |pos: Option<&csv::Position>| -> u64 {
        pos.map_or(0, |p| {
            // a record's position can precede the blank lines skipped before it
            let mut end = (p.byte() as usize).min(text.len());
            while end < text.len() && matches!(text.as_bytes()[end], b'\n' | b'\r') {
                end += 1;
            }
            text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() as u64 + 1
        })
    };
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: line_of(e.position()),
            message: e.to_string(),
        })?;
        let line = line_of(rec.position());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push((line, rec));
    }
    let Some((_, first)) = records.first() else {
        return Err(Error::EmptyData);
    };

    let has_header = match column {
        Some(Column::Name(_)) => true,
        _ => !first.iter().any(looks_numeric),
    };
    let width = first.len();
    let idx = match column {
        Some(Column::Name(name)) => {
            let found = first.iter().position(|h| h == name);
            match found {
                Some(i) => i,
                None => {
                    return Err(Error::Parse {
                        line: records[0].0,
                        message: format!("no column named {name:?} in header"),
                    })
                }
            }
        }
        Some(Column::Index(i)) => {
            if *i >= width {
                return Err(Error::Parse {
                    line: records[0].0,
                    message: format!("column index {i} out of range for {width} columns"),
                });
            }
            *i
        }
        None if width == 1 => 0,
        None => {
            return Err(Error::Parse {
                line: records[0].0,
                message: format!("{width} columns found; select one by name or index"),
            })
        }
    };

    let body = if has_header { &records[1..] } else { &records[..] };
    let counts = body
        .iter()
        .map(|(line, rec)| match rec.get(idx) {
            Some(f) => parse_count(f, *line),
            None => Err(Error::Parse {
                line: *line,
                message: format!("missing column {idx}"),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    CountData::new(counts)
}

pub fn load_counts(path: impl AsRef<Path>, column: Option<&Column>) -> Result<CountData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_counts(&text, column)
}

/// `Σ_i ln pmf(r_i)` through the sufficient statistics.
pub fn log_likelihood_of(data: &CountData, d: &WrightPoisson) -> f64 {
    let (alpha, beta) = (d.alpha(), d.beta());
    let gamma_sum: f64 = data
        .histogram()
        .map(|(v, c)| c as f64 * log_gamma(alpha * v as f64 + beta).expect("αr + β > 0"))
        .sum();
    data.sum as f64 * d.m().ln() - gamma_sum - data.n as f64 * d.log_normalizer()
}

pub fn log_likelihood(data: &CountData, alpha: f64, beta: f64, m: f64, ctrl: &SeriesControl) -> Result<f64> {
    let d = WrightPoisson::new(alpha, beta, m, *ctrl)?;
    Ok(log_likelihood_of(data, &d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitProfile {
    MOnly,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The optimum sits on the lower bound for `m` or the edge of the shape box.
    pub at_boundary: bool,
    pub profile: FitProfile,
}

pub const M_FLOOR: f64 = 1e-8;
const M_ITERATION_CAP: usize = 200;
const REFINE_ROUNDS: usize = 3;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Likelihood with numerical failures mapped to `−∞`, so the optimizers step away
/// from regions where the normalizer cannot be evaluated.
fn objective(data: &CountData, alpha: f64, beta: f64, m: f64, ctrl: &SeriesControl) -> Result<f64> {
    match log_likelihood(data, alpha, beta, m, ctrl) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Ok(f64::NEG_INFINITY),
        Err(e) if e.is_non_convergence() => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// Maximizes the likelihood over `m` with `α`, `β` held fixed.
pub fn fit_m(data: &CountData, alpha: f64, beta: f64, ctrl: &SeriesControl) -> Result<FitResult> {
    // validates α and β
    WrightPoisson::new(alpha, beta, 1.0, *ctrl).or_else(|e| {
        if e.is_non_convergence() {
            Ok(WrightPoisson::new(1.0, 1.0, 1.0, *ctrl)?)
        } else {
            Err(e)
        }
    })?;
    let f = |m: f64| objective(data, alpha, beta, m, ctrl);
    let evals = Cell::new(0usize);
    let eval = |m: f64| -> Result<f64> {
        evals.set(evals.get() + 1);
        f(m)
    };

    // bracket a < b < c with f(b) ≥ f(a), f(c)
    let mut b = data.mean().max(M_FLOOR);
    let mut fb = eval(b)?;
    while fb == f64::NEG_INFINITY && b > M_FLOOR {
        b = (b / 4.0).max(M_FLOOR);
        fb = eval(b)?;
        if evals.get() > M_ITERATION_CAP {
            return Err(Error::non_convergence("m bracketing", M_ITERATION_CAP));
        }
    }
    let (mut a, mut c) = ((b / 2.0).max(M_FLOOR), b * 2.0);
    let mut fa = if a < b { eval(a)? } else { fb };
    let mut fc = eval(c)?;
    while fa > fb || fc > fb {
        if evals.get() > M_ITERATION_CAP {
            return Err(Error::non_convergence("m bracketing", M_ITERATION_CAP));
        }
        if fa > fb {
            if a <= M_FLOOR {
                // the likelihood still rises toward the floor
                return Ok(FitResult {
                    alpha,
                    beta,
                    m: M_FLOOR,
                    log_likelihood: fa,
                    iterations: evals.get(),
                    converged: true,
                    at_boundary: true,
                    profile: FitProfile::MOnly,
                });
            }
            (c, fc, b, fb) = (b, fb, a, fa);
            a = (b / 2.0).max(M_FLOOR);
            fa = eval(a)?;
        } else {
            (a, fa, b, fb) = (b, fb, c, fc);
            c = b * 2.0;
            fc = eval(c)?;
        }
    }
    if a >= b {
        // b is on the floor and beats its right neighbour
        return Ok(FitResult {
            alpha,
            beta,
            m: b,
            log_likelihood: fb,
            iterations: evals.get(),
            converged: true,
            at_boundary: true,
            profile: FitProfile::MOnly,
        });
    }

    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while hi - lo > 1e-8 * (1.0 + 0.5 * (lo + hi)) {
        if evals.get() > M_ITERATION_CAP {
            return Err(Error::non_convergence("golden-section search for m", M_ITERATION_CAP));
        }
        if f1 >= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        }
    }
    let (m, ll) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let (m, ll) = if fb > ll { (b, fb) } else { (m, ll) };
    Ok(FitResult {
        alpha,
        beta,
        m,
        log_likelihood: ll,
        iterations: evals.get(),
        converged: ll.is_finite(),
        at_boundary: m <= M_FLOOR * (1.0 + 1e-12),
        profile: FitProfile::MOnly,
    })
}

/// Search box and resolution for [`fit_full`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullFitOptions {
    pub shape_lower: f64,
    pub shape_upper: f64,
    /// Points per axis of the initial log-spaced grid; odd counts put `1` on the grid
    /// when the box is symmetric in log scale.
    pub grid_points: usize,
    /// Refinement stops once the log10 step falls below this.
    pub min_step: f64,
    pub max_polls: usize,
}

impl Default for FullFitOptions {
    fn default() -> Self {
        FullFitOptions {
            shape_lower: 0.1,
            shape_upper: 10.0,
            grid_points: 9,
            min_step: 1e-7,
            max_polls: 2000,
        }
    }
}

/// Strictly better likelihood, or equal likelihood at a lexicographically smaller point.
fn better(a: &FitResult, b: &FitResult) -> bool {
    if a.log_likelihood != b.log_likelihood {
        return a.log_likelihood > b.log_likelihood;
    }
    (a.alpha, a.beta, a.m) < (b.alpha, b.beta, b.m)
}

/// Maximizes the likelihood over `(α, β, m)`: a log-spaced grid over the shape box
/// with `m` profiled out, then pattern search in `(log α, log β)` with halving steps.
pub fn fit_full(data: &CountData, ctrl: &SeriesControl, opts: &FullFitOptions) -> Result<FitResult> {
    if data.distinct() < 2 {
        return Err(Error::DegenerateData("all counts are equal".into()));
    }
    if !(opts.shape_lower > 0.0 && opts.shape_upper > opts.shape_lower && opts.grid_points >= 2) {
        return Err(Error::domain("shape box needs 0 < lower < upper and at least 2 grid points"));
    }
    let (lo, hi) = (opts.shape_lower.log10(), opts.shape_upper.log10());
    let polls = Cell::new(0usize);
    let profile = |la: f64, lb: f64| -> Result<FitResult> {
        let la = la.clamp(lo, hi);
        let lb = lb.clamp(lo, hi);
        let r = fit_m(data, 10f64.powf(la), 10f64.powf(lb), ctrl);
        polls.set(polls.get() + 1);
        match r {
            Ok(r) => Ok(r),
            Err(e) if e.is_non_convergence() => Ok(FitResult {
                alpha: 10f64.powf(la),
                beta: 10f64.powf(lb),
                m: f64::NAN,
                log_likelihood: f64::NEG_INFINITY,
                iterations: 0,
                converged: false,
                at_boundary: false,
                profile: FitProfile::MOnly,
            }),
            Err(e) => Err(e),
        }
    };

    let k = opts.grid_points;
    let step0 = (hi - lo) / (k - 1) as f64;
    let axis = |i: usize| if i + 1 == k { hi } else { lo + i as f64 * step0 };
    let mut best: Option<(f64, f64, FitResult)> = None;
    for i in 0..k {
        for j in 0..k {
            let (la, lb) = (axis(i), axis(j));
            let r = profile(la, lb)?;
            if best.as_ref().is_none_or(|(_, _, b)| better(&r, b)) {
                best = Some((la, lb, r));
            }
        }
    }
    let (mut la, mut lb, mut cur) = best.expect("grid is nonempty");
    if !cur.log_likelihood.is_finite() {
        return Err(Error::non_convergence("full fit: no grid point has a finite likelihood", polls.get()));
    }

    // refinement rounds: 3×3 local grids with halving spacing
    let mut step = step0;
    for _ in 0..REFINE_ROUNDS {
        step /= 2.0;
        let (ca, cb) = (la, lb);
        for da in [-1.0, 0.0, 1.0] {
            for db in [-1.0, 0.0, 1.0] {
                let (na, nb) = ((ca + da * step).clamp(lo, hi), (cb + db * step).clamp(lo, hi));
                if (na, nb) == (ca, cb) {
                    continue;
                }
                let r = profile(na, nb)?;
                if better(&r, &cur) {
                    (la, lb, cur) = (na, nb, r);
                }
            }
        }
    }

    // Nelder-Mead polish; the profile likelihood has long curved ridges where
    // axis-aligned polling crawls
    let mut simplex = vec![(la, lb, cur)];
    for (da, db) in [(step, 0.0), (0.0, step)] {
        let (na, nb) = ((la + da).clamp(lo, hi), (lb + db).clamp(lo, hi));
        let (na, nb) = if (na, nb) == (la, lb) { (la - da, lb - db) } else { (na, nb) };
        simplex.push((na, nb, profile(na, nb)?));
    }
    let mut polished = false;
    while polls.get() <= opts.max_polls {
        simplex.sort_by(|x, y| {
            if better(&x.2, &y.2) {
                std::cmp::Ordering::Less
            } else if better(&y.2, &x.2) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        let (best, worst) = (&simplex[0], &simplex[2]);
        let size = simplex
            .iter()
            .map(|v| (v.0 - best.0).abs().max((v.1 - best.1).abs()))
            .fold(0.0, f64::max);
        if size < opts.min_step && best.2.log_likelihood - worst.2.log_likelihood < 1e-9 {
            polished = true;
            break;
        }
        if size < 1e-3 * opts.min_step {
            // collapsed without flattening: nothing finer is representable
            polished = true;
            break;
        }
        let ca = 0.5 * (simplex[0].0 + simplex[1].0);
        let cb = 0.5 * (simplex[0].1 + simplex[1].1);
        let at = |t: f64| ((ca + t * (worst.0 - ca)).clamp(lo, hi), (cb + t * (worst.1 - cb)).clamp(lo, hi));
        let (ra, rb) = at(-1.0);
        let refl = profile(ra, rb)?;
        if better(&refl, &simplex[0].2) {
            let (ea, eb) = at(-2.0);
            let exp = profile(ea, eb)?;
            simplex[2] = if better(&exp, &refl) { (ea, eb, exp) } else { (ra, rb, refl) };
        } else if better(&refl, &simplex[1].2) {
            simplex[2] = (ra, rb, refl);
        } else {
            let t = if better(&refl, &simplex[2].2) { -0.5 } else { 0.5 };
            let (ka, kb) = at(t);
            let con = profile(ka, kb)?;
            let reference = if t < 0.0 { &refl } else { &simplex[2].2 };
            if better(&con, reference) {
                simplex[2] = (ka, kb, con);
            } else {
                let (ba, bb) = (simplex[0].0, simplex[0].1);
                for v in simplex.iter_mut().skip(1) {
                    let (na, nb) = (ba + 0.5 * (v.0 - ba), bb + 0.5 * (v.1 - bb));
                    *v = (na, nb, profile(na, nb)?);
                }
            }
        }
    }
    if !polished {
        return Err(Error::non_convergence("full fit simplex polish", opts.max_polls));
    }
    let winner = simplex
        .into_iter()
        .reduce(|x, y| if better(&y.2, &x.2) { y } else { x })
        .expect("simplex has three vertices");
    (la, lb, cur) = winner;

    let edge = |l: f64| (l - lo).abs() < 1e-12 || (l - hi).abs() < 1e-12;
    Ok(FitResult {
        iterations: polls.get(),
        // the polish only stops once its vertices agree to 1e-9
        converged: cur.log_likelihood.is_finite(),
        at_boundary: cur.at_boundary || edge(la) || edge(lb),
        profile: FitProfile::Full,
        ..cur
    })
}
