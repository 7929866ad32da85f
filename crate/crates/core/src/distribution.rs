//! The Wright-type Poisson distribution `P(X = r) = m^r / (Γ(αr + β) E^1_{α,β}(m))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{
    log_gamma, log_gamma_ratio, mittag_leffler2, mittag_leffler3, wright_series, SeriesControl, SeriesResult,
    WrightSpec,
};

/// Cumulative mass that counts as "all of it" when truncating the support.
pub const MASS_CUTOFF_EPS: f64 = 1e-13;
/// Terms past the cutoff that must together stay below [`LOOKAHEAD_MASS`].
pub const LOOKAHEAD: usize = 16;
pub const LOOKAHEAD_MASS: f64 = 1e-15;
/// Hard cap on any walk over the support.
pub const SUPPORT_CAP: u64 = 1_000_000;

/// Validated `(α, β, m)` with the log-normalizer `ln E^1_{α,β}(m)` cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightPoisson {
    alpha: f64,
    beta: f64,
    m: f64,
    log_normalizer: f64,
    ctrl: SeriesControl,
}

/// Every available estimate of the first two moments, side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_series: f64,
    pub mean_closed_i: f64,
    pub mean_closed_ii: f64,
    pub m2_series: f64,
    pub m2_closed_i: f64,
    pub m2_closed_ii: f64,
    pub variance: f64,
    /// Largest discrepancy between two estimates of the same moment, measured
    /// as `|a − b| / max(1, |a|, |b|)`.
    pub max_method_spread: f64,
}

/// Methods whose pairwise spread stays below this are reported consistent.
pub const SPREAD_LIMIT: f64 = 1e-9;

impl MomentReport {
    pub fn consistent(&self) -> bool {
        self.max_method_spread <= SPREAD_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<u64>,
    pub seed: u64,
    pub n: usize,
}

impl SampleBatch {
    pub fn mean(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.n as f64
    }

    /// Unbiased sample variance; zero for a single draw.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        self.values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (self.n - 1) as f64
    }
}

/// `|a − b| / max(1, |a|, |b|)`: absolute near zero, relative for large values.
pub fn spread(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_param(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

impl WrightPoisson {
    pub fn new(alpha: f64, beta: f64, m: f64, ctrl: SeriesControl) -> Result<Self> {
        check_param("alpha", alpha)?;
        check_param("beta", beta)?;
        check_param("m", m)?;
        ctrl.validate()?;
        let z = mittag_leffler3(alpha, beta, 1.0, m, &ctrl)?;
        if z.sign <= 0.0 || !z.log_value.is_finite() {
            return Err(Error::Overflow(format!("normalizer E^1_{{{alpha},{beta}}}({m})")));
        }
        Ok(WrightPoisson {
            alpha,
            beta,
            m,
            log_normalizer: z.log_value,
            ctrl,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn ctrl(&self) -> &SeriesControl {
        &self.ctrl
    }

    fn gamma_arg(&self, r: u64) -> f64 {
        self.alpha * r as f64 + self.beta
    }

    pub fn log_pmf(&self, r: u64) -> f64 {
        let lg = log_gamma(self.gamma_arg(r)).expect("αr + β > 0");
        r as f64 * self.m.ln() - lg - self.log_normalizer
    }

    pub fn pmf(&self, r: u64) -> f64 {
        self.log_pmf(r).exp()
    }

    /// `ln(pmf(r+1) / pmf(r)) = ln m + ln Γ(αr+β) − ln Γ(αr+α+β)`.
    pub fn log_recurrence_factor(&self, r: u64) -> f64 {
        self.m.ln() - log_gamma_ratio(self.gamma_arg(r), self.alpha).expect("αr + β > 0")
    }

    /// `pmf(r+1)` from `pmf(r)`.
    pub fn pmf_recurrence_step(&self, r: u64, pmf_r: f64) -> f64 {
        self.log_recurrence_factor(r).exp() * pmf_r
    }

    /// `(r, ln pmf(r))` for `r = 0, 1, ...`, chained by the recurrence.
    pub fn log_pmf_walk(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let mut acc = Compensated::default();
        acc.add(self.log_pmf(0));
        (0u64..).map(move |r| {
            let here = acc.value();
            acc.add(self.log_recurrence_factor(r));
            (r, here)
        })
    }

    /// `P(X ≤ r)`, accumulated along the recurrence walk.
    pub fn cdf(&self, r: u64) -> f64 {
        let mut cum = Compensated::default();
        for (_, lp) in self.log_pmf_walk().take(r as usize + 1) {
            cum.add(lp.exp());
        }
        cum.value()
    }

    /// Cumulative probabilities `P(X ≤ 0), ..., P(X ≤ R)` up to the mass cutoff `R`.
    pub fn cdf_table(&self) -> Result<Vec<f64>> {
        let mut table = Vec::new();
        let mut cum = Compensated::default();
        let mut pending: Option<usize> = None;
        let mut window = Compensated::default();
        let mut past_mode = false;
        let mut prev = f64::NEG_INFINITY;
        for (r, lp) in self.log_pmf_walk() {
            if r > SUPPORT_CAP {
                return Err(Error::non_convergence("mass cutoff search", SUPPORT_CAP as usize));
            }
            let p = lp.exp();
            past_mode |= lp < prev;
            prev = lp;
            match pending {
                None => {
                    cum.add(p);
                    table.push(cum.value());
                    // underflowed terms past the mode can only get smaller
                    if cum.value() >= 1.0 - MASS_CUTOFF_EPS || (past_mode && p == 0.0) {
                        pending = Some(0);
                        window = Compensated::default();
                    }
                }
                Some(seen) => {
                    window.add(p);
                    if seen + 1 == LOOKAHEAD {
                        if window.value() < LOOKAHEAD_MASS || (past_mode && p == 0.0) {
                            return Ok(table);
                        }
                        // the lookahead terms were real mass; absorb them and keep going
                        let base = table.len() as u64;
                        for (_, lp) in self.log_pmf_walk().skip(base as usize).take(LOOKAHEAD) {
                            cum.add(lp.exp());
                            table.push(cum.value());
                        }
                        pending = None;
                    } else {
                        pending = Some(seen + 1);
                    }
                }
            }
        }
        unreachable!("walk is infinite")
    }

    /// Smallest `R` with `P(X ≤ R) ≥ 1 − 1e-13` whose following 16 terms sum below 1e-15.
    pub fn mass_cutoff(&self) -> Result<u64> {
        Ok(self.cdf_table()?.len() as u64 - 1)
    }

    /// Smallest `r` with `cdf(r) ≥ p`, clamped to the mass cutoff.
    pub fn quantile(&self, p: f64) -> Result<u64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::domain(format!("quantile probability must be in [0, 1), got {p}")));
        }
        let table = self.cdf_table()?;
        let idx = table.partition_point(|&c| c < p);
        Ok(idx.min(table.len() - 1) as u64)
    }

    /// `Σ_r w(r) pmf(r)` for a nonnegative weight whose ratio `w(r+1)/w(r)` is
    /// nonincreasing, so the weighted terms decay at least geometrically once they
    /// start to fall.
    pub fn expectation<W: Fn(u64) -> f64>(&self, what: &str, weight: W) -> Result<f64> {
        let ctrl = &self.ctrl;
        let mut sum = Compensated::default();
        let mut prev = 0.0;
        let mut small_run = 0;
        for r in 0..ctrl.max_terms as u64 {
            let term = weight(r) * self.pmf(r);
            if !term.is_finite() {
                return Err(Error::Overflow(format!("{what} term {r}")));
            }
            sum.add(term);
            let threshold = ctrl.rel_tol * sum.value().abs();
            let tail_ok = if term == 0.0 {
                true
            } else if prev > 0.0 {
                let rho = term / prev;
                rho < 1.0 && term * rho / (1.0 - rho) <= threshold
            } else {
                false
            };
            let small = term <= threshold && tail_ok && (term > 0.0 || prev == 0.0 || r > 0);
            small_run = if small { small_run + 1 } else { 0 };
            prev = term;
            if r as usize + 1 >= ctrl.min_terms && small_run >= ctrl.consecutive_small && sum.value() > 0.0 {
                return Ok(sum.value());
            }
        }
        Err(Error::non_convergence(what, ctrl.max_terms))
    }

    pub fn mean_series(&self) -> Result<f64> {
        self.expectation("mean series", |r| r as f64)
    }

    pub fn second_moment_series(&self) -> Result<f64> {
        self.expectation("second moment series", |r| (r as f64) * (r as f64))
    }

    /// `E[e^{tX}]` summed directly over the support.
    pub fn mgf_series(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!("t must be finite, got {t}")));
        }
        self.expectation("mgf series", |r| (t * r as f64).exp())
    }

    fn psi11(&self, upper_offset: f64) -> Result<SeriesResult> {
        let spec = WrightSpec::new([(upper_offset, 1.0)], [(self.beta, self.alpha)], self.m)?;
        wright_series(&spec, &self.ctrl)
    }

    /// `E^1_{α,β+shift}(m) / E^1_{α,β}(m)`.
    fn shifted_ratio(&self, shift: f64) -> Result<f64> {
        let e = mittag_leffler2(self.alpha, self.beta + shift, self.m, &self.ctrl)?;
        Ok(e.sign * (e.log_value - self.log_normalizer).exp())
    }

    /// `[1Ψ1[m|(2,1);(β,α)] − 1Ψ1[m|(1,1);(β,α)]] / 1Ψ1[m|(1,1);(β,α)]`.
    pub fn mean_closed_i(&self) -> Result<f64> {
        let psi21 = self.psi11(2.0)?;
        let psi11 = self.psi11(1.0)?;
        Ok(psi21.ratio(&psi11) - 1.0)
    }

    /// `(1/α) [E^1_{α,β−1}(m) + (1 − β) E^1_{α,β}(m)] / E^1_{α,β}(m)`.
    pub fn mean_closed_ii(&self) -> Result<f64> {
        Ok((self.shifted_ratio(-1.0)? + (1.0 - self.beta)) / self.alpha)
    }

    /// `E[X²]` from `[2Ψ2[m|(1,1),(1,1);(−1,1),(β,α)] + 1Ψ1[(2,1)] − 1Ψ1[(1,1)]] / 1Ψ1[(1,1)]`.
    pub fn second_moment_closed_i(&self) -> Result<f64> {
        let spec = WrightSpec::new([(1.0, 1.0), (1.0, 1.0)], [(-1.0, 1.0), (self.beta, self.alpha)], self.m)?;
        let psi22 = wright_series(&spec, &self.ctrl)?;
        let psi21 = self.psi11(2.0)?;
        let psi11 = self.psi11(1.0)?;
        Ok(psi22.ratio(&psi11) + psi21.ratio(&psi11) - 1.0)
    }

    /// `E[X²] = (1/α²)[E_{β−2} + (3 − 2β) E_{β−1} + (1 − β)² E_β] / E_β`, all at `m`.
    pub fn second_moment_closed_ii(&self) -> Result<f64> {
        let b = self.beta;
        let sum = self.shifted_ratio(-2.0)? + (3.0 - 2.0 * b) * self.shifted_ratio(-1.0)? + (1.0 - b).powi(2);
        Ok(sum / (self.alpha * self.alpha))
    }

    pub fn moment_report(&self) -> Result<MomentReport> {
        let mean_series = self.mean_series()?;
        let mean_closed_i = self.mean_closed_i()?;
        let mean_closed_ii = self.mean_closed_ii()?;
        let m2_series = self.second_moment_series()?;
        let m2_closed_i = self.second_moment_closed_i()?;
        let m2_closed_ii = self.second_moment_closed_ii()?;
        let means = [mean_series, mean_closed_i, mean_closed_ii];
        let m2s = [m2_series, m2_closed_i, m2_closed_ii];
        let mut max_method_spread: f64 = 0.0;
        for group in [means, m2s] {
            for i in 0..3 {
                for j in i + 1..3 {
                    max_method_spread = max_method_spread.max(spread(group[i], group[j]));
                }
            }
        }
        Ok(MomentReport {
            mean_series,
            mean_closed_i,
            mean_closed_ii,
            m2_series,
            m2_closed_i,
            m2_closed_ii,
            variance: m2_series - mean_series * mean_series,
            max_method_spread,
        })
    }

    /// `E[e^{tX}] = E_{α,β}(e^t m) / E^1_{α,β}(m)`.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!("t must be finite, got {t}")));
        }
        let e = mittag_leffler2(self.alpha, self.beta, t.exp() * self.m, &self.ctrl)?;
        let log_ratio = e.log_value - self.log_normalizer;
        if !log_ratio.is_finite() || log_ratio > f64::MAX.ln() {
            return Err(Error::Overflow(format!("mgf at t={t}")));
        }
        Ok(e.sign * log_ratio.exp())
    }

    /// `n` draws by inversion against the cdf table, using ChaCha8 seeded from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleBatch> {
        if n == 0 {
            return Err(Error::domain("sample size n must be >= 1"));
        }
        let table = self.cdf_table()?;
        let last = table.len() - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                table.partition_point(|&c| c <= u).min(last) as u64
            })
            .collect();
        Ok(SampleBatch { values, seed, n })
    }
}
