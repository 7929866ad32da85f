//! Log-space summation engine shared by every series in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation policy for the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub min_terms: usize,
    pub max_terms: usize,
    pub consecutive_small: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-15,
            min_terms: 8,
            max_terms: 10_000,
            consecutive_small: 3,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, min_terms: usize, max_terms: usize, consecutive_small: usize) -> Result<Self> {
        let ctrl = SeriesControl {
            rel_tol,
            min_terms,
            max_terms,
            consecutive_small,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        SeriesControl { rel_tol, ..self }.validate_into()
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        SeriesControl { max_terms, ..self }.validate_into()
    }

    fn validate_into(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::domain(format!("rel_tol must be in (0, 1), got {}", self.rel_tol)));
        }
        if self.min_terms < 1 || self.min_terms > self.max_terms {
            return Err(Error::domain(format!(
                "need 1 <= min_terms <= max_terms, got min_terms={} max_terms={}",
                self.min_terms, self.max_terms
            )));
        }
        if self.consecutive_small < 1 {
            return Err(Error::domain("consecutive_small must be >= 1"));
        }
        Ok(())
    }
}

/// How a [`SeriesResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    Series,
    /// Integral representation, used for Mittag-Leffler functions with `0 < α < 1`
    /// when the power series cannot deliver full precision.
    Integral,
}

/// Value of a summed series.
///
/// `log_value` is `ln |value|` and stays finite when `value` itself saturates to
/// infinity, so ratios of large series should be formed from `log_value` and `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub log_value: f64,
    pub sign: f64,
    pub terms_used: usize,
    pub converged: bool,
    /// `ln` of the largest term magnitude seen; compared with `log_value` it
    /// measures cancellation in alternating sums.
    pub max_log_term: f64,
    pub method: Evaluation,
}

impl SeriesResult {
    pub(crate) fn from_log(sign: f64, log_value: f64, terms_used: usize, method: Evaluation) -> Self {
        let value = if sign == 0.0 { 0.0 } else { sign * log_value.exp() };
        SeriesResult {
            value,
            log_value: if sign == 0.0 { f64::NEG_INFINITY } else { log_value },
            sign,
            terms_used,
            converged: true,
            max_log_term: log_value,
            method,
        }
    }

    /// `self / other`, formed in log space.
    pub fn ratio(&self, other: &SeriesResult) -> f64 {
        if self.sign == 0.0 {
            return 0.0;
        }
        self.sign * other.sign * (self.log_value - other.log_value).exp()
    }

    /// Largest term magnitude divided by the magnitude of the sum.
    pub fn cancellation(&self) -> f64 {
        if self.sign == 0.0 {
            if self.max_log_term == f64::NEG_INFINITY {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.max_log_term - self.log_value).exp()
        }
    }
}

/// One term of a series in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Zero,
    Value { sign: f64, ln_abs: f64 },
}

// Partial sums are rescaled once they pass 1e280.
const RESCALE_AT: f64 = 1e280;
const LN_RESCALE_AT: f64 = 644.720_267_881_934_6;

/// Sums `Σ_k term(k)` where each term arrives as `(sign, ln |t_k|)`.
///
/// Each term is exponentiated against a running scale so neither terms nor the
/// partial sum overflow. Stops once `consecutive_small` successive terms (past
/// `min_terms`) are below `rel_tol · |partial sum|` and the geometric tail bound
/// implied by the current term ratio is below the same threshold.
pub fn sum_log_terms<F>(what: &str, ctrl: &SeriesControl, mut term: F) -> Result<SeriesResult>
where
    F: FnMut(usize) -> Result<Term>,
{
    ctrl.validate()?;
    let mut scale = 0.0_f64;
    let mut sum = 0.0_f64;
    let mut seen_nonzero = false;
    let mut max_log_term = f64::NEG_INFINITY;
    let mut prev_ln: Option<f64> = None;
    let mut small_run = 0usize;

    for k in 0..ctrl.max_terms {
        let t = term(k)?;
        let ln_t = match t {
            Term::Zero => None,
            Term::Value { sign, ln_abs } => {
                if !ln_abs.is_finite() {
                    if ln_abs == f64::NEG_INFINITY {
                        None
                    } else {
                        return Err(Error::Overflow(format!("{what} term {k}")));
                    }
                } else {
                    if !seen_nonzero {
                        seen_nonzero = true;
                        if ln_abs.abs() > 600.0 {
                            scale = ln_abs;
                        }
                    }
                    if ln_abs - scale > LN_RESCALE_AT {
                        sum *= (scale - ln_abs).exp();
                        scale = ln_abs;
                    }
                    sum += sign * (ln_abs - scale).exp();
                    if sum.abs() > RESCALE_AT {
                        scale += sum.abs().ln();
                        sum = sum.signum();
                    }
                    max_log_term = max_log_term.max(ln_abs);
                    Some(ln_abs)
                }
            }
        };

        let threshold = ctrl.rel_tol * sum.abs();
        let small = match ln_t {
            None => true,
            Some(ln_abs) => {
                let mag = (ln_abs - scale).exp();
                let tail_ok = match prev_ln {
                    Some(p) => {
                        let rho = (ln_abs - p).exp();
                        rho < 1.0 && mag * rho / (1.0 - rho) <= threshold
                    }
                    None => true,
                };
                mag <= threshold && tail_ok
            }
        };
        prev_ln = ln_t;
        small_run = if small { small_run + 1 } else { 0 };

        let used = k + 1;
        if used >= ctrl.min_terms && small_run >= ctrl.consecutive_small {
            let sign = if sum == 0.0 { 0.0 } else { sum.signum() };
            let log_value = if sum == 0.0 {
                f64::NEG_INFINITY
            } else {
                sum.abs().ln() + scale
            };
            let value = if scale == 0.0 { sum } else { sign * log_value.exp() };
            return Ok(SeriesResult {
                value,
                log_value,
                sign,
                terms_used: used,
                converged: true,
                max_log_term,
                method: Evaluation::Series,
            });
        }
    }
    Err(Error::non_convergence(what, ctrl.max_terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_fact(k: usize) -> f64 {
        (1..=k).map(|j| (j as f64).ln()).sum()
    }

    #[test]
    fn exponential_series() {
        let ctrl = SeriesControl::default();
        for &z in &[0.5f64, 1.0, 3.0, -1.0, 10.0] {
            let r = sum_log_terms("exp", &ctrl, |k| {
                if z == 0.0 && k > 0 {
                    return Ok(Term::Zero);
                }
                let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                Ok(Term::Value {
                    sign,
                    ln_abs: k as f64 * z.abs().ln() - ln_fact(k),
                })
            })
            .unwrap();
            assert!(((r.value - z.exp()) / z.exp()).abs() < 1e-14, "z={z}: {}", r.value);
        }
    }

    #[test]
    fn all_zero_series_is_zero() {
        let r = sum_log_terms("zero", &SeriesControl::default(), |_| Ok(Term::Zero)).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.sign, 0.0);
        assert_eq!(r.terms_used, 8);
    }

    #[test]
    fn huge_terms_are_rescaled() {
        // Σ e^{1000} / 2^k = 2 e^{1000}
        let r = sum_log_terms("big", &SeriesControl::default(), |k| {
            Ok(Term::Value {
                sign: 1.0,
                ln_abs: 1000.0 - k as f64 * std::f64::consts::LN_2,
            })
        })
        .unwrap();
        assert!((r.log_value - (1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(r.value.is_infinite());
    }

    #[test]
    fn slow_geometric_tail_is_not_cut_early() {
        // Σ 0.999^k = 1000; the per-term test alone would stop ~3 orders early.
        let r = sum_log_terms("geom", &SeriesControl::default().with_max_terms(100_000).unwrap(), |k| {
            Ok(Term::Value {
                sign: 1.0,
                ln_abs: k as f64 * 0.999f64.ln(),
            })
        })
        .unwrap();
        assert!((r.value - 1000.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn divergent_series_errors() {
        let err = sum_log_terms("div", &SeriesControl::default(), |k| {
            Ok(Term::Value {
                sign: 1.0,
                ln_abs: k as f64 * 0.1,
            })
        })
        .unwrap_err();
        assert!(err.is_non_convergence());
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0.0, 8, 100, 3).is_err());
        assert!(SeriesControl::new(1.0, 8, 100, 3).is_err());
        assert!(SeriesControl::new(1e-10, 0, 100, 3).is_err());
        assert!(SeriesControl::new(1e-10, 200, 100, 3).is_err());
        assert!(SeriesControl::new(1e-10, 8, 100, 3).is_ok());
    }
}
