//! The generalized Wright function `pΨq`.

use serde::{Deserialize, Serialize};

use super::gamma::{log_gamma_signed, LogGamma};
use super::series::{sum_log_terms, SeriesControl, SeriesResult, Term};
use crate::error::{Error, Result};

/// One gamma factor `Γ(offset + weight·k)` of a Wright series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPair {
    pub offset: f64,
    pub weight: f64,
}

impl GammaPair {
    pub const fn new(offset: f64, weight: f64) -> Self {
        GammaPair { offset, weight }
    }

    fn at(&self, k: usize) -> f64 {
        self.offset + self.weight * k as f64
    }
}

impl From<(f64, f64)> for GammaPair {
    fn from((offset, weight): (f64, f64)) -> Self {
        GammaPair { offset, weight }
    }
}

/// Parameters `((a_i, α_i))`, `((b_j, β_j))` and argument `z` of `pΨq`:
///
/// `Σ_k ∏ Γ(a_i + α_i k) / ∏ Γ(b_j + β_j k) · z^k / k!`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrightSpec {
    pub upper: Vec<GammaPair>,
    pub lower: Vec<GammaPair>,
    pub z: f64,
}

impl WrightSpec {
    pub fn new<U, L>(upper: U, lower: L, z: f64) -> Result<Self>
    where
        U: IntoIterator,
        U::Item: Into<GammaPair>,
        L: IntoIterator,
        L::Item: Into<GammaPair>,
    {
        let spec = WrightSpec {
            upper: upper.into_iter().map(Into::into).collect(),
            lower: lower.into_iter().map(Into::into).collect(),
            z,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.z.is_finite() {
            return Err(Error::domain(format!("Wright argument z must be finite, got {}", self.z)));
        }
        for p in self.upper.iter().chain(&self.lower) {
            if !p.offset.is_finite() || !p.weight.is_finite() {
                return Err(Error::domain(format!(
                    "Wright parameters must be finite, got ({}, {})",
                    p.offset, p.weight
                )));
            }
        }
        if let Some(p) = self.lower.iter().find(|p| p.weight <= 0.0) {
            return Err(Error::domain(format!(
                "lower Wright weights must be > 0, got {}",
                p.weight
            )));
        }
        Ok(())
    }

    /// `ln |t_k|` and sign of the k-th term.
    pub fn term(&self, k: usize) -> Result<Term> {
        if self.z == 0.0 && k > 0 {
            return Ok(Term::Zero);
        }
        let mut sign = 1.0;
        let mut ln_abs = 0.0;
        for p in &self.lower {
            match log_gamma_signed(p.at(k)) {
                LogGamma::Pole => return Ok(Term::Zero),
                LogGamma::Value { sign: s, ln_abs: l } => {
                    sign *= s;
                    ln_abs -= l;
                }
            }
        }
        for p in &self.upper {
            match log_gamma_signed(p.at(k)) {
                LogGamma::Pole => {
                    return Err(Error::domain(format!(
                        "upper gamma argument {} of term {k} is a pole",
                        p.at(k)
                    )))
                }
                LogGamma::Value { sign: s, ln_abs: l } => {
                    sign *= s;
                    ln_abs += l;
                }
            }
        }
        if k > 0 {
            ln_abs += k as f64 * self.z.abs().ln();
            if self.z < 0.0 && k % 2 == 1 {
                sign = -sign;
            }
            if let LogGamma::Value { ln_abs: l, .. } = log_gamma_signed(k as f64 + 1.0) {
                ln_abs -= l;
            }
        }
        Ok(Term::Value { sign, ln_abs })
    }
}

/// `Δ = Σ β_j − Σ α_i`; the series is entire for `Δ > −1`.
pub fn wright_convergence_index(spec: &WrightSpec) -> f64 {
    spec.lower.iter().map(|p| p.weight).sum::<f64>() - spec.upper.iter().map(|p| p.weight).sum::<f64>()
}

pub fn wright_series(spec: &WrightSpec, ctrl: &SeriesControl) -> Result<SeriesResult> {
    spec.validate()?;
    let delta = wright_convergence_index(spec);
    if delta <= -1.0 {
        log::warn!(
            "Wright series with convergence index {delta} <= -1 is not entire; summation may diverge"
        );
    }
    sum_log_terms("Wright series", ctrl, |k| spec.term(k))
}
