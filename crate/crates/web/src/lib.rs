//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string. The same
//! computations are available natively through [`pmf_curve`], [`moments`] and
//! [`mgf_curve`] so they can be tested without a browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use wright_poisson::{MomentReport, SeriesControl, WrightPoisson};

/// Longest pmf table the page will request.
pub const MAX_POINTS: u64 = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfCurve {
    pub r: Vec<u64>,
    pub pmf: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Smallest r past which the remaining mass is negligible.
    pub mass_cutoff: u64,
    pub mode: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    #[serde(flatten)]
    pub report: MomentReport,
    pub consistent: bool,
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfCurve {
    pub t: Vec<f64>,
    pub mgf: Vec<f64>,
}

fn law(alpha: f64, beta: f64, m: f64) -> Result<WrightPoisson, String> {
    WrightPoisson::new(alpha, beta, m, SeriesControl::default()).map_err(|e| e.to_string())
}

/// pmf and cdf for `r = 0..=r_max`; `r_max = 0` means up to the mass cutoff.
pub fn pmf_curve(alpha: f64, beta: f64, m: f64, r_max: u64) -> Result<PmfCurve, String> {
    let d = law(alpha, beta, m)?;
    let mass_cutoff = d.mass_cutoff().map_err(|e| e.to_string())?;
    let last = if r_max == 0 { mass_cutoff } else { r_max }.min(MAX_POINTS);
    let r: Vec<u64> = (0..=last).collect();
    let pmf: Vec<f64> = r.iter().map(|&r| d.pmf(r)).collect();
    let cdf = pmf
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let mode = pmf
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i as u64, p) } else { best })
        .0;
    Ok(PmfCurve {
        r,
        pmf,
        cdf,
        mass_cutoff,
        mode,
    })
}

pub fn moments(alpha: f64, beta: f64, m: f64) -> Result<MomentSummary, String> {
    let report = law(alpha, beta, m)?.moment_report().map_err(|e| e.to_string())?;
    Ok(MomentSummary {
        consistent: report.consistent(),
        std_dev: report.variance.max(0.0).sqrt(),
        report,
    })
}

/// The MGF at `points` evenly spaced values of `t` in `[t_min, t_max]`.
pub fn mgf_curve(alpha: f64, beta: f64, m: f64, t_min: f64, t_max: f64, points: usize) -> Result<MgfCurve, String> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(format!("need finite t_min < t_max, got [{t_min}, {t_max}]"));
    }
    if !(2..=MAX_POINTS as usize).contains(&points) {
        return Err(format!("points must be in [2, {MAX_POINTS}], got {points}"));
    }
    let d = law(alpha, beta, m)?;
    let step = (t_max - t_min) / (points - 1) as f64;
    let t: Vec<f64> = (0..points).map(|i| t_min + step * i as f64).collect();
    let mgf = t.iter().map(|&t| d.mgf(t)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    Ok(MgfCurve { t, mgf })
}

fn to_js<T: Serialize>(v: Result<T, String>) -> Result<String, JsError> {
    let v = v.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = pmfCurve)]
pub fn pmf_curve_js(alpha: f64, beta: f64, m: f64, r_max: u32) -> Result<String, JsError> {
    to_js(pmf_curve(alpha, beta, m, r_max.into()))
}

#[wasm_bindgen(js_name = moments)]
pub fn moments_js(alpha: f64, beta: f64, m: f64) -> Result<String, JsError> {
    to_js(moments(alpha, beta, m))
}

#[wasm_bindgen(js_name = mgfCurve)]
pub fn mgf_curve_js(alpha: f64, beta: f64, m: f64, t_min: f64, t_max: f64, points: u32) -> Result<String, JsError> {
    to_js(mgf_curve(alpha, beta, m, t_min, t_max, points as usize))
}
