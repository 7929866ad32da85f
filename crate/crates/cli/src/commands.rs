use serde_json::json;
use wright_poisson::distribution::SPREAD_LIMIT;
use wright_poisson::estimation::{fit_full, fit_m, load_counts, Column, FullFitOptions};
use wright_poisson::{FitProfile, FitResult, SeriesControl, WrightPoisson};

use crate::args::{Command, FitMode, Params};
use crate::output::{format_sig, Format, Report, TABLE_DIGITS};
use crate::{check, CliError, Exit, Outcome};

pub fn dispatch(command: &Command, ctrl: &SeriesControl, format: Format) -> Result<Outcome, CliError> {
    match command {
        Command::Pmf { params, r_max } => pmf(params, *r_max, ctrl),
        Command::Moments { params } => moments(params, ctrl),
        Command::Mgf { params, t } => mgf(params, t, ctrl),
        Command::Sample { params, n, seed } => sample(params, *n, *seed, ctrl, format),
        Command::Fit {
            path,
            column,
            mode,
            alpha,
            beta,
            shape_min,
            shape_max,
        } => {
            let column = column.as_deref().map(Column::parse);
            let data = load_counts(path, column.as_ref())?;
            let fit = match mode {
                FitMode::MOnly => {
                    let (Some(a), Some(b)) = (alpha, beta) else {
                        return Err(CliError::Input("--mode m-only requires --alpha and --beta".into()));
                    };
                    fit_m(&data, *a, *b, ctrl)?
                }
                FitMode::Full => {
                    let opts = FullFitOptions {
                        shape_lower: *shape_min,
                        shape_upper: *shape_max,
                        ..FullFitOptions::default()
                    };
                    fit_full(&data, ctrl, &opts)?
                }
            };
            Ok(fit_outcome(&fit, data.n, data.mean()))
        }
        Command::Check { grid_size, tolerance } => check::run(*grid_size, *tolerance, ctrl),
    }
}

fn build(params: &Params, ctrl: &SeriesControl) -> Result<WrightPoisson, CliError> {
    Ok(WrightPoisson::new(params.alpha, params.beta, params.m, *ctrl)?)
}

fn pmf(params: &Params, r_max: u64, ctrl: &SeriesControl) -> Result<Outcome, CliError> {
    let d = build(params, ctrl)?;
    let mut report = Report::new(vec!["r", "pmf", "cdf"]);
    let mut cdf = 0.0;
    for r in 0..=r_max {
        let p = d.pmf(r);
        cdf += p;
        report.push(vec![r.into(), p.into(), cdf.into()]);
    }
    report
        .notes
        .push(format!("# cdf({r_max}) = {}", format_sig(cdf, TABLE_DIGITS)));
    Ok(Outcome::ok(report))
}

fn moments(params: &Params, ctrl: &SeriesControl) -> Result<Outcome, CliError> {
    let d = build(params, ctrl)?;
    let rep = d.moment_report()?;
    let mut report = Report::new(vec!["quantity", "method", "value"]);
    let rows: [(&str, &str, f64); 8] = [
        ("mean", "series", rep.mean_series),
        ("mean", "closed_i", rep.mean_closed_i),
        ("mean", "closed_ii", rep.mean_closed_ii),
        ("second_moment", "series", rep.m2_series),
        ("second_moment", "closed_i", rep.m2_closed_i),
        ("second_moment", "closed_ii", rep.m2_closed_ii),
        ("variance", "series", rep.variance),
        ("max_method_spread", "all", rep.max_method_spread),
    ];
    for (q, m, v) in rows {
        report.push(vec![q.into(), m.into(), v.into()]);
    }
    report.json = Some(json!({
        "alpha": d.alpha(),
        "beta": d.beta(),
        "m": d.m(),
        "mean_series": rep.mean_series,
        "mean_closed_i": rep.mean_closed_i,
        "mean_closed_ii": rep.mean_closed_ii,
        "m2_series": rep.m2_series,
        "m2_closed_i": rep.m2_closed_i,
        "m2_closed_ii": rep.m2_closed_ii,
        "variance": rep.variance,
        "max_method_spread": rep.max_method_spread,
        "consistent": rep.consistent(),
    }));
    if rep.consistent() {
        return Ok(Outcome::ok(report));
    }
    Ok(Outcome {
        report,
        exit: Exit::MethodDisagreement,
        message: Some(format!(
            "moment methods disagree: spread {:e} exceeds {SPREAD_LIMIT:e}",
            rep.max_method_spread
        )),
    })
}

fn mgf(params: &Params, ts: &[f64], ctrl: &SeriesControl) -> Result<Outcome, CliError> {
    let d = build(params, ctrl)?;
    let mut report = Report::new(vec!["t", "mgf"]);
    for &t in ts {
        if !t.is_finite() {
            return Err(CliError::Input(format!("t must be finite, got {t}")));
        }
        report.push(vec![t.into(), d.mgf(t)?.into()]);
    }
    Ok(Outcome::ok(report))
}

fn sample(params: &Params, n: usize, seed: u64, ctrl: &SeriesControl, format: Format) -> Result<Outcome, CliError> {
    let d = build(params, ctrl)?;
    let batch = d.sample(n, seed)?;
    let (mean, variance) = (batch.mean(), batch.variance());
    let summary = format!(
        "# n = {n}, seed = {seed}, mean = {}, variance = {}",
        format_sig(mean, TABLE_DIGITS),
        format_sig(variance, TABLE_DIGITS)
    );
    let mut report = Report::new(vec!["value"]);
    for &v in &batch.values {
        report.push(vec![v.into()]);
    }
    report.json = Some(json!({
        "seed": seed,
        "n": n,
        "mean": mean,
        "variance": variance,
        "values": batch.values,
    }));
    report.notes.push(summary.clone());
    Ok(Outcome {
        report,
        exit: Exit::Ok,
        // keeps CSV output to the header plus values
        message: (format == Format::Csv).then_some(summary),
    })
}

fn fit_outcome(fit: &FitResult, n: usize, sample_mean: f64) -> Outcome {
    let profile = match fit.profile {
        FitProfile::MOnly => "m_only",
        FitProfile::Full => "full",
    };
    let mut report = Report::new(vec![
        "alpha",
        "beta",
        "m",
        "log_likelihood",
        "iterations",
        "converged",
        "at_boundary",
        "profile",
        "n",
        "sample_mean",
    ]);
    report.push(vec![
        fit.alpha.into(),
        fit.beta.into(),
        fit.m.into(),
        fit.log_likelihood.into(),
        fit.iterations.into(),
        fit.converged.into(),
        fit.at_boundary.into(),
        profile.into(),
        n.into(),
        sample_mean.into(),
    ]);
    let mut obj = serde_json::to_value(fit).expect("FitResult serializes");
    obj["n"] = json!(n);
    obj["sample_mean"] = json!(sample_mean);
    report.json = Some(obj);
    if fit.converged {
        Outcome::ok(report)
    } else {
        Outcome {
            report,
            exit: Exit::NonConvergence,
            message: Some("fit did not converge".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Cell;

    fn params(alpha: f64, beta: f64, m: f64) -> Params {
        Params { alpha, beta, m }
    }

    #[test]
    fn pmf_rows_are_classical() {
        let out = pmf(&params(1.0, 1.0, 1.0), 2, &SeriesControl::default()).unwrap();
        let e = std::f64::consts::E.recip();
        let want = [e, e, e / 2.0];
        for (row, w) in out.report.rows.iter().zip(want) {
            let Cell::Float(p) = row[1] else { panic!() };
            assert!((p - w).abs() < 1e-16);
        }
    }

    #[test]
    fn bad_m_is_an_input_error() {
        let err = pmf(&params(1.0, 1.0, -1.0), 2, &SeriesControl::default()).unwrap_err();
        assert_eq!(err.exit(), Exit::BadInput);
        assert!(err.to_string().contains("m must be > 0"));
    }

    #[test]
    fn moments_consistent_for_classical() {
        let out = moments(&params(1.0, 1.0, 3.0), &SeriesControl::default()).unwrap();
        assert_eq!(out.exit, Exit::Ok);
        let v = out.report.json.unwrap();
        assert!((v["mean_closed_ii"].as_f64().unwrap() - 3.0).abs() < 1e-12);
        assert!((v["variance"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn loose_series_tolerance_is_flagged_as_disagreement() {
        let ctrl = SeriesControl::default().with_rel_tol(0.5).unwrap();
        let out = moments(&params(0.5, 0.5, 5.0), &ctrl).unwrap();
        assert_eq!(out.exit, Exit::MethodDisagreement);
    }
}
