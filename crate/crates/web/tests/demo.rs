use wright_poisson_web::{mgf_curve, moments, pmf_curve, MAX_POINTS};

#[test]
fn classical_pmf_curve() {
    let c = pmf_curve(1.0, 1.0, 3.0, 0).unwrap();
    assert_eq!(c.r.len() as u64, c.mass_cutoff + 1);
    assert!((c.pmf[2] - 4.5 * (-3.0f64).exp()).abs() < 1e-15);
    assert!((c.cdf.last().unwrap() - 1.0).abs() < 1e-12);
    // Poisson(3) has modes at 2 and 3; ties go to the first
    assert!(c.mode == 2 || c.mode == 3);
}

#[test]
fn pmf_curve_is_capped_and_explicit_length_is_honoured() {
    assert_eq!(pmf_curve(0.5, 1.0, 5.0, 10).unwrap().r.len(), 11);
    assert_eq!(pmf_curve(1.0, 1.0, 1.0, 1_000_000).unwrap().r.len() as u64, MAX_POINTS + 1);
}

#[test]
fn moments_agree_and_serialize_flat() {
    let s = moments(2.0, 1.0, 1.0).unwrap();
    assert!(s.consistent);
    assert!((s.std_dev * s.std_dev - s.report.variance).abs() < 1e-15);
    let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert!(v["mean_series"].is_f64());
    assert_eq!(v["consistent"], true);
}

#[test]
fn mgf_curve_passes_through_one_at_zero() {
    let c = mgf_curve(1.5, 0.5, 2.0, -1.0, 1.0, 21).unwrap();
    assert_eq!(c.t.len(), 21);
    assert!((c.mgf[10] - 1.0).abs() < 1e-14);
    assert!(c.mgf.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn bad_input_is_reported() {
    assert!(pmf_curve(1.0, 1.0, -1.0, 5).unwrap_err().contains("m must be > 0"));
    assert!(mgf_curve(1.0, 1.0, 1.0, 1.0, -1.0, 10).is_err());
    assert!(mgf_curve(1.0, 1.0, 1.0, -1.0, 1.0, 1).is_err());
}
