use rieffel_deform::oracle::{calibrate_twist, compare_goldens, embedded_goldens, integrate, Integrand, QuadratureConfig};
use rieffel_deform::smoothing::{smoothing_multiplier, wick_multiplier};
use rieffel_deform::{Complex64, DeformationData, LatticeIndex};

#[test]
fn embedded_goldens_match_closed_forms() {
    let goldens = embedded_goldens().unwrap();
    assert_eq!(goldens.len(), 2809);
    let report = compare_goldens(&goldens);
    assert!(report.pass, "{:?}", report.failures().next());
}

#[test]
fn live_quadrature_matches_closed_forms() {
    let cfg = QuadratureConfig::default();
    let data = DeformationData::standard(1, 0.7).unwrap();
    let k = LatticeIndex::from([2, -1]);
    let smooth = integrate(&Integrand::SmoothOnMode { data: data.clone(), k: k.clone() }, &cfg).unwrap();
    assert!(smooth.converged);
    assert!((smooth.value - Complex64::new(smoothing_multiplier(&data, &k), 0.0)).norm() < 1e-10);

    let wick = integrate(&Integrand::WickMoment { data: data.clone(), k: k.clone(), multi_index: vec![2] }, &cfg).unwrap();
    let expected = wick_multiplier(&data, &k, &[2]).unwrap();
    assert!((wick.value - expected).norm() <= 1e-6 * expected.norm());
}

#[test]
fn twist_calibration_on_a_scaled_metric() {
    let cfg = QuadratureConfig::default();
    let data = DeformationData::standard(1, 0.5).unwrap();
    let report = calibrate_twist(&cfg, &data);
    assert!(report.pass, "{:?}", report.failures().next());
}
