//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::process::ExitCode;

use rieffel_deform::cli::run_with;
use rieffel_deform::oracle::{embedded_goldens, generate_goldens, render_goldens, QuadratureConfig, STAR_ROOT_HBARS, STAR_ROOT_POINTS};
use rieffel_deform::smoothing::star_root_check;
use rieffel_deform::suites::{
    field_suite, norm_reports, oracle_suite, product_suite, smoothing_suite, states_suite, wick_suite,
};
use rieffel_deform::{DeformationData, VerificationReport};

const SEED: u64 = 20240611;

fn pick(reports: &[VerificationReport], names: &[&str]) -> Vec<VerificationReport> {
    names
        .iter()
        .map(|n| reports.iter().find(|r| r.check == *n).unwrap_or_else(|| panic!("missing check {n}")).clone())
        .collect()
}

fn summarize(reports: &[VerificationReport]) -> (bool, String) {
    let pass = reports.iter().all(|r| r.pass);
    let detail = reports
        .iter()
        .map(|r| {
            let failed = r.failures().count();
            if failed == 0 {
                format!("{} ok ({} cases)", r.check, r.cases.len())
            } else {
                let worst = r.failures().map(|c| c.abs_err).fold(0.0, f64::max);
                format!("{} FAILED {failed}/{} (worst error {worst:.3e})", r.check, r.cases.len())
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    (pass, detail)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("rieffel").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn reproducibility() -> (bool, String) {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut notes = Vec::new();
    let mut pass = true;
    for (cmd, ext) in [("scan", "csv"), ("norms", "json")] {
        let (a, b) = (path(&format!("{cmd}1.{ext}")), path(&format!("{cmd}2.{ext}")));
        let c1 = run_cli(&[cmd, "--seed", "5", "--out", &a]).0;
        let c2 = run_cli(&[cmd, "--seed", "5", "--out", &b]).0;
        let same = c1 == 0 && c2 == 0 && std::fs::read(&a).ok() == std::fs::read(&b).ok();
        notes.push(format!("{cmd} identical={same}"));
        pass &= same;
    }
    let (a, b) = (path("product1.json"), path("product2.json"));
    let c1 = run_cli(&["verify", "product", "--seed", "9", "--out", &a]).0;
    let c2 = run_cli(&["verify", "product", "--seed", "9", "--out", &b]).0;
    let same = c1 == 0 && c2 == 0 && std::fs::read(&a).ok() == std::fs::read(&b).ok();
    notes.push(format!("verify product identical={same}"));
    pass &= same;

    let goldens = embedded_goldens().expect("embedded goldens");
    let first = serde_json::to_string(&oracle_suite(&goldens)).unwrap();
    let second = serde_json::to_string(&oracle_suite(&goldens)).unwrap();
    let regenerated = generate_goldens(&QuadratureConfig::default()).expect("quadrature");
    let frozen = render_goldens(&regenerated) == render_goldens(&goldens);
    notes.push(format!("golden comparison stable={} regenerated goldens identical={frozen}", first == second));
    pass &= first == second && frozen;
    (pass, notes.join("; "))
}

fn main() -> ExitCode {
    let data = DeformationData::standard(1, 0.5).expect("standard data");
    let goldens = embedded_goldens().expect("embedded goldens");

    let mut results: Vec<(usize, &str, (bool, String))> = Vec::new();

    let product = product_suite(&data, SEED).expect("product suite");
    results.push((1, "product correctness", summarize(&pick(&product, &["associativity", "involution_antihomomorphism", "twist_cocycle"]))));

    let mut oracle = vec![oracle_suite(&goldens)];
    let samples: Vec<Vec<f64>> = STAR_ROOT_POINTS.iter().map(|w| w.to_vec()).collect();
    for hbar in STAR_ROOT_HBARS {
        oracle.push(star_root_check(&data.with_hbar(hbar).unwrap(), &samples, &QuadratureConfig::default()));
    }
    results.push((2, "oracle agreement", summarize(&oracle)));

    let wick = wick_suite(&data, SEED).expect("wick suite");
    results.push((3, "wick-series identity", summarize(&pick(&wick, &["wick_series", "wick_single_mode"]))));

    let states = states_suite(&data, SEED).expect("states suite");
    results.push((4, "state positivity", summarize(&pick(&states, &["deformed_positivity", "deformed_unit", "matrix_positivity"]))));

    let smoothing = smoothing_suite(&data, SEED).expect("smoothing suite");
    results.push((5, "asymptotic expansion", summarize(&pick(&smoothing, &["expansion_remainder", "smooth_derivative", "derivative_order"]))));

    let field = field_suite(&data, SEED).expect("field suite");
    results.push((6, "continuous field of states", summarize(&pick(&field, &["scan_jump_halving", "scan_classical_endpoint", "smoothing_continuity"]))));

    let norms = norm_reports(&data, SEED).expect("norm brackets");
    results.push((7, "norm brackets", summarize(&pick(&norms, &["norm_single_modes", "norm_monotone", "norm_classical_limit"]))));

    results.push((8, "reproducibility", reproducibility()));

    let mut all = true;
    for (id, name, (pass, detail)) in &results {
        all &= pass;
        println!("{} criterion {id} ({name}): {detail}", if *pass { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
