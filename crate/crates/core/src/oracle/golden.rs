//! Frozen quadrature results over the calibration grid.
//!
//! The file is a JSON array with one entry per line so that diffs after a
//! recalibration stay readable.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{box_indices, integrate, Integrand, QuadratureConfig};
use crate::error::{DeformError, Result};
use crate::field::gauss_l2_norm_sqr;
use crate::frame::{DeformationData, Metric, SymplecticForm};
use crate::lattice::{FourierElement, LatticeIndex};
use crate::product::{star_product, TwistCocycle};
use crate::report::VerificationReport;
use crate::smoothing::{smooth, smoothing_multiplier, star_root_value, wick_multiplier};

const EMBEDDED: &str = include_str!("../../goldens/oracle.json");

pub const CALIBRATION_HBARS: [f64; 3] = [0.1, 0.5, 1.0];
pub const STAR_ROOT_HBARS: [f64; 2] = [0.5, 1.0];
pub const STAR_ROOT_POINTS: [[f64; 2]; 7] = [
    [0.0, 0.0],
    [0.3, -0.2],
    [0.5, 0.5],
    [-0.7, 0.2],
    [1.0, 0.0],
    [0.0, -1.2],
    [6.0, 6.0],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub kind: String,
    pub params: Value,
    pub value: [f64; 2],
    pub err: f64,
}

impl GoldenEntry {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

pub fn default_golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("goldens").join("oracle.json")
}

/// Goldens compiled into the library.
pub fn embedded_goldens() -> Result<Vec<GoldenEntry>> {
    parse(EMBEDDED)
}

pub fn load_goldens(path: &Path) -> Result<Vec<GoldenEntry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DeformError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn parse(text: &str) -> Result<Vec<GoldenEntry>> {
    serde_json::from_str(text).map_err(|e| DeformError::InvalidArgument(format!("golden file: {e}")))
}

/// Serialized golden file, one entry per line.
pub fn render_goldens(entries: &[GoldenEntry]) -> String {
    let mut out = String::from("[\n");
    for (i, e) in entries.iter().enumerate() {
        out.push_str(&serde_json::to_string(e).expect("serializable"));
        out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

pub fn write_goldens(path: &Path, entries: &[GoldenEntry]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| DeformError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, render_goldens(entries))
        .map_err(|e| DeformError::Io(format!("{}: {e}", path.display())))
}

fn metrics() -> Vec<Metric> {
    vec![
        Metric::identity(2),
        Metric::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25])).expect("positive definite"),
    ]
}

fn data_for(g: &Metric, hbar: f64) -> DeformationData {
    DeformationData::new(SymplecticForm::standard(1), g.clone(), hbar).expect("compatible")
}

/// Every integrand of the calibration grid, in file order.
pub fn calibration_integrands() -> Vec<Integrand> {
    let mut out = Vec::new();
    let modes = box_indices(2);
    for g in metrics() {
        for hbar in CALIBRATION_HBARS {
            let data = data_for(&g, hbar);
            for k in &modes {
                out.push(Integrand::SmoothOnMode { data: data.clone(), k: k.clone() });
            }
            for k in &modes {
                for l in 0..=3 {
                    out.push(Integrand::WickMoment { data: data.clone(), k: k.clone(), multi_index: vec![l] });
                }
            }
            for k in &modes {
                out.push(Integrand::DoubleGaussian { data: data.clone(), k: k.clone() });
            }
            out.push(Integrand::GaussL2 { data: data.clone() });
        }
        for hbar in STAR_ROOT_HBARS {
            let data = data_for(&g, hbar);
            for w in STAR_ROOT_POINTS {
                out.push(Integrand::GaussStarGauss { data: data.clone(), point: w.to_vec() });
            }
        }
    }
    // The product integral does not involve the metric.
    for hbar in CALIBRATION_HBARS {
        let data = DeformationData::standard(1, hbar).expect("standard");
        for k in &modes {
            for l in &modes {
                out.push(Integrand::StarOnModes { data: data.clone(), k: k.clone(), l: l.clone() });
            }
        }
    }
    out
}

/// Runs the quadrature over the calibration grid.
pub fn generate_goldens(cfg: &QuadratureConfig) -> Result<Vec<GoldenEntry>> {
    let integrands = calibration_integrands();
    integrands
        .par_iter()
        .map(|it| {
            let r = integrate(it, cfg)?;
            Ok(GoldenEntry {
                kind: it.kind().to_string(),
                params: it.params(),
                value: [r.value.re, r.value.im],
                err: r.error_estimate,
            })
        })
        .collect()
}

fn param_data(params: &Value) -> Result<DeformationData> {
    let bad = || DeformError::InvalidArgument(format!("malformed golden params: {params}"));
    let n = params["n"].as_u64().ok_or_else(bad)? as usize;
    let hbar = params["hbar"].as_f64().ok_or_else(bad)?;
    let rows: Vec<Vec<f64>> = serde_json::from_value(params["g"].clone()).map_err(|_| bad())?;
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if flat.len() != 4 * n * n {
        return Err(bad());
    }
    let g = Metric::new(DMatrix::from_row_slice(2 * n, 2 * n, &flat))?;
    DeformationData::new(SymplecticForm::standard(n), g, hbar)
}

fn param_index(params: &Value, key: &str) -> Result<LatticeIndex> {
    serde_json::from_value(params[key].clone())
        .map_err(|_| DeformError::InvalidArgument(format!("golden params lack `{key}`: {params}")))
}

/// Closed-form value and tolerance for a golden entry.
fn closed_form(entry: &GoldenEntry) -> Result<(Complex64, f64)> {
    let p = &entry.params;
    let data = param_data(p)?;
    let rel = |v: Complex64, tol: f64| (v, tol * v.norm() + 1e-12);
    match entry.kind.as_str() {
        "smooth_on_mode" => {
            let k = param_index(p, "k")?;
            Ok(rel(Complex64::new(smoothing_multiplier(&data, &k), 0.0), 1e-6))
        }
        "wick_moment" => {
            let k = param_index(p, "k")?;
            let l: Vec<usize> = serde_json::from_value(p["L"].clone())
                .map_err(|_| DeformError::InvalidArgument(format!("golden params lack `L`: {p}")))?;
            Ok(rel(wick_multiplier(&data, &k, &l)?, 1e-6))
        }
        "star_on_modes" => {
            let k = param_index(p, "k")?;
            let l = param_index(p, "l")?;
            Ok(rel(TwistCocycle::new(&data).phase(&k, &l), 1e-6))
        }
        "gauss_l2" => Ok(rel(Complex64::new(gauss_l2_norm_sqr(&data)?, 0.0), 1e-6)),
        "gauss_star_gauss" => {
            let w: Vec<f64> = serde_json::from_value(p["w"].clone())
                .map_err(|_| DeformError::InvalidArgument(format!("golden params lack `w`: {p}")))?;
            let v = star_root_value(&data, &w)?;
            // Far-tail points: both sides below 1e-8 count as agreement.
            Ok((Complex64::new(v, 0.0), (1e-4 * v).max(1e-8)))
        }
        "double_gaussian" => {
            let k = param_index(p, "k")?;
            let ek = FourierElement::mode(data.dim(), k);
            let direct = smooth(&data, &star_product(&data, &ek.involution(), &ek)?)?;
            Ok((direct.coeff(&LatticeIndex::zero(2 * data.dim())), 1e-4))
        }
        other => Err(DeformError::InvalidArgument(format!("unknown golden kind `{other}`"))),
    }
}

/// Compares the closed forms used by the library with frozen quadrature.
pub fn compare_goldens(entries: &[GoldenEntry]) -> VerificationReport {
    let mut report = VerificationReport::new("oracle_goldens");
    if entries.is_empty() {
        report.pass = false;
        report.note("no golden entries");
    }
    for e in entries {
        let input = json!({"kind": e.kind, "params": e.params});
        match closed_form(e) {
            Ok((expected, tol)) => {
                report.compare(input, expected, e.value(), tol);
            }
            Err(err) => {
                report.pass = false;
                report.note(format!("{}: {err}", e.kind));
            }
        }
    }
    report
}
