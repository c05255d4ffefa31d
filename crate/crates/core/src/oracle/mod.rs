//! Independent quadrature of the integral formulas that the closed forms in
//! [`crate::product`] and [`crate::smoothing`] replace.
//!
//! Every integrand is Gaussian × trigonometric (× polynomial). After a
//! linear substitution that turns the Gaussian into `e^{−|x|²}` the integral
//! is evaluated by tensor Gauss–Hermite quadrature, doubling the order until
//! two successive values agree to `target_tol`.
//!
//! Two kinds are not absolutely convergent and are evaluated on a damped
//! version, `e^{−ε(|u|² + |v|²)/ℏ}`, for each `ε` of a decreasing schedule and
//! extrapolated to `ε = 0` by polynomial (Neville) extrapolation:
//!
//! * `StarOnModes` — the oscillatory product integral on two characters.
//!   Each pair of coupled coordinates is rotated onto its steepest-descent
//!   line so that the damped integrand becomes an ordinary Gaussian.
//! * `DoubleGaussian` — the smoothed square `S_ℏ(e_k* ⋆ e_k)` written as a
//!   single integral over `V × V`. Its real Gaussian part is only
//!   semidefinite; the square is completed in the degenerate direction.

mod golden;
mod hermite;

pub use golden::{
    calibration_integrands, compare_goldens, default_golden_path, embedded_goldens,
    generate_goldens, load_goldens, render_goldens, write_goldens, GoldenEntry, CALIBRATION_HBARS,
    STAR_ROOT_HBARS, STAR_ROOT_POINTS,
};
pub use hermite::{trapezoid_tensor, GaussHermite, MAX_ORDER};

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{DeformError, Result};
use crate::frame::DeformationData;
use crate::lattice::LatticeIndex;
use crate::product::TwistCocycle;
use crate::report::VerificationReport;

/// Default damping schedule for the regularized kinds.
pub const DEFAULT_EPSILON_SCHEDULE: [f64; 6] = [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Initial Gauss–Hermite order per axis.
    pub order: usize,
    /// Half-width of the box used by the trapezoid fallback.
    pub box_radius: f64,
    pub target_tol: f64,
    /// How many times the order may be doubled.
    pub max_refinements: usize,
    /// Damping parameters for the regularized kinds, strictly decreasing.
    pub epsilon_schedule: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            order: 16,
            box_radius: 8.0,
            target_tol: 1e-10,
            max_refinements: 4,
            epsilon_schedule: DEFAULT_EPSILON_SCHEDULE.to_vec(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 8 || self.order > MAX_ORDER {
            return Err(DeformError::InvalidArgument(format!(
                "quadrature order must be in 8..={MAX_ORDER}, got {}",
                self.order
            )));
        }
        if !(self.target_tol >= 1e-10) {
            return Err(DeformError::InvalidArgument(format!(
                "target_tol must be at least 1e-10, got {}",
                self.target_tol
            )));
        }
        if !(self.box_radius > 0.0) {
            return Err(DeformError::InvalidArgument("box_radius must be positive".into()));
        }
        let eps = &self.epsilon_schedule;
        if eps.len() < 2
            || eps.iter().any(|&e| !(e > 0.0))
            || eps.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(DeformError::InvalidArgument(
                "epsilon schedule needs at least two positive, strictly decreasing values".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Integrand {
    /// `∫ G_ℏ(u) e^{ik·u} du`, the multiplier of the smoothing operator.
    SmoothOnMode { data: DeformationData, k: LatticeIndex },
    /// Coefficient of `e_{k+l}` in the oscillatory product of `e_k` and `e_l`.
    StarOnModes {
        data: DeformationData,
        k: LatticeIndex,
        l: LatticeIndex,
    },
    /// Constant coefficient of `S_ℏ(e_k* ⋆ e_k)` from its `V × V` formula.
    DoubleGaussian { data: DeformationData, k: LatticeIndex },
    /// `π^{−n} ∫ e^{−|z|²} z^L e^{i√ℏ k·v} dv` in frame coordinates.
    WickMoment {
        data: DeformationData,
        k: LatticeIndex,
        multi_index: Vec<usize>,
    },
    /// `(G_ℏ ⋆ G_ℏ)(w)` from the product integral.
    GaussStarGauss { data: DeformationData, point: Vec<f64> },
    /// `∫ G_ℏ(v)² dv`.
    GaussL2 { data: DeformationData },
}

impl Integrand {
    pub fn kind(&self) -> &'static str {
        match self {
            Integrand::SmoothOnMode { .. } => "smooth_on_mode",
            Integrand::StarOnModes { .. } => "star_on_modes",
            Integrand::DoubleGaussian { .. } => "double_gaussian",
            Integrand::WickMoment { .. } => "wick_moment",
            Integrand::GaussStarGauss { .. } => "gauss_star_gauss",
            Integrand::GaussL2 { .. } => "gauss_l2",
        }
    }

    fn data(&self) -> &DeformationData {
        match self {
            Integrand::SmoothOnMode { data, .. }
            | Integrand::StarOnModes { data, .. }
            | Integrand::DoubleGaussian { data, .. }
            | Integrand::WickMoment { data, .. }
            | Integrand::GaussStarGauss { data, .. }
            | Integrand::GaussL2 { data } => data,
        }
    }

    /// JSON description of the parameters, used as the golden-file key.
    pub fn params(&self) -> serde_json::Value {
        let data = self.data();
        let base = json!({
            "n": data.dim(),
            "hbar": data.hbar(),
            "g": matrix_rows(data.metric().matrix()),
        });
        let mut v = base;
        let obj = v.as_object_mut().expect("object");
        match self {
            Integrand::SmoothOnMode { k, .. } | Integrand::DoubleGaussian { k, .. } => {
                obj.insert("k".into(), json!(k));
            }
            Integrand::StarOnModes { k, l, .. } => {
                obj.insert("k".into(), json!(k));
                obj.insert("l".into(), json!(l));
            }
            Integrand::WickMoment { k, multi_index, .. } => {
                obj.insert("k".into(), json!(k));
                obj.insert("L".into(), json!(multi_index));
            }
            Integrand::GaussStarGauss { point, .. } => {
                obj.insert("w".into(), json!(point));
            }
            Integrand::GaussL2 { .. } => {}
        }
        v
    }

    fn is_regularized(&self) -> bool {
        matches!(self, Integrand::StarOnModes { .. } | Integrand::DoubleGaussian { .. })
    }

    /// Number of real integration variables.
    pub fn domain_dim(&self) -> usize {
        let two_n = 2 * self.data().dim();
        match self {
            Integrand::SmoothOnMode { .. } | Integrand::WickMoment { .. } | Integrand::GaussL2 { .. } => {
                two_n
            }
            _ => 2 * two_n,
        }
    }

    fn validate(&self) -> Result<()> {
        let data = self.data();
        let n = data.dim();
        let four_dim = self.domain_dim() == 4 * n;
        if four_dim && n != 1 {
            return Err(DeformError::InvalidArgument(format!(
                "{} is only available for n = 1, got n = {n}",
                self.kind()
            )));
        }
        if !four_dim && n > 2 {
            return Err(DeformError::InvalidArgument(format!(
                "{} is only available for n <= 2, got n = {n}",
                self.kind()
            )));
        }
        let needs_positive_hbar = !matches!(
            self,
            Integrand::SmoothOnMode { .. } | Integrand::WickMoment { .. }
        );
        if needs_positive_hbar && data.hbar() <= 0.0 {
            return Err(DeformError::InvalidHbar(data.hbar()));
        }
        let check_k = |k: &LatticeIndex| {
            if k.len() == 2 * n {
                Ok(())
            } else {
                Err(DeformError::DimensionMismatch { expected: 2 * n, got: k.len() })
            }
        };
        match self {
            Integrand::SmoothOnMode { k, .. } | Integrand::DoubleGaussian { k, .. } => check_k(k),
            Integrand::StarOnModes { k, l, .. } => check_k(k).and(check_k(l)),
            Integrand::WickMoment { k, multi_index, .. } => {
                check_k(k)?;
                if multi_index.len() != n {
                    return Err(DeformError::DimensionMismatch { expected: n, got: multi_index.len() });
                }
                Ok(())
            }
            Integrand::GaussStarGauss { point, .. } => {
                if point.len() != 2 * n {
                    return Err(DeformError::DimensionMismatch { expected: 2 * n, got: point.len() });
                }
                Ok(())
            }
            Integrand::GaussL2 { .. } => Ok(()),
        }
    }

    /// Value of the (damped, for regularized kinds) integral on one rule.
    fn rule_value(&self, rule: &GaussHermite, eps: f64) -> Complex64 {
        match self {
            Integrand::SmoothOnMode { data, k } => smooth_on_mode(rule, data, k),
            Integrand::StarOnModes { data, k, l } => star_on_modes(rule, data, k, l, eps),
            Integrand::DoubleGaussian { data, k } => double_gaussian(rule, data, k, eps),
            Integrand::WickMoment { data, k, multi_index } => wick_moment(rule, data, k, multi_index),
            Integrand::GaussStarGauss { data, point } => gauss_star_gauss(rule, data, point),
            Integrand::GaussL2 { data } => gauss_l2(rule, data),
        }
    }

    /// Same integrand on the trapezoid fallback, for the non-regularized
    /// kinds of domain dimension at most 2.
    fn trapezoid_value(&self, radius: f64, points: usize) -> Option<Complex64> {
        if self.is_regularized() || self.domain_dim() > 2 {
            return None;
        }
        let f = self.weighted_integrand()?;
        Some(trapezoid_tensor(self.domain_dim(), radius, points, f))
    }

    /// Integrand against the weight `e^{−|x|²}` for the directly evaluated
    /// kinds.
    fn weighted_integrand(&self) -> Option<Box<dyn Fn(&[f64]) -> Complex64 + Sync + '_>> {
        match self {
            Integrand::SmoothOnMode { data, k } => {
                let (scale, freq) = smooth_on_mode_setup(data, k);
                Some(Box::new(move |x: &[f64]| {
                    let phase: f64 = freq.iter().zip(x).map(|(a, b)| a * b).sum();
                    Complex64::from_polar(scale, phase)
                }))
            }
            Integrand::WickMoment { data, k, multi_index } => {
                let (scale, freq) = wick_moment_setup(data, k);
                let n = data.dim();
                Some(Box::new(move |x: &[f64]| {
                    wick_integrand(x, n, scale, &freq, multi_index)
                }))
            }
            Integrand::GaussL2 { data } => {
                let scale = gauss_l2_scale(data);
                Some(Box::new(move |x: &[f64]| {
                    let r2: f64 = x.iter().map(|t| t * t).sum();
                    Complex64::new(scale * (-r2).exp(), 0.0)
                }))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
    /// Final Gauss–Hermite order per axis (0 if the trapezoid fallback won).
    pub order: usize,
    /// Successive refinement differences, in order.
    pub estimates: Vec<f64>,
}

/// Evaluates `integrand`. Precondition violations are errors; failure to
/// converge is reported through `converged = false` with the best value.
pub fn integrate(integrand: &Integrand, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    integrand.validate()?;
    if !integrand.is_regularized() {
        return Ok(refine(integrand, cfg, 0.0));
    }
    let mut values = Vec::with_capacity(cfg.epsilon_schedule.len());
    let mut quad_err: f64 = 0.0;
    let mut converged = true;
    let mut order = 0;
    let mut estimates = Vec::new();
    for &eps in &cfg.epsilon_schedule {
        let r = refine(integrand, cfg, eps);
        quad_err = quad_err.max(r.error_estimate);
        converged &= r.converged;
        order = order.max(r.order);
        estimates = r.estimates;
        values.push(r.value);
    }
    let (value, extrap_err) = extrapolate_to_zero(&cfg.epsilon_schedule, &values);
    let error_estimate = quad_err + extrap_err;
    Ok(QuadratureResult {
        value,
        error_estimate,
        converged: converged && error_estimate <= cfg.target_tol.max(1e-8),
        order,
        estimates,
    })
}

/// The damped integral at a single `ε > 0` (regularized kinds only).
pub fn integrate_damped(integrand: &Integrand, cfg: &QuadratureConfig, eps: f64) -> Result<QuadratureResult> {
    cfg.validate()?;
    integrand.validate()?;
    if !integrand.is_regularized() || !(eps > 0.0) {
        return Err(DeformError::InvalidArgument(format!(
            "damped evaluation needs a regularized kind and eps > 0 (kind {}, eps {eps})",
            integrand.kind()
        )));
    }
    Ok(refine(integrand, cfg, eps))
}

fn refine(integrand: &Integrand, cfg: &QuadratureConfig, eps: f64) -> QuadratureResult {
    let mut order = cfg.order;
    let rule = GaussHermite::cached(order).expect("validated order");
    let mut prev = integrand.rule_value(&rule, eps);
    let mut estimates = Vec::new();
    let mut best = prev;
    for _ in 0..cfg.max_refinements {
        let next_order = (order * 2).min(MAX_ORDER);
        if next_order == order {
            break;
        }
        order = next_order;
        let rule = GaussHermite::cached(order).expect("bounded order");
        let value = integrand.rule_value(&rule, eps);
        let est = (value - prev).norm();
        estimates.push(est);
        best = value;
        if est <= cfg.target_tol {
            return QuadratureResult { value, error_estimate: est, converged: true, order, estimates };
        }
        prev = value;
    }
    let gh_err = estimates.last().copied().unwrap_or(f64::INFINITY);
    // Trapezoid fallback on the box for low-dimensional kinds.
    let mut points = 64;
    let mut prev_trap: Option<Complex64> = None;
    for _ in 0..=cfg.max_refinements {
        let Some(value) = integrand.trapezoid_value(cfg.box_radius, points + 1) else {
            break;
        };
        if let Some(p) = prev_trap {
            let est = (value - p).norm();
            if est <= cfg.target_tol && est < gh_err {
                estimates.push(est);
                return QuadratureResult { value, error_estimate: est, converged: true, order: 0, estimates };
            }
        }
        prev_trap = Some(value);
        points *= 2;
    }
    QuadratureResult { value: best, error_estimate: gh_err, converged: false, order, estimates }
}

/// Neville extrapolation of `(x_i, y_i)` to `x = 0`.
///
/// Returns the value of the full interpolant and the larger of its
/// distances to the two interpolants of one degree less.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let m = xs.len();
    let mut table: Vec<Complex64> = ys.to_vec();
    let mut lower = (table[0], table[0]);
    for j in 1..m {
        if j == m - 1 {
            lower = (table[0], table[1]);
        }
        for i in 0..m - j {
            let (xi, xj) = (xs[i], xs[i + j]);
            table[i] = (table[i] * (-xj) + table[i + 1] * xi) / (xi - xj);
        }
    }
    let value = table[0];
    let err = if m == 1 {
        f64::INFINITY
    } else {
        (value - lower.0).norm().max((value - lower.1).norm())
    };
    (value, err)
}

/// Compares the regularized quadrature of the product integral on mode pairs
/// `k, l ∈ {−2..2}²` with the frozen twist. Each case records the quadrature
/// coefficient against `σ_ℏ(k, l)` (tolerance 1e-6); a final set of cases
/// checks the modulus against 1 (tolerance 1e-4).
pub fn calibrate_twist(cfg: &QuadratureConfig, data: &DeformationData) -> VerificationReport {
    let mut report = VerificationReport::new("calibrate_twist");
    if data.dim() != 1 {
        report.pass = false;
        report.note(format!("twist calibration needs n = 1, got n = {}", data.dim()));
        return report;
    }
    let sigma = TwistCocycle::new(data);
    for k in box_indices(2) {
        for l in box_indices(2) {
            let integrand = Integrand::StarOnModes { data: data.clone(), k: k.clone(), l: l.clone() };
            let input = json!({"k": k, "l": l, "hbar": data.hbar()});
            match integrate(&integrand, cfg) {
                Ok(r) => {
                    if !r.converged {
                        report.note(format!("k={k:?} l={l:?}: not converged (est {:.3e})", r.error_estimate));
                    }
                    report.compare(input.clone(), sigma.phase(&k, &l), r.value, 1e-6);
                    report.compare(
                        json!({"k": k, "l": l, "hbar": data.hbar(), "quantity": "modulus"}),
                        Complex64::new(1.0, 0.0),
                        Complex64::new(r.value.norm(), 0.0),
                        1e-4,
                    );
                }
                Err(e) => {
                    report.pass = false;
                    report.note(format!("k={k:?} l={l:?}: {e}"));
                }
            }
        }
    }
    report
}

/// All lattice points of `{−r..r}²`, lexicographic.
pub(crate) fn box_indices(r: i64) -> Vec<LatticeIndex> {
    (-r..=r)
        .flat_map(|i| (-r..=r).map(move |j| LatticeIndex::from([i, j])))
        .collect()
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Lower Cholesky factor `L` of the metric (`G = L Lᵀ`).
fn cholesky(data: &DeformationData) -> DMatrix<f64> {
    data.metric()
        .matrix()
        .clone()
        .cholesky()
        .expect("metric validated positive definite")
        .l()
}

fn solve_lower(l: &DMatrix<f64>, k: &LatticeIndex) -> Vec<f64> {
    let rhs = DVector::from_vec(k.as_f64());
    l.solve_lower_triangular(&rhs).expect("nonsingular").iter().copied().collect()
}

// Substituting u = √ℏ L^{−T} s turns G_ℏ(u) du into π^{−n} e^{−|s|²} ds and
// k·u into √ℏ (L^{−1}k)·s.
fn smooth_on_mode_setup(data: &DeformationData, k: &LatticeIndex) -> (f64, Vec<f64>) {
    let n = data.dim() as i32;
    let l = cholesky(data);
    let sh = data.hbar().sqrt();
    let freq = solve_lower(&l, k).into_iter().map(|x| sh * x).collect();
    (PI.powi(-n), freq)
}

fn smooth_on_mode(rule: &GaussHermite, data: &DeformationData, k: &LatticeIndex) -> Complex64 {
    let (scale, freq) = smooth_on_mode_setup(data, k);
    rule.integrate_tensor(freq.len(), |x| {
        let phase: f64 = freq.iter().zip(x).map(|(a, b)| a * b).sum();
        Complex64::from_polar(scale, phase)
    })
}

// Frame coordinates w = (q, p) with v = B w; dv = dw because |det B| = 1.
fn wick_moment_setup(data: &DeformationData, k: &LatticeIndex) -> (f64, Vec<f64>) {
    let n = data.dim() as i32;
    let b = data.frame().basis();
    let kv = DVector::from_vec(k.as_f64());
    let sh = data.hbar().sqrt();
    let freq = (b.transpose() * kv).iter().map(|x| sh * x).collect();
    (PI.powi(-n), freq)
}

fn wick_integrand(x: &[f64], n: usize, scale: f64, freq: &[f64], multi_index: &[usize]) -> Complex64 {
    let phase: f64 = freq.iter().zip(x).map(|(a, b)| a * b).sum();
    let mut v = Complex64::from_polar(scale, phase);
    for (j, &lj) in multi_index.iter().enumerate() {
        let z = Complex64::new(x[j], x[n + j]);
        v *= z.powu(lj as u32);
    }
    v
}

fn wick_moment(rule: &GaussHermite, data: &DeformationData, k: &LatticeIndex, multi_index: &[usize]) -> Complex64 {
    let (scale, freq) = wick_moment_setup(data, k);
    let n = data.dim();
    rule.integrate_tensor(2 * n, |x| wick_integrand(x, n, scale, &freq, multi_index))
}

// G_ℏ(u)² du = √det G / (π^{2n} ℏ^n) e^{−2|s|²} ds; one factor e^{−|s|²}
// is the quadrature weight.
fn gauss_l2_scale(data: &DeformationData) -> f64 {
    let n = data.dim() as i32;
    data.metric().det().sqrt() / (PI.powi(2 * n) * data.hbar().powi(n))
}

fn gauss_l2(rule: &GaussHermite, data: &DeformationData) -> Complex64 {
    let scale = gauss_l2_scale(data);
    rule.integrate_tensor(2 * data.dim(), |x| {
        let r2: f64 = x.iter().map(|t| t * t).sum();
        Complex64::new(scale * (-r2).exp(), 0.0)
    })
}

// (G⋆G)(w) = (πℏ)^{−2} ∫∫ G(w+u) G(w+v) e^{(2i/ℏ)θ(u,v)} du dv. With
// w + u = √ℏ M s, w + v = √ℏ M t (M = L^{−T}) both Gaussians become
// π^{−1} e^{−|·|²} and the phase is
//   2c(s₁t₂ − s₂t₁) − (2/√ℏ)(α·s + β·t),  c = (MᵀΘM)₁₂, α = MᵀΘw, β = −MᵀΘw,
// so the 4D tensor rule is the product of the sums over (s₁, t₂), (s₂, t₁).
fn gauss_star_gauss(rule: &GaussHermite, data: &DeformationData, w: &[f64]) -> Complex64 {
    let hbar = data.hbar();
    let m = cholesky(data).transpose().try_inverse().expect("nonsingular");
    let theta = data.theta().matrix();
    let c = (m.transpose() * theta * &m)[(0, 1)];
    let alpha = m.transpose() * theta * DVector::from_column_slice(w);
    let beta = -&alpha;
    let f = 2.0 / hbar.sqrt();
    let pair = |coupling: f64, a: f64, b: f64| -> Complex64 {
        rule.integrate_tensor(2, |x| Complex64::from_polar(1.0, coupling * x[0] * x[1] - f * (a * x[0] + b * x[1])))
    };
    let first = pair(2.0 * c, alpha[0], beta[1]);
    let second = pair(-2.0 * c, alpha[1], beta[0]);
    first * second / (PI * hbar).powi(2) / PI.powi(2)
}

// The damped product integral factorizes over the coordinate pairs
// (u₁, v₂) and (u₂, v₁), each of the form
//   ∫∫ exp((2ic/ℏ)xy − (ε/ℏ)(x² + y²) + iαx + iβy) dx dy.
// With p = (x+y)/√2, q = (x−y)/√2 the quadratic part is
// ((ic − ε)/ℏ) p² − ((ic + ε)/ℏ) q²; p = ρ_p s, q = ρ_q t with
// ρ_p² = ℏ/(ε − ic), ρ_q² = ℏ/(ε + ic) rotates both onto e^{−s²−t²}.
// The tensor rule of the product integrand is the product of the pair sums.
fn star_on_modes(rule: &GaussHermite, data: &DeformationData, k: &LatticeIndex, l: &LatticeIndex, eps: f64) -> Complex64 {
    let hbar = data.hbar();
    let t = data.theta().matrix()[(0, 1)];
    let (k, l) = (k.components(), l.components());
    let pair = |c: f64, alpha: f64, beta: f64| -> Complex64 {
        let rho_p = (Complex64::new(hbar, 0.0) / Complex64::new(eps, -c)).sqrt();
        let rho_q = (Complex64::new(hbar, 0.0) / Complex64::new(eps, c)).sqrt();
        let a = Complex64::i() * rho_p * ((alpha + beta) / SQRT_2);
        let b = Complex64::i() * rho_q * ((alpha - beta) / SQRT_2);
        rho_p * rho_q * rule.integrate_tensor(2, |x| (a * x[0] + b * x[1]).exp())
    };
    let first = pair(t, k[0] as f64, l[1] as f64);
    let second = pair(-t, k[1] as f64, l[0] as f64);
    first * second / (PI * hbar).powi(2)
}

// (πℏ)^{−2} ∫∫ e^{−(1+ε)(g(v,v)+g(w,w))/ℏ} e^{−ik·v} e^{ik·w}
//     × e^{(2/ℏ)(g(v,w) + iθ(v,w))} dv dw.
// In Cholesky coordinates g is Euclidean and, in dimension 2, θ stays
// c·[[0,1],[−1,0]]. With σ = (v+w)/√2, δ = (v−w)/√2 the real part is
// −(ε|σ|² + (2+ε)|δ|²)/ℏ, the phase −(2ic/ℏ)(σ₁δ₂ − σ₂δ₁), and the modes
// only see δ. Each pair (σ_a, δ_b) is completed to a square in σ_a.
fn double_gaussian(rule: &GaussHermite, data: &DeformationData, k: &LatticeIndex, eps: f64) -> Complex64 {
    let hbar = data.hbar();
    let l = cholesky(data);
    let l_inv = l.clone().try_inverse().expect("nonsingular");
    let theta_c = &l_inv * data.theta().matrix() * l_inv.transpose();
    let c = theta_c[(0, 1)];
    let kp = solve_lower(&l, k);
    let pair = |gamma: f64, b: f64| -> Complex64 {
        let stiff = gamma * gamma / eps + 2.0 + eps;
        let sx = (hbar / eps).sqrt();
        let sy = (hbar / stiff).sqrt();
        sx * sy * rule.integrate_tensor(2, |x| Complex64::from_polar(1.0, b * sy * x[1]))
    };
    let first = pair(-c, -SQRT_2 * kp[1]);
    let second = pair(c, -SQRT_2 * kp[0]);
    first * second / (PI * hbar).powi(2) / data.metric().det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{Metric, SymplecticForm};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn squeezed(hbar: f64) -> DeformationData {
        let g = Metric::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25])).unwrap();
        DeformationData::new(SymplecticForm::standard(1), g, hbar).unwrap()
    }

    #[test]
    fn smooth_on_zero_mode_is_one() {
        let data = DeformationData::standard(1, 0.7).unwrap();
        let r = integrate(&Integrand::SmoothOnMode { data, k: LatticeIndex::zero(2) }, &cfg()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).norm() < 1e-10);
    }

    #[test]
    fn smooth_on_unit_mode() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        let r = integrate(&Integrand::SmoothOnMode { data, k: [1, 0].into() }, &cfg()).unwrap();
        assert!((r.value - (-0.25f64).exp()).norm() < 1e-8, "{:?}", r);
    }

    #[test]
    fn smooth_on_mode_in_four_dimensions() {
        let data = DeformationData::standard(2, 0.5).unwrap();
        let k: LatticeIndex = [1, 0, -1, 1].into();
        let r = integrate(&Integrand::SmoothOnMode { data, k }, &cfg()).unwrap();
        assert!((r.value - (-0.5 * 3.0 / 4.0f64).exp()).norm() < 1e-8);
    }

    #[test]
    fn gauss_star_gauss_at_origin() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        let r = integrate(&Integrand::GaussStarGauss { data, point: vec![0.0, 0.0] }, &cfg()).unwrap();
        let expected = 1.0 / (2.0 * PI) / PI;
        assert!((r.value - expected).norm() / expected < 1e-4, "{:?}", r);
    }

    #[test]
    fn gauss_l2_closed_form() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        let r = integrate(&Integrand::GaussL2 { data }, &cfg()).unwrap();
        assert!((r.value - 1.0 / (2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn damped_product_tends_to_twist() {
        let data = DeformationData::standard(1, 0.5).unwrap();
        let k: LatticeIndex = [1, 0].into();
        let l: LatticeIndex = [0, 1].into();
        let integrand = Integrand::StarOnModes { data: data.clone(), k: k.clone(), l: l.clone() };
        let r = integrate(&integrand, &cfg()).unwrap();
        let sigma = TwistCocycle::new(&data).phase(&k, &l);
        assert!((r.value - sigma).norm() < 1e-8, "{:?} vs {sigma}", r.value);
        // Far from the limit the damped value is visibly different.
        let damped = integrate_damped(&integrand, &cfg(), 0.5).unwrap();
        assert!((damped.value - sigma).norm() > 1e-2);
    }

    #[test]
    fn double_gaussian_single_mode_is_one() {
        for data in [DeformationData::standard(1, 1.0).unwrap(), squeezed(0.5)] {
            let r = integrate(&Integrand::DoubleGaussian { data, k: [2, -1].into() }, &cfg()).unwrap();
            assert!((r.value - 1.0).norm() < 1e-6, "{:?}", r);
        }
    }

    #[test]
    fn wick_moment_first_order() {
        let data = squeezed(0.5);
        let k: LatticeIndex = [1, 1].into();
        let kappa = data.frame().kappa(&k)[0];
        let expected = Complex64::i() * 0.5f64.sqrt() * kappa / 2.0 * (-0.5 * kappa.norm_sqr() / 4.0).exp();
        let r = integrate(&Integrand::WickMoment { data, k, multi_index: vec![1] }, &cfg()).unwrap();
        assert!((r.value - expected).norm() < 1e-10);
    }

    #[test]
    fn preconditions() {
        let data2 = DeformationData::standard(2, 1.0).unwrap();
        let k4: LatticeIndex = [0, 0, 0, 0].into();
        assert!(integrate(&Integrand::StarOnModes { data: data2, k: k4.clone(), l: k4 }, &cfg()).is_err());
        let data0 = DeformationData::standard(1, 0.0).unwrap();
        assert!(integrate(&Integrand::GaussL2 { data: data0 }, &cfg()).is_err());
        let bad = QuadratureConfig { order: 4, ..cfg() };
        let data = DeformationData::standard(1, 1.0).unwrap();
        assert!(integrate(&Integrand::GaussL2 { data: data.clone() }, &bad).is_err());
        let bad = QuadratureConfig { target_tol: 1e-12, ..cfg() };
        assert!(integrate(&Integrand::GaussL2 { data: data.clone() }, &bad).is_err());
        let bad = QuadratureConfig { epsilon_schedule: vec![0.1, 0.2], ..cfg() };
        assert!(bad.validate().is_err());
        assert!(integrate(&Integrand::SmoothOnMode { data, k: [1, 0, 0].into() }, &cfg()).is_err());
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new(1.0 - 2.0 * x + 3.0 * x * x * x, x))
            .collect();
        let (v, err) = extrapolate_to_zero(&xs, &ys);
        assert!((v - 1.0).norm() < 1e-13);
        assert!(err < 1.0);
    }

    #[test]
    fn refinement_estimates_shrink() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        let integrand = Integrand::WickMoment { data, k: [2, 2].into(), multi_index: vec![3] };
        let tight = QuadratureConfig { order: 8, ..cfg() };
        let r = integrate(&integrand, &tight).unwrap();
        assert!(r.converged);
        for w in r.estimates.windows(2) {
            assert!(w[1] <= 2.0 * w[0] + 1e-15, "{:?}", r.estimates);
        }
    }
}
