//! The Gaussian smoothing operator `S_ℏ` and the sum-of-squares form of
//! `S_ℏ(a* ⋆_ℏ a)`.
//!
//! On characters `S_ℏ e_k = e^{−ℏλ(k)/4} e_k` with `λ(k) = kᵀG⁻¹k`: the Fourier
//! transform of the normalized Gaussian `G_ℏ(u) = √det G/(πℏ)^n e^{−g(u,u)/ℏ}`.
//!
//! In a compatible frame the smoothed square expands as
//!
//! ```text
//! S_ℏ(a* ⋆_ℏ a) = Σ_L (2^{|L|}/L!) a_L* a_L,
//! (a_L)_k = a_k Π_j (i√ℏ κ_j(k)/2)^{l_j} e^{−ℏ|κ(k)|²/4},
//! ```
//!
//! where `κ_j(k)` are the complex frame components of `k`
//! ([`crate::frame::CompatibleFrame::kappa`]). With `|det Θ| = 1` a compatible
//! metric has `det G = 1`, so `a_0 = S_ℏ(a)` and the normalization factors
//! `√det G`, `1/det G` below are identically 1; they are kept so the formulas
//! read the same for any measure convention.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{DeformError, Result};
use crate::frame::DeformationData;
use crate::lattice::{multi_indices_up_to, FourierElement, LatticeIndex};
use crate::oracle::{integrate, Integrand, QuadratureConfig};
use crate::product::star_product;
use crate::report::VerificationReport;

/// Multiplier of `S_ℏ` on `e_k`; exactly 1 at `ℏ = 0`.
pub fn smoothing_multiplier(data: &DeformationData, k: &LatticeIndex) -> f64 {
    if data.hbar() == 0.0 {
        return 1.0;
    }
    (-data.hbar() * data.laplacian_symbol(k) / 4.0).exp()
}

pub fn smooth(data: &DeformationData, a: &FourierElement) -> Result<FourierElement> {
    data.check_element(a)?;
    if data.hbar() == 0.0 {
        return Ok(a.clone());
    }
    let mut out = a.map_coeffs(|k, c| c * smoothing_multiplier(data, k));
    out.prune();
    Ok(out)
}

/// Compares the central difference `(S_{ℏ+dh}a − S_{ℏ−dh}a)/(2dh)` with
/// `S_ℏ(Δ_g a/4)`, mode by mode.
///
/// The tolerance per mode is the Taylor remainder
/// `|a_k| (λ/4)³ e^{−(ℏ−dh)λ/4} dh²/6` plus rounding slack.
pub fn smooth_derivative_check(data: &DeformationData, a: &FourierElement, dh: f64) -> VerificationReport {
    let mut report = VerificationReport::new("smooth_derivative");
    let hbar = data.hbar();
    if !(hbar > 0.0 && dh > 0.0 && dh < hbar) {
        report.pass = false;
        report.note(format!("need 0 < dh < hbar, got dh = {dh}, hbar = {hbar}"));
        return report;
    }
    if data.check_element(a).is_err() {
        report.pass = false;
        report.note("dimension mismatch");
        return report;
    }
    for (k, &c) in a.terms() {
        let (fd, exact) = derivative_pair(data, k, dh);
        let lam4 = data.laplacian_symbol(k) / 4.0;
        let tol = c.norm() * (lam4.powi(3) * (-(hbar - dh) * lam4).exp() * dh * dh / 6.0 + 4.0 * f64::EPSILON / dh)
            + 1e-12;
        report.compare(json!({"k": k, "hbar": hbar, "dh": dh}), c * exact, c * fd, tol);
    }
    report
}

/// `(finite difference, exact derivative)` of the multiplier at `data.hbar()`.
fn derivative_pair(data: &DeformationData, k: &LatticeIndex, dh: f64) -> (f64, f64) {
    let hbar = data.hbar();
    let lam = data.laplacian_symbol(k);
    let fd = ((-(hbar + dh) * lam / 4.0).exp() - (-(hbar - dh) * lam / 4.0).exp()) / (2.0 * dh);
    let exact = -lam / 4.0 * (-hbar * lam / 4.0).exp();
    (fd, exact)
}

/// Largest coefficient error of the central difference against the exact
/// derivative.
pub fn derivative_error(data: &DeformationData, a: &FourierElement, dh: f64) -> f64 {
    a.terms()
        .map(|(k, c)| {
            let (fd, exact) = derivative_pair(data, k, dh);
            c.norm() * (fd - exact).abs()
        })
        .fold(0.0, f64::max)
}

/// Observed convergence order `log₂(err(dh)/err(dh/2))` of the central
/// difference.
pub fn derivative_convergence_order(data: &DeformationData, a: &FourierElement, dh: f64) -> f64 {
    let coarse = derivative_error(data, a, dh);
    let fine = derivative_error(data, a, dh / 2.0);
    (coarse / fine).log2()
}

/// `Σ_{r<R} (1/r!)(ℏ/4)^r Δ_g^r a`, i.e. the degree-`R−1` Taylor polynomial of
/// the multiplier applied to each coefficient.
pub fn asymptotic_expansion(data: &DeformationData, a: &FourierElement, order: usize) -> Result<FourierElement> {
    data.check_element(a)?;
    let hbar = data.hbar();
    let mut out = a.map_coeffs(|k, c| c * exp_taylor(-hbar * data.laplacian_symbol(k) / 4.0, order));
    out.prune();
    Ok(out)
}

/// `Σ_{r<R} x^r/r!`.
pub(crate) fn exp_taylor(x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for r in 0..terms {
        sum += term;
        term *= x / (r + 1) as f64;
    }
    sum
}

/// `(ℏλ(k)/4)^R / R!`, the modulus bound on the per-mode remainder of the
/// expansion.
pub fn expansion_remainder_bound(data: &DeformationData, k: &LatticeIndex, order: usize) -> f64 {
    let x = data.hbar() * data.laplacian_symbol(k) / 4.0;
    (1..=order).fold(1.0, |acc, r| acc * x / r as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WickCoefficient {
    pub multi_index: Vec<usize>,
    pub element: FourierElement,
}

/// `Π_j (i√ℏ κ_j(k)/2)^{l_j} e^{−ℏ|κ(k)|²/4}`.
pub fn wick_multiplier(data: &DeformationData, k: &LatticeIndex, multi_index: &[usize]) -> Result<Complex64> {
    let n = data.dim();
    if multi_index.len() != n {
        return Err(DeformError::DimensionMismatch { expected: n, got: multi_index.len() });
    }
    if k.len() != 2 * n {
        return Err(DeformError::DimensionMismatch { expected: 2 * n, got: k.len() });
    }
    let kappa = data.frame().kappa(k);
    let hbar = data.hbar();
    let sh = hbar.sqrt();
    let norm_sqr: f64 = kappa.iter().map(|z| z.norm_sqr()).sum();
    let mut v = Complex64::new((-hbar * norm_sqr / 4.0).exp(), 0.0);
    for (z, &l) in kappa.iter().zip(multi_index) {
        v *= (Complex64::i() * sh * z / 2.0).powu(l as u32);
    }
    Ok(v)
}

pub fn wick_coefficient(data: &DeformationData, a: &FourierElement, multi_index: &[usize]) -> Result<WickCoefficient> {
    data.check_element(a)?;
    let mut element = FourierElement::zero(a.dim());
    for (k, &c) in a.terms() {
        element.accumulate(k.clone(), c * wick_multiplier(data, k, multi_index)?);
    }
    element.prune();
    Ok(WickCoefficient { multi_index: multi_index.to_vec(), element })
}

/// Truncation of the Wick series at total degree `max_degree`, with a
/// rigorous bound on the ℓ¹ coefficient norm of the dropped terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub max_degree: usize,
    pub tail_bound: f64,
}

impl SeriesTruncation {
    /// The bound `Σ_{k,l} |a_k||a_l| e^{−ℏ(|κ(k)|²+|κ(l)|²)/4} Σ_{d>D} X^d/d!`
    /// with `X = (ℏ/2) Σ_j |κ_j(k)||κ_j(l)|`, which dominates every dropped
    /// term because `Σ_{|L|=d} Π_j x_j^{l_j}/l_j! = (Σ_j x_j)^d/d!`.
    pub fn for_element(data: &DeformationData, a: &FourierElement, max_degree: usize) -> Result<Self> {
        data.check_element(a)?;
        let hbar = data.hbar();
        let modes: Vec<(f64, Vec<f64>, f64)> = a
            .terms()
            .map(|(k, c)| {
                let kappa: Vec<f64> = data.frame().kappa(k).iter().map(|z| z.norm()).collect();
                let sq: f64 = kappa.iter().map(|x| x * x).sum();
                (c.norm(), kappa, sq)
            })
            .collect();
        let mut tail = 0.0;
        for (ak, kk, sk) in &modes {
            for (al, kl, sl) in &modes {
                let x = hbar / 2.0 * kk.iter().zip(kl).map(|(p, q)| p * q).sum::<f64>();
                tail += ak * al * (-hbar * (sk + sl) / 4.0).exp() * exp_tail(x, max_degree);
            }
        }
        Ok(Self { max_degree, tail_bound: tail })
    }
}

/// `Σ_{d>D} x^d/d!` for `x ≥ 0`, summed directly to avoid cancellation.
pub(crate) fn exp_tail(x: f64, max_degree: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for d in 1..=max_degree + 1 {
        term *= x / d as f64;
    }
    let mut sum = 0.0;
    let mut d = max_degree + 1;
    loop {
        sum += term;
        d += 1;
        term *= x / d as f64;
        if term <= f64::EPSILON * 1e-3 * sum || term == 0.0 {
            return sum;
        }
    }
}

/// Partial sum `Σ_{|L| ≤ D} (2^{|L|}/L!) a_L* a_L` with undeformed products,
/// restricted to `min_degree ≤ |L|`.
fn wick_partial_sum(data: &DeformationData, a: &FourierElement, min_degree: usize, max_degree: usize) -> Result<FourierElement> {
    let indices: Vec<Vec<usize>> = multi_indices_up_to(data.dim(), max_degree)
        .into_iter()
        .filter(|l| l.iter().sum::<usize>() >= min_degree)
        .collect();
    let terms: Vec<FourierElement> = indices
        .par_iter()
        .map(|l| {
            let al = wick_coefficient(data, a, l)?.element;
            let weight: f64 = l
                .iter()
                .map(|&lj| (1..=lj).fold(1.0, |acc, r| acc * 2.0 / r as f64))
                .product();
            Ok(al.involution().multiply(&al)?.scale_real(weight))
        })
        .collect::<Result<_>>()?;
    // Summed in multi-index order for reproducibility.
    let mut out = FourierElement::zero(a.dim());
    for t in &terms {
        for (k, &c) in t.terms() {
            out.accumulate(k.clone(), c);
        }
    }
    out.prune();
    Ok(out)
}

/// Truncated Wick series and a report comparing it with the direct
/// `S_ℏ(a* ⋆_ℏ a)` (tolerance `tail_bound + 1e-10` in the ℓ¹ coefficient norm).
pub fn wick_series(data: &DeformationData, a: &FourierElement, trunc: &SeriesTruncation) -> Result<(FourierElement, VerificationReport)> {
    let value = wick_partial_sum(data, a, 0, trunc.max_degree)?;
    let direct = smooth(data, &star_product(data, &a.involution(), a)?)?;
    let mut report = VerificationReport::new("wick_series");
    let zero = LatticeIndex::zero(2 * a.dim());
    let distance = value.sub(&direct)?.l1_norm();
    report.push_case(
        json!({"hbar": data.hbar(), "max_degree": trunc.max_degree, "modes": a.len(), "tail_bound": trunc.tail_bound}),
        direct.coeff(&zero),
        value.coeff(&zero),
        distance,
        trunc.tail_bound + 1e-10,
    );
    if !value.is_hermitian(1e-12) {
        report.pass = false;
        report.note("series value is not hermitian");
    }
    Ok((value, report))
}

/// `S_ℏ(a* ⋆ a) = (1/det G) S_ℏ(a*) S_ℏ(a) + remainder`; returns
/// `(leading, remainder)`.
pub fn leading_order_split(data: &DeformationData, a: &FourierElement) -> Result<(FourierElement, FourierElement)> {
    let sa = smooth(data, a)?;
    let leading = sa.involution().multiply(&sa)?.scale_real(1.0 / data.metric().det());
    let direct = smooth(data, &star_product(data, &a.involution(), a)?)?;
    let remainder = direct.sub(&leading)?;
    Ok((leading, remainder))
}

/// Certifies the remainder of [`leading_order_split`] as a sum of hermitian
/// squares `Σ_{1≤|L|≤D} (2^{|L|}/L!) a_L* a_L` up to the series tail, and
/// probes its positivity through the Haar trace and point values on a grid of
/// `grid` points per circle.
pub fn leading_order_check(data: &DeformationData, a: &FourierElement, max_degree: usize, grid: usize) -> Result<VerificationReport> {
    let (_, remainder) = leading_order_split(data, a)?;
    let squares = wick_partial_sum(data, a, 1, max_degree)?;
    let trunc = SeriesTruncation::for_element(data, a, max_degree)?;
    let mut report = VerificationReport::new("leading_order_split");
    let zero = LatticeIndex::zero(2 * a.dim());
    report.push_case(
        json!({"quantity": "sum_of_squares", "hbar": data.hbar(), "max_degree": max_degree}),
        remainder.coeff(&zero),
        squares.coeff(&zero),
        remainder.sub(&squares)?.l1_norm(),
        trunc.tail_bound + 1e-10,
    );
    report.at_least(json!({"quantity": "haar_trace"}), 0.0, remainder.haar_trace().re, 1e-10);
    let min_value = grid_minimum(&remainder, grid);
    report.at_least(json!({"quantity": "grid_minimum", "grid": grid}), 0.0, min_value, 1e-10);
    Ok(report)
}

/// Smallest real part of the point values of `a` on the uniform grid with
/// `points` nodes per circle (all `2n` axes; capped at 4 axes).
pub(crate) fn grid_minimum(a: &FourierElement, points: usize) -> f64 {
    let axes = a.lattice_rank().min(4);
    let total = points.pow(axes as u32);
    let mut min = f64::INFINITY;
    let mut x = vec![0.0; a.lattice_rank()];
    for idx in 0..total {
        let mut rest = idx;
        for xi in x.iter_mut().take(axes) {
            *xi = 2.0 * PI * (rest % points) as f64 / points as f64;
            rest /= points;
        }
        min = min.min(a.evaluate_at(&x).re);
    }
    min
}

/// `G_ℏ(w) = √det G/(πℏ)^n e^{−g(w,w)/ℏ}`.
pub fn gaussian_density(data: &DeformationData, w: &[f64]) -> Result<f64> {
    let n = data.dim();
    if w.len() != 2 * n {
        return Err(DeformError::DimensionMismatch { expected: 2 * n, got: w.len() });
    }
    let hbar = data.hbar();
    if !(hbar > 0.0) {
        return Err(DeformError::InvalidHbar(hbar));
    }
    let g = data.metric();
    Ok(g.det().sqrt() / (PI * hbar).powi(n as i32) * (-g.eval(w, w) / hbar).exp())
}

/// Closed form of `(G_ℏ ⋆ G_ℏ)(w) = (2πℏ)^{−n} (det G)^{−1/2} G_ℏ(w)`.
pub fn star_root_value(data: &DeformationData, w: &[f64]) -> Result<f64> {
    let n = data.dim() as i32;
    Ok(gaussian_density(data, w)? / (2.0 * PI * data.hbar()).powi(n) / data.metric().det().sqrt())
}

/// Compares quadrature of `G_ℏ ⋆ G_ℏ` at each sample point with
/// [`star_root_value`]: relative error at most 1e-4, or both sides below
/// 1e-8.
pub fn star_root_check(data: &DeformationData, samples: &[Vec<f64>], cfg: &QuadratureConfig) -> VerificationReport {
    let mut report = VerificationReport::new("star_root");
    for w in samples {
        let input = json!({"w": w, "hbar": data.hbar()});
        let expected = match star_root_value(data, w) {
            Ok(v) => v,
            Err(e) => {
                report.pass = false;
                report.note(format!("w = {w:?}: {e}"));
                continue;
            }
        };
        let integrand = Integrand::GaussStarGauss { data: data.clone(), point: w.clone() };
        match integrate(&integrand, cfg) {
            Ok(r) => {
                if !r.converged {
                    report.note(format!("w = {w:?}: quadrature not converged (est {:.3e})", r.error_estimate));
                }
                let tol = (1e-4 * expected).max(1e-8);
                report.compare(input, Complex64::new(expected, 0.0), r.value, tol);
            }
            Err(e) => {
                report.pass = false;
                report.note(format!("w = {w:?}: {e}"));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{Metric, SymplecticForm};
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn std_data(hbar: f64) -> DeformationData {
        DeformationData::standard(1, hbar).unwrap()
    }

    fn squeezed(hbar: f64) -> DeformationData {
        let g = Metric::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.25])).unwrap();
        DeformationData::new(SymplecticForm::standard(1), g, hbar).unwrap()
    }

    fn sample() -> FourierElement {
        FourierElement::from_terms(
            1,
            [
                ([0, 0], c(0.5, 0.0)),
                ([1, 0], c(0.3, -0.2)),
                ([-1, 2], c(0.0, 0.7)),
                ([2, 1], c(-0.4, 0.1)),
                ([0, -1], c(0.25, 0.25)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn smooth_on_characters() {
        let data = std_data(0.8);
        assert_eq!(smooth(&data, &FourierElement::one(1)).unwrap(), FourierElement::one(1));
        let s = smooth(&data, &FourierElement::mode(1, [1, 0])).unwrap();
        assert_eq!(s.coeff(&[1, 0].into()), c((-0.2f64).exp(), 0.0));
        let a = sample();
        assert_eq!(smooth(&std_data(0.0), &a).unwrap(), a);
    }

    #[test]
    fn semigroup_on_multipliers() {
        let a = sample();
        let two_step = smooth(&std_data(0.3), &smooth(&std_data(0.5), &a).unwrap()).unwrap();
        let one_step = smooth(&std_data(0.8), &a).unwrap();
        assert!(two_step.max_coeff_distance(&one_step) < 1e-15);
    }

    #[test]
    fn derivative_identity() {
        let data = std_data(1.0);
        let r = smooth_derivative_check(&data, &FourierElement::one(1), 1e-3);
        assert!(r.pass);
        assert_eq!(r.cases[0].got, [0.0, 0.0]);
        let r = smooth_derivative_check(&data, &FourierElement::mode(1, [1, 0]), 1e-2);
        assert!(r.pass, "{:?}", r.cases);
        assert!((r.cases[0].expected[0] + 0.25 * (-0.25f64).exp()).abs() < 1e-15);
        assert!(smooth_derivative_check(&data, &sample(), 0.05).pass);
        assert!(!smooth_derivative_check(&data, &sample(), 2.0).pass);
        let order = derivative_convergence_order(&data, &sample(), 0.1);
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }

    #[test]
    fn expansion_examples() {
        let data = std_data(0.1);
        let a = FourierElement::mode(1, [1, 0]);
        assert!(asymptotic_expansion(&data, &a, 0).unwrap().is_empty());
        assert_eq!(asymptotic_expansion(&data, &a, 1).unwrap(), a);
        let v = asymptotic_expansion(&data, &a, 3).unwrap().coeff(&[1, 0].into()).re;
        assert!((v - 0.9753125).abs() < 1e-15);
        let err = (v - (-0.025f64).exp()).abs();
        assert!(err < 2.7e-6);
        assert!(err <= expansion_remainder_bound(&data, &[1, 0].into(), 3));
    }

    #[test]
    fn wick_zero_index_is_smoothing() {
        for data in [std_data(0.6), squeezed(0.6)] {
            let a = sample();
            let a0 = wick_coefficient(&data, &a, &[0]).unwrap().element;
            assert!(a0.max_coeff_distance(&smooth(&data, &a).unwrap()) < 1e-15);
            assert!(wick_coefficient(&data, &FourierElement::one(1), &[2]).unwrap().element.is_empty());
        }
        assert!(wick_coefficient(&std_data(1.0), &sample(), &[0, 1]).is_err());
    }

    #[test]
    fn single_mode_series_resums_to_unit() {
        let data = squeezed(1.0);
        let a = FourierElement::mode(1, [2, -1]);
        let trunc = SeriesTruncation::for_element(&data, &a, 60).unwrap();
        assert!(trunc.tail_bound < 1e-16);
        let (value, report) = wick_series(&data, &a, &trunc).unwrap();
        assert!(report.pass);
        assert!(value.max_coeff_distance(&FourierElement::one(1)) < 1e-14);
        let (value, _) = wick_series(&data, &FourierElement::one(1), &SeriesTruncation::for_element(&data, &FourierElement::one(1), 0).unwrap()).unwrap();
        assert_eq!(value, FourierElement::one(1));
    }

    #[test]
    fn five_mode_series_within_tail() {
        for hbar in [0.3, 0.5, 1.0] {
            let data = std_data(hbar);
            let trunc = SeriesTruncation::for_element(&data, &sample(), 12).unwrap();
            let (_, report) = wick_series(&data, &sample(), &trunc).unwrap();
            assert!(report.pass, "hbar {hbar}: {:?}", report.cases);
        }
    }

    #[test]
    fn tail_bound_decreases() {
        let data = std_data(1.0);
        let bounds: Vec<f64> = (0..15)
            .map(|d| SeriesTruncation::for_element(&data, &sample(), d).unwrap().tail_bound)
            .collect();
        assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn exp_tail_matches_difference() {
        for x in [0.1f64, 1.0, 3.0] {
            for d in [0, 2, 5] {
                let direct = x.exp() - exp_taylor(x, d + 1);
                assert!((exp_tail(x, d) - direct).abs() < 1e-14 * x.exp());
            }
        }
    }

    #[test]
    fn leading_order_examples() {
        let data = std_data(0.7);
        let (lead, rem) = leading_order_split(&data, &FourierElement::one(1)).unwrap();
        assert_eq!(lead, FourierElement::one(1));
        assert!(rem.is_empty());
        let k: LatticeIndex = [1, 1].into();
        let (lead, rem) = leading_order_split(&data, &FourierElement::mode(1, k.clone())).unwrap();
        let lam = data.laplacian_symbol(&k);
        let zero = LatticeIndex::zero(2);
        assert!((lead.coeff(&zero).re - (-0.7 * lam / 2.0).exp()).abs() < 1e-15);
        assert!((rem.coeff(&zero).re - (1.0 - (-0.7 * lam / 2.0).exp())).abs() < 1e-15);
        let report = leading_order_check(&data, &sample(), 20, 48).unwrap();
        assert!(report.pass, "{:?}", report.cases);
    }

    #[test]
    fn star_root_closed_form_at_origin() {
        let data = std_data(1.0);
        let v = star_root_value(&data, &[0.0, 0.0]).unwrap();
        assert!((v - 1.0 / (2.0 * PI) / PI).abs() < 1e-15);
        assert!(star_root_value(&std_data(0.0), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn star_root_against_quadrature() {
        let cfg = QuadratureConfig::default();
        let samples = vec![vec![0.3, -0.2], vec![0.0, 0.0], vec![8.0, 8.0]];
        let r = star_root_check(&std_data(0.5), &samples, &cfg);
        assert!(r.pass, "{:?}", r);
        let r = star_root_check(&squeezed(1.0), &samples, &cfg);
        assert!(r.pass, "{:?}", r);
    }
}
