//! The C*-norm side of the deformation: norm brackets from the twisted left
//! regular representation, the norm constant of `S_ℏ`, sections
//! `ℏ ↦ Σ f_n(ℏ) a_n` of the field of deformed algebras, and continuity scans.
//!
//! `π_ℏ(a)` acts on `ℓ²(Z^{2n})` by `(π_ℏ(a)ξ)_m = Σ_k a_k σ_ℏ(k, m−k) ξ_{m−k}`.
//! Its compression to the cube `{−N..N}^{2n}` has norm at most `‖a‖_ℏ`, and
//! the ℓ¹ norm of the coefficients is an upper bound.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DeformError, Result};
use crate::frame::DeformationData;
use crate::lattice::{FourierElement, LatticeIndex};
use crate::product::TwistCocycle;
use crate::smoothing::smooth;
use crate::states::{deformed_evaluate, MomentState};

/// Power-iteration limits.
pub const MAX_POWER_ITERATIONS: usize = 200;
pub const POWER_REL_TOL: f64 = 1e-10;
/// Weight of the neighbours in the start vector.
pub const START_NEIGHBOUR_WEIGHT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "N")]
    pub truncation: usize,
}

/// Cube `{−N..N}^d` with lexicographic numbering.
struct Cube {
    rank: usize,
    cutoff: i64,
    side: i64,
}

impl Cube {
    fn new(rank: usize, cutoff: usize) -> Self {
        let cutoff = cutoff as i64;
        Self { rank, cutoff, side: 2 * cutoff + 1 }
    }

    fn len(&self) -> usize {
        (self.side as usize).pow(self.rank as u32)
    }

    fn index(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0i64;
        for &c in m {
            if c.abs() > self.cutoff {
                return None;
            }
            idx = idx * self.side + c + self.cutoff;
        }
        Some(idx as usize)
    }

    fn point(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.rank];
        for slot in out.iter_mut().rev() {
            *slot = (idx as i64 % self.side) - self.cutoff;
            idx /= self.side as usize;
        }
        out
    }
}

/// Compression of `π_ℏ(a)` to the cube, as `(row, column, entry)` triples.
struct Compression {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Compression {
    fn new(data: &DeformationData, a: &FourierElement, cube: &Cube) -> Self {
        let sigma = TwistCocycle::new(data);
        let mut entries = Vec::new();
        for col in 0..cube.len() {
            let j = LatticeIndex::new(cube.point(col));
            for (k, &c) in a.terms() {
                let m = k.add(&j);
                if let Some(row) = cube.index(m.components()) {
                    entries.push((row, col, c * sigma.phase(k, &j)));
                }
            }
        }
        Self { dim: cube.len(), entries }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for &(r, c, x) in &self.entries {
            out[r] += x * v[c];
        }
        out
    }

    fn apply_adjoint(&self, w: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for &(r, c, x) in &self.entries {
            out[c] += x.conj() * w[r];
        }
        out
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Brackets `‖a‖_ℏ` between the norm of the cube compression (power
/// iteration on `T*T`; every iterate gives a certified lower bound `‖Tv‖`)
/// and the ℓ¹ norm.
pub fn norm_bracket(data: &DeformationData, a: &FourierElement, cutoff: usize) -> Result<NormBracket> {
    data.check_element(a)?;
    let radius = a.support_radius();
    if (cutoff as i64) < radius {
        return Err(DeformError::CutoffTooSmall { cutoff, radius });
    }
    let upper = a.l1_norm();
    if a.is_empty() {
        return Ok(NormBracket { lower: 0.0, upper, truncation: cutoff });
    }
    if a.len() == 1 {
        // A multiple of a unitary twisted shift; since the cube is wider
        // than the shift, the compression attains |a_k| exactly.
        return Ok(NormBracket { lower: upper, upper, truncation: cutoff });
    }
    let cube = Cube::new(a.lattice_rank(), cutoff);
    let t = Compression::new(data, a, &cube);
    let mut v = vec![Complex64::new(0.0, 0.0); cube.len()];
    let origin = vec![0i64; cube.rank];
    v[cube.index(&origin).expect("origin")] = Complex64::new(1.0, 0.0);
    for axis in 0..cube.rank {
        for step in [-1i64, 1] {
            let mut p = origin.clone();
            p[axis] = step;
            if let Some(i) = cube.index(&p) {
                v[i] = Complex64::new(START_NEIGHBOUR_WEIGHT, 0.0);
            }
        }
    }
    let n0 = norm(&v);
    v.iter_mut().for_each(|z| *z /= n0);
    let mut best: f64 = 0.0;
    let mut prev = 0.0;
    for _ in 0..MAX_POWER_ITERATIONS {
        let w = t.apply(&v);
        let est = norm(&w);
        best = best.max(est);
        if prev > 0.0 && (est - prev).abs() <= POWER_REL_TOL * est {
            break;
        }
        prev = est;
        let u = t.apply_adjoint(&w);
        let nu = norm(&u);
        if nu == 0.0 {
            break;
        }
        v = u.into_iter().map(|z| z / nu).collect();
    }
    Ok(NormBracket { lower: best.min(upper), upper, truncation: cutoff })
}

/// `∫ G_ℏ(v)² dv = √det G / (2πℏ)^n`: the squared norm of the Gaussian in the
/// Hilbert module over a unital fiber.
pub fn gauss_l2_norm_sqr(data: &DeformationData) -> Result<f64> {
    let hbar = data.hbar();
    if !(hbar > 0.0) {
        return Err(DeformError::InvalidHbar(hbar));
    }
    Ok(data.metric().det().sqrt() / (2.0 * PI * hbar).powi(data.dim() as i32))
}

/// `c(ℏ)² = (2πℏ)^n (det G)^{3/2} ‖G_ℏ‖²` in `‖S_ℏ a‖² ≤ c(ℏ)² ‖a‖²_ℏ`.
///
/// With the scalar-fiber Gaussian norm this equals `(det G)²`, independent of
/// `ℏ`. Rejects `ℏ = 0`, where `S_0` is the identity.
pub fn smoothing_norm_constant(data: &DeformationData) -> Result<f64> {
    let n = data.dim() as i32;
    let l2 = gauss_l2_norm_sqr(data)?;
    Ok((2.0 * PI * data.hbar()).powi(n) * data.metric().det().powf(1.5) * l2)
}

/// Scalar profiles `ℏ ↦ f(ℏ)` with analytic sup and Lipschitz bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `Σ_i c_i ℏ^i`.
    Polynomial { coeffs: Vec<f64> },
    /// `e^{−rℏ}`.
    ExpDecay { rate: f64 },
    /// `f(ℏ + s)` with `s ≥ 0`.
    Shifted { shift: f64, profile: Box<Profile> },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(DeformError::InvalidArgument(format!("profile {what} must be finite")))
            }
        };
        match self {
            Profile::Constant { value } => finite(*value, "value"),
            Profile::Polynomial { coeffs } => coeffs.iter().try_for_each(|&c| finite(c, "coefficient")),
            Profile::ExpDecay { rate } => finite(*rate, "rate"),
            Profile::Shifted { shift, profile } => {
                if !(*shift >= 0.0 && shift.is_finite()) {
                    return Err(DeformError::InvalidArgument("profile shift must be finite and >= 0".into()));
                }
                profile.validate()
            }
        }
    }

    pub fn eval(&self, hbar: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * hbar + c),
            Profile::ExpDecay { rate } => (-rate * hbar).exp(),
            Profile::Shifted { shift, profile } => profile.eval(hbar + shift),
        }
    }

    /// Bound on `sup_{[0,H]} |f|`.
    pub fn sup_bound(&self, horizon: f64) -> f64 {
        match self {
            Profile::Constant { value } => value.abs(),
            Profile::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.abs() * horizon.powi(i as i32))
                .sum(),
            Profile::ExpDecay { rate } => 1f64.max((-rate * horizon).exp()),
            Profile::Shifted { shift, profile } => profile.sup_bound(horizon + shift),
        }
    }

    /// Bound on the Lipschitz constant on `[0,H]`.
    pub fn lipschitz_bound(&self, horizon: f64) -> f64 {
        match self {
            Profile::Constant { .. } => 0.0,
            Profile::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c.abs() * horizon.powi(i as i32 - 1))
                .sum(),
            Profile::ExpDecay { rate } => rate.abs() * 1f64.max((-rate * horizon).exp()),
            Profile::Shifted { shift, profile } => profile.lipschitz_bound(horizon + shift),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionTerm {
    pub profile: Profile,
    pub element: FourierElement,
}

/// A continuous section `ℏ ↦ Σ_n f_n(ℏ) a_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SectionRepr", into = "SectionRepr")]
pub struct Section {
    dim: usize,
    terms: Vec<SectionTerm>,
}

#[derive(Serialize, Deserialize)]
struct SectionRepr {
    dim: usize,
    terms: Vec<SectionTerm>,
}

impl TryFrom<SectionRepr> for Section {
    type Error = DeformError;

    fn try_from(r: SectionRepr) -> Result<Self> {
        Section::new(r.dim, r.terms)
    }
}

impl From<Section> for SectionRepr {
    fn from(s: Section) -> Self {
        SectionRepr { dim: s.dim, terms: s.terms }
    }
}

impl Section {
    pub fn new(dim: usize, terms: Vec<SectionTerm>) -> Result<Self> {
        for t in &terms {
            t.profile.validate()?;
            if t.element.dim() != dim {
                return Err(DeformError::DimensionMismatch { expected: dim, got: t.element.dim() });
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn constant(a: FourierElement) -> Self {
        Self {
            dim: a.dim(),
            terms: vec![SectionTerm { profile: Profile::Constant { value: 1.0 }, element: a }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[SectionTerm] {
        &self.terms
    }
}

pub fn evaluate_section(s: &Section, hbar: f64) -> Result<FourierElement> {
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(DeformError::InvalidHbar(hbar));
    }
    let mut out = FourierElement::zero(s.dim);
    for t in &s.terms {
        out = out.add(&t.element.scale_real(t.profile.eval(hbar)))?;
    }
    Ok(out)
}

/// `{0} ∪ {2^{−j} : j = 0..J}`, ascending.
pub fn geometric_grid(levels: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend((0..=levels).rev().map(|j| 0.5f64.powi(j as i32)));
    grid
}

/// Inserts the midpoint of every interval.
pub fn refine_grid(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = grid.last() {
        out.push(last);
    }
    out
}

/// Grids must be finite, strictly increasing and start at 0.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.first() != Some(&0.0)
        || grid.iter().any(|h| !h.is_finite())
        || grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DeformError::InvalidGrid);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub hbar: f64,
    pub value: Complex64,
    /// ℓ¹ bound on `‖S_ℏ s(ℏ) − S_ℏ' s(ℏ')‖` to the previous row (0 on the first).
    pub diff_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

pub const SCAN_CSV_HEADER: &str = "hbar,re_value,im_value,diff_upper";

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.hbar, r.value.re, r.value.im, r.diff_upper)
                .expect("writing to a String");
        }
        out
    }

    /// Largest `|value_{i+1} − value_i|`.
    pub fn max_jump(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (w[1].value - w[0].value).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|Δvalue| / Δℏ`.
    pub fn modulus_of_continuity(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (w[1].value - w[0].value).norm() / (w[1].hbar - w[0].hbar))
            .fold(0.0, f64::max)
    }

    pub fn max_diff_upper(&self) -> f64 {
        self.rows.iter().map(|r| r.diff_upper).fold(0.0, f64::max)
    }
}

fn smoothed_values(data: &DeformationData, s: &Section, grid: &[f64]) -> Result<Vec<FourierElement>> {
    validate_grid(grid)?;
    if s.dim != data.dim() {
        return Err(DeformError::DimensionMismatch { expected: data.dim(), got: s.dim });
    }
    grid.par_iter()
        .map(|&h| smooth(&data.with_hbar(h)?, &evaluate_section(s, h)?))
        .collect()
}

/// Consecutive differences `‖S_{ℏ_{i+1}}(s(ℏ_{i+1})) − S_{ℏ_i}(s(ℏ_i))‖`
/// (ℓ¹ upper bound); `θ` and `g` are taken from `data`, `ℏ` from the grid.
pub fn smoothing_continuity_scan(data: &DeformationData, s: &Section, grid: &[f64]) -> Result<Vec<f64>> {
    let values = smoothed_values(data, s, grid)?;
    values.windows(2).map(|w| Ok(w[1].sub(&w[0])?.l1_norm())).collect()
}

/// Rows `(ℏ, ω_ℏ(s(ℏ)), diff_upper)` in grid order. At `ℏ = 0` the value is
/// the classical `ω(s(0))` exactly.
pub fn state_field_scan(state: &MomentState, data: &DeformationData, s: &Section, grid: &[f64]) -> Result<ScanTable> {
    let smoothed = smoothed_values(data, s, grid)?;
    let values: Vec<Complex64> = grid
        .par_iter()
        .map(|&h| deformed_evaluate(state, &data.with_hbar(h)?, &evaluate_section(s, h)?))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(grid.len());
    for (i, (&hbar, &value)) in grid.iter().zip(&values).enumerate() {
        let diff_upper = if i == 0 { 0.0 } else { smoothed[i].sub(&smoothed[i - 1])?.l1_norm() };
        rows.push(ScanRow { hbar, value, diff_upper });
    }
    Ok(ScanTable { rows })
}

/// Analytic Lipschitz constant of `ℏ ↦ ω_ℏ(s(ℏ))` on `[0, H]`:
/// `Σ_n Σ_k |(a_n)_k| |m(k)| (Lip f_n + sup|f_n| λ(k)/4)`.
pub fn section_lipschitz_bound(state: &MomentState, data: &DeformationData, s: &Section, horizon: f64) -> f64 {
    s.terms
        .iter()
        .map(|t| {
            let lip = t.profile.lipschitz_bound(horizon);
            let sup = t.profile.sup_bound(horizon);
            t.element
                .terms()
                .map(|(k, c)| c.norm() * state.moment(k).norm() * (lip + sup * data.laplacian_symbol(k) / 4.0))
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn std_data(hbar: f64) -> DeformationData {
        DeformationData::standard(1, hbar).unwrap()
    }

    fn two_modes() -> FourierElement {
        FourierElement::from_terms(1, [([1, 0], c(1.0, 0.0)), ([0, 1], c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn single_modes_are_exact() {
        for hbar in [0.0, 0.5, 2.0 * PI * 0.6] {
            let b = norm_bracket(&std_data(hbar), &FourierElement::mode(1, [2, -1]), 4).unwrap();
            assert_eq!((b.lower, b.upper), (1.0, 1.0));
        }
        let b = norm_bracket(&std_data(0.3), &FourierElement::monomial(1, [0, 0], c(0.0, -2.5)), 1).unwrap();
        assert_eq!((b.lower, b.upper), (2.5, 2.5));
        let b = norm_bracket(&std_data(0.3), &FourierElement::zero(1), 2).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn cutoff_must_cover_support() {
        let err = norm_bracket(&std_data(0.0), &FourierElement::mode(1, [3, 0]), 2).unwrap_err();
        assert_eq!(err, DeformError::CutoffTooSmall { cutoff: 2, radius: 3 });
    }

    #[test]
    fn lower_bounds_increase_with_cutoff() {
        for hbar in [0.0, 1.0] {
            let mut prev = 0.0;
            for n in [4, 8, 16] {
                let b = norm_bracket(&std_data(hbar), &two_modes(), n).unwrap();
                assert!(b.lower >= prev && b.lower <= b.upper, "hbar {hbar} N {n}: {b:?}");
                prev = b.lower;
            }
        }
    }

    #[test]
    fn bracket_json_layout() {
        let b = NormBracket { lower: 1.0, upper: 2.0, truncation: 8 };
        assert_eq!(serde_json::to_value(b).unwrap(), serde_json::json!({"lower": 1.0, "upper": 2.0, "N": 8}));
    }

    #[test]
    fn norm_constant_is_det_squared() {
        for hbar in [0.1, 1.0, 7.0] {
            let v = smoothing_norm_constant(&std_data(hbar)).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(smoothing_norm_constant(&std_data(0.0)).is_err());
        assert!((gauss_l2_norm_sqr(&std_data(1.0)).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn section_examples() {
        let ek = FourierElement::mode(1, [1, 2]);
        let s = Section::constant(ek.clone());
        assert_eq!(evaluate_section(&s, 0.7).unwrap(), ek);
        let lin = Section::new(1, vec![SectionTerm { profile: Profile::Polynomial { coeffs: vec![0.0, 1.0] }, element: ek.clone() }]).unwrap();
        assert!(evaluate_section(&lin, 0.0).unwrap().is_empty());
        let mixed = Section::new(
            1,
            vec![
                SectionTerm { profile: Profile::ExpDecay { rate: 1.0 }, element: FourierElement::one(1) },
                SectionTerm { profile: Profile::Constant { value: 1.0 }, element: ek.clone() },
            ],
        )
        .unwrap();
        let v = evaluate_section(&mixed, 1.0).unwrap();
        assert_eq!(v.coeff(&LatticeIndex::zero(2)), c((-1.0f64).exp(), 0.0));
        assert_eq!(v.coeff(&[1, 2].into()), c(1.0, 0.0));
        assert!(evaluate_section(&mixed, -1.0).is_err());
        let bad = Profile::Shifted { shift: -1.0, profile: Box::new(Profile::Constant { value: 1.0 }) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn profile_bounds() {
        let p = Profile::Shifted { shift: 0.5, profile: Box::new(Profile::Polynomial { coeffs: vec![1.0, -2.0, 3.0] }) };
        let h = 2.0;
        let samples: Vec<f64> = (0..=400).map(|i| h * i as f64 / 400.0).collect();
        let sup = samples.iter().map(|&x| p.eval(x).abs()).fold(0.0, f64::max);
        assert!(sup <= p.sup_bound(h));
        let lip = samples.windows(2).map(|w| (p.eval(w[1]) - p.eval(w[0])).abs() / (w[1] - w[0])).fold(0.0, f64::max);
        assert!(lip <= p.lipschitz_bound(h));
        assert_eq!(p.eval(0.0), 1.0 - 1.0 + 0.75);
    }

    #[test]
    fn grids() {
        let g = geometric_grid(10);
        assert_eq!(g.len(), 12);
        assert_eq!((g[0], g[1], g[11]), (0.0, 0.5f64.powi(10), 1.0));
        assert!(validate_grid(&g).is_ok());
        assert_eq!(refine_grid(&[0.0, 0.5, 1.0]), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(validate_grid(&[0.1, 0.2]).is_err());
        assert!(validate_grid(&[0.0, 0.2, 0.2]).is_err());
    }

    #[test]
    fn scan_examples() {
        let data = std_data(0.0);
        let origin = MomentState::point(vec![0.0, 0.0]).unwrap();
        let grid = geometric_grid(10);
        let ones = state_field_scan(&origin, &data, &Section::constant(FourierElement::one(1)), &grid).unwrap();
        assert!(ones.rows.iter().all(|r| r.value == c(1.0, 0.0) && r.diff_upper == 0.0));
        let s = Section::constant(FourierElement::mode(1, [1, 0]));
        let table = state_field_scan(&origin, &data, &s, &grid).unwrap();
        for r in &table.rows {
            assert!((r.value.re - (-r.hbar / 4.0).exp()).abs() < 1e-15);
        }
        assert_eq!(table.rows[0].value, c(1.0, 0.0));
        assert!(table.modulus_of_continuity() <= section_lipschitz_bound(&origin, &data, &s, 1.0));
        let diffs = smoothing_continuity_scan(&data, &s, &grid).unwrap();
        for (d, w) in diffs.iter().zip(grid.windows(2)) {
            assert!((d - ((-w[0] / 4.0).exp() - (-w[1] / 4.0).exp())).abs() < 1e-15);
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("hbar,re_value,im_value,diff_upper\n"));
        assert_eq!(csv.lines().count(), 13);
        assert!(state_field_scan(&origin, &data, &s, &[0.5, 0.1]).is_err());
    }

    #[test]
    fn jumps_halve_under_refinement() {
        let data = std_data(0.0);
        let state = MomentState::point(vec![0.3, 0.1]).unwrap();
        let s = Section::new(
            1,
            vec![
                SectionTerm { profile: Profile::Polynomial { coeffs: vec![1.0, 0.5] }, element: FourierElement::mode(1, [1, 1]) },
                SectionTerm { profile: Profile::ExpDecay { rate: 2.0 }, element: FourierElement::mode(1, [0, -2]) },
            ],
        )
        .unwrap();
        let mut grid = geometric_grid(6);
        let mut prev = state_field_scan(&state, &data, &s, &grid).unwrap().max_jump();
        let mut ratio = 0.0;
        for _ in 0..4 {
            grid = refine_grid(&grid);
            let next = state_field_scan(&state, &data, &s, &grid).unwrap().max_jump();
            ratio = next / prev;
            prev = next;
        }
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }
}
