//! Trigonometric polynomials on the torus `T^{2n}` and the translation
//! action of `R^{2n}` on them.
//!
//! An element `a = Σ a_k e_k` is stored as a sparse map from lattice points
//! `k ∈ Z^{2n}` to complex amplitudes, where `e_k(x) = exp(i k·x)`. Zero
//! amplitudes are never stored, so two elements are equal exactly when their
//! maps are equal.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DeformError, Result};

/// Amplitudes with modulus below this are dropped after every operation.
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Default number of sample points per circle for sup-norm estimates.
pub const DEFAULT_GRID_DENSITY: usize = 64;

/// A point of the lattice `Z^{2n}`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeIndex(Vec<i64>);

impl LatticeIndex {
    pub fn new(components: Vec<i64>) -> Self {
        Self(components)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// The `i`-th unit vector of `Z^len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    /// `k·u` for a real vector `u` of the same length.
    pub fn dot(&self, u: &[f64]) -> f64 {
        self.0.iter().zip(u).map(|(&k, &x)| k as f64 * x).sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&k| k as f64).collect()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|k| k.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for LatticeIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticeIndex {
    fn from(v: [i64; N]) -> Self {
        Self(v.to_vec())
    }
}

/// Derivative order and sampling density for the sup-norm brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeminormSpec {
    pub order: usize,
    pub grid_density: usize,
}

impl SeminormSpec {
    pub fn new(order: usize, grid_density: usize) -> Result<Self> {
        if grid_density == 0 {
            return Err(DeformError::InvalidArgument(
                "grid_density must be at least 1".into(),
            ));
        }
        Ok(Self {
            order,
            grid_density,
        })
    }

    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            grid_density: DEFAULT_GRID_DENSITY,
        }
    }
}

/// Certified bracket `lower ≤ ‖a‖ ≤ upper` for a sup-type norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormBracket {
    pub lower: f64,
    pub upper: f64,
}

/// A trigonometric polynomial `Σ a_k e_k` on `T^{2n}`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct FourierElement {
    dim: usize,
    coeffs: BTreeMap<LatticeIndex, Complex64>,
}

impl FourierElement {
    /// The zero element of `A^∞` over `T^{2 dim}`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit `e_0`.
    pub fn one(dim: usize) -> Self {
        Self::mode(dim, LatticeIndex::zero(2 * dim))
    }

    /// A single character `e_k`. Panics if `k` has the wrong length.
    pub fn mode(dim: usize, k: impl Into<LatticeIndex>) -> Self {
        Self::monomial(dim, k, Complex64::new(1.0, 0.0))
    }

    /// `c·e_k`. Panics if `k` has the wrong length.
    pub fn monomial(dim: usize, k: impl Into<LatticeIndex>, c: Complex64) -> Self {
        let k = k.into();
        assert_eq!(k.len(), 2 * dim, "lattice index length must be 2n");
        let mut out = Self::zero(dim);
        out.accumulate(k, c);
        out
    }

    /// Builds an element from `(k, a_k)` pairs, summing repeated indices.
    pub fn from_terms<I, K>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Complex64)>,
        K: Into<LatticeIndex>,
    {
        if dim == 0 {
            return Err(DeformError::InvalidArgument("dim must be at least 1".into()));
        }
        let mut out = Self::zero(dim);
        for (k, c) in terms {
            let k = k.into();
            if k.len() != 2 * dim {
                return Err(DeformError::DimensionMismatch {
                    expected: 2 * dim,
                    got: k.len(),
                });
            }
            *out.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Length `2n` of the lattice indices.
    pub fn lattice_rank(&self) -> usize {
        2 * self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &LatticeIndex) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &LatticeIndex> {
        self.coeffs.keys()
    }

    /// Largest absolute lattice coordinate in the support (0 when empty).
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(LatticeIndex::max_abs).max().unwrap_or(0)
    }

    /// `Σ_k |a_k|`, the ℓ¹ norm of the coefficient sequence.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `Σ_k |a_k|²`.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(k)).norm());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_coeff_distance(&self.involution()) <= tol
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(DeformError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, k: LatticeIndex, c: Complex64) {
        *self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub(crate) fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= ZERO_THRESHOLD);
    }

    /// Applies a Fourier multiplier `a_k ↦ f(k)·a_k`.
    pub fn map_coeffs(&self, mut f: impl FnMut(&LatticeIndex, Complex64) -> Complex64) -> Self {
        let mut out = Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, &c)| (k.clone(), f(k, c)))
                .collect(),
        };
        out.prune();
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (k, &c) in &other.coeffs {
            out.accumulate(k.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (k, &c) in &other.coeffs {
            out.accumulate(k.clone(), -c);
        }
        out.prune();
        Ok(out)
    }

    /// Pointwise product of functions, i.e. plain convolution of the
    /// coefficient sequences.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (k, &a) in &self.coeffs {
            for (l, &b) in &other.coeffs {
                out.accumulate(k.add(l), a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Complex conjugation of functions: `(a*)_k = conj(a_{-k})`.
    pub fn involution(&self) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.neg(), c.conj())).collect(),
        }
    }

    /// Translation `α_u`: `a_k ↦ e^{i k·u} a_k`.
    pub fn act(&self, u: &[f64]) -> Result<Self> {
        if u.len() != self.lattice_rank() {
            return Err(DeformError::DimensionMismatch {
                expected: self.lattice_rank(),
                got: u.len(),
            });
        }
        Ok(self.map_coeffs(|k, c| c * Complex64::from_polar(1.0, k.dot(u))))
    }

    /// `∂^β a`, the mixed derivative of `u ↦ α_u(a)` at `u = 0`:
    /// `a_k ↦ (ik)^β a_k`.
    pub fn derivative(&self, beta: &[usize]) -> Result<Self> {
        if beta.len() != self.lattice_rank() {
            return Err(DeformError::DimensionMismatch {
                expected: self.lattice_rank(),
                got: beta.len(),
            });
        }
        let order: usize = beta.iter().sum();
        let i_pow = Complex64::i().powu(order as u32);
        Ok(self.map_coeffs(|k, c| c * i_pow * monomial_weight(k, beta)))
    }

    /// Value of the function at a point `x ∈ T^{2n}`.
    pub fn evaluate_at(&self, x: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, k.dot(x)))
            .sum()
    }

    /// Bracket for `‖a‖_{∞,μ} = max_{|β|≤μ} sup_x |∂^β a(x)|`.
    ///
    /// The lower end is the maximum over a uniform grid with
    /// `spec.grid_density` points per circle (always containing `x = 0`), the
    /// upper end the ℓ¹ bound `max_β Σ_k |k^β| |a_k|`.
    pub fn seminorm(&self, spec: &SeminormSpec) -> SeminormBracket {
        let rank = self.lattice_rank();
        let betas = multi_indices_up_to(rank, spec.order);
        let density = spec.grid_density.max(1);
        let step = 2.0 * std::f64::consts::PI / density as f64;

        let mut upper: f64 = 0.0;
        let mut lower: f64 = 0.0;
        for beta in &betas {
            let weighted: Vec<(Vec<f64>, f64)> = self
                .coeffs
                .iter()
                .map(|(k, c)| (k.as_f64(), c.norm() * monomial_weight(k, beta).abs()))
                .collect();
            upper = upper.max(weighted.iter().map(|(_, w)| w).sum());

            // Derivative coefficients, then sample on the grid.
            let deriv = self.derivative(beta).expect("beta has the lattice rank");
            let mut counter = vec![0usize; rank];
            let mut x = vec![0.0; rank];
            loop {
                for (xi, &ci) in x.iter_mut().zip(&counter) {
                    *xi = ci as f64 * step;
                }
                lower = lower.max(deriv.evaluate_at(&x).norm());
                if !advance_counter(&mut counter, density) {
                    break;
                }
            }
        }
        // Rounding in the grid evaluation can overshoot the exact ℓ¹ bound.
        SeminormBracket {
            lower: lower.min(upper),
            upper,
        }
    }

    /// The canonical tracial state: `a ↦ a_0`.
    pub fn haar_trace(&self) -> Complex64 {
        self.coeff(&LatticeIndex::zero(self.lattice_rank()))
    }
}

impl fmt::Debug for FourierElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (k, c) in &self.coeffs {
            map.entry(k, c);
        }
        map.finish()
    }
}

/// `Π_i k_i^{β_i}` as a real number.
fn monomial_weight(k: &LatticeIndex, beta: &[usize]) -> f64 {
    k.components()
        .iter()
        .zip(beta)
        .map(|(&ki, &b)| (ki as f64).powi(b as i32))
        .product()
}

/// Odometer increment over `{0..base}^len`; returns false after the last state.
fn advance_counter(counter: &mut [usize], base: usize) -> bool {
    for c in counter.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

/// All multi-indices of the given length with total degree at most `max_degree`,
/// ordered by degree and then lexicographically.
pub fn multi_indices_up_to(len: usize, max_degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for degree in 0..=max_degree {
        multi_indices_of_degree(len, degree, &mut Vec::with_capacity(len), &mut out);
    }
    out
}

fn multi_indices_of_degree(
    len: usize,
    remaining: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if prefix.len() + 1 == len {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    if len == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for first in (0..=remaining).rev() {
        prefix.push(first);
        multi_indices_of_degree(len, remaining - first, prefix, out);
        prefix.pop();
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

impl From<FourierElement> for ElementRepr {
    fn from(a: FourierElement) -> Self {
        ElementRepr {
            dim: a.dim,
            terms: a
                .coeffs
                .into_iter()
                .map(|(k, c)| TermRepr {
                    k: k.0,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<ElementRepr> for FourierElement {
    type Error = DeformError;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        FourierElement::from_terms(
            repr.dim,
            repr.terms
                .into_iter()
                .map(|t| (LatticeIndex(t.k), Complex64::new(t.re, t.im))),
        )
    }
}
