//! Classical states given by their moment functions `k ↦ ω(e_k)`, and their
//! deformations `ω_ℏ = ω ∘ S_ℏ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{DeformError, Result};
use crate::frame::DeformationData;
use crate::lattice::{FourierElement, LatticeIndex};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect};
use crate::product::star_product;
use crate::report::VerificationReport;
use crate::smoothing::{expansion_remainder_bound, smooth};

/// Tolerance on the total weight of a mixture.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Largest index set used by [`bochner_check`].
pub const MAX_BOCHNER_INDICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub enum MomentState {
    /// Evaluation at a point `x` of the torus: `m(k) = e^{ik·x}`.
    Point { x: Vec<f64> },
    /// The Haar trace: `m(k) = δ_{k,0}`.
    Haar,
    /// A finite convex combination.
    Mixture {
        weights: Vec<f64>,
        components: Vec<MomentState>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StateRepr {
    Point { x: Vec<f64> },
    Haar,
    Mixture {
        weights: Vec<f64>,
        components: Vec<MomentState>,
    },
}

impl TryFrom<StateRepr> for MomentState {
    type Error = DeformError;

    fn try_from(r: StateRepr) -> Result<Self> {
        match r {
            StateRepr::Point { x } => MomentState::point(x),
            StateRepr::Haar => Ok(MomentState::Haar),
            StateRepr::Mixture { weights, components } => MomentState::mixture(weights, components),
        }
    }
}

impl From<MomentState> for StateRepr {
    fn from(s: MomentState) -> Self {
        match s {
            MomentState::Point { x } => StateRepr::Point { x },
            MomentState::Haar => StateRepr::Haar,
            MomentState::Mixture { weights, components } => StateRepr::Mixture { weights, components },
        }
    }
}

impl MomentState {
    pub fn point(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() % 2 != 0 {
            return Err(DeformError::InvalidState(format!(
                "point must have a positive even number of coordinates, got {}",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DeformError::InvalidState("point coordinates must be finite".into()));
        }
        Ok(MomentState::Point { x })
    }

    pub fn haar() -> Self {
        MomentState::Haar
    }

    /// Weights must be strictly positive and sum to 1 within
    /// [`WEIGHT_SUM_TOL`]; components must agree on the lattice rank.
    pub fn mixture(weights: Vec<f64>, components: Vec<MomentState>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(DeformError::InvalidState(format!(
                "mixture needs one weight per component ({} weights, {} components)",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(DeformError::InvalidState("mixture weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(DeformError::InvalidState(format!("mixture weights sum to {total}, not 1")));
        }
        let mut rank = None;
        for c in &components {
            match (rank, c.lattice_rank()) {
                (Some(r), Some(s)) if r != s => {
                    return Err(DeformError::InvalidState(format!(
                        "mixture components disagree on dimension ({r} vs {s})"
                    )))
                }
                (None, s) => rank = s,
                _ => {}
            }
        }
        Ok(MomentState::Mixture { weights, components })
    }

    /// `2n` if the state pins it (point evaluations do; the Haar trace does not).
    pub fn lattice_rank(&self) -> Option<usize> {
        match self {
            MomentState::Point { x } => Some(x.len()),
            MomentState::Haar => None,
            MomentState::Mixture { components, .. } => components.iter().find_map(|c| c.lattice_rank()),
        }
    }

    pub fn moment(&self, k: &LatticeIndex) -> Complex64 {
        match self {
            MomentState::Point { x } => Complex64::from_polar(1.0, k.dot(x)),
            MomentState::Haar => {
                if k.is_zero() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            MomentState::Mixture { weights, components } => weights
                .iter()
                .zip(components)
                .map(|(w, c)| c.moment(k) * *w)
                .sum(),
        }
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        match self.lattice_rank() {
            Some(r) if r != rank => Err(DeformError::DimensionMismatch { expected: r, got: rank }),
            _ => Ok(()),
        }
    }
}

/// `ω(a) = Σ_k a_k m(k)`.
pub fn evaluate(state: &MomentState, a: &FourierElement) -> Result<Complex64> {
    state.check_rank(a.lattice_rank())?;
    Ok(a.terms().map(|(k, c)| c * state.moment(k)).sum())
}

/// `ω_ℏ(a) = ω(S_ℏ a)`.
pub fn deformed_evaluate(state: &MomentState, data: &DeformationData, a: &FourierElement) -> Result<Complex64> {
    evaluate(state, &smooth(data, a)?)
}

/// Compares `ω_ℏ(a)` with `Σ_{r<R} (1/r!)(ℏ/4)^r ω(Δ_g^r a)` against the
/// remainder bound `Σ_k |a_k||m(k)| (ℏλ(k)/4)^R / R!`.
pub fn state_expansion_check(state: &MomentState, data: &DeformationData, a: &FourierElement, order: usize) -> VerificationReport {
    let mut report = VerificationReport::new("state_expansion");
    if order == 0 {
        report.pass = false;
        report.note("expansion order must be at least 1");
        return report;
    }
    let exact = match deformed_evaluate(state, data, a) {
        Ok(v) => v,
        Err(e) => {
            report.pass = false;
            report.note(e.to_string());
            return report;
        }
    };
    let hbar = data.hbar();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut power = a.clone();
    let mut coeff = 1.0;
    for r in 0..order {
        if r > 0 {
            power = data.apply_laplacian(&power).expect("dimension checked");
            coeff *= hbar / 4.0 / r as f64;
        }
        partial += evaluate(state, &power).expect("dimension checked") * coeff;
    }
    let mut bound = 0.0;
    let mut slack = 0.0;
    for (k, c) in a.terms() {
        let weight = c.norm() * state.moment(k).norm();
        bound += weight * expansion_remainder_bound(data, k, order);
        // Rounding in the alternating partial sums.
        slack += weight * (hbar * data.laplacian_symbol(k) / 4.0).exp();
    }
    let tol = bound + 1e-14 * slack + 1e-15;
    report.compare(json!({"hbar": hbar, "order": order, "modes": a.len()}), exact, partial, tol);
    report
}

/// Square matrix over the undeformed algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixElement {
    entries: Vec<Vec<FourierElement>>,
}

impl MatrixElement {
    pub fn new(entries: Vec<Vec<FourierElement>>) -> Result<Self> {
        let m = entries.len();
        if m == 0 {
            return Err(DeformError::ShapeMismatch("matrix must have at least one row".into()));
        }
        if entries.iter().any(|row| row.len() != m) {
            return Err(DeformError::ShapeMismatch(format!("matrix must be {m}x{m}")));
        }
        let dim = entries[0][0].dim();
        if entries.iter().flatten().any(|e| e.dim() != dim) {
            return Err(DeformError::ShapeMismatch("entries must share one dimension".into()));
        }
        Ok(Self { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn dim(&self) -> usize {
        self.entries[0][0].dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &FourierElement {
        &self.entries[i][j]
    }

    /// `A* ⋆_ℏ A` with `(A*)_{ij} = (A_{ji})*`.
    pub fn star_square(&self, data: &DeformationData) -> Result<MatrixElement> {
        let m = self.size();
        let mut out = vec![vec![FourierElement::zero(self.dim()); m]; m];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for l in 0..m {
                    let term = star_product(data, &self.entries[l][i].involution(), &self.entries[l][j])?;
                    *cell = cell.add(&term)?;
                }
            }
        }
        MatrixElement::new(out)
    }
}

/// `Ω_ij = ω_ℏ((A* ⋆_ℏ A)_ij)`.
pub fn deformed_gram(state: &MomentState, data: &DeformationData, a: &MatrixElement) -> Result<DMatrix<Complex64>> {
    let sq = a.star_square(data)?;
    let m = a.size();
    let mut omega = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for i in 0..m {
        for j in 0..m {
            omega[(i, j)] = deformed_evaluate(state, data, sq.entry(i, j))?;
        }
    }
    Ok(omega)
}

/// Checks that `Ω` is hermitian and its smallest eigenvalue is at least
/// −1e-10.
pub fn matrix_deformed_positivity(state: &MomentState, data: &DeformationData, a: &MatrixElement) -> Result<VerificationReport> {
    let omega = deformed_gram(state, data, a)?;
    let mut report = VerificationReport::new("matrix_deformed_positivity");
    let scale = omega.iter().map(|z| z.norm()).fold(1.0, f64::max);
    report.push_case(
        json!({"quantity": "hermiticity", "size": a.size(), "hbar": data.hbar()}),
        Complex64::new(0.0, 0.0),
        Complex64::new(hermiticity_defect(&omega), 0.0),
        hermiticity_defect(&omega),
        1e-12 * scale,
    );
    let min = hermitian_eigenvalues(&omega).first().copied().unwrap_or(0.0);
    report.at_least(json!({"quantity": "min_eigenvalue", "size": a.size(), "hbar": data.hbar()}), 0.0, min, 1e-10);
    Ok(report)
}

/// The first `min(12, (2N+1)^{2n})` points of `{−N..N}^{2n}` in
/// lexicographic order.
pub fn bochner_indices(rank: usize, cutoff: usize) -> Vec<LatticeIndex> {
    let side = 2 * cutoff as i64 + 1;
    let mut out = Vec::new();
    let mut counter = vec![0i64; rank];
    'outer: loop {
        out.push(LatticeIndex::new(counter.iter().map(|&c| c - cutoff as i64).collect()));
        if out.len() == MAX_BOCHNER_INDICES {
            break;
        }
        // Last coordinate varies fastest.
        for d in (0..rank).rev() {
            counter[d] += 1;
            if counter[d] < side {
                continue 'outer;
            }
            counter[d] = 0;
        }
        break;
    }
    out
}

/// Smallest eigenvalue of `[m(k_i − k_j)]` over [`bochner_indices`] must be
/// at least −1e-10.
pub fn bochner_check(state: &MomentState, cutoff: usize) -> VerificationReport {
    let mut report = VerificationReport::new("bochner");
    if cutoff > MAX_BOCHNER_INDICES {
        report.pass = false;
        report.note(format!("cutoff must be at most {MAX_BOCHNER_INDICES}, got {cutoff}"));
        return report;
    }
    let indices = bochner_indices(state.lattice_rank().unwrap_or(2), cutoff);
    let gram = bochner_matrix(state, &indices);
    let min = hermitian_eigenvalues(&gram).first().copied().unwrap_or(0.0);
    report.at_least(json!({"cutoff": cutoff, "indices": indices.len()}), 0.0, min, 1e-10);
    report
}

pub(crate) fn bochner_matrix(state: &MomentState, indices: &[LatticeIndex]) -> DMatrix<Complex64> {
    let m = indices.len();
    DMatrix::from_fn(m, m, |i, j| state.moment(&indices[i].sub(&indices[j])))
}
