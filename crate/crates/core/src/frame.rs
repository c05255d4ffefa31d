//! Geometric data of the deformation: the symplectic form, a compatible
//! metric, the complex frame adapted to both, and the Laplacian symbol.
//!
//! Matrices act on `V = R^{2n}` in lattice coordinates: `θ(u, v) = uᵀ Θ v`
//! and `g(u, v) = uᵀ G v`. Lebesgue measure is normalized so that
//! `|det Θ| = 1`; with a compatible metric this forces `det G = 1` as well.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DeformError, Result};
use crate::lattice::{FourierElement, LatticeIndex};

/// Tolerance for antisymmetry, normalization and compatibility checks.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

/// Non-degenerate antisymmetric form `Θ` with `|det Θ| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DMatrix<f64>,
    /// `Θ^{-T}`, the form induced on the dual lattice.
    dual: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || dim % 2 != 0 || matrix.ncols() != dim {
            return Err(DeformError::InvalidSymplecticForm(format!(
                "expected an even square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix + matrix.transpose()).amax();
        if asym > COMPATIBILITY_TOL {
            return Err(DeformError::InvalidSymplecticForm(format!(
                "not antisymmetric (|Θ + Θᵀ| = {asym:.3e})"
            )));
        }
        let det = matrix.determinant();
        if (det.abs() - 1.0).abs() > COMPATIBILITY_TOL * dim as f64 {
            return Err(DeformError::InvalidSymplecticForm(format!(
                "|det Θ| must be 1, got {}",
                det.abs()
            )));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| DeformError::InvalidSymplecticForm("degenerate".into()))?;
        Ok(Self {
            dual: inverse.transpose(),
            matrix,
        })
    }

    /// The standard form `[[0, I], [-I, 0]]` on `R^{2n}`.
    pub fn standard(n: usize) -> Self {
        Self::new(standard_block(n)).expect("standard form is valid")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dual(&self) -> &DMatrix<f64> {
        &self.dual
    }

    /// Half-dimension `n`.
    pub fn half_dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.matrix, u, v)
    }

    /// `θ*(k, l) = kᵀ Θ^{-T} l` on lattice points.
    pub fn dual_eval(&self, k: &LatticeIndex, l: &LatticeIndex) -> f64 {
        bilinear(&self.dual, &k.as_f64(), &l.as_f64())
    }
}

/// Positive definite inner product `g` on `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl Metric {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || matrix.ncols() != dim {
            return Err(DeformError::NotPositiveDefinite("not a square matrix".into()));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > COMPATIBILITY_TOL {
            return Err(DeformError::NotPositiveDefinite(format!(
                "not symmetric (|G - Gᵀ| = {asym:.3e})"
            )));
        }
        let chol = matrix
            .clone()
            .cholesky()
            .ok_or_else(|| DeformError::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        let det = matrix.determinant();
        Ok(Self {
            inverse: chol.inverse(),
            matrix,
            det,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is positive definite")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        bilinear(&self.matrix, u, v)
    }

    /// `kᵀ G⁻¹ k`.
    pub fn dual_norm_sqr(&self, k: &LatticeIndex) -> f64 {
        let kf = k.as_f64();
        bilinear(&self.inverse, &kf, &kf)
    }
}

/// Basis `{e_1..e_n, f_1..f_n}` of `V` (stored as columns) in which `g` is
/// the identity and `θ` is the standard block form.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleFrame {
    basis: DMatrix<f64>,
}

impl CompatibleFrame {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn half_dim(&self) -> usize {
        self.basis.ncols() / 2
    }

    /// Complex components `κ_j(k) = k·e_j + i k·f_j` of a lattice point.
    ///
    /// `|κ(k)|² = kᵀ G⁻¹ k` and `Im Σ_j conj(κ_j(k)) κ_j(l) = θ*(k, l)`.
    pub fn kappa(&self, k: &LatticeIndex) -> Vec<Complex64> {
        let n = self.half_dim();
        let kf = k.as_f64();
        (0..n)
            .map(|j| {
                let e = self.basis.column(j);
                let f = self.basis.column(n + j);
                let re: f64 = kf.iter().zip(e.iter()).map(|(a, b)| a * b).sum();
                let im: f64 = kf.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
                Complex64::new(re, im)
            })
            .collect()
    }

    /// Largest deviation of `BᵀGB` from `I` and of `BᵀΘB` from the standard form.
    pub fn residuals(&self, theta: &SymplecticForm, g: &Metric) -> (f64, f64) {
        let n = self.half_dim();
        let bt = self.basis.transpose();
        let g_res = (&bt * g.matrix() * &self.basis - DMatrix::<f64>::identity(2 * n, 2 * n)).amax();
        let t_res = (&bt * theta.matrix() * &self.basis - standard_block(n)).amax();
        (g_res, t_res)
    }
}

/// `‖J² + I‖_max` for `J = G⁻¹Θ`; zero exactly when `g` is compatible with `θ`.
pub fn compatibility_residual(theta: &SymplecticForm, g: &Metric) -> f64 {
    let dim = theta.matrix().nrows();
    let j = g.inverse() * theta.matrix();
    (&j * &j + DMatrix::<f64>::identity(dim, dim)).amax()
}

/// Symplectic Gram–Schmidt for a compatible pair.
///
/// Candidate vectors are the coordinate axes in index order; each is made
/// `g`-orthogonal to the frame built so far, normalized, and sign-fixed so its
/// first nonzero entry is positive. Its partner is `f = J e` with
/// `J = Θ⁻¹G`, which gives `θ(e, f) = 1` and `g(f, f) = 1`.
pub fn build_compatible_frame(theta: &SymplecticForm, g: &Metric) -> Result<CompatibleFrame> {
    let dim = theta.matrix().nrows();
    if g.matrix().nrows() != dim {
        return Err(DeformError::DimensionMismatch {
            expected: dim,
            got: g.matrix().nrows(),
        });
    }
    let residual = compatibility_residual(theta, g);
    if residual > COMPATIBILITY_TOL {
        return Err(DeformError::Incompatible {
            residual,
            tol: COMPATIBILITY_TOL,
        });
    }
    let n = dim / 2;
    let theta_inv = theta
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| DeformError::InvalidSymplecticForm("degenerate".into()))?;
    let complex_structure = theta_inv * g.matrix();

    let mut es: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    let mut fs: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    for axis in 0..dim {
        if es.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::<f64>::zeros(dim);
        v[axis] = 1.0;
        // Two passes of classical Gram–Schmidt keep the frame orthonormal to
        // rounding level.
        for _ in 0..2 {
            for w in es.iter().chain(fs.iter()) {
                let proj = (w.transpose() * g.matrix() * &v)[(0, 0)];
                v -= w * proj;
            }
        }
        let norm = (v.transpose() * g.matrix() * &v)[(0, 0)].sqrt();
        if norm < 1e-8 {
            continue;
        }
        v /= norm;
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        let f = &complex_structure * &v;
        es.push(v);
        fs.push(f);
    }
    debug_assert_eq!(es.len(), n);

    let mut basis = DMatrix::<f64>::zeros(dim, dim);
    for (j, (e, f)) in es.iter().zip(&fs).enumerate() {
        basis.set_column(j, e);
        basis.set_column(n + j, f);
    }
    Ok(CompatibleFrame { basis })
}

/// Everything that fixes the deformed algebra at one value of `ℏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationData {
    theta: SymplecticForm,
    g: Metric,
    frame: CompatibleFrame,
    hbar: f64,
}

impl DeformationData {
    pub fn new(theta: SymplecticForm, g: Metric, hbar: f64) -> Result<Self> {
        if !hbar.is_finite() || hbar < 0.0 {
            return Err(DeformError::InvalidHbar(hbar));
        }
        let frame = build_compatible_frame(&theta, &g)?;
        Ok(Self {
            theta,
            g,
            frame,
            hbar,
        })
    }

    /// Standard form with the identity metric on `R^{2n}`.
    pub fn standard(n: usize, hbar: f64) -> Result<Self> {
        Self::new(SymplecticForm::standard(n), Metric::identity(2 * n), hbar)
    }

    /// Same geometry at a different deformation parameter.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        if !hbar.is_finite() || hbar < 0.0 {
            return Err(DeformError::InvalidHbar(hbar));
        }
        Ok(Self {
            hbar,
            ..self.clone()
        })
    }

    pub fn theta(&self) -> &SymplecticForm {
        &self.theta
    }

    pub fn metric(&self) -> &Metric {
        &self.g
    }

    pub fn frame(&self) -> &CompatibleFrame {
        &self.frame
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Half-dimension `n`.
    pub fn dim(&self) -> usize {
        self.theta.half_dim()
    }

    pub(crate) fn check_element(&self, a: &FourierElement) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(DeformError::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(())
    }

    /// `λ(k) = kᵀ G⁻¹ k`, so that `Δ_g e_k = −λ(k) e_k`.
    pub fn laplacian_symbol(&self, k: &LatticeIndex) -> f64 {
        self.g.dual_norm_sqr(k)
    }

    /// `Δ_g a = Σ_ij (G⁻¹)^{ij} ∂_i ∂_j a`, applied as the multiplier `−λ(k)`.
    pub fn apply_laplacian(&self, a: &FourierElement) -> Result<FourierElement> {
        self.check_element(a)?;
        Ok(a.map_coeffs(|k, c| c * -self.laplacian_symbol(k)))
    }
}

#[derive(Serialize, Deserialize)]
struct DataRepr {
    n: usize,
    theta: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    hbar: f64,
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(DeformError::ShapeMismatch(format!("{what} must be {dim}x{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl Serialize for DeformationData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DataRepr {
            n: self.dim(),
            theta: matrix_to_rows(self.theta.matrix()),
            g: matrix_to_rows(self.g.matrix()),
            hbar: self.hbar,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeformationData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DataRepr::deserialize(d)?;
        DeformationData::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<DataRepr> for DeformationData {
    type Error = DeformError;

    fn try_from(repr: DataRepr) -> Result<Self> {
        if repr.n == 0 {
            return Err(DeformError::InvalidArgument("n must be at least 1".into()));
        }
        let dim = 2 * repr.n;
        let theta = SymplecticForm::new(matrix_from_rows(&repr.theta, dim, "theta")?)?;
        let g = Metric::new(matrix_from_rows(&repr.g, dim, "g")?)?;
        DeformationData::new(theta, g, repr.hbar)
    }
}

/// `[[0, I_n], [-I_n, 0]]`.
pub fn standard_block(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

fn bilinear(m: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            acc += ui * m[(i, j)] * vj;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(entries: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries))
    }

    #[test]
    fn standard_pair_gives_identity_frame() {
        let frame =
            build_compatible_frame(&SymplecticForm::standard(1), &Metric::identity(2)).unwrap();
        assert_eq!(frame.basis(), &DMatrix::<f64>::identity(2, 2));
        let frame2 =
            build_compatible_frame(&SymplecticForm::standard(2), &Metric::identity(4)).unwrap();
        assert_eq!(frame2.basis(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn rescaled_metric_frame() {
        let theta = SymplecticForm::standard(1);
        let g = Metric::new(diag(&[4.0, 0.25])).unwrap();
        let frame = build_compatible_frame(&theta, &g).unwrap();
        let (gr, tr) = frame.residuals(&theta, &g);
        assert!(gr < 1e-12 && tr < 1e-12, "{gr} {tr}");
        // e_1 is the g-normalized first axis, f_1 = J e_1.
        let b = frame.basis();
        assert!((b[(0, 0)] - 0.5).abs() < 1e-15 && b[(1, 0)] == 0.0);
        assert!((b[(1, 1)] - 2.0).abs() < 1e-15 && b[(0, 1)] == 0.0);
    }

    #[test]
    fn incompatible_pair_is_rejected() {
        let err = build_compatible_frame(
            &SymplecticForm::standard(1),
            &Metric::new(diag(&[1.0, 2.0])).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, DeformError::Incompatible { .. }));
        assert!(DeformationData::new(
            SymplecticForm::standard(1),
            Metric::new(diag(&[1.0, 2.0])).unwrap(),
            1.0
        )
        .is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(Metric::new(diag(&[1.0, -1.0])).is_err());
        assert!(Metric::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).is_err());
        assert!(SymplecticForm::new(DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0])).is_err());
        assert!(SymplecticForm::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).is_err());
        assert!(SymplecticForm::new(DMatrix::<f64>::zeros(3, 3)).is_err());
        assert!(DeformationData::standard(1, -0.1).is_err());
        assert!(DeformationData::standard(1, f64::NAN).is_err());
    }

    #[test]
    fn reversed_orientation_is_compatible() {
        let theta = SymplecticForm::new(-standard_block(1)).unwrap();
        let g = Metric::identity(2);
        let frame = build_compatible_frame(&theta, &g).unwrap();
        let (gr, tr) = frame.residuals(&theta, &g);
        assert!(gr < 1e-15 && tr < 1e-15);
    }

    #[test]
    fn laplacian_symbol_values() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        assert_eq!(data.laplacian_symbol(&[0, 0].into()), 0.0);
        assert_eq!(data.laplacian_symbol(&[1, 0].into()), 1.0);
        assert_eq!(data.laplacian_symbol(&[1, 1].into()), 2.0);
    }

    #[test]
    fn laplacian_on_modes() {
        let data = DeformationData::standard(1, 1.0).unwrap();
        assert!(data.apply_laplacian(&FourierElement::one(1)).unwrap().is_empty());
        let a = FourierElement::mode(1, [1, 0]);
        assert_eq!(data.apply_laplacian(&a).unwrap(), a.scale_real(-1.0));
        let b = a.add(&FourierElement::mode(1, [1, 1])).unwrap();
        let expected = a.scale_real(-1.0).add(&FourierElement::mode(1, [1, 1]).scale_real(-2.0)).unwrap();
        assert_eq!(data.apply_laplacian(&b).unwrap(), expected);
        assert!(data.apply_laplacian(&FourierElement::one(2)).is_err());
    }

    #[test]
    fn kappa_reproduces_metric_and_form() {
        let theta = SymplecticForm::standard(1);
        let g = Metric::new(diag(&[4.0, 0.25])).unwrap();
        let frame = build_compatible_frame(&theta, &g).unwrap();
        let k: LatticeIndex = [2, -1].into();
        let l: LatticeIndex = [1, 3].into();
        let kk = frame.kappa(&k);
        let kl = frame.kappa(&l);
        assert!((kk[0].norm_sqr() - g.dual_norm_sqr(&k)).abs() < 1e-12);
        let im = (kk[0].conj() * kl[0]).im;
        assert!((im - theta.dual_eval(&k, &l)).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"n":1,"theta":[[0.0,1.0],[-1.0,0.0]],"g":[[4.0,0.0],[0.0,0.25]],"hbar":0.5}"#;
        let data: DeformationData = serde_json::from_str(json).unwrap();
        assert_eq!(data.hbar(), 0.5);
        assert_eq!(serde_json::to_string(&data).unwrap(), json);
        let bad = r#"{"n":1,"theta":[[0.0,1.0],[-1.0,0.0]],"g":[[1.0,0.0],[0.0,2.0]],"hbar":0.5}"#;
        assert!(serde_json::from_str::<DeformationData>(bad).is_err());
    }
}
