use nalgebra::DMatrix;
use num_complex::Complex64;

/// `(M + M*)/2`.
pub(crate) fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigenvalues of the hermitian part of `m`, ascending.
///
/// Uses the real symmetric embedding `[[Re, −Im], [Im, Re]]`, whose spectrum
/// is that of the hermitian matrix with every eigenvalue doubled.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = hermitize(m);
    let n = h.nrows();
    if n == 0 {
        return Vec::new();
    }
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut eig: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    // Each eigenvalue appears twice; keep every other one.
    eig.into_iter().step_by(2).collect()
}

/// Largest distance of `m` from its adjoint.
pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_pauli_y() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let e = hermitian_eigenvalues(&m);
        assert_eq!(e.len(), 2);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert_eq!(hermiticity_defect(&m), 0.0);
    }

    #[test]
    fn rank_one_projector() {
        let v = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 1.0)];
        let m = DMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj());
        let e = hermitian_eigenvalues(&m);
        assert!(e[0].abs() < 1e-14 && e[1].abs() < 1e-14);
        assert!((e[2] - 4.0).abs() < 1e-13);
    }
}
