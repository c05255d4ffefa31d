//! Gauss–Hermite rules for `∫ e^{−x²} f(x) dx` over the real line and their
//! tensor products.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DeformError, Result};

/// Largest supported order; beyond it the unscaled recurrence overflows.
pub const MAX_ORDER: usize = 640;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes are the eigenvalues of the Jacobi matrix of the Hermite
    /// recurrence, polished by Newton steps on the orthonormal recurrence;
    /// weights follow from the derivative at each node.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(DeformError::InvalidArgument(format!(
                "Gauss-Hermite order must be in 1..={MAX_ORDER}, got {order}"
            )));
        }
        let n = order;
        let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        guesses.sort_by(|a, b| a.total_cmp(b));
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (i, &guess) in guesses.iter().enumerate() {
            // Exact symmetry: polish the non-negative half and mirror it.
            if i < n / 2 {
                nodes.push(0.0);
                weights.push(0.0);
                continue;
            }
            let mut z = if n % 2 == 1 && i == n / 2 { 0.0 } else { guess };
            let mut dp = orthonormal_hermite(n, z).1;
            for _ in 0..8 {
                let (p, d) = orthonormal_hermite(n, z);
                dp = d;
                if p == 0.0 {
                    break;
                }
                let step = p / d;
                z -= step;
                if step.abs() <= 1e-16 * z.abs().max(1.0) {
                    dp = orthonormal_hermite(n, z).1;
                    break;
                }
            }
            nodes.push(z);
            weights.push(2.0 / (dp * dp));
        }
        for i in 0..n / 2 {
            nodes[i] = -nodes[n - 1 - i];
            weights[i] = weights[n - 1 - i];
        }
        Ok(Self { nodes, weights })
    }

    /// Shared rule of the given order, built once per process.
    pub fn cached(order: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("cache lock").get(&order) {
            return Ok(rule.clone());
        }
        let rule = Arc::new(Self::new(order)?);
        cache.lock().expect("cache lock").insert(order, rule.clone());
        Ok(rule)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    /// `∫_{R^dim} e^{−|x|²} f(x) dx` on the tensor grid.
    ///
    /// The outermost axis is split across threads; partial sums are reduced
    /// in axis order, so the result does not depend on scheduling.
    pub fn integrate_tensor<F>(&self, dim: usize, f: F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        if dim == 0 {
            return f(&[]);
        }
        let order = self.order();
        let partials: Vec<Complex64> = (0..order)
            .into_par_iter()
            .map(|first| {
                let mut idx = vec![0usize; dim];
                idx[0] = first;
                let mut x = vec![0.0; dim];
                let mut acc = Complex64::new(0.0, 0.0);
                loop {
                    let mut w = 1.0;
                    for (d, &i) in idx.iter().enumerate() {
                        x[d] = self.nodes[i];
                        w *= self.weights[i];
                    }
                    if w > 0.0 {
                        acc += f(&x) * w;
                    }
                    // Odometer over axes 1..dim.
                    let mut d = 1;
                    loop {
                        if d == dim {
                            return acc;
                        }
                        idx[d] += 1;
                        if idx[d] < order {
                            break;
                        }
                        idx[d] = 0;
                        d += 1;
                    }
                }
            })
            .collect();
        partials.into_iter().sum()
    }
}

/// Orthonormal Hermite function pair `(p_n(x), p_n'(x))` with respect to the
/// weight `e^{−x²}`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0;
    let mut p = PI.powf(-0.25);
    for j in 1..=n {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * p - ((jf - 1.0) / jf).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    (p, (2.0 * n as f64).sqrt() * p_prev)
}

/// Trapezoid rule for `∫_{[−r, r]^dim} e^{−|x|²} f(x) dx` with `points` nodes
/// per axis. Used when Gauss–Hermite refinement stalls.
pub fn trapezoid_tensor<F>(dim: usize, radius: f64, points: usize, f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let points = points.max(2);
    let h = 2.0 * radius / (points - 1) as f64;
    let axis: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let x = -radius + i as f64 * h;
            let end = if i == 0 || i + 1 == points { 0.5 } else { 1.0 };
            (x, end * h * (-x * x).exp())
        })
        .collect();
    let partials: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dim];
            idx[0] = first;
            let mut x = vec![0.0; dim];
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                let mut w = 1.0;
                for (d, &i) in idx.iter().enumerate() {
                    x[d] = axis[i].0;
                    w *= axis[i].1;
                }
                acc += f(&x) * w;
                let mut d = 1;
                loop {
                    if d == dim {
                        return acc;
                    }
                    idx[d] += 1;
                    if idx[d] < points {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
            }
        })
        .collect();
    partials.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_moment(k: u32) -> f64 {
        // ∫ x^k e^{−x²} dx = Γ((k+1)/2) for even k.
        if k % 2 == 1 {
            return 0.0;
        }
        let mut v = PI.sqrt();
        let mut j = 1;
        while j < k {
            v *= j as f64 / 2.0;
            j += 2;
        }
        v
    }

    #[test]
    fn exact_on_polynomials() {
        for order in [1, 2, 5, 8, 16, 33] {
            let rule = GaussHermite::new(order).unwrap();
            for k in 0..(2 * order as u32).min(40) {
                let got = rule.integrate(|x| Complex64::new(x.powi(k as i32), 0.0)).re;
                let expected = gaussian_moment(k);
                let scale: f64 = rule.integrate(|x| Complex64::new(x.abs().powi(k as i32), 0.0)).re;
                assert!(
                    (got - expected).abs() <= 1e-13 * scale.max(1.0),
                    "order {order} moment {k}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn cosine_transform() {
        let rule = GaussHermite::new(40).unwrap();
        let got = rule.integrate(|x| Complex64::new(0.0, 2.0 * x).exp());
        let expected = PI.sqrt() * (-1.0f64).exp();
        assert!((got.re - expected).abs() < 1e-14 && got.im.abs() < 1e-14);
    }

    #[test]
    fn high_orders_are_stable() {
        for order in [128, 256, 512, MAX_ORDER] {
            let rule = GaussHermite::new(order).unwrap();
            let total: f64 = rule.weights().iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12, "order {order}: {total}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
        assert!(GaussHermite::new(0).is_err());
        assert!(GaussHermite::new(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn tensor_matches_product_of_axes() {
        let rule = GaussHermite::new(20).unwrap();
        let one_d = rule.integrate(|x| Complex64::new(0.0, 0.7 * x).exp());
        let three_d = rule.integrate_tensor(3, |x| Complex64::new(0.0, 0.7 * (x[0] + x[1] + x[2])).exp());
        assert!((three_d - one_d * one_d * one_d).norm() < 1e-13);
    }

    #[test]
    fn trapezoid_agrees_on_gaussian() {
        let got = trapezoid_tensor(2, 7.0, 121, |x| Complex64::new(0.0, x[0] - x[1]).exp());
        let expected = PI * (-0.5f64).exp();
        assert!((got.re - expected).abs() < 1e-12, "{got}");
    }
}
