//! The deformed product `⋆_ℏ` as a twisted convolution of Fourier
//! coefficients:
//!
//! ```text
//! (a ⋆_ℏ b)_m = Σ_{k+l=m} a_k b_l σ_ℏ(k, l),   σ_ℏ(k, l) = exp(−(iℏ/2) kᵀ Θ^{-T} l).
//! ```
//!
//! The phase is what the oscillatory integral over `V × V` produces on a pair
//! of characters with Lebesgue measure normalized by `|det Θ| = 1`; the
//! `oracle` module recomputes it by quadrature (see
//! [`crate::oracle::calibrate_twist`]).

use num_complex::Complex64;
use serde_json::json;

use crate::error::Result;
use crate::frame::DeformationData;
use crate::lattice::{FourierElement, LatticeIndex};
use crate::report::VerificationReport;

/// The frozen sign convention, embedded in every report.
pub const TWIST_CONVENTION: &str = "sigma_hbar(k,l) = exp(-(i*hbar/2) * k^T Theta^{-T} l)";

/// The 2-cocycle `σ_ℏ` on the lattice.
#[derive(Debug, Clone)]
pub struct TwistCocycle<'a> {
    data: &'a DeformationData,
}

impl<'a> TwistCocycle<'a> {
    pub fn new(data: &'a DeformationData) -> Self {
        Self { data }
    }

    /// Phase angle of `σ_ℏ(k, l)`.
    pub fn angle(&self, k: &LatticeIndex, l: &LatticeIndex) -> f64 {
        -0.5 * self.data.hbar() * self.data.theta().dual_eval(k, l)
    }

    pub fn phase(&self, k: &LatticeIndex, l: &LatticeIndex) -> Complex64 {
        if self.data.hbar() == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, self.angle(k, l))
    }
}

/// `a ⋆_ℏ b` by a direct double loop over the two supports.
///
/// At `ℏ = 0` this is exactly [`FourierElement::multiply`].
pub fn star_product(
    data: &DeformationData,
    a: &FourierElement,
    b: &FourierElement,
) -> Result<FourierElement> {
    data.check_element(a)?;
    data.check_element(b)?;
    if data.hbar() == 0.0 {
        return a.multiply(b);
    }
    let sigma = TwistCocycle::new(data);
    let mut out = FourierElement::zero(a.dim());
    for (k, &ak) in a.terms() {
        for (l, &bl) in b.terms() {
            out.accumulate(k.add(l), ak * bl * sigma.phase(k, l));
        }
    }
    out.prune();
    Ok(out)
}

/// `a ⋆_ℏ b − b ⋆_ℏ a`.
pub fn star_commutator(
    data: &DeformationData,
    a: &FourierElement,
    b: &FourierElement,
) -> Result<FourierElement> {
    star_product(data, a, b)?.sub(&star_product(data, b, a)?)
}

/// Compares `τ(a ⋆_ℏ b)`, `τ(a·b)` and `τ(b ⋆_ℏ a)` for the Haar trace `τ`;
/// all three agree because the twist is trivial on pairs `(k, −k)`.
pub fn trace_identity_check(
    data: &DeformationData,
    a: &FourierElement,
    b: &FourierElement,
) -> VerificationReport {
    const TOL: f64 = 1e-12;
    let mut report = VerificationReport::new("trace_identity");
    let products = (
        star_product(data, a, b),
        a.multiply(b),
        star_product(data, b, a),
    );
    let (ab, classical, ba) = match products {
        (Ok(x), Ok(y), Ok(z)) => (x, y, z),
        _ => {
            report.pass = false;
            report.note("dimension mismatch between the factors");
            return report;
        }
    };
    let reference = classical.haar_trace();
    report.compare(
        json!({"side": "a*b", "hbar": data.hbar()}),
        reference,
        ab.haar_trace(),
        TOL,
    );
    report.compare(
        json!({"side": "b*a", "hbar": data.hbar()}),
        reference,
        ba.haar_trace(),
        TOL,
    );
    report
}
