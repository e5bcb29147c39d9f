use crate::error::{Error, Result};
use crate::sdp::{
    farkas_combination, farkas_margin, farkas_scale, max_eigenvalue, FarkasCertificate,
    SdpProblem,
};

/// Result of independently re-checking a Farkas certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FarkasCheck {
    pub margin: f64,
    pub psd_defect: f64,
    /// `‖y‖₁ · max_i ‖C_i‖_∞`.
    pub scale: f64,
}

impl FarkasCheck {
    /// Positive margin with the PSD condition already verified.
    pub fn certifies_infeasibility(&self) -> bool {
        self.margin > 0.0
    }
}

/// Recomputes `S = y₀C₀ + Σ y_i A_i` and `b̃ᵀy` from the problem data.
///
/// Fails with [`Error::InvalidCertificate`] when `λ_max(S)` exceeds
/// `tolerance · ‖y‖₁ · max_i ‖C_i‖_∞`; otherwise returns the margin, which
/// certifies infeasibility when positive.
pub fn farkas_check(problem: &SdpProblem, cert: &FarkasCertificate, tolerance: f64) -> Result<f64> {
    Ok(farkas_check_detailed(problem, cert, tolerance)?.margin)
}

pub fn farkas_check_detailed(
    problem: &SdpProblem,
    cert: &FarkasCertificate,
    tolerance: f64,
) -> Result<FarkasCheck> {
    if cert.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCertificate("non-finite multiplier".into()));
    }
    let s = farkas_combination(problem, &cert.y)?;
    let psd_defect = max_eigenvalue(&s);
    let scale = farkas_scale(problem, &cert.y);
    if psd_defect > tolerance * scale {
        return Err(Error::InvalidCertificate(format!(
            "combination has eigenvalue {psd_defect:e} above the allowed {:e}",
            tolerance * scale
        )));
    }
    Ok(FarkasCheck {
        margin: farkas_margin(problem, cert.lambda_target, &cert.y),
        psd_defect,
        scale,
    })
}
