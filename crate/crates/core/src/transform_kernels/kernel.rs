use num_complex::Complex64;

use super::{ContourRule, ContourSpec, MultiTermSpec};
use crate::error::{Error, Result};

/// Relaxation function of one spectral mode,
/// `y_n(t) = L⁻¹[ s⁻¹ Q(s) / (Q(s) + λ_n) ](t)`, with `y_n(0⁺) = 1`.
pub fn relaxation_mode(spec: &MultiTermSpec, lambda_n: f64, contour: &ContourSpec, t: f64) -> Result<f64> {
    check_lambda(lambda_n)?;
    let rule = ContourRule::new(contour, spec, t)?;
    let q = rule.q_values(spec);
    Ok(rule.invert(|j, s| q[j] / (s * (q[j] + lambda_n))))
}

fn check_lambda(lambda_n: f64) -> Result<()> {
    if lambda_n.is_finite() && lambda_n >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("eigenvalue {lambda_n} must be non-negative")))
    }
}

/// Time-domain responses of one mode at a single time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResponse {
    /// `y(t) = L⁻¹[s⁻¹Q/(Q+λ)]`, the homogeneous relaxation.
    pub relaxation: f64,
    /// `Y(t) = L⁻¹[s⁻¹/(Q+λ)]`, the step response; `Y' = h` is the impulse response.
    pub step: f64,
    /// `Z(t) = ∫₀ᵗ Y`, i.e. `L⁻¹[s⁻²/(Q+λ)]`.
    pub ramp: f64,
}

impl ModeResponse {
    pub const AT_ZERO: ModeResponse = ModeResponse {
        relaxation: 1.0,
        step: 0.0,
        ramp: 0.0,
    };

    /// Evaluates all three responses with a prepared rule and its `Q` values.
    pub fn evaluate(rule: &ContourRule, q: &[Complex64], lambda_n: f64) -> Self {
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for (j, (s, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            let inv = 1.0 / (q[j] + lambda_n);
            let rs = 1.0 / s;
            acc[0] += w * q[j] * inv * rs;
            acc[1] += w * inv * rs;
            acc[2] += w * inv * rs * rs;
        }
        let pi = std::f64::consts::PI;
        Self {
            relaxation: acc[0].im / pi,
            step: acc[1].im / pi,
            ramp: acc[2].im / pi,
        }
    }
}

/// Subordination kernel
/// `K(t,τ) = (1/2πi) ∫_{γ(θ₀)} s⁻¹ Q(s) exp(st − Q(s)τ) ds`.
///
/// The raw quadrature value is returned, including any negative noise.
pub fn subordination_kernel(spec: &MultiTermSpec, contour: &ContourSpec, t: f64, tau: f64) -> Result<f64> {
    Ok(kernel_row(spec, contour, t, &[tau])?[0])
}

/// `K(t, τ_i)` for a batch of `τ` values at one `t`.
pub fn kernel_row(spec: &MultiTermSpec, contour: &ContourSpec, t: f64, taus: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = taus.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain(format!("kernel needs τ ≥ 0, got {bad}")));
    }
    let rule = ContourRule::new(contour, spec, t)?;
    let q = rule.q_values(spec);
    // s⁻¹Q(s) times the quadrature weight, shared by every τ
    let base: Vec<Complex64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .zip(&q)
        .map(|((s, w), q)| w * q / s)
        .collect();
    let pi = std::f64::consts::PI;
    Ok(taus
        .iter()
        .map(|&tau| {
            let sum: Complex64 = base.iter().zip(&q).map(|(b, q)| b * (-q * tau).exp()).sum();
            sum.im / pi
        })
        .collect())
}

/// Complex-valued inversion over the full contour, for symmetry checks.
pub fn invert_laplace_full<F: Fn(Complex64) -> Complex64>(
    spec: &MultiTermSpec,
    contour: &ContourSpec,
    t: f64,
    f: F,
) -> Result<Complex64> {
    Ok(ContourRule::new(contour, spec, t)?.invert_full(f))
}
