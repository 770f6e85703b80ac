//! Numerical complete-monotonicity certificate: sign checks of central
//! finite differences `(−1)ⁿ δⁿ f(s) ≥ 0` for `n ≤ 6` on a sample of points.
//! This samples Bernstein's condition; it is evidence, not a proof.

use super::MultiTermSpec;
use crate::error::{Error, Result};

pub const MAX_CM_ORDER: usize = 6;
const REL_STEP: f64 = 0.1;
const TOL: f64 = 1e-7;

/// Certificate for `f(s) = s⁻¹ Q(s) e^{−Q(s)τ}`, the Laplace transform in `t`
/// of the subordination kernel `K(·, τ)`.
pub fn cm_certificate(spec: &MultiTermSpec, tau: f64, s_grid: &[f64], n_max: usize) -> Result<bool> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain(format!("τ must be positive, got {tau}")));
    }
    let f = |s: f64| {
        let q: f64 = spec.terms().iter().map(|&(q, a)| q * s.powf(a)).sum();
        q / s * (-q * tau).exp()
    };
    cm_certificate_fn(f, s_grid, n_max)
}

/// Certificate for an arbitrary real function on `(0, ∞)`.
pub fn cm_certificate_fn<F: Fn(f64) -> f64>(f: F, s_grid: &[f64], n_max: usize) -> Result<bool> {
    if s_grid.is_empty() {
        return Err(Error::Domain("empty s-grid".into()));
    }
    if let Some(s) = s_grid.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::Domain(format!("s-grid points must be positive, got {s}")));
    }
    if n_max > MAX_CM_ORDER {
        return Err(Error::OutOfRange(format!(
            "finite-difference order {n_max} exceeds {MAX_CM_ORDER}"
        )));
    }
    for &s in s_grid {
        let h = REL_STEP * s;
        for n in 0..=n_max {
            let mut diff = 0.0;
            let mut scale = 0.0;
            let mut binom = 1.0;
            for k in 0..=n {
                let x = s + (0.5 * n as f64 - k as f64) * h;
                let v = f(x);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                diff += sign * binom * v;
                scale += binom * v.abs();
                binom = binom * (n - k) as f64 / (k + 1) as f64;
            }
            let signed = if n % 2 == 0 { diff } else { -diff };
            if !signed.is_finite() || signed < -TOL * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
