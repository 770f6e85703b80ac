//! Laplace-domain machinery for the multi-term operator `Σ q_j ∂_t^{α_j}`.
//!
//! Everything here is expressed through the symbol `Q(s) = Σ q_j s^{α_j}` and
//! numerical inversion along the contour `γ(θ₀)`: an arc of the circle
//! `|s| = ρ` joined to the two rays `arg s = ±θ₀`.

mod contour;
mod kernel;
mod monotone;

pub use contour::{ContourRule, ContourSpec};
pub use kernel::{
    invert_laplace_full, kernel_row, relaxation_mode, subordination_kernel, ModeResponse,
};
pub use monotone::{cm_certificate, cm_certificate_fn, MAX_CM_ORDER};

pub use crate::special::{mittag_leffler, wright_m};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Weights and orders `{(q_j, α_j)}`, stored with `α_1 > α_2 > … > α_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTermSpec {
    terms: Vec<(f64, f64)>,
}

impl MultiTermSpec {
    /// Accepts the terms in any order; they are sorted by decreasing order.
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("at least one term is required".into()));
        }
        for &(q, a) in &terms {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::InvalidSpec(format!("weight {q} must be positive")));
            }
            if !(a.is_finite() && a > 0.0 && a < 1.0) {
                return Err(Error::InvalidSpec(format!("order {a} must lie in (0,1)")));
            }
        }
        let mut terms = terms;
        terms.sort_by(|x, y| y.1.total_cmp(&x.1));
        if terms.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(Error::InvalidSpec("orders must be distinct".into()));
        }
        Ok(Self { terms })
    }

    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(vec![(1.0, alpha)])
    }

    /// Parallel lists of weights and orders.
    pub fn from_lists(q: &[f64], alpha: &[f64]) -> Result<Self> {
        if q.len() != alpha.len() {
            return Err(Error::InvalidSpec(format!(
                "{} weights for {} orders",
                q.len(),
                alpha.len()
            )));
        }
        Self::new(q.iter().copied().zip(alpha.iter().copied()).collect())
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest order `α_1`.
    pub fn alpha_max(&self) -> f64 {
        self.terms[0].1
    }

    /// Smallest order `α_ℓ`.
    pub fn alpha_min(&self) -> f64 {
        self.terms[self.terms.len() - 1].1
    }

    /// Weight of the smallest-order term.
    pub fn q_min_order(&self) -> f64 {
        self.terms[self.terms.len() - 1].0
    }

    pub(crate) fn eval(&self, s: Complex64) -> Complex64 {
        let ln_s = s.ln();
        self.terms
            .iter()
            .map(|&(q, a)| q * (a * ln_s).exp())
            .sum()
    }
}

/// `Q(s) = Σ q_j s^{α_j}` on the principal branch.
pub fn q_of_s(spec: &MultiTermSpec, s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Q(s) is undefined at s = 0".into()));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain("Q(s) needs a finite argument".into()));
    }
    Ok(spec.eval(s))
}
