use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::MultiTermSpec;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Shape and resolution of the inversion contour `γ(θ₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    theta0: f64,
    radius: f64,
    nodes_per_panel: usize,
    decay: f64,
}

const ARC_PANELS: usize = 4;

impl ContourSpec {
    /// Unchecked construction; [`ContourSpec::validate`] runs before every use.
    pub fn new(theta0: f64, radius: f64, nodes_per_panel: usize, decay: f64) -> Self {
        Self {
            theta0,
            radius,
            nodes_per_panel,
            decay,
        }
    }

    /// Default contour for `spec`: θ₀ at the midpoint of the admissible
    /// interval, unit radius, 16 Gauss nodes per panel, rays cut where
    /// `|e^{st}| = e^{-25}`.
    pub fn for_spec(spec: &MultiTermSpec) -> Self {
        let (lo, hi) = Self::admissible_interval(spec);
        Self::new(0.5 * (lo + hi), 1.0, 16, 25.0)
    }

    /// `(π/2, min(π/(2α₁), π))`.
    pub fn admissible_interval(spec: &MultiTermSpec) -> (f64, f64) {
        (FRAC_PI_2, (PI / (2.0 * spec.alpha_max())).min(PI))
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn with_nodes_per_panel(mut self, n: usize) -> Self {
        self.nodes_per_panel = n;
        self
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn validate(&self, spec: &MultiTermSpec) -> Result<()> {
        let (lo, hi) = Self::admissible_interval(spec);
        if !(self.theta0 > lo && self.theta0 < hi) {
            return Err(Error::InvalidContour(format!(
                "θ₀ = {} outside the admissible interval ({lo}, {hi})",
                self.theta0
            )));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidContour(format!("radius {} must be positive", self.radius)));
        }
        if self.nodes_per_panel < 8 {
            return Err(Error::InvalidContour(format!(
                "{} nodes per panel; at least 8 are required",
                self.nodes_per_panel
            )));
        }
        if !(self.decay.is_finite() && self.decay > 1.0) {
            return Err(Error::InvalidContour(format!("decay exponent {} must exceed 1", self.decay)));
        }
        Ok(())
    }

    /// Arc radius used at time `t`: `min(radius, 1/t)`, so that `|e^{st}| ≤ e`
    /// on the arc at large times.
    pub fn effective_radius(&self, t: f64) -> f64 {
        self.radius.min(1.0 / t)
    }

    /// Ray length `R` with `|e^{st}| = e^{-decay}` at the ray ends.
    pub fn truncation(&self, t: f64) -> f64 {
        let r = self.decay / (t * self.theta0.cos().abs());
        r.max(2.0 * self.effective_radius(t))
    }
}

/// Quadrature rule for `(1/2πi) ∫_{γ(θ₀)} F(s) e^{st} ds` at a fixed time,
/// stored for the upper half of the contour only. For transforms of real
/// functions, `F(s̄) = conj F(s)` and the integral equals
/// `Im(∫_upper F e^{st} ds) / π`.
#[derive(Debug, Clone)]
pub struct ContourRule {
    t: f64,
    nodes: Vec<Complex64>,
    // ds-weights without the exponential factor
    ds: Vec<Complex64>,
    // ds-weights times e^{s t}
    weights: Vec<Complex64>,
}

impl ContourRule {
    pub fn new(contour: &ContourSpec, spec: &MultiTermSpec, t: f64) -> Result<Self> {
        contour.validate(spec)?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("contour inversion needs t > 0, got {t}")));
        }
        let theta0 = contour.theta0;
        let rho = contour.effective_radius(t);
        let (gx, gw) = gauss_legendre(contour.nodes_per_panel);
        let mut nodes = Vec::new();
        let mut ds = Vec::new();

        // arc θ ∈ [0, θ₀]
        let width = theta0 / ARC_PANELS as f64;
        for p in 0..ARC_PANELS {
            let mid = (p as f64 + 0.5) * width;
            for (x, w) in gx.iter().zip(&gw) {
                let theta = mid + 0.5 * width * x;
                let s = Complex64::from_polar(rho, theta);
                nodes.push(s);
                ds.push(Complex64::i() * s * (0.5 * width * w));
            }
        }

        // ray s = (ρ + u) e^{iθ₀}, u ∈ [0, R - ρ]; panels double in width away
        // from the junction until they reach half an oscillation period or a
        // decay length
        let dir = Complex64::from_polar(1.0, theta0);
        let u_end = contour.truncation(t) - rho;
        let w_max = (PI / (t * theta0.sin())).min(2.0 / (t * theta0.cos().abs()));
        let mut lo = 0.0;
        let mut width = 0.5 * rho;
        while lo < u_end {
            let hi = (lo + width.min(w_max)).min(u_end);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push((rho + mid + half * x) * dir);
                ds.push(dir * (half * w));
            }
            lo = hi;
            width *= 2.0;
        }

        let weights = nodes.iter().zip(&ds).map(|(s, d)| d * (s * t).exp()).collect();
        Ok(Self { t, nodes, ds, weights })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Quadrature weights `ds·e^{st}` of the upper half.
    pub(crate) fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Q(s)` at every node.
    pub fn q_values(&self, spec: &MultiTermSpec) -> Vec<Complex64> {
        self.nodes.iter().map(|s| spec.eval(*s)).collect()
    }

    /// Inverse transform of a real-symmetric `F` at this rule's time.
    pub fn invert<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> f64 {
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(j, (s, w))| w * f(j, *s))
            .sum();
        sum.im / PI
    }

    /// Integral over both halves of the contour without assuming symmetry.
    pub fn invert_full<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let mut upper = Complex64::new(0.0, 0.0);
        let mut lower = Complex64::new(0.0, 0.0);
        for ((s, d), w) in self.nodes.iter().zip(&self.ds).zip(&self.weights) {
            upper += w * f(*s);
            let sc = s.conj();
            // lower half: conjugate path traversed in the opposite direction
            lower -= d.conj() * (sc * self.t).exp() * f(sc);
        }
        (upper + lower) / Complex64::new(0.0, 2.0 * PI)
    }
}
