//! Discrete Riemann-Liouville integrals and Caputo derivatives on uniform
//! time grids, forward (from `t = 0`) and backward (from `t = T`).
//!
//! * `J^α` uses product-trapezoid quadrature: the piecewise-linear interpolant
//!   of the data is integrated exactly against `(t - s)^{α-1} / Γ(α)`.
//! * `∂^α` uses the L1 formula, exact on piecewise-linear data.
//! * Backward operators are the forward ones conjugated by time reflection
//!   `t ↦ T - t`.

use crate::error::{Error, Result};
use crate::special::gamma;

/// Uniform grid `t_k = k·T/N`, `k = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidGrid(format!("final time must be positive, got {t_end}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("time grid needs at least one step".into()));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            k as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.len()];
        w[0] = 0.5 * h;
        w[self.n_steps] = 0.5 * h;
        w
    }

    pub(crate) fn check_same(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "time grids differ: (T={}, N={}) vs (T={}, N={})",
                self.t_end, self.n_steps, other.t_end, other.n_steps
            )))
        }
    }
}

/// Values of a function at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "series has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("time series"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.node(k))).collect();
        Self { grid, values }
    }

    /// Builds a series from the node index `k`.
    pub fn from_fn_indexed<F: Fn(usize) -> f64>(grid: TimeGrid, f: F) -> Self {
        let values = (0..grid.len()).map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at_end(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `t ↦ T - t`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Trapezoid approximation of `∫₀ᵀ self·other dt`.
    pub fn inner(&self, other: &TimeSeries) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &TimeSeries) -> f64 {
        let w = self.grid.trapezoid_weights();
        w.iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// Trapezoid L²(0,T) norm.
    pub fn norm_l2(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + a·other`.
    pub fn add_scaled(&self, a: f64, other: &TimeSeries) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn sub(&self, other: &TimeSeries) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }
}

/// A fractional order `α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    /// Orders in `(0, 2)` are accepted; the Caputo operators further require `α < 1`.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn require_caputo(self) -> Result<()> {
        if self.0 < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidOrder(self.0))
        }
    }
}

/// L1 coefficients `b_m = (m+1)^{1-α} - m^{1-α}`, `m = 0..len`.
pub(crate) fn l1_coefficients(alpha: f64, len: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..len)
        .map(|m| {
            let m = m as f64;
            (m + 1.0).powf(p) - m.powf(p)
        })
        .collect()
}

/// Discrete `J^α u` from `t = 0` by product-trapezoid quadrature.
pub fn rl_integral_forward(alpha: FractionalOrder, u: &TimeSeries) -> TimeSeries {
    let a = alpha.value();
    let n = u.grid.n_steps();
    let h = u.grid.step();
    let scale = h.powf(a) / gamma(a + 2.0);
    let ap1 = a + 1.0;
    // (m)^{α+1} for m = 0..=n
    let pw: Vec<f64> = (0..=n).map(|m| (m as f64).powf(ap1)).collect();
    // interior weights depend only on m = k - j
    let interior: Vec<f64> = (0..n)
        .map(|m| if m == 0 { 0.0 } else { pw[m + 1] - 2.0 * pw[m] + pw[m - 1] })
        .collect();
    let uv = &u.values;
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let kf = k as f64;
        let mut s = (pw[k - 1] - (kf - a - 1.0) * kf.powf(a)) * uv[0] + uv[k];
        for j in 1..k {
            s += interior[k - j] * uv[j];
        }
        out[k] = scale * s;
    }
    TimeSeries {
        grid: u.grid,
        values: out,
    }
}

/// Discrete `J^α_{T-} u` from `t = T` (reflected forward operator).
pub fn rl_integral_backward(alpha: FractionalOrder, u: &TimeSeries) -> TimeSeries {
    rl_integral_forward(alpha, &u.reflect()).reflect()
}

/// L1 approximation of the Caputo derivative of `u - u(0)`; zero at `t = 0`.
pub fn caputo_forward(alpha: FractionalOrder, u: &TimeSeries) -> Result<TimeSeries> {
    alpha.require_caputo()?;
    let a = alpha.value();
    let n = u.grid.n_steps();
    let scale = u.grid.step().powf(-a) / gamma(2.0 - a);
    let b = l1_coefficients(a, n);
    let uv = &u.values;
    let du: Vec<f64> = (1..=n).map(|i| uv[i] - uv[i - 1]).collect();
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let s: f64 = (1..=k).map(|i| b[k - i] * du[i - 1]).sum();
        out[k] = scale * s;
    }
    Ok(TimeSeries {
        grid: u.grid,
        values: out,
    })
}

/// Backward Caputo derivative `∂^α_{T-}` of `u - u(T)`; zero at `t = T`.
pub fn caputo_backward(alpha: FractionalOrder, u: &TimeSeries) -> Result<TimeSeries> {
    Ok(caputo_forward(alpha, &u.reflect())?.reflect())
}

/// Trapezoid approximation of `(u * v)(t) = ∫₀ᵗ u(τ) v(t-τ) dτ` at every node.
pub fn convolve(u: &TimeSeries, v: &TimeSeries) -> Result<TimeSeries> {
    u.grid.check_same(&v.grid)?;
    let n = u.grid.n_steps();
    let h = u.grid.step();
    let (a, b) = (&u.values, &v.values);
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let mut s = 0.5 * (a[0] * b[k] + a[k] * b[0]);
        for i in 1..k {
            s += a[i] * b[k - i];
        }
        out[k] = h * s;
    }
    Ok(TimeSeries {
        grid: u.grid,
        values: out,
    })
}

/// `|∫ (J^α g) h dt - ∫ g (J^α_{T-} h) dt|` with trapezoid outer quadrature.
pub fn duality_gap(alpha: FractionalOrder, g: &TimeSeries, h: &TimeSeries) -> Result<f64> {
    g.grid.check_same(&h.grid)?;
    let left = rl_integral_forward(alpha, g).inner_unchecked(h);
    let right = g.inner_unchecked(&rl_integral_backward(alpha, h));
    Ok((left - right).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::new(1.0, n).unwrap()
    }

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        let g = grid(4);
        assert_eq!(g.nodes(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn series_rejects_bad_input() {
        assert!(TimeSeries::new(grid(2), vec![0.0; 2]).is_err());
        assert!(TimeSeries::new(grid(2), vec![0.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(-0.5).is_err());
        assert!(FractionalOrder::new(2.0).is_err());
        let u = TimeSeries::zeros(grid(4));
        assert_eq!(caputo_forward(order(1.0), &u), Err(Error::InvalidOrder(1.0)));
        assert!(caputo_backward(order(1.5), &u).is_err());
    }

    #[test]
    fn forward_integral_of_one_is_exact() {
        let u = TimeSeries::from_fn(grid(10), |_| 1.0);
        let j = rl_integral_forward(order(0.5), &u);
        assert_eq!(j.values()[0], 0.0);
        assert_abs_diff_eq!(j.value_at_end(), 1.0 / gamma(1.5), epsilon = 1e-13);
        assert_abs_diff_eq!(j.value_at_end(), std::f64::consts::FRAC_2_SQRT_PI, epsilon = 1e-13);
    }

    #[test]
    fn forward_integral_of_order_one_is_ordinary_integral() {
        let u = TimeSeries::from_fn(grid(7), |t| t);
        let j = rl_integral_forward(order(1.0), &u);
        assert_abs_diff_eq!(j.value_at_end(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn forward_integral_power_rule() {
        // Γ(2)/Γ(2.3); linear data is integrated exactly
        let u = TimeSeries::from_fn(grid(16), |t| t);
        let j = rl_integral_forward(order(0.3), &u);
        assert_abs_diff_eq!(j.value_at_end(), 0.857_109_621_959_463, epsilon = 1e-13);
    }

    #[test]
    fn backward_integral_reflects_forward() {
        let u = TimeSeries::from_fn(grid(10), |_| 1.0);
        let j = rl_integral_backward(order(0.5), &u);
        assert_abs_diff_eq!(j.values()[0], std::f64::consts::FRAC_2_SQRT_PI, epsilon = 1e-13);
        assert_eq!(j.value_at_end(), 0.0);
        let z = rl_integral_backward(order(0.5), &TimeSeries::zeros(grid(10)));
        assert!(z.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn caputo_examples() {
        let g = grid(20);
        let lin = TimeSeries::from_fn(g, |t| t);
        let d = caputo_forward(order(0.5), &lin).unwrap();
        assert_abs_diff_eq!(d.value_at_end(), std::f64::consts::FRAC_2_SQRT_PI, epsilon = 1e-12);

        let c = TimeSeries::from_fn(g, |_| 3.7);
        assert!(caputo_forward(order(0.4), &c).unwrap().values().iter().all(|v| *v == 0.0));
        assert!(caputo_backward(order(0.4), &c).unwrap().values().iter().all(|v| *v == 0.0));

        let back = TimeSeries::from_fn(g, |t| 1.0 - t);
        let d = caputo_backward(order(0.5), &back).unwrap();
        assert_abs_diff_eq!(d.values()[0], std::f64::consts::FRAC_2_SQRT_PI, epsilon = 1e-12);
    }

    #[test]
    fn caputo_of_square_converges_to_power_rule() {
        // 2/Γ(2.7) = 1.29476165355725378
        let exact = 1.294_761_653_557_253_8;
        let err = |n| {
            let u = TimeSeries::from_fn(grid(n), |t| t * t);
            (caputo_forward(order(0.3), &u).unwrap().value_at_end() - exact).abs()
        };
        let (e1, e2) = (err(200), err(800));
        assert!(e2 < 1e-3, "error {e2}");
        let observed = (e1 / e2).ln() / 4f64.ln();
        assert!((observed - 1.7).abs() < 0.15, "observed order {observed}");
    }

    #[test]
    fn convolution_examples() {
        let g = grid(10);
        let one = TimeSeries::from_fn(g, |_| 1.0);
        let c = convolve(&one, &one).unwrap();
        for (k, v) in c.values().iter().enumerate() {
            assert_abs_diff_eq!(*v, g.node(k), epsilon = 1e-14);
        }
        let other = TimeSeries::zeros(TimeGrid::new(2.0, 10).unwrap());
        assert!(matches!(convolve(&one, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn duality_gap_vanishes_for_zero() {
        let g = grid(12);
        let h = TimeSeries::from_fn(g, |t| (PI * t).sin());
        assert_eq!(duality_gap(order(0.5), &TimeSeries::zeros(g), &h).unwrap(), 0.0);
    }

    #[test]
    fn duality_gap_small_for_linear_pair() {
        let g = grid(64);
        let a = TimeSeries::from_fn(g, |t| t);
        let b = TimeSeries::from_fn(g, |t| 1.0 - t);
        assert!(duality_gap(order(0.5), &a, &b).unwrap() < 1e-4);
    }
}
