//! Recovery of the temporal source factor `g` from the observation
//! `E(t) = ∫_ω u[g](x,t) dx` by Tikhonov-regularised least squares,
//!
//! ```text
//! Φ(g) = ½‖G g − E^δ‖² + ½λ‖g‖²,   G g = ∫_ω u[g] dx,
//! ```
//!
//! minimised by Fletcher-Reeves conjugate gradients with exact line search.
//! `u[g]` solves the forward problem with zero initial value and source
//! `g(t) f(x)`; all `L²(0,T)` products use the trapezoid rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{assemble, observe_weights, EllipticCoefficients, EllipticOperator, SpaceGrid, Subdomain};
use crate::error::{Error, Result};
use crate::frac_calc::{TimeGrid, TimeSeries};
use crate::pde_solver::{observe, solve_adjoint, solve_forward_l1, spatial_inner, SourceSpec};
use crate::transform_kernels::MultiTermSpec;

/// Everything that defines one reconstruction.
#[derive(Debug, Clone)]
pub struct InverseConfig {
    pub spec: MultiTermSpec,
    pub space: SpaceGrid,
    pub coefficients: EllipticCoefficients,
    pub time: TimeGrid,
    /// Spatial source factor at every node of `space`.
    pub f: Vec<f64>,
    pub omega: Subdomain,
    pub lambda_reg: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub g0: TimeSeries,
    pub seed: u64,
    pub delta: f64,
}

impl InverseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_reg.is_finite() && self.lambda_reg >= 0.0) {
            return Err(Error::Config(format!("lambda_reg = {} must be ≥ 0", self.lambda_reg)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be > 0", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!("delta = {} must be ≥ 0", self.delta)));
        }
        self.g0.grid().check_same(&self.time)?;
        self.space.check_len(&self.f, "spatial source factor")?;
        if self.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spatial source factor"));
        }
        Ok(())
    }
}

/// The linear map `G: g ↦ ∫_ω u[g] dx` and its adjoint, with the operator
/// and observation weights assembled once.
#[derive(Debug, Clone)]
pub struct ForwardMap {
    spec: MultiTermSpec,
    op: EllipticOperator,
    weights: Vec<f64>,
    f: Vec<f64>,
    time: TimeGrid,
}

impl ForwardMap {
    pub fn new(cfg: &InverseConfig) -> Result<Self> {
        cfg.validate()?;
        Self::build(&cfg.spec, &cfg.space, &cfg.coefficients, &cfg.f, &cfg.omega, cfg.time)
    }

    pub fn build(
        spec: &MultiTermSpec,
        space: &SpaceGrid,
        coefficients: &EllipticCoefficients,
        f: &[f64],
        omega: &Subdomain,
        time: TimeGrid,
    ) -> Result<Self> {
        space.check_len(f, "spatial source factor")?;
        let mut f = f.to_vec();
        f[0] = 0.0;
        f[space.n_cells()] = 0.0;
        Ok(Self {
            spec: spec.clone(),
            op: assemble(space, coefficients)?,
            weights: observe_weights(space, omega)?,
            f,
            time,
        })
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn observation_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `G g`.
    pub fn apply(&self, g: &TimeSeries) -> Result<TimeSeries> {
        let zero = vec![0.0; self.op.grid().n_nodes()];
        let src = SourceSpec::new(g.clone(), self.f.clone())?;
        let u = solve_forward_l1(&self.spec, &self.op, &zero, &src, self.time)?;
        observe(&u, &self.weights)
    }

    /// `G* r = ⟨f, w[r]⟩_h` with `w` the adjoint state.
    pub fn adjoint(&self, r: &TimeSeries) -> Result<TimeSeries> {
        let w = solve_adjoint(&self.spec, &self.op, r, &self.weights, self.time)?;
        spatial_inner(&w, &self.f)
    }
}

/// `E^δ = E·(1 + δ U)` with independent `U ~ uniform[−1, 1]` per node,
/// drawn from ChaCha8 seeded with `seed`.
pub fn add_noise(e: &TimeSeries, delta: f64, seed: u64) -> Result<TimeSeries> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::Domain(format!("noise level {delta} must be ≥ 0")));
    }
    if delta == 0.0 {
        return Ok(e.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = e
        .values()
        .iter()
        .map(|v| v * (1.0 + delta * rng.random_range(-1.0..=1.0)))
        .collect();
    TimeSeries::new(*e.grid(), values)
}

/// Clean observation `G g_true` and its noisy version at the configured `δ`.
pub fn synthesize_data(cfg: &InverseConfig, g_true: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    let clean = ForwardMap::new(cfg)?.apply(g_true)?;
    let noisy = add_noise(&clean, cfg.delta, cfg.seed)?;
    Ok((clean, noisy))
}

fn tikhonov(residual: &TimeSeries, g: &TimeSeries, lambda: f64) -> f64 {
    0.5 * residual.norm_l2().powi(2) + 0.5 * lambda * g.norm_l2().powi(2)
}

/// `Φ(g)`.
pub fn objective(g: &TimeSeries, data: &TimeSeries, cfg: &InverseConfig) -> Result<f64> {
    let map = ForwardMap::new(cfg)?;
    let residual = map.apply(g)?.sub(data)?;
    Ok(tikhonov(&residual, g, cfg.lambda_reg))
}

/// `Φ′(g) = G*(G g − E^δ) + λ g`, the Riesz representative in the trapezoid
/// `L²(0,T)` product.
pub fn gradient(g: &TimeSeries, data: &TimeSeries, cfg: &InverseConfig) -> Result<TimeSeries> {
    let map = ForwardMap::new(cfg)?;
    let residual = map.apply(g)?.sub(data)?;
    map.adjoint(&residual)?.add_scaled(cfg.lambda_reg, g)
}

/// Exact minimiser of `r ↦ Φ(g_k + r d_k)`:
/// `r_k = −(⟨G g_k − E^δ, G d_k⟩ + λ⟨g_k, d_k⟩) / (‖G d_k‖² + λ‖d_k‖²)`.
pub fn step_size(
    gk: &TimeSeries,
    dk: &TimeSeries,
    gdk: &TimeSeries,
    data: &TimeSeries,
    cfg: &InverseConfig,
) -> Result<f64> {
    let residual = ForwardMap::new(cfg)?.apply(gk)?.sub(data)?;
    line_search(&residual, gk, dk, gdk, cfg.lambda_reg)
}

fn line_search(residual: &TimeSeries, gk: &TimeSeries, dk: &TimeSeries, gdk: &TimeSeries, lambda: f64) -> Result<f64> {
    let den = gdk.inner(gdk)? + lambda * dk.inner(dk)?;
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::DegenerateDirection);
    }
    Ok(-(residual.inner(gdk)? + lambda * gk.inner(dk)?) / den)
}

/// Which stopping rule ended the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `‖G g_k − E^δ‖ ≤ 1.01·δ·‖E^δ‖` (only when `δ > 0`).
    Discrepancy,
    /// `‖Φ′(g_k)‖ ≤ ε·‖Φ′(g₀)‖`.
    GradientTolerance,
    MaxIterations,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::GradientTolerance => "gradient_tolerance",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub g_rec: TimeSeries,
    pub iterations: usize,
    /// `‖G g_k − E^δ‖` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    /// `Φ(g_k)` for `k = 0..=iterations`.
    pub objective_history: Vec<f64>,
    /// `‖Φ′(g_k)‖` for `k = 0..=iterations`.
    pub gradient_history: Vec<f64>,
    /// `‖g_rec − g_true‖ / ‖g_true‖` when a ground truth was supplied.
    pub rel_error: Option<f64>,
    pub stop_reason: StopReason,
}

/// Relative `L²(0,T)` error.
pub fn relative_error(g: &TimeSeries, truth: &TimeSeries) -> Result<f64> {
    Ok(g.sub(truth)?.norm_l2() / truth.norm_l2())
}

/// Fletcher-Reeves conjugate gradients on `Φ`:
/// `d₀ = −Φ′(g₀)`, `g_{k+1} = g_k + r_k d_k`,
/// `d_{k+1} = −Φ′(g_{k+1}) + s_k d_k` with `s_k = ‖Φ′(g_{k+1})‖²/‖Φ′(g_k)‖²`.
///
/// `G` is linear, so `G g_{k+1} = G g_k + r_k G d_k` and each iteration costs
/// one forward and one adjoint solve.
pub fn reconstruct(cfg: &InverseConfig, data: &TimeSeries, truth: Option<&TimeSeries>) -> Result<ReconstructionResult> {
    let map = ForwardMap::new(cfg)?;
    data.grid().check_same(&cfg.time)?;
    let lambda = cfg.lambda_reg;
    let target = if cfg.delta > 0.0 {
        1.01 * cfg.delta * data.norm_l2()
    } else {
        0.0
    };

    let mut g = cfg.g0.clone();
    let mut residual = map.apply(&g)?.sub(data)?;
    let mut grad = map.adjoint(&residual)?.add_scaled(lambda, &g)?;
    let mut dir = grad.scale(-1.0);
    let mut residual_history = vec![residual.norm_l2()];
    let mut objective_history = vec![tikhonov(&residual, &g, lambda)];
    let mut gradient_history = vec![grad.norm_l2()];
    let mut iterations = 0;

    let stop_reason = loop {
        let res_norm = *residual_history.last().expect("history is never empty");
        let grad_norm = *gradient_history.last().expect("history is never empty");
        if cfg.delta > 0.0 && res_norm <= target {
            break StopReason::Discrepancy;
        }
        if grad_norm <= cfg.epsilon * gradient_history[0] {
            break StopReason::GradientTolerance;
        }
        if iterations == cfg.max_iters {
            break StopReason::MaxIterations;
        }
        let gd = map.apply(&dir)?;
        let r = line_search(&residual, &g, &dir, &gd, lambda)?;
        g = g.add_scaled(r, &dir)?;
        residual = residual.add_scaled(r, &gd)?;
        let next = map.adjoint(&residual)?.add_scaled(lambda, &g)?;
        let beta = next.norm_l2().powi(2) / grad_norm.powi(2);
        dir = next.scale(-1.0).add_scaled(beta, &dir)?;
        grad = next;
        iterations += 1;

        residual_history.push(residual.norm_l2());
        objective_history.push(tikhonov(&residual, &g, lambda));
        gradient_history.push(grad.norm_l2());
        let finite = g.values().iter().all(|v| v.is_finite())
            && residual_history.last().is_some_and(|v| v.is_finite())
            && gradient_history.last().is_some_and(|v| v.is_finite());
        if !finite {
            return Err(Error::Diverged {
                iteration: iterations,
                residual_history,
            });
        }
        log::debug!(
            "cg iteration {iterations}: residual {:.6e}, gradient {:.6e}",
            residual_history[iterations],
            gradient_history[iterations]
        );
    };

    let rel_error = truth.map(|t| relative_error(&g, t)).transpose()?;
    Ok(ReconstructionResult {
        g_rec: g,
        iterations,
        residual_history,
        objective_history,
        gradient_history,
        rel_error,
        stop_reason,
    })
}
