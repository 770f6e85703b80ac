//! Forward, subordinated and adjoint solvers for
//!
//! ```text
//! Σ q_j ∂_t^{α_j}(u − u₀) + A u = g(t) f(x),   u = 0 on ∂Ω,
//! ```
//!
//! together with the classical heat flow `∂_t w + A w = 0` and the Duhamel
//! identity that links the source problem to the homogeneous one.
//!
//! Two independent forward solvers are provided. The spectral solver expands
//! in the discrete eigenfunctions of `A` and evaluates each mode by contour
//! inversion; the L1 solver steps in time with the implicit L1 scheme and one
//! tridiagonal solve per step.

use rayon::prelude::*;

use crate::elliptic::{observe_weights, EigenSystem, EllipticOperator, SpaceGrid, Subdomain};
use crate::error::{Error, Result};
use crate::frac_calc::{convolve, l1_coefficients, rl_integral_forward, FractionalOrder, TimeGrid, TimeSeries};
use crate::special::gamma;
use crate::transform_kernels::{kernel_row, ContourRule, ContourSpec, ModeResponse, MultiTermSpec};

/// Node-by-step table `u(x_i, t_k)`, stored row-per-time-step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    values: Vec<f64>,
}

impl SpaceTimeField {
    /// Validates shape, finiteness and zero boundary rows.
    pub fn new(sgrid: SpaceGrid, tgrid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        let nx = sgrid.n_nodes();
        if values.len() != nx * tgrid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} entries, expected {} × {}",
                values.len(),
                tgrid.len(),
                nx
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("space-time field"));
        }
        if values.chunks(nx).any(|row| row[0] != 0.0 || row[nx - 1] != 0.0) {
            return Err(Error::InvalidGrid("boundary values must vanish".into()));
        }
        Ok(Self { sgrid, tgrid, values })
    }

    pub fn zeros(sgrid: SpaceGrid, tgrid: TimeGrid) -> Self {
        Self {
            sgrid,
            tgrid,
            values: vec![0.0; sgrid.n_nodes() * tgrid.len()],
        }
    }

    fn from_rows(sgrid: SpaceGrid, tgrid: TimeGrid, rows: Vec<Vec<f64>>) -> Self {
        let values = rows.into_iter().flatten().collect();
        Self { sgrid, tgrid, values }
    }

    pub fn space_grid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.sgrid.n_nodes() + i]
    }

    /// Spatial profile at step `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        let nx = self.sgrid.n_nodes();
        &self.values[k * nx..(k + 1) * nx]
    }

    fn row_mut(&mut self, k: usize) -> &mut [f64] {
        let nx = self.sgrid.n_nodes();
        &mut self.values[k * nx..(k + 1) * nx]
    }

    /// Time series at node `i`.
    pub fn node_series(&self, i: usize) -> TimeSeries {
        TimeSeries::from_fn_indexed(self.tgrid, |k| self.at(i, k))
    }

    /// `‖u(t_k)‖_h` for every step.
    pub fn spatial_norms(&self) -> Vec<f64> {
        (0..self.tgrid.len()).map(|k| self.sgrid.norm(self.row(k))).collect()
    }

    /// Discrete `L²(Ω × (0,T))` norm: trapezoid in time, `⟨·,·⟩_h` in space.
    pub fn norm_l2(&self) -> f64 {
        self.tgrid
            .trapezoid_weights()
            .iter()
            .enumerate()
            .map(|(k, w)| w * self.sgrid.inner(self.row(k), self.row(k)))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Minimum over interior nodes and steps `k ≥ 1`.
    pub fn min_interior_positive_time(&self) -> f64 {
        let nx = self.sgrid.n_nodes();
        (1..self.tgrid.len())
            .flat_map(|k| self.row(k)[1..nx - 1].iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.check_same(other)?;
        Ok(Self {
            sgrid: self.sgrid,
            tgrid: self.tgrid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// `‖self − other‖ / ‖other‖` in the discrete `L²(Ω × (0,T))` norm.
    pub fn rel_l2_error(&self, reference: &SpaceTimeField) -> Result<f64> {
        Ok(self.sub(reference)?.norm_l2() / reference.norm_l2())
    }

    /// `u(x, T − t)`.
    pub fn reflect_time(&self) -> SpaceTimeField {
        let n = self.tgrid.len();
        let rows = (0..n).map(|k| self.row(n - 1 - k).to_vec()).collect();
        Self::from_rows(self.sgrid, self.tgrid, rows)
    }

    fn check_same(&self, other: &SpaceTimeField) -> Result<()> {
        if self.sgrid != other.sgrid || self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Separable source `F(x,t) = g(t) f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    g: TimeSeries,
    f: Vec<f64>,
}

impl SourceSpec {
    /// `f` is given at all nodes of the space grid; boundary entries are ignored.
    pub fn new(g: TimeSeries, f: Vec<f64>) -> Result<Self> {
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spatial source factor"));
        }
        Ok(Self { g, f })
    }

    pub fn zero(sgrid: &SpaceGrid, tgrid: TimeGrid) -> Self {
        Self {
            g: TimeSeries::zeros(tgrid),
            f: vec![0.0; sgrid.n_nodes()],
        }
    }

    pub fn g(&self) -> &TimeSeries {
        &self.g
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    /// True when `f ≥ 0` and `f ≢ 0`, the sign hypothesis of the uniqueness result.
    pub fn f_is_nonnegative_nontrivial(&self) -> bool {
        self.f.iter().all(|v| *v >= 0.0) && self.f.iter().any(|v| *v > 0.0)
    }

    fn check(&self, sgrid: &SpaceGrid, tgrid: &TimeGrid) -> Result<()> {
        self.g.grid().check_same(tgrid)?;
        sgrid.check_len(&self.f, "spatial source factor")
    }
}

fn check_initial(sgrid: &SpaceGrid, u0: &[f64]) -> Result<()> {
    sgrid.check_len(u0, "initial value")?;
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial value"));
    }
    Ok(())
}

/// Heat flow `w(t) = Σ_n ⟨u₀,φ_n⟩ e^{−λ_n t} φ_n` over the retained modes.
pub fn solve_heat(eig: &EigenSystem, u0: &[f64], tgrid: TimeGrid) -> Result<SpaceTimeField> {
    let sgrid = *eig.grid();
    check_initial(&sgrid, u0)?;
    let c = eig.project(u0)?;
    let rows = (0..tgrid.len())
        .map(|k| {
            let t = tgrid.node(k);
            let ck: Vec<f64> = c.iter().zip(eig.values()).map(|(c, l)| c * (-l * t).exp()).collect();
            eig.synthesize(&ck)
        })
        .collect();
    Ok(SpaceTimeField::from_rows(sgrid, tgrid, rows))
}

/// Spectral solution: mode `n` is `⟨u₀,φ_n⟩ y_n(t) + ⟨f,φ_n⟩ (g * h_n)(t)`
/// with `y_n` the relaxation function and `h_n = L⁻¹[1/(Q+λ_n)]`.
///
/// `g` is taken piecewise linear between the grid nodes, which makes the
/// convolution exact in terms of the step and ramp responses `Y_n`, `Z_n`:
/// `(g * h_n)(t_k) = g(0) Y_n(t_k) + Σ_i g'_i [Z_n(t_{k−i}) − Z_n(t_{k−i−1})]`.
pub fn solve_forward_spectral(
    spec: &MultiTermSpec,
    eig: &EigenSystem,
    u0: &[f64],
    src: &SourceSpec,
    tgrid: TimeGrid,
    contour: &ContourSpec,
) -> Result<SpaceTimeField> {
    let sgrid = *eig.grid();
    check_initial(&sgrid, u0)?;
    src.check(&sgrid, &tgrid)?;
    contour.validate(spec)?;
    let a = eig.project(u0)?;
    let b = eig.project(src.f())?;
    let g = src.g().values();
    let has_source = g.iter().any(|v| *v != 0.0);
    let active: Vec<usize> = (0..eig.len())
        .filter(|&n| a[n] != 0.0 || (has_source && b[n] != 0.0))
        .collect();

    // responses[k][m] for every active mode m at t_k
    let n_t = tgrid.len();
    let responses: Vec<Vec<ModeResponse>> = (0..n_t)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return Ok(vec![ModeResponse::AT_ZERO; active.len()]);
            }
            let rule = ContourRule::new(contour, spec, tgrid.node(k))?;
            let q = rule.q_values(spec);
            Ok(active
                .iter()
                .map(|&n| ModeResponse::evaluate(&rule, &q, eig.values()[n]))
                .collect())
        })
        .collect::<Result<_>>()?;

    let ht = tgrid.step();
    let slopes: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]) / ht).collect();
    let rows = (0..n_t)
        .into_par_iter()
        .map(|k| {
            let mut coeffs = vec![0.0; eig.len()];
            for (m, &n) in active.iter().enumerate() {
                let mut c = a[n] * responses[k][m].relaxation;
                if has_source && k > 0 && b[n] != 0.0 {
                    let mut conv = g[0] * responses[k][m].step;
                    for (i, s) in slopes.iter().enumerate().take(k) {
                        conv += s * (responses[k - i][m].ramp - responses[k - i - 1][m].ramp);
                    }
                    c += b[n] * conv;
                }
                coeffs[n] = c;
            }
            eig.synthesize(&coeffs)
        })
        .collect();
    Ok(SpaceTimeField::from_rows(sgrid, tgrid, rows))
}

/// Combined L1 weights `B_m = Σ_j q_j b_m^{(j)} h^{−α_j}/Γ(2−α_j)`, `m = 0..n`.
fn combined_l1_weights(spec: &MultiTermSpec, tgrid: &TimeGrid) -> Result<Vec<f64>> {
    let n = tgrid.n_steps();
    let h = tgrid.step();
    let mut out = vec![0.0; n];
    for &(q, alpha) in spec.terms() {
        if alpha >= 1.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        let scale = q * h.powf(-alpha) / gamma(2.0 - alpha);
        for (o, b) in out.iter_mut().zip(l1_coefficients(alpha, n)) {
            *o += scale * b;
        }
    }
    Ok(out)
}

/// Implicit L1 time stepping. Step `k` solves
/// `(B₀ I + A_h) u^k = g_k f + B₀ u^{k−1} − Σ_{i<k} B_{k−i}(u^i − u^{i−1})`.
pub fn solve_forward_l1(
    spec: &MultiTermSpec,
    op: &EllipticOperator,
    u0: &[f64],
    src: &SourceSpec,
    tgrid: TimeGrid,
) -> Result<SpaceTimeField> {
    let sgrid = *op.grid();
    check_initial(&sgrid, u0)?;
    src.check(&sgrid, &tgrid)?;
    let b = combined_l1_weights(spec, &tgrid)?;
    let factor = op.factor_shifted(b[0]);
    assert!(factor.min_pivot() > 0.0, "L1 step matrix must be positive definite");

    let n = tgrid.n_steps();
    let m = op.dim();
    let g = src.g().values();
    let f = &src.f()[1..=m];
    let mut field = SpaceTimeField::zeros(sgrid, tgrid);
    field.row_mut(0)[1..=m].copy_from_slice(&u0[1..=m]);
    field.row_mut(0)[0] = 0.0;
    // increments d^i = u^i − u^{i−1}, interior only
    let mut incr: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut rhs = vec![0.0; m];
    for k in 1..=n {
        let prev = &field.row(k - 1)[1..=m];
        for (r, (p, fv)) in rhs.iter_mut().zip(prev.iter().zip(f)) {
            *r = g[k] * fv + b[0] * p;
        }
        for (i, d) in incr.iter().enumerate() {
            // d holds increment number i+1
            let w = b[k - 1 - i];
            for (r, dv) in rhs.iter_mut().zip(d) {
                *r -= w * dv;
            }
        }
        factor.solve_in_place(&mut rhs);
        let d: Vec<f64> = rhs.iter().zip(prev).map(|(u, p)| u - p).collect();
        field.row_mut(k)[1..=m].copy_from_slice(&rhs);
        incr.push(d);
    }
    Ok(field)
}

/// Subordination `u(t) = ∫₀^{τ_max} w(τ) K(t,τ) dτ` with the heat flow `w` and the
/// contour-evaluated kernel, by the trapezoid rule on `n_tau` intervals.
///
/// Since `∫₀^∞ K(t,τ) dτ = 1` and `‖w(τ)‖ ≤ e^{−λ₁τ}‖u₀‖`, the neglected tail
/// is at most `e^{−λ₁τ_max}‖u₀‖`; a warning is logged when it exceeds `1e-6`.
pub fn subordinate(
    spec: &MultiTermSpec,
    eig: &EigenSystem,
    u0: &[f64],
    tgrid: TimeGrid,
    contour: &ContourSpec,
    tau_max: f64,
    n_tau: usize,
) -> Result<SpaceTimeField> {
    contour.validate(spec)?;
    subordinate_with(eig, u0, tgrid, tau_max, n_tau, |t, taus| kernel_row(spec, contour, t, taus))
}

/// [`subordinate`] with a caller-supplied kernel `(t, τ-nodes) ↦ K(t, τ_j)`.
pub fn subordinate_with<K>(
    eig: &EigenSystem,
    u0: &[f64],
    tgrid: TimeGrid,
    tau_max: f64,
    n_tau: usize,
    kernel: K,
) -> Result<SpaceTimeField>
where
    K: Fn(f64, &[f64]) -> Result<Vec<f64>> + Sync,
{
    let sgrid = *eig.grid();
    check_initial(&sgrid, u0)?;
    if !(tau_max.is_finite() && tau_max > 0.0) || n_tau < 2 {
        return Err(Error::Domain(format!(
            "need τ_max > 0 and at least two τ intervals, got {tau_max}, {n_tau}"
        )));
    }
    let c = eig.project(u0)?;
    let tail = (-eig.values()[0] * tau_max).exp() * sgrid.norm(u0);
    if tail > 1e-6 {
        log::warn!("subordination tail bound {tail:.3e} exceeds 1e-6; increase tau_max");
    }
    let dtau = tau_max / n_tau as f64;
    let taus: Vec<f64> = (0..=n_tau).map(|j| j as f64 * dtau).collect();
    let active: Vec<usize> = (0..eig.len()).filter(|&n| c[n] != 0.0).collect();
    // trapezoid-weighted heat factors e^{−λ_n τ_j}
    let heat: Vec<Vec<f64>> = active
        .iter()
        .map(|&n| {
            let lam = eig.values()[n];
            taus.iter()
                .enumerate()
                .map(|(j, tau)| {
                    let w = if j == 0 || j == n_tau { 0.5 * dtau } else { dtau };
                    w * (-lam * tau).exp()
                })
                .collect()
        })
        .collect();
    let rows = (0..tgrid.len())
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return Ok(eig.synthesize(&c));
            }
            let kr = kernel(tgrid.node(k), &taus)?;
            let mut coeffs = vec![0.0; eig.len()];
            for (m, &n) in active.iter().enumerate() {
                coeffs[n] = c[n] * heat[m].iter().zip(&kr).map(|(a, b)| a * b).sum::<f64>();
            }
            Ok(eig.synthesize(&coeffs))
        })
        .collect::<Result<_>>()?;
    Ok(SpaceTimeField::from_rows(sgrid, tgrid, rows))
}

/// Weighted row sums `E_k = Σ_i w_i u(x_i, t_k)`.
pub fn observe(field: &SpaceTimeField, weights: &[f64]) -> Result<TimeSeries> {
    field.space_grid().check_len(weights, "observation weights")?;
    let values = (0..field.time_grid().len())
        .map(|k| field.row(k).iter().zip(weights).map(|(u, w)| u * w).sum())
        .collect();
    TimeSeries::new(*field.time_grid(), values)
}

/// Both sides of the Duhamel identity `Σ_j q_j J^{1−α_j}(∫_ω u) = g * (∫_ω v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelCheck {
    pub lhs: TimeSeries,
    pub rhs: TimeSeries,
}

impl DuhamelCheck {
    pub fn max_residual(&self) -> f64 {
        self.lhs
            .values()
            .iter()
            .zip(self.rhs.values())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Residual relative to `‖LHS‖∞`.
    pub fn relative(&self) -> f64 {
        let scale = self.lhs.max_abs();
        if scale == 0.0 {
            self.max_residual()
        } else {
            self.max_residual() / scale
        }
    }
}

/// Time refinement of the right-hand side convolution in [`duhamel_residual`].
pub const DUHAMEL_SUBSTEPS: usize = 8;

/// Evaluates the Duhamel identity through two independent pipelines: `u`
/// (zero initial value, source `g f`) by the L1 solver, `v` (initial value
/// `f`, no source) by the spectral solver on a grid refined by
/// [`DUHAMEL_SUBSTEPS`], convolved with the piecewise-linear `g`.
pub fn duhamel_residual(
    spec: &MultiTermSpec,
    op: &EllipticOperator,
    eig: &EigenSystem,
    src: &SourceSpec,
    omega: &Subdomain,
    tgrid: TimeGrid,
    contour: &ContourSpec,
) -> Result<DuhamelCheck> {
    let sgrid = *op.grid();
    if sgrid != *eig.grid() {
        return Err(Error::GridMismatch("operator and eigensystem grids differ".into()));
    }
    let weights = observe_weights(&sgrid, omega)?;
    let zero = vec![0.0; sgrid.n_nodes()];
    let u = solve_forward_l1(spec, op, &zero, src, tgrid)?;
    let obs_u = observe(&u, &weights)?;
    let mut lhs = TimeSeries::zeros(tgrid);
    for &(q, alpha) in spec.terms() {
        let j = rl_integral_forward(FractionalOrder::new(1.0 - alpha)?, &obs_u);
        lhs = lhs.add_scaled(q, &j)?;
    }
    let mut f = src.f().to_vec();
    f[0] = 0.0;
    f[sgrid.n_cells()] = 0.0;
    // v has a t^{α} singularity at t = 0, so the trapezoid convolution runs
    // on a refined grid with g interpolated linearly between its nodes
    let r = DUHAMEL_SUBSTEPS;
    let fine = TimeGrid::new(tgrid.t_end(), tgrid.n_steps() * r)?;
    let v = solve_forward_spectral(spec, eig, &f, &SourceSpec::zero(&sgrid, fine), fine, contour)?;
    let obs_v = observe(&v, &weights)?;
    let g = src.g().values();
    let g_fine = TimeSeries::from_fn_indexed(fine, |k| {
        let (i, j) = (k / r, k % r);
        if j == 0 {
            g[i]
        } else {
            let s = j as f64 / r as f64;
            (1.0 - s) * g[i] + s * g[i + 1]
        }
    });
    let conv = convolve(&g_fine, &obs_v)?;
    let rhs = TimeSeries::from_fn_indexed(tgrid, |k| conv.values()[k * r]);
    Ok(DuhamelCheck { lhs, rhs })
}

/// Source series of the time-reflected adjoint problem: step `k` of the
/// reflected problem carries `s_j r_j` with `j = N + 1 − k`, where `s_j` is the
/// trapezoid factor (`1/2` at `j = N`, else `1`). Entry `0` is unused.
pub fn adjoint_source_series(residual: &TimeSeries) -> TimeSeries {
    let tgrid = *residual.grid();
    let n = tgrid.n_steps();
    let r = residual.values();
    TimeSeries::from_fn_indexed(tgrid, |k| {
        if k == 0 {
            0.0
        } else {
            let j = n + 1 - k;
            let s = if j == n { 0.5 } else { 1.0 };
            s * r[j]
        }
    })
}

/// Adjoint state of the discrete forward map `g ↦ ∫_ω u[g]` (zero initial value).
///
/// The backward problem `−Σ q_j ∂_{T−}^{α_j} w + A w = χ_ω r` is solved as a
/// forward L1 problem in reflected time `t̃ = T − t`, so the terminal condition
/// becomes a zero initial state. The reflection uses the index map
/// `k ↦ N + 1 − k` on steps `1..=N`, which is the exact transpose of the L1
/// step system, and `χ_ω` is the observation weight vector divided by `h_x`.
/// Consequently, with `w` the returned field,
/// `Σ_k τ_k ξ_k ⟨f, w(t_k)⟩_h = Σ_k τ_k r_k (∫_ω u[ξ])(t_k)` holds up to
/// rounding for trapezoid weights `τ_k`. Row `0` is zero because `g(0)` never
/// enters the implicit scheme.
pub fn solve_adjoint(
    spec: &MultiTermSpec,
    op: &EllipticOperator,
    residual: &TimeSeries,
    omega_weights: &[f64],
    tgrid: TimeGrid,
) -> Result<SpaceTimeField> {
    residual.grid().check_same(&tgrid)?;
    let sgrid = *op.grid();
    sgrid.check_len(omega_weights, "observation weights")?;
    let hx = sgrid.step();
    let chi: Vec<f64> = omega_weights.iter().map(|w| w / hx).collect();
    let src = SourceSpec::new(adjoint_source_series(residual), chi)?;
    let zero = vec![0.0; sgrid.n_nodes()];
    let reflected = solve_forward_l1(spec, op, &zero, &src, tgrid)?;
    Ok(unreflect_adjoint(&reflected))
}

/// Maps the reflected solution back: row `k ≥ 1` is row `N + 1 − k` divided by
/// the trapezoid factor `s_k`, row `0` is zero.
pub fn unreflect_adjoint(reflected: &SpaceTimeField) -> SpaceTimeField {
    let tgrid = *reflected.time_grid();
    let sgrid = *reflected.space_grid();
    let n = tgrid.n_steps();
    let mut out = SpaceTimeField::zeros(sgrid, tgrid);
    for k in 1..=n {
        let s = if k == n { 0.5 } else { 1.0 };
        let src = reflected.row(n + 1 - k);
        out.row_mut(k).iter_mut().zip(src).for_each(|(o, v)| *o = v / s);
    }
    out
}

/// `⟨f, w(t_k)⟩_h` for every step.
pub fn spatial_inner(field: &SpaceTimeField, f: &[f64]) -> Result<TimeSeries> {
    let sgrid = field.space_grid();
    sgrid.check_len(f, "spatial factor")?;
    TimeSeries::new(
        *field.time_grid(),
        (0..field.time_grid().len()).map(|k| sgrid.inner(field.row(k), f)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{assemble, default_mode_count, eigensystem, EllipticCoefficients};
    use crate::special::{mittag_leffler, wright_m};
    use std::f64::consts::PI;

    fn setup(n_cells: usize) -> (SpaceGrid, EllipticOperator, EigenSystem) {
        let sg = SpaceGrid::unit(n_cells).unwrap();
        let op = assemble(&sg, &EllipticCoefficients::laplacian()).unwrap();
        let eig = eigensystem(&op, default_mode_count(&sg)).unwrap();
        (sg, op, eig)
    }

    fn sine(sg: &SpaceGrid) -> Vec<f64> {
        sg.sample(|x| (PI * x).sin())
    }

    #[test]
    fn field_validation() {
        let sg = SpaceGrid::unit(4).unwrap();
        let tg = TimeGrid::new(1.0, 2).unwrap();
        assert!(SpaceTimeField::new(sg, tg, vec![0.0; 14]).is_err());
        let mut v = vec![0.0; 15];
        v[5] = 1.0;
        assert!(SpaceTimeField::new(sg, tg, v).is_err());
        let mut v = vec![0.0; 15];
        v[6] = f64::NAN;
        assert!(SpaceTimeField::new(sg, tg, v).is_err());
    }

    #[test]
    fn heat_single_mode_decay() {
        let (sg, _, eig) = setup(50);
        let tg = TimeGrid::new(0.1, 4).unwrap();
        let w = solve_heat(&eig, &sine(&sg), tg).unwrap();
        let lam = eig.values()[0];
        for i in 0..sg.n_nodes() {
            let exact = (-lam * 0.1).exp() * (PI * sg.node(i)).sin();
            assert!((w.at(i, 4) - exact).abs() < 1e-12);
            assert!((w.at(i, 0) - (PI * sg.node(i)).sin()).abs() < 1e-12);
        }
        // the discrete eigenvalue approximates π²
        assert!((lam - PI * PI).abs() < 4e-3);
    }

    #[test]
    fn heat_positivity() {
        let (sg, _, eig) = setup(40);
        let u0 = sg.sample(|x| if (0.2..0.3).contains(&x) { 1.0 } else { 0.0 });
        let w = solve_heat(&eig, &u0, TimeGrid::new(1.0, 20).unwrap()).unwrap();
        assert!(w.min_interior_positive_time() > 0.0);
    }

    #[test]
    fn spectral_matches_mittag_leffler() {
        let (sg, _, eig) = setup(50);
        let tg = TimeGrid::new(1.0, 20).unwrap();
        for alpha in [0.2, 0.5, 0.8] {
            let spec = MultiTermSpec::single(alpha).unwrap();
            let c = ContourSpec::for_spec(&spec);
            let u = solve_forward_spectral(&spec, &eig, &sine(&sg), &SourceSpec::zero(&sg, tg), tg, &c).unwrap();
            let lam = eig.values()[0];
            for k in 0..tg.len() {
                let e = mittag_leffler(alpha, 1.0, -lam * tg.node(k).powf(alpha)).unwrap();
                for i in [10, 25, 40] {
                    let exact = e * (PI * sg.node(i)).sin();
                    assert!((u.at(i, k) - exact).abs() < 1e-9, "{alpha} {k} {i}");
                }
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let (sg, op, eig) = setup(20);
        let tg = TimeGrid::new(1.0, 10).unwrap();
        let spec = MultiTermSpec::single(0.5).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let z = vec![0.0; sg.n_nodes()];
        let src = SourceSpec::zero(&sg, tg);
        assert_eq!(solve_forward_spectral(&spec, &eig, &z, &src, tg, &c).unwrap().max_abs(), 0.0);
        assert_eq!(solve_forward_l1(&spec, &op, &z, &src, tg).unwrap().max_abs(), 0.0);
        assert_eq!(subordinate(&spec, &eig, &z, tg, &c, 4.0, 100).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn l1_single_term_final_time() {
        let (sg, op, eig) = setup(50);
        let tg = TimeGrid::new(1.0, 50).unwrap();
        let spec = MultiTermSpec::single(0.2).unwrap();
        let u = solve_forward_l1(&spec, &op, &sine(&sg), &SourceSpec::zero(&sg, tg), tg).unwrap();
        let e = mittag_leffler(0.2, 1.0, -eig.values()[0]).unwrap();
        let err = (0..sg.n_nodes())
            .map(|i| (u.at(i, 50) - e * (PI * sg.node(i)).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn l1_and_spectral_agree_with_source() {
        let (sg, op, eig) = setup(30);
        let tg = TimeGrid::new(1.0, 400).unwrap();
        let spec = MultiTermSpec::new(vec![(1.0, 0.8), (0.5, 0.3)]).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let g = TimeSeries::from_fn(tg, |t| 10.0 * t * (1.0 - t));
        let src = SourceSpec::new(g, sine(&sg)).unwrap();
        let z = vec![0.0; sg.n_nodes()];
        let a = solve_forward_l1(&spec, &op, &z, &src, tg).unwrap();
        let b = solve_forward_spectral(&spec, &eig, &z, &src, tg, &c).unwrap();
        let rel = a.rel_l2_error(&b).unwrap();
        assert!(rel < 1e-3, "{rel}");
    }

    #[test]
    fn spectral_source_matches_closed_form() {
        // ∂^α u + λ u = 1 with u(0) = 0 has u = t^α E_{α,α+1}(−λ t^α)
        let (sg, _, eig) = setup(20);
        let tg = TimeGrid::new(1.0, 10).unwrap();
        let spec = MultiTermSpec::single(0.6).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let src = SourceSpec::new(TimeSeries::from_fn(tg, |_| 1.0), sine(&sg)).unwrap();
        let u = solve_forward_spectral(&spec, &eig, &vec![0.0; sg.n_nodes()], &src, tg, &c).unwrap();
        let lam = eig.values()[0];
        for k in 1..tg.len() {
            let t = tg.node(k);
            let exact = t.powf(0.6) * mittag_leffler(0.6, 1.6, -lam * t.powf(0.6)).unwrap();
            let i = 7;
            assert!((u.at(i, k) - exact * (PI * sg.node(i)).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn subordination_with_wright_kernel() {
        let (sg, _, eig) = setup(40);
        let tg = TimeGrid::new(1.0, 4).unwrap();
        let spec = MultiTermSpec::single(0.5).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let u0 = sine(&sg);
        let a = subordinate(&spec, &eig, &u0, tg, &c, 3.0, 3000).unwrap();
        let b = subordinate_with(&eig, &u0, tg, 3.0, 3000, |t, taus| {
            let s = t.powf(-0.5);
            taus.iter().map(|tau| Ok(s * wright_m(0.5, tau * s)?)).collect()
        })
        .unwrap();
        let spectral = solve_forward_spectral(&spec, &eig, &u0, &SourceSpec::zero(&sg, tg), tg, &c).unwrap();
        assert!(a.rel_l2_error(&b).unwrap() < 1e-4);
        for k in 1..tg.len() {
            let (x, y) = (sg.norm(a.row(k)), sg.norm(spectral.row(k)));
            assert!((x - y).abs() < 1e-3 * y, "{k}: {x} {y}");
        }
    }

    #[test]
    fn observe_sine() {
        let (sg, _, _) = setup(50);
        let tg = TimeGrid::new(1.0, 3).unwrap();
        let w = observe_weights(&sg, &Subdomain::interval(0.4, 0.6).unwrap()).unwrap();
        let row = sine(&sg);
        let f = SpaceTimeField::new(sg, tg, row.repeat(4)).unwrap();
        let e = observe(&f, &w).unwrap();
        for v in e.values() {
            assert!((v - 0.196_726_328_616_693_15).abs() < 1e-4);
        }
        let ones = sg.sample(|_| 1.0);
        let f = SpaceTimeField::new(sg, tg, ones.repeat(4)).unwrap();
        for v in observe(&f, &w).unwrap().values() {
            assert!((v - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn duhamel_identity() {
        let spec = MultiTermSpec::single(0.5).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let omega = Subdomain::interval(0.4, 0.6).unwrap();
        let mut last = f64::INFINITY;
        for n in [50, 100, 200] {
            let (sg, op, eig) = setup(50);
            let tg = TimeGrid::new(1.0, n).unwrap();
            let src = SourceSpec::new(TimeSeries::from_fn(tg, |t| 10.0 * t * (1.0 - t)), sine(&sg)).unwrap();
            let r = duhamel_residual(&spec, &op, &eig, &src, &omega, tg, &c).unwrap().relative();
            assert!(r < last, "{n}: {r}");
            last = r;
        }
        assert!(last < 5e-3, "{last}");
    }

    #[test]
    fn adjoint_consistency() {
        let (sg, op, _) = setup(30);
        let tg = TimeGrid::new(1.0, 30).unwrap();
        let spec = MultiTermSpec::single(0.8).unwrap();
        let w = observe_weights(&sg, &Subdomain::interval(0.4, 0.6).unwrap()).unwrap();
        let f = sine(&sg);
        let xi = TimeSeries::from_fn(tg, |t| (3.0 * t).sin() + t * t);
        let r = TimeSeries::from_fn(tg, |t| (5.0 * t).cos() - 0.3);
        let z = vec![0.0; sg.n_nodes()];
        let u = solve_forward_l1(&spec, &op, &z, &SourceSpec::new(xi.clone(), f.clone()).unwrap(), tg).unwrap();
        let lhs = observe(&u, &w).unwrap().inner(&r).unwrap();
        let adj = solve_adjoint(&spec, &op, &r, &w, tg).unwrap();
        let rhs = xi.inner(&spatial_inner(&adj, &f).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "{lhs} {rhs}");
        // zero residual
        let zero = solve_adjoint(&spec, &op, &TimeSeries::zeros(tg), &w, tg).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn adjoint_is_reflected_forward_solve() {
        let (sg, op, _) = setup(20);
        let tg = TimeGrid::new(1.0, 12).unwrap();
        let spec = MultiTermSpec::new(vec![(1.0, 0.6), (0.2, 0.1)]).unwrap();
        let w = observe_weights(&sg, &Subdomain::interval(0.3, 0.5).unwrap()).unwrap();
        let r = TimeSeries::from_fn(tg, |t| t - 0.5);
        let chi: Vec<f64> = w.iter().map(|v| v / sg.step()).collect();
        let src = SourceSpec::new(adjoint_source_series(&r), chi).unwrap();
        let fwd = solve_forward_l1(&spec, &op, &vec![0.0; sg.n_nodes()], &src, tg).unwrap();
        assert_eq!(unreflect_adjoint(&fwd), solve_adjoint(&spec, &op, &r, &w, tg).unwrap());
    }

    #[test]
    fn forward_positivity() {
        let (sg, op, eig) = setup(50);
        let tg = TimeGrid::new(1.0, 50).unwrap();
        let spec = MultiTermSpec::new(vec![(1.0, 0.7), (0.5, 0.2)]).unwrap();
        let c = ContourSpec::for_spec(&spec);
        let u0 = sg.sample(|x| (PI * x).sin() + 0.1);
        let src = SourceSpec::zero(&sg, tg);
        assert!(solve_forward_l1(&spec, &op, &u0, &src, tg).unwrap().min_interior_positive_time() > 0.0);
        assert!(solve_forward_spectral(&spec, &eig, &u0, &src, tg, &c).unwrap().min_interior_positive_time() > 0.0);
    }
}
