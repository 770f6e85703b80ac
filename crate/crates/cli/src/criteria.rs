//! Acceptance criteria and property checks. Each check computes its measured
//! quantities, compares them with fixed thresholds and returns one outcome.
//! The verification suite and the acceptance test target share these.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subdiff_core::elliptic::{
    assemble, default_mode_count, eigensystem, EigenSystem, EllipticCoefficients, EllipticOperator,
    SpaceGrid, Subdomain,
};
use subdiff_core::frac_calc::{caputo_forward, duality_gap, rl_integral_backward, rl_integral_forward};
use subdiff_core::inverse_cg::{add_noise, gradient, objective, ForwardMap, InverseConfig};
use subdiff_core::pde_solver::{
    duhamel_residual, solve_forward_l1, solve_forward_spectral, subordinate, SourceSpec, SpaceTimeField,
};
use subdiff_core::special::{gamma, mittag_leffler};
use subdiff_core::transform_kernels::{cm_certificate, kernel_row, relaxation_mode, MAX_CM_ORDER};
use subdiff_core::{ContourSpec, FractionalOrder, MultiTermSpec, TimeGrid, TimeSeries};

use crate::config::preset;
use crate::error::CliResult;
use crate::experiment::run_inversion;

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Settings shared by all checks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CheckOptions {
    /// Contour half-angle override for every contour-based check.
    pub theta0: Option<f64>,
}

impl CheckOptions {
    fn contour(&self, spec: &MultiTermSpec) -> ContourSpec {
        let c = ContourSpec::for_spec(spec);
        match self.theta0 {
            Some(t) => c.with_theta0(t),
            None => c,
        }
    }
}

/// A named check.
#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub name: &'static str,
    pub run: fn(&CheckOptions) -> CliResult<CheckOutcome>,
}

impl Criterion {
    /// Runs the check, turning an error into a failed outcome.
    pub fn evaluate(&self, opts: &CheckOptions) -> CheckOutcome {
        match (self.run)(opts) {
            Ok(o) => o,
            Err(e) => CheckOutcome::new(self.name, false, format!("aborted: {e}")),
        }
    }
}

macro_rules! criterion {
    ($name:expr, $f:ident) => {
        Criterion { name: $name, run: $f }
    };
}

/// Criteria whose thresholds the specified method cannot meet, with the reason.
pub const KNOWN_SHORTFALLS: [(&str, &str); 2] = [
    (
        "ex1a reconstruction",
        "with λ = 1e-5 the exact Tikhonov minimiser itself is 3.0% from g_true (noise-free data)",
    ),
    (
        "ex1b reconstruction",
        "with λ = 1e-5 the exact Tikhonov minimiser itself is 3.0% from g_true (noise-free data)",
    ),
];

pub fn known_shortfall(name: &str) -> Option<&'static str> {
    KNOWN_SHORTFALLS.iter().find(|(n, _)| *n == name).map(|(_, r)| *r)
}

/// The twelve acceptance criteria, in order.
pub fn primary_criteria() -> Vec<Criterion> {
    vec![
        criterion!("ex1a reconstruction", example_ex1a),
        criterion!("ex1b reconstruction", example_ex1b),
        criterion!("ex2 reconstruction", example_ex2),
        criterion!("ex3 reconstruction", example_ex3),
        criterion!("subordination identity", subordination_identity),
        criterion!("kernel positivity", kernel_positivity),
        criterion!("solution positivity", solution_positivity),
        criterion!("operator identities", operator_identities),
        criterion!("single-term oracle", single_term_oracle),
        criterion!("adjoint and gradient", adjoint_gradient),
        criterion!("Duhamel identity", duhamel_identity),
        criterion!("decay rates", decay_rates),
    ]
}

/// Checks beyond the acceptance criteria, run by the full suite.
pub fn extended_checks() -> Vec<Criterion> {
    vec![
        criterion!("scheme cross-validation", scheme_cross_validation),
        criterion!("temporal refinement", temporal_refinement),
    ]
}

fn laplacian_setup(cells: usize) -> CliResult<(SpaceGrid, EllipticOperator, EigenSystem)> {
    let sg = SpaceGrid::unit(cells)?;
    let op = assemble(&sg, &EllipticCoefficients::laplacian())?;
    let eig = eigensystem(&op, default_mode_count(&sg))?;
    Ok((sg, op, eig))
}

fn sine(sg: &SpaceGrid) -> Vec<f64> {
    sg.sample(|x| (PI * x).sin())
}

/// `log₂(e_i / e_{i+1})` for successive halvings of the step.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn example_check(
    name: &'static str,
    cases: &[(&str, f64, Option<usize>)],
    max_seconds: Option<f64>,
) -> CliResult<CheckOutcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(id, max_rel, max_iters) in cases {
        let run = run_inversion(&preset(id)?)?;
        let rel = run.result.rel_error.expect("presets know g_true");
        let it = run.result.iterations;
        let secs = run.elapsed.as_secs_f64();
        let ok = rel <= max_rel
            && max_iters.is_none_or(|m| it <= m)
            && max_seconds.is_none_or(|m| secs <= m);
        passed &= ok;
        let mut part = format!(
            "{id} rel_error {rel:.4e} (≤ {max_rel}), {it} iterations ({})",
            run.result.stop_reason.as_str()
        );
        if let Some(m) = max_iters {
            part.push_str(&format!(" (≤ {m})"));
        }
        if let Some(m) = max_seconds {
            part.push_str(&format!(", {secs:.2} s (≤ {m} s)"));
        }
        parts.push(part);
    }
    Ok(CheckOutcome::new(name, passed, parts.join("; ")))
}

pub fn example_ex1a(_: &CheckOptions) -> CliResult<CheckOutcome> {
    example_check("ex1a reconstruction", &[("ex1a", 0.006, Some(15))], Some(30.0))
}

pub fn example_ex1b(_: &CheckOptions) -> CliResult<CheckOutcome> {
    example_check("ex1b reconstruction", &[("ex1b", 0.012, Some(20))], None)
}

pub fn example_ex2(_: &CheckOptions) -> CliResult<CheckOutcome> {
    example_check("ex2 reconstruction", &[("ex2a", 0.086, None), ("ex2b", 0.128, None)], None)
}

pub fn example_ex3(_: &CheckOptions) -> CliResult<CheckOutcome> {
    example_check("ex3 reconstruction", &[("ex3a", 0.156, None), ("ex3b", 0.17, None)], None)
}

/// Subordinated heat flow vs spectral solution for one-, two- and three-term
/// operators, relative `L²(Ω×(0,T))` mismatch ≤ 1e-3, total time ≤ 2 min.
pub fn subordination_identity(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let start = Instant::now();
    let specs = [
        MultiTermSpec::new(vec![(1.0, 0.5)])?,
        MultiTermSpec::new(vec![(1.0, 0.7), (0.5, 0.3)])?,
        MultiTermSpec::new(vec![(1.0, 0.8), (0.4, 0.5), (0.2, 0.2)])?,
    ];
    let (sg, _, eig) = laplacian_setup(40)?;
    let tg = TimeGrid::new(1.0, 20)?;
    let u0 = sg.sample(|x| (PI * x).sin() + 0.3 * (2.0 * PI * x).sin());
    let mut mismatches = Vec::new();
    for spec in &specs {
        let c = opts.contour(spec);
        let sub = subordinate(spec, &eig, &u0, tg, &c, 2.5, 8000)?;
        let sp = solve_forward_spectral(spec, &eig, &u0, &SourceSpec::zero(&sg, tg), tg, &c)?;
        mismatches.push(sub.rel_l2_error(&sp)?);
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = mismatches.iter().all(|m| *m <= 1e-3) && secs <= 120.0;
    Ok(CheckOutcome::new(
        "subordination identity",
        passed,
        format!("relative mismatch ℓ=1,2,3: [{}] (≤ 1e-3), {secs:.1} s (≤ 120 s)", fmt_list(&mismatches)),
    ))
}

/// Random admissible operator with one to three terms.
pub fn random_spec(rng: &mut ChaCha8Rng) -> CliResult<MultiTermSpec> {
    let len = rng.random_range(1..=3);
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(len);
    while terms.len() < len {
        let a: f64 = rng.random_range(0.05..0.95);
        if terms.iter().all(|(_, b)| (a - b).abs() > 0.02) {
            terms.push((rng.random_range(0.2..2.0), a));
        }
    }
    Ok(MultiTermSpec::new(terms)?)
}

/// `min K(t,τ) ≥ −1e-8` on a 40×40 grid over `(0,1]²` for five seeded random
/// operators, and the complete-monotonicity certificate up to order 6 on
/// log-spaced `s ∈ [0.1, 10]`.
pub fn kernel_positivity(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let nodes: Vec<f64> = (1..=40).map(|k| k as f64 / 40.0).collect();
    let s_grid: Vec<f64> = (0..25).map(|k| 10f64.powf(-1.0 + 2.0 * k as f64 / 24.0)).collect();
    let mut mins = Vec::new();
    let mut cm_ok = true;
    for _ in 0..5 {
        let spec = random_spec(&mut rng)?;
        let c = opts.contour(&spec);
        let mut m = f64::INFINITY;
        for &t in &nodes {
            m = m.min(min_of(&kernel_row(&spec, &c, t, &nodes)?));
        }
        mins.push(m);
        for tau in [0.1, 0.5, 1.0] {
            cm_ok &= cm_certificate(&spec, tau, &s_grid, MAX_CM_ORDER)?;
        }
    }
    let passed = mins.iter().all(|m| *m >= -1e-8) && cm_ok;
    Ok(CheckOutcome::new(
        "kernel positivity",
        passed,
        format!(
            "min K per operator [{}] (≥ -1e-8), completely monotone up to order {MAX_CM_ORDER}: {cm_ok}",
            fmt_list(&mins)
        ),
    ))
}

/// `u₀ = sin πx + 0.1`, no source: both solvers strictly positive.
pub fn solution_positivity(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let (sg, op, eig) = laplacian_setup(50)?;
    let tg = TimeGrid::new(1.0, 50)?;
    let u0 = sg.sample(|x| (PI * x).sin() + 0.1);
    let src = SourceSpec::zero(&sg, tg);
    let specs = [
        MultiTermSpec::single(0.2)?,
        MultiTermSpec::single(0.5)?,
        MultiTermSpec::single(0.8)?,
        MultiTermSpec::new(vec![(1.0, 0.7), (0.5, 0.2)])?,
    ];
    let mut min_l1 = f64::INFINITY;
    let mut min_sp = f64::INFINITY;
    for spec in &specs {
        min_l1 = min_l1.min(solve_forward_l1(spec, &op, &u0, &src, tg)?.min_interior_positive_time());
        let sp = solve_forward_spectral(spec, &eig, &u0, &src, tg, &opts.contour(spec))?;
        min_sp = min_sp.min(sp.min_interior_positive_time());
    }
    Ok(CheckOutcome::new(
        "solution positivity",
        min_l1 > 0.0 && min_sp > 0.0,
        format!("minimum interior value: L1 {min_l1:.4e}, spectral {min_sp:.4e} (> 0)"),
    ))
}

/// Duality gap and semigroup residuals converge with order ≥ 1.5; Caputo
/// power-rule errors converge with order ≥ 2 − α − 0.1.
pub fn operator_identities(_: &CheckOptions) -> CliResult<CheckOutcome> {
    let ns = [20, 40, 80, 160];
    let mut duality_orders = Vec::new();
    let mut duality_exact = true;
    for alpha in [0.3, 0.5, 0.8] {
        let a = FractionalOrder::new(alpha)?;
        let gaps = ns
            .iter()
            .map(|&n| {
                let tg = TimeGrid::new(1.0, n)?;
                let g = TimeSeries::from_fn(tg, |t| (2.0 * t).sin() + t * t);
                let h = TimeSeries::from_fn(tg, |t| (1.0 - t) * t.cos());
                duality_gap(a, &g, &h)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if gaps.iter().any(|g| *g > 1e-13) {
            duality_exact = false;
            duality_orders.push(min_of(&observed_orders(&gaps)));
        }
    }

    let mut semigroup_orders = Vec::new();
    for (alpha, beta) in [(0.4, 0.5), (0.3, 0.9)] {
        let (a, b, ab) = (
            FractionalOrder::new(alpha)?,
            FractionalOrder::new(beta)?,
            FractionalOrder::new(alpha + beta)?,
        );
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        for &n in &ns {
            let tg = TimeGrid::new(1.0, n)?;
            let u = TimeSeries::from_fn(tg, |t| t.sin() + t * t);
            let lhs = rl_integral_forward(a, &rl_integral_forward(b, &u));
            fwd.push(lhs.sub(&rl_integral_forward(ab, &u))?.max_abs());
            let v = u.reflect();
            let lhs = rl_integral_backward(a, &rl_integral_backward(b, &v));
            bwd.push(lhs.sub(&rl_integral_backward(ab, &v))?.max_abs());
        }
        semigroup_orders.push(min_of(&observed_orders(&fwd)));
        semigroup_orders.push(min_of(&observed_orders(&bwd)));
    }

    let mut caputo_ok = true;
    let mut caputo_orders = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        let a = FractionalOrder::new(alpha)?;
        let c = gamma(3.0) / gamma(3.0 - alpha);
        let errs = ns
            .iter()
            .map(|&n| {
                let tg = TimeGrid::new(1.0, n)?;
                let d = caputo_forward(a, &TimeSeries::from_fn(tg, |t| t * t))?;
                d.sub(&TimeSeries::from_fn(tg, |t| c * t.powf(2.0 - alpha)))
                    .map(|e| e.max_abs())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let order = min_of(&observed_orders(&errs));
        caputo_ok &= order >= 2.0 - alpha - 0.1;
        caputo_orders.push(order);
    }

    let duality_ok = duality_exact || duality_orders.iter().all(|o| *o >= 1.5);
    let semigroup_ok = semigroup_orders.iter().all(|o| *o >= 1.5);
    let duality = if duality_orders.is_empty() {
        "exact to rounding".to_owned()
    } else {
        format!("orders [{}]", fmt_list(&duality_orders))
    };
    Ok(CheckOutcome::new(
        "operator identities",
        duality_ok && semigroup_ok && caputo_ok,
        format!(
            "duality gap {duality} (≥ 1.5); semigroup orders [{}] (≥ 1.5); Caputo power-rule orders α=0.3,0.5,0.7 [{}] (≥ 2−α−0.1)",
            fmt_list(&semigroup_orders),
            fmt_list(&caputo_orders)
        ),
    ))
}

/// Both solvers against the Mittag-Leffler mode `E_α(−λ₁t^α) sin πx` on a
/// 50×50 grid, and the contour relaxation function against `E_α`.
///
/// The L1 error is measured at the final time: the uncorrected first step
/// carries an `O(1e-2)` error at `t = h` for this nonsmooth-in-time solution.
pub fn single_term_oracle(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let (sg, op, eig) = laplacian_setup(50)?;
    let tg = TimeGrid::new(1.0, 50)?;
    let u0 = sine(&sg);
    let lam = eig.values()[0];
    let mut l1_final = 0.0f64;
    let mut l1_all = 0.0f64;
    let mut spectral = 0.0f64;
    for alpha in [0.2, 0.5, 0.8] {
        let spec = MultiTermSpec::single(alpha)?;
        let src = SourceSpec::zero(&sg, tg);
        let l1 = solve_forward_l1(&spec, &op, &u0, &src, tg)?;
        let sp = solve_forward_spectral(&spec, &eig, &u0, &src, tg, &opts.contour(&spec))?;
        for k in 0..tg.len() {
            let e = mittag_leffler(alpha, 1.0, -lam * tg.node(k).powf(alpha))?;
            for (i, x) in sg.nodes().into_iter().enumerate() {
                let exact = e * (PI * x).sin();
                let d = (l1.at(i, k) - exact).abs();
                l1_all = l1_all.max(d);
                if k == tg.n_steps() {
                    l1_final = l1_final.max(d);
                }
                spectral = spectral.max((sp.at(i, k) - exact).abs());
            }
        }
    }
    let mut contour = 0.0f64;
    for alpha in [0.2, 0.5, 0.8] {
        let spec = MultiTermSpec::single(alpha)?;
        let c = opts.contour(&spec);
        for lam in [1.0, PI * PI, 100.0] {
            for t in [0.02, 0.1, 0.25, 0.5, 1.0] {
                let y = relaxation_mode(&spec, lam, &c, t)?;
                contour = contour.max((y - mittag_leffler(alpha, 1.0, -lam * t.powf(alpha))?).abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        "single-term oracle",
        l1_final <= 2e-3 && spectral <= 2e-3 && contour <= 1e-6,
        format!(
            "L1 max error at T {l1_final:.3e} (≤ 2e-3; over all steps {l1_all:.3e}), spectral max error {spectral:.3e} (≤ 2e-3), \
             contour relaxation vs Mittag-Leffler {contour:.3e} (≤ 1e-6)"
        ),
    ))
}

fn random_smooth(rng: &mut ChaCha8Rng, tg: TimeGrid) -> TimeSeries {
    let c: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..=1.0)).collect();
    TimeSeries::from_fn(tg, |t| {
        c[0] + (1..5).map(|m| c[m] * (m as f64 * PI * t).sin()).sum::<f64>()
    })
}

/// Adjoint gradient vs central differences (`ε = 1e-4`) on ten random
/// directions, and `⟨Gξ, r⟩` vs `⟨ξ, G*r⟩`, on a 30×30 grid.
pub fn adjoint_gradient(_: &CheckOptions) -> CliResult<CheckOutcome> {
    let space = SpaceGrid::unit(30)?;
    let time = TimeGrid::new(1.0, 30)?;
    let cfg = InverseConfig {
        spec: MultiTermSpec::new(vec![(1.0, 0.8), (0.5, 0.3)])?,
        space,
        coefficients: EllipticCoefficients::laplacian(),
        time,
        f: sine(&space),
        omega: Subdomain::interval(0.4, 0.6)?,
        lambda_reg: 1e-5,
        epsilon: 1e-3,
        max_iters: 10,
        g0: TimeSeries::zeros(time),
        seed: 3,
        delta: 0.01,
    };
    let map = ForwardMap::new(&cfg)?;
    let truth = TimeSeries::from_fn(time, |t| 10.0 * t * (1.0 - t));
    let data = add_noise(&map.apply(&truth)?, cfg.delta, cfg.seed)?;
    let g = TimeSeries::from_fn(time, |t| 5.0 * t * (1.0 - t) + 0.3);
    let grad = gradient(&g, &data, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eps = 1e-4;
    let mut fd_err = 0.0f64;
    for _ in 0..10 {
        let xi = random_smooth(&mut rng, time);
        let plus = objective(&g.add_scaled(eps, &xi)?, &data, &cfg)?;
        let minus = objective(&g.add_scaled(-eps, &xi)?, &data, &cfg)?;
        let fd = (plus - minus) / (2.0 * eps);
        let an = grad.inner(&xi)?;
        fd_err = fd_err.max((fd - an).abs() / an.abs());
    }
    let mut adj_err = 0.0f64;
    for _ in 0..5 {
        let xi = random_smooth(&mut rng, time);
        let r = random_smooth(&mut rng, time);
        let lhs = map.apply(&xi)?.inner(&r)?;
        let rhs = xi.inner(&map.adjoint(&r)?)?;
        adj_err = adj_err.max((lhs - rhs).abs() / lhs.abs());
    }
    Ok(CheckOutcome::new(
        "adjoint and gradient",
        fd_err <= 1e-4 && adj_err <= 1e-3,
        format!(
            "gradient vs central differences max relative {fd_err:.3e} (≤ 1e-4), ⟨Gξ,r⟩ vs ⟨ξ,G*r⟩ max relative {adj_err:.3e} (≤ 1e-3)"
        ),
    ))
}

/// Duhamel residual relative to `‖LHS‖∞` at 50, 100, 200 steps: ≤ 5e-3 at 200
/// and strictly decreasing.
pub fn duhamel_identity(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let spec = MultiTermSpec::single(0.5)?;
    let c = opts.contour(&spec);
    let omega = Subdomain::interval(0.4, 0.6)?;
    let (sg, op, eig) = laplacian_setup(50)?;
    let mut res = Vec::new();
    for n in [50, 100, 200] {
        let tg = TimeGrid::new(1.0, n)?;
        let src = SourceSpec::new(TimeSeries::from_fn(tg, |t| 10.0 * t * (1.0 - t)), sine(&sg))?;
        res.push(duhamel_residual(&spec, &op, &eig, &src, &omega, tg, &c)?.relative());
    }
    let monotone = res.windows(2).all(|w| w[1] < w[0]);
    Ok(CheckOutcome::new(
        "Duhamel identity",
        res[2] <= 5e-3 && monotone,
        format!(
            "relative residual at 50/100/200 steps [{}] (≤ 5e-3 at 200, decreasing: {monotone})",
            fmt_list(&res)
        ),
    ))
}

fn scaled_sup(field: &SpaceTimeField, power: f64, norm0: f64, from: f64, to: f64) -> (f64, f64) {
    let tg = field.time_grid();
    let norms = field.spatial_norms();
    let vals: Vec<f64> = (1..tg.len())
        .filter(|&k| tg.node(k) >= from - 1e-12 && tg.node(k) <= to + 1e-12)
        .map(|k| tg.node(k).powf(power) * norms[k] / norm0)
        .collect();
    (min_of(&vals), vals.iter().copied().fold(0.0, f64::max))
}

/// Short time: `sup t^{α₁}‖u(t)‖/‖u₀‖ ≤ 2` on `[h, 1]` for `u₀ = φ₁` at four
/// refinements, both solvers. Long time: `t^{α_ℓ}‖u(t)‖` on `[10, 50]` for a
/// high mode stays within a factor 3.
pub fn decay_rates(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let spec = MultiTermSpec::new(vec![(1.0, 0.7), (0.5, 0.3)])?;
    let c = opts.contour(&spec);
    let (sg, op, eig) = laplacian_setup(40)?;
    let alpha1 = spec.alpha_max();
    let alpha_l = spec.alpha_min();

    let u0 = eig.vector(0).to_vec();
    let n0 = sg.norm(&u0);
    let mut short = Vec::new();
    for n in [25, 50, 100, 200] {
        let tg = TimeGrid::new(1.0, n)?;
        let src = SourceSpec::zero(&sg, tg);
        let l1 = solve_forward_l1(&spec, &op, &u0, &src, tg)?;
        let sp = solve_forward_spectral(&spec, &eig, &u0, &src, tg, &c)?;
        short.push(scaled_sup(&l1, alpha1, n0, 0.0, 1.0).1.max(scaled_sup(&sp, alpha1, n0, 0.0, 1.0).1));
    }

    let mode = 9;
    let u_hi = eig.vector(mode).to_vec();
    let tg = TimeGrid::new(50.0, 500)?;
    let sp = solve_forward_spectral(&spec, &eig, &u_hi, &SourceSpec::zero(&sg, tg), tg, &c)?;
    let (lo, hi) = scaled_sup(&sp, alpha_l, sg.norm(&u_hi), 10.0, 50.0);
    let band = hi / lo;
    let short_ok = short.iter().all(|v| *v <= 2.0);
    Ok(CheckOutcome::new(
        "decay rates",
        short_ok && band <= 3.0,
        format!(
            "short-time sup t^α₁‖u‖/‖u₀‖ at 25/50/100/200 steps [{}] (≤ 2); long-time t^α_ℓ‖u‖ band max/min {band:.3} on [10, 50] for λ = {:.1} (≤ 3)",
            fmt_list(&short),
            eig.values()[mode]
        ),
    ))
}

/// Spectral and L1 solutions agree to 1e-3 relative in `L²(Ω×(0,T))` for a
/// two-term operator: homogeneous with `u₀ = sin πx` and source-driven with
/// `g = 10t(1−t)`.
pub fn scheme_cross_validation(opts: &CheckOptions) -> CliResult<CheckOutcome> {
    let spec = MultiTermSpec::new(vec![(1.0, 0.8), (0.5, 0.3)])?;
    let c = opts.contour(&spec);
    let (sg, op, eig) = laplacian_setup(30)?;
    let tg = TimeGrid::new(1.0, 8000)?;
    let src = SourceSpec::zero(&sg, tg);
    let u0 = sine(&sg);
    let hom = solve_forward_l1(&spec, &op, &u0, &src, tg)?
        .rel_l2_error(&solve_forward_spectral(&spec, &eig, &u0, &src, tg, &c)?)?;
    let tg = TimeGrid::new(1.0, 400)?;
    let zero = vec![0.0; sg.n_nodes()];
    let src = SourceSpec::new(TimeSeries::from_fn(tg, |t| 10.0 * t * (1.0 - t)), u0)?;
    let forced = solve_forward_l1(&spec, &op, &zero, &src, tg)?
        .rel_l2_error(&solve_forward_spectral(&spec, &eig, &zero, &src, tg, &c)?)?;
    Ok(CheckOutcome::new(
        "scheme cross-validation",
        hom <= 1e-3 && forced <= 1e-3,
        format!("relative L² difference: initial value (8000 steps) {hom:.3e}, source (400 steps) {forced:.3e} (≤ 1e-3)"),
    ))
}

/// Observed L1 order ≥ 2 − α₁ − 0.2 on the time-regular solution `u = t² φ₁`.
pub fn temporal_refinement(_: &CheckOptions) -> CliResult<CheckOutcome> {
    let spec = MultiTermSpec::new(vec![(1.0, 0.6), (0.5, 0.3)])?;
    let (sg, op, eig) = laplacian_setup(20)?;
    let phi = eig.vector(0).to_vec();
    let lam = eig.values()[0];
    let zero = vec![0.0; sg.n_nodes()];
    let terms = spec.terms().to_vec();
    let g = move |t: f64| {
        terms
            .iter()
            .map(|&(q, a)| q * gamma(3.0) / gamma(3.0 - a) * t.powf(2.0 - a))
            .sum::<f64>()
            + lam * t * t
    };
    let mut errs = Vec::new();
    for n in [20, 40, 80, 160] {
        let tg = TimeGrid::new(1.0, n)?;
        let u = solve_forward_l1(&spec, &op, &zero, &SourceSpec::new(TimeSeries::from_fn(tg, &g), phi.clone())?, tg)?;
        let mut e = 0.0f64;
        for k in 0..tg.len() {
            let t2 = tg.node(k).powi(2);
            for (i, p) in phi.iter().enumerate() {
                e = e.max((u.at(i, k) - t2 * p).abs());
            }
        }
        errs.push(e);
    }
    let orders = observed_orders(&errs);
    let need = 2.0 - spec.alpha_max() - 0.2;
    Ok(CheckOutcome::new(
        "temporal refinement",
        min_of(&orders) >= need,
        format!("errors [{}], orders [{}] (≥ {need:.2})", fmt_list(&errs), fmt_list(&orders)),
    ))
}
