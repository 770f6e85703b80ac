//! The conjugate-gradient reconstruction against a dense solve of the
//! Tikhonov normal equations `(MᵀWM + λW) g = MᵀW E`, where `M` is the
//! assembled forward map and `W` the trapezoid weights. `g(0)` does not reach
//! the data, so the dense system needs `λ > 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use subdiff_core::elliptic::{EllipticCoefficients, SpaceGrid, Subdomain};
use subdiff_core::inverse_cg::{reconstruct, relative_error, ForwardMap, InverseConfig};
use subdiff_core::{MultiTermSpec, TimeGrid, TimeSeries};

fn config(lambda: f64) -> InverseConfig {
    let space = SpaceGrid::unit(30).unwrap();
    let time = TimeGrid::new(1.0, 30).unwrap();
    InverseConfig {
        spec: MultiTermSpec::new(vec![(1.0, 0.6), (0.5, 0.2)]).unwrap(),
        space,
        coefficients: EllipticCoefficients::laplacian(),
        time,
        f: space.sample(|x| (PI * x).sin()),
        omega: Subdomain::interval(0.4, 0.6).unwrap(),
        lambda_reg: lambda,
        epsilon: 1e-12,
        max_iters: 500,
        g0: TimeSeries::zeros(time),
        seed: 0,
        delta: 0.0,
    }
}

fn dense_minimiser(cfg: &InverseConfig, data: &TimeSeries) -> TimeSeries {
    let map = ForwardMap::new(cfg).unwrap();
    let n = cfg.time.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let e = TimeSeries::from_fn_indexed(cfg.time, |k| if k == j { 1.0 } else { 0.0 });
        let col = map.apply(&e).unwrap();
        for i in 0..n {
            m[(i, j)] = col.values()[i];
        }
    }
    let w = DMatrix::from_diagonal(&DVector::from_vec(cfg.time.trapezoid_weights()));
    let lhs = m.transpose() * &w * &m + cfg.lambda_reg * &w;
    let rhs = m.transpose() * &w * DVector::from_column_slice(data.values());
    let g = lhs.lu().solve(&rhs).expect("normal equations are regular");
    TimeSeries::new(cfg.time, g.as_slice().to_vec()).unwrap()
}

fn truth(time: TimeGrid) -> TimeSeries {
    TimeSeries::from_fn(time, |t| 10.0 * t * (1.0 - t))
}

#[test]
fn cg_converges_to_the_dense_minimiser() {
    for lambda in [1e-3, 1e-5] {
        let cfg = config(lambda);
        let data = ForwardMap::new(&cfg).unwrap().apply(&truth(cfg.time)).unwrap();
        let dense = dense_minimiser(&cfg, &data);
        let cg = reconstruct(&cfg, &data, None).unwrap();
        let d = relative_error(&cg.g_rec, &dense).unwrap();
        assert!(d < 1e-6, "λ = {lambda}: CG vs dense {d:.3e} after {} iterations", cg.iterations);
    }
}

#[test]
fn regularisation_bias_vanishes_with_lambda() {
    let mut errors = Vec::new();
    for lambda in [1e-5, 1e-6, 1e-7, 1e-9] {
        let cfg = config(lambda);
        let g = truth(cfg.time);
        let data = ForwardMap::new(&cfg).unwrap().apply(&g).unwrap();
        errors.push(relative_error(&dense_minimiser(&cfg, &data), &g).unwrap());
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[0] > 1e-2, "bias at λ = 1e-5 is {:.3e}", errors[0]);
    assert!(errors[3] < 1e-4, "recovery error at λ = 1e-9 {:.3e}", errors[3]);
}
