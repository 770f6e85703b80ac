//! Randomised structural properties of the discrete operators.

use proptest::prelude::*;
use subdiff_core::frac_calc::{caputo_forward, convolve, rl_integral_backward, rl_integral_forward};
use subdiff_core::special::gamma;
use subdiff_core::transform_kernels::q_of_s;
use subdiff_core::{FractionalOrder, MultiTermSpec, TimeGrid, TimeSeries};

use num_complex::Complex64;

fn series(values: Vec<f64>) -> TimeSeries {
    let grid = TimeGrid::new(1.0, values.len() - 1).unwrap();
    TimeSeries::new(grid, values).unwrap()
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n + 1),
            prop::collection::vec(-5.0f64..5.0, n + 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_commutes((u, v) in pair()) {
        let (u, v) = (series(u), series(v));
        let d = convolve(&u, &v).unwrap().sub(&convolve(&v, &u).unwrap()).unwrap();
        prop_assert!(d.max_abs() <= 1e-12 * (1.0 + u.max_abs() * v.max_abs()));
    }

    #[test]
    fn integral_is_linear_and_order_preserving((u, v) in pair(), alpha in 0.05f64..1.9, c in -3.0f64..3.0) {
        let a = FractionalOrder::new(alpha).unwrap();
        let (u, v) = (series(u), series(v));
        let lhs = rl_integral_forward(a, &u.add_scaled(c, &v).unwrap());
        let rhs = rl_integral_forward(a, &u).add_scaled(c, &rl_integral_forward(a, &v)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-11 * (1.0 + lhs.max_abs()));
        let abs = TimeSeries::new(*u.grid(), u.values().iter().map(|x| x.abs()).collect()).unwrap();
        prop_assert!(rl_integral_forward(a, &abs).values().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn backward_integral_is_the_reflected_forward_one((u, _) in pair(), alpha in 0.05f64..0.95) {
        let a = FractionalOrder::new(alpha).unwrap();
        let u = series(u);
        let b = rl_integral_backward(a, &u);
        let f = rl_integral_forward(a, &u.reflect()).reflect();
        prop_assert_eq!(b.values(), f.values());
    }

    #[test]
    fn integral_is_exact_on_linear_functions(n in 2usize..60, alpha in 0.05f64..1.9, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let o = FractionalOrder::new(alpha).unwrap();
        let grid = TimeGrid::new(2.0, n).unwrap();
        let j = rl_integral_forward(o, &TimeSeries::from_fn(grid, |t| a + b * t));
        let exact = TimeSeries::from_fn(grid, |t| {
            a * t.powf(alpha) / gamma(alpha + 1.0) + b * t.powf(alpha + 1.0) / gamma(alpha + 2.0)
        });
        prop_assert!(j.sub(&exact).unwrap().max_abs() <= 1e-11 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn caputo_ignores_constants((u, _) in pair(), alpha in 0.05f64..0.95, c in -10.0f64..10.0) {
        let a = FractionalOrder::new(alpha).unwrap();
        let u = series(u);
        let shifted = TimeSeries::new(*u.grid(), u.values().iter().map(|x| x + c).collect()).unwrap();
        let d = caputo_forward(a, &u).unwrap().sub(&caputo_forward(a, &shifted).unwrap()).unwrap();
        prop_assert!(d.max_abs() <= 1e-9 * (1.0 + caputo_forward(a, &u).unwrap().max_abs()));
    }

    #[test]
    fn symbol_is_real_positive_and_increasing_on_the_positive_axis(
        q in prop::collection::vec(0.1f64..3.0, 1..4),
        s in 1e-3f64..1e3,
    ) {
        let alpha: Vec<f64> = (0..q.len()).map(|j| 0.9 - 0.25 * j as f64).collect();
        let spec = MultiTermSpec::from_lists(&q, &alpha).unwrap();
        let a = q_of_s(&spec, Complex64::new(s, 0.0)).unwrap();
        let b = q_of_s(&spec, Complex64::new(1.1 * s, 0.0)).unwrap();
        prop_assert!(a.re > 0.0 && a.im.abs() <= 1e-12 * a.re && b.re > a.re);
    }
}
