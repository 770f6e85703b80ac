//! Scalar quadrature rules shared by the special functions, the contour
//! integrals and the test oracles.
//!
//! The double-exponential rules skip non-finite samples: integrands such as
//! `A(φ)·exp(-c·A(φ))` evaluate to `inf·0` exactly at an endpoint where the
//! true contribution is zero.

use std::f64::consts::FRAC_PI_2;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre over `[a, b]` split into `panels` equal pieces.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let width = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * width * xi);
        }
    }
    0.5 * width * sum
}

const DE_MAX_LEVEL: u32 = 10;

/// Tanh-sinh quadrature of `f` over the finite interval `[a, b]`.
///
/// Endpoint singularities are allowed. Nodes are placed by offset from the
/// nearer endpoint so that they never collapse onto it in floating point.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let x_max = 5.0;
    let eval = |x: f64| -> f64 {
        let u = FRAC_PI_2 * x.sinh();
        // offset from the nearer endpoint, 1 - tanh|u| = 2 / (1 + e^{2|u|})
        let offset = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        let jac = FRAC_PI_2 * x.cosh() / u.cosh().powi(2);
        let point = if x < 0.0 { a + half * offset } else { b - half * offset };
        let v = f(point) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    de_refine(eval, -x_max, x_max, rel_tol) * half
}

/// Exp-sinh quadrature of `f` over `(0, ∞)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> f64 {
    let eval = |x: f64| -> f64 {
        let e = FRAC_PI_2 * x.sinh();
        let r = e.exp();
        if r == 0.0 || !r.is_finite() {
            return 0.0;
        }
        let v = f(r) * r * FRAC_PI_2 * x.cosh();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    de_refine(eval, -6.5, 6.5, rel_tol)
}

/// Trapezoid sums on successively halved steps until two levels agree.
fn de_refine<F: Fn(f64) -> f64>(eval: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut k = (lo / h).ceil() as i64;
    while (k as f64) * h <= hi {
        sum += eval(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        // only the new odd-indexed points
        let mut k = (lo / h).ceil() as i64;
        if k % 2 == 0 {
            k += 1;
        }
        while (k as f64) * h <= hi {
            sum += eval(k as f64 * h);
            k += 2;
        }
        let next = sum * h;
        let converged = (next - estimate).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE);
        estimate = next;
        if converged && level >= 3 {
            break;
        }
    }
    estimate
}
