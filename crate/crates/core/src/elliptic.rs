//! The elliptic operator `A ψ = −(a ψ′)′ + c ψ` on an interval with
//! homogeneous Dirichlet conditions, its discrete eigensystem, and quadrature
//! weights for integrals over an observation subdomain `ω ⊂ Ω`.
//!
//! Fields are stored on all `n_cells + 1` nodes with zero boundary entries.
//! The discrete L² product is `⟨u, v⟩_h = h Σ_{interior} u_i v_i`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform grid on `[x_lo, x_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    x_lo: f64,
    x_hi: f64,
    n_cells: usize,
}

impl SpaceGrid {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(Error::InvalidGrid(format!("need x_lo < x_hi, got [{x_lo}, {x_hi}]")));
        }
        if n_cells < 2 {
            return Err(Error::InvalidGrid("space grid needs at least two cells".into()));
        }
        Ok(Self { x_lo, x_hi, n_cells })
    }

    /// `(0, 1)` with `n_cells` cells.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_cells)
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of nodes including the two boundary nodes.
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn n_interior(&self) -> usize {
        self.n_cells - 1
    }

    pub fn step(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Samples `f` at the nodes, forcing the boundary entries to zero.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n_nodes()).map(|i| f(self.node(i))).collect();
        v[0] = 0.0;
        v[self.n_cells] = 0.0;
        v
    }

    /// `⟨u, v⟩_h` over interior nodes.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.step() * u[1..self.n_cells].iter().zip(&v[1..self.n_cells]).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }

    pub(crate) fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() == self.n_nodes() {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what} has {} entries, space grid has {} nodes",
                v.len(),
                self.n_nodes()
            )))
        }
    }
}

type CoefficientFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Diffusivity `a(x) > 0` and potential `c(x) ≥ 0`.
#[derive(Clone)]
pub struct EllipticCoefficients {
    a: CoefficientFn,
    c: CoefficientFn,
}

impl fmt::Debug for EllipticCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticCoefficients").finish_non_exhaustive()
    }
}

impl EllipticCoefficients {
    pub fn new<A, C>(a: A, c: C) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            a: Arc::new(a),
            c: Arc::new(c),
        }
    }

    pub fn constant(a: f64, c: f64) -> Self {
        Self::new(move |_| a, move |_| c)
    }

    /// `a ≡ 1`, `c ≡ 0`.
    pub fn laplacian() -> Self {
        Self::constant(1.0, 0.0)
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    pub fn c(&self, x: f64) -> f64 {
        (self.c)(x)
    }
}

/// Symmetric tridiagonal discretisation of `A` on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticOperator {
    grid: SpaceGrid,
    diag: Vec<f64>,
    off: Vec<f64>,
    a_min: f64,
}

/// Conservative three-point differencing of `−(a u′)′ + c u` with `a`
/// sampled at cell midpoints; the Dirichlet rows are eliminated.
pub fn assemble(grid: &SpaceGrid, coeff: &EllipticCoefficients) -> Result<EllipticOperator> {
    let h = grid.step();
    let n = grid.n_cells();
    let mut a_min = f64::INFINITY;
    for i in 0..=n {
        let x = grid.node(i);
        let a = coeff.a(x);
        let c = coeff.c(x);
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Coefficient(format!("a({x}) = {a} is not positive")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Coefficient(format!("c({x}) = {c} is negative")));
        }
        a_min = a_min.min(a);
    }
    let a_mid: Vec<f64> = (0..n).map(|i| coeff.a(grid.node(i) + 0.5 * h)).collect();
    if let Some(bad) = a_mid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::Coefficient(format!("midpoint diffusivity {bad} is not positive")));
    }
    a_min = a_mid.iter().fold(a_min, |m, a| m.min(*a));
    let h2 = h * h;
    let diag = (1..n)
        .map(|i| (a_mid[i - 1] + a_mid[i]) / h2 + coeff.c(grid.node(i)))
        .collect();
    let off = (1..n - 1).map(|i| -a_mid[i] / h2).collect();
    Ok(EllipticOperator {
        grid: *grid,
        diag,
        off,
        a_min,
    })
}

impl EllipticOperator {
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// Diagonal over interior nodes.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Super/sub-diagonal over interior nodes.
    pub fn off_diag(&self) -> &[f64] {
        &self.off
    }

    /// Ellipticity constant `a₀ = min a` over nodes and midpoints.
    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Dense interior matrix, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.dim();
        let mut out = vec![vec![0.0; m]; m];
        for i in 0..m {
            out[i][i] = self.diag[i];
            if i + 1 < m {
                out[i][i + 1] = self.off[i];
                out[i + 1][i] = self.off[i];
            }
        }
        out
    }

    /// `A u` on a full-length node vector.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m + 2];
        for i in 0..m {
            let mut v = self.diag[i] * u[i + 1];
            if i > 0 {
                v += self.off[i - 1] * u[i];
            }
            if i + 1 < m {
                v += self.off[i] * u[i + 2];
            }
            out[i + 1] = v;
        }
        out
    }

    /// LU factors of `shift·I + A` for repeated solves.
    pub fn factor_shifted(&self, shift: f64) -> ShiftedFactor {
        let m = self.dim();
        let mut pivots = vec![0.0; m];
        let mut lower = vec![0.0; m.saturating_sub(1)];
        pivots[0] = self.diag[0] + shift;
        for i in 1..m {
            lower[i - 1] = self.off[i - 1] / pivots[i - 1];
            pivots[i] = self.diag[i] + shift - lower[i - 1] * self.off[i - 1];
        }
        ShiftedFactor {
            pivots,
            lower,
            upper: self.off.clone(),
        }
    }
}

/// Thomas factorisation of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct ShiftedFactor {
    pivots: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ShiftedFactor {
    pub fn min_pivot(&self) -> f64 {
        self.pivots.iter().fold(f64::INFINITY, |m, p| m.min(*p))
    }

    /// Solves in place on an interior-length vector.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let m = self.pivots.len();
        for i in 1..m {
            x[i] -= self.lower[i - 1] * x[i - 1];
        }
        x[m - 1] /= self.pivots[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.pivots[i];
        }
    }
}

/// Lowest Dirichlet eigenpairs, orthonormal in `⟨·,·⟩_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    grid: SpaceGrid,
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

/// Default number of retained modes: `min(64, interior nodes)`.
pub fn default_mode_count(grid: &SpaceGrid) -> usize {
    grid.n_interior().min(64)
}

/// Lowest `n_modes` eigenpairs of the assembled operator by implicit QL.
pub fn eigensystem(op: &EllipticOperator, n_modes: usize) -> Result<EigenSystem> {
    let m = op.dim();
    if n_modes == 0 || n_modes > m {
        return Err(Error::TooManyModes {
            requested: n_modes,
            available: m,
        });
    }
    let mut d = op.diag.clone();
    let mut e = op.off.clone();
    e.push(0.0);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &mut e, &mut z, m)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let grid = op.grid;
    let scale = 1.0 / grid.step().sqrt();
    let mut values = Vec::with_capacity(n_modes);
    let mut vectors = Vec::with_capacity(n_modes);
    for &col in order.iter().take(n_modes) {
        values.push(d[col]);
        let mut v = vec![0.0; m + 2];
        for k in 0..m {
            v[k + 1] = z[k * m + col] * scale;
        }
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let lead = v.iter().find(|x| x.abs() > 1e-8 * peak).copied().unwrap_or(1.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        vectors.push(v);
    }
    Ok(EigenSystem { grid, values, vectors })
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix
/// (`d` diagonal, `e[i]` couples `i` and `i+1`, `e[m-1] = 0`). Eigenvectors
/// accumulate into the columns of the row-major `z`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64], m: usize) -> Result<()> {
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::OutOfRange("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..m {
                    let row = k * m;
                    let fz = z[row + i + 1];
                    z[row + i + 1] = s * z[row + i] + c * fz;
                    z[row + i] = c * z[row + i] - s * fz;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(())
}

impl EigenSystem {
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, n: usize) -> &[f64] {
        &self.vectors[n]
    }

    /// `⟨u, φ_n⟩_h` for every retained mode.
    pub fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(u, "projected vector")?;
        Ok(self.vectors.iter().map(|phi| self.grid.inner(u, phi)).collect())
    }

    /// `Σ c_n φ_n`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n_nodes()];
        for (c, phi) in coeffs.iter().zip(&self.vectors) {
            if *c != 0.0 {
                out.iter_mut().zip(phi).for_each(|(o, p)| *o += c * p);
            }
        }
        out
    }

    /// Magnitude of the last retained coefficient of `u`, a truncation indicator.
    pub fn truncation_indicator(&self, u: &[f64]) -> Result<f64> {
        Ok(self.project(u)?.last().map_or(0.0, |c| c.abs()))
    }
}

/// Union of disjoint open intervals inside Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    intervals: Vec<(f64, f64)>,
}

impl Subdomain {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Subdomain("at least one interval is required".into()));
        }
        let mut intervals = intervals;
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Subdomain(format!("interval ({lo}, {hi}) has no positive length")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Subdomain("intervals overlap".into()));
        }
        Ok(Self { intervals })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }
}

/// Weights `w_i` with `Σ w_i u_i = ∫_ω I_h u dx`, where `I_h u` is the
/// piecewise-linear interpolant. Cells cut by `∂ω` contribute the exact
/// integrals of the two hat functions over the overlap.
pub fn observe_weights(grid: &SpaceGrid, omega: &Subdomain) -> Result<Vec<f64>> {
    for &(lo, hi) in omega.intervals() {
        if lo < grid.x_lo() || hi > grid.x_hi() {
            return Err(Error::Subdomain(format!(
                "({lo}, {hi}) is not inside ({}, {})",
                grid.x_lo(),
                grid.x_hi()
            )));
        }
    }
    let h = grid.step();
    let mut w = vec![0.0; grid.n_nodes()];
    for i in 0..grid.n_cells() {
        let (xl, xr) = (grid.node(i), grid.node(i + 1));
        for &(lo, hi) in omega.intervals() {
            let a = lo.max(xl);
            let b = hi.min(xr);
            if b <= a {
                continue;
            }
            let len = b - a;
            let mid = 0.5 * (a + b);
            // ∫_a^b (xr - x)/h dx and ∫_a^b (x - xl)/h dx
            let right = len * (mid - xl) / h;
            w[i + 1] += right;
            w[i] += len - right;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn laplacian_stencil() {
        let g = SpaceGrid::unit(4).unwrap();
        let op = assemble(&g, &EllipticCoefficients::laplacian()).unwrap();
        let h2 = 0.25f64 * 0.25;
        assert_eq!(op.dim(), 3);
        for d in op.diag() {
            assert_abs_diff_eq!(*d, 2.0 / h2, epsilon = 1e-12);
        }
        for o in op.off_diag() {
            assert_abs_diff_eq!(*o, -1.0 / h2, epsilon = 1e-12);
        }
        let dense = op.to_dense();
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, dense[j][i]);
            }
        }
    }

    #[test]
    fn ellipticity_is_enforced() {
        let g = SpaceGrid::unit(8).unwrap();
        let bad_a = EllipticCoefficients::new(|x| x - 0.5, |_| 0.0);
        assert!(matches!(assemble(&g, &bad_a), Err(Error::Coefficient(_))));
        let bad_c = EllipticCoefficients::constant(1.0, -1.0);
        assert!(assemble(&g, &bad_c).is_err());
    }

    #[test]
    fn potential_shifts_spectrum() {
        let g = SpaceGrid::unit(20).unwrap();
        let e0 = eigensystem(&assemble(&g, &EllipticCoefficients::laplacian()).unwrap(), 10).unwrap();
        let e5 = eigensystem(&assemble(&g, &EllipticCoefficients::constant(1.0, 5.0)).unwrap(), 10).unwrap();
        for (a, b) in e0.values().iter().zip(e5.values()) {
            assert_abs_diff_eq!(b - a, 5.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn dirichlet_spectrum_of_laplacian() {
        let g = SpaceGrid::unit(100).unwrap();
        let op = assemble(&g, &EllipticCoefficients::laplacian()).unwrap();
        let eig = eigensystem(&op, 5).unwrap();
        let h = g.step();
        for (n, lam) in eig.values().iter().enumerate() {
            let k = (n + 1) as f64;
            // exact discrete eigenvalue of the three-point Laplacian
            let exact = 4.0 / (h * h) * (k * PI * h / 2.0).sin().powi(2);
            assert_abs_diff_eq!(*lam, exact, epsilon = 1e-9 * exact);
            let phi = eig.vector(n);
            for (i, v) in phi.iter().enumerate() {
                assert_abs_diff_eq!(*v, 2f64.sqrt() * (k * PI * g.node(i)).sin(), epsilon = 1e-10);
            }
        }
        assert!(eig.values()[0] > 0.0);
        assert_eq!(eig.vector(0)[0], 0.0);
        assert_eq!(eig.vector(0)[100], 0.0);
    }

    #[test]
    fn too_many_modes() {
        let g = SpaceGrid::unit(5).unwrap();
        let op = assemble(&g, &EllipticCoefficients::laplacian()).unwrap();
        assert_eq!(
            eigensystem(&op, 5),
            Err(Error::TooManyModes {
                requested: 5,
                available: 4
            })
        );
    }

    #[test]
    fn observation_weights() {
        let g = SpaceGrid::unit(50).unwrap();
        let whole = observe_weights(&g, &Subdomain::interval(0.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(whole.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let omega = Subdomain::interval(0.4, 0.6).unwrap();
        let w = observe_weights(&g, &omega).unwrap();
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 0.2, epsilon = 1e-14);
        assert!(w.iter().all(|x| *x >= 0.0));
        let u = g.sample(|x| (PI * x).sin());
        let v: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(v, 0.196_726_328_616_693_15, epsilon = 1e-4);
        // straddling cell
        let w = observe_weights(&SpaceGrid::unit(4).unwrap(), &Subdomain::interval(0.1, 0.3).unwrap()).unwrap();
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 0.2, epsilon = 1e-15);
        assert!(w[0] > 0.0 && w[1] > 0.0 && w[2] > 0.0);
    }

    #[test]
    fn subdomain_validation() {
        assert!(Subdomain::new(vec![]).is_err());
        assert!(Subdomain::interval(0.5, 0.5).is_err());
        assert!(Subdomain::new(vec![(0.1, 0.4), (0.3, 0.6)]).is_err());
        let g = SpaceGrid::unit(10).unwrap();
        assert!(observe_weights(&g, &Subdomain::interval(0.5, 1.5).unwrap()).is_err());
        let two = Subdomain::new(vec![(0.7, 0.9), (0.1, 0.2)]).unwrap();
        assert_abs_diff_eq!(two.measure(), 0.3, epsilon = 1e-15);
    }
}
