//! Numerical toolkit for multi-term time-fractional diffusion in one space
//! dimension,
//!
//! ```text
//! Σ q_j ∂_t^{α_j}(u − u₀) + A u = g(t) f(x)   in Ω × (0,T),   u = 0 on ∂Ω,
//! ```
//!
//! and for recovering the temporal source factor `g` from the subdomain
//! observation `∫_ω u(x,t) dx` by adjoint-based conjugate-gradient Tikhonov
//! iteration.
//!
//! Modules, bottom-up:
//! - [`frac_calc`]: discrete Riemann-Liouville integrals and Caputo derivatives.
//! - [`transform_kernels`]: `Q(s)`, contour inversion, Mittag-Leffler and Wright
//!   functions, the subordination kernel and complete-monotonicity checks.
//! - [`elliptic`]: the 1-D Dirichlet operator, its eigensystem, observation weights.
//! - [`pde_solver`]: spectral, L1 and subordination forward solvers, the Duhamel
//!   identity and the adjoint problem.
//! - [`inverse_cg`]: Tikhonov objective, gradient and the CG reconstruction.

pub mod elliptic;
pub mod error;
pub mod frac_calc;
pub mod inverse_cg;
pub mod pde_solver;
pub mod quadrature;
pub mod special;
pub mod transform_kernels;

pub use elliptic::{EigenSystem, EllipticCoefficients, EllipticOperator, SpaceGrid, Subdomain};
pub use error::{Error, Result};
pub use frac_calc::{FractionalOrder, TimeGrid, TimeSeries};
pub use inverse_cg::{InverseConfig, ReconstructionResult, StopReason};
pub use pde_solver::{SourceSpec, SpaceTimeField};
pub use transform_kernels::{ContourSpec, MultiTermSpec};
