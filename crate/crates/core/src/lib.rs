//! Müntz (fractional Jacobi) spectral collocation for weakly singular
//! Volterra integro-differential equations with proportional delays:
//!
//! ```text
//! y'(t) = a1(t) y(t) + b1(t) y(εt) + f1(t)
//!       + ∫_0^t   (t - s)^(-μ)  K1(t, s) y(s) ds
//!       + ∫_0^εt  (εt - τ)^(-μ) K2(t, τ) y(τ) dτ,     y(0) = y0.
//! ```
//!
//! The solver approximates `y` and `y'` in the Müntz space
//! `span{1, θ^λ, ..., θ^{Nλ}}` on the rescaled interval `θ = t / T ∈ [0, 1]`,
//! which recovers exponential convergence for solutions that behave like
//! powers of `t^λ` near the origin.

pub mod analysis;
pub mod collocation;
pub mod muntz_basis;
pub mod problem;
pub mod quadrature;
pub mod specfun;

pub use analysis::{
    convergence_sweep, fit_rates, reference_solution, ConvergenceTable, RateReport, Regime,
    SweepConfig,
};
pub use collocation::{solve_problem, DiscreteSolution, SolverConfig, SystemMatrices};
pub use muntz_basis::CollocationGrid;
pub use problem::{build_example, ExampleId, ExampleOptions, ScaledProblem, VideProblem};
pub use quadrature::{FractionalRule, QuadratureRule};
