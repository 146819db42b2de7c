//! Spline collocation for nonlinear multi-term fractional differential equations.
//!
//! Caputo and Riemann–Liouville initial value problems and Caputo boundary
//! value problems with Robin conditions are rewritten as integral equations
//! for `y = D^α x` ([`transform`]), solved by collocation in the space of
//! continuous piecewise-linear splines ([`solver`]), and mapped back to `x`
//! by exact fractional integration of the spline ([`spline`]).
//!
//! Right-hand sides are written in a small expression language ([`expr`]).

pub mod convergence;
pub mod error;
pub mod expr;
pub mod kernel;
pub mod solver;
pub mod spline;
pub mod sum;
pub mod transform;

pub use convergence::{eoc_study, ConvergenceReport, EocLevel, Reference};
pub use error::{Error, ExprError, KernelError, SolveError};
pub use expr::{lipschitz_probe, parse, Expr, ProbeBox, RhsFunction};
pub use kernel::{
    caputo_tail_derivative, frac_integral_power, gamma_fn, initial_polynomial, rgamma,
    rl_derivative_power, InitialData, PowerTerm,
};
pub use solver::{
    contraction_constant, contraction_constant_unit_horizon, residual_supnorm, solve,
    solve_fredholm, solve_volterra, CollocationConfig, CollocationSolution, Method, Warning,
};
pub use spline::{frac_integral_weights, modulus_of_continuity, LinearSpline, UniformGrid, WeightCache};
pub use transform::{
    bvp_linear_solve, green_function, reconstruct_bvp, reconstruct_ivp, reconstruct_ivp_rl,
    reduce_bvp, reduce_ivp_caputo, reduce_ivp_rl, Argument, CaputoBvp, CaputoIvp, Forcing,
    IntegralEquation, Problem, RlIvp, RobinBoundary, SolutionFunction,
};
