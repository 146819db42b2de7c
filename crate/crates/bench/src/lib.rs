//! Fixed problems shared by the benchmarks.

use fdecoll::{
    reduce_bvp, reduce_ivp_caputo, CaputoBvp, CaputoIvp, InitialData, IntegralEquation,
    LinearSpline, RhsFunction, RobinBoundary, UniformGrid,
};

/// `D^1.5 x = f(t, x, D^0.5 x)` with exact `x = t^3.5`.
pub fn caputo_two_term() -> IntegralEquation {
    let rhs = RhsFunction::parse(
        "gamma(4.5)/2*t^2 + sin(x) - sin(t^3.5) + 0.5*(d1 - gamma(4.5)/gamma(4)*t^3)",
        1,
    )
    .expect("fixture rhs parses");
    let p = CaputoIvp::new(1.5, vec![0.5], InitialData::new(vec![0.0, 0.0]).unwrap(), 1.0, rhs)
        .expect("fixture problem is valid");
    reduce_ivp_caputo(&p)
}

/// Robin BVP of order 1.5 with a contractive linear right-hand side.
pub fn robin_bvp() -> IntegralEquation {
    let bc = RobinBoundary::new(1.0, 0.5, 0.2, -0.3).unwrap();
    let rhs = RhsFunction::parse("0.1*x + sin(t)", 0).unwrap();
    reduce_bvp(&CaputoBvp::new(1.5, vec![], bc, rhs).expect("fixture problem is valid"))
}

/// `cos(5t)` sampled on `n` intervals of `[0, 1]`.
pub fn wavy_spline(n: usize) -> LinearSpline {
    LinearSpline::interpolate_fn(UniformGrid::new(1.0, n).unwrap(), |t| (5.0 * t).cos())
}
