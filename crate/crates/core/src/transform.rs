//! Reduction of fractional differential problems to integral equations.
//!
//! All three problem classes end up in the same canonical form
//!
//! ```text
//! y(t) = f(t, z_0(t), …, z_m(t)),
//! z_j(t) = g_j(t) + I^{β_j} y(t) + Σ_k κ_{jk}(t) Φ_{μ_jk}[y],
//! Φ_μ[y] = ∫_0^T (T-s)^{μ-1} y(s) ds,
//! ```
//!
//! and in every case the sought solution is `x = z_0`.

use crate::error::{KernelError, SolveError};
use crate::expr::RhsFunction;
use crate::kernel::{caputo_tail_derivative, initial_polynomial, rgamma, InitialData};
use crate::spline::{segment_integral, LinearSpline};
use crate::sum::CompensatedSum;

fn invalid(msg: impl Into<String>) -> SolveError {
    SolveError::InvalidProblem(msg.into())
}

fn check_descending(lead: f64, orders: &[f64], floor: f64, what: &str) -> Result<(), SolveError> {
    let mut prev = lead;
    for (i, &a) in orders.iter().enumerate() {
        if !a.is_finite() || a >= prev {
            return Err(invalid(format!(
                "order chain not descending: {what}_{} = {a} is not below {prev}",
                i + 1
            )));
        }
        prev = a;
    }
    if let Some(&last) = orders.last() {
        if last <= floor {
            return Err(invalid(format!(
                "smallest order {last} must exceed {floor}"
            )));
        }
    }
    Ok(())
}

fn check_arity(rhs: &RhsFunction, m: usize) -> Result<(), SolveError> {
    if rhs.arity() != m {
        return Err(invalid(format!(
            "right-hand side has arity {} but the problem has {m} derivative terms",
            rhs.arity()
        )));
    }
    Ok(())
}

/// `D_*^α x = f(t, x, D_*^{α_1} x, …, D_*^{α_m} x)` on `(0, T]` with
/// `x^{(k)}(0) = x_k⁰`, `k < n = ⌈α⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoIvp {
    alpha: f64,
    orders: Vec<f64>,
    initial: InitialData,
    horizon: f64,
    rhs: RhsFunction,
}

impl CaputoIvp {
    pub fn new(
        alpha: f64,
        orders: Vec<f64>,
        initial: InitialData,
        horizon: f64,
        rhs: RhsFunction,
    ) -> Result<Self, SolveError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("order alpha must be positive, got {alpha}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        check_descending(alpha, &orders, 0.0, "alpha")?;
        let n = alpha.ceil() as usize;
        if initial.len() != n {
            return Err(invalid(format!(
                "order {alpha} needs {n} initial values, got {}",
                initial.len()
            )));
        }
        check_arity(&rhs, orders.len())?;
        Ok(Self {
            alpha,
            orders,
            initial,
            horizon,
            rhs,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn initial(&self) -> &InitialData {
        &self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn rhs(&self) -> &RhsFunction {
        &self.rhs
    }
}

/// `D^α x = f(t, x, D^{α_1} x, …)` with Riemann–Liouville derivatives,
/// `0 < α_m < … < α_1 < α < 1` and `x(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RlIvp {
    alpha: f64,
    orders: Vec<f64>,
    horizon: f64,
    rhs: RhsFunction,
}

impl RlIvp {
    pub fn new(alpha: f64, orders: Vec<f64>, horizon: f64, rhs: RhsFunction) -> Result<Self, SolveError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("order alpha must lie in (0, 1), got {alpha}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        check_descending(alpha, &orders, 0.0, "alpha")?;
        check_arity(&rhs, orders.len())?;
        Ok(Self {
            alpha,
            orders,
            horizon,
            rhs,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn rhs(&self) -> &RhsFunction {
        &self.rhs
    }
}

/// Robin data `A x(0) + B x'(0) = η₁`, `A x(1) + B x'(1) = η₂`, `A ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinBoundary {
    pub a: f64,
    pub b: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl RobinBoundary {
    pub fn new(a: f64, b: f64, eta1: f64, eta2: f64) -> Result<Self, SolveError> {
        if a == 0.0 {
            return Err(invalid("boundary coefficient A must be nonzero"));
        }
        if ![a, b, eta1, eta2].iter().all(|v| v.is_finite()) {
            return Err(invalid("boundary data must be finite"));
        }
        Ok(Self { a, b, eta1, eta2 })
    }

    /// `[(A(1-t) + B)η₁ + (At - B)η₂] / A²`, the solution for zero forcing.
    pub fn affine(&self, t: f64) -> f64 {
        let Self { a, b, eta1, eta2 } = *self;
        ((a * (1.0 - t) + b) * eta1 + (a * t - b) * eta2) / (a * a)
    }

    pub fn affine_slope(&self) -> f64 {
        (self.eta2 - self.eta1) / self.a
    }
}

/// `D_*^q x = f(t, x, D_*^{q_1} x, …)` on `(0, 1)` with `1 < q_m < … < q_1 < q ≤ 2`
/// and Robin boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoBvp {
    q: f64,
    orders: Vec<f64>,
    boundary: RobinBoundary,
    rhs: RhsFunction,
}

impl CaputoBvp {
    pub fn new(q: f64, orders: Vec<f64>, boundary: RobinBoundary, rhs: RhsFunction) -> Result<Self, SolveError> {
        if !(q > 1.0 && q <= 2.0) {
            return Err(invalid(format!("order q must lie in (1, 2], got {q}")));
        }
        check_descending(q, &orders, 1.0, "q")?;
        check_arity(&rhs, orders.len())?;
        Ok(Self {
            q,
            orders,
            boundary,
            rhs,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn boundary(&self) -> &RobinBoundary {
        &self.boundary
    }

    pub fn rhs(&self) -> &RhsFunction {
        &self.rhs
    }
}

/// Any of the supported problem classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    CaputoIvp(CaputoIvp),
    RlIvp(RlIvp),
    CaputoBvp(CaputoBvp),
}

impl Problem {
    pub fn reduce(&self) -> IntegralEquation {
        match self {
            Problem::CaputoIvp(p) => reduce_ivp_caputo(p),
            Problem::RlIvp(p) => reduce_ivp_rl(p),
            Problem::CaputoBvp(p) => reduce_bvp(p),
        }
    }

    pub fn rhs(&self) -> &RhsFunction {
        match self {
            Problem::CaputoIvp(p) => &p.rhs,
            Problem::RlIvp(p) => &p.rhs,
            Problem::CaputoBvp(p) => &p.rhs,
        }
    }
}

/// Known part `g_j(t)` of an argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Zero,
    /// `Σ_{k<n} x_k⁰ t^k/k!`
    InitialPolynomial(InitialData),
    /// `D^{α_i}(Σ_{k=n_i}^{n-1} x_k⁰ t^k/k!)`
    CaputoTail {
        order: f64,
        ceil: usize,
        data: InitialData,
    },
    /// The affine boundary interpolant of [`RobinBoundary::affine`].
    BoundaryAffine(RobinBoundary),
}

impl Forcing {
    pub fn eval(&self, t: f64) -> Result<f64, KernelError> {
        match self {
            Forcing::Zero => Ok(0.0),
            Forcing::InitialPolynomial(d) => Ok(initial_polynomial(d, t)),
            Forcing::CaputoTail { order, ceil, data } => caputo_tail_derivative(*order, *ceil, data, t),
            Forcing::BoundaryAffine(bc) => Ok(bc.affine(t)),
        }
    }

    pub fn derivative(&self, t: f64) -> Result<f64, KernelError> {
        match self {
            Forcing::Zero => Ok(0.0),
            Forcing::InitialPolynomial(d) => {
                let shifted = d.values().get(1..).unwrap_or(&[]);
                if shifted.is_empty() {
                    return Ok(0.0);
                }
                Ok(initial_polynomial(&InitialData::new(shifted.to_vec())?, t))
            }
            Forcing::CaputoTail { order, ceil, data } => {
                // d/dt x_k t^e / Γ(e+1) = x_k t^{e-1} / Γ(e), e = k - α_i
                let mut acc = 0.0;
                for k in *ceil..data.len() {
                    let e = k as f64 - order;
                    if e == 0.0 {
                        continue;
                    }
                    if t == 0.0 && e < 1.0 {
                        return Err(KernelError::Domain("tail derivative singular at t = 0".into()));
                    }
                    acc += data.values()[k] * rgamma(e) * t.powf(e - 1.0);
                }
                Ok(acc)
            }
            Forcing::BoundaryAffine(bc) => Ok(bc.affine_slope()),
        }
    }
}

/// `κ(t) = c0 + c1·t`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub c0: f64,
    pub c1: f64,
}

impl Affine {
    pub fn eval(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t
    }

    pub fn sup_abs(&self, horizon: f64) -> f64 {
        self.c0.abs().max(self.eval(horizon).abs())
    }
}

/// `κ(t) · Φ_μ[y]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalTerm {
    pub coefficient: Affine,
    pub moment_order: f64,
}

/// One argument `z_j` of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Argument {
    pub order: f64,
    pub forcing: Forcing,
    pub nonlocal: Vec<NonlocalTerm>,
}

impl Argument {
    /// `Φ_μ[y]` for each nonlocal term.
    pub fn moments(&self, y: &LinearSpline) -> Result<Vec<f64>, KernelError> {
        self.nonlocal.iter().map(|n| y.right_moment(n.moment_order)).collect()
    }

    /// `Σ κ(t) Φ` for precomputed moments.
    pub fn nonlocal_value(&self, t: f64, moments: &[f64]) -> f64 {
        self.nonlocal
            .iter()
            .zip(moments)
            .map(|(n, m)| n.coefficient.eval(t) * m)
            .sum()
    }

    /// `z_j(t)` at arbitrary `t`, given precomputed moments.
    pub fn value(&self, y: &LinearSpline, t: f64, moments: &[f64]) -> Result<f64, KernelError> {
        Ok(self.forcing.eval(t)? + y.frac_integral_at(self.order, t)? + self.nonlocal_value(t, moments))
    }
}

/// Canonical reduced equation.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralEquation {
    pub horizon: f64,
    pub arguments: Vec<Argument>,
    pub rhs: RhsFunction,
}

impl IntegralEquation {
    pub fn arity(&self) -> usize {
        self.arguments.len() - 1
    }

    pub fn has_nonlocal(&self) -> bool {
        self.arguments.iter().any(|a| !a.nonlocal.is_empty())
    }

    pub fn orders(&self) -> Vec<f64> {
        self.arguments.iter().map(|a| a.order).collect()
    }

    /// All arguments `z_0..z_m` at `t`.
    pub fn assemble(&self, y: &LinearSpline, t: f64, moments: &[Vec<f64>]) -> Result<Vec<f64>, KernelError> {
        self.arguments
            .iter()
            .zip(moments)
            .map(|(a, m)| a.value(y, t, m))
            .collect()
    }

    pub fn moments(&self, y: &LinearSpline) -> Result<Vec<Vec<f64>>, KernelError> {
        self.arguments.iter().map(|a| a.moments(y)).collect()
    }

    /// `x = z_0` built from a solved `y`.
    pub fn solution(&self, y: LinearSpline) -> Result<SolutionFunction, KernelError> {
        let argument = self.arguments[0].clone();
        let moments = argument.moments(&y)?;
        Ok(SolutionFunction {
            y,
            rule: Representation::Argument { argument, moments },
        })
    }
}

/// Caputo IVP reduction: `z_0 = I^α y + Σ x_k⁰ t^k/k!`,
/// `z_i = I^{α-α_i} y + D^{α_i}(tail)`.
pub fn reduce_ivp_caputo(p: &CaputoIvp) -> IntegralEquation {
    let mut arguments = vec![Argument {
        order: p.alpha,
        forcing: Forcing::InitialPolynomial(p.initial.clone()),
        nonlocal: Vec::new(),
    }];
    for &ai in &p.orders {
        let ceil = ai.ceil() as usize;
        let forcing = if ceil >= p.initial.len() {
            Forcing::Zero
        } else {
            Forcing::CaputoTail {
                order: ai,
                ceil,
                data: p.initial.clone(),
            }
        };
        arguments.push(Argument {
            order: p.alpha - ai,
            forcing,
            nonlocal: Vec::new(),
        });
    }
    IntegralEquation {
        horizon: p.horizon,
        arguments,
        rhs: p.rhs.clone(),
    }
}

/// `x(t) = I^α y(t) + Σ x_k⁰ t^k/k!`
pub fn reconstruct_ivp(y: LinearSpline, p: &CaputoIvp) -> Result<SolutionFunction, KernelError> {
    reduce_ivp_caputo(p).solution(y)
}

/// `y = f(t, I^α y, I^{α-α_1} y, …)`, no forcing.
pub fn reduce_ivp_rl(p: &RlIvp) -> IntegralEquation {
    let arguments = std::iter::once(p.alpha)
        .chain(p.orders.iter().map(|a| p.alpha - a))
        .map(|order| Argument {
            order,
            forcing: Forcing::Zero,
            nonlocal: Vec::new(),
        })
        .collect();
    IntegralEquation {
        horizon: p.horizon,
        arguments,
        rhs: p.rhs.clone(),
    }
}

/// `x(t) = I^α y(t)`
pub fn reconstruct_ivp_rl(y: LinearSpline, p: &RlIvp) -> Result<SolutionFunction, KernelError> {
    reduce_ivp_rl(p).solution(y)
}

/// Green's function of `D_*^q x = v` on `[0, 1]` with Robin conditions.
pub fn green_function(q: f64, bc: &RobinBoundary, t: f64, s: f64) -> Result<f64, KernelError> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(KernelError::Domain(format!("order q must lie in (1, 2], got {q}")));
    }
    if !((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s)) {
        return Err(KernelError::Domain(format!("(t, s) = ({t}, {s}) outside the unit square")));
    }
    let RobinBoundary { a, b, .. } = *bc;
    let lever = b - a * t;
    let mut g = lever * (1.0 - s).powf(q - 1.0) * rgamma(q) / a;
    let weak = b * lever;
    if weak != 0.0 {
        if s == 1.0 && q < 2.0 {
            return Err(KernelError::Domain(
                "Green's function is singular at s = 1 for q < 2 and B ≠ 0".into(),
            ));
        }
        g += weak * (1.0 - s).powf(q - 2.0) * rgamma(q - 1.0) / (a * a);
    }
    if s <= t {
        g += (t - s).powf(q - 1.0) * rgamma(q);
    }
    Ok(g)
}

/// `∫_0^upper (c - s)^{μ-1} v(s) ds` for a spline `v`, integrated segment by
/// segment in the hat-function basis.
fn kernel_integral(v: &LinearSpline, mu: f64, c: f64, upper: f64) -> f64 {
    let grid = v.grid();
    let vals = v.values();
    let mut acc = CompensatedSum::new();
    for j in 0..grid.intervals() {
        let s0 = grid.node(j);
        if s0 >= upper {
            break;
        }
        let s1 = grid.node(j + 1).min(upper);
        let delta = s1 - s0;
        if delta <= 0.0 {
            continue;
        }
        let v0 = vals[j];
        let v1 = if s1 == grid.node(j + 1) {
            vals[j + 1]
        } else {
            vals[j] + (vals[j + 1] - vals[j]) * delta / grid.step()
        };
        // u = c - s runs over [c - s1, c - s0]; the far end carries v0
        acc.add(segment_integral(mu, c - s1, delta, v0, v1));
    }
    acc.value()
}

/// Linear BVP `D_*^q x = v` solved through the Green's function representation.
pub fn bvp_linear_solve(q: f64, bc: RobinBoundary, v: LinearSpline) -> Result<SolutionFunction, KernelError> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(KernelError::Domain(format!("order q must lie in (1, 2], got {q}")));
    }
    if v.grid().horizon() != 1.0 {
        return Err(KernelError::Domain("boundary value problems live on [0, 1]".into()));
    }
    Ok(SolutionFunction {
        y: v,
        rule: Representation::Green { q, bc },
    })
}

fn green_eval(q: f64, bc: &RobinBoundary, v: &LinearSpline, t: f64) -> f64 {
    let RobinBoundary { a, b, .. } = *bc;
    let lever = b - a * t;
    let local = kernel_integral(v, q, t, t) * rgamma(q);
    let mut nonlocal = lever / a * rgamma(q) * kernel_integral(v, q, 1.0, 1.0);
    if b != 0.0 {
        nonlocal += b * lever / (a * a) * rgamma(q - 1.0) * kernel_integral(v, q - 1.0, 1.0, 1.0);
    }
    local + nonlocal + bc.affine(t)
}

/// BVP reduction. The Green's-function boundary terms become nonlocal
/// corrections on `z_0`; derivative arguments are plain `I^{q-q_i} y`.
pub fn reduce_bvp(p: &CaputoBvp) -> IntegralEquation {
    let q = p.q;
    let RobinBoundary { a, b, .. } = p.boundary;
    let g_q = rgamma(q);
    let g_q1 = rgamma(q - 1.0);
    let principal = Argument {
        order: q,
        forcing: Forcing::BoundaryAffine(p.boundary),
        nonlocal: vec![
            // (B - At)/(AΓ(q)) ∫(1-s)^{q-1} y
            NonlocalTerm {
                coefficient: Affine {
                    c0: b / a * g_q,
                    c1: -g_q,
                },
                moment_order: q,
            },
            // B(B - At)/(A²Γ(q-1)) ∫(1-s)^{q-2} y
            NonlocalTerm {
                coefficient: Affine {
                    c0: b * b / (a * a) * g_q1,
                    c1: -b / a * g_q1,
                },
                moment_order: q - 1.0,
            },
        ],
    };
    let arguments = std::iter::once(principal)
        .chain(p.orders.iter().map(|qi| Argument {
            order: q - qi,
            forcing: Forcing::Zero,
            nonlocal: Vec::new(),
        }))
        .collect();
    IntegralEquation {
        horizon: 1.0,
        arguments,
        rhs: p.rhs.clone(),
    }
}

/// `x` from a solved `y` through the integrated Green's representation.
pub fn reconstruct_bvp(y: LinearSpline, p: &CaputoBvp) -> Result<SolutionFunction, KernelError> {
    reduce_bvp(p).solution(y)
}

#[derive(Debug, Clone, PartialEq)]
enum Representation {
    Argument { argument: Argument, moments: Vec<f64> },
    Green { q: f64, bc: RobinBoundary },
}

/// The reconstructed solution `x(t)` together with the spline `y` it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFunction {
    y: LinearSpline,
    rule: Representation,
}

impl SolutionFunction {
    pub fn spline(&self) -> &LinearSpline {
        &self.y
    }

    pub fn eval(&self, t: f64) -> Result<f64, KernelError> {
        let grid = self.y.grid();
        if !grid.contains(t) {
            return Err(KernelError::Domain(format!(
                "t = {t} lies outside [0, {}]",
                grid.horizon()
            )));
        }
        match &self.rule {
            Representation::Argument { argument, moments } => argument.value(&self.y, t, moments),
            Representation::Green { q, bc } => Ok(green_eval(*q, bc, &self.y, t)),
        }
    }

    /// `x'(t)`, available when the principal order is at least one.
    pub fn derivative(&self, t: f64) -> Result<f64, KernelError> {
        let grid = self.y.grid();
        if !grid.contains(t) {
            return Err(KernelError::Domain(format!("t = {t} outside the grid")));
        }
        let (order, forcing_slope, nonlocal_slope) = match &self.rule {
            Representation::Argument { argument, moments } => (
                argument.order,
                argument.forcing.derivative(t)?,
                argument
                    .nonlocal
                    .iter()
                    .zip(moments)
                    .map(|(n, m)| n.coefficient.c1 * m)
                    .sum::<f64>(),
            ),
            Representation::Green { q, bc } => {
                let RobinBoundary { a, b, .. } = *bc;
                let mut slope = -rgamma(*q) * kernel_integral(&self.y, *q, 1.0, 1.0);
                if b != 0.0 {
                    slope -= b / a * rgamma(q - 1.0) * kernel_integral(&self.y, q - 1.0, 1.0, 1.0);
                }
                (*q, bc.affine_slope(), slope)
            }
        };
        let principal = if order > 1.0 {
            self.y.frac_integral_at(order - 1.0, t)?
        } else if order == 1.0 {
            self.y.eval(t)?
        } else {
            return Err(KernelError::Domain(format!(
                "x' is unbounded near 0 for principal order {order} < 1"
            )));
        };
        Ok(principal + forcing_slope + nonlocal_slope)
    }

    /// `(|A x(0) + B x'(0) - η₁|, |A x(1) + B x'(1) - η₂|)`
    pub fn boundary_residuals(&self, bc: &RobinBoundary) -> Result<(f64, f64), KernelError> {
        let r0 = bc.a * self.eval(0.0)? + bc.b * self.derivative(0.0)? - bc.eta1;
        let r1 = bc.a * self.eval(1.0)? + bc.b * self.derivative(1.0)? - bc.eta2;
        Ok((r0.abs(), r1.abs()))
    }
}
