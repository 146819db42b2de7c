//! Spline collocation for the reduced integral equation.
//!
//! The collocation conditions `y_N(t_i) = f(t_i, z_0(t_i), …, z_m(t_i))` are
//! solved either node by node (equations without nonlocal terms are causal,
//! so node `i` only sees `y_0..y_i`) or by global Picard sweeps over the whole
//! node vector when nonlocal moments couple every node to every other.

use std::fmt;

use crate::error::{KernelError, SolveError};
use crate::expr::{lipschitz_probe, ProbeBox};
use crate::kernel::rgamma;
use crate::spline::{LinearSpline, UniformGrid, WeightCache, WeightTable};
use crate::transform::{IntegralEquation, SolutionFunction};

/// Moment orders below this make `Φ` nearly singular.
pub const MOMENT_SINGULARITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationConfig {
    /// Number of subintervals `N`.
    pub intervals: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// State intervals for the Lipschitz probe: one shared interval or one per argument.
    pub lipschitz_box: Vec<(f64, f64)>,
    /// Zero disables the probe.
    pub lipschitz_samples: usize,
    pub strict_contraction: bool,
    /// Keep the sequence of updates at every node (or sweep).
    pub trace: bool,
}

impl Default for CollocationConfig {
    fn default() -> Self {
        Self {
            intervals: 64,
            tol: 1e-12,
            max_iter: 200,
            lipschitz_box: vec![(-1.0, 1.0)],
            lipschitz_samples: 2000,
            strict_contraction: false,
            trace: false,
        }
    }
}

impl CollocationConfig {
    pub fn with_intervals(intervals: usize) -> Self {
        Self {
            intervals,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.intervals < 1 {
            return Err(SolveError::InvalidConfig("N must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SolveError::InvalidConfig("tol must be positive".into()));
        }
        if self.max_iter < 1 {
            return Err(SolveError::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.lipschitz_box.iter().any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
            return Err(SolveError::InvalidConfig("lipschitz box intervals must satisfy lo <= hi".into()));
        }
        Ok(())
    }

    fn probe_box(&self, eq: &IntegralEquation) -> Result<ProbeBox, SolveError> {
        let dim = eq.arity() + 1;
        let state = match self.lipschitz_box.len() {
            1 => vec![self.lipschitz_box[0]; dim],
            n if n == dim => self.lipschitz_box.clone(),
            n => {
                return Err(SolveError::InvalidConfig(format!(
                    "lipschitz box has {n} intervals, expected 1 or {dim}"
                )))
            }
        };
        Ok(ProbeBox {
            time: (0.0, eq.horizon),
            state,
        })
    }
}

/// Non-fatal diagnostics, each with a stable tag for log scraping.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Estimated contraction constant is not below one.
    ContractionNotGuaranteed { constant: f64, unit_horizon: f64 },
    /// The scalar node solve had to switch to the secant iteration.
    SecantFallback { node: usize },
    /// A moment order is close to zero (q close to 1).
    MomentNearSingular { order: f64 },
}

impl Warning {
    pub fn tag(&self) -> &'static str {
        match self {
            Warning::ContractionNotGuaranteed { .. } => "W-CONTRACTION",
            Warning::SecantFallback { .. } => "W-SECANT",
            Warning::MomentNearSingular { .. } => "W-MOMENT-SINGULAR",
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.tag())?;
        match self {
            Warning::ContractionNotGuaranteed { constant, unit_horizon } => write!(
                f,
                "estimated contraction constant {constant:.6} >= 1 (unit-horizon form {unit_horizon:.6}); uniqueness is not guaranteed"
            ),
            Warning::SecantFallback { node } => {
                write!(f, "fixed-point iteration stalled at node {node}; secant fallback engaged")
            }
            Warning::MomentNearSingular { order } => {
                write!(f, "moment order {order} is close to zero; kernel (1-s)^(order-1) is nearly singular")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Node-by-node marching.
    Marching,
    /// Global Picard sweeps.
    Picard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSolution {
    pub method: Method,
    pub solution: SolutionFunction,
    /// Right-hand side evaluations per node (marching) or a single entry with
    /// the number of sweeps (Picard).
    pub iterations: Vec<usize>,
    /// `max_i |y_i - f(t_i, z(t_i))|`
    pub residual: f64,
    pub lipschitz_estimate: Option<f64>,
    pub contraction: Option<f64>,
    pub contraction_unit_horizon: Option<f64>,
    /// Successive update ratios `‖Δ_{k+1}‖ / ‖Δ_k‖` of the Picard sweep.
    pub sweep_ratios: Vec<f64>,
    /// Update magnitudes per node (marching) or per sweep (Picard), only when tracing.
    pub trace: Vec<Vec<f64>>,
    pub warnings: Vec<Warning>,
}

impl CollocationSolution {
    pub fn spline(&self) -> &LinearSpline {
        self.solution.spline()
    }

    pub fn max_sweep_ratio(&self) -> Option<f64> {
        self.sweep_ratios.iter().copied().reduce(f64::max)
    }
}

/// `L · Σ_j (T^{β_j}/Γ(β_j+1) + Σ_k sup|κ_jk| T^{μ_jk}/μ_jk)`
pub fn contraction_constant(eq: &IntegralEquation, lipschitz: f64) -> f64 {
    contraction_with_horizon(eq, lipschitz, eq.horizon)
}

/// Same bound with the horizon factors dropped (`T = 1`).
pub fn contraction_constant_unit_horizon(eq: &IntegralEquation, lipschitz: f64) -> f64 {
    contraction_with_horizon(eq, lipschitz, 1.0)
}

fn contraction_with_horizon(eq: &IntegralEquation, lipschitz: f64, horizon: f64) -> f64 {
    let norm: f64 = eq
        .arguments
        .iter()
        .map(|a| {
            let local = horizon.powf(a.order) * rgamma(a.order + 1.0);
            let nonlocal: f64 = a
                .nonlocal
                .iter()
                .map(|n| n.coefficient.sup_abs(eq.horizon) * horizon.powf(n.moment_order) / n.moment_order)
                .sum();
            local + nonlocal
        })
        .sum();
    lipschitz * norm
}

struct Precheck {
    lipschitz: Option<f64>,
    contraction: Option<f64>,
    unit: Option<f64>,
    warnings: Vec<Warning>,
}

fn precheck(eq: &IntegralEquation, cfg: &CollocationConfig) -> Result<Precheck, SolveError> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    for a in &eq.arguments {
        for n in &a.nonlocal {
            if n.moment_order < MOMENT_SINGULARITY_THRESHOLD {
                warnings.push(Warning::MomentNearSingular { order: n.moment_order });
            }
        }
    }
    if cfg.lipschitz_samples == 0 {
        return Ok(Precheck {
            lipschitz: None,
            contraction: None,
            unit: None,
            warnings,
        });
    }
    let region = cfg.probe_box(eq)?;
    let l = lipschitz_probe(&eq.rhs, &region, cfg.lipschitz_samples);
    let constant = contraction_constant(eq, l);
    let unit = contraction_constant_unit_horizon(eq, l);
    if constant >= 1.0 {
        if cfg.strict_contraction {
            return Err(SolveError::NotContractive { constant });
        }
        warnings.push(Warning::ContractionNotGuaranteed {
            constant,
            unit_horizon: unit,
        });
    }
    Ok(Precheck {
        lipschitz: Some(l),
        contraction: Some(constant),
        unit: Some(unit),
        warnings,
    })
}

fn rhs_at(eq: &IntegralEquation, t: f64, z: &[f64]) -> Result<f64, SolveError> {
    eq.rhs.eval(t, z).map_err(|source| SolveError::Rhs { t, source })
}

fn tables(eq: &IntegralEquation, n: usize) -> Result<Vec<std::sync::Arc<WeightTable>>, KernelError> {
    let cache = WeightCache::global();
    eq.arguments.iter().map(|a| cache.get(a.order, n)).collect()
}

/// Forcing `g_j(t_i)` for every argument and node.
fn forcing_table(eq: &IntegralEquation, grid: &UniformGrid) -> Result<Vec<Vec<f64>>, KernelError> {
    eq.arguments
        .iter()
        .map(|a| grid.nodes().map(|t| a.forcing.eval(t)).collect())
        .collect()
}

/// Collocation residual at the nodes, using full nodal rows.
fn nodal_residual(eq: &IntegralEquation, y: &LinearSpline) -> Result<f64, SolveError> {
    let grid = *y.grid();
    let integrals = eq
        .arguments
        .iter()
        .map(|a| y.frac_integral_at_nodes(a.order))
        .collect::<Result<Vec<_>, _>>()?;
    let moments = eq.moments(y)?;
    let mut z = vec![0.0; eq.arguments.len()];
    let mut worst = 0.0_f64;
    for (i, t) in grid.nodes().enumerate() {
        for (j, a) in eq.arguments.iter().enumerate() {
            z[j] = a.forcing.eval(t)? + integrals[j][i] + a.nonlocal_value(t, &moments[j]);
        }
        worst = worst.max((y.values()[i] - rhs_at(eq, t, &z)?).abs());
    }
    Ok(worst)
}

fn converged(delta: f64, value: f64, tol: f64) -> bool {
    delta.abs() <= tol * (1.0 + value.abs())
}

/// Node-marching collocation for equations without nonlocal terms.
pub fn solve_volterra(eq: &IntegralEquation, cfg: &CollocationConfig) -> Result<CollocationSolution, SolveError> {
    if eq.has_nonlocal() {
        return Err(SolveError::InvalidProblem(
            "node marching needs a causal equation; use the Picard sweep for nonlocal terms".into(),
        ));
    }
    let pre = precheck(eq, cfg)?;
    let mut warnings = pre.warnings;
    let grid = UniformGrid::new(eq.horizon, cfg.intervals)?;
    let h = grid.step();
    let n = cfg.intervals;
    let tables = tables(eq, n)?;
    let forcing = forcing_table(eq, &grid)?;
    let dim = eq.arguments.len();

    let mut y = vec![0.0; n + 1];
    let mut iterations = vec![0; n + 1];
    let mut trace = Vec::new();
    let mut z = vec![0.0; dim];

    // Every I^β y vanishes at t = 0.
    for j in 0..dim {
        z[j] = forcing[j][0];
    }
    y[0] = rhs_at(eq, 0.0, &z)?;
    iterations[0] = 1;
    if cfg.trace {
        trace.push(Vec::new());
    }

    let mut base = vec![0.0; dim];
    let mut diag = vec![0.0; dim];
    for i in 1..=n {
        let t = grid.node(i);
        for j in 0..dim {
            base[j] = forcing[j][i] + tables[j].lag(h, i, &y);
            diag[j] = tables[j].diagonal(h, i);
        }
        let mut map = |v: f64| -> Result<f64, SolveError> {
            for j in 0..dim {
                z[j] = base[j] + diag[j] * v;
            }
            rhs_at(eq, t, &z)
        };
        let outcome = solve_node(&mut map, y[i - 1], cfg)?;
        match outcome {
            NodeOutcome::Converged { value, evaluations, deltas, secant } => {
                y[i] = value;
                iterations[i] = evaluations;
                if secant {
                    warnings.push(Warning::SecantFallback { node: i });
                }
                if cfg.trace {
                    trace.push(deltas);
                }
            }
            NodeOutcome::Failed { last_delta, evaluations } => {
                return Err(SolveError::NodeNotConverged {
                    node: i,
                    t,
                    iterations: evaluations,
                    last_delta,
                })
            }
        }
    }

    let spline = LinearSpline::new(grid, y)?;
    let residual = nodal_residual(eq, &spline)?;
    Ok(CollocationSolution {
        method: Method::Marching,
        solution: eq.solution(spline)?,
        iterations,
        residual,
        lipschitz_estimate: pre.lipschitz,
        contraction: pre.contraction,
        contraction_unit_horizon: pre.unit,
        sweep_ratios: Vec::new(),
        trace,
        warnings,
    })
}

enum NodeOutcome {
    Converged {
        value: f64,
        evaluations: usize,
        deltas: Vec<f64>,
        secant: bool,
    },
    Failed {
        last_delta: f64,
        evaluations: usize,
    },
}

/// Scalar solve of `v = F(v)`: damped fixed-point iteration, then a
/// safeguarded secant iteration on `F(v) - v` once half the budget is spent.
fn solve_node<F>(map: &mut F, guess: f64, cfg: &CollocationConfig) -> Result<NodeOutcome, SolveError>
where
    F: FnMut(f64) -> Result<f64, SolveError>,
{
    let switch = (cfg.max_iter / 2).max(1);
    let mut v = guess;
    let mut theta = 1.0;
    let mut prev = f64::INFINITY;
    let mut deltas = Vec::new();
    let mut evaluations = 0;
    // Last two (v, F(v) - v) pairs for the secant phase.
    let mut history: Option<(f64, f64)> = None;
    let mut last = (v, f64::NAN);

    while evaluations < cfg.max_iter {
        let fv = map(v)?;
        evaluations += 1;
        let g = fv - v;
        if cfg.trace {
            deltas.push(g.abs());
        }
        if converged(g, fv, cfg.tol) {
            return Ok(NodeOutcome::Converged {
                value: fv,
                evaluations,
                deltas,
                secant: evaluations > switch,
            });
        }
        if evaluations < switch {
            if g.abs() >= prev {
                theta *= 0.5;
            }
            prev = g.abs();
            history = Some((v, g));
            v += theta * g;
            continue;
        }
        // secant on G(v) = F(v) - v
        let (v_old, g_old) = history.unwrap_or(last);
        let denom = g - g_old;
        let damped = v + theta * g;
        let mut next = if denom != 0.0 && denom.is_finite() {
            v - g * (v - v_old) / denom
        } else {
            damped
        };
        let span = 10.0 * (v - v_old).abs().max(g.abs());
        if !next.is_finite() || (next - v).abs() > span {
            next = damped;
        }
        history = Some((v, g));
        last = (v, g);
        v = next;
    }
    Ok(NodeOutcome::Failed {
        last_delta: last.1.abs(),
        evaluations,
    })
}

/// Global Picard sweeps `y^{(k+1)}_i = f(t_i, z(y^{(k)})(t_i))`, starting from zero.
pub fn solve_fredholm(eq: &IntegralEquation, cfg: &CollocationConfig) -> Result<CollocationSolution, SolveError> {
    let pre = precheck(eq, cfg)?;
    let grid = UniformGrid::new(eq.horizon, cfg.intervals)?;
    let n = cfg.intervals;
    let forcing = forcing_table(eq, &grid)?;
    let dim = eq.arguments.len();
    let nodes: Vec<f64> = grid.nodes().collect();

    let mut current = LinearSpline::constant(grid, 0.0);
    let mut z = vec![0.0; dim];
    let mut ratios = Vec::new();
    let mut trace = Vec::new();
    let mut prev_norm = f64::NAN;
    let mut last_delta = f64::INFINITY;

    for sweep in 1..=cfg.max_iter {
        let integrals = eq
            .arguments
            .iter()
            .map(|a| current.frac_integral_at_nodes(a.order))
            .collect::<Result<Vec<_>, _>>()?;
        let moments = eq.moments(&current)?;
        let mut next = Vec::with_capacity(n + 1);
        for (i, &t) in nodes.iter().enumerate() {
            for (j, a) in eq.arguments.iter().enumerate() {
                z[j] = forcing[j][i] + integrals[j][i] + a.nonlocal_value(t, &moments[j]);
            }
            next.push(rhs_at(eq, t, &z)?);
        }
        let old = current.values();
        let norm = next.iter().zip(old).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let done = next.iter().zip(old).all(|(a, b)| converged(a - b, *a, cfg.tol));
        if cfg.trace {
            trace.push(vec![norm]);
        }
        if sweep > 1 && prev_norm > 0.0 && norm > 0.0 {
            ratios.push(norm / prev_norm);
        }
        prev_norm = norm;
        last_delta = norm;
        current = LinearSpline::new(grid, next)?;
        if done {
            let residual = nodal_residual(eq, &current)?;
            return Ok(CollocationSolution {
                method: Method::Picard,
                solution: eq.solution(current)?,
                // the final sweep only confirms the previous iterate
                iterations: vec![sweep - 1],
                residual,
                lipschitz_estimate: pre.lipschitz,
                contraction: pre.contraction,
                contraction_unit_horizon: pre.unit,
                sweep_ratios: ratios,
                trace,
                warnings: pre.warnings,
            });
        }
    }
    Err(SolveError::SweepNotConverged {
        sweeps: cfg.max_iter,
        last_delta,
        ratio: ratios.last().copied().unwrap_or(f64::NAN),
    })
}

/// Marching for causal equations, Picard sweeps otherwise.
pub fn solve(eq: &IntegralEquation, cfg: &CollocationConfig) -> Result<CollocationSolution, SolveError> {
    if eq.has_nonlocal() {
        solve_fredholm(eq, cfg)
    } else {
        solve_volterra(eq, cfg)
    }
}

/// `max |y(t) - f(t, z(t))|` over the nodes and `probes_per_interval`
/// interior points of every subinterval.
pub fn residual_supnorm(
    eq: &IntegralEquation,
    y: &LinearSpline,
    probes_per_interval: usize,
) -> Result<f64, SolveError> {
    let moments = eq.moments(y)?;
    let mut worst = 0.0_f64;
    for t in y.grid().probe_points(probes_per_interval) {
        let z = eq.assemble(y, t, &moments)?;
        worst = worst.max((y.eval(t)? - rhs_at(eq, t, &z)?).abs());
    }
    Ok(worst)
}
