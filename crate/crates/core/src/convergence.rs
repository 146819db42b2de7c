//! Experimental order of convergence under grid halving.

use crate::error::SolveError;
use crate::solver::{solve, CollocationConfig, CollocationSolution};
use crate::spline::{modulus_of_continuity, LinearSpline, UniformGrid};
use crate::transform::IntegralEquation;

/// Interior probe points per subinterval used for sup-norm errors.
pub const ERROR_PROBES: usize = 10;

/// Samples per subinterval when measuring the modulus of continuity.
pub const MODULUS_SAMPLES_PER_INTERVAL: usize = 40;

/// Errors below this (relative to `1 + ‖y‖`) are treated as roundoff.
const ROUNDOFF_LEVEL: f64 = 1e-12;

/// What the computed `y_N` is compared against.
pub enum Reference<'a> {
    /// Known exact `y`.
    Exact(&'a (dyn Fn(f64) -> f64 + Sync)),
    /// One extra halving beyond the finest level, used as a proxy.
    FinestGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocLevel {
    pub intervals: usize,
    pub step: f64,
    pub sup_error: f64,
    /// `log2(e_{ℓ-1} / e_ℓ)`, absent on the first level.
    pub slope: Option<f64>,
    /// `ω(y, h_ℓ)` when requested.
    pub modulus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<EocLevel>,
    /// False when every error is at roundoff level, in which case slopes are
    /// not reported.
    pub meaningful: bool,
}

impl ConvergenceReport {
    pub fn slopes(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.slope).collect()
    }
}

/// Solve on `N₀·2^ℓ` subintervals, `ℓ = 0..levels`, and measure sup-norm
/// errors of `y_N` on each level's nodes plus [`ERROR_PROBES`] points per
/// subinterval. Levels are solved concurrently.
pub fn eoc_study(
    eq: &IntegralEquation,
    reference: Reference<'_>,
    base_intervals: usize,
    levels: usize,
    cfg: &CollocationConfig,
    with_modulus: bool,
) -> Result<ConvergenceReport, SolveError> {
    if levels < 2 {
        return Err(SolveError::InvalidConfig("an EOC study needs at least two levels".into()));
    }
    if base_intervals < 1 {
        return Err(SolveError::InvalidConfig("N must be at least 1".into()));
    }
    let extra = matches!(reference, Reference::FinestGrid) as usize;
    let sizes: Vec<usize> = (0..levels + extra).map(|l| base_intervals << l).collect();
    let solutions = solve_levels(eq, &sizes, cfg)?;

    let (reference_fn, reference_spline): (Option<&(dyn Fn(f64) -> f64 + Sync)>, Option<&LinearSpline>) =
        match reference {
            Reference::Exact(f) => (Some(f), None),
            Reference::FinestGrid => (None, Some(solutions[levels].spline())),
        };
    let exact = |t: f64| match (reference_fn, reference_spline) {
        (Some(f), _) => f(t),
        (None, Some(s)) => s.eval(t).unwrap_or(f64::NAN),
        (None, None) => unreachable!(),
    };

    let mut out = Vec::with_capacity(levels);
    let mut scale = 0.0_f64;
    for sol in &solutions[..levels] {
        let y = sol.spline();
        let grid: &UniformGrid = y.grid();
        let mut err = 0.0_f64;
        for t in grid.probe_points(ERROR_PROBES) {
            let e = exact(t);
            scale = scale.max(e.abs());
            err = err.max((y.eval(t)? - e).abs());
        }
        let modulus = with_modulus.then(|| {
            modulus_of_continuity(
                exact,
                eq.horizon,
                grid.step(),
                MODULUS_SAMPLES_PER_INTERVAL * grid.intervals() + 1,
            )
        });
        out.push(EocLevel {
            intervals: grid.intervals(),
            step: grid.step(),
            sup_error: err,
            slope: None,
            modulus,
        });
    }
    let meaningful = out.iter().any(|l| l.sup_error > ROUNDOFF_LEVEL * (1.0 + scale));
    if meaningful {
        for l in 1..out.len() {
            out[l].slope = Some((out[l - 1].sup_error / out[l].sup_error).log2());
        }
    }
    Ok(ConvergenceReport {
        levels: out,
        meaningful,
    })
}

/// Solve the same equation on several grids, one thread per grid.
pub fn solve_levels(
    eq: &IntegralEquation,
    sizes: &[usize],
    cfg: &CollocationConfig,
) -> Result<Vec<CollocationSolution>, SolveError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = sizes
            .iter()
            .map(|&n| {
                let cfg = CollocationConfig {
                    intervals: n,
                    ..cfg.clone()
                };
                scope.spawn(move || solve(eq, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}
