//! Solve a configured problem and write its tables and log.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fdecoll::{
    eoc_study, residual_supnorm, solve, CollocationSolution, ConvergenceReport, Method, Problem,
    Reference, RhsFunction, SolveError,
};

use crate::config::{ConfigError, ProblemConfig};

/// Probe points per subinterval in `solution.csv`.
pub const SOLUTION_PROBES: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid problem or settings: {0}")]
    Invalid(SolveError),
    #[error("solver failed: {0}")]
    Solver(SolveError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(ConfigError::Io { .. }) => 4,
            RunError::Config(_) | RunError::Invalid(_) => 2,
            RunError::Solver(_) => 3,
            RunError::Io { .. } => 4,
        }
    }
}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidProblem(_) | SolveError::InvalidConfig(_) => RunError::Invalid(e),
            other => RunError::Solver(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRow {
    pub t: f64,
    pub y: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocRow {
    pub intervals: usize,
    pub step: f64,
    pub sup_error: f64,
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub solution: Vec<SolutionRow>,
    pub eoc: Vec<EocRow>,
    pub log: String,
}

impl RunOutput {
    pub fn solution_csv(&self) -> String {
        let mut out = String::from("t,y,x\n");
        for r in &self.solution {
            let _ = writeln!(out, "{:?},{:?},{:?}", r.t, r.y, r.x);
        }
        out
    }

    pub fn eoc_csv(&self) -> String {
        let mut out = String::from("N,h,sup_error,eoc\n");
        for r in &self.eoc {
            let eoc = r.eoc.map(|v| format!("{v:?}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:?},{:?},{eoc}", r.intervals, r.step, r.sup_error);
        }
        out
    }

    /// Write `solution.csv`, `run.log` and, when present, `eoc.csv`.
    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let io = |path: PathBuf| move |source| RunError::Io { path, source };
        fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
        let mut files = vec![("solution.csv", self.solution_csv()), ("run.log", self.log.clone())];
        if !self.eoc.is_empty() {
            files.push(("eoc.csv", self.eoc_csv()));
        }
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(io(path.clone()))?;
        }
        Ok(())
    }
}

fn eval_exact(f: &RhsFunction, t: f64) -> f64 {
    f.eval(t, &[0.0]).unwrap_or(f64::NAN)
}

/// Solve, build the solution table, and run the EOC study when
/// `refinements ≥ 2`.
pub fn run(config: &ProblemConfig) -> Result<RunOutput, RunError> {
    let problem = config.to_problem()?;
    let eq = problem.reduce();
    let cfg = config.solver.collocation();
    let sol = solve(&eq, &cfg)?;

    let grid = sol.spline().grid();
    let mut solution = Vec::new();
    for t in grid.probe_points(SOLUTION_PROBES) {
        solution.push(SolutionRow {
            t,
            y: sol.spline().eval(t).map_err(SolveError::from)?,
            x: sol.solution.eval(t).map_err(SolveError::from)?,
        });
    }

    let exact_y = config.exact_y_fn();
    let eoc = if config.solver.refinements >= 2 {
        let report = match &exact_y {
            Some(f) => {
                let exact = |t: f64| eval_exact(f, t);
                eoc_study(&eq, Reference::Exact(&exact), cfg.intervals, config.solver.refinements, &cfg, false)?
            }
            None => eoc_study(&eq, Reference::FinestGrid, cfg.intervals, config.solver.refinements, &cfg, false)?,
        };
        eoc_rows(&report)
    } else {
        Vec::new()
    };

    let residual_dense = residual_supnorm(&eq, sol.spline(), SOLUTION_PROBES)?;
    let log = run_log(config, &problem, &sol, &solution, &eoc, residual_dense);
    Ok(RunOutput { solution, eoc, log })
}

fn eoc_rows(report: &ConvergenceReport) -> Vec<EocRow> {
    report
        .levels
        .iter()
        .map(|l| EocRow {
            intervals: l.intervals,
            step: l.step,
            sup_error: l.sup_error,
            eoc: l.slope,
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_else(|| "n/a".into())
}

fn run_log(
    config: &ProblemConfig,
    problem: &Problem,
    sol: &CollocationSolution,
    rows: &[SolutionRow],
    eoc: &[EocRow],
    residual_dense: f64,
) -> String {
    let mut log = String::new();
    let _ = writeln!(log, "kind = {}", config.spec.kind().name());
    let _ = writeln!(log, "rhs = {}", config.rhs);
    let _ = writeln!(log, "N = {}", config.solver.intervals);
    let _ = writeln!(log, "tol = {:?}", config.solver.tol);
    let method = match sol.method {
        Method::Marching => "node marching",
        Method::Picard => "Picard sweeps",
    };
    let _ = writeln!(log, "method = {method}");
    let _ = writeln!(log, "lipschitz_estimate = {}", opt(sol.lipschitz_estimate));
    let _ = writeln!(log, "contraction_constant = {}", opt(sol.contraction));
    let _ = writeln!(
        log,
        "contraction_constant_unit_horizon = {} (without the T^beta factors)",
        opt(sol.contraction_unit_horizon)
    );
    match sol.method {
        Method::Marching => {
            let its = &sol.iterations;
            let total: usize = its.iter().sum();
            let max = its.iter().copied().max().unwrap_or(0);
            let worst = its.iter().position(|&k| k == max).unwrap_or(0);
            let _ = writeln!(
                log,
                "iterations: total = {total}, mean = {:.3}, max = {max} (node {worst})",
                total as f64 / its.len() as f64
            );
        }
        Method::Picard => {
            let _ = writeln!(log, "iterations: sweeps = {}", sol.iterations.first().copied().unwrap_or(0));
            let _ = writeln!(log, "max_sweep_ratio = {}", opt(sol.max_sweep_ratio()));
        }
    }
    let _ = writeln!(log, "residual_nodes = {:?}", sol.residual);
    let _ = writeln!(log, "residual_probes = {residual_dense:?}");
    if let Problem::CaputoBvp(p) = problem {
        if let Ok((r0, r1)) = sol.solution.boundary_residuals(p.boundary()) {
            let _ = writeln!(log, "boundary_residuals = {r0:?}, {r1:?}");
        }
    }
    if let Some(f) = config.exact_y_fn() {
        let e = rows.iter().map(|r| (r.y - eval_exact(&f, r.t)).abs()).fold(0.0, f64::max);
        let _ = writeln!(log, "sup_error_y = {e:?}");
    }
    if let Some(f) = config.exact_x_fn() {
        let e = rows.iter().map(|r| (r.x - eval_exact(&f, r.t)).abs()).fold(0.0, f64::max);
        let _ = writeln!(log, "sup_error_x = {e:?}");
    }
    if !eoc.is_empty() {
        let slopes: Vec<String> = eoc.iter().filter_map(|r| r.eoc).map(|s| format!("{s:.4}")).collect();
        if slopes.is_empty() {
            let _ = writeln!(log, "eoc = not meaningful (errors at roundoff level)");
        } else {
            let _ = writeln!(log, "eoc = {}", slopes.join(", "));
        }
    }
    let _ = writeln!(log, "warnings = {}", sol.warnings.len());
    for w in &sol.warnings {
        let _ = writeln!(log, "{w}");
    }
    log
}

/// Load, run, and write into `out`.
pub fn run_file(path: &Path, out: &Path, adjust: impl FnOnce(&mut ProblemConfig)) -> Result<RunOutput, RunError> {
    let mut config = crate::config::load_config(path)?;
    adjust(&mut config);
    let output = run(&config)?;
    output.write(out)?;
    Ok(output)
}
