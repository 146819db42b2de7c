//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! with a failure status when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{gamma_ref, mittag_leffler, rl_integral, rng};
use fdecoll::{
    bvp_linear_solve, eoc_study, frac_integral_power, frac_integral_weights, modulus_of_continuity,
    reconstruct_bvp, reduce_bvp, reduce_ivp_caputo, residual_supnorm, rl_derivative_power, solve,
    solve_fredholm, CaputoBvp, CaputoIvp, CollocationConfig, InitialData,
    IntegralEquation, LinearSpline, Method, PowerTerm, Reference, RhsFunction, RobinBoundary,
    UniformGrid, Warning,
};
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Accumulates sub-checks; the criterion passes when all of them do.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failed.push(what.clone());
        }
        self.notes.push(what);
    }

    fn outcome(self) -> Outcome {
        if self.failed.is_empty() {
            Outcome::new(true, self.notes.join("; "))
        } else {
            Outcome::new(false, format!("failed: {}", self.failed.join("; ")))
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn caputo_eq(alpha: f64, orders: Vec<f64>, x0: Vec<f64>, rhs: &str) -> IntegralEquation {
    let m = orders.len();
    let p = CaputoIvp::new(
        alpha,
        orders,
        InitialData::new(x0).unwrap(),
        1.0,
        RhsFunction::parse(rhs, m).unwrap(),
    )
    .unwrap();
    reduce_ivp_caputo(&p)
}

fn cfg(n: usize) -> CollocationConfig {
    CollocationConfig::with_intervals(n)
}

/// Caputo form of the derivative oracle: for γ > n-1 the Taylor part of
/// t^γ vanishes and D^α t^γ = I^{n-α} (d^n/dt^n t^γ).
fn derivative_oracle(alpha: f64, gamma: f64, t: f64) -> f64 {
    let n = alpha.ceil();
    let falling: f64 = (0..n as usize).map(|k| gamma - k as f64).product();
    if n == alpha {
        return falling * t.powf(gamma - n);
    }
    rl_integral(n - alpha, |s: f64| falling * s.powf(gamma - n), t, &[])
}

fn power_law_calculus() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut r = rng(101);

    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let alpha = r.random_range(0.1..3.0);
        let gamma = r.random_range(-0.9..3.0);
        let t = r.random_range(0.05..2.0);
        let v = frac_integral_power(alpha, gamma, t).unwrap();
        worst = worst.max((v - rl_integral(alpha, |s: f64| s.powf(gamma), t, &[])).abs());
    }
    c.check(worst < 1e-8, format!("integral max err {worst:.1e}"));

    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let alpha: f64 = r.random_range(0.1..2.5);
        let n = alpha.ceil();
        let gamma = r.random_range(n - 0.7..n + 2.5);
        let t = r.random_range(0.1..2.0);
        let v = rl_derivative_power(alpha, gamma, t).unwrap();
        worst = worst.max((v - derivative_oracle(alpha, gamma, t)).abs());
    }
    c.check(worst < 1e-8, format!("derivative max err {worst:.1e}"));

    let (mut semigroup, mut commute, mut inverse, mut vanish) = (true, true, true, true);
    for _ in 0..2000 {
        let coefficient = r.random_range(-5.0..5.0);
        let exponent = r.random_range(-0.9..3.0);
        let a = r.random_range(0.05..2.0);
        let b = r.random_range(0.05..2.0);
        let t = r.random_range(0.01..3.0);
        let p = PowerTerm::new(coefficient, exponent).unwrap();
        let ab = p.integrate(a).unwrap().integrate(b).unwrap().eval(t);
        let ba = p.integrate(b).unwrap().integrate(a).unwrap().eval(t);
        semigroup &= rel_close(ab, p.integrate(a + b).unwrap().eval(t), 1e-12);
        commute &= rel_close(ab, ba, 1e-12);
        let back = p.integrate(a).unwrap().differentiate(a).unwrap().eval(t);
        inverse &= rel_close(back, p.eval(t), 1e-12);
        vanish &= frac_integral_power(a + b, exponent.abs(), 0.0).unwrap() == 0.0;
    }
    c.check(semigroup, "semigroup");
    c.check(commute, "commutativity");
    c.check(inverse, "inversion");
    c.check(vanish, "vanishing at 0");
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(5), format!("{:.2}s < 5s", elapsed.as_secs_f64()));
    c.outcome()
}

fn spline_quadrature() -> Outcome {
    let mut c = Checks::default();
    let mut r = rng(102);
    let mut worst = 0.0_f64;
    for _ in 0..60 {
        let n = r.random_range(1..=16);
        let horizon = r.random_range(0.2..3.0);
        let values = (0..=n).map(|_| r.random_range(-2.0..2.0)).collect();
        let s = LinearSpline::new(UniformGrid::new(horizon, n).unwrap(), values).unwrap();
        let alpha = r.random_range(0.1..2.5);
        let nodes: Vec<f64> = s.grid().nodes().collect();
        let at_nodes = s.frac_integral_at_nodes(alpha).unwrap();
        for (i, &t) in nodes.iter().enumerate() {
            let oracle = rl_integral(alpha, |tau| s.eval(tau.min(horizon)).unwrap(), t, &nodes);
            worst = worst.max((at_nodes[i] - oracle).abs());
        }
    }
    c.check(worst < 1e-8, format!("nodal max err {worst:.1e}"));

    let mut trapezoid = true;
    for h in [0.3, 0.125, 1.0, 0.07] {
        for i in 1..40 {
            let w = frac_integral_weights(1.0, h, i).unwrap();
            trapezoid &= w[0] == h / 2.0 && w[i] == h / 2.0 && w[1..i].iter().all(|&x| x == h);
        }
    }
    c.check(trapezoid, "alpha=1 weights are trapezoid exactly");

    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let alpha = r.random_range(0.05..3.0);
        let h = r.random_range(0.01..0.5);
        let i = r.random_range(1..200);
        let sum: f64 = frac_integral_weights(alpha, h, i).unwrap().iter().sum();
        let exact = (i as f64 * h).powf(alpha) / gamma_ref(alpha + 1.0);
        worst = worst.max(((sum - exact) / exact).abs());
    }
    c.check(worst < 1e-12, format!("row sums max rel err {worst:.1e}"));
    c.outcome()
}

fn smooth_rate() -> Outcome {
    let mut c = Checks::default();
    let problems = [
        caputo_eq(1.5, vec![], vec![0.0, 0.0], "gamma(4.5)/2*t^2 + sin(x) - sin(t^3.5)"),
        caputo_eq(
            1.5,
            vec![0.5],
            vec![0.0, 0.0],
            "gamma(4.5)/2*t^2 + sin(x) - sin(t^3.5) + 0.5*(d1 - gamma(4.5)/gamma(4)*t^3)",
        ),
        caputo_eq(
            1.5,
            vec![1.2, 0.5],
            vec![0.0, 0.0],
            "gamma(4.5)/2*t^2 + 0.3*(d1 - gamma(4.5)/gamma(3.3)*t^2.3) + 0.5*cos(d2) - 0.5*cos(gamma(4.5)/gamma(4)*t^3)",
        ),
    ];
    let scale = gamma_ref(4.5) / 2.0;
    let exact = |t: f64| scale * t * t;
    for (m, eq) in problems.iter().enumerate() {
        let start = Instant::now();
        let report = eoc_study(eq, Reference::Exact(&exact), 16, 5, &cfg(16), false).unwrap();
        let elapsed = start.elapsed();
        let slopes = report.slopes();
        let ok = slopes.len() == 4 && slopes.iter().all(|s| (1.9..=2.1).contains(s));
        let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
        c.check(ok, format!("m={m} slopes [{}]", shown.join(", ")));
        c.check(
            elapsed < Duration::from_secs(30),
            format!("m={m} {:.2}s < 30s", elapsed.as_secs_f64()),
        );
    }
    c.outcome()
}

fn holder_rate() -> Outcome {
    let mut c = Checks::default();
    let eq = caputo_eq(0.5, vec![], vec![0.0], "t^0.8 + 0.5*(x - gamma(1.8)/gamma(2.3)*t^1.3)");
    let exact = |t: f64| t.powf(0.8);
    let report = eoc_study(&eq, Reference::Exact(&exact), 16, 5, &cfg(16), true).unwrap();
    let slopes = report.slopes();
    let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    c.check(
        slopes.len() == 4 && slopes.iter().all(|s| (s - 0.8).abs() <= 0.1),
        format!("slopes [{}]", shown.join(", ")),
    );
    let mut worst = 0.0_f64;
    for l in &report.levels {
        let omega = modulus_of_continuity(exact, 1.0, l.step, 40 * l.intervals + 1);
        worst = worst.max(l.sup_error / omega);
    }
    c.check(worst <= 5.0, format!("max error/omega {worst:.3} <= 5"));
    c.outcome()
}

fn contraction_behaviour() -> Outcome {
    let mut c = Checks::default();
    // f = L x on [0, 1] with α = 1/2: constant L / Γ(3/2)
    let eq = caputo_eq(0.5, vec![], vec![1.0], "0.5*x");
    let analytic = 0.5 / gamma_ref(1.5);
    let mut config = cfg(64);
    config.trace = true;
    let sol = solve_fredholm(&eq, &config).unwrap();
    let constant = sol.contraction.unwrap_or(f64::NAN);
    c.check(
        (constant - analytic).abs() < 1e-9,
        format!("reported constant {constant:.4} vs analytic {analytic:.4}"),
    );
    let ratio = sol.max_sweep_ratio().unwrap_or(f64::INFINITY);
    c.check(
        sol.method == Method::Picard && ratio <= analytic + 0.05,
        format!("max sweep ratio {ratio:.4} <= {:.4}", analytic + 0.05),
    );

    let eq = caputo_eq(0.5, vec![], vec![1.0], "1.5*x");
    let exact = |t: f64| 1.5 * mittag_leffler(0.5, 1.5 * t.sqrt(), 80);
    let mut errors = Vec::new();
    for n in [32, 64, 128] {
        match solve(&eq, &cfg(n)) {
            Ok(sol) => {
                let warned = sol
                    .warnings
                    .iter()
                    .any(|w| matches!(w, Warning::ContractionNotGuaranteed { .. }));
                c.check(
                    warned && sol.contraction.is_some_and(|k| k > 1.0),
                    format!("N={n} warns"),
                );
                let y = sol.spline();
                let e = y
                    .grid()
                    .nodes()
                    .zip(y.values())
                    .map(|(t, v)| (v - exact(t)).abs())
                    .fold(0.0, f64::max);
                errors.push(e);
            }
            Err(e) => c.check(false, format!("N={n}: {e}")),
        }
    }
    let decreasing = errors.len() == 3 && errors.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    c.check(decreasing, format!("L~>1 nodal errors [{}] decrease", shown.join(", ")));
    c.outcome()
}

fn mittag_leffler_oracle() -> Outcome {
    let eq = caputo_eq(0.5, vec![], vec![1.0], "x");
    let sol = match solve(&eq, &cfg(64)) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let series = |t: f64| mittag_leffler(0.5, t.sqrt(), 30);
    let y = sol.spline();
    let points: Vec<f64> = y.grid().probe_points(10).into_iter().filter(|&t| t <= 0.5).collect();
    let sup = |f: &dyn Fn(f64) -> f64, pts: &[f64]| pts.iter().map(|&t| (f(t) - series(t)).abs()).fold(0.0, f64::max);
    let dense_y = sup(&|t| y.eval(t).unwrap(), &points);
    let nodes: Vec<f64> = y.grid().nodes().filter(|&t| t <= 0.5).collect();
    let nodal_y = sup(&|t| y.eval(t).unwrap(), &nodes);
    let dense_x = sup(&|t| sol.solution.eval(t).unwrap(), &points);
    Outcome::new(
        dense_y <= 1e-3,
        format!("sup |y_N - series| on [0, 0.5] = {dense_y:.2e} (nodes only {nodal_y:.2e}, reconstructed x {dense_x:.2e}); tolerance 1e-3"),
    )
}

fn classical_bvp() -> Outcome {
    let mut c = Checks::default();
    let bc = RobinBoundary::new(1.0, 0.0, 0.0, 0.0).unwrap();
    let p = CaputoBvp::new(2.0, vec![], bc, RhsFunction::parse("0-1", 0).unwrap()).unwrap();
    let sol = solve(&reduce_bvp(&p), &cfg(32)).unwrap();
    let worst = sol
        .spline()
        .grid()
        .nodes()
        .map(|t| (sol.solution.eval(t).unwrap() - t * (1.0 - t) / 2.0).abs())
        .fold(0.0, f64::max);
    c.check(worst < 1e-10, format!("nodal err {worst:.1e}"));

    let mut r = rng(107);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let q = r.random_range(1.05..=2.0);
        let a = r.random_range(0.3..3.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = r.random_range(-2.0..2.0);
        let bc = RobinBoundary::new(a, b, r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)).unwrap();
        let p = CaputoBvp::new(q, vec![], bc, RhsFunction::parse("x", 0).unwrap()).unwrap();
        let n = r.random_range(1..=24);
        let values = (0..=n).map(|_| r.random_range(-2.0..2.0)).collect();
        let y = LinearSpline::new(UniformGrid::new(1.0, n).unwrap(), values).unwrap();
        let via_argument = reconstruct_bvp(y.clone(), &p).unwrap();
        let via_green = bvp_linear_solve(q, bc, y).unwrap();
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            worst = worst.max((via_argument.eval(t).unwrap() - via_green.eval(t).unwrap()).abs());
        }
    }
    c.check(worst <= 1e-12, format!("representations differ by {worst:.1e}"));
    c.outcome()
}

fn fractional_bvp() -> Outcome {
    let mut c = Checks::default();
    let bc = RobinBoundary::new(1.0, 0.5, 0.2, -0.3).unwrap();
    let p = CaputoBvp::new(1.5, vec![], bc, RhsFunction::parse("0.1*x + t", 0).unwrap()).unwrap();
    let eq = reduce_bvp(&p);
    let config = cfg(64);
    let sol = solve(&eq, &config).unwrap();
    let constant = sol.contraction.unwrap_or(f64::NAN);
    c.check(constant < 1.0, format!("contraction constant {constant:.3}"));
    let residual = residual_supnorm(&eq, sol.spline(), 0).unwrap();
    c.check(
        residual <= 10.0 * config.tol,
        format!("residual {residual:.1e} <= {:.0e}", 10.0 * config.tol),
    );
    let (r0, r1) = sol.solution.boundary_residuals(&bc).unwrap();
    c.check(r0 <= 1e-8 && r1 <= 1e-8, format!("boundary residuals {r0:.1e}, {r1:.1e}"));
    c.outcome()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for b in fdecoll_cli::registry() {
        for name in ["solution.csv", "eoc.csv", "run.log"] {
            let path = dir.join(b.name).join(name);
            files.push((format!("{}/{name}", b.name), std::fs::read(path).unwrap_or_default()));
        }
    }
    files
}

fn cli_determinism() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let target = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_fdecoll"))
            .args(["benchmarks", "--run"])
            .arg(&target)
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false);
        c.check(status, format!("run {k} exits 0"));
        runs.push(snapshot(&target));
    }
    let csvs = runs[0].iter().filter(|(n, _)| n.ends_with(".csv")).count();
    let differing: Vec<&str> = runs[0]
        .iter()
        .zip(&runs[1])
        .filter(|(a, b)| a.1 != b.1 || a.1.is_empty())
        .map(|(a, _)| a.0.as_str())
        .collect();
    c.check(
        differing.is_empty(),
        format!("{csvs} CSVs and logs byte-identical {differing:?}"),
    );
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(180), format!("{:.2}s < 180s", elapsed.as_secs_f64()));
    c.outcome()
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("power-law calculus", power_law_calculus),
        ("spline quadrature", spline_quadrature),
        ("second-order rate, smooth y", smooth_rate),
        ("low-regularity rate", holder_rate),
        ("contraction behaviour", contraction_behaviour),
        ("Mittag-Leffler oracle", mittag_leffler_oracle),
        ("classical BVP and Green cross-check", classical_bvp),
        ("fractional BVP self-consistency", fractional_bvp),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {} [{name}]: {verdict} ({:.2}s) {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
