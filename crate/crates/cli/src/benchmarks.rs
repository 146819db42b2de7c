//! Built-in manufactured problems with known solutions.

use crate::config::{parse_config, ProblemConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub name: &'static str,
    pub summary: &'static str,
    /// How the exact solution was obtained.
    pub oracle: &'static str,
    /// Expected EOC of `y_N` in the sup norm, `None` when the scheme is exact.
    pub expected_eoc: Option<f64>,
    pub config: ProblemConfig,
}

impl Benchmark {
    pub fn exact_y(&self) -> &str {
        self.config.exact_y.as_deref().expect("every benchmark declares y")
    }

    pub fn exact_x(&self) -> &str {
        self.config.exact_x.as_deref().expect("every benchmark declares x")
    }
}

/// `Σ_{k<terms} t^{k/2} / Γ(k/2 + 1)` as expression text.
pub fn mittag_leffler_half_text(terms: usize) -> String {
    let mut parts = vec!["1".to_string()];
    for k in 1..terms {
        let e = k as f64 / 2.0;
        parts.push(format!("t^{e:?}/gamma({:?})", e + 1.0));
    }
    parts.join(" + ")
}

const SOLVER: &str = "\n[solver]\nN = 16\nrefinements = 4\n";

fn entry(
    name: &'static str,
    summary: &'static str,
    oracle: &'static str,
    expected_eoc: Option<f64>,
    problem: String,
) -> Benchmark {
    let text = format!("{problem}{SOLVER}");
    let config = parse_config(&text).unwrap_or_else(|e| panic!("benchmark {name}: {e}"));
    Benchmark {
        name,
        summary,
        oracle,
        expected_eoc,
        config,
    }
}

pub fn registry() -> Vec<Benchmark> {
    let ml = mittag_leffler_half_text(30);
    vec![
        entry(
            "ml_linear",
            "D^0.5 x = x, x(0) = 1, i.e. y = I^0.5 y + 1 on [0, 1]",
            "Mittag-Leffler series E_0.5(t^0.5), 30 terms",
            // the √t term of y caps the dense sup-norm rate at 1/2
            Some(0.5),
            format!(
                "kind = ivp_caputo\nalpha = 0.5\nx0 = [1]\nT = 1\nrhs = \"x\"\nexact_y = \"{ml}\"\nexact_x = \"{ml}\"\n"
            ),
        ),
        entry(
            "caputo_smooth",
            "D^1.5 x = f(t, x) with x = t^3.5",
            "power rule: D^1.5 t^3.5 = Γ(4.5)/Γ(3) t^2",
            Some(2.0),
            "kind = ivp_caputo\nalpha = 1.5\nx0 = [0, 0]\nT = 1\n\
             rhs = \"gamma(4.5)/2*t^2 + sin(x) - sin(t^3.5)\"\n\
             exact_y = \"gamma(4.5)/2*t^2\"\nexact_x = \"t^3.5\"\n"
                .to_string(),
        ),
        entry(
            "caputo_two_term",
            "D^1.5 x = f(t, x, D^0.5 x) with x = t^3.5",
            "power rule for both orders",
            Some(2.0),
            "kind = ivp_caputo\nalpha = 1.5\nalphas = [0.5]\nx0 = [0, 0]\nT = 1\n\
             rhs = \"gamma(4.5)/2*t^2 + sin(x) - sin(t^3.5) + 0.5*(d1 - gamma(4.5)/gamma(4)*t^3)\"\n\
             exact_y = \"gamma(4.5)/2*t^2\"\nexact_x = \"t^3.5\"\n"
                .to_string(),
        ),
        entry(
            "caputo_holder",
            "D^0.5 x = f(t, x) with y = t^0.8, continuous but not differentiable at 0",
            "power rule: I^0.5 t^0.8 = Γ(1.8)/Γ(2.3) t^1.3",
            Some(0.8),
            "kind = ivp_caputo\nalpha = 0.5\nx0 = [0]\nT = 1\n\
             rhs = \"t^0.8 + 0.5*(x - gamma(1.8)/gamma(2.3)*t^1.3)\"\n\
             exact_y = \"t^0.8\"\nexact_x = \"gamma(1.8)/gamma(2.3)*t^1.3\"\n"
                .to_string(),
        ),
        entry(
            "rl_two_term",
            "Riemann-Liouville D^0.5 x = f(t, x, D^0.2 x) with x = t^2.5",
            "power rule: D^0.5 t^2.5 = Γ(3.5)/Γ(3) t^2, D^0.2 t^2.5 = Γ(3.5)/Γ(3.3) t^2.3",
            Some(2.0),
            "kind = ivp_rl\nalpha = 0.5\nalphas = [0.2]\nT = 1\n\
             rhs = \"gamma(3.5)/2*t^2 + 0.5*sin(x) - 0.5*sin(t^2.5) + 0.2*(d1 - gamma(3.5)/gamma(3.3)*t^2.3)\"\n\
             exact_y = \"gamma(3.5)/2*t^2\"\nexact_x = \"t^2.5\"\n"
                .to_string(),
        ),
        entry(
            "bvp_classical",
            "x'' = -1, x(0) = x(1) = 0",
            "classical two-point problem, x = t(1-t)/2",
            None,
            "kind = bvp\nq = 2\nA = 1\nB = 0\neta1 = 0\neta2 = 0\nrhs = \"0-1\"\n\
             exact_y = \"0-1\"\nexact_x = \"t*(1-t)/2\"\n"
                .to_string(),
        ),
        entry(
            "bvp_robin",
            "D^1.5 x = f(t, x), x(0) + x'(0) = 0, x(1) + x'(1) = 4.5, with x = t^3.5",
            "power rule; boundary values from x = t^3.5 directly",
            Some(2.0),
            "kind = bvp\nq = 1.5\nA = 1\nB = 1\neta1 = 0\neta2 = 4.5\n\
             rhs = \"gamma(4.5)/2*t^2 + 0.1*(x - t^3.5)\"\n\
             exact_y = \"gamma(4.5)/2*t^2\"\nexact_x = \"t^3.5\"\n"
                .to_string(),
        ),
        entry(
            "bvp_two_term",
            "D^1.8 x = f(t, x, D^1.3 x), 2x(0) + 0.5x'(0) = 0, 2x(1) + 0.5x'(1) = 4, with x = t^4",
            "power rule: D^1.8 t^4 = Γ(5)/Γ(3.2) t^2.2, D^1.3 t^4 = Γ(5)/Γ(3.7) t^2.7",
            Some(2.0),
            "kind = bvp\nq = 1.8\nqs = [1.3]\nA = 2\nB = 0.5\neta1 = 0\neta2 = 4\n\
             rhs = \"gamma(5)/gamma(3.2)*t^2.2 + 0.1*sin(x - t^4) + 0.05*(d1 - gamma(5)/gamma(3.7)*t^2.7)\"\n\
             exact_y = \"gamma(5)/gamma(3.2)*t^2.2\"\nexact_x = \"t^4\"\n"
                .to_string(),
        ),
    ]
}

pub fn find(name: &str) -> Option<Benchmark> {
    registry().into_iter().find(|b| b.name == name)
}

/// Human-readable listing.
pub fn listing() -> String {
    let mut out = String::new();
    for b in registry() {
        let eoc = b
            .expected_eoc
            .map(|v| format!("{v}"))
            .unwrap_or_else(|| "exact (errors at roundoff)".into());
        out.push_str(&format!(
            "{name}\n  kind: {kind}\n  problem: {summary}\n  expected EOC: {eoc}\n  oracle: {oracle}\n  exact y: {y}\n  exact x: {x}\n\n",
            name = b.name,
            kind = b.config.spec.kind().name(),
            summary = b.summary,
            oracle = b.oracle,
            y = b.exact_y(),
            x = b.exact_x(),
        ));
    }
    out
}
