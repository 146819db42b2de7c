//! Problem configuration files.
//!
//! Line-oriented `key = value` text. Problem keys come first; solver keys
//! follow a `[solver]` header. `#` starts a comment outside quotes. Values
//! are numbers, bracketed lists of numbers, `true`/`false`, bare words (for
//! `kind`) or double-quoted strings (for expressions).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use fdecoll::{
    CaputoBvp, CaputoIvp, CollocationConfig, InitialData, Problem, RhsFunction, RlIvp,
    RobinBoundary, SolveError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    File(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    IvpCaputo,
    IvpRl,
    Bvp,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::IvpCaputo => "ivp_caputo",
            Kind::IvpRl => "ivp_rl",
            Kind::Bvp => "bvp",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ivp_caputo" => Some(Kind::IvpCaputo),
            "ivp_rl" => Some(Kind::IvpRl),
            "bvp" => Some(Kind::Bvp),
            _ => None,
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Kind::IvpCaputo => &["alpha", "x0", "T", "rhs"],
            Kind::IvpRl => &["alpha", "T", "rhs"],
            Kind::Bvp => &["q", "A", "B", "eta1", "eta2", "rhs"],
        }
    }

    fn optional(self) -> &'static [&'static str] {
        match self {
            Kind::IvpCaputo | Kind::IvpRl => &["alphas", "exact_y", "exact_x"],
            Kind::Bvp => &["qs", "exact_y", "exact_x"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    CaputoIvp {
        alpha: f64,
        alphas: Vec<f64>,
        x0: Vec<f64>,
        horizon: f64,
    },
    RlIvp {
        alpha: f64,
        alphas: Vec<f64>,
        horizon: f64,
    },
    Bvp {
        q: f64,
        qs: Vec<f64>,
        a: f64,
        b: f64,
        eta1: f64,
        eta2: f64,
    },
}

impl ProblemSpec {
    pub fn kind(&self) -> Kind {
        match self {
            ProblemSpec::CaputoIvp { .. } => Kind::IvpCaputo,
            ProblemSpec::RlIvp { .. } => Kind::IvpRl,
            ProblemSpec::Bvp { .. } => Kind::Bvp,
        }
    }

    /// Number of derivative arguments `m`.
    pub fn arity(&self) -> usize {
        match self {
            ProblemSpec::CaputoIvp { alphas, .. } | ProblemSpec::RlIvp { alphas, .. } => alphas.len(),
            ProblemSpec::Bvp { qs, .. } => qs.len(),
        }
    }

    pub fn horizon(&self) -> f64 {
        match self {
            ProblemSpec::CaputoIvp { horizon, .. } | ProblemSpec::RlIvp { horizon, .. } => *horizon,
            ProblemSpec::Bvp { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub intervals: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Number of grid levels for the EOC table; below two, no table.
    pub refinements: usize,
    pub lipschitz_box: Vec<(f64, f64)>,
    pub lipschitz_samples: usize,
    pub strict: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let c = CollocationConfig::default();
        Self {
            intervals: c.intervals,
            tol: c.tol,
            max_iter: c.max_iter,
            refinements: 0,
            lipschitz_box: c.lipschitz_box,
            lipschitz_samples: c.lipschitz_samples,
            strict: c.strict_contraction,
        }
    }
}

impl SolverSettings {
    pub fn collocation(&self) -> CollocationConfig {
        CollocationConfig {
            intervals: self.intervals,
            tol: self.tol,
            max_iter: self.max_iter,
            lipschitz_box: self.lipschitz_box.clone(),
            lipschitz_samples: self.lipschitz_samples,
            strict_contraction: self.strict,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub spec: ProblemSpec,
    pub rhs: String,
    /// Exact `y` and `x` as expressions in `t` alone.
    pub exact_y: Option<String>,
    pub exact_x: Option<String>,
    pub solver: SolverSettings,
}

impl ProblemConfig {
    /// Build the core problem; fails on the same conditions as loading.
    pub fn to_problem(&self) -> Result<Problem, SolveError> {
        let rhs = RhsFunction::parse(&self.rhs, self.spec.arity())
            .map_err(|e| SolveError::InvalidProblem(format!("rhs: {e}")))?;
        Ok(match &self.spec {
            ProblemSpec::CaputoIvp {
                alpha,
                alphas,
                x0,
                horizon,
            } => {
                let data = InitialData::new(x0.clone())?;
                Problem::CaputoIvp(CaputoIvp::new(*alpha, alphas.clone(), data, *horizon, rhs)?)
            }
            ProblemSpec::RlIvp { alpha, alphas, horizon } => {
                Problem::RlIvp(RlIvp::new(*alpha, alphas.clone(), *horizon, rhs)?)
            }
            ProblemSpec::Bvp {
                q,
                qs,
                a,
                b,
                eta1,
                eta2,
            } => {
                let bc = RobinBoundary::new(*a, *b, *eta1, *eta2)?;
                Problem::CaputoBvp(CaputoBvp::new(*q, qs.clone(), bc, rhs)?)
            }
        })
    }

    pub fn exact_y_fn(&self) -> Option<RhsFunction> {
        self.exact_y.as_deref().map(|s| exact_expression(s).expect("validated on load"))
    }

    pub fn exact_x_fn(&self) -> Option<RhsFunction> {
        self.exact_x.as_deref().map(|s| exact_expression(s).expect("validated on load"))
    }
}

fn exact_expression(src: &str) -> Result<RhsFunction, String> {
    let f = RhsFunction::parse(src, 0).map_err(|e| e.to_string())?;
    if !f.is_state_free() {
        return Err("exact solutions may only depend on t".into());
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    List(Vec<f64>),
    Word(String),
    Quoted(String),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::List(_) => "a list",
            Value::Word(_) => "a word",
            Value::Quoted(_) => "a quoted string",
        }
    }
}

struct Entry {
    line: usize,
    value: Value,
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_number(s: &str, line: usize) -> Result<f64, ConfigError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| at(line, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(at(line, format!("`{}` is not a finite number", s.trim())));
    }
    Ok(v)
}

fn parse_value(raw: &str, line: usize) -> Result<Value, ConfigError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(at(line, "missing value"));
    }
    if let Some(rest) = raw.strip_prefix('"') {
        let inner = rest
            .strip_suffix('"')
            .ok_or_else(|| at(line, "unterminated string"))?;
        if inner.contains('"') {
            return Err(at(line, "quoted strings cannot contain `\"`"));
        }
        return Ok(Value::Quoted(inner.to_string()));
    }
    if let Some(rest) = raw.strip_prefix('[') {
        let inner = rest.strip_suffix(']').ok_or_else(|| at(line, "unterminated list"))?;
        if inner.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        return inner
            .split(',')
            .map(|s| parse_number(s, line))
            .collect::<Result<_, _>>()
            .map(Value::List);
    }
    if raw.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
        return parse_number(raw, line).map(Value::Number);
    }
    if raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Value::Word(raw.to_string()));
    }
    Err(at(line, format!("cannot read value `{raw}`")))
}

const SOLVER_KEYS: [&str; 7] = [
    "N",
    "tol",
    "max_iter",
    "refinements",
    "lipschitz_box",
    "lipschitz_samples",
    "strict",
];

/// Parse and validate configuration text.
pub fn parse_config(text: &str) -> Result<ProblemConfig, ConfigError> {
    let mut problem: HashMap<String, Entry> = HashMap::new();
    let mut solver: HashMap<String, Entry> = HashMap::new();
    let mut in_solver = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw_line).trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') && !content.contains('=') {
            if content == "[solver]" {
                if in_solver {
                    return Err(at(line, "duplicate [solver] section"));
                }
                in_solver = true;
                continue;
            }
            return Err(at(line, format!("unknown section `{content}`")));
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| at(line, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(at(line, "missing key"));
        }
        let value = parse_value(value, line)?;
        let table = if in_solver {
            if !SOLVER_KEYS.contains(&key) {
                return Err(at(line, format!("unknown solver key `{key}`")));
            }
            &mut solver
        } else {
            &mut problem
        };
        if let Some(prev) = table.get(key) {
            return Err(at(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
        }
        table.insert(key.to_string(), Entry { line, value });
    }

    let kind_entry = problem
        .get("kind")
        .ok_or_else(|| ConfigError::File("missing field `kind`".into()))?;
    let kind = match &kind_entry.value {
        Value::Word(w) | Value::Quoted(w) => Kind::parse(w),
        _ => None,
    }
    .ok_or_else(|| at(kind_entry.line, "kind must be one of ivp_caputo, ivp_rl, bvp"))?;

    let mut keys: Vec<(&String, &Entry)> = problem.iter().collect();
    keys.sort_by_key(|(_, e)| e.line);
    for (key, entry) in keys {
        if key != "kind" && !kind.required().contains(&key.as_str()) && !kind.optional().contains(&key.as_str()) {
            return Err(at(entry.line, format!("field `{key}` does not apply to kind {}", kind.name())));
        }
    }
    for key in kind.required() {
        if !problem.contains_key(*key) {
            return Err(ConfigError::File(format!("missing field `{key}` for kind {}", kind.name())));
        }
    }

    let number = |key: &str| -> Result<f64, ConfigError> {
        let e = &problem[key];
        match &e.value {
            Value::Number(v) => Ok(*v),
            other => Err(at(e.line, format!("`{key}` must be a number, found {}", other.describe()))),
        }
    };
    let list = |key: &str| -> Result<Vec<f64>, ConfigError> {
        match problem.get(key) {
            None => Ok(Vec::new()),
            Some(e) => match &e.value {
                Value::List(v) => Ok(v.clone()),
                Value::Number(v) => Ok(vec![*v]),
                other => Err(at(e.line, format!("`{key}` must be a list, found {}", other.describe()))),
            },
        }
    };
    let string = |key: &str| -> Result<Option<(String, usize)>, ConfigError> {
        match problem.get(key) {
            None => Ok(None),
            Some(e) => match &e.value {
                Value::Quoted(s) => Ok(Some((s.clone(), e.line))),
                other => Err(at(e.line, format!("`{key}` must be a quoted string, found {}", other.describe()))),
            },
        }
    };
    let line_of = |key: &str| problem.get(key).map(|e| e.line).unwrap_or(0);

    let spec = match kind {
        Kind::IvpCaputo => ProblemSpec::CaputoIvp {
            alpha: number("alpha")?,
            alphas: list("alphas")?,
            x0: list("x0")?,
            horizon: number("T")?,
        },
        Kind::IvpRl => ProblemSpec::RlIvp {
            alpha: number("alpha")?,
            alphas: list("alphas")?,
            horizon: number("T")?,
        },
        Kind::Bvp => ProblemSpec::Bvp {
            q: number("q")?,
            qs: list("qs")?,
            a: number("A")?,
            b: number("B")?,
            eta1: number("eta1")?,
            eta2: number("eta2")?,
        },
    };
    let (rhs, rhs_line) = string("rhs")?.expect("required key checked");
    let exact_y = string("exact_y")?;
    let exact_x = string("exact_x")?;
    for (s, l) in exact_y.iter().chain(&exact_x) {
        exact_expression(s).map_err(|m| at(*l, m))?;
    }

    let solver = parse_solver(&solver, spec.arity())?;
    let config = ProblemConfig {
        spec,
        rhs,
        exact_y: exact_y.map(|(s, _)| s),
        exact_x: exact_x.map(|(s, _)| s),
        solver,
    };

    // Cross-field checks are the core constructors' own; anchor their
    // messages at the most relevant line.
    if let Err(e) = RhsFunction::parse(&config.rhs, config.spec.arity()) {
        return Err(at(rhs_line, format!("rhs: {e}")));
    }
    if let Err(e) = config.to_problem() {
        let anchor = match kind {
            Kind::IvpCaputo | Kind::IvpRl if problem.contains_key("alphas") => line_of("alphas"),
            Kind::IvpCaputo => line_of("alpha"),
            Kind::IvpRl => line_of("alpha"),
            Kind::Bvp => match e.to_string() {
                m if m.contains("A must be nonzero") => line_of("A"),
                _ if problem.contains_key("qs") => line_of("qs"),
                _ => line_of("q"),
            },
        };
        return Err(at(anchor, e.to_string()));
    }
    Ok(config)
}

fn parse_solver(table: &HashMap<String, Entry>, arity: usize) -> Result<SolverSettings, ConfigError> {
    let mut s = SolverSettings::default();
    let count = |key: &str, min: usize| -> Result<Option<usize>, ConfigError> {
        let Some(e) = table.get(key) else { return Ok(None) };
        match e.value {
            Value::Number(v) if v.fract() == 0.0 && v >= min as f64 && v <= u32::MAX as f64 => Ok(Some(v as usize)),
            _ => Err(at(e.line, format!("`{key}` must be an integer of at least {min}"))),
        }
    };
    if let Some(n) = count("N", 1)? {
        s.intervals = n;
    }
    if let Some(n) = count("max_iter", 1)? {
        s.max_iter = n;
    }
    if let Some(n) = count("refinements", 0)? {
        s.refinements = n;
    }
    if let Some(n) = count("lipschitz_samples", 0)? {
        s.lipschitz_samples = n;
    }
    if let Some(e) = table.get("tol") {
        match e.value {
            Value::Number(v) if v > 0.0 => s.tol = v,
            _ => return Err(at(e.line, "`tol` must be a positive number")),
        }
    }
    if let Some(e) = table.get("strict") {
        s.strict = match &e.value {
            Value::Word(w) if w == "true" => true,
            Value::Word(w) if w == "false" => false,
            _ => return Err(at(e.line, "`strict` must be true or false")),
        };
    }
    if let Some(e) = table.get("lipschitz_box") {
        let Value::List(v) = &e.value else {
            return Err(at(e.line, "`lipschitz_box` must be a list"));
        };
        let dim = arity + 1;
        if v.len() != 2 && v.len() != 2 * dim {
            return Err(at(
                e.line,
                format!("`lipschitz_box` needs 2 or {} entries, found {}", 2 * dim, v.len()),
            ));
        }
        let pairs: Vec<(f64, f64)> = v.chunks(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|(lo, hi)| lo > hi) {
            return Err(at(e.line, "`lipschitz_box` intervals must satisfy lo <= hi"));
        }
        s.lipschitz_box = pairs;
    }
    Ok(s)
}

pub fn load_config(path: &Path) -> Result<ProblemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn list_text(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

/// Render a configuration so that [`parse_config`] reads it back unchanged.
pub fn write_config(c: &ProblemConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind = {}", c.spec.kind().name());
    match &c.spec {
        ProblemSpec::CaputoIvp {
            alpha,
            alphas,
            x0,
            horizon,
        } => {
            let _ = writeln!(out, "alpha = {alpha:?}");
            let _ = writeln!(out, "alphas = {}", list_text(alphas));
            let _ = writeln!(out, "x0 = {}", list_text(x0));
            let _ = writeln!(out, "T = {horizon:?}");
        }
        ProblemSpec::RlIvp { alpha, alphas, horizon } => {
            let _ = writeln!(out, "alpha = {alpha:?}");
            let _ = writeln!(out, "alphas = {}", list_text(alphas));
            let _ = writeln!(out, "T = {horizon:?}");
        }
        ProblemSpec::Bvp {
            q,
            qs,
            a,
            b,
            eta1,
            eta2,
        } => {
            let _ = writeln!(out, "q = {q:?}");
            let _ = writeln!(out, "qs = {}", list_text(qs));
            let _ = writeln!(out, "A = {a:?}");
            let _ = writeln!(out, "B = {b:?}");
            let _ = writeln!(out, "eta1 = {eta1:?}");
            let _ = writeln!(out, "eta2 = {eta2:?}");
        }
    }
    let _ = writeln!(out, "rhs = \"{}\"", c.rhs);
    if let Some(s) = &c.exact_y {
        let _ = writeln!(out, "exact_y = \"{s}\"");
    }
    if let Some(s) = &c.exact_x {
        let _ = writeln!(out, "exact_x = \"{s}\"");
    }
    let s = &c.solver;
    let flat: Vec<f64> = s.lipschitz_box.iter().flat_map(|&(lo, hi)| [lo, hi]).collect();
    let _ = writeln!(out, "\n[solver]");
    let _ = writeln!(out, "N = {}", s.intervals);
    let _ = writeln!(out, "tol = {:?}", s.tol);
    let _ = writeln!(out, "max_iter = {}", s.max_iter);
    let _ = writeln!(out, "refinements = {}", s.refinements);
    let _ = writeln!(out, "lipschitz_box = {}", list_text(&flat));
    let _ = writeln!(out, "lipschitz_samples = {}", s.lipschitz_samples);
    let _ = writeln!(out, "strict = {}", s.strict);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "kind = ivp_caputo\nalpha = 0.5\nx0 = [1]\nT = 1\nrhs = \"x\"\n\n[solver]\nN = 64\n";

    #[test]
    fn minimal_file_loads() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(
            c.spec,
            ProblemSpec::CaputoIvp {
                alpha: 0.5,
                alphas: vec![],
                x0: vec![1.0],
                horizon: 1.0
            }
        );
        assert_eq!(c.solver.intervals, 64);
        assert_eq!(c.solver.tol, 1e-12);
        assert!(c.to_problem().is_ok());
    }

    #[test]
    fn comments_and_quotes() {
        let text = "# header\nkind = ivp_rl # trailing\nalpha = 0.9\nalphas = [0.3]\nT = 2\nrhs = \"x + d1 # not a comment\"\n";
        let err = parse_config(text).unwrap_err();
        // `#` inside quotes belongs to the expression, which then fails to parse
        assert!(matches!(err, ConfigError::Line { line: 6, .. }), "{err}");
        let text = "kind = ivp_rl # trailing\nalpha = 0.9\nalphas = [0.3]\nT = 2\nrhs = \"x + d1\" # comment\n";
        assert!(parse_config(text).is_ok());
    }

    #[test]
    fn descending_chain_is_enforced() {
        let text = "kind = ivp_caputo\nalpha = 1.2\nalphas = [0.5, 0.7]\nx0 = [0, 0]\nT = 1\nrhs = \"x\"\n";
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, ConfigError::Line { line: 3, .. }));
        assert!(err.to_string().contains("order chain not descending"), "{err}");
    }

    #[test]
    fn bvp_needs_nonzero_a() {
        let text = "kind = bvp\nq = 1.5\nA = 0\nB = 1\neta1 = 0\neta2 = 0\nrhs = \"x\"\n";
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, ConfigError::Line { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("A must be nonzero"), "{err}");
    }

    #[test]
    fn field_errors() {
        let missing = "kind = bvp\nq = 1.5\nA = 1\nB = 1\neta1 = 0\nrhs = \"x\"\n";
        assert_eq!(
            parse_config(missing).unwrap_err(),
            ConfigError::File("missing field `eta2` for kind bvp".into())
        );
        let extra = "kind = ivp_rl\nalpha = 0.5\nT = 1\nx0 = [0]\nrhs = \"x\"\n";
        assert!(matches!(parse_config(extra).unwrap_err(), ConfigError::Line { line: 4, .. }));
        let dup = "kind = ivp_rl\nalpha = 0.5\nalpha = 0.6\nT = 1\nrhs = \"x\"\n";
        assert!(matches!(parse_config(dup).unwrap_err(), ConfigError::Line { line: 3, .. }));
        let bad_solver = "kind = ivp_rl\nalpha = 0.5\nT = 1\nrhs = \"x\"\n[solver]\nN = 2.5\n";
        assert!(matches!(parse_config(bad_solver).unwrap_err(), ConfigError::Line { line: 6, .. }));
        let unknown = "kind = ivp_rl\nalpha = 0.5\nT = 1\nrhs = \"x\"\n[solver]\nspeed = 3\n";
        assert!(matches!(parse_config(unknown).unwrap_err(), ConfigError::Line { line: 6, .. }));
        let arity = "kind = ivp_rl\nalpha = 0.5\nT = 1\nrhs = \"x + d1\"\n";
        assert!(matches!(parse_config(arity).unwrap_err(), ConfigError::Line { line: 4, .. }));
        let bad_exact = "kind = ivp_rl\nalpha = 0.5\nT = 1\nrhs = \"x\"\nexact_y = \"x\"\n";
        assert!(matches!(parse_config(bad_exact).unwrap_err(), ConfigError::Line { line: 5, .. }));
        let nan = "kind = ivp_rl\nalpha = NaN\nT = 1\nrhs = \"x\"\n";
        assert!(parse_config(nan).is_err());
        let boxed = "kind = ivp_rl\nalpha = 0.5\nalphas = [0.2]\nT = 1\nrhs = \"x\"\n[solver]\nlipschitz_box = [0, 1, 2]\n";
        assert!(matches!(parse_config(boxed).unwrap_err(), ConfigError::Line { line: 7, .. }));
    }

    #[test]
    fn per_argument_box() {
        let text = "kind = ivp_rl\nalpha = 0.5\nalphas = [0.2]\nT = 1\nrhs = \"x\"\n[solver]\nlipschitz_box = [0, 1, -2, 2]\nstrict = true\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.solver.lipschitz_box, vec![(0.0, 1.0), (-2.0, 2.0)]);
        assert!(c.solver.strict);
    }

    #[test]
    fn written_text_reads_back() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&write_config(&c)).unwrap(), c);
    }
}
