use thiserror::Error;

/// Domain violations raised by the closed-form fractional calculus formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Failures of the expression language, either while parsing or while evaluating.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `d{index}` at byte {offset} exceeds arity {arity}")]
    ArityExceeded {
        offset: usize,
        index: usize,
        arity: usize,
    },
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("expected {expected} state arguments, got {got}")]
    ArgumentCount { expected: usize, got: usize },
}

/// Errors raised while reducing or solving a problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("fixed-point iteration did not converge at node {node} (t = {t}) after {iterations} iterations; last update {last_delta:e}")]
    NodeNotConverged {
        node: usize,
        t: f64,
        iterations: usize,
        last_delta: f64,
    },
    #[error("Picard sweep did not converge after {sweeps} sweeps; last update {last_delta:e}, observed contraction ratio {ratio:.4}")]
    SweepNotConverged {
        sweeps: usize,
        last_delta: f64,
        ratio: f64,
    },
    #[error("contraction constant {constant:.4} >= 1 with strict contraction enabled")]
    NotContractive { constant: f64 },
    #[error("right-hand side evaluation failed at t = {t}: {source}")]
    Rhs {
        t: f64,
        #[source]
        source: ExprError,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Crate-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
