//! Closed-form fractional calculus on power functions and polynomials.
//!
//! Everything here is exact up to the accuracy of [`gamma_fn`]: the
//! Riemann–Liouville integral and derivative of `t^γ`, the Taylor polynomial
//! built from initial data, and the Riemann–Liouville derivative of its tail.

use std::f64::consts::PI;

use crate::error::KernelError;

const LANCZOS_G: f64 = 607.0 / 128.0;

// Godfrey's coefficients for g = 607/128, n = 15.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

// Beyond this argument Γ overflows f64.
const GAMMA_OVERFLOW: f64 = 171.624_376_956_302_7;

/// Lanczos approximation, used on the reduced interval [1, 2].
fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let base = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * base.powf(z + 0.5) * (-base).exp() * series
}

/// `sin(πx)` with argument reduction done before the multiplication by π,
/// so that it vanishes exactly at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ for arguments known to be in the domain (no pole check).
fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x > GAMMA_OVERFLOW {
        return f64::INFINITY;
    }
    if x == x.round() {
        // (x-1)!, exact up to 22!
        return (2..x as u32).fold(1.0, |f, k| f * k as f64);
    }
    // Reduce into [1, 2]; each `x - 1.0` is exact for x >= 1.
    let mut scale = 1.0;
    let mut z = x;
    while z > 2.0 {
        z -= 1.0;
        scale *= z;
    }
    if z < 1.0 {
        scale /= z;
        z += 1.0;
    }
    scale * lanczos(z)
}

/// Euler's gamma function.
///
/// Relative accuracy is better than `1e-13` on `(0, 30]`. Arguments that are
/// nonpositive integers are poles and return [`KernelError::Pole`].
pub fn gamma_fn(x: f64) -> Result<f64, KernelError> {
    if x.is_nan() {
        return Err(KernelError::Domain("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(KernelError::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

/// Reciprocal gamma `1/Γ(x)`, an entire function: exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    // Arguments within a few ulps of a nonpositive integer are snapped onto it.
    let nearest = x.round();
    if nearest <= 0.0 && (x - nearest).abs() <= 8.0 * f64::EPSILON * nearest.abs().max(1.0) {
        return 0.0;
    }
    if x > GAMMA_OVERFLOW {
        return 0.0;
    }
    1.0 / gamma_unchecked(x)
}

/// A single power-law term `coefficient · t^exponent` with `exponent > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coefficient: f64, exponent: f64) -> Result<Self, KernelError> {
        if !exponent.is_finite() || exponent <= -1.0 {
            return Err(KernelError::Domain(format!(
                "power exponent must exceed -1, got {exponent}"
            )));
        }
        if !coefficient.is_finite() {
            return Err(KernelError::Domain("power coefficient must be finite".into()));
        }
        Ok(Self {
            coefficient,
            exponent,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficient * t.powf(self.exponent)
    }

    /// `I^α` of this term, again a power term.
    pub fn integrate(&self, alpha: f64) -> Result<PowerTerm, KernelError> {
        check_order(alpha)?;
        let gamma = self.exponent;
        Ok(PowerTerm {
            coefficient: self.coefficient * gamma_ratio(gamma + 1.0, gamma + 1.0 + alpha),
            exponent: gamma + alpha,
        })
    }

    /// Riemann–Liouville `D^α` of this term. The result may carry a zero
    /// coefficient when `γ - α` is a negative integer.
    pub fn differentiate(&self, alpha: f64) -> Result<PowerTerm, KernelError> {
        check_order(alpha)?;
        let gamma = self.exponent;
        Ok(PowerTerm {
            coefficient: self.coefficient * gamma_unchecked(gamma + 1.0) * rgamma(gamma + 1.0 - alpha),
            exponent: gamma - alpha,
        })
    }
}

/// `Γ(a)/Γ(b)` for positive `a`, `b`.
fn gamma_ratio(a: f64, b: f64) -> f64 {
    gamma_unchecked(a) * rgamma(b)
}

fn check_order(alpha: f64) -> Result<(), KernelError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("order must be positive, got {alpha}")))
    }
}

fn check_exponent(gamma: f64) -> Result<(), KernelError> {
    if gamma > -1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("exponent must exceed -1, got {gamma}")))
    }
}

fn check_time(t: f64) -> Result<(), KernelError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("time must be nonnegative, got {t}")))
    }
}

/// Riemann–Liouville integral `I^α t^γ = Γ(γ+1)/Γ(γ+1+α) · t^{γ+α}`.
pub fn frac_integral_power(alpha: f64, gamma: f64, t: f64) -> Result<f64, KernelError> {
    check_order(alpha)?;
    check_exponent(gamma)?;
    check_time(t)?;
    let exponent = gamma + alpha;
    if t == 0.0 && exponent < 0.0 {
        return Err(KernelError::Domain(format!(
            "I^{alpha} t^{gamma} is unbounded at t = 0"
        )));
    }
    Ok(gamma_ratio(gamma + 1.0, exponent + 1.0) * t.powf(exponent))
}

/// Riemann–Liouville derivative `D^α t^γ = Γ(γ+1)/Γ(γ+1-α) · t^{γ-α}`.
///
/// When `γ + 1 - α` is a pole of Γ the result is exactly zero for every `t`.
pub fn rl_derivative_power(alpha: f64, gamma: f64, t: f64) -> Result<f64, KernelError> {
    check_order(alpha)?;
    check_exponent(gamma)?;
    check_time(t)?;
    let coefficient = gamma_unchecked(gamma + 1.0) * rgamma(gamma + 1.0 - alpha);
    if coefficient == 0.0 {
        return Ok(0.0);
    }
    let exponent = gamma - alpha;
    if t == 0.0 {
        if exponent < 0.0 {
            return Err(KernelError::Domain(format!(
                "D^{alpha} t^{gamma} is singular at t = 0"
            )));
        }
        return Ok(if exponent == 0.0 { coefficient } else { 0.0 });
    }
    Ok(coefficient * t.powf(exponent))
}

/// Initial values `x_k⁰`, `k = 0..n-1`, for a Caputo problem of order `n-1 < α ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    values: Vec<f64>,
}

impl InitialData {
    pub fn new(values: Vec<f64>) -> Result<Self, KernelError> {
        if values.is_empty() {
            return Err(KernelError::Domain("initial data needs at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::Domain("initial data must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Σ_{k<n} x_k⁰ t^k / k!`.
pub fn initial_polynomial(data: &InitialData, t: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for (k, &x) in data.values.iter().enumerate() {
        if k > 0 {
            term *= t / k as f64;
        }
        acc += x * term;
    }
    acc
}

/// Riemann–Liouville derivative of order `α_i` of the Taylor tail
/// `Σ_{k=n_i}^{n-1} x_k⁰ t^k / k!`, where `n_i = ⌈α_i⌉`.
pub fn caputo_tail_derivative(
    alpha_i: f64,
    n_i: usize,
    data: &InitialData,
    t: f64,
) -> Result<f64, KernelError> {
    check_order(alpha_i)?;
    let n_i_f = n_i as f64;
    if !(n_i_f - 1.0 < alpha_i && alpha_i <= n_i_f) {
        return Err(KernelError::Domain(format!(
            "order {alpha_i} is not in ({}, {n_i}]",
            n_i_f - 1.0
        )));
    }
    if n_i > data.len() {
        return Err(KernelError::Domain(format!(
            "derivative index {n_i} exceeds initial data length {}",
            data.len()
        )));
    }
    let mut acc = 0.0;
    let mut factorial = (1..n_i).fold(1.0, |f, k| f * k as f64);
    for k in n_i..data.len() {
        if k > 0 {
            factorial *= k as f64;
        }
        let x = data.values[k];
        if x == 0.0 {
            continue;
        }
        // k >= n_i >= α_i, so every active term is bounded at t = 0.
        debug_assert!(k as f64 >= alpha_i);
        acc += x / factorial * rl_derivative_power(alpha_i, k as f64, t)?;
    }
    Ok(acc)
}
