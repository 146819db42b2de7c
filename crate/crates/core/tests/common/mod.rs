//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls into the crate under test: gamma values come from
//! `statrs`, integrals from adaptive Gauss–Kronrod quadrature.
#![allow(dead_code, clippy::excessive_precision)]

use statrs::function::gamma::gamma;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let x = r * XGK[k];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Global adaptive refinement: always bisect the interval with the largest
/// error estimate, up to a fixed budget.
fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(f, a, b))];
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2 .1).sum();
        if total <= tol {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        parts.push((lo, mid, gk15(f, lo, mid)));
        parts.push((mid, hi, gk15(f, mid, hi)));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in parts.iter().map(|p| p.2 .0) {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`, split at `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let share = tol / (pts.len() - 1) as f64;
    pts.windows(2).map(|w| adapt(&f, w[0], w[1], share)).sum()
}

/// `(1/Γ(α)) ∫_0^t (t-τ)^{α-1} g(τ) dτ`.
///
/// Split at `t/2`. On the right half `v = (t-τ)^α/α` removes the kernel
/// singularity; on the left half `τ = (t/2) w^M` flattens integrable power
/// singularities of `g` at `τ = 0` down to exponent `-0.9`.
pub fn rl_integral<G: Fn(f64) -> f64>(alpha: f64, g: G, t: f64, breaks: &[f64]) -> f64 {
    const M: f64 = 10.0;
    if t == 0.0 {
        return 0.0;
    }
    let half = 0.5 * t;
    let tol = 1e-14 * (1.0 + t.powf(alpha));

    let vmax = half.powf(alpha) / alpha;
    let tau_right = |v: f64| t - (alpha * v).powf(1.0 / alpha);
    let vbreaks: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > half && b < t)
        .map(|&b| (t - b).powf(alpha) / alpha)
        .collect();
    let right = integrate(|v| g(tau_right(v)), 0.0, vmax, &vbreaks, tol);

    let wbreaks: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > 0.0 && b < half)
        .map(|&b| (b / half).powf(1.0 / M))
        .collect();
    let left = integrate(
        |w: f64| {
            let tau = half * w.powf(M);
            (t - tau).powf(alpha - 1.0) * g(tau) * half * M * w.powf(M - 1.0)
        },
        0.0,
        1.0,
        &wbreaks,
        tol,
    );
    (left + right) / gamma(alpha)
}

/// `∫_0^1 (1-s)^{μ-1} g(s) ds`, singular at `s = 1` for `μ < 1`.
pub fn right_moment<G: Fn(f64) -> f64>(mu: f64, g: G, breaks: &[f64]) -> f64 {
    rl_integral(mu, g, 1.0, breaks) * gamma(mu)
}

/// Caputo derivative of order `q ∈ (n-1, n)` given the `n`-th derivative.
pub fn caputo<G: Fn(f64) -> f64>(q: f64, nth_derivative: G, t: f64, breaks: &[f64]) -> f64 {
    let n = q.ceil();
    rl_integral(n - q, nth_derivative, t, breaks)
}

/// `E_{a}(z) = Σ z^k / Γ(ak + 1)`, truncated.
pub fn mittag_leffler(a: f64, z: f64, terms: usize) -> f64 {
    (0..terms).map(|k| z.powi(k as i32) / gamma(a * k as f64 + 1.0)).sum()
}

pub fn gamma_ref(x: f64) -> f64 {
    gamma(x)
}

/// Seeded generator for sampling test inputs.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
