//! Continuous piecewise-linear splines on a uniform grid.
//!
//! Besides evaluation and interpolation this module integrates splines
//! exactly with the Riemann–Liouville kernel `(t-τ)^{α-1}/Γ(α)`. At grid
//! nodes the integral is a convolution with precomputed product-integration
//! weights; between nodes each segment is integrated in closed form.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::KernelError;
use crate::kernel::{gamma_fn, rgamma};
use crate::sum::CompensatedSum;

/// Partition `0 = t_0 < t_1 < … < t_N = T` with `t_i = i·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    horizon: f64,
    intervals: usize,
}

impl UniformGrid {
    pub fn new(horizon: f64, intervals: usize) -> Result<Self, KernelError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(KernelError::Domain(format!(
                "grid horizon must be positive, got {horizon}"
            )));
        }
        if intervals == 0 {
            return Err(KernelError::Domain("grid needs at least one subinterval".into()));
        }
        Ok(Self { horizon, intervals })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.horizon
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(|i| self.node(i))
    }

    /// Same horizon, twice as many subintervals.
    pub fn refined(&self) -> Self {
        Self {
            horizon: self.horizon,
            intervals: 2 * self.intervals,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        (0.0..=self.horizon).contains(&t)
    }

    /// Nodes plus `per_interval` equally spaced interior points in every
    /// subinterval, sorted.
    pub fn probe_points(&self, per_interval: usize) -> Vec<f64> {
        let h = self.step();
        let mut out = Vec::with_capacity(self.intervals * (per_interval + 1) + 1);
        for i in 0..self.intervals {
            let t0 = self.node(i);
            out.push(t0);
            for k in 1..=per_interval {
                out.push(t0 + h * k as f64 / (per_interval + 1) as f64);
            }
        }
        out.push(self.horizon);
        out
    }

    fn check_time(&self, t: f64) -> Result<(), KernelError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(KernelError::Domain(format!(
                "t = {t} lies outside [0, {}]",
                self.horizon
            )))
        }
    }
}

/// Element of S_1: nodal values `y_0..y_N` joined linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSpline {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl LinearSpline {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self, KernelError> {
        if values.len() != grid.intervals + 1 {
            return Err(KernelError::Domain(format!(
                "spline on {} subintervals needs {} values, got {}",
                grid.intervals,
                grid.intervals + 1,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: UniformGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.intervals + 1],
        }
    }

    /// Interpolation projection `P_N f`.
    pub fn interpolate<F, E>(grid: UniformGrid, mut f: F) -> Result<Self, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let values = grid.nodes().map(&mut f).collect::<Result<Vec<_>, E>>()?;
        Ok(Self { grid, values })
    }

    /// Infallible variant of [`LinearSpline::interpolate`].
    pub fn interpolate_fn<F: FnMut(f64) -> f64>(grid: UniformGrid, mut f: F) -> Self {
        Self {
            grid,
            values: grid.nodes().map(&mut f).collect(),
        }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn eval(&self, t: f64) -> Result<f64, KernelError> {
        self.grid.check_time(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let n = self.grid.intervals;
        let h = self.grid.step();
        let nearest = ((t / h).round() as usize).min(n);
        if self.grid.node(nearest) == t {
            return self.values[nearest];
        }
        let i = ((t / h).floor() as usize).min(n - 1);
        let theta = (t - self.grid.node(i)) / h;
        let (a, b) = (self.values[i], self.values[i + 1]);
        a + theta * (b - a)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `I^α` of the spline at every node, `entry[0] = 0`.
    pub fn frac_integral_at_nodes(&self, alpha: f64) -> Result<Vec<f64>, KernelError> {
        let table = WeightCache::global().get(alpha, self.grid.intervals)?;
        Ok((0..=self.grid.intervals)
            .map(|i| table.apply(self.grid.step(), i, &self.values))
            .collect())
    }

    /// Exact `I^α` of the spline at an arbitrary `t ∈ [0, T]`.
    pub fn frac_integral_at(&self, alpha: f64, t: f64) -> Result<f64, KernelError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(KernelError::Domain(format!("order must be positive, got {alpha}")));
        }
        self.grid.check_time(t)?;
        Ok(self.frac_integral_unchecked(alpha, t))
    }

    pub(crate) fn frac_integral_unchecked(&self, alpha: f64, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let h = self.grid.step();
        let mut acc = CompensatedSum::new();
        for j in 0..self.grid.intervals {
            let t0 = self.grid.node(j);
            if t0 >= t {
                break;
            }
            let t1 = self.grid.node(j + 1).min(t);
            let y0 = self.values[j];
            let y1 = y0 + (self.values[j + 1] - y0) * ((t1 - t0) / h);
            acc.add(segment_integral(alpha, t - t1, t1 - t0, y0, y1));
        }
        acc.value() * rgamma(alpha)
    }

    /// `∫_0^T (T-s)^{μ-1} y(s) ds`, the kernel moment anchored at the right end.
    pub fn right_moment(&self, mu: f64) -> Result<f64, KernelError> {
        let table = WeightCache::global().get(mu, self.grid.intervals)?;
        let n = self.grid.intervals;
        Ok(gamma_fn(mu)? * table.apply(self.grid.step(), n, &self.values))
    }
}

/// `∫_lo^{lo+d} u^{α-1} y(u) du` where `y` is linear with `y(lo+d) = far`
/// and `y(lo) = near`.
pub(crate) fn segment_integral(alpha: f64, lo: f64, d: f64, far: f64, near: f64) -> f64 {
    if lo == 0.0 {
        let da = d.powf(alpha);
        return (far / (alpha + 1.0) + near / (alpha * (alpha + 1.0))) * da;
    }
    // with u = lo (1 + x), x ∈ [0, r]:
    //   far-end weight  lo^{α+1}/d ∫_0^r (1+x)^{α-1} x dx
    //   near-end weight lo^{α+1}/d ∫_0^r (1+x)^{α-1} (r-x) dx
    let r = d / lo;
    let (f_far, f_near) = if r < 0.5 {
        // Σ C(α-1, m) r^{m+2} / (m+2) and Σ C(α-1, m) r^{m+2} / ((m+1)(m+2))
        let mut binom = 1.0;
        let mut rp = r * r;
        let (mut a, mut b) = (0.0, 0.0);
        for m in 0..80 {
            if m > 0 {
                binom *= (alpha - m as f64) / m as f64;
                rp *= r;
            }
            let mf = m as f64;
            let ta = binom * rp / (mf + 2.0);
            a += ta;
            b += ta / (mf + 1.0);
            if ta.abs() <= 1e-17 * a.abs() {
                break;
            }
        }
        (a, b)
    } else {
        let pa = (1.0 + r).powf(alpha);
        let first = ((1.0 + r) * pa - 1.0) / (alpha + 1.0) - (pa - 1.0) / alpha;
        (first, r * (pa - 1.0) / alpha - first)
    };
    lo.powf(alpha) / r * (far * f_far + near * f_near)
}

/// `k^p · Σ_{m ≥ 2} c_m C(p, m) k^{-m}` with `c_m` picking the terms of a
/// binomial expansion. Converges for `k ≥ 2`; the leading terms share a sign,
/// so there is no cancellation between large powers.
fn binomial_tail(p: f64, k: usize, pick: impl Fn(usize) -> f64) -> f64 {
    let x = 1.0 / k as f64;
    let mut binom = p;
    let mut xm = x;
    let mut acc = CompensatedSum::new();
    for m in 2..400 {
        binom *= (p - (m - 1) as f64) / m as f64;
        xm *= x;
        let c = pick(m);
        if c == 0.0 {
            continue;
        }
        let term = c * binom * xm;
        acc.add(term);
        if binom == 0.0 || term.abs() <= 1e-18 * acc.value().abs() {
            break;
        }
    }
    (k as f64).powf(p) * acc.value()
}

/// Integer `p` with `(k+1)^p` exactly representable: the differences are
/// then exact in floating point.
fn exact_powers(p: f64, k: usize) -> bool {
    p.fract() == 0.0 && (k as f64 + 1.0).powf(p) < 9.007_199_254_740_992e15
}

/// `(k+1)^p - 2k^p + (k-1)^p`
fn second_difference(p: f64, k: usize) -> f64 {
    if k == 1 {
        return 2f64.powf(p) - 2.0;
    }
    if exact_powers(p, k) {
        let k = k as f64;
        return (k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).powf(p);
    }
    binomial_tail(p, k, |m| if m % 2 == 0 { 2.0 } else { 0.0 })
}

/// `(i-1)^p - (i-p) i^{p-1}`
fn first_column(p: f64, i: usize) -> f64 {
    if i == 1 {
        return p - 1.0;
    }
    if exact_powers(p, i) {
        let i = i as f64;
        return (i - 1.0).powf(p) - (i - p) * i.powf(p - 1.0);
    }
    binomial_tail(p, i, |m| if m % 2 == 0 { 1.0 } else { -1.0 })
}

/// Product-integration weights for `I^α` of a linear spline on a unit-step
/// grid. Row `i` reads `w_{i,j} = h^α/Γ(α+2) · a_{i,j}`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    alpha: f64,
    scale: f64,
    // a_{i,j} for 0 < j < i depends only on i - j
    interior: Vec<f64>,
    // a_{i,0}
    first: Vec<f64>,
}

impl WeightTable {
    pub fn new(alpha: f64, max_row: usize) -> Result<Self, KernelError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(KernelError::Domain(format!("order must be positive, got {alpha}")));
        }
        let p = alpha + 1.0;
        let interior = (0..=max_row)
            .map(|k| if k == 0 { 1.0 } else { second_difference(p, k) })
            .collect();
        let first = (0..=max_row)
            .map(|i| if i == 0 { 0.0 } else { first_column(p, i) })
            .collect();
        Ok(Self {
            alpha,
            scale: rgamma(alpha + 2.0),
            interior,
            first,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_row(&self) -> usize {
        self.interior.len() - 1
    }

    /// `h^α/Γ(α+2)`
    pub fn factor(&self, h: f64) -> f64 {
        h.powf(self.alpha) * self.scale
    }

    /// Unscaled coefficient `a_{i,j}`.
    #[inline]
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i && i <= self.max_row());
        if j == i {
            1.0
        } else if j == 0 {
            self.first[i]
        } else {
            self.interior[i - j]
        }
    }

    /// Weights `w_{i,0..=i}`; empty for `i = 0`.
    pub fn row(&self, h: f64, i: usize) -> Vec<f64> {
        if i == 0 {
            return Vec::new();
        }
        let c = self.factor(h);
        (0..=i).map(|j| c * self.coefficient(i, j)).collect()
    }

    /// `Σ_{j<i} w_{i,j} y_j`, the history part of row `i`.
    pub fn lag(&self, h: f64, i: usize, values: &[f64]) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let mut acc = CompensatedSum::new();
        acc.add(self.first[i] * values[0]);
        for (j, v) in values.iter().enumerate().take(i).skip(1) {
            acc.add(self.interior[i - j] * v);
        }
        self.factor(h) * acc.value()
    }

    /// `w_{i,i}`
    pub fn diagonal(&self, h: f64, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.factor(h)
        }
    }

    /// `Σ_{j≤i} w_{i,j} y_j`
    pub fn apply(&self, h: f64, i: usize, values: &[f64]) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let mut acc = CompensatedSum::new();
        acc.add(values[i]);
        acc.add(self.first[i] * values[0]);
        for (j, v) in values.iter().enumerate().take(i).skip(1) {
            acc.add(self.interior[i - j] * v);
        }
        self.factor(h) * acc.value()
    }
}

/// Weight tables shared across solves, keyed by the bit pattern of `α`.
#[derive(Debug, Default)]
pub struct WeightCache {
    tables: Mutex<HashMap<u64, Arc<WeightTable>>>,
}

impl WeightCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static WeightCache {
        static CACHE: OnceLock<WeightCache> = OnceLock::new();
        CACHE.get_or_init(WeightCache::new)
    }

    /// A table for `α` with at least `max_row + 1` rows.
    pub fn get(&self, alpha: f64, max_row: usize) -> Result<Arc<WeightTable>, KernelError> {
        let key = alpha.to_bits();
        let mut tables = self.tables.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = tables.get(&key) {
            if t.max_row() >= max_row {
                return Ok(Arc::clone(t));
            }
        }
        let rows = tables
            .get(&key)
            .map_or(max_row, |t| max_row.max(2 * t.max_row()));
        let table = Arc::new(WeightTable::new(alpha, rows)?);
        tables.insert(key, Arc::clone(&table));
        Ok(table)
    }
}

/// Convenience wrapper returning `w_{i,0..=i}` for step `h`.
pub fn frac_integral_weights(alpha: f64, h: f64, i: usize) -> Result<Vec<f64>, KernelError> {
    Ok(WeightCache::global().get(alpha, i)?.row(h, i))
}

/// Sampled modulus of continuity `ω(f, h)` on `[0, T]`.
///
/// Pairs are drawn from a uniform `samples`-point grid, so the result is a
/// lower bound on the true modulus.
pub fn modulus_of_continuity<F: Fn(f64) -> f64>(f: F, horizon: f64, h: f64, samples: usize) -> f64 {
    let samples = samples.max(2);
    let delta = horizon / (samples - 1) as f64;
    let values: Vec<f64> = (0..samples)
        .map(|k| f(if k == samples - 1 { horizon } else { k as f64 * delta }))
        .collect();
    let reach = ((h / delta) * (1.0 + 1e-12)).floor() as usize;
    let mut omega = 0.0_f64;
    for a in 0..samples {
        for b in (a + 1)..samples.min(a + reach + 1) {
            omega = omega.max((values[b] - values[a]).abs());
        }
    }
    omega
}
