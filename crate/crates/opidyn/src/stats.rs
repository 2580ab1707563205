//! Empirical-distribution utilities: Kolmogorov-Smirnov and Wasserstein-1
//! distances against a reference CDF, empirical characteristic functions,
//! and CDF construction from a density series by cumulative quadrature.
//!
//! KS acceptance thresholds used in the test suites come from the
//! asymptotic Kolmogorov distribution: the one-sample 99% critical value is
//! `1.628/sqrt(n)`, the two-sample one `1.628 sqrt((n+m)/(n m))`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::DensitySeries;
use crate::error::{Error, Result};
use crate::quad;

/// Statistical distances between an empirical sample and a reference.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub ks_distance: f64,
    pub wasserstein1: f64,
    pub cf_sup_error: f64,
    pub sample_count: usize,
    pub reference: String,
}

fn sorted_copy(sample: &[f64]) -> Vec<f64> {
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    xs
}

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF
/// (both one-sided deviations).
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted_copy(sample);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted_copy(a);
    let ys = sorted_copy(b);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(d)
}

/// Empirical characteristic function `(1/n) sum exp(i xi x_j)` per grid point.
pub fn empirical_cf(sample: &[f64], xi_grid: &[f64]) -> Result<Vec<Complex64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    Ok(xi_grid
        .iter()
        .map(|&xi| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in sample {
                let (s, c) = (xi * x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect())
}

/// Evaluable reference CDF built from a density series by cumulative
/// quadrature with monotone (PCHIP) interpolation between knots.
#[derive(Debug, Clone)]
pub struct ReferenceCdf {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl ReferenceCdf {
    /// Cumulative quadrature of a symmetric density on `[0, cutoff]`,
    /// geometrically refined near 0 where the density varies fastest. The
    /// interpolant is cubic Hermite with the density itself as the exact
    /// CDF slope, limited where needed to stay monotone.
    pub fn from_density<F: Fn(f64) -> f64>(density: F, cutoff: f64) -> Self {
        let mut knots = vec![0.0f64];
        let mut w = (cutoff / 16384.0).min(0.005);
        let mut x = w;
        while x < cutoff {
            knots.push(x);
            w *= 1.06;
            x += w;
        }
        knots.push(cutoff);
        // one-sided cumulative integral G(x) = int_0^x density
        let mut g = vec![0.0f64];
        for pair in knots.windows(2) {
            let inc = quad::integrate(&density, pair[0], pair[1], 1e-12);
            g.push(g.last().unwrap() + inc.max(0.0));
        }
        // mirror to the full line: F(x) = 1/2 + sign(x) G(|x|), normalized
        // by the mass actually captured
        let half = *g.last().unwrap();
        let total = 2.0 * half;
        let n = 2 * knots.len() - 1;
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for i in (1..knots.len()).rev() {
            xs.push(-knots[i]);
            ys.push((half - g[i]) / total);
            slopes.push(density(knots[i]).max(0.0) / total);
        }
        for (i, &k) in knots.iter().enumerate() {
            xs.push(k);
            ys.push((half + g[i]) / total);
            slopes.push(density(k).max(0.0) / total);
        }
        // monotonicity limiter: slope at a knot at most 3x the adjacent
        // secants (de Boor's sufficient condition)
        for i in 0..n {
            let mut bound = f64::INFINITY;
            if i > 0 {
                bound = bound.min(3.0 * (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
            }
            if i + 1 < n {
                bound = bound.min(3.0 * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
            }
            slopes[i] = slopes[i].min(bound.max(0.0));
        }
        ReferenceCdf { xs, ys, slopes }
    }

    /// Build from a stationary density series over its tail-bound support.
    pub fn from_series(series: &DensitySeries) -> Self {
        Self::from_density(|x| series.eval(x), series.tail_cutoff())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.xs[lo + 1] - self.xs[lo];
        let t = (x - self.xs[lo]) / h;
        let (y0, y1) = (self.ys[lo], self.ys[lo + 1]);
        let (m0, m1) = (self.slopes[lo] * h, self.slopes[lo + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }
}

/// Wasserstein-1 distance: integral of `|F_hat - F|` between the empirical
/// and reference CDFs, including both tails.
pub fn wasserstein1<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted_copy(sample);
    let n = xs.len();
    let mut total = 0.0;
    // left tail: F below the smallest observation
    total += tail_integral(&cdf, xs[0], true);
    // right tail: 1 - F above the largest
    total += tail_integral(&cdf, xs[n - 1], false);
    for i in 0..n - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        if a == b {
            continue;
        }
        let level = (i + 1) as f64 / n as f64;
        let (fa, fb) = (cdf(a), cdf(b));
        if (fa - level) * (fb - level) < 0.0 {
            // F crosses the empirical level inside the gap: split there
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (cdf(mid) - level) * (fa - level) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c = 0.5 * (lo + hi);
            total += quad::integrate(|x| (cdf(x) - level).abs(), a, c, 1e-10);
            total += quad::integrate(|x| (cdf(x) - level).abs(), c, b, 1e-10);
        } else {
            total += quad::integrate(|x| (cdf(x) - level).abs(), a, b, 1e-10);
        }
    }
    Ok(total)
}

fn tail_integral<F: Fn(f64) -> f64>(cdf: &F, edge: f64, left: bool) -> f64 {
    // expand until the tail mass is negligible
    let mut span = 1.0f64;
    let value = |x: f64| if left { cdf(x) } else { 1.0 - cdf(x) };
    while span < 1e9 {
        let probe = if left { edge - span } else { edge + span };
        if value(probe) < 1e-12 {
            break;
        }
        span *= 2.0;
    }
    let (a, b) = if left { (edge - span, edge) } else { (edge, edge + span) };
    quad::integrate(|x| value(x), a, b, 1e-10)
}
