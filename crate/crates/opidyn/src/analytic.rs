//! Closed-form stationary densities of the opinion-difference process and
//! the Mellin-transform machinery behind them.
//!
//! For zero drift the stationary density of the two-agent dynamics has a
//! series form: with constant rate (`alpha = 0`) it is a signed mixture of
//! Laplace terms,
//!
//! ```text
//! p(x) = phi * sum_n (a_n / theta^n) exp(-(sqrt(2 lambda) theta^n / sigma) |x|)
//! ```
//!
//! and for power-law rates `lambda/|x|^alpha` with `0 <= alpha < 2` the terms
//! become Bessel-K kernels,
//!
//! ```text
//! p(x) = 2 phi (2-alpha) sum_n (a_n / theta^n) sqrt(c^(1/(2-alpha)) theta^n |x|)
//!        * K_nu(2 sqrt(c theta^(n(2-alpha)) |x|^(2-alpha))),
//! c = 2 lambda / (sigma^2 (2-alpha)^2),  nu = 1/(2-alpha),
//! ```
//!
//! with coefficients `a_n = prod_{k=1..n} theta^(2-alpha)/(1 - theta^(k(2-alpha)))`
//! and a normalizer fixed by `M(1) = 1/2` for the Mellin transform `M` of the
//! positive part.
//!
//! The `alpha = 0` exponential rate is the one derived in the proof,
//! `sqrt(2 lambda) theta^n / sigma`; the theorem statement carries a stray
//! factor 2 that fails both normalization and the stationary ODE, so it is
//! not implemented.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quad;
use crate::special::{bessel_k, gamma_fn};

/// Which series represents the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Exponential,
    BesselK,
}

/// A truncated stationary-density series, precomputed for repeated evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySeries {
    pub kind: SeriesKind,
    /// Series coefficients `a_0..a_N` (`a_0 = 1`, signs alternate).
    pub coefficients: Vec<f64>,
    /// Normalizer `phi` in the convention of the corresponding closed form.
    pub normalizer: f64,
    pub params: ModelParams,
    pub alpha: f64,
    /// Truncation index N.
    pub truncation: usize,
    /// Magnitude of the first dropped `|a_n| theta^-n`.
    pub term_bound: f64,
}

/// Coefficient `a_n = prod_{k=1..n} theta^(2-alpha) / (1 - theta^(k(2-alpha)))`.
pub fn coeff_a(n: usize, theta: f64, alpha: f64) -> f64 {
    let e = 2.0 - alpha;
    let mut a = 1.0;
    for k in 1..=n {
        a *= theta.powf(e) / (1.0 - theta.powf(k as f64 * e));
    }
    a
}

/// Normalizer of the Bessel-K series (the general closed form).
///
/// At `alpha = 0` the exponential-series normalizer is exactly
/// `2 sqrt(pi)` times this value (gamma duplication at `z = 1/2`).
pub fn normalizer_phi(params: &ModelParams, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let e = 2.0 - alpha;
    let c = 2.0 * params.lambda / (params.sigma * params.sigma * e * e);
    let mut prod = 1.0;
    let mut k = 0.0;
    loop {
        let f = params.theta.powf(-(2.0 + k * e));
        if f < 1e-18 || k > 1e6 {
            break;
        }
        prod *= 1.0 - f;
        k += 1.0;
    }
    Ok(c.powf(1.0 / e) / (2.0 * gamma_fn(1.0 / e) * gamma_fn(2.0 / e)) / prod)
}

fn phi_exponential(params: &ModelParams) -> f64 {
    let theta = params.theta;
    let mut prod = 1.0;
    let mut k = 0.0;
    loop {
        let f = theta.powf(-2.0 * (1.0 + k));
        if f < 1e-18 || k > 1e6 {
            break;
        }
        prod *= 1.0 - f;
        k += 1.0;
    }
    (2.0 * params.lambda).sqrt() / (2.0 * params.sigma) / prod
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(Error::param(
            "alpha",
            format!("closed forms exist for 0 <= alpha < 2, got {alpha}"),
        ));
    }
    Ok(())
}

fn check_zero_drift(params: &ModelParams) -> Result<()> {
    if params.mu != 0.0 {
        return Err(Error::param(
            "mu",
            "the closed-form stationary densities require mu = 0",
        ));
    }
    Ok(())
}

/// Truncate the coefficient series: stop at the first term whose x=0
/// envelope drops below 1e-14 of the partial sum.
fn truncated_coeffs(theta: f64, alpha: f64) -> (Vec<f64>, f64) {
    let e = 2.0 - alpha;
    let mut coeffs = vec![1.0f64];
    let mut partial = 1.0f64;
    let mut a = 1.0f64;
    for n in 1..=400usize {
        a *= theta.powf(e) / (1.0 - theta.powf(n as f64 * e));
        let envelope = a.abs() * theta.powf(-(n as f64));
        if envelope < 1e-14 * partial.abs().max(1e-300) {
            return (coeffs, envelope);
        }
        coeffs.push(a);
        partial += a * theta.powf(-(n as f64));
    }
    let bound = a.abs() * theta.powf(-401.0);
    (coeffs, bound)
}

impl DensitySeries {
    /// The constant-rate (`alpha = 0`) stationary density, exponential form.
    pub fn exponential(params: &ModelParams) -> Result<Self> {
        check_zero_drift(params)?;
        let (coefficients, term_bound) = truncated_coeffs(params.theta, 0.0);
        Ok(DensitySeries {
            kind: SeriesKind::Exponential,
            truncation: coefficients.len() - 1,
            normalizer: phi_exponential(params),
            params: *params,
            alpha: 0.0,
            coefficients,
            term_bound,
        })
    }

    /// The power-law-rate stationary density, Bessel-K form, `0 <= alpha < 2`.
    pub fn bessel(params: &ModelParams, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_zero_drift(params)?;
        let (coefficients, term_bound) = truncated_coeffs(params.theta, alpha);
        Ok(DensitySeries {
            kind: SeriesKind::BesselK,
            truncation: coefficients.len() - 1,
            normalizer: normalizer_phi(params, alpha)?,
            params: *params,
            alpha,
            coefficients,
            term_bound,
        })
    }

    /// Density value at `x`; even in `x`, strictly positive.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            SeriesKind::Exponential => self.eval_exponential(x),
            SeriesKind::BesselK => self.eval_bessel(x),
        }
    }

    fn eval_exponential(&self, x: f64) -> f64 {
        let p = &self.params;
        let rate0 = (2.0 * p.lambda).sqrt() / p.sigma;
        let ax = x.abs();
        let mut sum = 0.0;
        let mut theta_n = 1.0;
        for a in &self.coefficients {
            sum += a / theta_n * (-rate0 * theta_n * ax).exp();
            theta_n *= p.theta;
        }
        self.normalizer * sum
    }

    fn eval_bessel(&self, x: f64) -> f64 {
        let p = &self.params;
        let e = 2.0 - self.alpha;
        let nu = 1.0 / e;
        let c = 2.0 * p.lambda / (p.sigma * p.sigma * e * e);
        let b = c.powf(1.0 / e);
        let ax = x.abs();
        let limit_term = gamma_fn(nu) / 2.0;
        let mut sum = 0.0;
        let mut theta_n = 1.0f64;
        for (n, a) in self.coefficients.iter().enumerate() {
            let z = 2.0 * (c * p.theta.powf(n as f64 * e) * ax.powf(e)).sqrt();
            let term = if z < 1e-100 {
                limit_term
            } else {
                match bessel_k(nu, z) {
                    Ok(k) if k > 0.0 => (b * theta_n * ax).sqrt() * k,
                    _ => 0.0, // underflow in the tail
                }
            };
            sum += a / theta_n * term;
            theta_n *= p.theta;
        }
        2.0 * self.normalizer * e * sum
    }

    /// Cutoff beyond which the leading term's envelope is below 1e-18;
    /// quadrature and CDF construction integrate over `[-cutoff, cutoff]`.
    pub fn tail_cutoff(&self) -> f64 {
        let p = &self.params;
        let e = 2.0 - self.alpha;
        let c = 2.0 * p.lambda / (p.sigma * p.sigma * e * e);
        // leading envelope exp(-z), z = 2 sqrt(c) x^(e/2)
        let z_target = 41.5f64;
        (z_target / (2.0 * c.sqrt())).powf(2.0 / e)
    }

    /// `2 * integral of the density over [0, tail_cutoff]`; should be 1.
    pub fn normalization_check(&self) -> f64 {
        let xmax = self.tail_cutoff();
        let first = (xmax / 4096.0).min(0.125);
        2.0 * quad::integrate_geometric(|u| self.eval(u), 0.0, xmax, first, 1e-10)
    }

    /// Closed-form CDF; available for the exponential kind only.
    pub fn cdf_closed(&self, x: f64) -> Option<f64> {
        if self.kind != SeriesKind::Exponential {
            return None;
        }
        let p = &self.params;
        let rate0 = (2.0 * p.lambda).sqrt() / p.sigma;
        let mut acc = 0.0;
        let mut theta_n = 1.0;
        if x >= 0.0 {
            for a in &self.coefficients {
                let r = rate0 * theta_n;
                acc += a / theta_n * (1.0 - (-r * x).exp()) / r;
                theta_n *= p.theta;
            }
            Some(0.5 + self.normalizer * acc)
        } else {
            for a in &self.coefficients {
                let r = rate0 * theta_n;
                acc += a / theta_n * (r * x).exp() / r;
                theta_n *= p.theta;
            }
            Some(self.normalizer * acc)
        }
    }

    /// Antiderivative `H(t) = integral of the CDF from -inf to t`
    /// (exponential kind only). Used to convolve with a uniform kernel.
    pub fn cdf_antiderivative(&self, t: f64) -> Option<f64> {
        if self.kind != SeriesKind::Exponential {
            return None;
        }
        let p = &self.params;
        let rate0 = (2.0 * p.lambda).sqrt() / p.sigma;
        let mut acc = 0.0;
        let mut theta_n = 1.0;
        if t <= 0.0 {
            for a in &self.coefficients {
                let r = rate0 * theta_n;
                acc += a / theta_n * (r * t).exp() / (r * r);
                theta_n *= p.theta;
            }
            Some(self.normalizer * acc)
        } else {
            for a in &self.coefficients {
                let r = rate0 * theta_n;
                // H(0) contribution + int_0^t of the term's CDF part
                acc += a / theta_n * (1.0 / (r * r) + t / r - (1.0 - (-r * t).exp()) / (r * r));
                theta_n *= p.theta;
            }
            Some(self.normalizer * acc + 0.5 * t)
        }
    }
}

/// One-shot evaluation of the constant-rate stationary density.
pub fn density_exponential(x: f64, params: &ModelParams) -> Result<f64> {
    Ok(DensitySeries::exponential(params)?.eval(x))
}

/// One-shot evaluation of the power-law-rate stationary density.
pub fn density_besselk(x: f64, params: &ModelParams, alpha: f64) -> Result<f64> {
    Ok(DensitySeries::bessel(params, alpha)?.eval(x))
}

/// Stationary density of the three-agent chain (stubborn opinions `s1 < s3`,
/// selection probability `q = 1/2`, `theta = 2`, `mu = 0`): the two-agent
/// density convolved with `Uniform[s1, s3]`.
#[derive(Debug, Clone)]
pub struct ThreeAgentDensity {
    pub series: DensitySeries,
    pub s1: f64,
    pub s3: f64,
}

impl ThreeAgentDensity {
    pub fn new(params: &ModelParams, s1: f64, s3: f64) -> Result<Self> {
        if params.theta != 2.0 {
            return Err(Error::param("theta", "three-agent closed form fixes theta = 2"));
        }
        if !(s1 < s3) {
            return Err(Error::param("s1", "requires s1 < s3"));
        }
        Ok(ThreeAgentDensity {
            series: DensitySeries::exponential(params)?,
            s1,
            s3,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        let f = |t: f64| self.series.cdf_closed(t).unwrap();
        (f(x - self.s1) - f(x - self.s3)) / (self.s3 - self.s1)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let h = |t: f64| self.series.cdf_antiderivative(t).unwrap();
        (h(x - self.s1) - h(x - self.s3)) / (self.s3 - self.s1)
    }
}

/// Characteristic function of the constant-rate stationary distribution:
/// infinite product over geometric scalings of the per-summand Linnik factor.
pub fn char_function(xi: f64, params: &ModelParams) -> Complex64 {
    let lambda = params.lambda;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut theta_j = 1.0f64;
    for _ in 0..20000 {
        let u = xi / theta_j;
        let denom = Complex64::new(lambda + 0.5 * params.sigma * params.sigma * u * u, -params.mu * u);
        let factor = lambda / denom;
        prod *= factor;
        if (factor - 1.0).norm() < 1e-16 {
            break;
        }
        theta_j *= params.theta;
    }
    prod
}

/// Closed-form Mellin transform `M(s)` of the positive part of the
/// stationary density (`mu = 0`, `0 <= alpha < 2`); satisfies `M(1) = 1/2`.
pub fn mellin_density(s: f64, params: &ModelParams, alpha: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::param("s", format!("need s > 0, got {s}")));
    }
    check_alpha(alpha)?;
    check_zero_drift(params)?;
    let e = 2.0 - alpha;
    let c = 2.0 * params.lambda / (params.sigma * params.sigma * e * e);
    let mut prod = 1.0;
    let mut k = 0.0;
    loop {
        let f = params.theta.powf(-(s + 1.0 + k * e));
        if f < 1e-18 || k > 1e6 {
            break;
        }
        prod *= 1.0 - f;
        k += 1.0;
    }
    Ok(normalizer_phi(params, alpha)?
        * gamma_fn(s / e)
        * gamma_fn((s + 1.0) / e)
        * c.powf(-s / e)
        * prod)
}

/// Both sides of the product/sum identity used by the inverse Mellin step,
/// plus their gap. The sum is truncated at `n_terms`; the product runs to
/// machine convergence (a fixed-length product cannot reach the 1e-12
/// agreement the identity check targets for theta near 1.5).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EulerIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn euler_identity_check(theta_eff: f64, s: f64, n_terms: usize) -> Result<EulerIdentity> {
    if !(theta_eff > 1.0) {
        return Err(Error::param("theta", "identity requires theta > 1"));
    }
    let mut lhs = 1.0;
    let mut k = 0.0f64;
    loop {
        let f = theta_eff.powf(-(s + k));
        if f < 1e-18 || k > 2e6 {
            break;
        }
        lhs *= 1.0 - f;
        k += 1.0;
    }
    let mut rhs = 0.0;
    let mut prod = 1.0;
    for n in 0..=n_terms {
        if n > 0 {
            prod *= theta_eff / (1.0 - theta_eff.powi(n as i32));
        }
        rhs += theta_eff.powf(-(s * n as f64)) * prod;
    }
    Ok(EulerIdentity {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RateCeiling;

    fn base_params() -> ModelParams {
        ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.0, RateCeiling::Unbounded).unwrap()
    }

    // frozen with mpmath/scipy: p(x) for lambda=2, sigma=3, theta=2
    const P_EXP_TABLE: &[(f64, f64)] = &[
        (0.0, 0.20304990368874287),
        (0.5, 0.1924311070602612),
        (1.0, 0.16646314762864106),
        (2.0, 0.10539436167191846),
        (5.0, 0.016859751235848302),
    ];
    const P_BES05_TABLE: &[(f64, f64)] = &[
        (0.0, 0.1631188762701478),
        (0.1, 0.16186154430983726),
        (0.5, 0.1499755241524046),
        (1.0, 0.13011504868023502),
        (2.0, 0.09176652040026563),
        (5.0, 0.028703924164147486),
    ];
    const P_BES15_TABLE: &[(f64, f64)] = &[
        (0.0, 0.042564385804558166),
        (0.1, 0.03618901610803329),
        (0.5, 0.029794707556840886),
        (1.0, 0.025859216877537693),
        (2.0, 0.021277294303152266),
        (5.0, 0.014686718754861265),
    ];

    #[test]
    fn coeff_examples() {
        assert_eq!(coeff_a(0, 2.0, 0.0), 1.0);
        assert_eq!(coeff_a(0, 3.0, 1.2), 1.0);
        assert!((coeff_a(1, 2.0, 0.0) - (-4.0 / 3.0)).abs() < 1e-15);
        assert!((coeff_a(1, 2.0, 1.0) - (-2.0)).abs() < 1e-15);
    }

    #[test]
    fn coeff_signs_alternate_and_decay() {
        for alpha in [0.0, 0.5, 1.5] {
            let (coeffs, _) = truncated_coeffs(2.0, alpha);
            assert!(coeffs.len() > 4);
            let mut prev_env = f64::INFINITY;
            for (n, pair) in coeffs.windows(2).enumerate() {
                assert!(pair[0] * pair[1] < 0.0, "signs at n={n} alpha={alpha}");
                // envelope decays past the first few terms
                let env = pair[1].abs() * 2.0f64.powi(-(n as i32 + 1));
                if n >= 2 {
                    assert!(env < prev_env, "envelope grows at n={n} alpha={alpha}");
                }
                prev_env = env;
            }
        }
    }

    #[test]
    fn exponential_matches_reference() {
        let d = DensitySeries::exponential(&base_params()).unwrap();
        for &(x, want) in P_EXP_TABLE {
            let got = d.eval(x);
            assert!(((got - want) / want).abs() < 1e-12, "p({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn bessel_matches_reference() {
        let d05 = DensitySeries::bessel(&base_params(), 0.5).unwrap();
        for &(x, want) in P_BES05_TABLE {
            let got = d05.eval(x);
            assert!(((got - want) / want).abs() < 1e-10, "a=.5 p({x}) = {got}, want {want}");
        }
        let d15 = DensitySeries::bessel(&base_params(), 1.5).unwrap();
        for &(x, want) in P_BES15_TABLE {
            let got = d15.eval(x);
            assert!(((got - want) / want).abs() < 1e-10, "a=1.5 p({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn densities_are_even_and_positive() {
        let d = DensitySeries::bessel(&base_params(), 0.5).unwrap();
        for i in 0..60 {
            let x = 0.17 * i as f64;
            assert_eq!(d.eval(x), d.eval(-x));
            assert!(d.eval(x) > 0.0);
        }
    }

    #[test]
    fn normalizations() {
        let p = base_params();
        let de = DensitySeries::exponential(&p).unwrap();
        assert!((de.normalization_check() - 1.0).abs() < 1e-6);
        for alpha in [0.0, 0.5, 1.5] {
            let d = DensitySeries::bessel(&p, alpha).unwrap();
            let z = d.normalization_check();
            assert!((z - 1.0).abs() < 1e-6, "alpha={alpha}: {z}");
        }
    }

    #[test]
    fn phi_conventions_differ_by_two_sqrt_pi() {
        let p = base_params();
        let phi_e = phi_exponential(&p);
        let phi_b = normalizer_phi(&p, 0.0).unwrap();
        let ratio = phi_e / phi_b;
        let want = 2.0 * std::f64::consts::PI.sqrt();
        assert!(((ratio - want) / want).abs() < 1e-13, "ratio {ratio}");
    }

    #[test]
    fn phi_scale_invariance() {
        // lambda -> c^2 lambda, sigma -> c sigma leaves phi unchanged
        let p = base_params();
        let c = 3.7;
        let scaled =
            ModelParams::new(0.0, c * 3.0, 2.0, c * c * 2.0, 0.0, RateCeiling::Unbounded).unwrap();
        assert!((phi_exponential(&p) - phi_exponential(&scaled)).abs() < 1e-14);
        for alpha in [0.0, 0.7, 1.5] {
            let a = normalizer_phi(&p, alpha).unwrap();
            let b = normalizer_phi(&scaled, alpha).unwrap();
            assert!(((a - b) / a).abs() < 1e-13, "alpha={alpha}");
        }
    }

    #[test]
    fn besselk_at_alpha_zero_reduces_to_exponential() {
        let p = base_params();
        let de = DensitySeries::exponential(&p).unwrap();
        let db = DensitySeries::bessel(&p, 0.0).unwrap();
        for i in 0..=200 {
            let x = -10.0 + 0.1 * i as f64;
            let a = de.eval(x);
            let b = db.eval(x);
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn truncation_is_converged() {
        // lengthening the series does not move values at the 1e-12 scale
        let p = base_params();
        let d = DensitySeries::bessel(&p, 0.5).unwrap();
        let mut longer = d.clone();
        let n0 = longer.coefficients.len();
        for n in n0..n0 + 5 {
            longer
                .coefficients
                .push(coeff_a(n, p.theta, 0.5));
        }
        for &x in &[0.0, 0.3, 1.0, 4.0] {
            assert!((d.eval(x) - longer.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_cdf_matches_quadrature() {
        let d = DensitySeries::exponential(&base_params()).unwrap();
        for &x in &[-4.0, -1.0, 0.0, 0.5, 2.0, 8.0] {
            let want = quad::integrate(|u| d.eval(u), -60.0, x, 1e-11);
            let got = d.cdf_closed(x).unwrap();
            assert!((got - want).abs() < 1e-9, "x={x}: {got} vs {want}");
        }
        assert!((d.cdf_closed(0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cdf_antiderivative_consistency() {
        // H'(t) = F(t) via central differences
        let d = DensitySeries::exponential(&base_params()).unwrap();
        let h = 1e-5;
        for &t in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let d1 = (d.cdf_antiderivative(t + h).unwrap() - d.cdf_antiderivative(t - h).unwrap())
                / (2.0 * h);
            let want = d.cdf_closed(t).unwrap();
            assert!((d1 - want).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn three_agent_density_integrates_to_one() {
        let p = ModelParams::new(0.0, 2.0, 2.0, 3.0, 0.0, RateCeiling::Unbounded).unwrap();
        let t = ThreeAgentDensity::new(&p, 0.0, 1.0).unwrap();
        let mass = quad::integrate(|x| t.density(x), -40.0, 41.0, 1e-10);
        assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
        // CDF endpoints
        assert!(t.cdf(-40.0).abs() < 1e-9);
        assert!((t.cdf(41.0) - 1.0).abs() < 1e-9);
    }

    // frozen with numpy: prod_j lambda/(lambda - i mu xi / theta^j + sigma^2 xi^2/(2 theta^(2j)))
    #[test]
    fn char_function_reference_values() {
        let p = base_params();
        for &(xi, want) in &[
            (0.5, 0.5357467978418469),
            (2.0, 0.016484516856672213),
            (5.0, 1.0430588330494203e-4),
        ] {
            let got = char_function(xi, &p);
            assert!(got.im.abs() < 1e-15);
            assert!(((got.re - want) / want).abs() < 1e-12, "xi={xi}: {}", got.re);
        }
        let drifted = ModelParams::new(0.1, 0.02, 2.0, 3.0, 0.0, RateCeiling::Unbounded).unwrap();
        let got = char_function(0.5, &drifted);
        assert!((got.re - 0.9992373201544498).abs() < 1e-12);
        assert!((got.im - 0.0333181709165678).abs() < 1e-12);
    }

    #[test]
    fn char_function_basics() {
        let p = base_params();
        assert_eq!(char_function(0.0, &p), Complex64::new(1.0, 0.0));
        for i in -20..=20 {
            let xi = i as f64 * 0.25;
            let v = char_function(xi, &p);
            assert!(v.norm() <= 1.0 + 1e-12);
            assert!(v.re > 0.0);
        }
    }

    #[test]
    fn mellin_m1_is_half() {
        let p = base_params();
        for alpha in [0.0, 0.5, 1.5] {
            let m1 = mellin_density(1.0, &p, alpha).unwrap();
            assert!((m1 - 0.5).abs() < 1e-10, "alpha={alpha}: {m1}");
        }
    }

    // frozen with scipy: closed form at alpha=0.5 agrees with direct quadrature
    #[test]
    fn mellin_reference_values() {
        let p = base_params();
        assert!((mellin_density(2.0, &p, 0.5).unwrap() - 1.3648341004684796).abs() < 1e-10);
        assert!((mellin_density(3.0, &p, 0.5).unwrap() - 7.523377676502834).abs() < 1e-9);
    }

    #[test]
    fn mellin_matches_quadrature() {
        let p = base_params();
        let d = DensitySeries::bessel(&p, 0.5).unwrap();
        let xmax = d.tail_cutoff();
        for s in [1.0, 2.0, 3.0] {
            let q = quad::integrate_geometric(|x| x.powf(s - 1.0) * d.eval(x), 0.0, xmax, 0.125, 1e-9);
            let m = mellin_density(s, &p, 0.5).unwrap();
            assert!(((m - q) / q).abs() < 1e-6, "s={s}: closed {m} quad {q}");
        }
    }

    #[test]
    fn mellin_functional_equation() {
        // sigma^2 (s+a)(s+1+a) M(s+a) = 2 lambda (1 - theta^-(s+1+a)) M(s+2)
        let p = base_params();
        for alpha in [0.0, 0.5, 1.5] {
            for s in [0.5, 1.0, 1.5, 2.0] {
                let lhs = p.sigma * p.sigma * (s + alpha) * (s + 1.0 + alpha)
                    * mellin_density(s + alpha, &p, alpha).unwrap();
                let rhs = 2.0 * p.lambda * (1.0 - p.theta.powf(-(s + 1.0 + alpha)))
                    * mellin_density(s + 2.0, &p, alpha).unwrap();
                assert!(
                    ((lhs - rhs) / rhs).abs() < 1e-8,
                    "alpha={alpha} s={s}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn mellin_second_moment_alpha_zero() {
        // M(3) = half the stationary second moment sigma^2/(lambda(1-theta^-2))
        let p = base_params();
        let want = 0.5 * p.sigma * p.sigma / (p.lambda * (1.0 - p.theta.powi(-2)));
        let got = mellin_density(3.0, &p, 0.0).unwrap();
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn euler_identity_examples() {
        let r = euler_identity_check(2.0, 1.0, 60).unwrap();
        assert!(r.gap < 1e-12, "gap {}", r.gap);
        let r = euler_identity_check(3.0, 3.5, 60).unwrap();
        assert!(r.gap < 1e-12, "gap {}", r.gap);
        let r = euler_identity_check(1e6, 1.0, 60).unwrap();
        assert!(r.gap < 1e-12);
        assert!((r.lhs - 1.0).abs() < 1e-5);
        assert!((r.rhs - 1.0).abs() < 1e-5);
    }
}
