//! Model parameters, interaction-rate families and the jump operator.
//!
//! A non-stubborn agent's opinion difference `X(t)` diffuses with drift `mu`
//! and coefficient `sigma`, and at interaction epochs jumps from `x` to
//! `x/theta` with `theta > 1`. Interactions fire with a state-dependent rate
//! drawn from one of three families:
//!
//! * `C1`: constant rate `lambda`,
//! * `C2`: power law `lambda / |x|^alpha` (unbounded at 0),
//! * `C3`: capped power law `min(lambda / |x|^alpha, K)`.
//!
//! All types here are immutable after construction and safe to share across
//! worker threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ceiling applied to the interaction rate (the `K` in the C3 family).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateCeiling {
    Bounded(f64),
    Unbounded,
}

impl RateCeiling {
    pub fn value(&self) -> f64 {
        match self {
            RateCeiling::Bounded(k) => *k,
            RateCeiling::Unbounded => f64::INFINITY,
        }
    }
}

/// Parameters of one agent pair.
///
/// `theta_prime` is always derived from `theta` so that the averaging
/// identity `1/theta + 1/theta_prime = 1` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Drift (opinion units per unit time).
    pub mu: f64,
    /// Diffusion coefficient (opinion units per square-root time).
    pub sigma: f64,
    /// Averaging weight, > 1.
    pub theta: f64,
    /// Base interaction rate (events per unit time).
    pub lambda: f64,
    /// Rate exponent, >= 0.
    pub alpha: f64,
    /// Rate ceiling for the C3 family.
    pub cap: RateCeiling,
}

impl ModelParams {
    pub fn new(
        mu: f64,
        sigma: f64,
        theta: f64,
        lambda: f64,
        alpha: f64,
        cap: RateCeiling,
    ) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be > 0, got {sigma}")));
        }
        if !(lambda > 0.0) {
            return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
        }
        if !(theta > 1.0) {
            return Err(Error::param("theta", format!("must be > 1, got {theta}")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::param("alpha", format!("must be >= 0, got {alpha}")));
        }
        if let RateCeiling::Bounded(k) = cap {
            if !(k > 0.0) {
                return Err(Error::param("cap", format!("must be > 0, got {k}")));
            }
        }
        if !mu.is_finite() {
            return Err(Error::param("mu", format!("must be finite, got {mu}")));
        }
        Ok(ModelParams {
            mu,
            sigma,
            theta,
            lambda,
            alpha,
            cap,
        })
    }

    /// Dual weight `theta' = 1 / (1 - 1/theta)`.
    pub fn theta_prime(&self) -> f64 {
        1.0 / (1.0 - 1.0 / self.theta)
    }
}

/// One of the three interaction-rate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateFamily {
    C1,
    C2,
    C3,
}

impl std::fmt::Display for RateFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateFamily::C1 => write!(f, "c1"),
            RateFamily::C2 => write!(f, "c2"),
            RateFamily::C3 => write!(f, "c3"),
        }
    }
}

/// An evaluable interaction-rate function `lambda(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub family: RateFamily,
    lambda: f64,
    alpha: f64,
    cap: f64,
}

impl RateFunction {
    pub fn new(family: RateFamily, params: &ModelParams) -> Result<Self> {
        if family == RateFamily::C3 && !params.cap.value().is_finite() {
            return Err(Error::param("cap", "C3 requires a finite ceiling"));
        }
        Ok(RateFunction {
            family,
            lambda: params.lambda,
            alpha: params.alpha,
            cap: params.cap.value(),
        })
    }

    /// Rate at opinion difference `x`. Even in `x`. For C2 with `alpha > 0`
    /// the value at `x = 0` is `+inf`; consumers must branch on it.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self.family {
            RateFamily::C1 => self.lambda,
            RateFamily::C2 => power_rate(self.lambda, self.alpha, x),
            RateFamily::C3 => power_rate(self.lambda, self.alpha, x).min(self.cap),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }
}

fn power_rate(lambda: f64, alpha: f64, x: f64) -> f64 {
    if alpha == 0.0 {
        return lambda;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    lambda / x.abs().powf(alpha)
}

/// Apply one interaction: the opinion difference contracts from `x` to
/// `x/theta`. Sign is preserved and 0 is a fixed point.
pub fn jump_apply(x: f64, theta: f64) -> f64 {
    x / theta
}

/// Network topology for the multi-agent extensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "topology")]
pub enum MultiAgentConfig {
    TwoAgent,
    /// One non-stubborn agent between stubborn opinions `s1 < s3`; it
    /// interacts with `s1` at rate `q * lambda` and with `s3` at rate
    /// `(1 - q) * lambda`.
    ThreeAgent { s1: f64, s3: f64, q: f64 },
    /// Two non-stubborn agents chained between stubborn opinions `s1`, `s4`.
    FourAgent {
        s1: f64,
        s4: f64,
        q: f64,
        mu2: f64,
        sigma2: f64,
        mu3: f64,
        sigma3: f64,
    },
    /// d-dimensional opinions with a shared interaction clock.
    Vector { mus: Vec<f64>, sigmas: Vec<f64> },
}

impl MultiAgentConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            MultiAgentConfig::TwoAgent => Ok(()),
            MultiAgentConfig::ThreeAgent { s1, s3, q } => {
                if !(s1 < s3) {
                    return Err(Error::param("s1", format!("requires s1 < s3, got {s1} >= {s3}")));
                }
                check_prob(*q)
            }
            MultiAgentConfig::FourAgent {
                q, sigma2, sigma3, ..
            } => {
                if !(*sigma2 > 0.0) || !(*sigma3 > 0.0) {
                    return Err(Error::param("sigma", "per-agent sigmas must be > 0"));
                }
                check_prob(*q)
            }
            MultiAgentConfig::Vector { mus, sigmas } => {
                if mus.is_empty() || mus.len() != sigmas.len() {
                    return Err(Error::param(
                        "d",
                        "dimension must be >= 1 with matching mu/sigma lists",
                    ));
                }
                if sigmas.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::param("sigma", "per-coordinate sigmas must be > 0"));
                }
                Ok(())
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            MultiAgentConfig::Vector { mus, .. } => mus.len(),
            MultiAgentConfig::FourAgent { .. } => 2,
            _ => 1,
        }
    }
}

fn check_prob(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::param("q", format!("must lie in [0,1], got {q}")))
    }
}
