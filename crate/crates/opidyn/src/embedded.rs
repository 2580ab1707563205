//! Exact, discretization-free samplers for stationary distributions via the
//! embedded pre-jump chain.
//!
//! Between consecutive interaction epochs of a constant-rate clock the
//! diffusion accumulates a mixture-Gaussian increment `W' ~ N(mu dT, sigma^2
//! dT)` with `dT ~ Exp(lambda)`, so the pre-jump chain satisfies
//! `Y(n+1) = Y(n)/theta + W'(n)` and its stationary law is the geometric sum
//! `sum_j W'(j)/theta^j`. Multi-agent variants share the interaction clock
//! and add stubborn-opinion offsets.

use crate::error::{Error, Result};
use crate::model::{jump_apply, ModelParams, MultiAgentConfig};
use crate::rng::{self, Stream};

/// One mixture-Gaussian increment `W'`: `N(mu dT, sigma^2 dT)` with
/// `dT ~ Exp(lambda)`. Exact, no discretization.
pub fn sample_w_prime(params: &ModelParams, stream: &mut Stream) -> f64 {
    let dt = rng::exponential(stream, params.lambda);
    params.mu * dt + params.sigma * dt.sqrt() * rng::standard_normal(stream)
}

/// One step of the two-agent pre-jump chain: `y -> y/theta + W'`.
pub fn embedded_step(y: f64, params: &ModelParams, stream: &mut Stream) -> f64 {
    jump_apply(y, params.theta) + sample_w_prime(params, stream)
}

/// Truncation length so the dropped geometric tail is below `tol` relative
/// to the sum's scale.
fn truncation_terms(theta: f64, tol: f64) -> usize {
    ((1.0 / tol).ln() / theta.ln()).ceil() as usize + 1
}

/// Exact draw from the constant-rate stationary law: the geometric sum
/// `sum_{j=0..N} W'(j)/theta^j` truncated at relative tolerance `tol`
/// (default campaigns use 1e-8).
pub fn sample_stationary_c1(params: &ModelParams, tol: f64, stream: &mut Stream) -> f64 {
    let n = truncation_terms(params.theta, tol);
    let mut acc = 0.0;
    let mut scale = 1.0;
    for _ in 0..=n {
        acc += sample_w_prime(params, stream) * scale;
        scale /= params.theta;
    }
    acc
}

/// Exact draw for the three-agent chain (stubborn opinions `s1 < s3`,
/// constant rates `q lambda` and `(1-q) lambda`, `theta = 2`, the case the
/// closed form covers): `A + s1 + (s3-s1) U` where `A` is the two-agent
/// geometric sum and `U = sum_j xi(j) 2^-(j+1)`, `xi ~ Bernoulli(1-q)`.
///
/// The binary expansion starts at weight 1/2 so that `q = 1/2` makes `U`
/// exactly uniform on `[0,1]`; starting at weight 1 would put mass outside
/// `[s1, s3]`.
pub fn sample_three_agent(
    cfg: &MultiAgentConfig,
    params: &ModelParams,
    tol: f64,
    stream: &mut Stream,
) -> Result<f64> {
    let MultiAgentConfig::ThreeAgent { s1, s3, q } = *cfg else {
        return Err(Error::Unsupported(
            "sample_three_agent needs a three-agent topology".into(),
        ));
    };
    cfg.validate()?;
    if params.theta != 2.0 {
        return Err(Error::param("theta", "three-agent sampler fixes theta = 2"));
    }
    if params.mu != 0.0 {
        return Err(Error::param("mu", "three-agent sampler requires mu = 0"));
    }
    let n = truncation_terms(2.0, tol);
    let mut a = 0.0;
    let mut u = 0.0;
    let mut scale = 1.0;
    for _ in 0..=n {
        a += sample_w_prime(params, stream) * scale;
        scale *= 0.5;
        if rng::bernoulli(stream, 1.0 - q) {
            u += scale; // weight 2^-(j+1)
        }
    }
    Ok(a + s1 + (s3 - s1) * u)
}

/// State of the four-agent pre-jump chain (two non-stubborn opinions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourAgentState {
    pub x2: f64,
    pub x3: f64,
}

/// Deterministic part of one four-agent update, exposed so the matrix rows
/// can be exercised directly: with `xi = 1` agent 2 averages with both
/// neighbors, with `xi = 0` agent 3 does; diffusion increments `w2`, `w3`
/// are added to both rows every step.
pub fn four_agent_apply(
    state: FourAgentState,
    s1: f64,
    s4: f64,
    xi: bool,
    w2: f64,
    w3: f64,
) -> FourAgentState {
    let x = if xi { 1.0 } else { 0.0 };
    let FourAgentState { x2, x3 } = state;
    FourAgentState {
        x2: (1.0 - 2.0 * x / 3.0) * x2 + x / 3.0 * x3 + x / 3.0 * s1 + w2,
        x3: (1.0 - x) / 3.0 * x2 + (1.0 / 3.0 + 2.0 * x / 3.0) * x3 + (1.0 - x) / 3.0 * s4 + w3,
    }
}

/// One step of the four-agent chain: shared `dT ~ Exp(lambda)`, agent choice
/// `xi ~ Bernoulli(q)`, and per-agent mixture-Gaussian increments sharing
/// `dT`.
pub fn four_agent_step(
    state: FourAgentState,
    cfg: &MultiAgentConfig,
    lambda: f64,
    stream: &mut Stream,
) -> Result<FourAgentState> {
    let MultiAgentConfig::FourAgent {
        s1,
        s4,
        q,
        mu2,
        sigma2,
        mu3,
        sigma3,
    } = *cfg
    else {
        return Err(Error::Unsupported(
            "four_agent_step needs a four-agent topology".into(),
        ));
    };
    let dt = rng::exponential(stream, lambda);
    let xi = rng::bernoulli(stream, q);
    let w2 = mu2 * dt + sigma2 * dt.sqrt() * rng::standard_normal(stream);
    let w3 = mu3 * dt + sigma3 * dt.sqrt() * rng::standard_normal(stream);
    Ok(four_agent_apply(state, s1, s4, xi, w2, w3))
}

/// Draw a four-agent stationary sample by iterating the recursion through a
/// burn-in (the random matrices contract; 200 steps is far past the mixing
/// time for q in (0,1)).
pub fn sample_four_agent(
    cfg: &MultiAgentConfig,
    lambda: f64,
    burn_in: usize,
    stream: &mut Stream,
) -> Result<FourAgentState> {
    let mut state = FourAgentState { x2: 0.0, x3: 0.0 };
    for _ in 0..burn_in {
        state = four_agent_step(state, cfg, lambda, stream)?;
    }
    Ok(state)
}

/// One step of the vector-valued chain: all coordinates share one
/// interaction clock but receive independent Gaussian increments given
/// `dT`.
pub fn vector_valued_step(
    state: &mut [f64],
    cfg: &MultiAgentConfig,
    theta: f64,
    lambda: f64,
    stream: &mut Stream,
) -> Result<()> {
    let MultiAgentConfig::Vector { mus, sigmas } = cfg else {
        return Err(Error::Unsupported(
            "vector_valued_step needs a vector topology".into(),
        ));
    };
    if state.len() != mus.len() {
        return Err(Error::param("d", "state dimension mismatch"));
    }
    let dt = rng::exponential(stream, lambda);
    let sq = dt.sqrt();
    for (i, y) in state.iter_mut().enumerate() {
        *y = jump_apply(*y, theta) + mus[i] * dt + sigmas[i] * sq * rng::standard_normal(stream);
    }
    Ok(())
}

/// Exact stationary draw for the vector model: per-coordinate geometric
/// sums driven by a shared clock.
pub fn sample_stationary_vector(
    cfg: &MultiAgentConfig,
    theta: f64,
    lambda: f64,
    tol: f64,
    stream: &mut Stream,
) -> Result<Vec<f64>> {
    let MultiAgentConfig::Vector { mus, sigmas } = cfg else {
        return Err(Error::Unsupported(
            "sample_stationary_vector needs a vector topology".into(),
        ));
    };
    cfg.validate()?;
    let n = truncation_terms(theta, tol);
    let mut acc = vec![0.0; mus.len()];
    let mut scale = 1.0;
    for _ in 0..=n {
        let dt = rng::exponential(stream, lambda);
        let sq = dt.sqrt();
        for (i, a) in acc.iter_mut().enumerate() {
            *a += (mus[i] * dt + sigmas[i] * sq * rng::standard_normal(stream)) * scale;
        }
        scale /= theta;
    }
    Ok(acc)
}
