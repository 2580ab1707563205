//! Mellin-transform machinery for the drifted (`mu != 0`) constant-rate
//! case, where the transform is known only up to a global constant.
//!
//! Writing `M(s) = f(s) Gamma(s) (sigma^2/(2 lambda))^(s/2)` turns the
//! stationary recurrence
//!
//! ```text
//! sigma^2 s(s+1) M(s) + 2 mu (s+1) M(s+1) = 2 lambda (1 - theta^-(s+1)) M(s+2)
//! ```
//!
//! into `f(s) + beta f(s+1) = a(s+1) f(s+2)` with `beta = sqrt(2) mu/(sigma
//! sqrt(lambda))` and `a(s) = 1 - theta^-s`. The ratio `Psi(s) =
//! f(s+1)/f(s)` of the positive (dominant) solution satisfies the Moebius
//! recursion
//!
//! ```text
//! Psi(s) = 1 / (a(s+1) Psi(s+1) - beta),
//! ```
//!
//! evaluated backward from the asymptotic expansion
//! `Psi(s) = gamma* (1 + A theta^-s + B theta^-2s) + O(theta^-3s)`,
//! `gamma* = (beta + sqrt(beta^2+4))/2`, `A = gamma*^2/(theta + gamma*^2)`,
//! `B = (A^2 + A gamma*^2/theta^2)/(1 + gamma*^2/theta^2)`.
//!
//! The positive trajectory is a repelling orbit of the backward map (the
//! multiplier at the fixed point is `gamma*^2 >= 1`), so depth is kept
//! shallow: tail error decays like `(gamma*^2/theta^3)^D` thanks to the
//! expansion while rounding grows like `gamma*^(2D)`; depths near 15-25
//! meet in the middle at ~1e-11. Each abscissa gets its own short ladder
//! rather than sharing one deep one. `Xi(s) = Psi(s)/gamma(s) - 1` is
//! exposed for diagnostics, with `gamma(s)` the positive root of
//! `1/g + beta = a(s) g`; it is small but not sign-definite.
//!
//! (A published continued-fraction expansion of `Xi` with coefficients
//! `1/(a g g')` and `1 - g/g'` does not satisfy the recurrence above and is
//! not used; the backward Moebius recursion is checked directly against the
//! `f` recurrence instead.)

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::special::gamma_fn;

/// `a(s) = 1 - theta^-s`.
fn a_of(s: f64, theta: f64) -> f64 {
    1.0 - theta.powf(-s)
}

/// Dimensionless drift `beta = sqrt(2) mu / (sigma sqrt(lambda))`.
pub fn drift_beta(params: &ModelParams) -> f64 {
    std::f64::consts::SQRT_2 * params.mu / (params.sigma * params.lambda.sqrt())
}

/// Positive root of `1/g + beta = a(s) g`. The explicit form shows it is
/// non-increasing in `s` for `beta >= 0` (at `beta = 0` it is
/// `1/sqrt(a(s))`, falling to 1), with `s -> inf` limit
/// `(beta + sqrt(beta^2+4))/2`.
pub fn drift_gamma(s: f64, beta: f64, theta: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::param("s", format!("need s > 0, got {s}")));
    }
    let a = a_of(s, theta);
    if !(a > 0.0) {
        return Err(Error::param("s", "need a(s) = 1 - theta^-s > 0"));
    }
    Ok((beta + (beta * beta + 4.0 * a).sqrt()) / (2.0 * a))
}

fn gamma_star(beta: f64) -> f64 {
    (beta + (beta * beta + 4.0).sqrt()) / 2.0
}

/// `Psi(s)` by one backward ladder of the given depth.
fn psi_fixed_depth(s: f64, beta: f64, theta: f64, depth: usize) -> f64 {
    let gs = gamma_star(beta);
    let gs2 = gs * gs;
    let a_coef = gs2 / (theta + gs2);
    let b_coef = (a_coef * a_coef + a_coef * gs2 / (theta * theta)) / (1.0 + gs2 / (theta * theta));
    let top = s + depth as f64;
    let t = theta.powf(-top);
    let mut psi = gs * (1.0 + a_coef * t + b_coef * t * t);
    for k in (0..depth).rev() {
        psi = 1.0 / (a_of(s + k as f64 + 1.0, theta) * psi - beta);
    }
    psi
}

/// `Psi(s)` with a depth scan: accept the first depth whose value agrees
/// with depth+5 to 1e-10, scanning shallow depths first (deep ladders are
/// rounding-amplified). Errors if no depth up to `max_depth` converges.
fn psi_converged(s: f64, beta: f64, theta: f64, max_depth: usize) -> Result<f64> {
    let cap = max_depth.clamp(10, 200);
    let mut d = 10usize;
    while d + 5 <= cap.max(15) {
        let v0 = psi_fixed_depth(s, beta, theta, d);
        let v1 = psi_fixed_depth(s, beta, theta, d + 5);
        // positivity guards against the backward map's attractor, the
        // minimal solution with negative ratio; agreement there is not
        // convergence to the transform's ratio
        if (v0 - v1).abs() < 1e-10 && v1.is_finite() && v1 > 0.0 {
            return Ok(v1);
        }
        d += 5;
    }
    Err(Error::NoConvergence(format!(
        "Psi(s={s}) did not stabilize at any depth up to {cap} (beta={beta}, theta={theta})"
    )))
}

/// `Xi(s) = Psi(s)/gamma(s) - 1`. `max_depth` caps the depth scan (the
/// contract allows up to 200; values past ~25 only matter as head room).
pub fn drift_xi(s: f64, beta: f64, theta: f64, max_depth: usize) -> Result<f64> {
    Ok(psi_converged(s, beta, theta, max_depth)? / drift_gamma(s, beta, theta)? - 1.0)
}

/// Evaluations on an `s` grid of the pieces of the drift-case transform.
#[derive(Debug, Clone, Serialize)]
pub struct DriftMellinState {
    pub beta: f64,
    pub s_grid: Vec<f64>,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
    pub depth: usize,
}

/// Tabulate `gamma`, `Xi` and the reconstructed `f` (up to one global
/// constant) on `s, s+1, ..., s+count`.
pub fn drift_state(
    params: &ModelParams,
    s: f64,
    count: usize,
    max_depth: usize,
) -> Result<DriftMellinState> {
    let beta = drift_beta(params);
    let theta = params.theta;
    let mut s_grid = Vec::with_capacity(count + 1);
    let mut gamma = Vec::with_capacity(count + 1);
    let mut xi = Vec::with_capacity(count + 1);
    let mut f = Vec::with_capacity(count + 1);
    let mut fk = 1.0;
    for k in 0..=count {
        let sk = s + k as f64;
        let psi = psi_converged(sk, beta, theta, max_depth)?;
        let g = drift_gamma(sk, beta, theta)?;
        s_grid.push(sk);
        gamma.push(g);
        xi.push(psi / g - 1.0);
        f.push(fk);
        if k < count {
            fk *= psi;
        }
    }
    Ok(DriftMellinState {
        beta,
        s_grid,
        gamma,
        xi,
        f,
        depth: max_depth,
    })
}

/// `M(s)` up to one global multiplicative constant:
/// `f(s) Gamma(s) (sigma^2/(2 lambda))^(s/2)`, where `f` is normalized by
/// `f(s) = gamma*^s prod_k gamma*/Psi(s+k)`; the product is truncated once
/// factors are within 1e-14 of 1 (they approach it at the `theta^-k` rate).
pub fn drift_mellin_unnormalized(s: f64, params: &ModelParams) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::param("s", format!("need s > 0, got {s}")));
    }
    let beta = drift_beta(params);
    let theta = params.theta;
    let gs = gamma_star(beta);
    let count = ((14.0 * std::f64::consts::LN_10) / theta.ln()).ceil() as usize + 8;
    let mut f = gs.powf(s);
    for k in 0..=count {
        let psi = psi_converged(s + k as f64, beta, theta, 200)?;
        let factor = gs / psi;
        f *= factor;
        if (factor - 1.0).abs() < 1e-14 && k > 2 {
            break;
        }
    }
    let c = params.sigma * params.sigma / (2.0 * params.lambda);
    Ok(f * gamma_fn(s) * c.powf(0.5 * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::mellin_density;
    use crate::model::RateCeiling;

    fn params_with_mu(mu: f64) -> ModelParams {
        ModelParams::new(mu, 3.0, 2.0, 2.0, 0.0, RateCeiling::Unbounded).unwrap()
    }

    #[test]
    fn gamma_examples() {
        // beta = 0: gamma = 1/sqrt(a)
        for s in [0.5, 1.0, 2.0, 7.0] {
            let g = drift_gamma(s, 0.0, 2.0).unwrap();
            assert!((g - 1.0 / a_of(s, 2.0).sqrt()).abs() < 1e-14);
        }
        // s -> inf: gamma -> (beta + sqrt(beta^2+4))/2
        let beta = 0.5;
        let g = drift_gamma(600.0, beta, 2.0).unwrap();
        assert!((g - (beta + (beta * beta + 4.0f64).sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_root_residual_and_monotone() {
        for beta in [0.0, 0.3, 0.5] {
            let mut prev = f64::INFINITY;
            for i in 1..200 {
                let s = 0.05 * i as f64;
                let g = drift_gamma(s, beta, 2.0).unwrap();
                let resid = (1.0 / g + beta - a_of(s, 2.0) * g).abs();
                assert!(resid < 1e-12, "s={s} beta={beta}");
                assert!(g <= prev + 1e-12, "gamma not monotone at s={s}");
                prev = g;
            }
        }
        assert!(drift_gamma(-1.0, 0.5, 2.0).is_err());
        assert!(drift_gamma(0.0, 0.5, 2.0).is_err());
    }

    // frozen with mpmath (50 digits, stable tail): Psi(1), theta = 2
    #[test]
    fn psi_reference_values() {
        for (beta, want) in [(0.25, 1.4375383476597138), (0.5, 1.6993177046998408)] {
            let got = psi_converged(1.0, beta, 2.0, 200).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-10,
                "beta={beta}: {got} want {want}"
            );
        }
    }

    #[test]
    fn psi_satisfies_defining_recursion() {
        // 1/Psi(s) + beta = a(s+1) Psi(s+1), each side from its own ladder
        let (beta, theta) = (0.5, 2.0);
        for s in [0.5, 1.0, 1.5, 2.0, 3.25] {
            let p0 = psi_converged(s, beta, theta, 200).unwrap();
            let p1 = psi_converged(s + 1.0, beta, theta, 200).unwrap();
            let lhs = 1.0 / p0 + beta;
            let rhs = a_of(s + 1.0, theta) * p1;
            assert!(((lhs - rhs) / rhs).abs() < 1e-10, "s={s}");
        }
    }

    #[test]
    fn xi_recurrence_residual() {
        // Xi(s) must be consistent with Xi(s+1) through the Moebius map
        let (beta, theta) = (0.5, 2.0);
        for s in [1.0, 1.5, 2.0] {
            let xi0 = drift_xi(s, beta, theta, 200).unwrap();
            let xi1 = drift_xi(s + 1.0, beta, theta, 200).unwrap();
            let g0 = drift_gamma(s, beta, theta).unwrap();
            let g1 = drift_gamma(s + 1.0, beta, theta).unwrap();
            let psi1 = g1 * (1.0 + xi1);
            let psi0 = 1.0 / (a_of(s + 1.0, theta) * psi1 - beta);
            let xi0_from_next = psi0 / g0 - 1.0;
            assert!((xi0 - xi0_from_next).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn mu_zero_reduces_to_closed_form() {
        // Psi at beta=0 equals the closed-form product ratio
        let theta = 2.0f64;
        let f0 = |s: f64| {
            let mut p = 1.0;
            let mut k = 0.0;
            loop {
                let f = theta.powf(-(s + 1.0 + 2.0 * k));
                if f < 1e-18 {
                    break;
                }
                p *= 1.0 - f;
                k += 1.0;
            }
            p
        };
        for s in [0.7, 1.0, 2.3, 4.0] {
            let psi = psi_converged(s, 0.0, theta, 200).unwrap();
            let want = f0(s + 1.0) / f0(s);
            assert!(((psi - want) / want).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn drift_mellin_recurrence() {
        // sigma^2 s(s+1) M(s) + 2 mu (s+1) M(s+1) = 2 lambda (1-theta^-(s+1)) M(s+2)
        // mu = beta sigma sqrt(lambda)/sqrt(2) = 1.5 -> beta = 0.5
        let p = params_with_mu(1.5);
        assert!((drift_beta(&p) - 0.5).abs() < 1e-15);
        for s in [1.0, 1.5, 2.0] {
            let m0 = drift_mellin_unnormalized(s, &p).unwrap();
            let m1 = drift_mellin_unnormalized(s + 1.0, &p).unwrap();
            let m2 = drift_mellin_unnormalized(s + 2.0, &p).unwrap();
            let lhs = p.sigma * p.sigma * s * (s + 1.0) * m0 + 2.0 * p.mu * (s + 1.0) * m1;
            let rhs = 2.0 * p.lambda * (1.0 - p.theta.powf(-(s + 1.0))) * m2;
            assert!(((lhs - rhs) / rhs).abs() < 1e-8, "s={s}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn drift_mellin_mu_zero_proportional_to_closed_form() {
        let p = params_with_mu(0.0);
        let r1 = drift_mellin_unnormalized(1.0, &p).unwrap() / mellin_density(1.0, &p, 0.0).unwrap();
        for s in [1.5, 2.0, 3.0, 4.5] {
            let r = drift_mellin_unnormalized(s, &p).unwrap() / mellin_density(s, &p, 0.0).unwrap();
            assert!(((r - r1) / r1).abs() < 1e-8, "s={s}: ratio {r} vs {r1}");
        }
    }

    #[test]
    fn drift_state_tabulates_consistently(){
        let p = params_with_mu(0.75);
        let st = drift_state(&p, 1.0, 6, 200).unwrap();
        assert_eq!(st.s_grid.len(), 7);
        // f ratios reproduce Psi = gamma (1 + Xi)
        for k in 0..6 {
            let psi = st.gamma[k] * (1.0 + st.xi[k]);
            let ratio = st.f[k + 1] / st.f[k];
            assert!(((ratio - psi) / psi).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn strong_drift_is_flagged() {
        // beta large: no depth window is stable, must refuse rather than
        // return a wrong value
        assert!(matches!(
            drift_xi(1.0, 8.0, 1.05, 200),
            Err(Error::NoConvergence(_))
        ));
    }
}
