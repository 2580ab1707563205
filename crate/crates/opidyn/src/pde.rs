//! Verification that candidate stationary densities satisfy the non-local
//! stationary ODE
//!
//! ```text
//! sigma^2 p''(x) - 2 mu p'(x) = 2 lambda(x) p(x) - 2 theta lambda(theta x) p(theta x),
//! ```
//!
//! plus the generator / adjoint pair behind it. Derivatives come from
//! central differences with Richardson extrapolation; the non-local term
//! evaluates the density at `theta x` directly.

use serde::Serialize;

use crate::error::Result;
use crate::model::{ModelParams, RateFunction};

/// Pointwise relative residuals of a density against the stationary ODE.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_rel_residual: f64,
    /// Interval around 0 excluded for singular rates (`alpha > 0`).
    pub excluded_zone: Option<(f64, f64)>,
}

/// Richardson-extrapolated central first derivative.
fn d1<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    let fine = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    (4.0 * fine - coarse) / 3.0
}

/// Richardson-extrapolated central second derivative.
fn d2<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    let coarse = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    let fine = (f(x + 0.5 * h) - 2.0 * f(x) + f(x - 0.5 * h)) / (0.25 * h * h);
    (4.0 * fine - coarse) / 3.0
}

/// Residual of the two-agent stationary ODE on a grid.
///
/// For `alpha > 0` the zone `|x| < 0.05 sigma / sqrt(2 lambda)` is excluded:
/// the rate blows up there and the relative normalization measures
/// conditioning, not correctness. The step shrinks proportionally to `|x|`
/// near 0, where higher derivatives of the density grow like powers of
/// `1/|x|` and a fixed step would leave truncation error above the target.
pub fn ode_residual<F: Fn(f64) -> f64>(
    p: F,
    rf: &RateFunction,
    params: &ModelParams,
    grid: &[f64],
    fd_step: f64,
) -> Result<ResidualReport> {
    let exclusion = if rf.alpha() > 0.0 {
        Some(0.05 * params.sigma / (2.0 * params.lambda).sqrt())
    } else {
        None
    };
    let max_p = grid.iter().map(|&x| p(x).abs()).fold(0.0f64, f64::max);
    let floor = 1e-12 * max_p;
    let mut kept = Vec::with_capacity(grid.len());
    let mut residuals = Vec::with_capacity(grid.len());
    for &x in grid {
        if let Some(z) = exclusion {
            if x.abs() < z {
                continue;
            }
        }
        let h = fd_step * x.abs().min(1.0).max(1e-6);
        let lhs =
            params.sigma * params.sigma * d2(&p, x, h) - 2.0 * params.mu * d1(&p, x, h);
        let rhs = 2.0 * rf.evaluate(x) * p(x)
            - 2.0 * params.theta * rf.evaluate(params.theta * x) * p(params.theta * x);
        let denom = lhs.abs().max(rhs.abs()).max(floor);
        kept.push(x);
        residuals.push((lhs - rhs).abs() / denom);
    }
    let max_rel = residuals.iter().copied().fold(0.0f64, f64::max);
    Ok(ResidualReport {
        grid: kept,
        residuals,
        max_rel_residual: max_rel,
        excluded_zone: exclusion.map(|z| (-z, z)),
    })
}

/// A twice-differentiable test function.
pub trait SmoothFn {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
}

/// Wrap a plain evaluator with finite-difference derivatives.
pub struct FdFn<F: Fn(f64) -> f64> {
    pub f: F,
    pub h: f64,
}

impl<F: Fn(f64) -> f64> SmoothFn for FdFn<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn d1(&self, x: f64) -> f64 {
        d1(&self.f, x, self.h)
    }
    fn d2(&self, x: f64) -> f64 {
        d2(&self.f, x, self.h)
    }
}

/// Smooth bump `exp(-1/(1-u^2))` on `|u| < 1`, `u = (x-center)/width`.
pub struct Bump {
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

impl SmoothFn for Bump {
    fn value(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
    fn d1(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - u * u;
            self.value(x) * (-2.0 * u / (q * q)) / self.width
        }
    }
    fn d2(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - u * u;
            // d/du of -2u/q^2 is (-2 q + 8 u^2 / q) / q^2 ... expanded below
            let inner = -2.0 * u / (q * q);
            let dinner = (-2.0 * q * q - (-2.0 * u) * 2.0 * q * (-2.0 * u)) / q.powi(4);
            (self.value(x) * (inner * inner + dinner)) / (self.width * self.width)
        }
    }
}

/// Infinitesimal generator applied to a test function:
/// `A f = mu f' + (sigma^2/2) f'' + (f(x/theta) - f(x)) lambda(x)`.
pub fn generator_apply(f: &dyn SmoothFn, x: f64, params: &ModelParams, rf: &RateFunction) -> f64 {
    params.mu * f.d1(x)
        + 0.5 * params.sigma * params.sigma * f.d2(x)
        + (f.value(x / params.theta) - f.value(x)) * rf.evaluate(x)
}

/// Adjoint operator:
/// `A* f = -mu f' + (sigma^2/2) f'' + theta f(theta x) lambda(theta x) - f(x) lambda(x)`.
pub fn adjoint_apply(f: &dyn SmoothFn, x: f64, params: &ModelParams, rf: &RateFunction) -> f64 {
    -params.mu * f.d1(x)
        + 0.5 * params.sigma * params.sigma * f.d2(x)
        + params.theta * f.value(params.theta * x) * rf.evaluate(params.theta * x)
        - f.value(x) * rf.evaluate(x)
}

/// Residual of the three-agent stationary ODE (constant rates `q lambda`,
/// `(1-q) lambda`, `theta = 2`, `mu = 0`, the regime the closed form
/// covers):
///
/// ```text
/// sigma^2 p'' = 2 lambda p(x) - 4 q lambda p(2x - s1) - 4 (1-q) lambda p(2x - s3).
/// ```
pub fn ode_residual_three_agent<F: Fn(f64) -> f64>(
    p: F,
    s1: f64,
    s3: f64,
    q: f64,
    params: &ModelParams,
    grid: &[f64],
    fd_step: f64,
) -> Result<ResidualReport> {
    let max_p = grid.iter().map(|&x| p(x).abs()).fold(0.0f64, f64::max);
    let floor = 1e-12 * max_p;
    let lambda = params.lambda;
    let mut residuals = Vec::with_capacity(grid.len());
    for &x in grid {
        let lhs = params.sigma * params.sigma * d2(&p, x, fd_step);
        let rhs = 2.0 * lambda * p(x)
            - 4.0 * q * lambda * p(2.0 * x - s1)
            - 4.0 * (1.0 - q) * lambda * p(2.0 * x - s3);
        let denom = lhs.abs().max(rhs.abs()).max(floor);
        residuals.push((lhs - rhs).abs() / denom);
    }
    let max_rel = residuals.iter().copied().fold(0.0f64, f64::max);
    Ok(ResidualReport {
        grid: grid.to_vec(),
        residuals,
        max_rel_residual: max_rel,
        excluded_zone: None,
    })
}

/// Standard verification grid `|x|` in `[0.05, 10]`, both signs.
pub fn standard_grid() -> Vec<f64> {
    let mut g = Vec::new();
    let mut x = 0.05;
    while x <= 10.0 {
        g.push(-x);
        g.push(x);
        x *= 1.06;
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{DensitySeries, ThreeAgentDensity};
    use crate::model::{ModelParams, RateCeiling, RateFamily};
    use crate::quad;

    fn base_params() -> ModelParams {
        ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.0, RateCeiling::Unbounded).unwrap()
    }

    #[test]
    fn exponential_density_satisfies_ode() {
        let p = base_params();
        let rf = RateFunction::new(RateFamily::C1, &p).unwrap();
        let d = DensitySeries::exponential(&p).unwrap();
        let rep = ode_residual(|x| d.eval(x), &rf, &p, &standard_grid(), 1e-2).unwrap();
        assert!(rep.max_rel_residual < 1e-6, "max {}", rep.max_rel_residual);
    }

    #[test]
    fn besselk_density_satisfies_ode() {
        let p05 = ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.5, RateCeiling::Unbounded).unwrap();
        let rf = RateFunction::new(RateFamily::C2, &p05).unwrap();
        let d = DensitySeries::bessel(&p05, 0.5).unwrap();
        let rep = ode_residual(|x| d.eval(x), &rf, &p05, &standard_grid(), 1e-2).unwrap();
        assert!(rep.max_rel_residual < 1e-6, "max {}", rep.max_rel_residual);
        assert!(rep.excluded_zone.is_some());
    }

    #[test]
    fn perturbed_density_fails() {
        let p = base_params();
        let rf = RateFunction::new(RateFamily::C1, &p).unwrap();
        let d = DensitySeries::exponential(&p).unwrap();
        let rep = ode_residual(
            |x| d.eval(x) * (1.0 + 0.01 * x * x),
            &rf,
            &p,
            &standard_grid(),
            1e-2,
        )
        .unwrap();
        assert!(rep.max_rel_residual > 1e-3, "max {}", rep.max_rel_residual);
    }

    #[test]
    fn richardson_step_consistency() {
        // halving the step barely moves a converged residual
        let p = base_params();
        let rf = RateFunction::new(RateFamily::C1, &p).unwrap();
        let d = DensitySeries::exponential(&p).unwrap();
        let grid = standard_grid();
        let a = ode_residual(|x| d.eval(x), &rf, &p, &grid, 1e-2).unwrap();
        let b = ode_residual(|x| d.eval(x), &rf, &p, &grid, 5e-3).unwrap();
        assert!(a.max_rel_residual < 1e-6);
        assert!(b.max_rel_residual < 1e-5);
    }

    #[test]
    fn generator_examples() {
        let p = base_params();
        let rf = RateFunction::new(RateFamily::C1, &p).unwrap();
        struct Poly(u32);
        impl SmoothFn for Poly {
            fn value(&self, x: f64) -> f64 {
                x.powi(self.0 as i32)
            }
            fn d1(&self, x: f64) -> f64 {
                self.0 as f64 * x.powi(self.0 as i32 - 1)
            }
            fn d2(&self, x: f64) -> f64 {
                (self.0 * (self.0 - 1)) as f64 * x.powi(self.0 as i32 - 2)
            }
        }
        struct Const;
        impl SmoothFn for Const {
            fn value(&self, _x: f64) -> f64 {
                3.0
            }
            fn d1(&self, _x: f64) -> f64 {
                0.0
            }
            fn d2(&self, _x: f64) -> f64 {
                0.0
            }
        }
        // generator kills constants
        assert_eq!(generator_apply(&Const, 1.7, &p, &rf), 0.0);
        // f(x) = x: A f = -lambda x / theta'
        let x = 1.3;
        let got = generator_apply(&Poly(1), x, &p, &rf);
        let want = -p.lambda * x / p.theta_prime();
        assert!((got - want).abs() < 1e-12);
        // f(x) = x^2: A f = sigma^2 + lambda x^2 (1/theta^2 - 1)
        let got = generator_apply(&Poly(2), x, &p, &rf);
        let want = p.sigma * p.sigma + p.lambda * x * x * (1.0 / (p.theta * p.theta) - 1.0);
        assert!((got - want).abs() < 1e-12);
        // adjoint on constants: c lambda (theta - 1)
        let got = adjoint_apply(&Const, x, &p, &rf);
        assert!((got - 3.0 * p.lambda * (p.theta - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn adjointness_identity() {
        // <A f, g> = <f, A* g> for compactly supported smooth bumps
        let p = base_params();
        for rf in [
            RateFunction::new(RateFamily::C1, &p).unwrap(),
            RateFunction::new(
                RateFamily::C3,
                &ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.7, RateCeiling::Bounded(25.0)).unwrap(),
            )
            .unwrap(),
        ] {
            let pairs = [
                (Bump { center: 1.0, width: 2.0 }, Bump { center: 0.5, width: 1.5 }),
                (Bump { center: -2.0, width: 1.0 }, Bump { center: -1.0, width: 2.5 }),
                (Bump { center: 0.0, width: 3.0 }, Bump { center: 2.0, width: 1.0 }),
                (Bump { center: 3.0, width: 0.8 }, Bump { center: 1.5, width: 1.2 }),
                (Bump { center: -0.7, width: 1.7 }, Bump { center: -0.2, width: 0.9 }),
            ];
            for (f, g) in pairs {
                // integrate over tight support hulls; a wide interval can
                // alias narrow bumps past the adaptive sampler entirely.
                // supp(Af) adds the stretched set theta * supp(f);
                // supp(A*g) adds the shrunken set supp(g) / theta.
                let (fl, fu) = f.support();
                let (gl, gu) = g.support();
                let th = p.theta;
                let (al, au) = (fl.min(th * fl).min(fl / th), fu.max(th * fu).max(fu / th));
                let (lo, hi) = (al.max(gl) - 0.1, au.min(gu) + 0.1);
                let lhs = if lo < hi {
                    quad::integrate(|x| generator_apply(&f, x, &p, &rf) * g.value(x), lo, hi, 1e-12)
                } else {
                    0.0
                };
                let (sl, su) = (gl.min(th * gl).min(gl / th), gu.max(th * gu).max(gu / th));
                let (lo, hi) = (sl.max(fl) - 0.1, su.min(fu) + 0.1);
                let rhs = if lo < hi {
                    quad::integrate(|x| f.value(x) * adjoint_apply(&g, x, &p, &rf), lo, hi, 1e-12)
                } else {
                    0.0
                };
                assert!(
                    (lhs - rhs).abs() < 1e-8,
                    "\"<Af,g>\" {lhs} vs \"<f,A*g>\" {rhs}"
                );
            }
        }
    }

    #[test]
    fn adjoint_annihilates_the_stationary_density() {
        let p = base_params();
        let rf = RateFunction::new(RateFamily::C1, &p).unwrap();
        let d = DensitySeries::exponential(&p).unwrap();
        let f = FdFn { f: |x: f64| d.eval(x), h: 1e-2 };
        for &x in &[0.3, 1.0, 2.5, -1.7] {
            let got = adjoint_apply(&f, x, &p, &rf);
            // A* p = 0 at stationarity; scale by the local ODE terms
            let scale = p.lambda * d.eval(x);
            assert!((got / scale).abs() < 1e-6, "x={x}: {got}");
        }
    }

    #[test]
    fn three_agent_ode_residual() {
        let p = ModelParams::new(0.0, 2.0, 2.0, 3.0, 0.0, RateCeiling::Unbounded).unwrap();
        let t = ThreeAgentDensity::new(&p, 0.0, 1.0).unwrap();
        let grid: Vec<f64> = (-80..=90).map(|i| 0.1 * i as f64).collect();
        let rep =
            ode_residual_three_agent(|x| t.density(x), 0.0, 1.0, 0.5, &p, &grid, 1e-2).unwrap();
        assert!(rep.max_rel_residual < 1e-5, "max {}", rep.max_rel_residual);

        // perturbation is detected
        let rep = ode_residual_three_agent(
            |x| t.density(x) * (1.0 + 0.01 * x * x),
            0.0,
            1.0,
            0.5,
            &p,
            &grid,
            1e-2,
        )
        .unwrap();
        assert!(rep.max_rel_residual > 1e-3);
    }

    #[test]
    fn three_agent_degenerate_spacing_matches_two_agent() {
        // s3 -> s1: the uniform kernel collapses and the ODE reduces to the
        // two-agent one with a recentered density
        let p = ModelParams::new(0.0, 2.0, 2.0, 3.0, 0.0, RateCeiling::Unbounded).unwrap();
        let d = DensitySeries::exponential(&p).unwrap();
        let s1 = 0.6;
        let grid: Vec<f64> = (-60..=70).map(|i| 0.1 * i as f64).collect();
        let rep = ode_residual_three_agent(
            |x| d.eval(x - s1),
            s1,
            s1 + 1e-12, // degenerate spacing, kernel ~ point mass at s1
            0.5,
            &p,
            &grid,
            1e-2,
        )
        .unwrap();
        assert!(rep.max_rel_residual < 1e-4, "max {}", rep.max_rel_residual);
    }
}
