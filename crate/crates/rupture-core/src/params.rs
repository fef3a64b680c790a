/*!
The parameter triple (α, p, λ) and the closed-form scalar layer.

Everything downstream is phrased in terms of `β = (α+2)/(p+1)` and the
angular ODE `w'' + β²w − λ/w^p = 0`, whose unique constant solution is
`m₀ = (λ/β²)^{1/(p+1)}`. First integrals use

```text
h(x) = λ/((p−1)·x^{p−1})   (p ≠ 1),      −λ·ln x   (p = 1),
g(w) = β²w² + 2h(w),
(w')² + g(w) = E            (the phase constant),
```

`g` is strictly convex with its minimum `E₀ = g(m₀)` at `m₀`; each level
`E > E₀` cuts out one orbit with extrema `w₁ < m₀ < w₂`. Orbits are
parametrized by the amplitude ratio `τ = w₂/w₁ ≥ 1`, with the closed form

```text
w₁^{p+1} = 2λ(1−τ^{1−p}) / (β²(p−1)(τ²−1))   (p ≠ 1),
w₁²      = 2λ·ln τ / (β²(τ²−1))               (p = 1),
```

degenerating to `w₁ = m₀` as `τ → 1`.
*/

use crate::{Error, Result};

/// Below this value of `τ − 1`, closed forms that are 0/0 at `τ = 1`
/// (the `w₁` formula, the period and energy integrals) are replaced by
/// their analytic limits.
pub const TAU_LIMIT_THRESHOLD: f64 = 1e-6;

/// Width of the ill-conditioning window around p = 1: inside it (but off
/// the exact branch) the `(p−1)` denominators of `h` and the `w₁` formula
/// lose up to eight digits.
pub const P_ILL_CONDITION_WINDOW: f64 = 1e-8;

/// The problem parameters (α, p, λ) plus the derived β and m₀.
#[derive(Copy, Clone, Debug, PartialEq, serde::Serialize)]
pub struct ProblemParams {
    /// Exponent of the radial weight |x|^α; α > −2.
    pub alpha: f64,
    /// Negative-exponent power; p > 0. `p == 1` and `p == 3` select exact
    /// closed-form branches.
    pub p: f64,
    /// Load parameter; λ > 0.
    pub lambda: f64,
    /// β = (α+2)/(p+1).
    pub beta: f64,
    /// The constant solution m₀ = (λ/β²)^{1/(p+1)}.
    pub m0: f64,
    /// True when 0 < |p−1| < [`P_ILL_CONDITION_WINDOW`]: results are
    /// returned but carry roughly eight fewer digits.
    pub ill_conditioned_p: bool,
}

impl ProblemParams {
    /// Validate and derive. Rejects α ≤ −2, p ≤ 0, λ ≤ 0 and non-finite
    /// input.
    pub fn new(alpha: f64, p: f64, lambda: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -2.0 {
            return Err(Error::Domain(format!("alpha must be finite and > -2 (got {alpha})")));
        }
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Domain(format!("p must be finite and > 0 (got {p})")));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::Domain(format!("lambda must be finite and > 0 (got {lambda})")));
        }
        let beta = (alpha + 2.0) / (p + 1.0);
        let m0 = (lambda / (beta * beta)).powf(1.0 / (p + 1.0));
        let dp = (p - 1.0).abs();
        Ok(Self {
            alpha,
            p,
            lambda,
            beta,
            m0,
            ill_conditioned_p: dp > 0.0 && dp < P_ILL_CONDITION_WINDOW,
        })
    }

    /// Antiderivative piece of the nonlinearity:
    /// `λ/((p−1)x^{p−1})` for p ≠ 1, `−λ·ln x` for p = 1.
    pub fn h(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("h requires x > 0 (got {x})")));
        }
        if self.p == 1.0 {
            Ok(-self.lambda * x.ln())
        } else {
            Ok(self.lambda / ((self.p - 1.0) * x.powf(self.p - 1.0)))
        }
    }

    /// The orbit potential `g(w) = β²w² + 2h(w)`: strictly decreasing on
    /// (0, m₀), strictly increasing on (m₀, ∞).
    pub fn g(&self, w: f64) -> Result<f64> {
        if !(w > 0.0) {
            return Err(Error::Domain(format!("g requires w > 0 (got {w})")));
        }
        Ok(self.beta * self.beta * w * w + 2.0 * self.h(w)?)
    }

    /// The minimum of `g`, i.e. the phase constant of the degenerate orbit:
    /// `E₀ = (p+1)/(p−1)·λ^{2/(p+1)}·β^{2(p−1)/(p+1)}` for p ≠ 1,
    /// `λ(1 − ln(λ/β²))` for p = 1.
    pub fn phase_constant_e0(&self) -> f64 {
        let b2 = self.beta * self.beta;
        if self.p == 1.0 {
            self.lambda * (1.0 - (self.lambda / b2).ln())
        } else {
            (self.p + 1.0) / (self.p - 1.0)
                * self.lambda.powf(2.0 / (self.p + 1.0))
                * b2.powf((self.p - 1.0) / (self.p + 1.0))
        }
    }

    /// Orbit minimum `w₁(τ)`. Continuous at τ = 1 (returns m₀ there and
    /// for `τ − 1 <` [`TAU_LIMIT_THRESHOLD`], where the closed form is
    /// 0/0).
    pub fn w_min_of_tau(&self, tau: f64) -> Result<f64> {
        if !(tau >= 1.0) {
            return Err(Error::Domain(format!("w_min_of_tau requires tau >= 1 (got {tau})")));
        }
        if tau - 1.0 < TAU_LIMIT_THRESHOLD {
            return Ok(self.m0);
        }
        // τ²−1 as (τ−1)(τ+1): no cancellation for τ near 1.
        let tsq1 = (tau - 1.0) * (tau + 1.0);
        if self.p == 1.0 {
            Ok(self.m0 * (2.0 * tau.ln() / tsq1).sqrt())
        } else {
            // 1 − τ^{1−p} = −expm1((1−p)·ln τ), exact through the sign
            // change of (1−p); the ratio below is positive for all p > 0.
            let s_tau = -((1.0 - self.p) * tau.ln()).exp_m1();
            let b = 2.0 * s_tau / ((self.p - 1.0) * tsq1);
            Ok(self.m0 * b.powf(1.0 / (self.p + 1.0)))
        }
    }

    /// Right-hand side `Q(w) = −β²w + λ/w^p` of the angular ODE
    /// `w'' = Q(w)`; vanishes at m₀ with `Q'(m₀) = −(p+1)β²`.
    pub fn ode_rhs_q(&self, w: f64) -> Result<f64> {
        if !(w > 0.0) {
            return Err(Error::Domain(format!("ode_rhs_q requires w > 0 (got {w})")));
        }
        Ok(-self.beta * self.beta * w + self.lambda * w.powf(-self.p))
    }

    /// Assemble the orbit with amplitude ratio τ: extrema, phase constant,
    /// and half-period (computed by [`crate::period::half_period`]).
    pub fn make_orbit(&self, tau: f64) -> Result<OrbitSpec> {
        let w1 = self.w_min_of_tau(tau)?;
        let degenerate = tau - 1.0 < TAU_LIMIT_THRESHOLD;
        let w2 = if degenerate { w1 } else { tau * w1 };
        let phase_constant = if degenerate { self.phase_constant_e0() } else { self.g(w1)? };
        let half_period = crate::period::half_period(tau, self)?;
        Ok(OrbitSpec { tau, w1, w2, phase_constant, half_period })
    }
}

/// A phase-plane orbit of `w'' + β²w − λ/w^p = 0`, identified by its
/// amplitude ratio.
#[derive(Copy, Clone, Debug, PartialEq, serde::Serialize)]
pub struct OrbitSpec {
    /// Amplitude ratio `w₂/w₁ ≥ 1`; τ = 1 is the constant orbit at m₀.
    pub tau: f64,
    /// Orbit minimum.
    pub w1: f64,
    /// Orbit maximum, `w₂ = τ·w₁`.
    pub w2: f64,
    /// The conserved value `E = (w')² + g(w)` along the orbit; equals
    /// `g(w₁) = g(w₂)` and exceeds `E₀` strictly for τ > 1.
    pub phase_constant: f64,
    /// Minimal half-period `L(τ)` (time between consecutive extrema).
    pub half_period: f64,
}
