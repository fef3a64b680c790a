/*!
The minimal half-period L(τ) of the orbit through (w₁, w₂) = (w₁, τw₁),
its τ → 1 and τ → ∞ limits, and the inverse map from a target period.

After the substitutions y = w/w₁ and ξ = (y−1)/(τ−1), the half-period
becomes an integral over the unit interval with inverse-square-root
endpoint singularities,

```text
β L(τ) = ∫₀¹ (τ−1) / √D(ξ) dξ,    D = (z(τ) − z(Y)) · (1 − Y^{1−p}),
Y = 1 + ξ(τ−1),                    z(y) = (y²−1)/(1−y^{1−p}),
```

(for p = 1 replace 1−y^{1−p} by ln y throughout). D vanishes linearly at
both endpoints, which tanh-sinh quadrature absorbs; the numerical work is
in evaluating D without cancellation, see [`OrbitIntegrand::radicand_y`].
*/

use crate::params::{ProblemParams, TAU_LIMIT_THRESHOLD};
use crate::quadrature::integrate_singular;
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Tolerance passed to the quadrature for all period integrals. Tighter
/// than the quadrature default because the inverse map bisects on these
/// values and the round-trip contract is 1e−10 relative.
pub const PERIOD_QUAD_TOL: f64 = 1e-12;

/// Bisection bracket for [`tau_for_period`], in τ−1. Outside this range
/// L(τ) is within ~1e−10 of one of its limits, so any target that needs
/// τ beyond the bracket is reported as out of range rather than chased.
const TAU_BRACKET: (f64, f64) = (1e-9, 1e14);

/// Precomputed τ- and p-dependent constants for the radicand D and the
/// weight Y^{1−p}, shared by the period and energy integrals.
pub(crate) struct OrbitIntegrand {
    pub(crate) tau: f64,
    pub(crate) p: f64,
    /// q = 1 − p (the exponent of the nonlinearity after substitution).
    pub(crate) q: f64,
    pub(crate) tau_minus_1: f64,
    /// (τ−1)(τ+1), kept factored for accuracy near τ = 1.
    pub(crate) tau_sq_minus_1: f64,
    pub(crate) ln_tau: f64,
    /// s_τ = 1 − τ^q, via expm1 so it stays accurate as p → 1.
    pub(crate) s_tau: f64,
    pub(crate) tau_pow_q: f64,
    /// z(τ) for p ≠ 1, (τ²−1)/ln τ for p = 1.
    pub(crate) z_tau: f64,
}

impl OrbitIntegrand {
    pub(crate) fn new(tau: f64, p: f64) -> Self {
        debug_assert!(tau > 1.0 && p > 0.0);
        let q = 1.0 - p;
        let tau_minus_1 = tau - 1.0;
        let tau_sq_minus_1 = tau_minus_1 * (tau + 1.0);
        let ln_tau = tau.ln();
        let s_tau = -f64::exp_m1(q * ln_tau);
        let tau_pow_q = f64::exp(q * ln_tau);
        let z_tau =
            if p == 1.0 { tau_sq_minus_1 / ln_tau } else { tau_sq_minus_1 / s_tau };
        Self { tau, p, q, tau_minus_1, tau_sq_minus_1, ln_tau, s_tau, tau_pow_q, z_tau }
    }

    /// D as a function of the distances e = y−1, d = τ−y (one of which
    /// may be far below an ulp of y, so neither is recomputed from y).
    ///
    /// Two algebraically identical forms are used, each on the half of
    /// the interval where it is subtraction-free:
    ///
    /// - near y = τ (d ≤ e), the expanded numerator
    ///   `N = −(τ²−1)·τ^q·expm1(q·log1p(−d/τ)) + s_τ·d·(τ+y)` with
    ///   `D = N/s_τ`; N is a sum of two O(d) terms here, whereas the
    ///   factored form would subtract z at two nearby points;
    /// - near y = 1 (e < d), the factored form with
    ///   `z(y) = e(y+1)/(−expm1(q·log1p(e)))`, which resolves the 0/0 at
    ///   y = 1 exactly; the expanded N would be an O(e) difference of
    ///   two O(1) terms there (and its expm1 argument can overflow for
    ///   large p).
    ///
    /// The p = 1 limits of both forms replace (1−y^q)/q by ln y.
    pub(crate) fn radicand_y(&self, e: f64, d: f64) -> f64 {
        let y = 1.0 + e;
        if self.p == 1.0 {
            if d <= e {
                let n1 = self.tau_sq_minus_1 * f64::ln_1p(-d / self.tau)
                    + self.ln_tau * d * (self.tau + y);
                n1 / self.ln_tau
            } else {
                let ln_y = f64::ln_1p(e);
                let z_y = e * (y + 1.0) / ln_y;
                (self.z_tau - z_y) * ln_y
            }
        } else if d <= e {
            let n = -self.tau_sq_minus_1
                * self.tau_pow_q
                * f64::exp_m1(self.q * f64::ln_1p(-d / self.tau))
                + self.s_tau * d * (self.tau + y);
            n / self.s_tau
        } else {
            // 1 − y^q and z(y), both safe as e → 0.
            let one_minus_ypq = -f64::exp_m1(self.q * f64::ln_1p(e));
            let z_y = e * (y + 1.0) / one_minus_ypq;
            (self.z_tau - z_y) * one_minus_ypq
        }
    }

    /// D on the ξ ∈ [0,1] grid: distances scale by τ−1.
    pub(crate) fn radicand(&self, da: f64, db: f64) -> f64 {
        self.radicand_y(da * self.tau_minus_1, db * self.tau_minus_1)
    }

    pub(crate) fn ln_y_of_xi(&self, da: f64) -> f64 {
        f64::ln_1p(da * self.tau_minus_1)
    }

    /// Y^{1−p}, the weight of the energy integrand.
    pub(crate) fn y_pow_q_of_xi(&self, da: f64) -> f64 {
        f64::exp(self.q * self.ln_y_of_xi(da))
    }
}

/// β·L(τ), which depends on (τ, p) only. Callers that have a full
/// parameter set should prefer [`half_period`].
pub(crate) fn beta_half_period(tau: f64, p: f64) -> Result<f64> {
    if !tau.is_finite() || tau < 1.0 {
        return Err(Error::Domain(format!("half_period requires 1 <= tau < inf (got {tau})")));
    }
    // Isochrony: every orbit of the p = 3 problem has the same period.
    if p == 3.0 {
        return Ok(FRAC_PI_2);
    }
    // Near the constant solution the normalization degenerates like
    // (τ−1)²; the limit value is accurate to ~(τ−1)² there, far below
    // the quadrature tolerance at this threshold.
    if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        return Ok(PI / (p + 1.0).sqrt());
    }
    let orbit = OrbitIntegrand::new(tau, p);
    let quad = integrate_singular(
        |_x, da, db| orbit.tau_minus_1 / orbit.radicand(da, db).sqrt(),
        0.0,
        1.0,
        PERIOD_QUAD_TOL,
    )?;
    Ok(quad.value)
}

/// The minimal half-period L(τ) of the orbit with amplitude ratio τ.
pub fn half_period(tau: f64, params: &ProblemParams) -> Result<f64> {
    Ok(beta_half_period(tau, params.p)? / params.beta)
}

/// The pair (L(1⁺), L(∞)) = (π/(√(p+1)β), π/(min{p+1, 2}β)). L is
/// strictly monotone between them: decreasing for p < 3, increasing for
/// p > 3, constant at p = 3 (where the pair degenerates).
pub fn period_limits(params: &ProblemParams) -> (f64, f64) {
    let b = params.beta;
    let p = params.p;
    (PI / ((p + 1.0).sqrt() * b), PI / ((p + 1.0).min(2.0) * b))
}

/// The unique τ with L(τ) = `target_l`, by bisection in ln(τ−1) over
/// [`TAU_BRACKET`]. Requires p ≠ 3 and a target strictly between the two
/// period limits.
pub fn tau_for_period(target_l: f64, params: &ProblemParams) -> Result<f64> {
    if params.p == 3.0 {
        return Err(Error::Domain(
            "tau_for_period is undefined at p = 3 (isochronous: L does not depend on tau)"
                .into(),
        ));
    }
    let (l_one, l_inf) = period_limits(params);
    let (l_min, l_max) = if l_one < l_inf { (l_one, l_inf) } else { (l_inf, l_one) };
    if !(target_l > l_min && target_l < l_max) {
        return Err(Error::PeriodOutOfRange { target: target_l, lo: l_min, hi: l_max });
    }

    let tau_of = |s: f64| 1.0 + s.exp();
    let mut s_lo = TAU_BRACKET.0.ln();
    let mut s_hi = TAU_BRACKET.1.ln();
    let f_lo = half_period(tau_of(s_lo), params)? - target_l;
    let f_hi = half_period(tau_of(s_hi), params)? - target_l;
    if (f_lo > 0.0) == (f_hi > 0.0) {
        // Strictly between the limits but beyond the bracket: the target
        // is closer to L(∞) than L(1e14) is. Report the reachable range.
        let (r_lo, r_hi) = (f_lo + target_l, f_hi + target_l);
        return Err(Error::PeriodOutOfRange {
            target: target_l,
            lo: r_lo.min(r_hi),
            hi: r_lo.max(r_hi),
        });
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..60 {
        let s_mid = 0.5 * (s_lo + s_hi);
        let f_mid = half_period(tau_of(s_mid), params)? - target_l;
        if f_mid == 0.0 {
            return Ok(tau_of(s_mid));
        }
        if (f_mid > 0.0) == lo_positive {
            s_lo = s_mid;
        } else {
            s_hi = s_mid;
        }
        if s_hi - s_lo < 1e-14 {
            break;
        }
    }
    Ok(tau_of(0.5 * (s_lo + s_hi)))
}
