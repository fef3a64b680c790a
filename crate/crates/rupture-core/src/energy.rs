//! The energy functional on the solution set and its reduced forms.
//!
//! Multiplying `w'' + β²w − λ/w^p = 0` by `w` and integrating over the
//! circle collapses the functional
//!
//! ```text
//!   E(w) = ∫_{S¹} ½(w')² − ½β²w² − h(w) dθ
//! ```
//!
//! to a function of the amplitude ratio alone:
//!
//! ```text
//!   E(τ) = πλ(1+p)/(1−p) · (λ/β²)^{(1−p)/(p+1)} · F(τ)       (p ≠ 1)
//!   E(τ) = −πλ + 2πλ ln√(λ/β²) + 2πλ F₁(τ)                   (p = 1)
//! ```
//!
//! with `F(τ) = H(τ)/(βL(τ))`, where `H` is a singular integral over the
//! normalized orbit and `L` the minimal half-period. Both `F` and `F₁`
//! depend only on `(p, τ)` — neither λ nor α enters them.
//!
//! The functions here compute `H`, `F`, `F₁`, the τ→∞ constant `C(p)`
//! for `p < 1`, both energy routes (the reduced formula above and the
//! direct mean of the density along a freshly integrated orbit), energies
//! of whole solution components, and monotonicity sweeps in τ. The `H`
//! integral is evaluated twice over different variables (ξ on `[0, 1]`
//! and y on `[1, τ]`) so the two routes can serve as mutual checks, and
//! at `p = 2` a third, closed-form route through the complete elliptic
//! integral is available.

use crate::params::{ProblemParams, TAU_LIMIT_THRESHOLD};
use crate::period::{beta_half_period, half_period, tau_for_period, OrbitIntegrand};
use crate::profile::{dp5_step, OrbitProfile};
use crate::quadrature::{elliptic_k, integrate_singular};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Quadrature tolerance for the `H`/`F₁` integrals.
const ENERGY_QUAD_TOL: f64 = 1e-12;

/// Steps of the fixed-step integrator behind [`e_direct`].
const DIRECT_STEPS: usize = 4096;

/// Tolerance used by sweeps to flag departure from constancy at `p = 3`.
pub const P3_CONSTANCY_TOL: f64 = 1e-9;

/// Everything the energy theory knows about one orbit.
///
/// `f` holds `F(τ)` for `p ≠ 1` and `F₁(τ)` for `p = 1`; `h` is `None`
/// in the latter case because `F₁` is not a ratio of `H` to `βL`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyReport {
    pub tau: f64,
    pub f: f64,
    pub h: Option<f64>,
    /// Energy through the reduced formula.
    pub e_via_f: f64,
    /// Energy as the circle mean of the density along the orbit.
    pub e_direct: f64,
    /// Minimal half-period `L(τ)`.
    pub l: f64,
}

/// A connected component of the solution set: the constant solution, or
/// the family of solutions with `j` full oscillations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Component {
    Trivial,
    Frequency(u32),
}

/// Trapezoidal evaluation of `E(w) = ∫ ½(w')² − ½β²w² − h(w) dθ` on the
/// profile's periodic grid, with `w'` by centered differences. Second
/// order in the grid spacing; for machine-accurate energies of an orbit
/// use [`e_direct`], which does not differentiate sampled data.
pub fn energy_functional(profile: &OrbitProfile, params: &ProblemParams) -> f64 {
    energy_of_samples(&profile.values, params)
}

/// The same trapezoidal functional on a bare periodic sample row (the
/// cylinder solver evaluates it slice by slice).
pub(crate) fn energy_of_samples(w: &[f64], params: &ProblemParams) -> f64 {
    let n = w.len();
    let h = 2.0 * PI / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let d = (w[(k + 1) % n] - w[(k + n - 1) % n]) / (2.0 * h);
        let pot = params.h(w[k]).expect("profile values are positive");
        sum += 0.5 * d * d - 0.5 * params.beta * params.beta * w[k] * w[k] - pot;
    }
    sum * h
}

/// `H(τ)`: the numerator of `F` as a singular integral in `ξ ∈ [0, 1]`,
///
/// ```text
///   H(τ) = B^{(1−p)/(p+1)} ∫₀¹ Y^{1−p} (τ−1) / √D(ξ) dξ,
///   Y = 1 + ξ(τ−1),   B = 2(1−τ^{1−p})/((p−1)(τ²−1)),
/// ```
///
/// sharing the radicand `D` with the period integral. Requires `p ≠ 1`.
/// Below the τ→1 resolution threshold the analytic limit `π/√(p+1)` is
/// returned, mirroring the half-period's handling of that corner.
pub fn h_of_tau(tau: f64, params: &ProblemParams) -> Result<f64> {
    let p = params.p;
    if p == 1.0 {
        return Err(Error::Domain("H(τ) is defined for p ≠ 1; use f1_of_tau at p = 1".into()));
    }
    if !(tau >= 1.0) {
        return Err(Error::Domain(format!("H(τ) needs τ ≥ 1 (got {tau})")));
    }
    if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        return Ok(PI / (p + 1.0).sqrt());
    }
    let ig = OrbitIntegrand::new(tau, p);
    let a = b_of_tau(&ig).powf((1.0 - p) / (p + 1.0));
    let tm1 = tau - 1.0;
    // The amplitude factor a stays inside the integrand so the stopping
    // test sees values on H's own scale; at large τ the bare ξ-integral
    // can be many orders smaller than H and would otherwise be declared
    // converged against an absolute yardstick.
    let integral = integrate_singular(
        |_xi, da, db| a * ig.y_pow_q_of_xi(da) * tm1 / ig.radicand(da, db).sqrt(),
        0.0,
        1.0,
        ENERGY_QUAD_TOL,
    )?;
    Ok(integral.value)
}

/// `B(τ) = 2(1−τ^{1−p})/((p−1)(τ²−1))`, written through the integrand's
/// cancellation-free `s_τ = 1−τ^{1−p}`.
fn b_of_tau(ig: &OrbitIntegrand) -> f64 {
    2.0 * ig.s_tau / ((ig.p - 1.0) * (ig.tau - 1.0) * (ig.tau + 1.0))
}

/// `H(τ)` again, as the y-integral `A(τ)∫₁^τ y^{1−p}/√I(y,τ) dy` with
/// `I = (z(τ)−z(y))(1−y^{1−p})`. Same analytic content as [`h_of_tau`]
/// but a separate code path in a different variable, with its own node
/// placement — kept as a cross-check of the ξ-substitution and of the
/// amplitude normalization.
pub fn h_of_tau_via_y(tau: f64, params: &ProblemParams) -> Result<f64> {
    let p = params.p;
    if p == 1.0 {
        return Err(Error::Domain("H(τ) is defined for p ≠ 1".into()));
    }
    if !(tau - 1.0 >= TAU_LIMIT_THRESHOLD) {
        return Err(Error::Domain(format!("the y-form needs τ bounded away from 1 (got {tau})")));
    }
    let q = 1.0 - p;
    let s_tau = -f64::exp_m1(q * tau.ln());
    let tau_sq_m1 = (tau - 1.0) * (tau + 1.0);
    let z_tau = tau_sq_m1 / s_tau;
    let a = (2.0 * s_tau / ((p - 1.0) * tau_sq_m1)).powf(q / (p + 1.0));
    // I(y) vanishes at both ends; each endpoint needs the subtraction
    // done in the variable that is small there.
    let radicand = |y: f64, da: f64, db: f64| -> f64 {
        let s_y = -f64::exp_m1(q * f64::ln_1p(da));
        if da <= db {
            // y near 1: z(y) = (y−1)(y+1)/s_y is well conditioned.
            let z_y = if da == 0.0 { 2.0 / (p - 1.0) } else { da * (y + 1.0) / s_y };
            (z_tau - z_y) * s_y
        } else {
            // y near τ: difference the τ- and y-powers directly.
            let s_diff = -tau.powf(q) * f64::exp_m1(q * f64::ln_1p(-db / tau));
            (tau_sq_m1 * s_diff + s_tau * db * (tau + y)) / s_tau
        }
    };
    let integral = integrate_singular(
        |y, da, db| {
            let y_pow_q = (q * f64::ln_1p(da)).exp();
            a * y_pow_q / radicand(y, da, db).sqrt()
        },
        1.0,
        tau,
        1e-11,
    )?;
    Ok(integral.value)
}

/// The `p = 2` closed form `H(τ) = (τ(τ+1)/2)^{1/3} · 2/√(τ(τ+2)) ·
/// K(k²)` with `k² = (τ²−1)/(τ(τ+2))` — the elliptic-integral route that
/// unlocks the `1 < p < 3` asymptotics. Independent of all quadrature
/// here (K comes from the arithmetic-geometric mean).
pub fn h_elliptic_p2(tau: f64) -> Result<f64> {
    if !(tau >= 1.0) {
        return Err(Error::Domain(format!("τ ≥ 1 required (got {tau})")));
    }
    let a = (tau * (tau + 1.0) / 2.0).powf(1.0 / 3.0);
    let g = 2.0 / (tau * (tau + 2.0)).sqrt();
    let k2 = (tau * tau - 1.0) / (tau * (tau + 2.0));
    Ok(a * g * elliptic_k(k2)?)
}

/// `F(τ) = H(τ)/(βL(τ))` for `p ≠ 1`; exactly `1` at `τ = 1` (and below
/// the τ−1 resolution threshold, where both factors sit at their limits).
pub fn f_of_tau(tau: f64, params: &ProblemParams) -> Result<f64> {
    let p = params.p;
    if p == 1.0 {
        return Err(Error::Domain("F(τ) is defined for p ≠ 1; use f1_of_tau at p = 1".into()));
    }
    if !(tau >= 1.0) {
        return Err(Error::Domain(format!("F(τ) needs τ ≥ 1 (got {tau})")));
    }
    if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        return Ok(1.0);
    }
    Ok(h_of_tau(tau, params)? / beta_half_period(tau, p)?)
}

/// `F₁(τ)` for `p = 1`: the weighted mean of `ln[√(2lnτ/(τ²−1)) · Y]`
/// along the orbit,
///
/// ```text
///   F₁(τ) = ½ ln(2lnτ/(τ²−1)) + ∫₀¹ lnY (τ−1)/√D₁ dξ / (βL(τ)),
/// ```
///
/// zero at `τ = 1` and below the resolution threshold.
pub fn f1_of_tau(tau: f64, params: &ProblemParams) -> Result<f64> {
    if params.p != 1.0 {
        return Err(Error::Domain("F₁(τ) is defined only for p = 1".into()));
    }
    if !(tau >= 1.0) {
        return Err(Error::Domain(format!("F₁(τ) needs τ ≥ 1 (got {tau})")));
    }
    if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        return Ok(0.0);
    }
    let ig = OrbitIntegrand::new(tau, 1.0);
    let tm1 = tau - 1.0;
    let i1 = 0.5 * (2.0 * tau.ln() / ((tau - 1.0) * (tau + 1.0))).ln();
    let numerator = integrate_singular(
        |_xi, da, db| ig.ln_y_of_xi(da) * tm1 / ig.radicand(da, db).sqrt(),
        0.0,
        1.0,
        ENERGY_QUAD_TOL,
    )?;
    Ok(i1 + numerator.value / beta_half_period(tau, 1.0)?)
}

/// `C(p) = (p+1)/π · H(+∞)` for `0 < p < 1`, with
///
/// ```text
///   H(+∞) = (2/(1−p))^{(1−p)/(p+1)} ∫₀¹ ξ^{(1−p)/2} / √(1−ξ^{1+p}) dξ.
/// ```
///
/// `F(τ) → C(p) > 1` as τ → ∞ in this range, so the energy tends to
/// `C(p)` times the trivial solution's energy.
pub fn c_of_p(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("C(p) is defined for 0 < p < 1 (got {p})")));
    }
    let prefactor = (2.0 / (1.0 - p)).powf((1.0 - p) / (p + 1.0));
    let half_q = 0.5 * (1.0 - p);
    let integral = integrate_singular(
        |_xi, da, db| {
            let numerator = (half_q * da.ln()).exp();
            let one_minus_pow = if db < 0.5 {
                -f64::exp_m1((1.0 + p) * f64::ln_1p(-db))
            } else {
                -f64::exp_m1((1.0 + p) * da.ln())
            };
            numerator / one_minus_pow.sqrt()
        },
        0.0,
        1.0,
        ENERGY_QUAD_TOL,
    )?;
    Ok((p + 1.0) / PI * prefactor * integral.value)
}

/// Energy through the reduced formula: the p ≠ 1 prefactor times `F(τ)`,
/// or the logarithmic form at `p = 1` with `F₁(τ)`.
pub fn e_via_f(tau: f64, params: &ProblemParams) -> Result<f64> {
    let (p, lambda) = (params.p, params.lambda);
    let m_sq = lambda / (params.beta * params.beta);
    if p == 1.0 {
        Ok(-PI * lambda + PI * lambda * m_sq.ln() + 2.0 * PI * lambda * f1_of_tau(tau, params)?)
    } else {
        let prefactor = PI * lambda * (1.0 + p) / (1.0 - p) * m_sq.powf((1.0 - p) / (p + 1.0));
        Ok(prefactor * f_of_tau(tau, params)?)
    }
}

/// Energy as `2π` times the one-period mean of the density
/// `½(w')² − ½β²w² − h(w)`: the orbit is re-integrated at fixed step over
/// one half-period and the mean taken by the trapezoidal rule (spectrally
/// accurate here — the reflected density is smooth and periodic). For a
/// solution on the circle the circle integral equals this mean by
/// periodic repetition; comparing the two routes is precisely the check
/// that identification deserves.
pub fn e_direct(tau: f64, params: &ProblemParams) -> Result<f64> {
    if !(tau >= 1.0) {
        return Err(Error::Domain(format!("e_direct needs τ ≥ 1 (got {tau})")));
    }
    let beta_sq = params.beta * params.beta;
    let density = |w: f64, v: f64| -> Result<f64> {
        Ok(0.5 * v * v - 0.5 * beta_sq * w * w - params.h(w)?)
    };
    if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        let m0 = params.m0;
        return Ok(2.0 * PI * density(m0, 0.0)?);
    }
    let orbit = params.make_orbit(tau)?;
    let step = orbit.half_period / DIRECT_STEPS as f64;
    let (mut w, mut v) = (orbit.w1, 0.0);
    let mut sum = 0.5 * density(w, v)?;
    for k in 1..=DIRECT_STEPS {
        let (nw, nv) = dp5_step(params, w, v, step);
        w = nw;
        v = nv;
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::IntegratorFailure { theta: k as f64 * step, w });
        }
        let d = density(w, v)?;
        sum += if k == DIRECT_STEPS { 0.5 * d } else { d };
    }
    Ok(2.0 * PI / DIRECT_STEPS as f64 * sum)
}

/// Assemble the full [`EnergyReport`] for one orbit.
pub fn report(tau: f64, params: &ProblemParams) -> Result<EnergyReport> {
    let l = half_period(tau, params)?;
    let (f, h) = if params.p == 1.0 {
        (f1_of_tau(tau, params)?, None)
    } else if tau - 1.0 < TAU_LIMIT_THRESHOLD {
        (1.0, Some(PI / (params.p + 1.0).sqrt()))
    } else {
        let h = h_of_tau(tau, params)?;
        (h / (params.beta * l), Some(h))
    };
    Ok(EnergyReport {
        tau,
        f,
        h,
        e_via_f: e_via_f(tau, params)?,
        e_direct: e_direct(tau, params)?,
        l,
    })
}

/// Energy of a whole component of the solution set: `τ = 1` for the
/// trivial component, `τ_j` solving `L(τ_j) = π/j` for the frequency-j
/// family (every shift of a solution has the same energy). The frequency
/// must be admissible for the given parameters.
pub fn energy_on_component(component: Component, params: &ProblemParams) -> Result<f64> {
    match component {
        Component::Trivial => e_via_f(1.0, params),
        Component::Frequency(j) => {
            let descriptor = crate::classify::classify(params);
            if !descriptor.frequencies.contains(&j) {
                return Err(Error::NotAdmissible { j, alpha: params.alpha, p: params.p });
            }
            let tau_j = tau_for_period(PI / f64::from(j), params)?;
            e_via_f(tau_j, params)
        }
    }
}

/// Direction `F` (or `F₁`) is expected to move in τ, per the numerically
/// observed monotonicity pattern: decreasing for `1 < p < 3`, constant
/// at `p = 3`, increasing elsewhere (including `F₁` at `p = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpectedTrend {
    Increasing,
    Decreasing,
    ConstantOne,
}

/// The expected trend for a given exponent.
pub fn expected_trend(p: f64) -> ExpectedTrend {
    if p == 3.0 {
        ExpectedTrend::ConstantOne
    } else if p > 1.0 && p < 3.0 {
        ExpectedTrend::Decreasing
    } else {
        ExpectedTrend::Increasing
    }
}

/// One sweep sample: `f` is `F(τ)` (or `F₁` at `p = 1`), `energy` the
/// reduced-formula energy at that τ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub f: f64,
    pub energy: f64,
}

/// Result of [`monotonicity_sweep`]. `violations` lists the indices of
/// rows that break the expected trend against their predecessor (for
/// [`ExpectedTrend::ConstantOne`]: rows with `|f − 1| > 1e−9`). The
/// verdict is sampling evidence on the given grid, not a proof.
#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub p: f64,
    pub uses_f1: bool,
    pub expected: ExpectedTrend,
    pub rows: Vec<SweepRow>,
    pub violations: Vec<usize>,
}

/// Sample `F` (or `F₁`) and `E` over a strictly increasing τ-grid and
/// flag departures from the expected monotonicity.
pub fn monotonicity_sweep(params: &ProblemParams, tau_grid: &[f64]) -> Result<SweepTable> {
    if tau_grid.is_empty() || !(tau_grid[0] >= 1.0) {
        return Err(Error::InvalidGrid("τ-grid must be nonempty and start at τ ≥ 1".into()));
    }
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("τ-grid must be strictly increasing".into()));
    }
    let uses_f1 = params.p == 1.0;
    let mut rows = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let f = if uses_f1 { f1_of_tau(tau, params)? } else { f_of_tau(tau, params)? };
        rows.push(SweepRow { tau, f, energy: e_via_f(tau, params)? });
    }
    let expected = expected_trend(params.p);
    let mut violations = Vec::new();
    match expected {
        ExpectedTrend::ConstantOne => {
            for (i, row) in rows.iter().enumerate() {
                if (row.f - 1.0).abs() > P3_CONSTANCY_TOL {
                    violations.push(i);
                }
            }
        }
        ExpectedTrend::Increasing => {
            for i in 1..rows.len() {
                if !(rows[i].f > rows[i - 1].f) {
                    violations.push(i);
                }
            }
        }
        ExpectedTrend::Decreasing => {
            for i in 1..rows.len() {
                if !(rows[i].f < rows[i - 1].f) {
                    violations.push(i);
                }
            }
        }
    }
    Ok(SweepTable { p: params.p, uses_f1, expected, rows, violations })
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive (the
/// natural spacing for τ-sweeps, whose structure spans decades).
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidGrid(format!(
            "log grid needs 0 < lo < hi and count ≥ 2 (got {lo}, {hi}, {count})"
        )));
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (count - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    *grid.last_mut().unwrap() = hi;
    Ok(grid)
}
