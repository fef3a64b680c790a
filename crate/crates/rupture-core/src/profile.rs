/*!
Concrete periodic solutions w(θ) on a uniform grid: the constant
profile, the j-frequency orbits (built by integrating the phase-plane
ODE from the minimum), and the closed-form isochronous family at p = 3.

Construction integrates w'' = −β²w + λ/w^p from (w₁, 0) over one half
branch [0, π/j] and reflects, rather than inverting the quadrature
θ(w) = ∫dw/√(E−g(w)) whose derivative blows up at both turning points.
The integration step is locked to π/(4096·j) and output grids are powers
of two ≤ 8192, so every output node lands exactly on a stored half-branch
node — no interpolation anywhere.
*/

use crate::classify;
use crate::params::{OrbitSpec, ProblemParams};
use crate::period::tau_for_period;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Half-branch resolution of the ODE integration (steps per [0, π/j]).
const HALF_BRANCH_STEPS: usize = 4096;

/// Output grids must be powers of two in this range: small enough to
/// index the half branch exactly, large enough for the residual stencil.
pub const MIN_GRID: usize = 16;
pub const MAX_GRID: usize = 2 * HALF_BRANCH_STEPS;

/// Default output grid size (one full period).
pub const DEFAULT_GRID: usize = 2048;

/// A positive solution sampled on the uniform grid θ_k = 2πk/n.
#[derive(Clone, Debug, serde::Serialize)]
pub struct OrbitProfile {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub orbit: OrbitSpec,
    /// Angular frequency j (minimal period 2π/j); 0 marks the constant
    /// profile and the p = 3 family, whose phase is free.
    pub frequency: u32,
    /// Sup-norm of |w'' + β²w − λ/w^p| measured at construction
    /// resolution (the π/(4096j) ODE branch, or a 65536-point sampling
    /// of the closed forms) — it certifies the constructed *function*,
    /// independent of how coarsely `values` samples it. Re-running
    /// [`residual`] replaces this with the coarser on-grid measurement.
    pub residual_sup: f64,
}

fn check_grid(n: usize) -> Result<()> {
    if !n.is_power_of_two() || !(MIN_GRID..=MAX_GRID).contains(&n) {
        return Err(Error::InvalidGrid(format!(
            "grid size must be a power of two in [{MIN_GRID}, {MAX_GRID}] (got {n})"
        )));
    }
    Ok(())
}

fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// One Dormand–Prince 5(4) step of the phase-plane system
/// (w, v)' = (v, λ/w^p − β²w), fixed step, fifth-order weights.
pub(crate) fn dp5_step(params: &ProblemParams, w: f64, v: f64, h: f64) -> (f64, f64) {
    let f = |w: f64, v: f64| (v, params.lambda * w.powf(-params.p) - params.beta * params.beta * w);
    let (k1w, k1v) = f(w, v);
    let (k2w, k2v) = f(w + h * 0.2 * k1w, v + h * 0.2 * k1v);
    let (k3w, k3v) = f(
        w + h * (3.0 / 40.0 * k1w + 9.0 / 40.0 * k2w),
        v + h * (3.0 / 40.0 * k1v + 9.0 / 40.0 * k2v),
    );
    let (k4w, k4v) = f(
        w + h * (44.0 / 45.0 * k1w - 56.0 / 15.0 * k2w + 32.0 / 9.0 * k3w),
        v + h * (44.0 / 45.0 * k1v - 56.0 / 15.0 * k2v + 32.0 / 9.0 * k3v),
    );
    let (k5w, k5v) = f(
        w + h
            * (19372.0 / 6561.0 * k1w - 25360.0 / 2187.0 * k2w + 64448.0 / 6561.0 * k3w
                - 212.0 / 729.0 * k4w),
        v + h
            * (19372.0 / 6561.0 * k1v - 25360.0 / 2187.0 * k2v + 64448.0 / 6561.0 * k3v
                - 212.0 / 729.0 * k4v),
    );
    let (k6w, k6v) = f(
        w + h
            * (9017.0 / 3168.0 * k1w - 355.0 / 33.0 * k2w + 46732.0 / 5247.0 * k3w
                + 49.0 / 176.0 * k4w
                - 5103.0 / 18656.0 * k5w),
        v + h
            * (9017.0 / 3168.0 * k1v - 355.0 / 33.0 * k2v + 46732.0 / 5247.0 * k3v
                + 49.0 / 176.0 * k4v
                - 5103.0 / 18656.0 * k5v),
    );
    (
        w + h
            * (35.0 / 384.0 * k1w + 500.0 / 1113.0 * k3w + 125.0 / 192.0 * k4w
                - 2187.0 / 6784.0 * k5w
                + 11.0 / 84.0 * k6w),
        v + h
            * (35.0 / 384.0 * k1v + 500.0 / 1113.0 * k3v + 125.0 / 192.0 * k4v
                - 2187.0 / 6784.0 * k5v
                + 11.0 / 84.0 * k6v),
    )
}

/// values[k] via the half branch: position in half-branch units, folded
/// by the even reflection at both turning points.
fn fill_from_half_branch(half: &[f64], j: u32, n: usize) -> Vec<f64> {
    let period = 2 * HALF_BRANCH_STEPS as u64;
    let stride = period * u64::from(j) / n as u64; // n | 8192 makes this exact
    (0..n as u64)
        .map(|k| {
            let m = (k * stride) % period;
            let m = if m <= HALF_BRANCH_STEPS as u64 { m } else { period - m } as usize;
            half[m]
        })
        .collect()
}

/// The balanced five-point second difference: exact zero for constant
/// input (32w − 2w − 30w cancels bit-exactly), fourth-order otherwise.
#[inline]
fn second_difference(wm2: f64, wm1: f64, wk: f64, wp1: f64, wp2: f64, h: f64) -> f64 {
    (16.0 * (wm1 + wp1) - (wm2 + wp2) - 30.0 * wk) / (12.0 * h * h)
}

fn equation_residual_at(params: &ProblemParams, second: f64, w: f64) -> f64 {
    (second + params.beta * params.beta * w - params.lambda * w.powf(-params.p)).abs()
}

/// Certification stencil: sixth-order seven-point second difference,
/// applied to data with `w[0]` subtracted. The subtraction makes the
/// constant profile certify to machine zero regardless of coefficient
/// rounding, and for everything else shrinks the 1/h² amplification of
/// the data's own quantization; sixth order keeps the truncation below
/// the 1e−8 contract of the sharpest closed-form family members, where
/// a fourth-order stencil cannot get under ~4e−8 at any grid size.
fn certified_residual_at<G: Fn(i64) -> f64>(at: &G, k: i64, h: f64, params: &ProblemParams) -> f64 {
    let v = |i: i64| at(i) - at(0);
    let second = (2.0 * (v(k - 3) + v(k + 3)) - 27.0 * (v(k - 2) + v(k + 2))
        + 270.0 * (v(k - 1) + v(k + 1))
        - 490.0 * v(k))
        / (180.0 * h * h);
    equation_residual_at(params, second, at(k))
}

/// Certify an even half branch (extrema at both ends): the stencil uses
/// reflected neighbors at the turning points, so a half-period mismatch
/// shows up as a derivative kink and a large residual — this is the
/// round-trip check on tau_for_period.
///
/// Truncation error falls with the step while the data-quantization
/// error grows like 1/h², so the sup is measured at several strides and
/// the best (each being a true discrete-residual bound) is kept.
fn certify_half_branch(half: &[f64], params: &ProblemParams, h: f64) -> f64 {
    let last = (half.len() - 1) as i64;
    let mut best = f64::INFINITY;
    for stride in [1i64, 2, 4] {
        let at = |i: i64| {
            let j = i.abs() * stride;
            let j = if j > last { 2 * last - j } else { j };
            half[j as usize]
        };
        let count = last / stride;
        let sup = (0..=count)
            .map(|k| certified_residual_at(&at, k, h * stride as f64, params))
            .fold(0.0, f64::max);
        best = best.min(sup);
    }
    best
}

/// Certify a closed-form profile by dense periodic sampling, again at
/// several resolutions to sit in the flat part of the error trade-off.
fn certify_closed_form<F: Fn(f64) -> f64>(f: F, params: &ProblemParams) -> f64 {
    let mut best = f64::INFINITY;
    for dense in [2048i64, 4096, 8192] {
        let h = 2.0 * PI / dense as f64;
        let values: Vec<f64> = (0..dense).map(|k| f(h * k as f64)).collect();
        let at = |i: i64| values[i.rem_euclid(dense) as usize];
        let sup = (0..dense)
            .map(|k| certified_residual_at(&at, k, h, params))
            .fold(0.0, f64::max);
        best = best.min(sup);
    }
    best
}

/// The 2π/j-periodic solution with j in the admissible frequency set.
pub fn build_profile(j: u32, params: &ProblemParams, n: usize) -> Result<OrbitProfile> {
    check_grid(n)?;
    let descriptor = classify::classify(params);
    if !descriptor.frequencies.contains(&j) {
        return Err(Error::NotAdmissible { j, alpha: params.alpha, p: params.p });
    }
    let tau = tau_for_period(PI / f64::from(j), params)?;
    let orbit = params.make_orbit(tau)?;

    let h = PI / (f64::from(j) * HALF_BRANCH_STEPS as f64);
    let mut half = Vec::with_capacity(HALF_BRANCH_STEPS + 1);
    half.push(orbit.w1);
    let (mut w, mut v) = (orbit.w1, 0.0);
    for step in 0..HALF_BRANCH_STEPS {
        (w, v) = dp5_step(params, w, v, h);
        if !w.is_finite() || !v.is_finite() || w <= 0.0 {
            return Err(Error::IntegratorFailure { theta: h * (step + 1) as f64, w });
        }
        half.push(w);
    }

    let values = fill_from_half_branch(&half, j, n);
    Ok(OrbitProfile {
        thetas: uniform_grid(n),
        values,
        orbit,
        frequency: j,
        residual_sup: certify_half_branch(&half, params, h),
    })
}

/// The constant solution m₀ = (λ/β²)^{1/(p+1)}.
pub fn trivial_profile(params: &ProblemParams, n: usize) -> Result<OrbitProfile> {
    check_grid(n)?;
    let orbit = params.make_orbit(1.0)?;
    Ok(OrbitProfile {
        thetas: uniform_grid(n),
        values: vec![params.m0; n],
        orbit,
        frequency: 0,
        residual_sup: certify_closed_form(|_| params.m0, params),
    })
}

/// The isochronous family at p = 3, α ∈ 2ℕ:
///
/// ```text
/// w_{ε,a}(θ) = (λ/β²)^{1/4} [ε cos²(β(θ+a)) + ε⁻¹ sin²(β(θ+a))]^{1/2}
/// ```
///
/// with min/max ratio ε (so the matching orbit has τ = 1/ε) and minimal
/// half-period 2π/(α+2) independent of ε.
pub fn p3_family(eps: f64, a: f64, params: &ProblemParams, n: usize) -> Result<OrbitProfile> {
    check_grid(n)?;
    if params.p != 3.0 {
        return Err(Error::Domain(format!(
            "the closed-form family exists only at p = 3 (got p = {})",
            params.p
        )));
    }
    if !classify::alpha_in_two_n(params.alpha).0 {
        return Err(Error::Domain(format!(
            "the closed-form family requires alpha in 2N (got alpha = {})",
            params.alpha
        )));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1] (got {eps})")));
    }
    let orbit = params.make_orbit(1.0 / eps)?;
    let amplitude = (params.lambda / (params.beta * params.beta)).powf(0.25);
    let family = |theta: f64| {
        let (s, c) = (params.beta * (theta + a)).sin_cos();
        amplitude * (eps * c * c + s * s / eps).sqrt()
    };
    let thetas = uniform_grid(n);
    let values = thetas.iter().map(|&theta| family(theta)).collect();
    Ok(OrbitProfile {
        thetas,
        values,
        orbit,
        frequency: 0,
        residual_sup: certify_closed_form(family, params),
    })
}

/// Sup over the profile's own periodic grid of |w'' + β²w − λ/w^p| with
/// w'' from the fourth-order five-point second-difference stencil
/// (−w_{k−2} + 16w_{k−1} − 30w_k + 16w_{k+1} − w_{k+2})/(12h²).
///
/// Recomputes and stores `residual_sup`. On constructor output this
/// replaces the construction-resolution certificate with the on-grid
/// measurement, which for coarse grids is dominated by the stencil's
/// own O(h⁴) truncation rather than by any defect of the profile. (A
/// second-order three-point stencil would sit another three orders
/// higher; hence the five-point form.)
pub fn residual(profile: &mut OrbitProfile, params: &ProblemParams) -> f64 {
    let n = profile.values.len();
    let h = 2.0 * PI / n as f64;
    let w = &profile.values;
    let mut sup = 0.0_f64;
    for k in 0..n {
        let second = second_difference(
            w[(k + n - 2) % n],
            w[(k + n - 1) % n],
            w[k],
            w[(k + 1) % n],
            w[(k + 2) % n],
            h,
        );
        sup = sup.max(equation_residual_at(params, second, w[k]));
    }
    profile.residual_sup = sup;
    sup
}

/// Equation residual restricted to a θ-window, for functions that solve
/// the equation only away from zeros (no periodic wrap; the stencil
/// stays strictly inside the window). `thetas` must be uniform.
pub fn residual_window(
    thetas: &[f64],
    values: &[f64],
    params: &ProblemParams,
    window: (f64, f64),
) -> Result<f64> {
    if thetas.len() != values.len() || thetas.len() < 5 {
        return Err(Error::InvalidGrid(
            "windowed residual needs matching theta/value arrays of length >= 5".into(),
        ));
    }
    let h = thetas[1] - thetas[0];
    let mut sup = 0.0_f64;
    let mut seen = false;
    for k in 2..thetas.len() - 2 {
        if thetas[k - 2] < window.0 || thetas[k + 2] > window.1 {
            continue;
        }
        let second = second_difference(
            values[k - 2],
            values[k - 1],
            values[k],
            values[k + 1],
            values[k + 2],
            h,
        );
        sup = sup.max(equation_residual_at(params, second, values[k]));
        seen = true;
    }
    if !seen {
        return Err(Error::InvalidGrid("window contains no interior stencil points".into()));
    }
    Ok(sup)
}
