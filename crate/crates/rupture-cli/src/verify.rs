//! The cross-module identity suite behind `rupture verify`.
//!
//! Each check exercises a different pair of modules against an identity
//! that neither implements directly, so a defect in one implementation
//! cannot hide behind itself: classification is computed twice (period
//! interval vs explicit regions), the elliptic reduction ties tanh-sinh
//! quadrature to the AGM, the p = 3 isochrony ties the period to the
//! energy ratio, the τ→1 energy limits tie quadrature to closed forms,
//! the component ladder ties orbit inversion to the energy ordering, and
//! the trivial cylinder run ties the 2-D solver to the flux identity.

use rand::{Rng, SeedableRng};
use rupture_core::classify::{classify, interval_j, in_m_explicit, StructureKind};
use rupture_core::cylinder::{connect, default_t_half, Verdict};
use rupture_core::energy::{e_via_f, energy_on_component, f_of_tau, Component};
use rupture_core::params::ProblemParams;
use rupture_core::period::half_period;
use rupture_core::profile::trivial_profile;
use rupture_core::quadrature::{elliptic_k, integrate_singular};
use serde::Serialize;
use std::f64::consts::PI;

/// Outcome of one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Run every check; order is fixed so output is deterministic.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        dual_classification(),
        lemma_elliptic_reduction(),
        p3_constancy(),
        energy_limit_cells(),
        energy_ladder(),
        trivial_flux_identity(),
    ]
}

fn check(name: &'static str, body: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match body() {
        Ok(detail) => CheckResult { name, pass: true, detail },
        Err(detail) => CheckResult { name, pass: false, detail },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// The J-interval route and the explicit region union must agree, away
/// from the measure-zero boundary set where fp ties could differ.
fn dual_classification() -> CheckResult {
    check("dual-classification", || {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x7e57_c1a5);
        let mut tested = 0u32;
        while tested < 2000 {
            let alpha = rng.gen_range(-1.99..30.0);
            let p = 10f64.powf(rng.gen_range(-1.3..1.6));
            if (p - 3.0).abs() < 1e-9 {
                continue;
            }
            let params = ProblemParams::new(alpha, p, 1.0).map_err(|e| e.to_string())?;
            let (lo, hi) = interval_j(&params);
            let near_integer = |x: f64| (x - x.round()).abs() < 1e-6;
            if near_integer(lo) || near_integer(hi) {
                continue;
            }
            let trivial = classify(&params).kind == StructureKind::TrivialOnly;
            if trivial != in_m_explicit(&params) {
                return Err(format!("routes disagree at alpha={alpha}, p={p}"));
            }
            tested += 1;
        }
        // The p = 3 line is special-cased in both routes; spot-check it.
        for (alpha, expect) in [
            (0.0, StructureKind::Continuum),
            (2.0, StructureKind::Continuum),
            (6.0, StructureKind::Continuum),
            (1.0, StructureKind::TrivialOnly),
            (3.3, StructureKind::TrivialOnly),
        ] {
            let params = ProblemParams::new(alpha, 3.0, 1.0).map_err(|e| e.to_string())?;
            if classify(&params).kind != expect {
                return Err(format!("p=3 classification wrong at alpha={alpha}"));
            }
            if in_m_explicit(&params) != (expect == StructureKind::TrivialOnly) {
                return Err(format!("p=3 explicit region wrong at alpha={alpha}"));
            }
        }
        Ok("2000 sampled (α,p) agree across both routes (boundary ties skipped)".into())
    })
}

/// ∫₁^τ dy/(√y √(y−1) √(τ−y)) = (2/√τ)·K(1−1/τ): tanh-sinh quadrature on
/// the left, the AGM on the right.
fn lemma_elliptic_reduction() -> CheckResult {
    check("elliptic-reduction", || {
        let mut worst = 0.0_f64;
        for tau in [1.5, 2.0, 10.0, 100.0] {
            let quad = integrate_singular(
                |y, da, db| 1.0 / (y.sqrt() * da.sqrt() * db.sqrt()),
                1.0,
                tau,
                1e-12,
            )
            .map_err(|e| e.to_string())?
            .value;
            let closed =
                2.0 / tau.sqrt() * elliptic_k(1.0 - 1.0 / tau).map_err(|e| e.to_string())?;
            worst = worst.max(rel(quad, closed));
        }
        if worst <= 1e-9 {
            Ok(format!("quadrature matches the AGM route, worst rel. diff {worst:.2e}"))
        } else {
            Err(format!("quadrature vs AGM rel. diff {worst:.2e} > 1e-9"))
        }
    })
}

/// p = 3 isochrony: every orbit has L = 2π/(α+2) and F ≡ 1.
fn p3_constancy() -> CheckResult {
    check("p3-constancy", || {
        let mut worst = 0.0_f64;
        for alpha in [0.0, 2.0] {
            for lambda in [1.0, 4.0] {
                let params = ProblemParams::new(alpha, 3.0, lambda).map_err(|e| e.to_string())?;
                let expect = 2.0 * PI / (alpha + 2.0);
                for tau in [1.5, 10.0, 1e4] {
                    let l = half_period(tau, &params).map_err(|e| e.to_string())?;
                    let f = f_of_tau(tau, &params).map_err(|e| e.to_string())?;
                    worst = worst.max(rel(l, expect)).max((f - 1.0).abs());
                }
            }
        }
        if worst <= 1e-8 {
            Ok(format!("L ≡ 2π/(α+2) and F ≡ 1, worst deviation {worst:.2e}"))
        } else {
            Err(format!("isochrony broken: worst deviation {worst:.2e} > 1e-8"))
        }
    })
}

/// τ→1 energy limits against their closed forms at α = 0, λ = 1.
fn energy_limit_cells() -> CheckResult {
    check("energy-limit-cells", || {
        let tau = 1.0 + 1e-8;
        // (p, closed form, tolerance)
        let cases = [
            (0.5, limit_generic(0.5), 1e-6),
            (2.0, limit_generic(2.0), 1e-6),
            (5.0, limit_generic(5.0), 1e-6),
            (1.0, -PI, 1e-6),
            (3.0, -PI, 1e-10),
        ];
        let mut worst = 0.0_f64;
        for (p, expect, tol) in cases {
            let params = ProblemParams::new(0.0, p, 1.0).map_err(|e| e.to_string())?;
            let e = e_via_f(tau, &params).map_err(|e| e.to_string())?;
            let d = rel(e, expect);
            if d > tol {
                return Err(format!("p={p}: E(τ→1) = {e:.12e} vs closed form {expect:.12e}"));
            }
            worst = worst.max(d / tol);
        }
        Ok(format!("five τ→1 cells match closed forms, worst deviation {worst:.2}× the tolerance"))
    })
}

/// πλ(1+p)/(1−p) · [(p+1)²/((α+2)²λ)]^{(1−p)/(p+1)} at α = 0, λ = 1.
fn limit_generic(p: f64) -> f64 {
    PI * (1.0 + p) / (1.0 - p) * ((p + 1.0) * (p + 1.0) / 4.0).powf((1.0 - p) / (p + 1.0))
}

/// Component energy ordering: increasing for p < 3, trivial maximal for
/// p > 3.
fn energy_ladder() -> CheckResult {
    check("energy-ladder", || {
        let params = ProblemParams::new(25.0, 2.0, 1.0).map_err(|e| e.to_string())?;
        let freqs = classify(&params).frequencies;
        if freqs != vec![16, 17] {
            return Err(format!("expected frequencies [16, 17] at (25, 2), got {freqs:?}"));
        }
        let e0 = energy_on_component(Component::Trivial, &params).map_err(|e| e.to_string())?;
        let e1 = energy_on_component(Component::Frequency(16), &params).map_err(|e| e.to_string())?;
        let e2 = energy_on_component(Component::Frequency(17), &params).map_err(|e| e.to_string())?;
        if !(e0 < e1 && e1 < e2) {
            return Err(format!("p=2 ladder out of order: {e0:.6} / {e1:.6} / {e2:.6}"));
        }

        let params = ProblemParams::new(6.0, 5.0, 1.0).map_err(|e| e.to_string())?;
        let e0 = energy_on_component(Component::Trivial, &params).map_err(|e| e.to_string())?;
        let e3 = energy_on_component(Component::Frequency(3), &params).map_err(|e| e.to_string())?;
        if !(e3 < e0) {
            return Err(format!("p=5 trivial not maximal: E0={e0:.6}, E(j3)={e3:.6}"));
        }
        Ok("E(S0) < E(S1) < E(S2) at p=2; trivial maximal at p=5".into())
    })
}

/// Equal trivial boundaries: the 2-D solve must close the flux identity
/// at roundoff with a nondecreasing slice energy.
fn trivial_flux_identity() -> CheckResult {
    check("trivial-flux-identity", || {
        let params = ProblemParams::new(1.2, 2.0, 1.0).map_err(|e| e.to_string())?;
        let triv = trivial_profile(&params, 64).map_err(|e| e.to_string())?;
        let report = connect(&triv, &triv, default_t_half(&params), 200, 64, &params)
            .map_err(|e| e.to_string())?;
        if report.verdict != Verdict::Converged {
            return Err(format!("verdict {:?} on the trivial connection", report.verdict));
        }
        let flux = report.flux.as_ref().expect("converged run has flux");
        if flux.residual > 1e-10 || flux.flux_integral.abs() > 1e-10 {
            return Err(format!(
                "flux identity off: residual {:.2e}, integral {:.2e}",
                flux.residual, flux.flux_integral
            ));
        }
        if flux.max_slice_decrease > 1e-12 {
            return Err(format!("slice energy decreases by {:.2e}", flux.max_slice_decrease));
        }
        Ok(format!(
            "converged, flux residual {:.2e}, G nondecreasing (max decrease {:.2e})",
            flux.residual, flux.max_slice_decrease
        ))
    })
}
