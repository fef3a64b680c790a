//! The acceptance gate: ten end-to-end checks, one per headline
//! guarantee of the toolkit, each printing a single `PASS`/`FAIL` line
//! with the measured numbers and its runtime. Run
//!
//! ```text
//! cargo test --test acceptance -- --test-threads=1 --nocapture
//! ```
//!
//! to see the lines in order. Every bound below is asserted exactly as
//! stated; a check that cannot be met is allowed to fail and says why,
//! rather than being quietly relaxed (see `large_tau_energy_limits`).

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};

use rupture_core::classify::{admissible_connection, classify, in_m_explicit, StructureKind};
use rupture_core::cylinder::{
    connect, default_t_half, discrete_equilibrium, flux_residual, radial_relaxation_field,
    CylinderField, Verdict, DEFAULT_NT, DEFAULT_NTHETA,
};
use rupture_core::energy::{
    c_of_p, e_direct, e_via_f, energy_on_component, f1_of_tau, f_of_tau, h_of_tau, log_grid,
    monotonicity_sweep, Component, ExpectedTrend,
};
use rupture_core::params::ProblemParams;
use rupture_core::period::half_period;
use rupture_core::profile::{build_profile, p3_family, trivial_profile, OrbitProfile, DEFAULT_GRID};
use rupture_core::quadrature::{agm, elliptic_k, integrate_singular};

fn params(alpha: f64, p: f64, lambda: f64) -> ProblemParams {
    ProblemParams::new(alpha, p, lambda).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// The admissible nontrivial fixtures used throughout: (j, α, p).
const PROFILE_FIXTURES: [(u32, f64, f64); 5] =
    [(2, 1.2, 2.0), (3, 2.7, 2.0), (16, 25.0, 2.0), (17, 25.0, 2.0), (3, 6.0, 5.0)];

/// Print the one-line verdict and enforce it. `note` carries the
/// measured numbers on success; failures are listed verbatim.
fn gate(idx: usize, name: &str, t0: Instant, budget_s: u64, note: &str, failures: &mut Vec<String>) {
    let el = t0.elapsed();
    if el.as_secs() >= budget_s {
        failures.push(format!("runtime {:.1} s exceeded the {budget_s} s budget", el.as_secs_f64()));
    }
    if failures.is_empty() {
        println!("PASS [{idx:2}/10] {name} — {note} [{:.2} s]", el.as_secs_f64());
    } else {
        let detail = failures.join("; ");
        println!("FAIL [{idx:2}/10] {name} — {detail} [{:.2} s]", el.as_secs_f64());
        panic!("{name}: {detail}");
    }
}

/// p = 3 collapses to a harmonic oscillator in the (v²)-variable: every
/// orbit has the same half-period 2π/(α+2), H(τ) ≡ π/2 and F(τ) ≡ 1.
#[test]
fn a01_p3_isochrony_and_unit_energy_ratio() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for alpha in [0.0, 2.0, 6.0] {
        for lambda in [0.5, 1.0, 4.0] {
            let prm = params(alpha, 3.0, lambda);
            for tau in [1.5, 2.0, 10.0, 100.0] {
                let checks = [
                    ("L", half_period(tau, &prm).unwrap(), 2.0 * PI / (alpha + 2.0)),
                    ("H", h_of_tau(tau, &prm).unwrap(), PI / 2.0),
                    ("F", f_of_tau(tau, &prm).unwrap(), 1.0),
                ];
                for (what, got, want) in checks {
                    let dev = rel(got, want);
                    worst = worst.max(dev);
                    if dev > 1e-8 {
                        failures.push(format!(
                            "{what}(τ={tau}) off by {dev:.2e} at α={alpha}, λ={lambda}"
                        ));
                    }
                }
            }
        }
    }
    let note = format!("worst relative deviation {worst:.2e} over 36 (α, λ, τ) cells");
    gate(1, "p = 3 isochrony, H ≡ π/2, F ≡ 1", t0, 10, &note, &mut failures);
}

/// τ → 1 limits of the orbit energy against the closed forms
/// E → πλ(1+p)/(1−p) · (λ/β²)^{(1−p)/(p+1)} (p ≠ 1, 3),
/// E → −πλ + 2πλ ln(2√λ/(α+2)) (p = 1) and E ≡ −π√λ(α+2)/2 (p = 3),
/// all evaluated at τ = 1 + 1e−8.
#[test]
fn a02_energy_limits_at_tau_to_one() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let tau = 1.0 + 1e-8;
    let mut worst = 0.0_f64;
    for &(alpha, lambda) in &[(0.0, 1.0), (1.2, 1.0), (0.7, 2.5)] {
        for &p in &[0.5, 2.0, 5.0] {
            let prm = params(alpha, p, lambda);
            let closed = PI * lambda * (1.0 + p) / (1.0 - p)
                * (lambda / (prm.beta * prm.beta)).powf((1.0 - p) / (p + 1.0));
            let dev = rel(e_via_f(tau, &prm).unwrap(), closed);
            worst = worst.max(dev);
            if dev > 1e-6 {
                failures.push(format!("p={p}: off by {dev:.2e} at α={alpha}, λ={lambda}"));
            }
        }
        let prm = params(alpha, 1.0, lambda);
        let closed = -PI * lambda + 2.0 * PI * lambda * (2.0 * lambda.sqrt() / (alpha + 2.0)).ln();
        let dev = rel(e_via_f(tau, &prm).unwrap(), closed);
        worst = worst.max(dev);
        if dev > 1e-6 {
            failures.push(format!("p=1: off by {dev:.2e} at α={alpha}, λ={lambda}"));
        }
        let prm = params(alpha, 3.0, lambda);
        let dev = rel(e_via_f(tau, &prm).unwrap(), -PI * lambda.sqrt() * (alpha + 2.0) / 2.0);
        worst = worst.max(dev);
        if dev > 1e-10 {
            failures.push(format!("p=3: off by {dev:.2e} at α={alpha}, λ={lambda}"));
        }
    }
    let note = format!("worst relative deviation {worst:.2e} over 15 (α, λ, p) cells");
    gate(2, "τ → 1 energy limits match the closed forms", t0, 10, &note, &mut failures);
}

/// τ = 1e8 behaviour of F: divergence for p > 3, the finite limit C(p)
/// for p < 1, growth of F₁ through 1 for p = 1 — and the p = 2 decay
/// target, which is stated as intended and is expected to fail: F
/// vanishes only like ln τ · τ^{−1/3}, so F(1e8) ≈ 2.23e−2 and the
/// < 1e−2 bound first holds near τ ≈ 2e9. The check reports the
/// measured value instead of weakening the bound.
#[test]
fn a03_energy_limits_at_large_tau() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let tau = 1e8;

    let f2 = f_of_tau(tau, &params(1.0, 2.0, 1.0)).unwrap();
    if !(f2 < 1e-2) {
        failures.push(format!(
            "p=2: F(1e8) = {f2:.4e} misses the < 1e-2 target (decay ~ ln τ · τ^(-1/3); \
             the bound first holds near τ ≈ 2e9)"
        ));
    }

    let f20 = f_of_tau(tau, &params(19.0, 20.0, 1.0)).unwrap();
    if !(f20 > 1e2) {
        failures.push(format!("p=20: F(1e8) = {f20:.4e} is not > 1e2"));
    }

    let f05 = f_of_tau(tau, &params(-0.5, 0.5, 1.0)).unwrap();
    let c05 = c_of_p(0.5).unwrap();
    let dev = rel(f05, c05);
    if dev > 1e-2 {
        failures.push(format!("p=0.5: |F(1e8) − C| = {dev:.2e}·C exceeds 1% of C = {c05:.6}"));
    }

    let prm1 = params(0.0, 1.0, 1.0);
    let f1s: Vec<f64> =
        [1e4, 1e6, 1e8].iter().map(|&t| f1_of_tau(t, &prm1).unwrap()).collect();
    if !(f1s[2] > 1.0) {
        failures.push(format!("p=1: F₁(1e8) = {:.4} is not > 1", f1s[2]));
    }
    if !(f1s[0] < f1s[1] && f1s[1] < f1s[2]) {
        failures.push(format!("p=1: F₁ not increasing over 1e4/1e6/1e8: {f1s:?}"));
    }

    let note = format!(
        "F(1e8): p=2 {f2:.3e}, p=20 {f20:.3e}, p=0.5 within {dev:.1e}·C of C(0.5), \
         F₁ chain {:.3} < {:.3} < {:.3}",
        f1s[0], f1s[1], f1s[2]
    );
    gate(3, "τ = 1e8 energy limits", t0, 60, &note, &mut failures);
}

/// Classification: pinned fixtures, the six closed p = 2 bands on
/// α ∈ (−2, 8] at 1e−3 resolution, and agreement of the J-interval and
/// explicit-region routes on 2000 random parameter points.
#[test]
fn a04_classification_fixtures_bands_and_dual_route() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    for p in [0.5, 1.0, 2.0, 5.0] {
        let d = classify(&params(0.0, p, 1.0));
        if d.kind != StructureKind::TrivialOnly {
            failures.push(format!("α=0, p={p}: expected only the trivial component"));
        }
    }
    let d = classify(&params(1.2, 2.0, 1.0));
    if d.n0 != 1 || d.frequencies != [2] {
        failures.push(format!("α=1.2, p=2: got N₀={}, frequencies {:?}", d.n0, d.frequencies));
    }
    let d = classify(&params(2.7, 2.0, 1.0));
    if d.frequencies != [3] {
        failures.push(format!("α=2.7, p=2: got frequencies {:?}", d.frequencies));
    }

    // p = 2: the trivial-only set restricted to α ∈ (−2, 8] is the union
    // of six closed bands (−2, −1/2] and ((k−1)√3 − 2, (3k−4)/2], k=2..6.
    let sqrt3 = 3f64.sqrt();
    let bands: Vec<(f64, f64)> = std::iter::once((-2.0, -0.5))
        .chain((2..=7).map(|k| {
            let k = k as f64;
            ((k - 1.0) * sqrt3 - 2.0, (3.0 * k - 4.0) / 2.0)
        }))
        .collect();
    let in_bands = |alpha: f64| bands.iter().any(|&(a, b)| alpha > a && alpha <= b);
    let mut checked = 0u32;
    let mut alpha = -2.0 + 1e-3;
    while alpha <= 8.0 + 1e-12 {
        let d = classify(&params(alpha, 2.0, 1.0));
        // Boundary ties are a convention, not a classification; skip them.
        if !d.boundary_tie {
            checked += 1;
            if (d.kind == StructureKind::TrivialOnly) != in_bands(alpha) {
                failures.push(format!("p=2 band mismatch at α={alpha:.6}"));
            }
        }
        alpha += 1e-3;
    }

    let mut rng = rand::rngs::StdRng::seed_from_u64(0xACCE);
    let mut tested = 0u32;
    while tested < 2000 {
        let alpha = rng.gen_range(-1.99..30.0);
        let p = 10f64.powf(rng.gen_range(-1.3..1.6));
        if (p - 3.0).abs() < 1e-9 {
            continue; // the continuum case has no two-route comparison
        }
        let prm = params(alpha, p, 1.0);
        let d = classify(&prm);
        let near_integer = |x: f64| (x - x.round()).abs() < 1e-6;
        if near_integer(d.interval.0) || near_integer(d.interval.1) {
            continue; // fp ties at region boundaries are conventions
        }
        if (d.kind == StructureKind::TrivialOnly) != in_m_explicit(&prm) {
            failures.push(format!("routes disagree at α={alpha}, p={p}"));
        }
        tested += 1;
    }

    let note =
        format!("fixtures exact, {checked} band grid points, {tested} random dual-route points");
    gate(4, "classification fixtures, p = 2 bands, dual route", t0, 30, &note, &mut failures);
}

/// The singular orbit integral collapses to a complete elliptic
/// integral: ∫₁^τ dy/(√y √(y−1) √(τ−y)) = (2/√τ) K(1 − 1/τ), with K
/// evaluated by the AGM; and the AGM obeys the small-modulus logarithm
/// law K(1 − b²) ≈ ln(4/b).
#[test]
fn a05_singular_quadrature_against_the_agm() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for tau in [1.5, 2.0, 10.0, 100.0] {
        let quad = integrate_singular(
            |y: f64, da: f64, db: f64| 1.0 / (y.sqrt() * da.sqrt() * db.sqrt()),
            1.0,
            tau,
            1e-12,
        )
        .unwrap();
        let closed = 2.0 / tau.sqrt() * elliptic_k(1.0 - 1.0 / tau).unwrap();
        let dev = rel(quad.value, closed);
        worst = worst.max(dev);
        if dev > 1e-9 {
            failures.push(format!("τ={tau}: quadrature off the elliptic value by {dev:.2e}"));
        }
    }
    let b = 1e-6_f64;
    let ratio = (PI / 2.0) / agm(b, 1.0).unwrap() / (4.0 / b).ln();
    if (ratio - 1.0).abs() > 1e-3 {
        failures.push(format!("small-modulus law: K/ln(4/b) = {ratio:.6} at b = 1e-6"));
    }
    let note = format!(
        "elliptic reduction within {worst:.2e} on four τ, log-law ratio {:.2e} from 1",
        (ratio - 1.0).abs()
    );
    gate(5, "singular quadrature vs AGM elliptic integrals", t0, 5, &note, &mut failures);
}

/// Profile construction: certified equation residual at the default
/// grid, extrema ratio 1/τ, constancy of the first integral
/// (w′)² + g(w) along the profile, and the exact p = 3 family.
#[test]
fn a06_profile_certificates_geometry_and_p3_family() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let (mut worst_res, mut worst_ratio, mut worst_level) = (0.0_f64, 0.0_f64, 0.0_f64);

    for (j, alpha, p) in PROFILE_FIXTURES {
        let prm = params(alpha, p, 1.0);
        let pf = build_profile(j, &prm, DEFAULT_GRID).unwrap();
        worst_res = worst_res.max(pf.residual_sup);
        if pf.residual_sup > 1e-6 {
            failures.push(format!(
                "j={j}, α={alpha}: residual {:.2e} at n={DEFAULT_GRID}",
                pf.residual_sup
            ));
        }
        let (min, max) = pf
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let dev = rel(min / max, 1.0 / pf.orbit.tau);
        worst_ratio = worst_ratio.max(dev);
        if dev > 1e-6 {
            failures.push(format!("j={j}, α={alpha}: extrema ratio off 1/τ by {dev:.2e}"));
        }

        // First-integral constancy, checked with an eighth-order stencil
        // so the differentiation error stays below the contract even for
        // the 17-fold α = 25 orbit.
        let pf = build_profile(j, &prm, 4096).unwrap();
        let n = pf.values.len();
        let h = 2.0 * PI / n as f64;
        let at = |k: usize, d: isize| pf.values[(k as isize + d).rem_euclid(n as isize) as usize];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            let d = ((4.0 / 5.0) * (at(k, 1) - at(k, -1)) - (1.0 / 5.0) * (at(k, 2) - at(k, -2))
                + (4.0 / 105.0) * (at(k, 3) - at(k, -3))
                - (1.0 / 280.0) * (at(k, 4) - at(k, -4)))
                / h;
            let e = d * d + prm.g(pf.values[k]).unwrap();
            lo = lo.min(e);
            hi = hi.max(e);
        }
        let spread = (hi - lo) / hi.abs();
        worst_level = worst_level.max(spread);
        if spread > 1e-6 {
            failures.push(format!("j={j}, α={alpha}: first-integral spread {spread:.2e}"));
        }
    }

    let mut worst_p3 = 0.0_f64;
    for (alpha, eps) in [(0.0, 0.25), (2.0, 0.5)] {
        let pf = p3_family(eps, 0.0, &params(alpha, 3.0, 1.0), 4096).unwrap();
        worst_p3 = worst_p3.max(pf.residual_sup);
        if pf.residual_sup > 1e-8 {
            failures.push(format!("p=3 family (α={alpha}, ε={eps}): residual {:.2e}", pf.residual_sup));
        }
    }

    let note = format!(
        "residual ≤ {worst_res:.1e}, extrema ratio within {worst_ratio:.1e}, \
         first integral flat to {worst_level:.1e}, p = 3 family ≤ {worst_p3:.1e}"
    );
    gate(6, "profile certificates and orbit geometry", t0, 30, &note, &mut failures);
}

/// The reduced energy formula E = πλ(1+p)/(1−p)(λ/β²)^{(1−p)/(p+1)} F(τ)
/// (log-corrected at p = 1) against direct integration of the energy
/// density along the orbit, on 20 seeded random parameter points.
#[test]
fn a07_energy_identity_chain_on_random_parameters() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0xE7);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let p = 10f64.powf(rng.gen_range(-0.5..0.75));
        let alpha = rng.gen_range(-1.5..8.0);
        let lambda = 10f64.powf(rng.gen_range(-0.7..0.7));
        let tau = 10f64.powf(rng.gen_range(0.05..1.6));
        let prm = params(alpha, p, lambda);
        let via_f = e_via_f(tau, &prm).unwrap();
        let direct = e_direct(tau, &prm).unwrap();
        let dev = rel(via_f, direct);
        worst = worst.max(dev);
        if dev > 1e-5 {
            failures.push(format!(
                "routes differ by {dev:.2e} at p={p:.4}, τ={tau:.4}, α={alpha:.4}, λ={lambda:.4}"
            ));
        }
    }
    let note = format!("worst relative gap {worst:.2e} over 20 random (p, τ, α, λ)");
    gate(7, "energy identity chain, reduced vs direct", t0, 60, &note, &mut failures);
}

/// Energy ordering across solution components: for α = 25, p = 2 the
/// two nontrivial components sit strictly above the trivial one in
/// energy and increase with frequency; for p = 5 the trivial component
/// dominates the nontrivial one.
#[test]
fn a08_energy_ladders_across_components() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    let prm = params(25.0, 2.0, 1.0);
    let d = classify(&prm);
    if d.frequencies != [16, 17] {
        failures.push(format!("α=25, p=2: expected frequencies [16, 17], got {:?}", d.frequencies));
    }
    let e0 = energy_on_component(Component::Trivial, &prm).unwrap();
    let e16 = energy_on_component(Component::Frequency(16), &prm).unwrap();
    let e17 = energy_on_component(Component::Frequency(17), &prm).unwrap();
    if !(e0 < e16 && e16 < e17) {
        failures.push(format!("1 < p < 3 ladder not increasing: {e0:.4} / {e16:.4} / {e17:.4}"));
    }

    let prm5 = params(6.0, 5.0, 1.0);
    let t0_5 = energy_on_component(Component::Trivial, &prm5).unwrap();
    let e3 = energy_on_component(Component::Frequency(3), &prm5).unwrap();
    if !(e3 < t0_5) {
        failures.push(format!("p = 5: expected E(j=3) < E(trivial), got {e3:.4} vs {t0_5:.4}"));
    }

    let note = format!("p=2: {e0:.2} < {e16:.2} < {e17:.2}; p=5: {e3:.2} < {t0_5:.2}");
    gate(8, "energy ladders across components", t0, 60, &note, &mut failures);
}

/// 200-point logarithmic τ-sweeps of F (F₁ at p = 1) with zero
/// violations of the expected trend: decreasing for p = 2, increasing
/// for p ∈ {0.5, 20} and for F₁ at p = 1, constant at p = 3.
#[test]
fn a09_monotonicity_sweeps() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let grid = log_grid(1.0, 1e4, 200).unwrap();
    let cases: [(ProblemParams, ExpectedTrend, &[f64]); 5] = [
        (params(-0.5, 0.5, 1.0), ExpectedTrend::Increasing, &grid),
        (params(1.0, 2.0, 1.0), ExpectedTrend::Decreasing, &grid),
        (params(19.0, 20.0, 1.0), ExpectedTrend::Increasing, &grid),
        (params(2.0, 3.0, 1.0), ExpectedTrend::ConstantOne, &grid),
        (params(0.0, 1.0, 1.0), ExpectedTrend::Increasing, &log_grid(1.0, 1e8, 200).unwrap()),
    ];
    for (prm, trend, grid) in &cases {
        let table = monotonicity_sweep(prm, grid).unwrap();
        if table.expected != *trend {
            failures.push(format!("p={}: expected trend {trend:?}, table says {:?}", prm.p, table.expected));
        }
        if prm.p == 1.0 && !table.uses_f1 {
            failures.push("p=1 sweep did not switch to F₁".into());
        }
        if !table.violations.is_empty() {
            failures.push(format!(
                "p={}: {} violation(s), first at τ={:.4}",
                prm.p,
                table.violations.len(),
                table.rows[table.violations[0]].tau
            ));
        }
    }
    let note = "five 200-point sweeps, zero trend violations".to_string();
    gate(9, "monotonicity sweeps of F and F₁", t0, 300, &note, &mut failures);
}

/// Cylinder boundary-value runs: equal-boundary problems converge to
/// t-independent fields whose flux accounting closes to 1e−8, the slice
/// energy is nondecreasing within 1e−6 on every converged field, every
/// converged nontrivial run is an admissible pairing, and the flux
/// defect of the discretisation drops by ≥ 3 per nt-doubling on an
/// exactly-known field.
#[test]
fn a10_cylinder_connections_flux_and_grid_refinement() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    fn sup_t_variation(f: &CylinderField) -> f64 {
        let mut worst = 0.0_f64;
        for row in &f.v {
            for (k, &x) in row.iter().enumerate() {
                worst = worst.max((x - f.v[0][k]).abs());
            }
        }
        worst
    }

    // Equal boundaries: the trivial profile and the two polished
    // nontrivial fixtures, at the default grid and domain.
    fn run_equal(
        label: &str,
        prm: &ProblemParams,
        boundary: &OrbitProfile,
        failures: &mut Vec<String>,
        ran: &mut Vec<(String, f64, f64)>,
    ) {
        let rep =
            connect(boundary, boundary, default_t_half(prm), DEFAULT_NT, DEFAULT_NTHETA, prm)
                .unwrap();
        if rep.verdict != Verdict::Converged {
            failures.push(format!(
                "{label}: verdict {:?} ({})",
                rep.verdict,
                rep.failure.as_deref().unwrap_or("no detail")
            ));
            return;
        }
        let field = rep.field.as_ref().unwrap();
        let flux = rep.flux.as_ref().unwrap();
        let tvar = sup_t_variation(field);
        if tvar > 1e-5 {
            failures.push(format!("{label}: field varies by {tvar:.2e} in t"));
        }
        if flux.residual > 1e-8 {
            failures.push(format!("{label}: flux residual {:.2e}", flux.residual));
        }
        if flux.max_slice_decrease > 1e-6 {
            failures.push(format!(
                "{label}: slice energy decreases by {:.2e}",
                flux.max_slice_decrease
            ));
        }
        ran.push((label.to_string(), flux.residual, tvar));
    }

    let mut ran = Vec::new();
    let prm_triv = params(1.2, 2.0, 1.0);
    run_equal(
        "trivial/trivial",
        &prm_triv,
        &trivial_profile(&prm_triv, DEFAULT_NTHETA).unwrap(),
        &mut failures,
        &mut ran,
    );

    for (j, alpha, p) in [(2u32, 1.2, 2.0), (3, 6.0, 5.0)] {
        let prm = params(alpha, p, 1.0);
        let seed = build_profile(j, &prm, DEFAULT_NTHETA).unwrap();
        let polished = discrete_equilibrium(&seed, &prm).unwrap();
        run_equal(&format!("j={j}/j={j} (α={alpha})"), &prm, &polished, &mut failures, &mut ran);

        // A converged nontrivial pairing must be admissible.
        let d = classify(&prm);
        let idx = d.frequencies.iter().position(|&f| f == j).map(|k| k as u32 + 1);
        match idx {
            Some(idx) => {
                let adm = admissible_connection(p, idx, idx, d.n0).unwrap();
                if !adm.allowed {
                    failures.push(format!("j={j} (α={alpha}): equal pairing not admissible"));
                }
            }
            None => failures.push(format!("j={j} not among components at α={alpha}, p={p}")),
        }
    }

    // Grid refinement on an exactly-known t-dependent field (the radial
    // relaxation solution): its flux defect is pure discretisation error
    // and must drop by at least 3 per nt-doubling.
    let v0 = 1.3 * prm_triv.m0;
    let mut defects = Vec::new();
    for nt in [200usize, 400] {
        let field = radial_relaxation_field(v0, 12.0, nt, 16, &prm_triv).unwrap();
        let flux = flux_residual(&field, &prm_triv);
        if flux.max_slice_decrease > 1e-6 {
            failures.push(format!(
                "radial nt={nt}: slice energy decreases by {:.2e}",
                flux.max_slice_decrease
            ));
        }
        defects.push(flux.residual);
    }
    let ratio = defects[0] / defects[1];
    if !(ratio >= 3.0) {
        failures.push(format!(
            "flux defect fell only {ratio:.2}× under nt-doubling ({:.2e} → {:.2e})",
            defects[0], defects[1]
        ));
    }

    let worst_flux =
        ran.iter().map(|r| r.1).fold(0.0_f64, f64::max);
    let worst_tvar = ran.iter().map(|r| r.2).fold(0.0_f64, f64::max);
    let note = format!(
        "{} equal-boundary runs converged (flux ≤ {worst_flux:.1e}, t-variation ≤ {worst_tvar:.1e}), \
         defect ratio {ratio:.2} per doubling",
        ran.len()
    );
    gate(10, "cylinder connections, flux accounting, refinement", t0, 600, &note, &mut failures);
}
