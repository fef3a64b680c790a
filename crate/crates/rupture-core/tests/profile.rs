//! Profile construction: residual certificates, orbit geometry (extrema
//! ratio, symmetry, minimum at θ = 0), the closed forms at p = 3, and
//! the equation residual as an independent check on external data.

use rupture_core::params::ProblemParams;
use rupture_core::profile::{
    build_profile, p3_family, residual, residual_window, trivial_profile, DEFAULT_GRID,
};
use rupture_core::Error;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn params(alpha: f64, p: f64, lambda: f64) -> ProblemParams {
    ProblemParams::new(alpha, p, lambda).unwrap()
}

fn minmax(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[test]
fn built_profiles_satisfy_the_equation() {
    // (j, α, p): every admissible fixture must certify ≤ 1e−6 when built
    // on the default grid; the flagship case is an order better still.
    let cases: &[(u32, f64, f64, f64)] = &[
        (2, 1.2, 2.0, 1e-7),
        (3, 2.7, 2.0, 1e-6),
        (16, 25.0, 2.0, 1e-6),
        (17, 25.0, 2.0, 1e-6),
        (3, 6.0, 5.0, 1e-6),
    ];
    for &(j, alpha, p, bound) in cases {
        let prm = params(alpha, p, 1.0);
        let pf = build_profile(j, &prm, DEFAULT_GRID).unwrap();
        assert!(
            pf.residual_sup <= bound,
            "residual {:.3e} > {bound:.0e} for j={j}, alpha={alpha}, p={p}",
            pf.residual_sup
        );
        assert_eq!(pf.frequency, j);
        assert_eq!(pf.values.len(), DEFAULT_GRID);

        // Orbit geometry: extrema ratio is 1/τ, θ=0 is the minimum, and
        // the profile is even in θ (all exact by construction).
        let (min, max) = minmax(&pf.values);
        assert!(rel(min / max, 1.0 / pf.orbit.tau) < 1e-6);
        assert_eq!(pf.values[0], min);
        let n = pf.values.len();
        for k in 1..n {
            assert_eq!(pf.values[k], pf.values[n - k], "even symmetry broken at {k}");
        }

        // A 2π/j-periodic profile shows exactly j equispaced minima.
        let minima: Vec<usize> = (0..n)
            .filter(|&k| {
                pf.values[k] < pf.values[(k + 1) % n] && pf.values[k] < pf.values[(k + n - 1) % n]
            })
            .collect();
        assert_eq!(minima.len(), j as usize, "minima count for j={j}");
        for (i, &k) in minima.iter().enumerate() {
            let expected = i as f64 * n as f64 / f64::from(j);
            assert!((k as f64 - expected).abs() <= 1.0, "minimum {i} at node {k}");
        }
    }
}

#[test]
fn phase_constant_is_conserved_along_profiles() {
    // (w')² + g(w) must be flat along the grid (w' by fourth-order
    // centered differences; n = 4096 keeps the differentiation error
    // below the 1e−6 contract even for the sharp α = 25 orbits).
    for (j, alpha, p) in [(2u32, 1.2, 2.0), (3, 2.7, 2.0), (16, 25.0, 2.0), (3, 6.0, 5.0)] {
        let prm = params(alpha, p, 1.0);
        let pf = build_profile(j, &prm, 4096).unwrap();
        let n = pf.values.len();
        let h = 2.0 * PI / n as f64;
        let w = &pf.values;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let d = (-w[(k + 2) % n] + 8.0 * w[(k + 1) % n] - 8.0 * w[(k + n - 1) % n]
                + w[(k + n - 2) % n])
                / (12.0 * h);
            let e = d * d + prm.g(w[k]).unwrap();
            lo = lo.min(e);
            hi = hi.max(e);
        }
        let spread = (hi - lo) / hi.abs();
        assert!(spread < 1e-6, "level-set spread {spread:.3e} for j={j}, alpha={alpha}");
        // And the level is the orbit's phase constant.
        assert!(rel(lo, pf.orbit.phase_constant) < 1e-5);
    }
}

#[test]
fn trivial_profile_is_the_constant_solution() {
    let pf = trivial_profile(&params(0.0, 2.0, 1.0), DEFAULT_GRID).unwrap();
    assert!(pf.values.iter().all(|&v| v == pf.values[0]));
    // m₀ = (λ(p+1)²/(α+2)²)^{1/(p+1)} = (9/4)^{1/3}.
    assert!(rel(pf.values[0], 1.3103706971044482) < 1e-14);
    assert!(pf.residual_sup <= 1e-14, "constant residual {:.3e}", pf.residual_sup);
    assert_eq!(pf.frequency, 0);
    assert_eq!(pf.orbit.tau, 1.0);

    let pf = trivial_profile(&params(2.0, 3.0, 1.0), 256).unwrap();
    assert_eq!(pf.values[0], 1.0);
}

#[test]
fn p3_family_matches_its_closed_form() {
    let prm = params(0.0, 3.0, 1.0);
    let pf = p3_family(0.25, 0.0, &prm, 4096).unwrap();
    assert!(pf.residual_sup <= 1e-8, "family residual {:.3e}", pf.residual_sup);
    let sqrt2 = 2.0_f64.sqrt();
    for (&theta, &v) in pf.thetas.iter().zip(&pf.values) {
        let expected =
            sqrt2 * (0.25 * (theta / 2.0).cos().powi(2) + 4.0 * (theta / 2.0).sin().powi(2)).sqrt();
        assert!(rel(v, expected) < 1e-14);
    }
    let (min, max) = minmax(&pf.values);
    assert!(rel(min / max, 0.25) < 1e-12);
    assert_eq!(pf.orbit.tau, 4.0);
    // Minimal half-period 2π/(α+2), ε-independent.
    assert!(rel(pf.orbit.half_period, 2.0 * PI / 2.0) < 1e-15);

    // ε = 1 collapses onto the constant profile.
    let prm2 = params(2.0, 3.0, 1.0);
    let flat = p3_family(1.0, 0.0, &prm2, 512).unwrap();
    let trivial = trivial_profile(&prm2, 512).unwrap();
    for (a, b) in flat.values.iter().zip(&trivial.values) {
        assert!(rel(*a, *b) < 1e-15);
    }

    for eps in [0.1, 0.5, 1.0] {
        let pf = p3_family(eps, 0.0, &prm2, 4096).unwrap();
        assert!(pf.residual_sup <= 1e-8, "eps={eps}: residual {:.3e}", pf.residual_sup);
    }
}

#[test]
fn p3_family_shift_covariance() {
    let prm = params(2.0, 3.0, 1.0);
    let n = 4096;
    let shift = 101;
    let a = 2.0 * PI * shift as f64 / n as f64;
    let moved = p3_family(0.3, a, &prm, n).unwrap();
    let base = p3_family(0.3, 0.0, &prm, n).unwrap();
    for k in 0..n {
        assert!(rel(moved.values[k], base.values[(k + shift) % n]) < 1e-8);
    }
}

#[test]
fn constructor_domain_errors() {
    // Frequency not admissible: α = 0 is trivial-only for any p ≠ 3.
    assert!(matches!(
        build_profile(1, &params(0.0, 2.0, 1.0), 2048),
        Err(Error::NotAdmissible { j: 1, .. })
    ));
    // j outside the admissible window of a nontrivial fixture.
    assert!(matches!(
        build_profile(3, &params(1.2, 2.0, 1.0), 2048),
        Err(Error::NotAdmissible { .. })
    ));
    // Grid validation: power of two within [16, 8192].
    assert!(matches!(
        build_profile(2, &params(1.2, 2.0, 1.0), 1000),
        Err(Error::InvalidGrid(_))
    ));
    assert!(matches!(trivial_profile(&params(1.2, 2.0, 1.0), 8), Err(Error::InvalidGrid(_))));
    // p3 family preconditions.
    let p3 = params(2.0, 3.0, 1.0);
    assert!(matches!(p3_family(0.0, 0.0, &p3, 2048), Err(Error::Domain(_))));
    assert!(matches!(p3_family(1.5, 0.0, &p3, 2048), Err(Error::Domain(_))));
    assert!(matches!(p3_family(0.5, 0.0, &params(1.0, 3.0, 1.0), 2048), Err(Error::Domain(_))));
    assert!(matches!(p3_family(0.5, 0.0, &params(2.0, 2.0, 1.0), 2048), Err(Error::Domain(_))));
}

#[test]
fn on_grid_residual_is_fourth_order() {
    // The public residual op re-measures on the output grid; it is
    // dominated by its own O(h⁴) truncation, so doubling n divides it
    // by ~16. This pins the stencil's convergence order.
    let prm = params(1.2, 2.0, 1.0);
    let mut coarse = build_profile(2, &prm, 2048).unwrap();
    let mut fine = build_profile(2, &prm, 4096).unwrap();
    let rc = residual(&mut coarse, &prm);
    let rf = residual(&mut fine, &prm);
    assert_eq!(coarse.residual_sup, rc);
    let order = rc / rf;
    assert!(
        (10.0..22.0).contains(&order),
        "expected ~16x per doubling, got {order:.1} ({rc:.3e} -> {rf:.3e})"
    );
}

#[test]
fn external_solution_passes_windowed_residual() {
    // w = [λ(p+1)²/(2(1−p))]^{1/(p+1)} (sin θ)^{2/(p+1)} solves the
    // equation for p = 0.5, α = 0 away from its zeros.
    let prm = params(0.0, 0.5, 1.0);
    let c = (9.0_f64 / 4.0).powf(2.0 / 3.0);
    let n = 8192;
    let thetas: Vec<f64> = (0..n).map(|k| PI * k as f64 / n as f64).collect();
    let values: Vec<f64> = thetas.iter().map(|&t| c * t.sin().powf(4.0 / 3.0)).collect();
    let r = residual_window(&thetas, &values, &prm, (0.2, PI - 0.2)).unwrap();
    assert!(r <= 1e-6, "windowed residual {r:.3e}");

    // A non-solution must be flagged: perturb the constant.
    let flat = vec![1.0; 64];
    let grid: Vec<f64> = (0..64).map(|k| 0.1 * k as f64).collect();
    let r = residual_window(&grid, &flat, &prm, (0.5, 5.5)).unwrap();
    assert!(r > 1e-3, "non-solution slipped through: {r:.3e}");
}
