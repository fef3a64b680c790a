/*!
Numerical toolkit for the structure theory of rupture solutions
`u(r,θ) = r^{(α+2)/(p+1)} w(θ)` of the MEMS-type equation `Δu = λ|x|^α / u^p`.

Writing `β = (α+2)/(p+1)`, the angular profile satisfies the pendulum-like
equation `w'' + β²w − λ/w^p = 0` on the circle, and the whole solution
structure reduces to phase-plane analysis of that ODE:

- [`params`] — the parameter triple (α, p, λ) and every closed-form scalar:
  β, the constant equilibrium m₀, the potential pieces h and g, the phase
  constant, and orbit data w₁(τ), w₂ = τ·w₁.
- [`classify`] — which (α, p) admit only the trivial constant solution,
  which admit finitely many nontrivial components (with which angular
  frequencies j), and the isochronous p = 3 continuum.
- [`quadrature`] — tanh-sinh quadrature for inverse-square-root endpoint
  singularities, the AGM, and the complete elliptic integral K.
- [`period`] — the half-period function L(τ) of phase-plane orbits, its
  τ→1 and τ→∞ limits, and inversion τ(L).
- [`profile`] — sampled periodic solutions w(θ) on a uniform grid, with
  finite-difference residual diagnostics; includes the explicit p = 3
  family.
- [`energy`] — the energy functional on the circle, the normalized means
  F(τ)/F₁(τ) and the integral H(τ) through which the energy of every
  solution component is expressed, their asymptotics, and monotonicity
  sweeps.
- [`cylinder`] — a damped-Newton solver for the transformed equation
  `v_tt + 2βv_t + v_θθ + β²v − λ/v^p = 0` on a truncated cylinder, used to
  probe connections between solution components and the flux identity
  `∬ 2βv_t² = E(right) − E(left)`.

All scalars are `f64`; tolerances are stated per check rather than globally.
*/

pub mod classify;
pub mod cylinder;
pub mod energy;
pub mod error;
pub mod params;
pub mod period;
pub mod profile;
pub mod quadrature;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
