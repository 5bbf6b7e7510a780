//! Finite-energy solitary waves of the Abelian-gauge Klein–Gordon–Maxwell
//! system.
//!
//! The matter amplitude `u` is found as a minimizer of the action
//! `J(u) = ½∫|∇u|² + ∫W(u)` on the charge-like constraint manifold
//! `Λ(u) = ½∫u²(1 − qΦ(u)) = σ²`, where `Φ(u)` solves the screened
//! gauge equation `−ΔΦ + q²u²Φ = qu²`. The frequency `ω²` appears as the
//! Lagrange multiplier. From a converged radial solution the crate
//! reconstructs the electromagnetic picture (potentials, `E`, `H`, `ρ`, `j`)
//! on a Cartesian grid, applies Lorentz boosts, and measures the Maxwell,
//! continuity and matter-equation residuals.
//!
//! Module map:
//!
//! * [`radial`]: radial grid, quadrature, Laplacian, norms, interpolation
//! * [`nonlinearity`]: `W`, its derivatives, and the W1–W5 checker
//! * [`gauge_field`]: the `u ↦ Φ(u)` solve and its structural checks
//! * [`functionals`]: `J`, `A`, `Λ`, `I_ω`, energy, Derrick–Pohozaev
//! * [`minimizer`]: constrained descent, the multiplier, the shooting oracle
//! * [`electrodynamics`]: boosted Cartesian frames and residuals
//! * [`cli`]: configuration, persistence, plots and the command surface

pub mod cli;
pub mod electrodynamics;
pub mod error;
pub mod functionals;
pub mod gauge_field;
pub mod minimizer;
pub mod nonlinearity;
pub mod radial;

pub use error::{Error, Result};
