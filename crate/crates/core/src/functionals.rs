//! The action `J`, the gauge-coupled form `A`, the constraint `Λ`, the reduced
//! functional `I_ω`, the static energy and the Derrick–Pohozaev functionals.
//!
//! Gradients are strong-form fields paired through the volume pairing
//! [`RadialField::dot`]. Because the discrete Dirichlet energy is the exact
//! quadratic form of the discrete Laplacian, the gradients below are the exact
//! derivatives of the discrete functionals, not just consistent
//! approximations. The Dirichlet node is pinned and carries a zero gradient.

use crate::error::Result;
use crate::gauge_field::{self, GaugeSolve};
use crate::nonlinearity::NonlinearityModel;
use crate::radial::{self, RadialField};

fn potential_values(u: &RadialField, model: &NonlinearityModel) -> Result<Vec<f64>> {
    u.values().iter().map(|&s| model.w(s)).collect()
}

fn pin(mut field: RadialField) -> RadialField {
    if let Some(last) = field.values_mut().last_mut() {
        *last = 0.0;
    }
    field
}

/// `J(u) = ½∫|∇u|² dx + ∫W(u) dx`.
pub fn eval_j(u: &RadialField, model: &NonlinearityModel) -> Result<f64> {
    u.check_finite()?;
    let w = potential_values(u, model)?;
    Ok(0.5 * radial::dirichlet_energy(u) + radial::volume_sum(u.grid(), &w))
}

/// `A(u, Φ) = ½∫|∇Φ|² dx + ½∫u²(1 − qΦ)² dx`.
pub fn eval_a(u: &RadialField, phi: &RadialField, q: f64) -> f64 {
    let coupled: Vec<f64> = u
        .values()
        .iter()
        .zip(phi.values())
        .map(|(&s, &p)| {
            let c = 1.0 - q * p;
            s * s * c * c
        })
        .collect();
    0.5 * radial::dirichlet_energy(phi) + 0.5 * radial::volume_sum(u.grid(), &coupled)
}

/// `½∫u²(1 − qΦ) dx` for a given `Φ`.
pub fn lambda_with_phi(u: &RadialField, phi: &RadialField, q: f64) -> f64 {
    let integrand: Vec<f64> =
        u.values().iter().zip(phi.values()).map(|(&s, &p)| s * s * (1.0 - q * p)).collect();
    0.5 * radial::volume_sum(u.grid(), &integrand)
}

/// `Λ(u) = ½∫u²(1 − qΦ(u)) dx`, solving for `Φ(u)` internally.
pub fn eval_lambda(u: &RadialField, q: f64) -> Result<f64> {
    let gs = gauge_field::solve_phi(u, q)?;
    Ok(lambda_with_phi(u, &gs.phi, q))
}

/// `J′(u) = −Δu + W′(u)`.
pub fn grad_j(u: &RadialField, model: &NonlinearityModel) -> Result<RadialField> {
    let lap = radial::radial_laplacian(u)?;
    let dw: Vec<f64> = u.values().iter().map(|&s| model.dw(s)).collect::<Result<_>>()?;
    let values = lap.values().iter().zip(&dw).map(|(l, d)| -l + d).collect();
    Ok(pin(RadialField::from_parts(*u.grid(), values)))
}

/// `Λ′(u) = u(1 − qΦ(u))²` for a given `Φ = Φ(u)`.
///
/// `Λ(u) = A(u, Φ(u))` and `∂A/∂Φ` vanishes at `Φ(u)`, so only the explicit
/// `u`-derivative of `A` survives; that derivative carries the square.
pub fn grad_lambda_with_phi(u: &RadialField, phi: &RadialField, q: f64) -> RadialField {
    pin(u.zip_map(phi, |s, p| {
        let c = 1.0 - q * p;
        s * c * c
    }))
}

pub fn grad_lambda(u: &RadialField, q: f64) -> Result<RadialField> {
    let gs = gauge_field::solve_phi(u, q)?;
    Ok(grad_lambda_with_phi(u, &gs.phi, q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub j: f64,
    pub a: f64,
    pub lambda: f64,
    /// `I_ω(u) = J(u) − ω²Λ(u)`
    pub i_omega: f64,
    pub omega2: f64,
}

impl FunctionalValue {
    pub fn evaluate(u: &RadialField, model: &NonlinearityModel, q: f64, omega2: f64) -> Result<Self> {
        let gs = gauge_field::solve_phi(u, q)?;
        let j = eval_j(u, model)?;
        let a = eval_a(u, &gs.phi, q);
        let lambda = lambda_with_phi(u, &gs.phi, q);
        Ok(Self { j, a, lambda, i_omega: j - omega2 * lambda, omega2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub d_j: RadialField,
    pub d_lambda: RadialField,
}

impl GradientPair {
    pub fn evaluate(u: &RadialField, model: &NonlinearityModel, q: f64) -> Result<Self> {
        let gs = gauge_field::solve_phi(u, q)?;
        Ok(Self { d_j: grad_j(u, model)?, d_lambda: grad_lambda_with_phi(u, &gs.phi, q) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticEnergy {
    pub total: f64,
    pub density: RadialField,
}

/// Energy of the standing wave `ψ = u e^{−iωt}`, `A = 0`, `φ = ωΦ`:
/// density `½|∇u|² + W(u) + ½ω²u²(1 − qΦ)² + ½ω²|∇Φ|²`, total
/// `J(u) + ω²A(u, Φ)`.
pub fn eval_energy_static(
    u: &RadialField,
    phi_solution: &GaugeSolve,
    omega: f64,
    model: &NonlinearityModel,
) -> Result<StaticEnergy> {
    u.check_finite()?;
    let grid = *u.grid();
    let q = phi_solution.q;
    let phi = phi_solution.phi.values();
    let w2 = omega * omega;
    let grad_u = radial::gradient_density(&grid, u.values());
    let grad_phi = radial::gradient_density(&grid, phi);
    let w = potential_values(u, model)?;
    let density: Vec<f64> = (0..grid.n_points())
        .map(|i| {
            let s = u.values()[i];
            let c = 1.0 - q * phi[i];
            0.5 * grad_u[i] + w[i] + 0.5 * w2 * s * s * c * c + 0.5 * w2 * grad_phi[i]
        })
        .collect();
    let total = radial::volume_sum(&grid, &density);
    Ok(StaticEnergy { total, density: RadialField::from_parts(grid, density) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerrickPohozaev {
    /// `(1/6)∫|∇u|² + ∫W(u)`
    pub dp_w: f64,
    /// `(1/6)∫|∇u|² + ∫(W(u) − ½ω²u²)`
    pub dp_g: f64,
}

pub fn derrick_pohozaev(u: &RadialField, model: &NonlinearityModel, omega2: f64) -> Result<DerrickPohozaev> {
    u.check_finite()?;
    let grad = radial::dirichlet_energy(u) / 6.0;
    let w = potential_values(u, model)?;
    let int_w = radial::volume_sum(u.grid(), &w);
    let mass: Vec<f64> = u.values().iter().map(|s| s * s).collect();
    let int_mass = radial::volume_sum(u.grid(), &mass);
    Ok(DerrickPohozaev { dp_w: grad + int_w, dp_g: grad + int_w - 0.5 * omega2 * int_mass })
}
