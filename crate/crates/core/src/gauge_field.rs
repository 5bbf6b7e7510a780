//! The map `u ↦ Φ(u)`, where `Φ(u)` solves `−ΔΦ + q²u²Φ = qu²` with even
//! symmetry at the origin and `Φ(r_max) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{self, RadialField, RadialGrid, RadialSpline};

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSolve {
    pub phi: RadialField,
    pub q: f64,
    /// L² norm of `−ΔΦ + q²u²Φ − qu²` over the free nodes.
    pub residual_norm: f64,
    pub iterations: usize,
}

pub fn solve_phi(u: &RadialField, q: f64) -> Result<GaugeSolve> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::InvalidArgument(format!("coupling q = {q} must be nonnegative")));
    }
    u.check_finite()?;
    let grid = *u.grid();
    if q == 0.0 {
        return Ok(GaugeSolve { phi: RadialField::zeros(grid), q, residual_norm: 0.0, iterations: 1 });
    }
    let u2: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    let shift: Vec<f64> = u2.iter().map(|s| q * q * s).collect();
    let rhs: Vec<f64> = u2.iter().map(|s| q * s).collect();
    let phi = RadialField::from_parts(grid, radial::solve_shifted(&grid, &shift, &rhs)?);
    let residual_norm = gauge_residual(u, &phi, q);
    Ok(GaugeSolve { phi, q, residual_norm, iterations: 1 })
}

/// `‖−ΔΦ + q²u²Φ − qu²‖_{L²}` over the free nodes.
pub fn gauge_residual(u: &RadialField, phi: &RadialField, q: f64) -> f64 {
    let grid = u.grid();
    let lap = radial::laplacian_values(grid, phi.values());
    let n = grid.n_points();
    (0..n - 1)
        .map(|i| {
            let s = u.values()[i] * u.values()[i];
            let r = -lap[i] + q * q * s * phi.values()[i] - q * s;
            grid.weight(i) * r * r
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub index: usize,
    pub r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiBoundsReport {
    pub min: f64,
    pub max: f64,
    pub upper_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub violation: Option<BoundViolation>,
    /// `Φ` at the last free node, i.e. what the Dirichlet truncation cuts off.
    pub boundary_residue: f64,
}

pub const PHI_BOUND_TOLERANCE: f64 = 1e-8;

/// Checks `0 ≤ Φ ≤ 1/q` pointwise up to `tolerance`.
pub fn phi_bounds_check(gs: &GaugeSolve) -> PhiBoundsReport {
    phi_bounds_check_with(gs, PHI_BOUND_TOLERANCE)
}

pub fn phi_bounds_check_with(gs: &GaugeSolve, tolerance: f64) -> PhiBoundsReport {
    let values = gs.phi.values();
    let grid = gs.phi.grid();
    let upper_bound = if gs.q > 0.0 { 1.0 / gs.q } else { f64::INFINITY };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violation = values
        .iter()
        .enumerate()
        .find(|(_, &v)| v < -tolerance || v > upper_bound + tolerance)
        .map(|(index, &value)| BoundViolation { index, r: grid.node(index), value });
    PhiBoundsReport {
        min,
        max,
        upper_bound,
        tolerance,
        pass: violation.is_none(),
        violation,
        boundary_residue: values[values.len().saturating_sub(2)],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    /// Relative L² difference between `Φ(u_λ)` and `Φ(u)(λ·)`.
    pub discrepancy: f64,
    pub compatible_points: usize,
}

/// Compares `Φ(u_λ)` with `Φ(u)(λx)` for `u_λ(x) = λu(λx)`.
///
/// `u_λ` lives on a grid with the same spacing and radius `r_max/λ`, so both
/// sides see the same truncation; the remaining discrepancy is interpolation
/// and discretization error.
pub fn phi_scaling_check(u: &RadialField, q: f64, lambda: f64) -> Result<ScalingReport> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("scaling factor lambda = {lambda} must be positive")));
    }
    let grid = u.grid();
    let base = solve_phi(u, q)?;
    let n_scaled = ((grid.n_points() as f64 / lambda).round() as usize).max(radial::MIN_POINTS);
    let scaled_grid = RadialGrid::new(n_scaled, n_scaled as f64 * grid.spacing())?;
    let u_spline = RadialSpline::new(u)?;
    let u_scaled = u_spline.resample(scaled_grid, |r| lambda * r).scaled(lambda);
    let scaled = solve_phi(&u_scaled, q)?;
    let phi_spline = RadialSpline::new(&base.phi)?;
    let reference = RadialField::from_fn(scaled_grid, |r| phi_spline.value(lambda * r));
    let diff = scaled.phi.zip_map(&reference, |a, b| a - b);
    let denom = scaled.phi.dot(&scaled.phi).sqrt();
    let discrepancy = if denom == 0.0 { diff.dot(&diff).sqrt() } else { diff.dot(&diff).sqrt() / denom };
    Ok(ScalingReport { lambda, discrepancy, compatible_points: n_scaled })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallQRow {
    pub q: f64,
    /// `‖Φ_q(u)‖_D / q`
    pub d_norm_over_q: f64,
    /// `q ∫ u² Φ_q dx`
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallQReport {
    pub rows: Vec<SmallQRow>,
    /// `max/min − 1` of `‖Φ_q‖_D / q` over the list.
    pub ratio_spread: f64,
    /// Exponent `log(c_i/c_j)/log(q_i/q_j)` of the coupling between
    /// consecutive list entries.
    pub coupling_exponents: Vec<f64>,
}

pub fn phi_smallq_check(u: &RadialField, q_list: &[f64]) -> Result<SmallQReport> {
    if q_list.is_empty() {
        return Err(Error::InvalidArgument("empty q list".into()));
    }
    let mut rows = Vec::with_capacity(q_list.len());
    for &q in q_list {
        if !(q > 0.0) {
            return Err(Error::InvalidArgument(format!("small-q check needs q > 0, got {q}")));
        }
        let gs = solve_phi(u, q)?;
        let d_norm = radial::dirichlet_energy(&gs.phi).sqrt();
        let u2 = u.map(|v| v * v);
        rows.push(SmallQRow { q, d_norm_over_q: d_norm / q, coupling: q * u2.dot(&gs.phi) });
    }
    let lo = rows.iter().map(|r| r.d_norm_over_q).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.d_norm_over_q).fold(0.0, f64::max);
    let ratio_spread = if lo > 0.0 { hi / lo - 1.0 } else { 0.0 };
    let coupling_exponents = rows
        .windows(2)
        .filter(|w| w[0].coupling > 0.0 && w[1].coupling > 0.0)
        .map(|w| (w[0].coupling / w[1].coupling).ln() / (w[0].q / w[1].q).ln())
        .collect();
    Ok(SmallQReport { rows, ratio_spread, coupling_exponents })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, r_max: f64, amp: f64) -> RadialField {
        let g = RadialGrid::new(n, r_max).unwrap();
        RadialField::from_fn(g, |r| amp * (-r * r).exp()).with_dirichlet()
    }

    #[test]
    fn zero_source_and_zero_coupling() {
        let g = RadialGrid::new(64, 5.0).unwrap();
        let gs = solve_phi(&RadialField::zeros(g), 0.3).unwrap();
        assert!(gs.phi.values().iter().all(|&v| v == 0.0));
        let gs = solve_phi(&gaussian(64, 5.0, 2.0), 0.0).unwrap();
        assert!(gs.phi.values().iter().all(|&v| v == 0.0));
        assert!(solve_phi(&gaussian(64, 5.0, 2.0), -0.1).is_err());
    }

    #[test]
    fn deterministic() {
        let u = gaussian(500, 20.0, 3.0);
        let a = solve_phi(&u, 0.2).unwrap();
        let b = solve_phi(&u, 0.2).unwrap();
        assert_eq!(a.phi.values(), b.phi.values());
    }

    #[test]
    fn bounds_hold_and_negation_fails() {
        let u = gaussian(800, 30.0, 5.0);
        let gs = solve_phi(&u, 0.5).unwrap();
        let report = phi_bounds_check(&gs);
        assert!(report.pass, "{report:?}");
        assert!(report.min >= 0.0);
        let negated = GaugeSolve { phi: gs.phi.scaled(-1.0), ..gs };
        let report = phi_bounds_check(&negated);
        assert!(!report.pass);
        assert!(report.violation.unwrap().value < 0.0);
    }

    #[test]
    fn large_amplitude_stays_below_inverse_coupling() {
        let u = gaussian(800, 30.0, 1e3);
        let gs = solve_phi(&u, 1.0).unwrap();
        let report = phi_bounds_check(&gs);
        assert!(report.pass, "{report:?}");
        assert!(report.max <= 1.0 + 1e-8 && report.max > 0.9);
    }

    #[test]
    fn screening_is_monotone_in_q() {
        let u = gaussian(600, 25.0, 4.0);
        for q in [0.05, 0.1, 0.5, 1.0, 2.0, 8.0] {
            let gs = solve_phi(&u, q).unwrap();
            assert!(gs.phi.values().iter().all(|&v| v >= 0.0 && v <= 1.0 / q + 1e-12));
        }
    }

    #[test]
    fn identity_scaling_is_exact() {
        let u = gaussian(400, 20.0, 2.0);
        let report = phi_scaling_check(&u, 0.1, 1.0).unwrap();
        assert!(report.discrepancy < 1e-12, "{report:?}");
        assert!(phi_scaling_check(&u, 0.1, 0.0).is_err());
        assert!(phi_scaling_check(&u, 0.1, -2.0).is_err());
    }

    #[test]
    fn scaling_discrepancy_small_and_second_order() {
        for lambda in [2.0, 0.5] {
            let coarse = phi_scaling_check(&gaussian(1000, 25.0, 2.0), 0.1, lambda).unwrap();
            let fine = phi_scaling_check(&gaussian(2000, 25.0, 2.0), 0.1, lambda).unwrap();
            assert!(coarse.discrepancy <= 5e-3, "{coarse:?}");
            let ratio = coarse.discrepancy / fine.discrepancy;
            assert!(ratio > 3.0, "lambda {lambda}: ratio {ratio}");
        }
    }

    #[test]
    fn small_q_for_zero_field() {
        let g = RadialGrid::new(100, 10.0).unwrap();
        let report = phi_smallq_check(&RadialField::zeros(g), &[0.1, 0.05]).unwrap();
        assert!(report.rows.iter().all(|r| r.d_norm_over_q == 0.0 && r.coupling == 0.0));
        assert!(phi_smallq_check(&RadialField::zeros(g), &[]).is_err());
    }
}
