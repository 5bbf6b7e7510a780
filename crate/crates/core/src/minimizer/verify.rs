use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{h1_norm, multiplier_estimate, SolitaryWaveSolution};
use crate::error::Result;
use crate::functionals;
use crate::gauge_field;
use crate::nonlinearity::NonlinearityModel;
use crate::radial::{self, RadialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Recorded without a threshold.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub status: CheckStatus,
    pub value: f64,
    pub threshold: Option<f64>,
    pub note: String,
}

impl Check {
    /// Passes when `value ≤ threshold`.
    fn at_most(value: f64, threshold: f64, note: impl Into<String>) -> Self {
        let status = if value <= threshold { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { status, value, threshold: Some(threshold), note: note.into() }
    }

    fn flag(pass: bool, value: f64, note: impl Into<String>) -> Self {
        let status = if pass { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { status, value, threshold: None, note: note.into() }
    }

    fn info(value: f64, note: impl Into<String>) -> Self {
        Self { status: CheckStatus::Info, value, threshold: None, note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: BTreeMap<String, Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.passed()).map(|(k, _)| k.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.get(name)
    }

    fn put(&mut self, name: &str, check: Check) {
        self.checks.insert(name.to_string(), check);
    }
}

/// `‖−Δu − ω²(1 − qΦ)²u + W′(u)‖_{L²} / ‖u‖_{H¹}` with `Φ = Φ(u)`.
pub fn static_residual(u: &RadialField, model: &NonlinearityModel, omega2: f64, q: f64) -> Result<f64> {
    let gs = gauge_field::solve_phi(u, q)?;
    let d_j = functionals::grad_j(u, model)?;
    let d_l = functionals::grad_lambda_with_phi(u, &gs.phi, q);
    let res = d_j.axpy(-omega2, &d_l);
    Ok(res.dot(&res).sqrt() / h1_norm(u))
}

const DP_RELATIVE: f64 = 1e-3;
const MULTIPLIER_AGREEMENT: f64 = 1e-4;

/// Recomputes every diagnostic from `(u, Φ, ω²)` without trusting the values
/// stored by the solver.
pub fn verify_solution(sol: &SolitaryWaveSolution, model: &NonlinearityModel, q: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let u = &sol.u;
    let norm_u = h1_norm(u);
    let m02 = model.m0().powi(2);

    let lambda = functionals::eval_lambda(u, q)?;
    let drift = (lambda - sol.sigma2).abs() / sol.sigma2;
    report.put("constraint", Check::at_most(drift, 1e-8, "|Lambda(u) - sigma2| / sigma2"));

    if !(norm_u > 0.0) {
        report.put("static_residual", Check::flag(false, f64::NAN, "u vanishes identically"));
        return Ok(report);
    }

    let residual = static_residual(u, model, sol.omega2, q)?;
    report.put(
        "static_residual",
        Check::at_most(residual, sol.tol_residual, "||J'(u) - omega2 Lambda'(u)||_L2 / ||u||_H1"),
    );

    let gs = gauge_field::solve_phi(u, q)?;
    let scale = radial::norm(&u.map(|v| q * v * v), radial::NormKind::L2)?.max(f64::MIN_POSITIVE);
    report.put(
        "gauge_residual",
        Check::at_most(gauge_field::gauge_residual(u, &sol.phi, q) / scale, 1e-10, "relative residual of the Phi equation"),
    );
    let phi_diff = gs.phi.zip_map(&sol.phi, |a, b| a - b).max_abs();
    report.put(
        "phi_consistency",
        Check::at_most(phi_diff, 1e-10 * gs.phi.max_abs().max(1.0), "max |Phi(u) - stored Phi|"),
    );
    let bounds = gauge_field::phi_bounds_check(&gs);
    report.put("phi_bounds", Check::flag(bounds.pass, bounds.max, "0 <= Phi <= 1/q"));
    report.put("phi_boundary_residue", Check::info(bounds.boundary_residue, "Phi at the last free node"));

    let window = sol.omega2 > 0.0 && sol.omega2 < m02;
    report.put("multiplier_window", Check::flag(window, sol.omega2, format!("0 < omega2 < m0^2 = {m02}")));

    let mult = multiplier_estimate(u, q, model)?;
    let agreement = (mult.least_squares - mult.pairing).abs() / mult.least_squares.abs().max(f64::MIN_POSITIVE);
    report.put(
        "multiplier_agreement",
        Check::at_most(agreement, MULTIPLIER_AGREEMENT, "least-squares vs pairing multiplier"),
    );
    report.put(
        "multiplier_pairing_half_lambda",
        Check::info(mult.pairing_half_lambda, "<J'(u), u> / 2 Lambda(u)"),
    );

    let energy = functionals::eval_energy_static(u, &gs, sol.omega2.max(0.0).sqrt(), model)?;
    let floor = -1e-12 * energy.density.max_abs();
    let min_density = energy.density.values().iter().copied().fold(f64::INFINITY, f64::min);
    report.put("energy_positivity", Check::flag(min_density >= floor, min_density, "minimum energy density"));
    report.put("energy", Check::info(energy.total, "J + omega2 A"));

    let j = functionals::eval_j(u, model)?;
    let dp = functionals::derrick_pohozaev(u, model, sol.omega2)?;
    report.put("dp_w", Check::flag(dp.dp_w > 0.0, dp.dp_w, "(1/6)|grad u|^2 + int W > 0"));
    if q == 0.0 {
        report.put("dp_g", Check::at_most(dp.dp_g.abs() / j, DP_RELATIVE, "|dp_G| / J"));
    } else {
        report.put("dp_g", Check::info(dp.dp_g.abs() / j, "|dp_G| / J, no identity for q > 0"));
    }

    let n = u.len();
    let peak = u.max_abs();
    let edge = u.values()[n - 2].abs() / peak;
    report.put("u_boundary_residue", Check::at_most(edge, 1e-6, "|u| at the last free node relative to max |u|"));

    let grid = u.grid();
    let tol = 1e-12 * peak;
    let start = (0..n).find(|&i| grid.node(i) >= 5.0).unwrap_or(n);
    let worst = (start..n.saturating_sub(1))
        .map(|i| u.values()[i + 1].abs() - u.values()[i].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    report.put(
        "radial_decay",
        Check::flag(start >= n - 1 || worst <= tol, worst, "|u| non-increasing beyond r = 5"),
    );

    if q > 0.0 {
        report.put("smallness_regime", Check::info(q, "coupling q; convergence with omega2 < m0^2 observed"));
    }
    Ok(report)
}
