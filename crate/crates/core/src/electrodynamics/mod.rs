//! Electromagnetic reconstruction of a solitary wave on a Cartesian grid.
//!
//! A standing wave `ψ = u(|x|)e^{−iω0t}`, `φ = ω0Φ(|x|)`, `A = 0` is boosted
//! along `x₁` with velocity `v`: with `t′ = γ(t − vx₁)`, `x′ = (γ(x₁ − vt), x₂, x₃)`,
//!
//! ```text
//! ψ_v(t, x) = u(|x′|) e^{i(k₁x₁ − ωt)},   ω = γω0,  k₁ = γω0v
//! φ_v = γφ(x′),   A_v = γφ(x′)·(v, 0, 0)
//! ```
//!
//! and the derived fields follow from
//! `E = −(∂A/∂t + ∇φ)`, `H = ∇×A`, `ρ = −(∂S/∂t + qφ)qu²`, `j = (∇S − qA)qu²`.
//! Spatial derivatives are centered differences; time derivatives of the
//! potentials and of `u` are analytic.
//!
//! Arrays are stored with `x₁` fastest: node `(i, j, k)` sits at index
//! `i + n(j + nk)` and position `(−w + ih, −w + jh, −w + kh)`.

mod gauge;
pub mod ops;
mod residuals;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gauge::{energy_density, gauge_transform, total_energy, GaugeFunction, TimeIndependent};
pub use residuals::{
    matter_residual, maxwell_residuals, radial_truncation_residual, refinement_study, MatterReport, MaxwellReport,
    RefinementReport, ResidualOrder, MARGIN, RESIDUAL_NAMES,
};

use crate::error::{Error, Result};
use crate::minimizer::SolitaryWaveSolution;
use crate::radial::RadialSpline;
use ops::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    pub n_per_axis: usize,
    pub half_width: f64,
    pub spacing: f64,
}

impl CartesianGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n_per_axis: usize, half_width: f64) -> Result<Self> {
        if n_per_axis < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis = {n_per_axis} is below the minimum of {}",
                Self::MIN_POINTS
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half_width = {half_width} must be positive")));
        }
        Ok(Self { n_per_axis, half_width, spacing: 2.0 * half_width / (n_per_axis - 1) as f64 })
    }

    pub fn len(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n_per_axis * (j + self.n_per_axis * k)
    }

    pub fn position(&self, index: usize) -> [f64; 3] {
        let n = self.n_per_axis;
        [self.coordinate(index % n), self.coordinate((index / n) % n), self.coordinate(index / (n * n))]
    }

    /// Whether the node is at least `margin` layers from every face.
    pub fn is_interior(&self, index: usize, margin: usize) -> bool {
        let n = self.n_per_axis;
        let ok = |p: usize| p >= margin && p + margin < n;
        ok(index % n) && ok((index / n) % n) && ok(index / (n * n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianFieldFrame {
    pub grid: CartesianGrid,
    pub time: f64,
    pub velocity: [f64; 3],
    pub gamma: f64,
    pub omega0: f64,
    pub omega: f64,
    pub k1: f64,
    pub q: f64,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
    pub u_amp: Vec<f64>,
    /// `∂u/∂t`
    pub u_t: Vec<f64>,
    /// `S`
    pub phase: Vec<f64>,
    /// `∂S/∂t`
    pub phase_t: Vec<f64>,
    /// `∇S`
    pub phase_grad: Vector,
    pub phi_pot: Vec<f64>,
    pub a_pot: Vector,
    /// `∂A/∂t`
    pub a_t: Vector,
    pub e_field: Vector,
    pub h_field: Vector,
    pub rho: Vec<f64>,
    pub j_current: Vector,
    pub warnings: Vec<String>,
}

impl CartesianFieldFrame {
    /// Recomputes `E`, `H`, `ρ`, `j` from the potentials and the phase.
    pub(crate) fn derive_fields(&mut self) {
        let g = &self.grid;
        let q = self.q;
        let grad_phi = ops::grad(g, &self.phi_pot);
        self.e_field = ops::combine_vec(&self.a_t, &grad_phi, |at, gp| -(at + gp));
        self.h_field = ops::curl(g, &self.a_pot);
        let u2: Vec<f64> = self.u_amp.par_iter().map(|u| u * u).collect();
        self.rho = self
            .phase_t
            .par_iter()
            .zip(self.phi_pot.par_iter())
            .zip(u2.par_iter())
            .map(|((st, phi), u2)| -(st + q * phi) * q * u2)
            .collect();
        self.j_current = std::array::from_fn(|c| {
            self.phase_grad[c]
                .par_iter()
                .zip(self.a_pot[c].par_iter())
                .zip(u2.par_iter())
                .map(|((gs, a), u2)| (gs - q * a) * q * u2)
                .collect()
        });
    }
}

/// Samples the boosted solution at time `t`.
pub fn boost(sol: &SolitaryWaveSolution, v: f64, t: f64, grid: CartesianGrid) -> Result<CartesianFieldFrame> {
    if !(v.is_finite() && v.abs() < 1.0) {
        return Err(Error::Superluminal(v));
    }
    if !(t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time t = {t} must be finite")));
    }
    let omega0 = sol.omega();
    let gamma = 1.0 / (1.0 - v * v).sqrt();
    let omega = gamma * omega0;
    let k1 = gamma * omega0 * v;
    let u_spline = RadialSpline::new(&sol.u)?;
    let phi_spline = RadialSpline::new(&sol.phi)?;
    let len = grid.len();

    // (u, u_t, φ, φ_t) per node.
    let samples: Vec<[f64; 4]> = (0..len)
        .into_par_iter()
        .map(|idx| {
            let x = grid.position(idx);
            let x1p = gamma * (x[0] - v * t);
            let rp = (x1p * x1p + x[1] * x[1] + x[2] * x[2]).sqrt();
            let (u, du) = u_spline.eval(rp);
            let (p, dp) = phi_spline.eval(rp);
            // ∂r′/∂t = (x₁′/r′)·(−γv)
            let drdt = if rp > 0.0 { -gamma * v * x1p / rp } else { 0.0 };
            [u, du * drdt, gamma * omega0 * p, gamma * omega0 * dp * drdt]
        })
        .collect();
    let column = |c: usize| -> Vec<f64> { samples.par_iter().map(|s| s[c]).collect() };
    let u_amp = column(0);
    let u_t = column(1);
    let phi_pot = column(2);
    let phi_t = column(3);
    drop(samples);

    let phase: Vec<f64> = (0..len).into_par_iter().map(|idx| k1 * grid.position(idx)[0] - omega * t).collect();
    let psi_re = ops::combine(&u_amp, &phase, |u, s| u * s.cos());
    let psi_im = ops::combine(&u_amp, &phase, |u, s| u * s.sin());
    let zeros = || vec![0.0; len];
    let a_pot = [phi_pot.par_iter().map(|p| v * p).collect(), zeros(), zeros()];
    let a_t = [phi_t.par_iter().map(|p| v * p).collect(), zeros(), zeros()];

    let mut warnings = Vec::new();
    // Contraction only shortens x₁; the transverse faces cut at r′ = w.
    let edge = u_spline.value(grid.half_width) / sol.u.max_abs();
    if edge > 1e-3 {
        warnings.push(format!("box half-width {} cuts the profile at {edge:.2e} of its peak", grid.half_width));
    }
    let peak_width = width_estimate(sol);
    if grid.spacing * gamma > 0.5 * peak_width {
        warnings.push(format!(
            "spacing {} is coarse against the contracted core width {:.3}",
            grid.spacing,
            peak_width / gamma
        ));
    }

    let mut frame = CartesianFieldFrame {
        grid,
        time: t,
        velocity: [v, 0.0, 0.0],
        gamma,
        omega0,
        omega,
        k1,
        q: sol.q,
        psi_re,
        psi_im,
        u_amp,
        u_t,
        phase,
        phase_t: vec![-omega; len],
        phase_grad: [vec![k1; len], zeros(), zeros()],
        phi_pot,
        a_pot,
        a_t,
        e_field: [zeros(), zeros(), zeros()],
        h_field: [zeros(), zeros(), zeros()],
        rho: zeros(),
        j_current: [zeros(), zeros(), zeros()],
        warnings,
    };
    frame.derive_fields();
    Ok(frame)
}

/// Radius at which `u` falls to half its central value.
fn width_estimate(sol: &SolitaryWaveSolution) -> f64 {
    let grid = sol.u.grid();
    let half = 0.5 * sol.u.value_at_origin();
    sol.u
        .values()
        .iter()
        .position(|&v| v < half)
        .map(|i| grid.node(i))
        .unwrap_or(grid.r_max())
}
