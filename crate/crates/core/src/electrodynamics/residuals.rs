use serde::{Deserialize, Serialize};

use super::ops::{self, interior_l2, interior_l2_vec, Vector};
use super::{boost, CartesianFieldFrame, CartesianGrid};
use crate::error::{Error, Result};
use crate::minimizer::SolitaryWaveSolution;
use crate::nonlinearity::NonlinearityModel;
use crate::radial::RadialSpline;

/// Layers next to each face excluded from residual norms.
pub const MARGIN: usize = 2;

pub const RESIDUAL_NAMES: [&str; 5] = ["gauss", "ampere", "faraday", "monopole", "continuity"];

/// A residual below this fraction of the largest term scale is rounding noise.
const EXACT_RELATIVE: f64 = 1e-11;

/// L² norms of the Maxwell and continuity residuals at the midpoint between
/// two frames, plus the size of the terms entering each one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxwellReport {
    pub dt: f64,
    pub spacing: f64,
    /// `∇·E − ρ`, `∇×H − ∂E/∂t − j`, `∇×E + ∂H/∂t`, `∇·H`, `∂ρ/∂t + ∇·j`
    pub residuals: [f64; 5],
    pub scales: [f64; 5],
}

impl MaxwellReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        RESIDUAL_NAMES.iter().position(|n| *n == name).map(|i| self.residuals[i])
    }

    /// Whether residual `i` is rounding noise. The yardstick is the largest
    /// term scale in the report, since a residual whose own terms vanish has
    /// a scale that is itself rounding noise.
    pub fn is_exact(&self, i: usize) -> bool {
        let reference = self.scales.iter().copied().fold(0.0, f64::max);
        self.residuals[i] <= EXACT_RELATIVE * reference
    }
}

fn average(a: &[f64], b: &[f64]) -> Vec<f64> {
    ops::combine(a, b, |x, y| 0.5 * (x + y))
}

fn average_vec(a: &Vector, b: &Vector) -> Vector {
    ops::combine_vec(a, b, |x, y| 0.5 * (x + y))
}

fn rate(a: &[f64], b: &[f64], dt: f64) -> Vec<f64> {
    ops::combine(b, a, |y, x| (y - x) / dt)
}

fn rate_vec(a: &Vector, b: &Vector, dt: f64) -> Vector {
    ops::combine_vec(b, a, move |y, x| (y - x) / dt)
}

fn check_pair(a: &CartesianFieldFrame, b: &CartesianFieldFrame) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch("frames live on different grids".into()));
    }
    if a.q != b.q || a.velocity != b.velocity {
        return Err(Error::InvalidArgument("frames describe different configurations".into()));
    }
    let dt = b.time - a.time;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("second frame must be later, got dt = {dt}")));
    }
    Ok(dt)
}

pub fn maxwell_residuals(frame: &CartesianFieldFrame, frame_dt: &CartesianFieldFrame) -> Result<MaxwellReport> {
    let dt = check_pair(frame, frame_dt)?;
    let g = &frame.grid;
    let norm = |f: &[f64]| interior_l2(g, f, MARGIN);
    let norm_v = |v: &Vector| interior_l2_vec(g, v, MARGIN);

    let e = average_vec(&frame.e_field, &frame_dt.e_field);
    let h = average_vec(&frame.h_field, &frame_dt.h_field);
    let rho = average(&frame.rho, &frame_dt.rho);
    let j = average_vec(&frame.j_current, &frame_dt.j_current);
    let e_t = rate_vec(&frame.e_field, &frame_dt.e_field, dt);
    let h_t = rate_vec(&frame.h_field, &frame_dt.h_field, dt);
    let rho_t = rate(&frame.rho, &frame_dt.rho, dt);

    let div_e = ops::div(g, &e);
    let curl_h = ops::curl(g, &h);
    let curl_e = ops::curl(g, &e);
    let div_j = ops::div(g, &j);
    let monopole_terms: f64 = (0..3).map(|c| norm(&ops::diff(g, &h[c], c))).sum();

    let gauss = ops::combine(&div_e, &rho, |a, b| a - b);
    let ampere: Vector = std::array::from_fn(|c| {
        (0..g.len()).map(|i| curl_h[c][i] - e_t[c][i] - j[c][i]).collect::<Vec<f64>>()
    });
    let faraday = ops::combine_vec(&curl_e, &h_t, |a, b| a + b);
    let monopole = ops::div(g, &h);
    let continuity = ops::combine(&rho_t, &div_j, |a, b| a + b);

    Ok(MaxwellReport {
        dt,
        spacing: g.spacing,
        residuals: [norm(&gauss), norm_v(&ampere), norm_v(&faraday), norm(&monopole), norm(&continuity)],
        scales: [
            norm(&div_e) + norm(&rho),
            norm_v(&curl_h) + norm_v(&e_t) + norm_v(&j),
            norm_v(&curl_e) + norm_v(&h_t),
            monopole_terms,
            norm(&rho_t) + norm(&div_j),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualOrder {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    /// `None` when the residual is rounding noise on both grids.
    pub order: Option<f64>,
}

impl ResidualOrder {
    pub fn exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn passes(&self, min_order: f64) -> bool {
        self.order.map_or(true, |p| p >= min_order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub velocity: f64,
    pub coarse: MaxwellReport,
    pub fine: MaxwellReport,
    pub orders: Vec<ResidualOrder>,
}

impl RefinementReport {
    pub fn all_pass(&self, min_order: f64) -> bool {
        self.orders.iter().all(|o| o.passes(min_order))
    }
}

/// Builds frame pairs `(t, t + h/4)` on two grids of the same half-width and
/// reports each residual's observed order `log(r_c/r_f)/log(h_c/h_f)`.
pub fn refinement_study(
    sol: &SolitaryWaveSolution,
    v: f64,
    t: f64,
    half_width: f64,
    n_coarse: usize,
    n_fine: usize,
) -> Result<RefinementReport> {
    if n_fine <= n_coarse {
        return Err(Error::InvalidArgument(format!("refined grid {n_fine} must exceed {n_coarse}")));
    }
    let level = |n: usize| -> Result<MaxwellReport> {
        let grid = CartesianGrid::new(n, half_width)?;
        let dt = grid.spacing / 4.0;
        let a = boost(sol, v, t, grid)?;
        let b = boost(sol, v, t + dt, grid)?;
        maxwell_residuals(&a, &b)
    };
    let coarse = level(n_coarse)?;
    let fine = level(n_fine)?;
    let ratio = coarse.spacing / fine.spacing;
    let orders = RESIDUAL_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let order = if coarse.is_exact(i) && fine.is_exact(i) {
                None
            } else {
                Some((coarse.residuals[i] / fine.residuals[i]).ln() / ratio.ln())
            };
            ResidualOrder { name: name.to_string(), coarse: coarse.residuals[i], fine: fine.residuals[i], order }
        })
        .collect();
    Ok(RefinementReport { velocity: v, coarse, fine, orders })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatterReport {
    /// Masked L² norm of the residual.
    pub residual: f64,
    /// Masked L² norm of `W′(u)`, for scale.
    pub scale: f64,
    pub u_floor: f64,
    /// Share of interior nodes with `u < u_floor`.
    pub masked_fraction: f64,
    pub dt: f64,
}

/// `∂²u/∂t² − Δu + W′(u) + (j² − ρ²)/(q²u³)` at the middle frame, restricted to
/// interior nodes with `u ≥ u_floor_rel · max u`. The last term is evaluated
/// as `u[(∇S − qA)² − (∂S/∂t + qφ)²]`, which is the same quantity without the
/// division and stays defined at `q = 0`.
pub fn matter_residual(
    frame: &CartesianFieldFrame,
    frames_dt: (&CartesianFieldFrame, &CartesianFieldFrame),
    model: &NonlinearityModel,
    u_floor_rel: f64,
) -> Result<MatterReport> {
    let (before, after) = frames_dt;
    let dt = check_pair(before, frame)?;
    let dt2 = check_pair(frame, after)?;
    if ((dt - dt2) / dt).abs() > 1e-9 {
        return Err(Error::InvalidArgument("frames must be equally spaced in time".into()));
    }
    let g = &frame.grid;
    let q = frame.q;
    let lap = ops::laplacian(g, &frame.u_amp);
    let peak = frame.u_amp.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let u_floor = u_floor_rel * peak;
    let (mut sum, mut scale, mut masked, mut total) = (0.0, 0.0, 0usize, 0usize);
    for idx in 0..g.len() {
        if !g.is_interior(idx, 1) {
            continue;
        }
        total += 1;
        let u = frame.u_amp[idx];
        if u < u_floor {
            masked += 1;
            continue;
        }
        let u_tt = (after.u_amp[idx] - 2.0 * u + before.u_amp[idx]) / (dt * dt);
        let space: f64 = (0..3).map(|c| (frame.phase_grad[c][idx] - q * frame.a_pot[c][idx]).powi(2)).sum();
        let time = (frame.phase_t[idx] + q * frame.phi_pot[idx]).powi(2);
        let dw = model.dw(u)?;
        let r = u_tt - lap[idx] + dw + u * (space - time);
        sum += r * r;
        scale += dw * dw;
    }
    let h3 = g.spacing.powi(3);
    Ok(MatterReport {
        residual: (h3 * sum).sqrt(),
        scale: (h3 * scale).sqrt(),
        u_floor,
        masked_fraction: if total > 0 { masked as f64 / total as f64 } else { 0.0 },
        dt,
    })
}

/// L² norm over `r ≤ r_limit` of the static radial residual
/// `−u″ − 2u′/r + W′(u) − ω²(1 − qΦ)²u` evaluated with three-point differences
/// of spacing `h` on the interpolated profile. This is the truncation error a
/// radial discretization at that spacing would make, the natural yardstick for
/// the Cartesian matter residual at the same `h`.
pub fn radial_truncation_residual(
    sol: &SolitaryWaveSolution,
    model: &NonlinearityModel,
    h: f64,
    r_limit: f64,
) -> Result<f64> {
    let u = RadialSpline::new(&sol.u)?;
    let phi = RadialSpline::new(&sol.phi)?;
    let q = sol.q;
    let mut sum = 0.0;
    let mut r = h;
    while r <= r_limit {
        let (a, b, c) = (u.value(r - h), u.value(r), u.value(r + h));
        let lap = (c - 2.0 * b + a) / (h * h) + (c - a) / (h * r);
        let coupling = (1.0 - q * phi.value(r)).powi(2);
        let res = -lap + model.dw(b)? - sol.omega2 * coupling * b;
        sum += 4.0 * std::f64::consts::PI * r * r * h * res * res;
        r += h;
    }
    Ok(sum.sqrt())
}
