use rayon::prelude::*;

use super::ops::{self, Vector};
use super::CartesianFieldFrame;
use crate::error::Result;
use crate::nonlinearity::NonlinearityModel;

/// A gauge function `χ(t, x)` together with `∂χ/∂t`.
pub trait GaugeFunction: Sync {
    fn value(&self, t: f64, x: [f64; 3]) -> f64;
    fn time_derivative(&self, t: f64, x: [f64; 3]) -> f64;
}

/// `χ(x)` with `∂χ/∂t = 0`.
pub struct TimeIndependent<F>(pub F);

impl<F: Fn([f64; 3]) -> f64 + Sync> GaugeFunction for TimeIndependent<F> {
    fn value(&self, _t: f64, x: [f64; 3]) -> f64 {
        (self.0)(x)
    }

    fn time_derivative(&self, _t: f64, _x: [f64; 3]) -> f64 {
        0.0
    }
}

/// `(χ, ∂χ/∂t)` as a pair of closures in `(t, x)`.
impl<F, G> GaugeFunction for (F, G)
where
    F: Fn(f64, [f64; 3]) -> f64 + Sync,
    G: Fn(f64, [f64; 3]) -> f64 + Sync,
{
    fn value(&self, t: f64, x: [f64; 3]) -> f64 {
        (self.0)(t, x)
    }

    fn time_derivative(&self, t: f64, x: [f64; 3]) -> f64 {
        (self.1)(t, x)
    }
}

/// `ψ ↦ ψe^{iqχ}`, `φ ↦ φ − ∂χ/∂t`, `A ↦ A + ∇χ`, with `∇` the discrete
/// gradient. `E`, `H`, `ρ`, `j` are recomputed from the transformed fields;
/// `u` is carried over.
pub fn gauge_transform(frame: &CartesianFieldFrame, chi: &dyn GaugeFunction) -> CartesianFieldFrame {
    let g = frame.grid;
    let t = frame.time;
    let q = frame.q;
    let values: Vec<f64> = (0..g.len()).into_par_iter().map(|i| chi.value(t, g.position(i))).collect();
    let rates: Vec<f64> = (0..g.len()).into_par_iter().map(|i| chi.time_derivative(t, g.position(i))).collect();
    let grad_chi = ops::grad(&g, &values);
    let grad_rate = ops::grad(&g, &rates);

    let mut out = frame.clone();
    let (re, im): (Vec<f64>, Vec<f64>) = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let (s, c) = (q * values[i]).sin_cos();
            (frame.psi_re[i] * c - frame.psi_im[i] * s, frame.psi_re[i] * s + frame.psi_im[i] * c)
        })
        .unzip();
    out.psi_re = re;
    out.psi_im = im;
    out.phase = ops::combine(&frame.phase, &values, |s, x| s + q * x);
    out.phase_t = ops::combine(&frame.phase_t, &rates, |s, x| s + q * x);
    out.phase_grad = ops::combine_vec(&frame.phase_grad, &grad_chi, move |s, x| s + q * x);
    out.phi_pot = ops::combine(&frame.phi_pot, &rates, |p, x| p - x);
    out.a_pot = ops::combine_vec(&frame.a_pot, &grad_chi, |a, x| a + x);
    out.a_t = ops::combine_vec(&frame.a_t, &grad_rate, |a, x| a + x);
    out.derive_fields();
    out
}

fn sq(v: &Vector, i: usize) -> f64 {
    v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]
}

/// `½u_t² + ½|∇u|² + W(u) + (ρ² + j²)/(2q²u²) + ½(E² + H²)` per node, with the
/// matter-current term evaluated as `½u²[(S_t + qφ)² + |∇S − qA|²]`.
pub fn energy_density(frame: &CartesianFieldFrame, model: &NonlinearityModel) -> Result<Vec<f64>> {
    let g = &frame.grid;
    let q = frame.q;
    let grad_u = ops::grad(g, &frame.u_amp);
    (0..g.len())
        .into_par_iter()
        .map(|i| {
            let u = frame.u_amp[i];
            let cov_t = frame.phase_t[i] + q * frame.phi_pot[i];
            let cov_x: f64 = (0..3).map(|c| (frame.phase_grad[c][i] - q * frame.a_pot[c][i]).powi(2)).sum();
            Ok(0.5 * frame.u_t[i] * frame.u_t[i]
                + 0.5 * sq(&grad_u, i)
                + model.w(u)?
                + 0.5 * u * u * (cov_t * cov_t + cov_x)
                + 0.5 * (sq(&frame.e_field, i) + sq(&frame.h_field, i)))
        })
        .collect()
}

pub fn total_energy(frame: &CartesianFieldFrame, model: &NonlinearityModel) -> Result<f64> {
    Ok(energy_density(frame, model)?.iter().sum::<f64>() * frame.grid.spacing.powi(3))
}
