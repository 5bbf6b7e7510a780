//! Reference computations written independently of the library: the radial
//! operator is assembled here from its definition, Φ is solved densely or by
//! a separate tridiagonal sweep, and the ground state is found by a plain
//! fixed-step RK4 shooting method.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaugewave::radial::{RadialField, RadialGrid};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Radii `r_i = (i + 1)h` and trapezoid volume weights with a half weight at `r_max`.
pub fn nodes_and_weights(n: usize, r_max: f64) -> (Vec<f64>, Vec<f64>) {
    let h = r_max / n as f64;
    let r: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let mut w: Vec<f64> = r.iter().map(|x| 4.0 * PI * x * x * h).collect();
    w[n - 1] *= 0.5;
    (r, w)
}

/// Face conductances `4π r_i r_{i+1} / h`.
pub fn conductances(r: &[f64]) -> Vec<f64> {
    let h = r[0];
    r.windows(2).map(|p| 4.0 * PI * p[0] * p[1] / h).collect()
}

pub fn integrate(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).map(|(a, b)| a * b).sum()
}

/// Discrete `∫|∇f|²`.
pub fn dirichlet(r: &[f64], f: &[f64]) -> f64 {
    conductances(r).iter().zip(f.windows(2)).map(|(c, p)| c * (p[1] - p[0]).powi(2)).sum()
}

/// Dense LU solve of `−ΔΦ + q²u²Φ = qu²` on the free nodes, in the
/// non-symmetric row-scaled form.
pub fn dense_phi(u: &[f64], q: f64, r_max: f64) -> Vec<f64> {
    let n = u.len();
    let (r, w) = nodes_and_weights(n, r_max);
    let c = conductances(&r);
    let m = n - 1;
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for i in 0..m {
        let left = if i == 0 { 0.0 } else { c[i - 1] };
        a[(i, i)] = (left + c[i]) / w[i] + q * q * u[i] * u[i];
        if i > 0 {
            a[(i, i - 1)] = -left / w[i];
        }
        if i + 1 < m {
            a[(i, i + 1)] = -c[i] / w[i];
        }
        b[i] = q * u[i] * u[i];
    }
    let x = a.lu().solve(&b).expect("nonsingular");
    let mut phi: Vec<f64> = x.iter().copied().collect();
    phi.push(0.0);
    phi
}

/// Same system by Gaussian elimination on the tridiagonal bands.
pub fn banded_phi(u: &[f64], q: f64, r_max: f64) -> Vec<f64> {
    let n = u.len();
    let (r, w) = nodes_and_weights(n, r_max);
    let c = conductances(&r);
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let left = if i == 0 { 0.0 } else { c[i - 1] };
        diag[i] = left + c[i] + w[i] * q * q * u[i] * u[i];
        lower[i] = -left;
        upper[i] = if i + 1 < m { -c[i] } else { 0.0 };
        rhs[i] = w[i] * q * u[i] * u[i];
    }
    for i in 1..m {
        let f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    let mut x = vec![0.0; n];
    x[m - 1] = rhs[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    x
}

/// `½∫u²(1 − qΦ(u))`.
pub fn lambda(u: &[f64], q: f64, r_max: f64) -> f64 {
    let (_, w) = nodes_and_weights(u.len(), r_max);
    let phi = banded_phi(u, q, r_max);
    let f: Vec<f64> = u.iter().zip(&phi).map(|(s, p)| s * s * (1.0 - q * p)).collect();
    0.5 * integrate(&w, &f)
}

pub fn saturable_w(s: f64, m0: f64, s0: f64) -> f64 {
    let t = (s / s0).powi(2);
    0.5 * m0 * m0 * s0 * s0 * t / (1.0 + t)
}

pub fn saturable_dw(s: f64, m0: f64, s0: f64) -> f64 {
    let t = (s / s0).powi(2);
    m0 * m0 * s / ((1.0 + t) * (1.0 + t))
}

/// A smooth even profile `Σ a_k (1 + c_k r²) exp(−b_k r²)` with random
/// coefficients, vanishing at `r_max` to rounding.
pub fn random_profile(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.2..1.5), rng.gen_range(0.1..0.8), rng.gen_range(-0.1..0.3)))
        .collect();
    move |r: f64| terms.iter().map(|(a, b, c)| a * (1.0 + c * r * r) * (-b * r * r).exp()).sum()
}

pub fn sample(grid: RadialGrid, f: impl Fn(f64) -> f64) -> RadialField {
    RadialField::from_fn(grid, f).with_dirichlet()
}

/// Ground state of `u″ + 2u′/r = W′(u) − ω²u` for the saturable `W`, on a
/// uniform RK4 mesh.
pub struct ShootingOracle {
    pub omega: f64,
    pub m0: f64,
    pub u0: f64,
    pub dr: f64,
    /// `(r, u, u′)` up to the matching radius.
    pub samples: Vec<(f64, f64, f64)>,
    /// `κ = √(m0² − ω²)`
    pub kappa: f64,
}

impl ShootingOracle {
    pub fn saturable(omega: f64, m0: f64, s0: f64) -> Self {
        let dr = 2e-3;
        let rhs = move |r: f64, u: f64, v: f64| -> (f64, f64) {
            (v, -2.0 * v / r + saturable_dw(u, m0, s0) - omega * omega * u)
        };
        let r_end = 60.0;
        // −1: crossed zero (too high), +1: turned back up (too low), 0: neither.
        let shoot = |u0: f64, keep: bool| -> (i32, Vec<(f64, f64, f64)>) {
            let r0 = 1e-3;
            let c = (saturable_dw(u0, m0, s0) - omega * omega * u0) / 6.0;
            let (mut r, mut u, mut v) = (r0, u0 + c * r0 * r0, 2.0 * c * r0);
            let mut out = Vec::new();
            while r < r_end {
                if keep {
                    out.push((r, u, v));
                }
                let k1 = rhs(r, u, v);
                let k2 = rhs(r + dr / 2.0, u + dr / 2.0 * k1.0, v + dr / 2.0 * k1.1);
                let k3 = rhs(r + dr / 2.0, u + dr / 2.0 * k2.0, v + dr / 2.0 * k2.1);
                let k4 = rhs(r + dr, u + dr * k3.0, v + dr * k3.1);
                u += dr / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                v += dr / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                r += dr;
                if u < 0.0 {
                    return (-1, out);
                }
                if v > 0.0 {
                    return (1, out);
                }
            }
            (0, out)
        };
        // G(s) = W(s) − ω²s²/2 changes sign at ζ; the ground state starts above it.
        let g = |s: f64| saturable_w(s, m0, s0) - 0.5 * omega * omega * s * s;
        let (mut a, mut b) = (1e-6, 1e-6);
        while g(b) >= 0.0 {
            a = b;
            b *= 1.01;
        }
        let zeta = 0.5 * (a + b);
        let (mut lo, mut hi) = (zeta, 2.0 * zeta);
        while shoot(hi, false).0 != -1 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if shoot(mid, false).0 == -1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (_, low) = shoot(lo, true);
        let (_, high) = shoot(hi, true);
        // keep the stretch where the two bracketing trajectories agree
        let samples: Vec<(f64, f64, f64)> = low
            .iter()
            .zip(&high)
            .take_while(|(p, q)| (p.1 - q.1).abs() <= 1e-6 * p.1.abs().max(1e-300))
            .map(|(p, q)| (p.0, 0.5 * (p.1 + q.1), 0.5 * (p.2 + q.2)))
            .collect();
        let kappa = (m0 * m0 - omega * omega).sqrt();
        Self { omega, m0, u0: 0.5 * (lo + hi), dr, samples, kappa }
    }

    pub fn matching_radius(&self) -> f64 {
        self.samples.last().expect("nonempty").0
    }

    /// Profile with the free decay `u_c r_c e^{−κ(r − r_c)}/r` past the matching radius.
    pub fn value(&self, r: f64) -> f64 {
        let first = self.samples[0];
        if r <= first.0 {
            return first.1;
        }
        let (rc, uc, _) = *self.samples.last().expect("nonempty");
        if r >= rc {
            return uc * rc * (-self.kappa * (r - rc)).exp() / r;
        }
        let x = (r - first.0) / self.dr;
        let i = (x.floor() as usize).min(self.samples.len() - 2);
        let t = x - i as f64;
        let (p, q) = (self.samples[i], self.samples[i + 1]);
        // cubic Hermite on (u, u′)
        let h = self.dr;
        let (h00, h10, h01, h11) = (
            2.0 * t.powi(3) - 3.0 * t * t + 1.0,
            t.powi(3) - 2.0 * t * t + t,
            -2.0 * t.powi(3) + 3.0 * t * t,
            t.powi(3) - t * t,
        );
        h00 * p.1 + h10 * h * p.2 + h01 * q.1 + h11 * h * q.2
    }

    /// Continuum integrals `(½∫u², ½∫|∇u|², ∫W(u))` by Simpson's rule on a fine mesh.
    pub fn integrals(&self, s0: f64, r_max: f64) -> (f64, f64, f64) {
        let n = 200_000;
        let h = r_max / n as f64;
        let (mut mass, mut grad, mut pot) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let r = k as f64 * h;
            let wt = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let u = self.value(r);
            let du = (self.value(r + 1e-5) - self.value((r - 1e-5).max(0.0))) / (r + 1e-5 - (r - 1e-5).max(0.0));
            let vol = 4.0 * PI * r * r * wt * h / 3.0;
            mass += vol * u * u;
            grad += vol * du * du;
            pot += vol * saturable_w(u, self.m0, s0);
        }
        (0.5 * mass, 0.5 * grad, pot)
    }
}

/// Least-squares slope and R² of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}
