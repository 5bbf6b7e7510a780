//! Ground state of `u″ + (2/r)u′ = G′(u)`, `G(s) = W(s) − ½ω0²s²`, by
//! bisection on `u(0)`.
//!
//! The energy `½u′² − G(u)` is non-increasing along trajectories, so any start
//! `u(0) ≤ ζ` with `G(ζ) = 0` can never reach `u = 0`: it turns back up. Large
//! starts cross zero. The ground state sits on the boundary between the two.

use crate::error::{Error, Result};
use crate::nonlinearity::{self, Family, NonlinearityModel};
use crate::radial::{RadialField, RadialGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingSolution {
    pub u: RadialField,
    pub omega0: f64,
    /// `u(0)`
    pub u0: f64,
    /// First positive zero of `G`.
    pub zeta: f64,
    /// `√(m0² − ω0²)`
    pub kappa: f64,
    /// Radius beyond which the integrated trajectory was replaced by the
    /// linear tail `sinh(κ(r_max − r))/r`.
    pub matching_radius: f64,
    /// Relative L² residual of the static equation, 4th-order differences.
    pub residual: f64,
    pub bisection_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Overshoot,
    Undershoot,
    Undecided,
}

struct Problem<'a> {
    model: &'a NonlinearityModel,
    omega2: f64,
}

impl Problem<'_> {
    fn g_prime(&self, s: f64) -> Result<f64> {
        Ok(self.model.dw(s)? - self.omega2 * s)
    }

    fn g(&self, s: f64) -> Result<f64> {
        Ok(self.model.w(s)? - 0.5 * self.omega2 * s * s)
    }

    fn rhs(&self, r: f64, y: [f64; 2]) -> Result<[f64; 2]> {
        Ok([y[1], self.g_prime(y[0])? - 2.0 * y[1] / r])
    }

    fn start(&self, a: f64, r0: f64) -> Result<[f64; 2]> {
        let g = self.g_prime(a)?;
        Ok([a + g * r0 * r0 / 6.0, g * r0 / 3.0])
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

const RTOL: f64 = 1e-12;

struct Integrator<'a, 'b> {
    problem: &'a Problem<'b>,
    atol: f64,
    step: f64,
}

impl Integrator<'_, '_> {
    /// Advances `y` from `r` to `r_end`, stopping early (and returning the
    /// verdict) if the trajectory crosses zero or turns upward.
    fn advance(&mut self, r: &mut f64, y: &mut [f64; 2], r_end: f64) -> Result<Shot> {
        while *r < r_end {
            let h = self.step.min(r_end - *r);
            let mut k = [[0.0; 2]; 7];
            k[0] = self.problem.rhs(*r, *y)?;
            for s in 1..7 {
                let mut ys = *y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += h * A[s][j] * kj[0];
                    ys[1] += h * A[s][j] * kj[1];
                }
                k[s] = self.problem.rhs(*r + C[s] * h, ys)?;
            }
            let mut hi = *y;
            let mut err = [0.0; 2];
            for s in 0..7 {
                for c in 0..2 {
                    hi[c] += h * B[s] * k[s][c];
                    err[c] += h * (B[s] - B_LOW[s]) * k[s][c];
                }
            }
            let norm = (0..2)
                .map(|c| err[c] / (self.atol + RTOL * y[c].abs().max(hi[c].abs())))
                .fold(0.0_f64, |m, e| m.max(e.abs()));
            if !norm.is_finite() {
                return Err(Error::Diverged("shooting trajectory became non-finite".into()));
            }
            if norm <= 1.0 {
                *r += h;
                *y = hi;
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if h == self.step {
                    self.step *= factor;
                } else {
                    self.step = self.step.max(h * factor);
                }
                if y[0] < 0.0 {
                    return Ok(Shot::Overshoot);
                }
                if y[1] > 0.0 {
                    return Ok(Shot::Undershoot);
                }
            } else {
                self.step = h * (0.9 * norm.powf(-0.2)).max(0.1);
                if self.step < 1e-14 * r_end.max(1.0) {
                    return Err(Error::Diverged(format!("step size underflow at r = {r}")));
                }
            }
        }
        Ok(Shot::Undecided)
    }
}

fn start_radius(grid: &RadialGrid) -> f64 {
    1e-4 * grid.spacing().min(1.0)
}

fn shoot(problem: &Problem, a: f64, r_end: f64, grid: &RadialGrid) -> Result<Shot> {
    let r0 = start_radius(grid);
    let mut y = problem.start(a, r0)?;
    let mut r = r0;
    let mut integ = Integrator { problem, atol: 1e-14 * a, step: grid.spacing() };
    integ.advance(&mut r, &mut y, r_end)
}

/// Integrates from `u(0) = a` and samples at the grid nodes; samples after an
/// overshoot or undershoot are `None`.
fn trajectory(problem: &Problem, a: f64, grid: &RadialGrid) -> Result<Vec<Option<f64>>> {
    let r0 = start_radius(grid);
    let mut y = problem.start(a, r0)?;
    let mut r = r0;
    let mut integ = Integrator { problem, atol: 1e-14 * a, step: grid.spacing() };
    let mut out = vec![None; grid.n_points()];
    for (i, slot) in out.iter_mut().enumerate() {
        if integ.advance(&mut r, &mut y, grid.node(i))? != Shot::Undecided {
            break;
        }
        *slot = Some(y[0]);
    }
    Ok(out)
}

fn find_zeta(problem: &Problem, s_max: f64) -> Result<f64> {
    let mut lo = 1e-6 * s_max.min(1.0);
    if problem.g(lo)? <= 0.0 {
        return Err(Error::NoGroundState("G is not positive near the origin".into()));
    }
    let mut hi = lo;
    loop {
        hi *= 1.1;
        if hi > s_max {
            return Err(Error::NoGroundState(format!("G has no positive zero below s = {s_max}")));
        }
        if problem.g(hi)? < 0.0 {
            break;
        }
        lo = hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if problem.g(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn solve_shooting(model: &NonlinearityModel, omega0: f64, grid: RadialGrid) -> Result<ShootingSolution> {
    let (m1, m0) = nonlinearity::frequency_window(model)?;
    if !(omega0 > m1 && omega0 < m0) {
        return Err(Error::InvalidArgument(format!("omega0 = {omega0} lies outside the frequency window ({m1}, {m0})")));
    }
    let problem = Problem { model, omega2: omega0 * omega0 };
    let kappa = (m0 * m0 - omega0 * omega0).sqrt();
    let s_max = match model.family() {
        Family::UserTabulated { .. } => model.amplitude_scale(),
        _ => 1e6 * model.amplitude_scale(),
    };
    let zeta = find_zeta(&problem, s_max)?;
    let r_end = grid.r_max();

    let mut lo = zeta;
    let mut hi = 2.0 * zeta;
    let mut steps = 0;
    loop {
        match shoot(&problem, hi, r_end, &grid)? {
            Shot::Overshoot => break,
            _ => {
                lo = hi;
                hi *= 2.0;
                steps += 1;
                if hi > s_max || steps > 60 {
                    return Err(Error::NoGroundState(format!("no overshooting start found up to u(0) = {hi}")));
                }
            }
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        steps += 1;
        match shoot(&problem, mid, r_end, &grid)? {
            Shot::Overshoot => hi = mid,
            Shot::Undershoot => lo = mid,
            Shot::Undecided => {
                lo = mid;
                hi = mid;
                break;
            }
        }
    }

    let below = trajectory(&problem, lo, &grid)?;
    let above = trajectory(&problem, hi, &grid)?;
    let n = grid.n_points();
    // Keep the integrated profile while the bracketing trajectories agree.
    let mut cut = 0;
    for i in 0..n - 1 {
        match (below[i], above[i]) {
            (Some(a), Some(b)) if a > 0.0 && (a - b).abs() <= 1e-6 * a.abs() => cut = i,
            _ => break,
        }
    }
    if cut < 2 {
        return Err(Error::NoGroundState("bracketing trajectories separate immediately".into()));
    }
    let mut values = vec![0.0; n];
    for i in 0..=cut {
        values[i] = 0.5 * (below[i].unwrap_or(0.0) + above[i].unwrap_or(0.0));
    }
    let r_c = grid.node(cut);
    let u_c = values[cut];
    let r_max = grid.r_max();
    let denom = (kappa * (r_max - r_c)).sinh();
    for (i, v) in values.iter_mut().enumerate().skip(cut + 1) {
        let r = grid.node(i);
        *v = u_c * r_c * (kappa * (r_max - r)).sinh() / (r * denom);
    }
    values[n - 1] = 0.0;
    let u0 = 0.5 * (lo + hi);
    let u = RadialField::new(grid, values)?;
    let residual = fourth_order_residual(&problem, &u, u0)?;
    Ok(ShootingSolution {
        u,
        omega0,
        u0,
        zeta,
        kappa,
        matching_radius: r_c,
        residual,
        bisection_steps: steps,
    })
}

/// `‖u″ + 2u′/r − G′(u)‖_{L²} / ‖u‖_{L²}` with five-point stencils, using the
/// even extension through `u(0) = u0`. The two nodes next to `r_max` are
/// skipped.
fn fourth_order_residual(problem: &Problem, u: &RadialField, u0: f64) -> Result<f64> {
    let grid = u.grid();
    let h = grid.spacing();
    let n = grid.n_points();
    // at(k) is u at r = k·h for any integer k > −n.
    let at = |k: isize| -> f64 {
        match k.unsigned_abs() {
            0 => u0,
            m => u.values()[m - 1],
        }
    };
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n - 2 {
        let k = i as isize + 1;
        let r = grid.node(i);
        let d1 = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
        let d2 = (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) + 16.0 * at(k + 1) - at(k + 2)) / (12.0 * h * h);
        let res = d2 + 2.0 * d1 / r - problem.g_prime(at(k))?;
        let w = grid.weight(i);
        num += w * res * res;
        den += w * at(k) * at(k);
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}

/// Least-squares slope of `ln(r·u)` over the nodes in `[r_lo, r_hi]` where
/// `u > 0`. For a decaying ground state this tends to `−κ`.
pub fn decay_rate(u: &RadialField, r_lo: f64, r_hi: f64) -> Result<f64> {
    let grid = u.grid();
    let pts: Vec<(f64, f64)> = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (grid.node(i), v))
        .filter(|&(r, v)| r >= r_lo && r <= r_hi && v > 0.0)
        .map(|(r, v)| (r, (r * v).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(format!("no positive samples in [{r_lo}, {r_hi}]")));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
