//! Collocated finite differences on a [`CartesianGrid`]: centered in the
//! interior, one-sided second order on the faces. Centered gradient, curl and
//! divergence commute, so `curl grad = 0` and `div curl = 0` hold to rounding
//! wherever all stencils involved are centered.

use rayon::prelude::*;

use super::CartesianGrid;

pub type Vector = [Vec<f64>; 3];

/// `∂f/∂x_axis`.
pub fn diff(grid: &CartesianGrid, f: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.n_per_axis;
    let stride = [1, n, n * n][axis];
    let inv = 1.0 / (2.0 * grid.spacing);
    let mut out = vec![0.0; f.len()];
    out.par_chunks_mut(n * n).enumerate().for_each(|(k, slab)| {
        for (local, o) in slab.iter_mut().enumerate() {
            let idx = k * n * n + local;
            let pos = [idx % n, (idx / n) % n, k][axis];
            *o = if pos == 0 {
                (-3.0 * f[idx] + 4.0 * f[idx + stride] - f[idx + 2 * stride]) * inv
            } else if pos == n - 1 {
                (3.0 * f[idx] - 4.0 * f[idx - stride] + f[idx - 2 * stride]) * inv
            } else {
                (f[idx + stride] - f[idx - stride]) * inv
            };
        }
    });
    out
}

pub fn grad(grid: &CartesianGrid, f: &[f64]) -> Vector {
    [diff(grid, f, 0), diff(grid, f, 1), diff(grid, f, 2)]
}

pub fn div(grid: &CartesianGrid, v: &Vector) -> Vec<f64> {
    let a = diff(grid, &v[0], 0);
    let b = diff(grid, &v[1], 1);
    let c = diff(grid, &v[2], 2);
    a.iter().zip(&b).zip(&c).map(|((a, b), c)| a + b + c).collect()
}

pub fn curl(grid: &CartesianGrid, v: &Vector) -> Vector {
    let sub = |x: Vec<f64>, y: Vec<f64>| -> Vec<f64> { x.iter().zip(&y).map(|(a, b)| a - b).collect() };
    [
        sub(diff(grid, &v[2], 1), diff(grid, &v[1], 2)),
        sub(diff(grid, &v[0], 2), diff(grid, &v[2], 0)),
        sub(diff(grid, &v[1], 0), diff(grid, &v[0], 1)),
    ]
}

/// Compact 7-point Laplacian; zero on the faces.
pub fn laplacian(grid: &CartesianGrid, f: &[f64]) -> Vec<f64> {
    let n = grid.n_per_axis;
    let inv = 1.0 / (grid.spacing * grid.spacing);
    let mut out = vec![0.0; f.len()];
    out.par_chunks_mut(n * n).enumerate().for_each(|(k, slab)| {
        if k == 0 || k == n - 1 {
            return;
        }
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let idx = i + n * (j + n * k);
                let sum = f[idx + 1] + f[idx - 1] + f[idx + n] + f[idx - n] + f[idx + n * n] + f[idx - n * n];
                slab[i + n * j] = (sum - 6.0 * f[idx]) * inv;
            }
        }
    });
    out
}

pub fn combine(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
    a.par_iter().zip(b.par_iter()).map(|(&x, &y)| f(x, y)).collect()
}

pub fn combine_vec(a: &Vector, b: &Vector, f: impl Fn(f64, f64) -> f64 + Sync + Copy) -> Vector {
    [combine(&a[0], &b[0], f), combine(&a[1], &b[1], f), combine(&a[2], &b[2], f)]
}

/// Sum of squares over nodes at least `margin` layers away from every face.
pub fn interior_sum_sq(grid: &CartesianGrid, f: &[f64], margin: usize) -> f64 {
    let n = grid.n_per_axis;
    (margin..n - margin)
        .into_par_iter()
        .map(|k| {
            let mut s = 0.0;
            for j in margin..n - margin {
                let row = n * (j + n * k);
                for v in &f[row + margin..row + n - margin] {
                    s += v * v;
                }
            }
            s
        })
        .sum()
}

/// Discrete L² norm `√(h³ Σ f²)` over the interior.
pub fn interior_l2(grid: &CartesianGrid, f: &[f64], margin: usize) -> f64 {
    (grid.spacing.powi(3) * interior_sum_sq(grid, f, margin)).sqrt()
}

pub fn interior_l2_vec(grid: &CartesianGrid, v: &Vector, margin: usize) -> f64 {
    let s: f64 = v.iter().map(|c| interior_sum_sq(grid, c, margin)).sum();
    (grid.spacing.powi(3) * s).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(grid: &CartesianGrid, f: impl Fn([f64; 3]) -> f64 + Sync) -> Vec<f64> {
        (0..grid.len()).map(|i| f(grid.position(i))).collect()
    }

    #[test]
    fn derivatives_exact_on_quadratics() {
        let g = CartesianGrid::new(16, 2.0).unwrap();
        let f = sample(&g, |x| x[0] * x[0] + 3.0 * x[1] * x[2] - x[2]);
        let dx = diff(&g, &f, 0);
        let dz = diff(&g, &f, 2);
        for i in 0..g.len() {
            let x = g.position(i);
            assert!((dx[i] - 2.0 * x[0]).abs() < 1e-12);
            assert!((dz[i] - (3.0 * x[1] - 1.0)).abs() < 1e-12);
        }
        let lap = laplacian(&g, &f);
        assert!(lap.iter().enumerate().all(|(i, &v)| !g.is_interior(i, 1) || (v - 2.0).abs() < 1e-10));
    }

    #[test]
    fn discrete_identities_hold() {
        let g = CartesianGrid::new(20, 3.0).unwrap();
        let f = sample(&g, |x| (x[0] * x[1]).sin() + (-x[2] * x[2]).exp());
        let cg = curl(&g, &grad(&g, &f));
        for c in &cg {
            assert!(interior_l2(&g, c, 1) < 1e-12);
        }
        let a = [
            sample(&g, |x| x[1].cos() * x[2]),
            sample(&g, |x| (x[0] + x[2]).sin()),
            sample(&g, |x| x[0] * x[1] * x[1]),
        ];
        assert!(interior_l2(&g, &div(&g, &curl(&g, &a)), 2) < 1e-12);
    }

    #[test]
    fn second_order_gradient() {
        let err = |n| {
            let g = CartesianGrid::new(n, 2.0).unwrap();
            let f = sample(&g, |x| x[0].sin() * x[1].cos());
            let d = diff(&g, &f, 0);
            let exact = sample(&g, |x| x[0].cos() * x[1].cos());
            let e = combine(&d, &exact, |a, b| a - b);
            (interior_l2(&g, &e, 0), g.spacing)
        };
        let (e1, h1) = err(17);
        let (e2, h2) = err(33);
        let order = (e1 / e2).ln() / (h1 / h2).ln();
        assert!(order > 1.8, "{order}");
    }
}
