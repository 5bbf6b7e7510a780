//! Radial discretization of ℝ³ for spherically symmetric fields.
//!
//! Nodes sit at `r_i = i·h`, `i = 1..=n`, with `h = r_max / n`. The origin is
//! not a node: the even symmetry `f′(0) = 0` is built into the stencil (the
//! face between the origin and `r_1` carries zero area). The last node
//! `r_n = r_max` carries the Dirichlet condition `f(r_max) = 0`.
//!
//! The discrete Laplacian is the flux-form operator
//!
//! ```text
//! (Lf)_i = [ r_i r_{i+1} (f_{i+1} − f_i) − r_{i−1} r_i (f_i − f_{i−1}) ] / (r_i² h²)
//! ```
//!
//! which equals the centered `f″ + (2/r) f′` stencil, is exact on `r²`, and is
//! self-adjoint with respect to the volume weights `4π r_i² h` used by
//! [`integrate_volume`]. The discrete Dirichlet energy
//! `Σ 4π r_i r_{i+1} (f_{i+1} − f_i)² / h` is therefore the exact quadratic form
//! of `−L`, which is what makes gradients of the discrete functionals exact.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n_points: usize,
    r_max: f64,
    spacing: f64,
}

impl RadialGrid {
    pub fn new(n_points: usize, r_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum of {MIN_POINTS}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        Ok(Self { n_points, r_max, spacing: r_max / n_points as f64 })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Radius of node `index` (0-based), i.e. `(index + 1)·h`.
    #[inline]
    pub fn node(&self, index: usize) -> f64 {
        if index + 1 == self.n_points {
            self.r_max
        } else {
            (index + 1) as f64 * self.spacing
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weight of node `index` for `∫ f dx = 4π ∫ f r² dr`.
    #[inline]
    pub fn weight(&self, index: usize) -> f64 {
        let r = self.node(index);
        let w = 4.0 * PI * r * r * self.spacing;
        if index + 1 == self.n_points {
            0.5 * w
        } else {
            w
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.weight(i)).collect()
    }

    /// Conductance `4π r_i r_{i+1} / h` of the face between nodes `index` and
    /// `index + 1`.
    #[inline]
    pub fn face(&self, index: usize) -> f64 {
        4.0 * PI * self.node(index) * self.node(index + 1) / self.spacing
    }

    /// The same domain with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n_points * factor, self.r_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerBoundary {
    /// `f′(0) = 0`
    #[default]
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    /// `f(r_max) = 0`
    #[default]
    DirichletZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
    pub inner_bc: InnerBoundary,
    pub outer_bc: OuterBoundary,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        check_finite(&values)?;
        Ok(Self::from_parts(grid, values))
    }

    pub(crate) fn from_parts(grid: RadialGrid, values: Vec<f64>) -> Self {
        Self {
            grid,
            values,
            inner_bc: InnerBoundary::Even,
            outer_bc: OuterBoundary::DirichletZero,
        }
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.n_points()])
    }

    /// Samples `f` at every node. The Dirichlet node is sampled as well; use
    /// [`RadialField::with_dirichlet`] to pin it.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(grid, (0..grid.n_points()).map(|i| f(grid.node(i))).collect())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy with the outer node set to zero.
    pub fn with_dirichlet(mut self) -> Self {
        if let Some(last) = self.values.last_mut() {
            *last = 0.0;
        }
        self
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    /// `self + alpha · other`
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + alpha * b)
    }

    /// Volume pairing `∫ f g dx`.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| self.grid.weight(i) * a * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Even extrapolation of the value at `r = 0` from `f(h)` and `f(2h)`.
    pub fn value_at_origin(&self) -> f64 {
        (4.0 * self.values[0] - self.values[1]) / 3.0
    }

    pub fn check_finite(&self) -> Result<()> {
        check_finite(&self.values)
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index, value: values[index] }),
        None => Ok(()),
    }
}

/// `∫_{ℝ³} f dx = 4π ∫_0^{r_max} f(r) r² dr` by the composite trapezoid rule.
///
/// The integrand `4π r² f` vanishes at the origin together with its odd
/// derivatives when `f` is even, so for smooth even fields the rule converges
/// faster than its nominal second order.
pub fn integrate_volume(f: &RadialField) -> Result<f64> {
    f.check_finite()?;
    Ok(volume_sum(f.grid(), f.values()))
}

#[inline]
pub(crate) fn volume_sum(grid: &RadialGrid, values: &[f64]) -> f64 {
    values.iter().enumerate().map(|(i, v)| grid.weight(i) * v).sum()
}

/// Discrete `Δf = f″ + (2/r) f′`. The Dirichlet node carries no equation and
/// its output is zero.
pub fn radial_laplacian(f: &RadialField) -> Result<RadialField> {
    if f.len() < 3 {
        return Err(Error::InvalidGrid("laplacian needs at least 3 points".into()));
    }
    f.check_finite()?;
    Ok(RadialField::from_parts(*f.grid(), laplacian_values(f.grid(), f.values())))
}

pub(crate) fn laplacian_values(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let n = grid.n_points();
    let h2 = grid.spacing() * grid.spacing();
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let r = grid.node(i);
        let r_next = grid.node(i + 1);
        let outward = r * r_next * (f[i + 1] - f[i]);
        let inward = if i == 0 { 0.0 } else { grid.node(i - 1) * r * (f[i] - f[i - 1]) };
        out[i] = (outward - inward) / (r * r * h2);
    }
    out
}

/// `∫ |∇f|² dx` in the discrete form that is the quadratic form of `−L`.
pub fn dirichlet_energy(f: &RadialField) -> f64 {
    dirichlet_sum(f.grid(), f.values())
}

pub(crate) fn dirichlet_sum(grid: &RadialGrid, f: &[f64]) -> f64 {
    f.windows(2)
        .enumerate()
        .map(|(i, w)| {
            let d = w[1] - w[0];
            grid.face(i) * d * d
        })
        .sum::<f64>()
}

/// Per-node share of `|∇f|²` such that `Σ w_i g_i = dirichlet_energy(f)`:
/// every face energy is split evenly between its two nodes.
pub(crate) fn gradient_density(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let n = grid.n_points();
    let mut acc = vec![0.0; n];
    for i in 0..n - 1 {
        let d = f[i + 1] - f[i];
        let e = 0.5 * grid.face(i) * d * d;
        acc[i] += e;
        acc[i + 1] += e;
    }
    acc.iter().enumerate().map(|(i, e)| e / grid.weight(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    L3,
    L6,
    /// `L^{12/5}`
    L12_5,
    /// Homogeneous `‖∇f‖_{L²}`.
    D,
    H1,
}

impl NormKind {
    pub const ALL: [NormKind; 6] =
        [NormKind::L2, NormKind::L3, NormKind::L6, NormKind::L12_5, NormKind::D, NormKind::H1];

    fn exponent(self) -> Option<f64> {
        match self {
            NormKind::L2 => Some(2.0),
            NormKind::L3 => Some(3.0),
            NormKind::L6 => Some(6.0),
            NormKind::L12_5 => Some(12.0 / 5.0),
            NormKind::D | NormKind::H1 => None,
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(NormKind::L2),
            "l3" => Ok(NormKind::L3),
            "l6" => Ok(NormKind::L6),
            "l12_5" | "l12/5" => Ok(NormKind::L12_5),
            "d" => Ok(NormKind::D),
            "h1" => Ok(NormKind::H1),
            other => Err(Error::InvalidArgument(format!("unknown norm `{other}`"))),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NormKind::L2 => "L2",
            NormKind::L3 => "L3",
            NormKind::L6 => "L6",
            NormKind::L12_5 => "L12_5",
            NormKind::D => "D",
            NormKind::H1 => "H1",
        };
        f.write_str(s)
    }
}

/// `‖f‖^2` for the Hilbert norms, `‖f‖^p` for the Lebesgue ones.
pub fn norm_power(f: &RadialField, which: NormKind) -> Result<f64> {
    f.check_finite()?;
    Ok(match which {
        NormKind::D => dirichlet_energy(f),
        NormKind::H1 => volume_sum(f.grid(), &square(f.values())) + dirichlet_energy(f),
        lebesgue => {
            let p = lebesgue.exponent().expect("lebesgue norm");
            let powered: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
            volume_sum(f.grid(), &powered)
        }
    })
}

pub fn norm(f: &RadialField, which: NormKind) -> Result<f64> {
    let power = norm_power(f, which)?;
    Ok(match which.exponent() {
        Some(p) => power.powf(1.0 / p),
        None => power.sqrt(),
    })
}

fn square(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

/// Solves `(−L + shift) x = rhs` with the Dirichlet node pinned to zero, by
/// the Thomas algorithm on the symmetric (volume-weighted) form.
pub(crate) fn solve_shifted(grid: &RadialGrid, shift: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = grid.n_points();
    let m = n - 1;
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for i in 0..m {
        let w = grid.weight(i);
        let inner = if i == 0 { 0.0 } else { grid.face(i - 1) };
        diag.push(inner + grid.face(i) + w * shift[i]);
        off.push(-grid.face(i));
        b.push(w * rhs[i]);
    }
    let mut x = solve_tridiagonal(&off[..m - 1], &diag, &off[..m - 1], &b)?;
    x.push(0.0);
    Ok(x)
}

/// Thomas algorithm for `sub[i-1]·x[i-1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() + 1 != n || sup.len() + 1 != n || rhs.len() != n {
        return Err(Error::InvalidArgument("inconsistent tridiagonal bands".into()));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularSystem { row: 0 });
    }
    if n > 1 {
        c[0] = sup[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i - 1] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        if i + 1 < n {
            c[i] = sup[i] / pivot;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplineEnd {
    Natural,
    Clamped(f64),
}

/// Cubic spline through `(x_k, y_k)`; C² with O(h⁴) accuracy.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    uniform: Option<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, start: SplineEnd, end: SplineEnd) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::InvalidArgument("spline needs at least 3 matching points".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("spline abscissae must be strictly increasing".into()));
        }
        check_finite(&y)?;
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();

        let mut sub = vec![0.0; n - 1];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n];
        match start {
            SplineEnd::Natural => diag[0] = 1.0,
            SplineEnd::Clamped(d0) => {
                diag[0] = 2.0 * h[0];
                sup[0] = h[0];
                rhs[0] = 6.0 * (slope[0] - d0);
            }
        }
        for k in 1..n - 1 {
            sub[k - 1] = h[k - 1];
            diag[k] = 2.0 * (h[k - 1] + h[k]);
            sup[k] = h[k];
            rhs[k] = 6.0 * (slope[k] - slope[k - 1]);
        }
        match end {
            SplineEnd::Natural => diag[n - 1] = 1.0,
            SplineEnd::Clamped(dn) => {
                sub[n - 2] = h[n - 2];
                diag[n - 1] = 2.0 * h[n - 2];
                rhs[n - 1] = 6.0 * (dn - slope[n - 2]);
            }
        }
        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let h0 = h[0];
        let uniform = h.iter().all(|&hk| (hk - h0).abs() <= 1e-12 * h0).then_some(h0);
        Ok(Self { x, y, m, uniform })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        if let Some(h) = self.uniform {
            let k = ((t - self.x[0]) / h).floor();
            return if k <= 0.0 { 0 } else { (k as usize).min(last) };
        }
        match self.x.partition_point(|&xk| xk <= t) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    /// Value, first and second derivative at `t` (extrapolates the end cubics).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let k = self.interval(t);
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = 1.0 - a;
        let (mk, mk1) = (self.m[k], self.m[k + 1]);
        let value = a * self.y[k]
            + b * self.y[k + 1]
            + ((a * a * a - a) * mk + (b * b * b - b) * mk1) * h * h / 6.0;
        let deriv = (self.y[k + 1] - self.y[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mk
            + (3.0 * b * b - 1.0) / 6.0 * h * mk1;
        let second = a * mk + b * mk1;
        (value, deriv, second)
    }
}

/// Spline of a radial field on `[0, r_max]`: the origin value comes from even
/// extrapolation with zero slope, and the field is zero beyond `r_max`.
#[derive(Debug, Clone)]
pub struct RadialSpline {
    spline: CubicSpline,
    r_max: f64,
}

impl RadialSpline {
    pub fn new(f: &RadialField) -> Result<Self> {
        let grid = f.grid();
        let mut x = Vec::with_capacity(grid.n_points() + 1);
        let mut y = Vec::with_capacity(grid.n_points() + 1);
        x.push(0.0);
        y.push(f.value_at_origin());
        for (i, &v) in f.values().iter().enumerate() {
            x.push(grid.node(i));
            y.push(v);
        }
        let spline = CubicSpline::new(x, y, SplineEnd::Clamped(0.0), SplineEnd::Natural)?;
        Ok(Self { spline, r_max: grid.r_max() })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// Value and radial derivative at `|r|`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        if r >= self.r_max {
            return (0.0, 0.0);
        }
        let (v, d, _) = self.spline.eval(r);
        (v, d)
    }

    /// Samples onto `grid`, pinning the Dirichlet node.
    pub fn resample(&self, grid: RadialGrid, transform: impl Fn(f64) -> f64) -> RadialField {
        RadialField::from_fn(grid, |r| self.value(transform(r))).with_dirichlet()
    }
}
