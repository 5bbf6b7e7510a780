//! Nonlinearities `W` and a sampling checker for the hypotheses W1–W5 and the
//! Berestycki–Lions conditions on `G(s) = W(s) − ½ω0²s²`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{CubicSpline, SplineEnd};

/// `W(s)`, `W′(s)`, `W″(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WValues {
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `W(s) = (m0² s0² / 2) · t / (1 + t)`, `t = (s/s0)²`.
    Saturable { s0: f64 },
    /// `W(s) = ½ m0² s²`. Fails W3; kept as a negative control.
    Quadratic,
    /// `W(s) = ½ m0² s² − |s|^p / p`. Fails W1; kept as a negative control.
    PowerLaw { p: f64 },
    /// Cubic spline through `(s, W(s))`. A table starting at `s = 0` is
    /// extended evenly to negative `s`.
    UserTabulated { s: Vec<f64>, w: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub family: Family,
    pub m0: f64,
    pub p_growth: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct NonlinearityModel {
    spec: ModelSpec,
    table: Option<Arc<Table>>,
}

#[derive(Debug)]
struct Table {
    spline: CubicSpline,
    even: bool,
}

impl NonlinearityModel {
    pub fn saturable(m0: f64, s0: f64) -> Result<Self> {
        positive("m0", m0)?;
        positive("s0", s0)?;
        Ok(Self::bare(Family::Saturable { s0 }, m0, 0.0, 0.0, m0 * m0))
    }

    pub fn quadratic(m0: f64) -> Result<Self> {
        positive("m0", m0)?;
        Ok(Self::bare(Family::Quadratic, m0, 0.0, 0.0, m0 * m0))
    }

    pub fn power_law(m0: f64, p: f64) -> Result<Self> {
        positive("m0", m0)?;
        if !(p > 2.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("power-law exponent p = {p} must exceed 2")));
        }
        Ok(Self::bare(Family::PowerLaw { p }, m0, p - 2.0, p - 1.0, m0 * m0))
    }

    /// Builds a tabulated model. `m0` is read off the spline as `√W″(0)` and
    /// the W5 envelope is measured from the table.
    pub fn tabulated(s: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let table = build_table(&s, &w)?;
        let mut model = Self {
            spec: ModelSpec {
                family: Family::UserTabulated { s, w },
                m0: 0.0,
                p_growth: 0.0,
                c1: 0.0,
                c2: 0.0,
            },
            table: Some(Arc::new(table)),
        };
        let (lo, hi) = model.table_range().expect("tabulated");
        let origin = match &model.spec.family {
            // Fit W(0) + c s² + d s⁴ through the first three rows: O(h⁴) in W″(0).
            Family::UserTabulated { s, w } if s[0] == 0.0 => {
                let (a, b) = (s[1] * s[1], s[2] * s[2]);
                let (d1, d2) = (w[1] - w[0], w[2] - w[0]);
                2.0 * (d1 * b * b - d2 * a * a) / (a * b * (b - a))
            }
            _ if lo <= 0.0 && hi >= 0.0 => model.eval(0.0)?.d2w,
            _ => f64::NAN,
        };
        model.spec.m0 = if origin > 0.0 { origin.sqrt() } else { 0.0 };
        let mut c2 = 0.0_f64;
        let n = 2000;
        for k in 0..=n {
            let t = lo + (hi - lo) * k as f64 / n as f64;
            c2 = c2.max(model.eval(t)?.d2w.abs());
        }
        model.spec.c2 = c2;
        Ok(model)
    }

    /// Reads a two-column CSV `(s, W(s))` with an optional header row.
    pub fn from_table_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let mut s = Vec::new();
        let mut w = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            if record.len() != 2 {
                return Err(Error::Parse(format!(
                    "{}:{}: expected 2 columns, found {}",
                    path.display(),
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(a), Ok(b)) => {
                    s.push(a);
                    w.push(b);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "{}:{}: non-numeric row",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Self::tabulated(s, w).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn bare(family: Family, m0: f64, p_growth: f64, c1: f64, c2: f64) -> Self {
        Self { spec: ModelSpec { family, m0, p_growth, c1, c2 }, table: None }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn family(&self) -> &Family {
        &self.spec.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.spec.family {
            Family::Saturable { .. } => "saturable",
            Family::Quadratic => "quadratic",
            Family::PowerLaw { .. } => "power_law",
            Family::UserTabulated { .. } => "user_tabulated",
        }
    }

    pub fn m0(&self) -> f64 {
        self.spec.m0
    }

    /// Natural amplitude scale used to size sampling ranges.
    pub fn amplitude_scale(&self) -> f64 {
        match &self.spec.family {
            Family::Saturable { s0 } => *s0,
            Family::UserTabulated { .. } => self.table_range().map(|(lo, hi)| hi.max(-lo)).unwrap_or(1.0),
            _ => 1.0,
        }
    }

    fn table_range(&self) -> Option<(f64, f64)> {
        let table = self.table.as_ref()?;
        let (lo, hi) = table.spline.domain();
        Some(if table.even { (-hi, hi) } else { (lo, hi) })
    }

    pub fn eval(&self, s: f64) -> Result<WValues> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("W evaluated at non-finite s = {s}")));
        }
        let m2 = self.spec.m0 * self.spec.m0;
        Ok(match &self.spec.family {
            Family::Saturable { s0 } => {
                let x = s / s0;
                let t = x * x;
                let d = 1.0 + t;
                WValues {
                    w: 0.5 * m2 * s0 * s0 * t / d,
                    dw: m2 * s / (d * d),
                    d2w: m2 * (1.0 - 3.0 * t) / (d * d * d),
                }
            }
            Family::Quadratic => WValues { w: 0.5 * m2 * s * s, dw: m2 * s, d2w: m2 },
            Family::PowerLaw { p } => {
                let a = s.abs();
                WValues {
                    w: 0.5 * m2 * s * s - a.powf(*p) / p,
                    dw: m2 * s - a.powf(p - 2.0) * s,
                    d2w: m2 - (p - 1.0) * a.powf(p - 2.0),
                }
            }
            Family::UserTabulated { .. } => {
                let table = self.table.as_ref().expect("tabulated model carries its spline");
                let (lo, hi) = self.table_range().expect("tabulated");
                if s < lo || s > hi {
                    return Err(Error::OutsideTable { s, lo, hi });
                }
                if table.even {
                    let (w, dw, d2w) = table.spline.eval(s.abs());
                    WValues { w, dw: dw * s.signum(), d2w }
                } else {
                    let (w, dw, d2w) = table.spline.eval(s);
                    WValues { w, dw, d2w }
                }
            }
        })
    }

    pub fn w(&self, s: f64) -> Result<f64> {
        Ok(self.eval(s)?.w)
    }

    pub fn dw(&self, s: f64) -> Result<f64> {
        Ok(self.eval(s)?.dw)
    }
}

impl TryFrom<ModelSpec> for NonlinearityModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        match &spec.family {
            Family::UserTabulated { s, w } => {
                let mut model = Self::tabulated(s.clone(), w.clone())?;
                model.spec = spec;
                Ok(model)
            }
            _ => {
                positive("m0", spec.m0)?;
                Ok(Self { spec, table: None })
            }
        }
    }
}

impl From<NonlinearityModel> for ModelSpec {
    fn from(model: NonlinearityModel) -> Self {
        model.spec
    }
}

impl PartialEq for NonlinearityModel {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be positive")))
    }
}

fn build_table(s: &[f64], w: &[f64]) -> Result<Table> {
    if s.len() != w.len() || s.len() < 4 {
        return Err(Error::InvalidArgument("table needs at least 4 (s, W) rows".into()));
    }
    if s.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidArgument("table s column must be strictly increasing".into()));
    }
    let even = s[0] == 0.0;
    let start = if even { SplineEnd::Clamped(0.0) } else { SplineEnd::Natural };
    let spline = CubicSpline::new(s.to_vec(), w.to_vec(), start, SplineEnd::Natural)?;
    Ok(Table { spline, even })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub assumption: String,
    pub s: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerestyckiLions {
    /// `G(0) = G′(0) = 0`
    pub vanishes_at_origin: bool,
    /// `G″(0) > 0`
    pub positive_curvature: bool,
    /// `limsup G′(s)/s⁵ ≥ 0`
    pub subcritical_growth: bool,
    /// `∃ u0 > 0: G(u0) < 0`
    pub negative_somewhere: bool,
}

impl BerestyckiLions {
    pub fn all(&self) -> bool {
        self.vanishes_at_origin && self.positive_curvature && self.subcritical_growth && self.negative_somewhere
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub w1: bool,
    pub w2: bool,
    pub w3: bool,
    pub w4: bool,
    pub w5: bool,
    pub m0_measured: f64,
    pub m1_measured: f64,
    /// Constant `c` of W3 measured at the midpoint mass `(m1 + m0)/2`.
    pub w3_constant: f64,
    pub omega0: f64,
    pub bl_conditions: BerestyckiLions,
    pub sample_range: (f64, f64),
    pub violations: Vec<Violation>,
}

impl AssumptionReport {
    pub fn w1_to_w5(&self) -> bool {
        self.w1 && self.w2 && self.w3 && self.w4 && self.w5
    }

    pub fn render(&self) -> String {
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        let mut out = String::new();
        out.push_str(&format!("sample range      [{:.6e}, {:.6e}]\n", self.sample_range.0, self.sample_range.1));
        out.push_str(&format!("W1 W>=0, W(0)=W'(0)=0     {}\n", flag(self.w1)));
        out.push_str(&format!("W2 W''(0)=m0^2>0          {}  (m0 = {:.9})\n", flag(self.w2), self.m0_measured));
        out.push_str(&format!(
            "W3 W <= m1^2 s^2/2 + c    {}  (m1 = {:.9}, c = {:.6e})\n",
            flag(self.w3),
            self.m1_measured,
            self.w3_constant
        ));
        out.push_str(&format!("W4 0 <= W's/2 <= W        {}\n", flag(self.w4)));
        out.push_str(&format!("W5 |W''| <= c1|s|^p + c2  {}\n", flag(self.w5)));
        let bl = &self.bl_conditions;
        out.push_str(&format!("Berestycki-Lions at omega0 = {:.9}\n", self.omega0));
        out.push_str(&format!("  G(0)=G'(0)=0            {}\n", flag(bl.vanishes_at_origin)));
        out.push_str(&format!("  G''(0)>0                {}\n", flag(bl.positive_curvature)));
        out.push_str(&format!("  limsup G'(s)/s^5 >= 0   {}\n", flag(bl.subcritical_growth)));
        out.push_str(&format!("  exists u0: G(u0)<0      {}\n", flag(bl.negative_somewhere)));
        for v in self.violations.iter().take(10) {
            out.push_str(&format!("  violation {} at s = {:.6e}: {:?}\n", v.assumption, v.s, v.values));
        }
        out
    }
}

const MAX_VIOLATIONS_PER_ASSUMPTION: usize = 8;

fn sample_points(s_max: f64, n_samples: usize) -> Vec<f64> {
    let half = n_samples / 2;
    let mut pos = Vec::with_capacity(n_samples);
    for k in 1..=half {
        pos.push(s_max * k as f64 / half as f64);
    }
    let lo = (s_max * 1e-6).ln();
    let hi = s_max.ln();
    for k in 0..(n_samples - half) {
        pos.push((lo + (hi - lo) * k as f64 / (n_samples - half - 1).max(1) as f64).exp());
    }
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    pos
}

/// Samples `W` on `[−s_max, s_max]` and flags W1–W5 plus the four
/// Berestycki–Lions conditions at `omega0` (default: the middle of the
/// measured window `(m1, m0)`).
pub fn check_assumptions(
    model: &NonlinearityModel,
    s_max: f64,
    n_samples: usize,
    omega0: Option<f64>,
) -> Result<AssumptionReport> {
    if !(s_max.is_finite() && s_max > 0.0) {
        return Err(Error::InvalidArgument(format!("s_max = {s_max} must be positive")));
    }
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!("n_samples = {n_samples} must be at least 100")));
    }
    let s_max = match model.table_range() {
        Some((_, hi)) => s_max.min(hi),
        None => s_max,
    };
    let positive = sample_points(s_max, n_samples);
    let lower_ok = model.table_range().map_or(true, |(lo, _)| lo <= -s_max);
    let mut samples: Vec<f64> = Vec::with_capacity(2 * positive.len());
    if lower_ok {
        samples.extend(positive.iter().rev().map(|s| -s));
    }
    samples.extend(positive.iter().copied());

    let at0 = model.eval(0.0)?;
    let evals: Vec<(f64, WValues)> =
        samples.iter().map(|&s| model.eval(s).map(|v| (s, v))).collect::<Result<_>>()?;
    let scale = evals.iter().fold(at0.w.abs(), |m, (_, v)| m.max(v.w.abs())).max(1e-300);
    let tol = 1e-12 * scale;

    let mut violations: Vec<Violation> = Vec::new();
    let record = |id: &str, s: f64, values: Vec<f64>, violations: &mut Vec<Violation>| {
        if violations.iter().filter(|v| v.assumption == id).count() < MAX_VIOLATIONS_PER_ASSUMPTION {
            violations.push(Violation { assumption: id.to_string(), s, values });
        }
    };

    // W1
    let mut w1 = at0.w.abs() <= tol && at0.dw.abs() <= tol * 1e3;
    if !w1 {
        record("W1", 0.0, vec![at0.w, at0.dw], &mut violations);
    }
    for (s, v) in &evals {
        if v.w < -tol {
            w1 = false;
            record("W1", *s, vec![v.w], &mut violations);
        }
    }

    // W2
    let w2 = at0.d2w > 0.0;
    if !w2 {
        record("W2", 0.0, vec![at0.d2w], &mut violations);
    }
    let m0_measured = at0.d2w.max(0.0).sqrt();

    // W3: m1² = inf 2W/s², then a finite c at the midpoint mass.
    let ratio_inf = evals
        .iter()
        .filter(|(s, _)| *s != 0.0)
        .map(|(s, v)| 2.0 * v.w / (s * s))
        .fold(f64::INFINITY, f64::min);
    let m1_measured = ratio_inf.max(0.0).sqrt();
    let window_open = m1_measured < m0_measured * (1.0 - 1e-6);
    let m_mid = 0.5 * (m1_measured + m0_measured);
    let (argmax, w3_constant) = evals
        .iter()
        .map(|(s, v)| (*s, v.w - 0.5 * m_mid * m_mid * s * s))
        .fold((0.0, f64::NEG_INFINITY), |acc, (s, g)| if g > acc.1 { (s, g) } else { acc });
    let bounded_tail = argmax.abs() < s_max;
    let w3 = w2 && window_open && bounded_tail;
    if !w3 {
        record("W3", argmax, vec![m1_measured, m0_measured, w3_constant], &mut violations);
    }

    // W4
    let mut w4 = true;
    for (s, v) in &evals {
        let half = 0.5 * v.dw * s;
        if half < -tol || half > v.w + tol {
            w4 = false;
            record("W4", *s, vec![half, v.w], &mut violations);
        }
    }

    // W5 with the model's declared envelope.
    let spec = model.spec();
    let mut w5 = spec.p_growth < 4.0;
    if !w5 {
        record("W5", f64::NAN, vec![spec.p_growth], &mut violations);
    }
    for (s, v) in evals.iter().chain(std::iter::once(&(0.0, at0))) {
        let bound = spec.c1 * s.abs().powf(spec.p_growth) + spec.c2;
        if v.d2w.abs() > bound * (1.0 + 1e-9) + tol {
            w5 = false;
            record("W5", *s, vec![v.d2w, bound], &mut violations);
        }
    }

    // Berestycki–Lions for G(s) = W(s) − ½ω0² s².
    let omega0 = omega0.unwrap_or(if window_open { m_mid } else { 0.5 * m0_measured });
    let w02 = omega0 * omega0;
    let vanishes_at_origin = at0.w.abs() <= tol && at0.dw.abs() <= tol * 1e3;
    let positive_curvature = at0.d2w - w02 > 0.0;
    let growth = |s: f64| -> Result<f64> {
        let v = model.eval(s)?;
        Ok((v.dw - w02 * s) / s.powi(5))
    };
    let g_end = growth(s_max)?;
    let g_half = growth(0.5 * s_max)?;
    let subcritical_growth = g_end >= -1e-8 || g_end.abs() < 0.5 * g_half.abs();
    let negative_somewhere = positive.iter().any(|&s| {
        model.eval(s).map(|v| v.w - 0.5 * w02 * s * s < 0.0).unwrap_or(false)
    });
    let bl_conditions = BerestyckiLions {
        vanishes_at_origin,
        positive_curvature,
        subcritical_growth,
        negative_somewhere,
    };

    Ok(AssumptionReport {
        w1,
        w2,
        w3,
        w4,
        w5,
        m0_measured,
        m1_measured,
        w3_constant,
        omega0,
        bl_conditions,
        sample_range: (if lower_ok { -s_max } else { positive[0] }, s_max),
        violations,
    })
}

/// Default sampling used when only the window is wanted.
pub fn default_report(model: &NonlinearityModel) -> Result<AssumptionReport> {
    check_assumptions(model, 1e3 * model.amplitude_scale(), 4000, None)
}

/// Admissible standing-wave frequencies `(m1, m0)` for the uncoupled problem.
pub fn frequency_window(model: &NonlinearityModel) -> Result<(f64, f64)> {
    let report = default_report(model)?;
    if !(report.w1 && report.w2) {
        return Err(Error::InvalidArgument(format!(
            "model violates {}",
            if report.w1 { "W2" } else { "W1" }
        )));
    }
    if report.m1_measured >= report.m0_measured * (1.0 - 1e-6) {
        return Err(Error::DegenerateWindow { m1: report.m1_measured, m0: report.m0_measured });
    }
    Ok((report.m1_measured, report.m0_measured))
}

pub fn load_table(path: &Path) -> Result<NonlinearityModel> {
    NonlinearityModel::from_table_csv(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn saturable() -> NonlinearityModel {
        NonlinearityModel::saturable(1.0, 1.0).unwrap()
    }

    #[test]
    fn origin_values() {
        let v = NonlinearityModel::saturable(1.7, 0.4).unwrap().eval(0.0).unwrap();
        assert_eq!((v.w, v.dw), (0.0, 0.0));
        assert_relative_eq!(v.d2w, 1.7 * 1.7, max_relative = 1e-15);
    }

    #[test]
    fn saturation_limit() {
        let v = saturable().eval(1e3).unwrap();
        assert!((v.w - 0.5).abs() < 1e-6);
        assert!(v.dw.abs() < 1e-8);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for model in [saturable(), NonlinearityModel::saturable(2.0, 0.3).unwrap()] {
            let s = 0.37;
            let h = 1e-5;
            let fd = (model.w(s + h).unwrap() - model.w(s - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(model.dw(s).unwrap(), fd, max_relative = 1e-8);
            let fd2 = (model.dw(s + h).unwrap() - model.dw(s - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(model.eval(s).unwrap().d2w, fd2, max_relative = 1e-7);
        }
    }

    #[test]
    fn saturable_passes_everything() {
        let report = check_assumptions(&saturable(), 1e3, 4000, Some(0.8)).unwrap();
        assert!(report.w1_to_w5(), "{}", report.render());
        assert!(report.bl_conditions.all(), "{}", report.render());
        assert!(report.m1_measured < 1.01e-3, "{}", report.m1_measured);
        assert!(report.m1_measured < report.m0_measured);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn m1_shrinks_with_range() {
        let a = check_assumptions(&saturable(), 10.0, 400, None).unwrap().m1_measured;
        let b = check_assumptions(&saturable(), 1e3, 400, None).unwrap().m1_measured;
        assert!(b < a);
    }

    #[test]
    fn quadratic_fails_w3() {
        let report = check_assumptions(&NonlinearityModel::quadratic(1.0).unwrap(), 100.0, 400, None).unwrap();
        assert!(!report.w3);
        assert!(report.w1 && report.w2 && report.w4 && report.w5);
        assert!(report.violations.iter().any(|v| v.assumption == "W3"));
    }

    #[test]
    fn quartic_fails_w1_at_two() {
        let model = NonlinearityModel::power_law(1.0, 4.0).unwrap();
        assert!(model.w(2.0).unwrap() < 0.0);
        let report = check_assumptions(&model, 10.0, 400, None).unwrap();
        assert!(!report.w1);
        assert!(report.violations.iter().any(|v| v.assumption == "W1" && v.s.abs() >= 2.0 - 1e-9));
    }

    #[test]
    fn saturable_w4_identity_and_w5_bound() {
        let model = saturable();
        for k in 0..10_000 {
            let s = -50.0 + 100.0 * k as f64 / 9999.0;
            let v = model.eval(s).unwrap();
            let half = 0.5 * v.dw * s;
            let t = s * s;
            assert!(half >= 0.0 && half <= v.w + 1e-15);
            assert!((half - v.w / (1.0 + t)).abs() <= 1e-14 * v.w.max(1e-300));
            assert!(v.d2w.abs() <= 1.0 + 1e-15);
            assert_eq!(model.w(-s).unwrap(), v.w);
        }
    }

    #[test]
    fn window() {
        let (m1, m0) = frequency_window(&NonlinearityModel::saturable(2.0, 1.0).unwrap()).unwrap();
        assert!(m1 < 0.01 && (m0 - 2.0).abs() < 1e-12);
        assert!(matches!(
            frequency_window(&NonlinearityModel::quadratic(1.0).unwrap()),
            Err(Error::DegenerateWindow { .. })
        ));
        let (m1, m0) = frequency_window(&saturable()).unwrap();
        assert!(m1 < 0.8 && 0.8 < m0);
    }

    #[test]
    fn tabulated_reproduces_saturable() {
        let exact = saturable();
        let s: Vec<f64> = (0..=400).map(|k| 20.0 * k as f64 / 400.0).collect();
        let w: Vec<f64> = s.iter().map(|&x| exact.w(x).unwrap()).collect();
        let model = NonlinearityModel::tabulated(s, w).unwrap();
        assert!((model.m0() - 1.0).abs() < 1e-3, "{}", model.m0());
        for &x in &[-3.3, -0.2, 0.0, 0.7, 4.1] {
            assert!((model.w(x).unwrap() - exact.w(x).unwrap()).abs() < 1e-5);
            assert!((model.dw(x).unwrap() - exact.dw(x).unwrap()).abs() < 1e-4);
        }
        assert!(matches!(model.eval(25.0), Err(Error::OutsideTable { .. })));
    }

    #[test]
    fn serde_round_trip_keeps_model() {
        let model = saturable();
        let json = serde_json::to_string(&model).unwrap();
        let back: NonlinearityModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
        assert!(json.contains("\"family\":\"saturable\""));
    }
}
