//! Solution documents, CSV profiles and run records.
//!
//! Documents are JSON written in canonical form: keys sorted, two-space
//! indentation, integers as integers and every other number as `{:.16e}`
//! (17 significant digits, enough to round-trip any `f64`). Saving a loaded
//! document therefore reproduces the original bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::minimizer::{
    verify_solution, MultiplierEstimate, SolitaryWaveSolution, SolverConfig, VerificationReport,
};
use crate::nonlinearity::{ModelSpec, NonlinearityModel};
use crate::radial::{RadialField, RadialGrid};

pub const SOLUTION_FORMAT: &str = "gaugewave-solution";
pub const SOLUTION_VERSION: u32 = 1;

pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = String::new();
    emit(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn emit(value: &Value, depth: usize, out: &mut String) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat("  ").take(d));
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i)) if !n.is_f64() => write!(out, "{i}").unwrap(),
            _ => write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN)).unwrap(),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                emit(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("key"));
                out.push_str(": ");
                emit(&map[*key], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    pub n_points: usize,
    pub r_max: f64,
    pub spacing: f64,
}

/// On-disk form of a [`SolitaryWaveSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub format: String,
    pub version: u32,
    pub grid: GridMeta,
    pub q: f64,
    pub sigma2: f64,
    pub omega2: f64,
    pub j_value: f64,
    pub energy: f64,
    pub residual: f64,
    pub tol_residual: f64,
    pub iterations: usize,
    pub max_constraint_drift: f64,
    pub multiplier: MultiplierEstimate,
    pub model: ModelSpec,
    pub config: SolverConfig,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SolutionDocument {
    pub fn new(sol: &SolitaryWaveSolution, model: &NonlinearityModel, config: &SolverConfig) -> Self {
        let g = sol.u.grid();
        Self {
            format: SOLUTION_FORMAT.into(),
            version: SOLUTION_VERSION,
            grid: GridMeta { n_points: g.n_points(), r_max: g.r_max(), spacing: g.spacing() },
            q: sol.q,
            sigma2: sol.sigma2,
            omega2: sol.omega2,
            j_value: sol.j_value,
            energy: sol.energy,
            residual: sol.residual,
            tol_residual: sol.tol_residual,
            iterations: sol.iterations,
            max_constraint_drift: sol.max_constraint_drift,
            multiplier: sol.multiplier,
            model: model.spec().clone(),
            config: config.clone(),
            u: sol.u.values().to_vec(),
            phi: sol.phi.values().to_vec(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: Self = read_json(path)?;
        if doc.format != SOLUTION_FORMAT || doc.version != SOLUTION_VERSION {
            return Err(Error::Parse(format!(
                "{}: expected {SOLUTION_FORMAT} version {SOLUTION_VERSION}, found {} version {}",
                path.display(),
                doc.format,
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn model(&self) -> Result<NonlinearityModel> {
        NonlinearityModel::try_from(self.model.clone())
    }

    /// Rebuilds the solution from the stored arrays and scalars. Diagnostics
    /// are left empty; see [`SolutionDocument::verify`].
    pub fn solution(&self) -> Result<SolitaryWaveSolution> {
        let grid = RadialGrid::new(self.grid.n_points, self.grid.r_max)?;
        Ok(SolitaryWaveSolution {
            u: RadialField::new(grid, self.u.clone())?,
            phi: RadialField::new(grid, self.phi.clone())?,
            q: self.q,
            omega2: self.omega2,
            sigma2: self.sigma2,
            j_value: self.j_value,
            energy: self.energy,
            residual: self.residual,
            tol_residual: self.tol_residual,
            iterations: self.iterations,
            multiplier: self.multiplier,
            j_history: Vec::new(),
            max_constraint_drift: self.max_constraint_drift,
            diagnostics: VerificationReport::default(),
        })
    }

    /// Loads the solution and re-runs the full checklist against it.
    pub fn verify(&self) -> Result<(SolitaryWaveSolution, NonlinearityModel)> {
        let model = self.model()?;
        let mut sol = self.solution()?;
        sol.diagnostics = verify_solution(&sol, &model, sol.q)?;
        Ok((sol, model))
    }
}

/// Writes `r,u,phi,energy_density`, one row per grid node.
pub fn write_profile_csv(path: &Path, sol: &SolitaryWaveSolution, model: &NonlinearityModel) -> Result<()> {
    let density = sol.energy_density(model)?.density;
    let grid = sol.u.grid();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_error)?;
    w.write_record(["r", "u", "phi", "energy_density"]).map_err(csv_error)?;
    for i in 0..grid.n_points() {
        w.write_record(&[
            format!("{:.16e}", grid.node(i)),
            format!("{:.16e}", sol.u.values()[i]),
            format!("{:.16e}", sol.phi.values()[i]),
            format!("{:.16e}", density.values()[i]),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub omega2: f64,
    pub sigma2: f64,
    pub j: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl SolutionSummary {
    pub fn of(sol: &SolitaryWaveSolution) -> Self {
        Self {
            omega2: sol.omega2,
            sigma2: sol.sigma2,
            j: sol.j_value,
            energy: sol.energy,
            residual: sol.residual,
            iterations: sol.iterations,
        }
    }
}

/// Everything needed to reproduce and audit one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_echo: SolverConfig,
    pub model_echo: ModelSpec,
    pub solution_summary: Option<SolutionSummary>,
    /// `true` for pass, `false` for fail; informational checks count as pass.
    pub check_results: BTreeMap<String, bool>,
    pub artifact_paths: Vec<PathBuf>,
    pub tool_version: String,
}

impl RunRecord {
    pub fn new(config: &SolverConfig, model: &NonlinearityModel) -> Self {
        Self {
            config_echo: config.clone(),
            model_echo: model.spec().clone(),
            solution_summary: None,
            check_results: BTreeMap::new(),
            artifact_paths: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn with_solution(mut self, sol: &SolitaryWaveSolution) -> Self {
        self.solution_summary = Some(SolutionSummary::of(sol));
        self.check_results = sol.diagnostics.checks.iter().map(|(k, c)| (k.clone(), c.passed())).collect();
        self
    }
}
