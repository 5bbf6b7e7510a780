//! Run configuration. A TOML file has two tables, both optional:
//!
//! ```toml
//! schema_version = 1
//!
//! [solver]
//! n_points = 2000
//! r_max = 50.0
//! tol_residual = 1e-8
//!
//! [model]
//! family = "saturable"
//! m0 = 1.0
//! s0 = 1.0
//! ```
//!
//! Missing keys take the defaults below; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimizer::SolverConfig;
use crate::nonlinearity::NonlinearityModel;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "kebab-case")]
pub enum FamilyName {
    #[default]
    Saturable,
    Quadratic,
    PowerLaw,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub family: FamilyName,
    pub m0: f64,
    pub s0: f64,
    /// Exponent of the power-law family.
    pub p: f64,
    /// `(s, W)` table for the tabulated family.
    pub table: Option<PathBuf>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { family: FamilyName::Saturable, m0: 1.0, s0: 1.0, p: 4.0, table: None }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<NonlinearityModel> {
        match self.family {
            FamilyName::Saturable => NonlinearityModel::saturable(self.m0, self.s0),
            FamilyName::Quadratic => NonlinearityModel::quadratic(self.m0),
            FamilyName::PowerLaw => NonlinearityModel::power_law(self.m0, self.p),
            FamilyName::Tabulated => match &self.table {
                Some(path) => NonlinearityModel::from_table_csv(path),
                None => Err(Error::InvalidArgument("the tabulated family needs a table path".into())),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub solver: SolverConfig,
    pub model: ModelConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { schema_version: SCHEMA_VERSION, solver: SolverConfig::default(), model: ModelConfig::default() }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn partial_tables_merge_with_defaults() {
        let c = RunConfig::from_toml("[solver]\nn_points = 500\n[model]\nfamily = \"power_law\"\np = 6.0\n").unwrap();
        assert_eq!(c.solver.n_points, 500);
        assert_eq!(c.solver.r_max, SolverConfig::default().r_max);
        assert_eq!(c.model.family, FamilyName::PowerLaw);
        assert_eq!(c.model.p, 6.0);
        assert!(c.model.build().is_ok());
    }

    #[test]
    fn unknown_keys_and_versions_rejected() {
        assert!(RunConfig::from_toml("[solver]\nn_point = 5\n").is_err());
        assert!(RunConfig::from_toml("schema_version = 2\n").is_err());
        assert!(RunConfig::from_toml("[model]\nfamily = \"tabulated\"\n").unwrap().model.build().is_err());
    }
}
