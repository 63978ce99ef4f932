//! Versioned JSON inputs.
//!
//! A configuration file names either explicit masses and seed positions
//!
//! ```json
//! { "schema_version": 1, "masses": [1, 1, 1, 1],
//!   "positions": [[1, 0], [0, 1], [-1, 0], [0, -1]] }
//! ```
//!
//! or a family, `{ "schema_version": 1, "family": "rhombus", "mass_param": 0.6 }`.
//! A scan spec adds the grids:
//!
//! ```json
//! { "schema_version": 1, "family": "rhombus", "mass_params": [0.5, 0.6],
//!   "e_grid": [0.0, 0.1], "p": 1.0 }
//! ```

use std::path::Path;

use ere4::centralconfig::{Configuration, Family, MassVector};
use ere4::cplx::PlanarComplex;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Largest eccentricity accepted on the command line.
pub const E_MAX: f64 = 0.99;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigInput {
    pub schema_version: u32,
    #[serde(default)]
    pub masses: Option<[f64; 4]>,
    #[serde(default)]
    pub positions: Option<[[f64; 2]; 4]>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub mass_param: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub schema_version: u32,
    pub family: String,
    #[serde(default = "default_mass_params")]
    pub mass_params: Vec<f64>,
    pub e_grid: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub rtol: Option<f64>,
    #[serde(default)]
    pub atol: Option<f64>,
}

fn default_mass_params() -> Vec<f64> {
    vec![1.0]
}

fn default_p() -> f64 {
    1.0
}

/// Masses and seed configuration ready for the solver.
#[derive(Debug, Clone)]
pub struct Problem {
    pub masses: MassVector,
    pub seed: Configuration,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn check_version(v: u32) -> Result<(), CliError> {
    if v != SCHEMA_VERSION {
        return Err(schema(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

pub fn parse_family(name: &str) -> Result<Family, CliError> {
    name.parse::<Family>().map_err(|e| schema(e.to_string()))
}

pub fn from_family(family: Family, param: f64) -> Result<Problem, CliError> {
    let raw = family.masses(param);
    let masses = MassVector::new(raw)?;
    let seed = Configuration::normalize(raw, family.seed())?;
    Ok(Problem { masses, seed })
}

impl ConfigInput {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let input: ConfigInput = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        check_version(input.schema_version)?;
        Ok(input)
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        match (&self.family, &self.masses, &self.positions) {
            (Some(name), None, None) => from_family(parse_family(name)?, self.mass_param.unwrap_or(1.0)),
            (None, Some(m), Some(p)) => {
                if self.mass_param.is_some() {
                    return Err(schema("mass_param only applies to a family"));
                }
                let positions = p.map(|[x, y]| PlanarComplex::new(x, y));
                let masses = MassVector::new(*m)?;
                let seed = Configuration::normalize(*m, positions)?;
                Ok(Problem { masses, seed })
            }
            _ => Err(schema("give either `family` or both `masses` and `positions`")),
        }
    }
}

impl ScanSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ScanSpec = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        check_version(spec.schema_version)?;
        if spec.e_grid.is_empty() || spec.mass_params.is_empty() {
            return Err(schema("scan grids must be nonempty"));
        }
        for &e in &spec.e_grid {
            check_eccentricity(e)?;
        }
        parse_family(&spec.family)?;
        Ok(spec)
    }
}

pub fn check_eccentricity(e: f64) -> Result<(), CliError> {
    if !(0.0..=E_MAX).contains(&e) {
        return Err(schema(format!("eccentricity {e} outside [0, {E_MAX}]")));
    }
    Ok(())
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
