//! Job description files.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use toric_period::{GridSpec, QuadratureSettings, SpectralParams, ToricData};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema_version: u32,
    pub charge_matrix: Vec<Vec<i64>>,
    pub lambda: Vec<f64>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    pub grid: Option<GridSpec>,
    pub x_points: Option<Vec<Vec<f64>>>,
    pub y_points: Option<Vec<Vec<f64>>>,
    pub dmax: Option<Vec<usize>>,
    #[serde(default = "default_pde_tolerance")]
    pub pde_tolerance: f64,
    #[serde(default = "default_bessel_tolerance")]
    pub bessel_tolerance: f64,
    pub bessel_lambdas: Option<Vec<[f64; 2]>>,
}

fn default_c() -> f64 {
    1.0
}

fn default_pde_tolerance() -> f64 {
    1e-4
}

fn default_bessel_tolerance() -> f64 {
    1e-6
}

/// Where a list of evaluation points came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    X(Vec<Vec<f64>>),
    /// Matrix-element coordinates, evaluated at `x = m·y`.
    Y(Vec<Vec<f64>>),
}

/// A parsed and validated job.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub data: ToricData,
    pub params: SpectralParams,
    source: String,
}

impl Job {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let source = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(source)
    }

    pub fn parse(source: String) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(&source);
        let config: JobConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            CliError::Config {
                line: e.inner().line(),
                field: if field == "." { "(root)".into() } else { field },
                message: e.into_inner().to_string(),
            }
        })?;
        let fail = |field: &str, message: String| CliError::Config {
            line: line_of(&source, field),
            field: field.into(),
            message,
        };

        if config.schema_version != SCHEMA_VERSION {
            return Err(fail(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", config.schema_version),
            ));
        }
        let data = ToricData::new(&config.charge_matrix).map_err(|e| fail("charge_matrix", e.to_string()))?;
        let (n, dim) = (data.charge.rank(), data.charge.dim());
        if config.lambda.len() != dim {
            return Err(fail("lambda", format!("expected {dim} entries, found {}", config.lambda.len())));
        }
        let params = SpectralParams::new(config.lambda.clone(), config.c).map_err(|e| fail("c", e.to_string()))?;
        config.quadrature.validate().map_err(|e| fail("quadrature", e.to_string()))?;
        if let Some(grid) = &config.grid {
            grid.validate().map_err(|e| fail("grid", e.to_string()))?;
            if grid.min.len() != n {
                return Err(fail("grid", format!("expected {n} axes, found {}", grid.min.len())));
            }
        }
        check_points(&config.x_points, n).map_err(|m| fail("x_points", m))?;
        check_points(&config.y_points, dim).map_err(|m| fail("y_points", m))?;
        if let Some(dmax) = &config.dmax {
            if dmax.len() != n {
                return Err(fail("dmax", format!("expected {n} entries, found {}", dmax.len())));
            }
        }
        for (field, tol) in [("pde_tolerance", config.pde_tolerance), ("bessel_tolerance", config.bessel_tolerance)] {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(fail(field, "must be positive".into()));
            }
        }
        Ok(Self {
            config,
            data,
            params,
            source,
        })
    }

    /// Exactly one of `grid`, `x_points` or `y_points`.
    pub fn points(&self) -> Result<Points, CliError> {
        let c = &self.config;
        match (&c.grid, &c.x_points, &c.y_points) {
            (Some(grid), None, None) => Ok(Points::X(grid.points())),
            (None, Some(x), None) => Ok(Points::X(x.clone())),
            (None, None, Some(y)) => Ok(Points::Y(y.clone())),
            (None, None, None) => Err(self.error("grid", "one of grid, x_points or y_points is required")),
            _ => Err(self.error("grid", "give only one of grid, x_points or y_points")),
        }
    }

    /// A diagnostic pointing at `field` in the source text.
    pub fn error(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            line: line_of(&self.source, field),
            field: field.into(),
            message: message.into(),
        }
    }
}

fn check_points(points: &Option<Vec<Vec<f64>>>, expected: usize) -> Result<(), String> {
    let Some(points) = points else { return Ok(()) };
    if points.is_empty() {
        return Err("at least one point is required".into());
    }
    match points.iter().position(|p| p.len() != expected) {
        Some(i) => Err(format!("point {i} has {} coordinates, expected {expected}", points[i].len())),
        None => Ok(()),
    }
}

/// One-based line of the first `"field"` key, or 1 if it is absent.
fn line_of(source: &str, field: &str) -> usize {
    let key = format!("\"{field}\"");
    source.find(&key).map_or(1, |at| source[..at].matches('\n').count() + 1)
}
