//! JSON schemas for model and domain specifications.

use serde::{Deserialize, Serialize};
use sphex::covariance::{CovarianceModel, MonomialSeries, SchoenbergSeries};
use sphex::geometry::{SphericalDomain, SphericalPoint};

use crate::CliError;

/// Model specification file, schema version 1.
///
/// ```json
/// {"version": 1, "kind": "canonical", "dimension": 2}
/// {"version": 1, "kind": "schoenberg", "dimension": 2, "coefficients": [0.0, 1.0]}
/// {"version": 1, "kind": "monomial", "dimension": 2, "coefficients": [0.5, 0.5]}
/// {"version": 1, "kind": "powered-exponential", "dimension": 2, "c": 1.0, "alpha": 1.0}
/// {"version": 1, "kind": "sine", "dimension": 2, "c": 1.0, "alpha": 1.0}
/// {"version": 1, "kind": "arccos-linear", "dimension": 2}
/// {"version": 1, "kind": "sfbm", "dimension": 2, "beta": 0.25}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub version: u32,
    pub kind: String,
    pub dimension: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl ModelSpecFile {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read model file {path}: {e}")))?;
        let spec: ModelSpecFile = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("invalid model spec {path}: {e}")))?;
        if spec.version != 1 {
            return Err(CliError::input(format!(
                "unsupported model spec version {} (expected 1)",
                spec.version
            )));
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<CovarianceModel, CliError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                CliError::input(format!("model kind '{}' requires field '{name}'", self.kind))
            })
        };
        let model = match self.kind.as_str() {
            "canonical" => CovarianceModel::Canonical,
            "arccos-linear" => CovarianceModel::ArccosLinear,
            "schoenberg" => {
                let coeffs = self
                    .coefficients
                    .clone()
                    .ok_or_else(|| CliError::input("schoenberg model requires 'coefficients'"))?;
                CovarianceModel::Schoenberg(
                    SchoenbergSeries::new(self.dimension, coeffs).map_err(CliError::from)?,
                )
            }
            "monomial" => {
                let coeffs = self
                    .coefficients
                    .clone()
                    .ok_or_else(|| CliError::input("monomial model requires 'coefficients'"))?;
                CovarianceModel::Monomial(MonomialSeries::new(coeffs).map_err(CliError::from)?)
            }
            "powered-exponential" => CovarianceModel::powered_exponential(
                need(self.c, "c")?,
                need(self.alpha, "alpha")?,
            )
            .map_err(CliError::from)?,
            "sine" => CovarianceModel::sine(need(self.c, "c")?, need(self.alpha, "alpha")?)
                .map_err(CliError::from)?,
            "sfbm" => CovarianceModel::sfbm(need(self.beta, "beta")?).map_err(CliError::from)?,
            other => {
                return Err(CliError::input(format!(
                    "unknown model kind '{other}' (expected one of: schoenberg, monomial, \
                     powered-exponential, sine, canonical, arccos-linear, sfbm)"
                )))
            }
        };
        if self.dimension == 0 {
            return Err(CliError::input("model dimension must be >= 1"));
        }
        Ok(model)
    }
}

/// Domain specification: a JSON value given inline on the command line or,
/// with an `@` prefix, loaded from a file.
///
/// ```json
/// {"kind": "sphere"}
/// {"kind": "semisphere", "k": 2}
/// {"kind": "box", "bounds": [[0.8, 1.6], [0.0, 3.141592653589793]]}
/// {"kind": "cap", "radius": 1.0}
/// {"kind": "custom", "area": 6.28, "lk": [1.0, 3.141592653589793]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: String,
    /// Ambient sphere dimension; optional when a model provides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lk: Option<Vec<f64>>,
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let body = if let Some(path) = text.strip_prefix('@') {
            std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read domain file {path}: {e}")))?
        } else {
            text.to_string()
        };
        serde_json::from_str(&body)
            .map_err(|e| CliError::input(format!("invalid domain spec: {e}")))
    }

    /// Builds the domain; `default_dimension` (usually the model's) is used
    /// when the spec does not carry its own.
    pub fn build(&self, default_dimension: Option<u32>) -> Result<SphericalDomain, CliError> {
        let dimension = self
            .dimension
            .or(default_dimension)
            .or(if self.kind == "semisphere" { self.k } else { None })
            .ok_or_else(|| {
                CliError::input("domain spec needs a 'dimension' field when no model is given")
            })?;
        if let (Some(d), Some(m)) = (self.dimension, default_dimension) {
            if d != m {
                return Err(CliError::input(format!(
                    "domain dimension {d} conflicts with model dimension {m}"
                )));
            }
        }
        let domain = match self.kind.as_str() {
            "sphere" => SphericalDomain::full_sphere(dimension),
            "semisphere" => {
                let k = self.k.unwrap_or(dimension);
                SphericalDomain::semisphere(k)
            }
            "box" => {
                let bounds = self
                    .bounds
                    .clone()
                    .ok_or_else(|| CliError::input("box domain requires 'bounds'"))?;
                SphericalDomain::coordinate_box(dimension, bounds)
            }
            "cap" => {
                let radius = self
                    .radius
                    .ok_or_else(|| CliError::input("cap domain requires 'radius'"))?;
                let center = match &self.center {
                    Some(theta) => {
                        Some(SphericalPoint::new(theta.clone()).map_err(CliError::from)?)
                    }
                    None => None,
                };
                SphericalDomain::cap(dimension, center, radius)
            }
            "custom" => {
                let area = self
                    .area
                    .ok_or_else(|| CliError::input("custom domain requires 'area'"))?;
                SphericalDomain::custom(dimension, area, self.lk.clone())
            }
            other => {
                return Err(CliError::input(format!(
                    "unknown domain kind '{other}' (expected one of: sphere, semisphere, box, \
                     cap, custom)"
                )))
            }
        };
        domain.map_err(CliError::from)
    }
}
