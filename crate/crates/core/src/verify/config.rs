//! TOML configuration documents.
//!
//! A document describes one body at top level, or several under `[[bodies]]`:
//!
//! ```toml
//! family = "l2-sum"      # quadratic | split-T-V | l2-sum | direct-sum
//! dimension = 2          # degrees of freedom n (phase space is R^2n)
//! level = 1.0            # the body is {H <= level}
//! [parameters]
//! norm = "ell-infinity"
//! ```
//!
//! Family parameters:
//! * `quadratic`: `matrix`, the `2n x 2n` matrix `A` of `H = x . A x`,
//!   row-major, phase order `(p, q)`.
//! * `l2-sum`: `norm` (acting on `q`), optional `dual_norm` (acting on `p`,
//!   defaults to the dual) and `weights` for `weighted-ell-2`.
//! * `split-T-V`: `kinetic` and `potential` tables, each either
//!   `{ kind = "norm-squared", norm = "...", scale = 1.0 }` or
//!   `{ kind = "quadratic", matrix = [...] }` (`n x n`), and an optional
//!   `sandwich` matrix to certify.
//! * `direct-sum`: `systems`, a list of `{ kind = "harmonic", omega = w }`,
//!   `{ kind = "power", p_coeff, p_exp, q_coeff, q_exp }` or
//!   `{ kind = "quadratic", matrix = [a, b, b, c] }` planar Hamiltonians.
//!
//! An optional `[simulation]` table (`start`, `max_events`, `dense`) drives
//! the event-driven simulator for the `|p|_1^2 + |q|_inf^2` body.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bodies::{L2SumSpec, NormDescriptor, NormKind, NormSquared, SeparablePower, SharedHamiltonian};
use crate::error::{Error, Result};
use crate::profiles::OneDofSystem;
use crate::quadratic::QuadraticForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum Family {
    #[serde(rename = "quadratic")]
    Quadratic,
    #[serde(rename = "split-T-V")]
    SplitTV,
    #[serde(rename = "l2-sum")]
    L2Sum,
    #[serde(rename = "direct-sum")]
    DirectSum,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Quadratic => "quadratic",
            Family::SplitTV => "split-T-V",
            Family::L2Sum => "l2-sum",
            Family::DirectSum => "direct-sum",
        }
    }
}

fn default_level() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub label: Option<String>,
    pub family: Family,
    pub dimension: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub parameters: toml::Table,
    pub simulation: Option<SimulationConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub start: StartSpec,
    #[serde(default = "default_max_events")]
    pub max_events: usize,
    #[serde(default = "default_dense")]
    pub dense: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { start: StartSpec::default(), max_events: default_max_events(), dense: default_dense() }
    }
}

fn default_max_events() -> usize {
    256
}

fn default_dense() -> usize {
    64
}

/// `"explicit"`, `"one-cycle"` or an explicit `{ p = [...], q = [...] }`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Named(String),
    Point { p: Vec<f64>, q: Vec<f64> },
}

impl Default for StartSpec {
    fn default() -> Self {
        StartSpec::Named("explicit".into())
    }
}

#[derive(Debug, Clone)]
pub struct ConfigDocument {
    pub bodies: Vec<BodyConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiBody {
    bodies: Vec<BodyConfig>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let bodies = if value.contains_key("bodies") {
            let m: MultiBody = value.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
            m.bodies
        } else {
            vec![value.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?]
        };
        if bodies.is_empty() {
            return Err(Error::Config("document declares no bodies".into()));
        }
        for b in &bodies {
            if b.dimension == 0 {
                return Err(Error::Config("dimension must be positive".into()));
            }
            if !(b.level > 0.0 && b.level.is_finite()) {
                return Err(Error::Config("level must be positive".into()));
            }
        }
        Ok(Self { bodies })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticParams {
    matrix: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct L2SumParams {
    #[serde(default = "default_norm")]
    norm: String,
    dual_norm: Option<String>,
    weights: Option<Vec<f64>>,
}

fn default_norm() -> String {
    "ell-infinity".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum FunctionSpec {
    NormSquared {
        norm: String,
        #[serde(default = "one")]
        scale: f64,
        weights: Option<Vec<f64>>,
    },
    Quadratic {
        matrix: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitParams {
    kinetic: FunctionSpec,
    potential: FunctionSpec,
    sandwich: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SubsystemSpec {
    Harmonic {
        omega: f64,
    },
    Power {
        p_coeff: f64,
        p_exp: f64,
        q_coeff: f64,
        q_exp: f64,
    },
    Quadratic {
        matrix: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectSumParams {
    systems: Vec<SubsystemSpec>,
}

/// A validated body.
#[derive(Debug, Clone)]
pub enum Body {
    Quadratic(QuadraticForm),
    L2Sum(L2SumSpec),
    Split {
        kinetic: SharedHamiltonian,
        potential: SharedHamiltonian,
        /// The kinetic term is `|p|^2 / 2`.
        euclidean_kinetic: bool,
        sandwich: Option<QuadraticForm>,
    },
    DirectSum(Vec<OneDofSystem>),
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn norm_from(name: &str, weights: Option<Vec<f64>>, dim: usize) -> Result<NormDescriptor> {
    match (name, weights) {
        ("weighted-ell-2", Some(w)) => NormDescriptor::new(NormKind::WeightedL2(w), dim),
        ("weighted-ell-2", None) => Err(Error::Config("weighted-ell-2 needs weights".into())),
        (_, Some(_)) => Err(Error::Config(format!("norm '{name}' takes no weights"))),
        (name, None) => NormDescriptor::from_name(name, dim),
    }
    .map_err(config_err)
}

fn function_from(spec: FunctionSpec, n: usize) -> Result<(SharedHamiltonian, bool)> {
    match spec {
        FunctionSpec::NormSquared { norm, scale, weights } => {
            let d = norm_from(&norm, weights, n)?;
            let euclid_half = matches!(d.kind(), NormKind::L2) && scale == 0.5;
            Ok((Arc::new(NormSquared::new(d, scale).map_err(config_err)?), euclid_half))
        }
        FunctionSpec::Quadratic { matrix } => {
            let q = QuadraticForm::from_row_major(n, &matrix).map_err(config_err)?;
            Ok((Arc::new(q), false))
        }
    }
}

impl BodyConfig {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| format!("{} n={}", self.family.name(), self.dimension))
    }

    fn params<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        self.parameters
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("{}: {e}", self.family.name())))
    }

    pub fn build(&self) -> Result<Body> {
        let n = self.dimension;
        match self.family {
            Family::Quadratic => {
                let p: QuadraticParams = self.params()?;
                Ok(Body::Quadratic(QuadraticForm::from_row_major(2 * n, &p.matrix).map_err(config_err)?))
            }
            Family::L2Sum => {
                let p: L2SumParams = self.params()?;
                let norm = norm_from(&p.norm, p.weights.clone(), n)?;
                let spec = match p.dual_norm {
                    Some(d) => L2SumSpec::new(norm, norm_from(&d, p.weights.map(|w| w.iter().map(|v| 1.0 / v).collect()), n)?),
                    None => L2SumSpec::with_dual(norm),
                };
                Ok(Body::L2Sum(spec.map_err(config_err)?))
            }
            Family::SplitTV => {
                let p: SplitParams = self.params()?;
                let (kinetic, euclidean_kinetic) = function_from(p.kinetic, n)?;
                let (potential, _) = function_from(p.potential, n)?;
                let sandwich = p
                    .sandwich
                    .map(|m| QuadraticForm::from_row_major(n, &m).map_err(config_err))
                    .transpose()?;
                Ok(Body::Split { kinetic, potential, euclidean_kinetic, sandwich })
            }
            Family::DirectSum => {
                let p: DirectSumParams = self.params()?;
                if p.systems.len() != n {
                    return Err(Error::Config(format!(
                        "direct-sum declares dimension {n} but lists {} systems",
                        p.systems.len()
                    )));
                }
                let systems = p
                    .systems
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let (h, label): (SharedHamiltonian, String) = match s {
                            SubsystemSpec::Harmonic { omega } => (
                                Arc::new(SeparablePower::harmonic(omega).map_err(config_err)?),
                                format!("harmonic omega={omega}"),
                            ),
                            SubsystemSpec::Power { p_coeff, p_exp, q_coeff, q_exp } => (
                                Arc::new(SeparablePower::new(p_coeff, p_exp, q_coeff, q_exp).map_err(config_err)?),
                                format!("{p_coeff}|p|^{p_exp} + {q_coeff}|q|^{q_exp}"),
                            ),
                            SubsystemSpec::Quadratic { matrix } => (
                                Arc::new(QuadraticForm::from_row_major(2, &matrix).map_err(config_err)?),
                                format!("quadratic {matrix:?}"),
                            ),
                        };
                        OneDofSystem::new(h, format!("{i}: {label}")).map_err(config_err)
                    })
                    .collect::<Result<_>>()?;
                Ok(Body::DirectSum(systems))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_and_multi() {
        let d = ConfigDocument::parse("family = \"l2-sum\"\ndimension = 2\n[parameters]\nnorm = \"ell-infinity\"\n").unwrap();
        assert_eq!(d.bodies.len(), 1);
        assert!(matches!(d.bodies[0].build().unwrap(), Body::L2Sum(_)));
        let text = r#"
            [[bodies]]
            family = "quadratic"
            dimension = 1
            parameters = { matrix = [1.0, 0.0, 0.0, 1.0] }

            [[bodies]]
            family = "direct-sum"
            dimension = 2
            level = 0.5
            parameters = { systems = [{ kind = "harmonic", omega = 1.0 }, { kind = "power", p_coeff = 0.5, p_exp = 2.0, q_coeff = 1.0, q_exp = 4.0 }] }
        "#;
        let d = ConfigDocument::parse(text).unwrap();
        assert_eq!(d.bodies.len(), 2);
        assert_eq!(d.bodies[1].level, 0.5);
        assert!(matches!(d.bodies[1].build().unwrap(), Body::DirectSum(ref s) if s.len() == 2));
    }

    #[test]
    fn split_detects_euclidean_kinetic() {
        let text = r#"
            family = "split-T-V"
            dimension = 2
            [parameters]
            kinetic = { kind = "norm-squared", norm = "ell-2", scale = 0.5 }
            potential = { kind = "quadratic", matrix = [0.5, 0.0, 0.0, 2.0] }
        "#;
        let b = ConfigDocument::parse(text).unwrap().bodies[0].build().unwrap();
        assert!(matches!(b, Body::Split { euclidean_kinetic: true, .. }));
    }

    #[test]
    fn errors_are_config_errors() {
        for text in [
            "family = \"cube\"\ndimension = 2",
            "family = \"quadratic\"",
            "family = \"quadratic\"\ndimension = 1\nlevel = -1.0\n[parameters]\nmatrix = [1.0, 0.0, 0.0, 1.0]",
            "not toml at all [",
            "family = \"l2-sum\"\ndimension = 2\ncolour = 3",
        ] {
            assert!(matches!(ConfigDocument::parse(text), Err(Error::Config(_))), "{text}");
        }
        for text in [
            "family = \"quadratic\"\ndimension = 1\n[parameters]\nmatrix = [1.0, 2.0, 2.0, 1.0]",
            "family = \"l2-sum\"\ndimension = 2\n[parameters]\nnorm = \"ell-7\"",
            "family = \"direct-sum\"\ndimension = 2\n[parameters]\nsystems = [{ kind = \"harmonic\", omega = 1.0 }]",
        ] {
            let d = ConfigDocument::parse(text).unwrap();
            assert!(matches!(d.bodies[0].build(), Err(Error::Config(_))), "{text}");
        }
    }
}
