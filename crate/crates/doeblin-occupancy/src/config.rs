//! Problem-instance configuration: a single TOML file describing the chain,
//! the initial distribution, the target set, and approximation controls.

use std::path::Path;

use serde::{Deserialize, Serialize};

use doeblin_markov::{
    stationary_distribution, ProbVector, StateSpace, StochasticMatrix, TargetSet,
};

use crate::construct::rarefy_target_transitions;
use crate::error::{CliError, Result};

/// Initial distribution: explicit weights or the token `"stationary"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InitialSpec {
    Token(String),
    Weights(Vec<f64>),
}

/// On-disk schema. Exactly one of `matrix` or (`q` + `beta`) describes the
/// kernel; `ns`/`betas` define the grid for the `compare` command.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub states: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub target: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
}

impl ChainSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let spec: ChainSpec = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.matrix, &self.q) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either `matrix` or `q`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "one of `matrix` or `q` is required".into(),
                ))
            }
            (Some(_), None) if self.beta.is_some() => {
                return Err(CliError::Config(
                    "`beta` only applies to a base kernel `q`".into(),
                ))
            }
            (None, Some(_)) if self.beta.is_none() && self.betas.is_none() => {
                return Err(CliError::Config(
                    "a base kernel `q` needs `beta` (or `betas` for compare)".into(),
                ))
            }
            _ => {}
        }
        if self.q.is_some() && self.target.is_empty() {
            return Err(CliError::Config(
                "the `q`/`beta` construction needs a non-empty `target`".into(),
            ));
        }
        Ok(())
    }

    pub fn state_space(&self) -> Result<StateSpace> {
        StateSpace::new(self.states.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn target_set(&self, space: &StateSpace) -> Result<TargetSet> {
        let mut indices = Vec::with_capacity(self.target.len());
        for label in &self.target {
            let index = space
                .index_of(label)
                .ok_or_else(|| CliError::Config(format!("unknown target state `{label}`")))?;
            indices.push(index);
        }
        TargetSet::new(indices, space.len()).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The base kernel `q`, for commands that sweep over `beta`.
    pub fn base_kernel(&self) -> Result<StochasticMatrix> {
        let rows = self
            .q
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a base kernel `q`".into()))?;
        if rows.len() != self.states.len() {
            return Err(CliError::Config(format!(
                "`q` has {} rows but there are {} states",
                rows.len(),
                self.states.len()
            )));
        }
        StochasticMatrix::from_rows(rows).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The kernel the instance runs on: `matrix` as given, or the
    /// beta-throttled construction from `q`.
    pub fn kernel(&self, space: &StateSpace, target: &TargetSet) -> Result<StochasticMatrix> {
        if let Some(rows) = &self.matrix {
            if rows.len() != space.len() {
                return Err(CliError::Config(format!(
                    "`matrix` has {} rows but there are {} states",
                    rows.len(),
                    space.len()
                )));
            }
            return StochasticMatrix::from_rows(rows).map_err(|e| CliError::Config(e.to_string()));
        }
        let q = self.base_kernel()?;
        let beta = self
            .beta
            .ok_or_else(|| CliError::Config("`beta` is required to build from `q`".into()))?;
        Ok(rarefy_target_transitions(&q, beta, target)?)
    }

    /// Resolves the initial distribution against a concrete kernel;
    /// `"stationary"` solves the balance equations, absence means uniform.
    pub fn initial(&self, p: &StochasticMatrix) -> Result<ProbVector> {
        match &self.initial {
            None => Ok(ProbVector::uniform(p.dim())),
            Some(InitialSpec::Token(token)) if token == "stationary" => {
                Ok(stationary_distribution(p)?)
            }
            Some(InitialSpec::Token(token)) => Err(CliError::Config(format!(
                "unknown initial distribution token `{token}`; use \"stationary\" or weights"
            ))),
            Some(InitialSpec::Weights(w)) => {
                if w.len() != p.dim() {
                    return Err(CliError::Config(format!(
                        "`initial` has {} weights but there are {} states",
                        w.len(),
                        p.dim()
                    )));
                }
                ProbVector::new(w.clone()).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    pub fn horizon(&self) -> Result<usize> {
        let n = self
            .n
            .ok_or_else(|| CliError::Config("`n` is required".into()))?;
        Ok(n as usize)
    }
}
