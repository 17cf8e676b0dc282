//! Run configuration. Every section and field is optional; omitted values
//! take the defaults below.

use std::path::Path;

use mdtgn::dirac::{GridSpec, ModelParams, SolverConfig};
use mdtgn::estimates::RandomFieldSpec;
use mdtgn::study::{DataSpec, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    /// Final time of a local run.
    pub t: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -3.0,
            x_max: 3.0,
            dx: 1.0 / 128.0,
            t: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Backward cones with apex at `T`, spread over the admissible range.
    pub n_cones: usize,
    /// Also run the two-run gauge check at `dx` and `dx / 2`.
    pub gauge: bool,
    pub min_order: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_cones: 10,
            gauge: true,
            min_order: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub dx: Vec<f64>,
    pub n_cones: usize,
    pub min_order: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            dx: vec![1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0],
            n_cones: 50,
            min_order: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatesConfig {
    pub n_trials: usize,
    pub fields: RandomFieldSpec,
}

impl Default for EstimatesConfig {
    fn default() -> Self {
        Self {
            n_trials: 1000,
            fields: RandomFieldSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub model: ModelParams,
    pub data: DataSpec,
    pub solver: SolverConfig,
    /// End time of `global`.
    pub tau: f64,
    /// Write `fields.csv` from `simulate` and `global`.
    pub dump_fields: bool,
    pub verify: VerifyConfig,
    pub convergence: ConvergenceConfig,
    pub estimates: EstimatesConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            model: ModelParams::mdtgn(0.0, 1.0, 1.0, 1.0).expect("default model is valid"),
            data: DataSpec::default(),
            solver: SolverConfig::default(),
            tau: 1.0,
            dump_fields: true,
            verify: VerifyConfig::default(),
            convergence: ConvergenceConfig::default(),
            estimates: EstimatesConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dx: Option<f64>,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub seed: Option<u64>,
    pub strict_smallness: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// `--dx` and `--T` apply to the run grid and the random-field grid;
    /// `--dx` also replaces the refinement list by `dx, dx/2, dx/4`.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dx) = o.dx {
            self.grid.dx = dx;
            self.estimates.fields.dx = dx;
            self.convergence.dx = vec![dx, dx / 2.0, dx / 4.0];
        }
        if let Some(t) = o.t {
            self.grid.t = t;
            self.estimates.fields.t = t;
        }
        if let Some(tau) = o.tau {
            self.tau = tau;
        }
        if let Some(seed) = o.seed {
            self.estimates.fields.seed = seed;
        }
        if o.strict_smallness {
            self.solver.strict_smallness = true;
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        self.model.validated()?;
        self.solver.validate()?;
        if !(self.tau > 0.0) {
            return Err(CliError::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.convergence.dx.len() < 2 {
            return Err(CliError::Config("convergence.dx needs at least two resolutions".into()));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            x_min: self.grid.x_min,
            x_max: self.grid.x_max,
            t: self.grid.t,
            params: self.model,
            data: self.data.clone(),
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            x_min: self.grid.x_min,
            x_max: self.grid.x_max,
            dx: self.grid.dx,
        }
    }
}
