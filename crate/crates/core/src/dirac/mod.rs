//! Spinor evolution: free transport, Duhamel integrals, the model forcing,
//! the Picard fixed-point solver, a Strang split-step integrator and the
//! global continuation loop.

mod global;
mod linear;
mod model;
mod picard;
mod splitstep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EmHistory, FieldData, GridFunction, LightConeGrid, SpinorHistory};
use crate::norms::d_norm_values;

pub use global::{continuation_steps, global_solve, reflect_data, reflect_params, GridSpec};
pub use linear::{duhamel_solve, free_solution};
pub use model::{local_ode_step, rhs_eval, rhs_point, Interaction, ModelParams};
pub use picard::picard_solve;
pub use splitstep::splitstep_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Picard,
    Splitstep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub epsilon0: f64,
    pub picard_tol: f64,
    pub max_iter: usize,
    pub scheme: Scheme,
    /// Extra margin, beyond `2T`, between the data support and the grid edge.
    pub pad: f64,
    /// Abort instead of warning when the smallness conditions fail.
    pub strict_smallness: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon0: 0.05,
            picard_tol: 1e-10,
            max_iter: 50,
            scheme: Scheme::Picard,
            pad: 0.0,
            strict_smallness: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon0 > 0.0) || !(self.picard_tol > 0.0) || self.max_iter < 1 || !(self.pad >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid solver config {self:?}")));
        }
        Ok(())
    }
}

/// Initial spinor and field data on one spatial lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub f: GridFunction<Complex64>,
    pub g: GridFunction<Complex64>,
    pub fields: FieldData,
}

impl InitialData {
    pub fn zeros(grid: LightConeGrid) -> Self {
        Self {
            f: GridFunction::zeros(grid),
            g: GridFunction::zeros(grid),
            fields: FieldData::zeros(grid),
        }
    }

    /// `‖f‖²_{L²} + ‖g‖²_{L²}`.
    pub fn charge(&self) -> f64 {
        self.f.l2_norm_sqr() + self.g.l2_norm_sqr()
    }

    pub fn on_grid(&self, grid: LightConeGrid) -> Self {
        Self {
            f: self.f.on_grid(grid),
            g: self.g.on_grid(grid),
            fields: self.fields.on_grid(grid),
        }
    }

    fn check_grid(&self, grid: &LightConeGrid) -> Result<()> {
        let n = grid.n_x;
        let lens = [
            self.f.values.len(),
            self.g.values.len(),
            self.fields.a0.values.len(),
            self.fields.a1.values.len(),
            self.fields.e0.values.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::InvalidArgument(format!("data lengths {lens:?} do not match {n} grid nodes")));
        }
        Ok(())
    }
}

/// Evaluated smallness conditions for one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessCheck {
    /// `‖f‖²_D + ‖g‖²_D`, or `√T(m + ‖f‖ + ‖g‖)` for the quadratic model.
    pub data_term: f64,
    /// `T(m + ‖a0‖ + ‖a1‖) + T²‖E0‖`; zero for the quadratic model.
    pub field_term: f64,
    pub epsilon0: f64,
    pub ok: bool,
}

pub fn smallness(data: &InitialData, params: &ModelParams, grid: &LightConeGrid, epsilon0: f64) -> SmallnessCheck {
    let t = grid.t_total();
    let (data_term, field_term) = if params.is_quadratic() {
        (t.sqrt() * (params.mass + data.f.l2_norm() + data.g.l2_norm()), 0.0)
    } else {
        let k = grid.n_t;
        let df = d_norm_values(&data.f.values, k, grid.dx);
        let dg = d_norm_values(&data.g.values, k, grid.dx);
        let fields = &data.fields;
        (
            df * df + dg * dg,
            t * (params.mass + fields.a0.sup_norm() + fields.a1.sup_norm()) + t * t * fields.e0.sup_norm(),
        )
    };
    SmallnessCheck {
        data_term,
        field_term,
        epsilon0,
        ok: data_term <= epsilon0 && field_term <= epsilon0,
    }
}

pub(crate) fn enforce_smallness(check: &SmallnessCheck, strict: bool) -> Result<()> {
    if check.ok {
        return Ok(());
    }
    let msg = format!(
        "data term {:e}, field term {:e}, epsilon0 {:e}",
        check.data_term, check.field_term, check.epsilon0
    );
    if strict {
        Err(Error::SmallnessViolated(msg))
    } else {
        log::warn!("smallness conditions fail: {msg}");
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveMeta {
    pub scheme: Scheme,
    /// Picard sweeps (summed over segments); zero for split-step.
    pub iterations: usize,
    /// `Y(Δu) + Y(Δv)` per sweep of the last Picard solve.
    pub increments: Vec<f64>,
    pub restarts: usize,
    pub segment_steps: Vec<usize>,
    /// False if any smallness check failed.
    pub smallness_ok: bool,
    pub smallness: Vec<SmallnessCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory {
    pub spinor: SpinorHistory,
    pub em: EmHistory,
    pub meta: SolveMeta,
}

impl SolutionHistory {
    pub fn grid(&self) -> LightConeGrid {
        self.spinor.grid
    }
}

/// Dispatches on the configured scheme.
pub fn solve(data: &InitialData, params: &ModelParams, grid: &LightConeGrid, config: &SolverConfig) -> Result<SolutionHistory> {
    match config.scheme {
        Scheme::Picard => picard_solve(data, params, grid, config),
        Scheme::Splitstep => splitstep_solve(data, params, grid, config),
    }
}
