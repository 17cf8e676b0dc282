//! Grid-refinement studies: a scenario is sampled at several `dx`, a scalar
//! error metric is measured on each run and the observed order is the
//! least-squares slope of `log(err)` against `log(dx)`.

use serde::{Deserialize, Serialize};

use crate::conservation::{cone_charge_report, ConeRegion};
use crate::dirac::{picard_solve, solve, splitstep_solve, InitialData, ModelParams, SolutionHistory, SolverConfig};
use crate::error::{Error, Result};
use crate::gauge::{gauge_phase, gauge_targets, gauge_transform, solve_wave};
use crate::lattice::{build_grid, sample_function, sample_real, FunctionSpec, GridFunction, LightConeGrid};
use crate::maxwell::{gauss_e0_coupled, lorenz_residual};

/// Least-squares slope of `log(err)` against `log(dx)`.
pub fn fitted_order(dx: &[f64], err: &[f64]) -> Result<f64> {
    if dx.len() != err.len() || dx.len() < 2 {
        return Err(Error::InvalidArgument("need at least two (dx, err) pairs of equal length".into()));
    }
    if dx.iter().chain(err).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("order fit needs positive values, got dx = {dx:?}, err = {err:?}")));
    }
    let xs: Vec<f64> = dx.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// How `E0` is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum E0Spec {
    /// `E0 = κ + λ1 ∫_0^x ρ`, consistent with the Gauss law.
    Gauss { kappa: f64 },
    Given { spec: FunctionSpec },
}

impl Default for E0Spec {
    fn default() -> Self {
        E0Spec::Gauss { kappa: 0.0 }
    }
}

/// Initial data as function descriptions, so it can be sampled on any grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub a0: FunctionSpec,
    pub a1: FunctionSpec,
    pub e0: E0Spec,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            f: FunctionSpec::Zero,
            g: FunctionSpec::Zero,
            a0: FunctionSpec::Zero,
            a1: FunctionSpec::Zero,
            e0: E0Spec::default(),
        }
    }
}

impl DataSpec {
    pub fn sample(&self, grid: &LightConeGrid, coupling: f64) -> Result<InitialData> {
        let f = sample_function(grid, &self.f)?;
        let g = sample_function(grid, &self.g)?;
        let e0 = match &self.e0 {
            E0Spec::Gauss { kappa } => gauss_e0_coupled(&f, &g, *kappa, coupling),
            E0Spec::Given { spec } => sample_real(grid, spec)?,
        };
        Ok(InitialData {
            fields: crate::lattice::FieldData {
                a0: sample_real(grid, &self.a0)?,
                a1: sample_real(grid, &self.a1)?,
                e0,
            },
            f,
            g,
        })
    }
}

/// A problem that can be rebuilt at any resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub x_min: f64,
    pub x_max: f64,
    pub t: f64,
    pub params: ModelParams,
    pub data: DataSpec,
}

impl Scenario {
    pub fn build(&self, dx: f64) -> Result<(LightConeGrid, InitialData)> {
        let grid = build_grid(self.x_min, self.x_max, dx, self.t)?;
        let data = self.data.sample(&grid, self.params.charge_coupling())?;
        Ok((grid, data))
    }

    pub fn solve(&self, dx: f64, config: &SolverConfig) -> Result<(InitialData, SolutionHistory)> {
        let (grid, data) = self.build(dx)?;
        let sol = solve(&data, &self.params, &grid, config)?;
        Ok((data, sol))
    }
}

/// Sup over a family of backward cones with apex time `T` of the
/// four-term identity residual (at `t0/4, t0/2, 3t0/4, t0`) and of the flux
/// identity residual. Apexes are spread evenly over the admissible range and
/// rounded to multiples of `align`, so every resolution sees the same cones.
pub fn cone_residuals(sol: &SolutionHistory, n_cones: usize, align: f64) -> Result<(f64, f64)> {
    let h = &sol.spinor;
    let grid = h.grid;
    let t0 = grid.t_total();
    let (lo, hi) = (grid.x_min + t0, grid.x_max - t0);
    let snap = |x: f64| (x / align).round() * align;
    let (lo, hi) = (snap(lo + align), snap(hi - align));
    let mut worst = (0.0f64, 0.0f64);
    for c in 0..n_cones {
        let x0 = snap(lo + (hi - lo) * c as f64 / (n_cones.max(2) - 1) as f64);
        let cone = ConeRegion::at(h, x0, t0)?;
        for quarter in 1..=4 {
            let t = cone.t0 * quarter / 4;
            for r in cone_charge_report(h, cone, t)? {
                let res = r.lhs.abs();
                match r.name.as_str() {
                    "LocalCharge" => worst.0 = worst.0.max(res),
                    "LocalCharge2" => worst.1 = worst.1.max(res),
                    _ => {}
                }
            }
        }
    }
    Ok(worst)
}

/// Sup-norm of the Lorenz residual `∂t A0 - ∂x A1` (closed form).
pub fn lorenz_sup(sol: &SolutionHistory) -> f64 {
    lorenz_residual(&sol.spinor, &sol.em.data.e0, sol.em.coupling).sup_norm()
}

/// Sup of `|u_P - u_S| + |v_P - v_S|` between the Picard and split-step runs,
/// with the Picard increment history.
pub fn cross_scheme(scenario: &Scenario, dx: f64, config: &SolverConfig) -> Result<(f64, Vec<f64>)> {
    let (grid, data) = scenario.build(dx)?;
    let p = picard_solve(&data, &scenario.params, &grid, config)?;
    let s = splitstep_solve(&data, &scenario.params, &grid, config)?;
    let du = p.spinor.u.zip_map(&s.spinor.u, |a, b| a - b).sup_norm();
    let dv = p.spinor.v.zip_map(&s.spinor.v, |a, b| a - b).sup_norm();
    Ok((du + dv, p.meta.increments))
}

/// Discrepancies of the two-run gauge check: transform run 1 to zero initial
/// potentials and compare with run 2 solved directly from zero potentials
/// and phased data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeDiscrepancy {
    /// `sup ||u1'| - |u2||`.
    pub u_modulus: f64,
    pub v_modulus: f64,
    /// `sup |u1' - u2|`, including phases.
    pub u_complex: f64,
    pub e_field: f64,
}

pub fn gauge_discrepancy(scenario: &Scenario, dx: f64, config: &SolverConfig) -> Result<GaugeDiscrepancy> {
    let (grid, data) = scenario.build(dx)?;
    let run1 = solve(&data, &scenario.params, &grid, config)?;
    let zero = GridFunction::zeros(grid);
    let (chi0, chi1) = gauge_targets(&data.fields.a0, &data.fields.a1, &zero, &zero);
    let gf = solve_wave(&chi0, &chi1, &grid)?;
    let moved = gauge_transform(&run1, &gf);
    let lam = scenario.params.charge_coupling();
    let mut d2 = data.clone();
    d2.fields.a0 = zero.clone();
    d2.fields.a1 = zero;
    d2.f = gauge_phase(&data.f, &chi0, lam);
    d2.g = gauge_phase(&data.g, &chi0, lam);
    let run2 = solve(&d2, &scenario.params, &grid, config)?;
    let modulus = |a: &crate::lattice::Slab<crate::Complex64>, b: &crate::lattice::Slab<crate::Complex64>| {
        a.data.iter().zip(&b.data).map(|(x, y)| (x.norm() - y.norm()).abs()).fold(0.0, f64::max)
    };
    Ok(GaugeDiscrepancy {
        u_modulus: modulus(&moved.spinor.u, &run2.spinor.u),
        v_modulus: modulus(&moved.spinor.v, &run2.spinor.v),
        u_complex: moved.spinor.u.zip_map(&run2.spinor.u, |a, b| a - b).sup_norm(),
        e_field: moved.em.e.zip_map(&run2.em.e, |a, b| a - b).sup_norm(),
    })
}

/// One fitted convergence order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub name: String,
    pub dx: Vec<f64>,
    pub values: Vec<f64>,
    pub order: f64,
}

impl OrderFit {
    pub fn new(name: impl Into<String>, dx: &[f64], values: Vec<f64>) -> Result<Self> {
        let order = fitted_order(dx, &values)?;
        Ok(Self {
            name: name.into(),
            dx: dx.to_vec(),
            values,
            order,
        })
    }

    pub fn report(&self, min_order: f64) -> crate::CheckReport {
        crate::CheckReport::inequality(
            format!("order {}", self.name),
            min_order,
            self.order,
            0.0,
            0.0,
            format!("dx = {:?}, values = {:?}", self.dx, self.values),
        )
    }
}

/// Cone, flux and Lorenz residual orders for one scenario.
pub fn residual_study(scenario: &Scenario, dxs: &[f64], config: &SolverConfig, n_cones: usize) -> Result<Vec<OrderFit>> {
    let align = dxs.iter().copied().fold(0.0, f64::max);
    let mut cone = Vec::new();
    let mut flux = Vec::new();
    let mut lorenz = Vec::new();
    for &dx in dxs {
        let (_, sol) = scenario.solve(dx, config)?;
        let (c, f) = cone_residuals(&sol, n_cones, align)?;
        cone.push(c);
        flux.push(f);
        lorenz.push(lorenz_sup(&sol));
    }
    Ok(vec![
        OrderFit::new("LocalCharge", dxs, cone)?,
        OrderFit::new("LocalCharge2", dxs, flux)?,
        OrderFit::new("Lorenz", dxs, lorenz)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_fit_examples() {
        let dx = [0.1, 0.05, 0.025];
        let e1: Vec<f64> = dx.iter().map(|d| 3.0 * d).collect();
        let e2: Vec<f64> = dx.iter().map(|d| 0.5 * d * d).collect();
        assert!((fitted_order(&dx, &e1).unwrap() - 1.0).abs() < 1e-12);
        assert!((fitted_order(&dx, &e2).unwrap() - 2.0).abs() < 1e-12);
        assert!(fitted_order(&dx, &[1.0, 0.0, 1.0]).is_err());
        assert!(fitted_order(&[0.1], &[1.0]).is_err());
    }

    #[test]
    fn scenario_roundtrips_through_json() {
        let s = Scenario {
            x_min: -3.0,
            x_max: 3.0,
            t: 0.5,
            params: ModelParams::mdtgn(0.1, 1.0, 1.0, 1.0).unwrap(),
            data: DataSpec {
                f: FunctionSpec::gaussian(-0.3, 0.15, 0.5, 0.0),
                ..DataSpec::default()
            },
        };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Scenario>(&text).unwrap(), s);
    }
}
