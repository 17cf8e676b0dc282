use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{solve, InitialData, Interaction, ModelParams, SolutionHistory, SolveMeta, SolverConfig};
use crate::error::{Error, Result};
use crate::lattice::{EmHistory, FieldData, GridFunction, LightConeGrid, Slab, SpinorHistory};
use crate::maxwell::gauss_e0_coupled;
use crate::norms::d_norm_values;

/// Spatial lattice for a run whose length is set separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

/// Largest step count `K` such that `T = K dx` satisfies both
/// `(‖f‖²_D + ‖g‖²_D) exp(2m e^{4M} τ) <= ε0` and
/// `T(m + 2‖a0‖ + 2‖a1‖ + 2τ‖E0‖ + τM) <= ε0 / 2`.
pub fn continuation_steps(data: &InitialData, params: &ModelParams, tau: f64, grid: &LightConeGrid, epsilon0: f64) -> Result<usize> {
    let m_charge = data.charge();
    let m = params.mass;
    let growth = (2.0 * m * (4.0 * m_charge).exp() * tau).exp();
    let fields = &data.fields;
    let rate = m
        + 2.0 * fields.a0.sup_norm()
        + 2.0 * fields.a1.sup_norm()
        + 2.0 * tau * fields.e0.sup_norm()
        + tau * m_charge;
    let mut best = 0;
    for k in 1..=grid.n_t {
        let t = k as f64 * grid.dx;
        let df = d_norm_values(&data.f.values, k, grid.dx);
        let dg = d_norm_values(&data.g.values, k, grid.dx);
        if (df * df + dg * dg) * growth > epsilon0 || t * rate > 0.5 * epsilon0 {
            break;
        }
        best = k;
    }
    if best == 0 {
        return Err(Error::StepCollapse(format!(
            "continuation needs a step below dx = {} (growth factor {growth:e}, field rate {rate:e})",
            grid.dx
        )));
    }
    Ok(best)
}

fn check_gauss_law(data: &InitialData, coupling: f64) -> Result<()> {
    let gauss = gauss_e0_coupled(&data.f, &data.g, 0.0, coupling);
    let (lo, hi) = data
        .fields
        .e0
        .values
        .iter()
        .zip(&gauss.values)
        .map(|(e, g)| e - g)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let tol = 1e-9 * (1.0 + data.charge());
    if hi - lo > tol {
        return Err(Error::GaussLawViolated(format!(
            "E0 differs from the integrated charge by a non-constant amount (spread {:e})",
            hi - lo
        )));
    }
    Ok(())
}

/// Solution on `[0, τ]` by repeated local solves on segments of equal length,
/// each restarted from the final layer of the previous one.
pub fn global_solve(
    data: &InitialData,
    params: &ModelParams,
    tau: f64,
    spec: &GridSpec,
    config: &SolverConfig,
) -> Result<SolutionHistory> {
    config.validate()?;
    let params = params.validated()?;
    if params.is_quadratic() {
        return Err(Error::InvalidArgument(
            "continuation is only available for the Maxwell–Dirac–Thirring–Gross–Neveu model".into(),
        ));
    }
    let full = LightConeGrid::new(spec.x_min, spec.x_max, spec.dx, tau)?;
    data.check_grid(&full)?;
    let coupling = params.charge_coupling();
    check_gauss_law(data, coupling)?;
    let k = continuation_steps(data, &params, tau, &full, config.epsilon0)?;

    let (n, total) = (full.n_x, full.n_t);
    let mut spinor = SpinorHistory::zeros(full);
    let mut a0 = Slab::<f64>::for_grid(&full);
    let mut a1 = Slab::<f64>::for_grid(&full);
    let mut e = Slab::<f64>::for_grid(&full);

    let mut meta = SolveMeta {
        scheme: config.scheme,
        iterations: 0,
        increments: Vec::new(),
        restarts: 0,
        segment_steps: Vec::new(),
        smallness_ok: true,
        smallness: Vec::new(),
    };
    let mut seg_data = data.clone();
    let mut t0 = 0;
    while t0 < total {
        let ks = k.min(total - t0);
        let sg = full.with_layers(ks);
        let sol = solve(&seg_data.on_grid(sg), &params, &sg, config)?;
        let first = if t0 == 0 { 0 } else { 1 };
        for j in first..=ks {
            spinor.u.layer_mut(t0 + j).copy_from_slice(sol.spinor.u.layer(j));
            spinor.v.layer_mut(t0 + j).copy_from_slice(sol.spinor.v.layer(j));
            a0.layer_mut(t0 + j).copy_from_slice(sol.em.a0.layer(j));
            a1.layer_mut(t0 + j).copy_from_slice(sol.em.a1.layer(j));
            e.layer_mut(t0 + j).copy_from_slice(sol.em.e.layer(j));
        }
        meta.iterations += sol.meta.iterations;
        meta.increments = sol.meta.increments;
        meta.segment_steps.push(ks);
        meta.smallness_ok &= sol.meta.smallness_ok;
        meta.smallness.extend(sol.meta.smallness);

        let layer_fn = |vals: &[f64]| GridFunction { grid: sg, values: vals.to_vec() };
        seg_data = InitialData {
            f: GridFunction { grid: sg, values: sol.spinor.u.layer(ks).to_vec() },
            g: GridFunction { grid: sg, values: sol.spinor.v.layer(ks).to_vec() },
            fields: FieldData {
                a0: layer_fn(sol.em.a0.layer(ks)),
                a1: layer_fn(sol.em.a1.layer(ks)),
                e0: layer_fn(sol.em.e.layer(ks)),
            },
        };
        t0 += ks;
        log::debug!("continuation reached layer {t0} of {total}");
    }
    meta.restarts = meta.segment_steps.len().saturating_sub(1);
    debug_assert_eq!(spinor.u.n_x, n);

    Ok(SolutionHistory {
        spinor,
        em: EmHistory {
            grid: full,
            coupling,
            data: data.fields.on_grid(full),
            a0,
            a1,
            e,
        },
        meta,
    })
}

fn mirrored_grid(g: &LightConeGrid) -> LightConeGrid {
    LightConeGrid {
        x_min: -g.x_max,
        x_max: -g.x_min,
        ..*g
    }
}

/// Data whose forward evolution is the original system run backward in time
/// under `(x, t) -> (-x, -t)`: spinors are mirrored and conjugated, `a0, a1`
/// mirrored and `E0` mirrored with a sign flip.
pub fn reflect_data(data: &InitialData) -> InitialData {
    let grid = mirrored_grid(&data.f.grid);
    let spin = |f: &GridFunction<Complex64>| GridFunction {
        grid,
        values: f.values.iter().rev().map(|z| z.conj()).collect(),
    };
    let real = |f: &GridFunction<f64>, sign: f64| GridFunction {
        grid,
        values: f.values.iter().rev().map(|&x| sign * x).collect(),
    };
    InitialData {
        f: spin(&data.f),
        g: spin(&data.g),
        fields: FieldData {
            a0: real(&data.fields.a0, 1.0),
            a1: real(&data.fields.a1, 1.0),
            e0: real(&data.fields.e0, -1.0),
        },
    }
}

/// Couplings of the reflected system: unchanged for the cubic model, `c -> -conj(c)`
/// for the quadratic one.
pub fn reflect_params(params: &ModelParams) -> ModelParams {
    match params.interaction {
        Interaction::Mdtgn { .. } => *params,
        Interaction::Quadratic { c } => ModelParams {
            mass: params.mass,
            interaction: Interaction::Quadratic { c: c.map(|z| -z.conj()) },
        },
    }
}

