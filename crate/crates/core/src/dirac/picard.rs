use num_complex::Complex64;

use super::linear::{check_data, duhamel_unchecked, free_unchecked};
use super::{enforce_smallness, rhs_eval, smallness, InitialData, ModelParams, Scheme, SolutionHistory, SolveMeta, SolverConfig};
use crate::error::{Error, Result};
use crate::lattice::{Direction, LightConeGrid, Slab, SpinorHistory};
use crate::maxwell::{a_free, assemble_potentials, densities, w_apply};
use crate::norms::y_norm_slab;

/// Light-cone potentials `A0 ± A1` for a given spinor history.
pub(crate) fn light_cone_potentials(
    h: &SpinorHistory,
    free_plus: &Slab<f64>,
    free_minus: &Slab<f64>,
    coupling: f64,
) -> (Slab<f64>, Slab<f64>) {
    if coupling == 0.0 {
        return (free_plus.clone(), free_minus.clone());
    }
    let (uu, vv) = densities(h);
    let wu = w_apply(&uu, h.grid.dx);
    let wv = w_apply(&vv, h.grid.dx);
    (
        free_plus.zip_map(&wv, |a, w| a - coupling * w),
        free_minus.zip_map(&wu, |a, w| a - coupling * w),
    )
}

fn sweep(
    cur: &SpinorHistory,
    data: &InitialData,
    params: &ModelParams,
    free_plus: &Slab<f64>,
    free_minus: &Slab<f64>,
) -> SpinorHistory {
    let grid = cur.grid;
    let (ap, am) = light_cone_potentials(cur, free_plus, free_minus, params.charge_coupling());
    let mut big_g = Slab::<Complex64>::for_grid(&grid);
    let mut big_f = Slab::<Complex64>::for_grid(&grid);
    for k in 0..grid.layers() {
        let (g, f) = rhs_eval(cur.u.layer(k), cur.v.layer(k), ap.layer(k), am.layer(k), params);
        big_g.layer_mut(k).copy_from_slice(&g);
        big_f.layer_mut(k).copy_from_slice(&f);
    }
    duhamel_unchecked(&data.f, &data.g, &big_g, &big_f, &grid)
}

/// Fixed point of the Duhamel map with potentials rebuilt from the previous
/// iterate, starting from the free solution. Stops once
/// `‖Δu‖_{Y+} + ‖Δv‖_{Y-} < picard_tol`.
pub fn picard_solve(
    data: &InitialData,
    params: &ModelParams,
    grid: &LightConeGrid,
    config: &SolverConfig,
) -> Result<SolutionHistory> {
    config.validate()?;
    let params = params.validated()?;
    data.check_grid(grid)?;
    check_data(&data.f, &data.g, grid, config.pad)?;
    let data = data.on_grid(*grid);
    let small = smallness(&data, &params, grid, config.epsilon0);
    enforce_smallness(&small, config.strict_smallness)?;

    let layers = grid.layers();
    let free_plus = a_free(&data.fields, layers, Direction::Plus);
    let free_minus = a_free(&data.fields, layers, Direction::Minus);
    let mut cur = free_unchecked(&data.f, &data.g, grid);
    let mut increments = Vec::new();
    for iteration in 1..=config.max_iter {
        let next = sweep(&cur, &data, &params, &free_plus, &free_minus);
        let du = next.u.zip_map(&cur.u, |a, b| a - b);
        let dv = next.v.zip_map(&cur.v, |a, b| a - b);
        let inc = y_norm_slab(&du, Direction::Plus, grid.dx) + y_norm_slab(&dv, Direction::Minus, grid.dx);
        log::debug!("picard sweep {iteration}: increment {inc:e}");
        increments.push(inc);
        cur = next;
        if !inc.is_finite() {
            break;
        }
        if inc < config.picard_tol {
            let em = assemble_potentials(&cur, &data.fields, params.charge_coupling()).em;
            return Ok(SolutionHistory {
                spinor: cur,
                em,
                meta: SolveMeta {
                    scheme: Scheme::Picard,
                    iterations: iteration,
                    increments,
                    restarts: 0,
                    segment_steps: vec![grid.n_t],
                    smallness_ok: small.ok,
                    smallness: vec![small],
                },
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: increments.len(),
        increment: increments.last().copied().unwrap_or(f64::NAN),
    })
}
