use num_complex::Complex64;
use rayon::prelude::*;

use super::linear::check_data;
use super::{enforce_smallness, local_ode_step, smallness, InitialData, ModelParams, Scheme, SolutionHistory, SolveMeta, SolverConfig};
use crate::error::Result;
use crate::lattice::{Direction, LightConeGrid, SpinorHistory};
use crate::maxwell::{a_free, assemble_potentials, ConeAccumulator};

const MIN_CHUNK: usize = 256;

fn react(u: &mut [Complex64], v: &mut [Complex64], ap: &[f64], am: &[f64], params: &ModelParams, dt: f64) {
    u.par_iter_mut()
        .zip(v.par_iter_mut())
        .zip(ap.par_iter().zip(am.par_iter()))
        .with_min_len(MIN_CHUNK)
        .for_each(|((a, b), (&p, &m))| {
            let (na, nb) = local_ode_step(*a, *b, p, m, params, dt);
            *a = na;
            *b = nb;
        });
}

/// Strang splitting per layer: half reaction with `A(t)`, exact transport of
/// `u` to the right and `v` to the left, half reaction with `A(t+1)`. The
/// potentials at `t+1` come from the cone quadrature of the layers already
/// computed.
pub fn splitstep_solve(
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

    let (n, k, h) = (grid.n_x, grid.n_t, grid.dx);
    let layers = grid.layers();
    let coupling = params.charge_coupling();
    let free_plus = a_free(&data.fields, layers, Direction::Plus);
    let free_minus = a_free(&data.fields, layers, Direction::Minus);
    let mut acc_u = ConeAccumulator::<f64>::new(n, k, h);
    let mut acc_v = ConeAccumulator::<f64>::new(n, k, h);

    let mut hist = SpinorHistory::zeros(*grid);
    hist.u.layer_mut(0).copy_from_slice(&data.f.values);
    hist.v.layer_mut(0).copy_from_slice(&data.g.values);
    let mut ap = free_plus.layer(0).to_vec();
    let mut am = free_minus.layer(0).to_vec();
    let mut u = data.f.values.clone();
    let mut v = data.g.values.clone();

    for t in 0..k {
        let (ap_next, am_next) = if coupling != 0.0 {
            acc_u.push(&u.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
            acc_v.push(&v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
            let wu = acc_u.current();
            let wv = acc_v.current();
            (
                free_plus.layer(t + 1).iter().zip(&wv).map(|(a, w)| a - coupling * w).collect(),
                free_minus.layer(t + 1).iter().zip(&wu).map(|(a, w)| a - coupling * w).collect(),
            )
        } else {
            (free_plus.layer(t + 1).to_vec(), free_minus.layer(t + 1).to_vec())
        };

        react(&mut u, &mut v, &ap, &am, &params, 0.5 * grid.dt);
        u.copy_within(0..n - 1, 1);
        u[0] = Complex64::default();
        v.copy_within(1..n, 0);
        v[n - 1] = Complex64::default();
        react(&mut u, &mut v, &ap_next, &am_next, &params, 0.5 * grid.dt);

        hist.u.layer_mut(t + 1).copy_from_slice(&u);
        hist.v.layer_mut(t + 1).copy_from_slice(&v);
        ap = ap_next;
        am = am_next;
    }

    let em = assemble_potentials(&hist, &data.fields, coupling).em;
    Ok(SolutionHistory {
        spinor: hist,
        em,
        meta: SolveMeta {
            scheme: Scheme::Splitstep,
            iterations: 0,
            increments: Vec::new(),
            restarts: 0,
            segment_steps: vec![k],
            smallness_ok: small.ok,
            smallness: vec![small],
        },
    })
}
