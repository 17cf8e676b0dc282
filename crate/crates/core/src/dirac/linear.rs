use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{transport_shift, Direction, GridFunction, LightConeGrid, Slab, SpinorHistory};
use crate::maxwell::characteristic_integral;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn check_data(
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    grid: &LightConeGrid,
    pad: f64,
) -> Result<()> {
    if f.values.len() != grid.n_x || g.values.len() != grid.n_x {
        return Err(Error::InvalidArgument("initial data and grid differ in size".into()));
    }
    let (lo, hi) = grid.support_window(pad);
    f.check_support(lo, hi, "f")?;
    g.check_support(lo, hi, "g")
}

/// `u(x,t) = f(x - t)`, `v(x,t) = g(x + t)` by repeated exact shifts.
///
/// Pure transport only needs the data to stay on the grid, so the support
/// margin here is `T` rather than the `2T` required by the coupled solvers.
pub fn free_solution(f: &GridFunction<Complex64>, g: &GridFunction<Complex64>, grid: &LightConeGrid) -> Result<SpinorHistory> {
    check_data(f, g, grid, -grid.t_total())?;
    Ok(free_unchecked(f, g, grid))
}

pub(crate) fn free_unchecked(f: &GridFunction<Complex64>, g: &GridFunction<Complex64>, grid: &LightConeGrid) -> SpinorHistory {
    let mut h = SpinorHistory::zeros(*grid);
    let mut u = f.on_grid(*grid);
    let mut v = g.on_grid(*grid);
    for k in 0..grid.layers() {
        if k > 0 {
            u = transport_shift(&u, Direction::Plus);
            v = transport_shift(&v, Direction::Minus);
        }
        h.u.layer_mut(k).copy_from_slice(&u.values);
        h.v.layer_mut(k).copy_from_slice(&v.values);
    }
    h
}

/// Solution of `(∂t + ∂x)u = iG`, `(∂t - ∂x)v = iF` with data `(f, g)`:
/// `u(x,t) = f(x-t) + i∫_0^t G(x-t+s, s) ds` and the mirror formula for `v`.
pub fn duhamel_solve(
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    big_g: &Slab<Complex64>,
    big_f: &Slab<Complex64>,
    grid: &LightConeGrid,
) -> Result<SpinorHistory> {
    check_data(f, g, grid, 0.0)?;
    if big_g.n_layers != grid.layers() || big_f.n_layers != grid.layers() {
        return Err(Error::InvalidArgument("forcing and grid differ in layer count".into()));
    }
    Ok(duhamel_unchecked(f, g, big_g, big_f, grid))
}

pub(crate) fn duhamel_unchecked(
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    big_g: &Slab<Complex64>,
    big_f: &Slab<Complex64>,
    grid: &LightConeGrid,
) -> SpinorHistory {
    let mut h = free_unchecked(f, g, grid);
    let ig = characteristic_integral(big_g, Direction::Plus, grid.dx);
    let jf = characteristic_integral(big_f, Direction::Minus, grid.dx);
    for (u, s) in h.u.data.iter_mut().zip(&ig.data) {
        *u += I * s;
    }
    for (v, s) in h.v.data.iter_mut().zip(&jf.data) {
        *v += I * s;
    }
    h
}
