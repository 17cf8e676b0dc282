//! Gauge transformations `A -> A - ∂χ` with `χ` a free wave.
//!
//! With the Dirac equations written as `(∂t + ∂x)u = i(A0 + A1)λ u + …`, the
//! spinor phase that compensates `A -> A - ∂χ` is `e^{-iλχ}`, so that is
//! what [`gauge_transform`] applies.

use num_complex::Complex64;

use crate::dirac::SolutionHistory;
use crate::error::{Error, Result};
use crate::lattice::{read_clamped, GridFunction, LightConeGrid, Slab, SpinorHistory};
use crate::quad::cumulative_from;

/// A discrete free wave with its Cauchy data.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub chi: Slab<f64>,
    pub chi0: GridFunction<f64>,
    pub chi1: GridFunction<f64>,
}

fn check_flat_edges(f: &GridFunction<f64>, k: usize, name: &str) -> Result<()> {
    let n = f.values.len();
    let scale = f.sup_norm().max(1.0);
    let tol = 1e-12 * scale;
    let (lo, hi) = (f.values[0], f.values[n - 1]);
    let k = k.min(n);
    let bad = (0..k)
        .find(|&i| (f.values[i] - lo).abs() > tol)
        .or_else(|| (n - k..n).find(|&i| (f.values[i] - hi).abs() > tol));
    match bad {
        Some(i) => Err(Error::SupportViolation(format!(
            "{name} varies at x = {} within one light-cone width of the boundary",
            f.grid.x(i as isize)
        ))),
        None => Ok(()),
    }
}

/// `χ(x,t) = (χ0(x+t) + χ0(x-t))/2 + ∫_{x-t}^{x+t} χ1 / 2`, with `χ0` and
/// `χ1` extended by their edge values. Both must be constant within `T` of
/// the boundary.
pub fn solve_wave(chi0: &GridFunction<f64>, chi1: &GridFunction<f64>, grid: &LightConeGrid) -> Result<GaugeField> {
    let k = grid.n_t;
    let chi0 = chi0.on_grid(*grid);
    let chi1 = chi1.on_grid(*grid);
    check_flat_edges(&chi0, k + 1, "chi0")?;
    check_flat_edges(&chi1, k + 1, "chi1")?;
    let n = grid.n_x;
    let ext: Vec<f64> = (0..n + 2 * k)
        .map(|j| read_clamped(&chi1.values, j as isize - k as isize))
        .collect();
    let cum = cumulative_from(&ext, 0, grid.dx);
    let chi = Slab::from_fn(n, grid.layers(), |x, t| {
        let (p, m) = (x as isize + t as isize, x as isize - t as isize);
        0.5 * (chi0.at_clamped(p) + chi0.at_clamped(m)) + 0.5 * (cum[x + k + t] - cum[x + k - t])
    });
    Ok(GaugeField { chi, chi0, chi1 })
}

/// Cauchy data of the gauge function taking `(a0, a1)` to `(a0', a1')`:
/// `χ0 = ∫_0^x (a1 - a1')`, `χ1 = a0 - a0'`.
pub fn gauge_targets(
    a0: &GridFunction<f64>,
    a1: &GridFunction<f64>,
    a0_target: &GridFunction<f64>,
    a1_target: &GridFunction<f64>,
) -> (GridFunction<f64>, GridFunction<f64>) {
    let grid = a0.grid;
    let diff: Vec<f64> = a1.values.iter().zip(&a1_target.values).map(|(a, b)| a - b).collect();
    let chi0 = cumulative_from(&diff, grid.nearest_index(0.0), grid.dx);
    let chi1 = a0.values.iter().zip(&a0_target.values).map(|(a, b)| a - b).collect();
    (GridFunction { grid, values: chi0 }, GridFunction { grid, values: chi1 })
}

/// Second-order difference of three-point stencils: centered inside,
/// one-sided at the ends.
fn derivative(len: usize, h: f64, at: impl Fn(usize) -> f64) -> Vec<f64> {
    if len < 3 {
        return vec![0.0; len];
    }
    (0..len)
        .map(|i| match i {
            0 => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
            i if i + 1 == len => (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * h),
            i => (at(i + 1) - at(i - 1)) / (2.0 * h),
        })
        .collect()
}

/// `∂_t χ` and `∂_x χ` on the slab.
pub fn gauge_gradient(gf: &GaugeField, h: f64) -> (Slab<f64>, Slab<f64>) {
    let (n, layers) = (gf.chi.n_x, gf.chi.n_layers);
    let mut dt = Slab::zeros(n, layers);
    let mut dx = Slab::zeros(n, layers);
    for x in 0..n {
        for (t, d) in derivative(layers, h, |t| gf.chi.at(x, t)).into_iter().enumerate() {
            dt.set(x, t, d);
        }
    }
    for t in 0..layers {
        dx.layer_mut(t).copy_from_slice(&derivative(n, h, |x| gf.chi.at(x, t)));
    }
    (dt, dx)
}

/// `(u, v, A0, A1) -> (e^{-iλχ}u, e^{-iλχ}v, A0 - ∂_t χ, A1 - ∂_x χ)`; `E`
/// and `E0` are unchanged and the stored potential data become the
/// transformed initial layer.
pub fn gauge_transform(sol: &SolutionHistory, gf: &GaugeField) -> SolutionHistory {
    let lam = sol.em.coupling;
    let h = sol.grid().dx;
    let phase = gf.chi.map(|c: f64| Complex64::from_polar(1.0, -lam * c));
    let (dt, dx) = gauge_gradient(gf, h);
    let mut out = sol.clone();
    out.spinor = SpinorHistory {
        grid: sol.spinor.grid,
        u: sol.spinor.u.zip_map(&phase, |a, p| a * p),
        v: sol.spinor.v.zip_map(&phase, |a, p| a * p),
    };
    out.em.a0 = sol.em.a0.zip_map(&dt, |a, d| a - d);
    out.em.a1 = sol.em.a1.zip_map(&dx, |a, d| a - d);
    out.em.data.a0.values = out.em.a0.layer(0).to_vec();
    out.em.data.a1.values = out.em.a1.layer(0).to_vec();
    out
}

/// Data phase for the second run of a two-run comparison: `e^{-iλχ0}`.
pub fn gauge_phase(f: &GridFunction<Complex64>, chi0: &GridFunction<f64>, coupling: f64) -> GridFunction<Complex64> {
    GridFunction {
        grid: f.grid,
        values: f
            .values
            .iter()
            .zip(&chi0.values)
            .map(|(z, c)| z * Complex64::from_polar(1.0, -coupling * c))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{solve, InitialData, ModelParams, Scheme, SolverConfig};
    use crate::lattice::{build_grid, sample_function, sample_real, FunctionSpec};
    use crate::maxwell::gauss_e0;

    fn grid() -> LightConeGrid {
        build_grid(-3.0, 3.0, 1.0 / 128.0, 0.5).unwrap()
    }

    fn bump(g: &LightConeGrid, c: f64, w: f64, a: f64) -> GridFunction<f64> {
        sample_real(g, &FunctionSpec::gaussian(c, w, a, 0.0)).unwrap()
    }

    #[test]
    fn wave_examples() {
        let g = grid();
        let z = GridFunction::zeros(g);
        let w = solve_wave(&z, &z, &g).unwrap();
        assert_eq!(w.chi.sup_norm(), 0.0);

        let c0 = bump(&g, 0.0, 0.2, 1.0);
        let w = solve_wave(&c0, &z, &g).unwrap();
        for t in [0, 10, 64] {
            for x in 100..600 {
                let want = 0.5 * (c0.at_clamped((x + t) as isize) + c0.at_clamped(x as isize - t as isize));
                assert_eq!(w.chi.at(x, t), want);
            }
        }

        let c1 = GridFunction::from_fn(g, |_| 0.7);
        let w = solve_wave(&z, &c1, &g).unwrap();
        for t in 0..g.layers() {
            for x in 0..g.n_x {
                assert!((w.chi.at(x, t) - 0.7 * g.t(t)).abs() < 1e-13);
            }
        }

        let edge = bump(&g, 2.9, 0.1, 1.0);
        assert!(matches!(solve_wave(&edge, &z, &g), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn target_examples() {
        let g = grid();
        let a0 = bump(&g, 0.1, 0.3, 0.4);
        let a1 = bump(&g, -0.2, 0.2, 0.3);
        let (c0, c1) = gauge_targets(&a0, &a1, &a0, &a1);
        assert_eq!(c0.sup_norm() + c1.sup_norm(), 0.0);

        let ind = sample_real(&g, &FunctionSpec::Indicator { a: 0.0, b: 1.0, value: 1.0 }).unwrap();
        let z = GridFunction::zeros(g);
        let (c0, _) = gauge_targets(&z, &ind, &z, &z);
        for i in 0..g.n_x {
            let x = g.x(i as isize);
            let ramp = x.clamp(0.0, 1.0);
            assert!((c0.values[i] - ramp).abs() <= 0.5 * g.dx + 1e-12, "x = {x}");
        }

        let shifted = GridFunction::from_fn(g, |x| a0.values[g.nearest_index(x)] + 0.25);
        let (_, c1) = gauge_targets(&shifted, &a1, &a0, &a1);
        assert!(c1.values.iter().all(|c| (c - 0.25).abs() < 1e-15));
    }

    fn gauge_run() -> (SolutionHistory, InitialData, ModelParams, SolverConfig) {
        let g = grid();
        let mut d = InitialData::zeros(g);
        d.f = sample_function(&g, &FunctionSpec::gaussian(-0.3, 0.15, 0.6, 0.2)).unwrap();
        d.g = sample_function(&g, &FunctionSpec::gaussian(0.3, 0.15, 0.6, -0.3)).unwrap();
        d.fields.a0 = bump(&g, 0.1, 0.3, 0.5);
        d.fields.a1 = bump(&g, -0.2, 0.25, 0.4);
        d.fields.e0 = gauss_e0(&d.f, &d.g, 0.0);
        let p = ModelParams::mdtgn(0.3, 1.0, 1.0, 0.5).unwrap();
        let config = SolverConfig {
            scheme: Scheme::Splitstep,
            ..SolverConfig::default()
        };
        (solve(&d, &p, &g, &config).unwrap(), d, p, config)
    }

    #[test]
    fn transform_examples() {
        let (sol, _, _, _) = gauge_run();
        let g = sol.grid();
        let z = GridFunction::zeros(g);
        let id = gauge_transform(&sol, &solve_wave(&z, &z, &g).unwrap());
        assert_eq!(id.spinor, sol.spinor);
        assert_eq!(id.em.a0, sol.em.a0);

        let c = GridFunction::from_fn(g, |_| 0.9);
        let t = gauge_transform(&sol, &solve_wave(&c, &z, &g).unwrap());
        let ph = Complex64::from_polar(1.0, -0.9);
        assert!(t.spinor.u.data.iter().zip(&sol.spinor.u.data).all(|(a, b)| (a - b * ph).norm() < 1e-15));
        assert!(t.em.a0.data.iter().zip(&sol.em.a0.data).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(t.spinor.u.data.iter().zip(&sol.spinor.u.data).all(|(a, b)| a.norm() == b.norm() || (a.norm() - b.norm()).abs() < 1e-15));
    }

    #[test]
    fn two_runs_agree_after_transform() {
        let (sol, d, p, config) = gauge_run();
        let g = sol.grid();
        let z = GridFunction::zeros(g);
        let (c0, c1) = gauge_targets(&d.fields.a0, &d.fields.a1, &z, &z);
        let gf = solve_wave(&c0, &c1, &g).unwrap();
        let moved = gauge_transform(&sol, &gf);

        let run2 = |sign: f64| {
            let mut d2 = d.clone();
            d2.fields.a0 = z.clone();
            d2.fields.a1 = z.clone();
            d2.f = gauge_phase(&d.f, &c0, sign);
            d2.g = gauge_phase(&d.g, &c0, sign);
            solve(&d2, &p, &g, &config).unwrap()
        };
        let diff = |a: &SolutionHistory, b: &SolutionHistory| {
            a.spinor
                .u
                .data
                .iter()
                .zip(&b.spinor.u.data)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        };
        let direct = run2(1.0);
        let err = diff(&moved, &direct);
        assert!(err < 0.02, "gauge discrepancy {err}");
        let a0_err = moved.em.a0.zip_map(&direct.em.a0, |a, b| a - b).sup_norm();
        assert!(a0_err < 0.02, "A0 discrepancy {a0_err}");
        let e_err = moved.em.e.zip_map(&direct.em.e, |a, b| a - b).sup_norm();
        assert!(e_err < 0.02, "E discrepancy {e_err}");

        // The opposite phase convention does not match.
        let wrong = run2(-1.0);
        let mut flipped = moved.clone();
        flipped.spinor.u = sol.spinor.u.zip_map(&gf.chi, |a, c| a * Complex64::from_polar(1.0, c));
        assert!(diff(&flipped, &wrong) > 10.0 * err);
    }
}
