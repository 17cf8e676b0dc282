//! Electromagnetic potentials and the electric field from the charge
//! densities, via d'Alembert's formula.
//!
//! The cone operator
//! `W F(x, t) = ∫_0^t ∫_{x-(t-s)}^{x+t-s} F(y, s) dy ds`
//! is evaluated with the trapezoid in both variables. On the light-cone
//! lattice the slices obey the discrete wave recursion
//! `Q(x, t+1) = Q(x-1, t) + Q(x+1, t) - Q(x, t-1) + c_t (F(x-1,t)/2 + F(x,t) + F(x+1,t)/2)`
//! with `c_0 = 1/2`, `c_t = 1` otherwise and `W = h² Q`, which is the double
//! trapezoid exactly (up to rounding) in `O(1)` work per node. Layer `t + 1`
//! only needs `F` at layer `t`, so the split-step integrator can advance the
//! potentials explicitly.

use num_complex::Complex64;

use crate::lattice::{read_clamped, Direction, EmHistory, FieldData, Field, GridFunction, Slab, SpinorHistory};
use crate::quad::cumulative_from;

/// Potentials together with the light-cone combinations `A0 ± A1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialAssembly {
    pub em: EmHistory,
    pub a_plus: Slab<f64>,
    pub a_minus: Slab<f64>,
}

/// Incremental evaluation of `W` one layer at a time.
#[derive(Debug, Clone)]
pub struct ConeAccumulator<T> {
    n: usize,
    pad: usize,
    step: usize,
    h2: f64,
    prev: Vec<T>,
    cur: Vec<T>,
}

impl<T: Field> ConeAccumulator<T> {
    /// `max_steps` bounds how many layers will be pushed; it sizes the
    /// zero-padded working range so that no truncation reaches the grid.
    pub fn new(n: usize, max_steps: usize, h: f64) -> Self {
        let pad = max_steps + 1;
        Self {
            n,
            pad,
            step: 0,
            h2: h * h,
            prev: vec![T::default(); n + 2 * pad],
            cur: vec![T::default(); n + 2 * pad],
        }
    }

    /// Current layer index `t` (number of layers pushed).
    pub fn step(&self) -> usize {
        self.step
    }

    /// `W F` on the grid at the current layer.
    pub fn current(&self) -> Vec<T> {
        self.cur[self.pad..self.pad + self.n]
            .iter()
            .map(|&q| q * self.h2)
            .collect()
    }

    /// Feeds `F(·, t)` (grid values, zero outside) and advances to `t + 1`.
    pub fn push(&mut self, layer: &[T]) {
        assert_eq!(layer.len(), self.n);
        assert!(self.step < self.pad, "cone accumulator pushed past its capacity");
        let c = if self.step == 0 { 0.5 } else { 1.0 };
        let len = self.cur.len();
        let zero = T::default();
        let f_at = |j: isize| -> T {
            let i = j - self.pad as isize;
            if i >= 0 && (i as usize) < self.n {
                layer[i as usize]
            } else {
                zero
            }
        };
        let mut next = vec![zero; len];
        for (j, out) in next.iter_mut().enumerate() {
            let ji = j as isize;
            let left = if j > 0 { self.cur[j - 1] } else { zero };
            let right = if j + 1 < len { self.cur[j + 1] } else { zero };
            let s1 = (f_at(ji - 1) + f_at(ji + 1)) * 0.5 + f_at(ji);
            *out = left + right - self.prev[j] + s1 * c;
        }
        self.prev = std::mem::replace(&mut self.cur, next);
        self.step += 1;
    }
}

/// `W F` at every node and layer of a slab.
pub fn w_apply<T: Field>(field: &Slab<T>, h: f64) -> Slab<T> {
    let k = field.n_layers.saturating_sub(1);
    let mut acc = ConeAccumulator::<T>::new(field.n_x, k, h);
    let mut out = Slab::zeros(field.n_x, field.n_layers);
    for t in 0..k {
        acc.push(field.layer(t));
        out.layer_mut(t + 1).copy_from_slice(&acc.current());
    }
    out
}

/// Integral of a slab field along the characteristic ending at each node:
/// `Plus` gives `∫_0^t F(x - t + s, s) ds`, `Minus` gives `∫_0^t F(x + t - s, s) ds`.
/// The field is zero outside the grid.
pub fn characteristic_integral<T: Field>(field: &Slab<T>, dir: Direction, h: f64) -> Slab<T> {
    let n = field.n_x;
    let mut out = Slab::zeros(n, field.n_layers);
    for t in 0..field.n_layers.saturating_sub(1) {
        let (prev_i, prev_f, next_f) = (out.layer(t).to_vec(), field.layer(t), field.layer(t + 1));
        let dst = out.layer_mut(t + 1);
        for x in 0..n {
            let src = match dir {
                Direction::Plus => x.checked_sub(1),
                Direction::Minus => (x + 1 < n).then_some(x + 1),
            };
            let (i0, f0) = match src {
                Some(s) => (prev_i[s], prev_f[s]),
                None => (T::default(), T::default()),
            };
            dst[x] = i0 + (f0 + next_f[x]) * (0.5 * h);
        }
    }
    out
}

/// Trapezoid of `E0` over `[x - t, x + t]` for every node and layer, with
/// edge-value extension of `E0`.
fn e0_window_integral(e0: &GridFunction<f64>, layers: usize) -> Slab<f64> {
    let n = e0.values.len();
    let k = layers.saturating_sub(1);
    let ext: Vec<f64> = (0..n + 2 * k)
        .map(|j| read_clamped(&e0.values, j as isize - k as isize))
        .collect();
    let cum = cumulative_from(&ext, 0, e0.grid.dx);
    Slab::from_fn(n, layers, |x, t| cum[x + k + t] - cum[x + k - t])
}

/// `A±^free` on the slab spanned by `layers` layers of the data grid.
pub fn a_free(data: &FieldData, layers: usize, sign: Direction) -> Slab<f64> {
    let ie = e0_window_integral(&data.e0, layers);
    let n = data.a0.values.len();
    Slab::from_fn(n, layers, |x, t| {
        let half = 0.5 * ie.at(x, t);
        match sign {
            Direction::Plus => {
                let y = x as isize + t as isize;
                data.a0.at_clamped(y) + data.a1.at_clamped(y) - half
            }
            Direction::Minus => {
                let y = x as isize - t as isize;
                data.a0.at_clamped(y) - data.a1.at_clamped(y) + half
            }
        }
    })
}

/// `|u|²` and `|v|²` on the slab.
pub fn densities(h: &SpinorHistory) -> (Slab<f64>, Slab<f64>) {
    (h.u.map(|z: Complex64| z.norm_sqr()), h.v.map(|z: Complex64| z.norm_sqr()))
}

/// Builds `A0, A1, E` from a spinor history through `A0 + A1 = A+free - λ W(|v|²)`
/// and `A0 - A1 = A-free - λ W(|u|²)`.
pub fn assemble_potentials(h: &SpinorHistory, data: &FieldData, coupling: f64) -> PotentialAssembly {
    let layers = h.grid.layers();
    let (uu, vv) = densities(h);
    let wu = w_apply(&uu, h.grid.dx);
    let wv = w_apply(&vv, h.grid.dx);
    let a_plus = a_free(data, layers, Direction::Plus).zip_map(&wv, |a, w| a - coupling * w);
    let a_minus = a_free(data, layers, Direction::Minus).zip_map(&wu, |a, w| a - coupling * w);
    let a0 = a_plus.zip_map(&a_minus, |p, m| 0.5 * (p + m));
    let a1 = a_plus.zip_map(&a_minus, |p, m| 0.5 * (p - m));
    let e = electric_field_from(&uu, &vv, &data.e0, coupling, h.grid.dx);
    PotentialAssembly {
        em: EmHistory {
            grid: h.grid,
            coupling,
            data: data.clone(),
            a0,
            a1,
            e,
        },
        a_plus,
        a_minus,
    }
}

/// `A0` and `A1` straight from the two d'Alembert displays, using `W(ρ)` and `W(j)`.
pub fn potentials_direct(h: &SpinorHistory, data: &FieldData, coupling: f64) -> (Slab<f64>, Slab<f64>) {
    let layers = h.grid.layers();
    let (uu, vv) = densities(h);
    let rho = uu.zip_map(&vv, |a, b| a + b);
    let cur = uu.zip_map(&vv, |a, b| a - b);
    let w_rho = w_apply(&rho, h.grid.dx);
    let w_j = w_apply(&cur, h.grid.dx);
    let ie = e0_window_integral(&data.e0, layers);
    let n = h.grid.n_x;
    let a0 = Slab::from_fn(n, layers, |x, t| {
        let (p, m) = (x as isize + t as isize, x as isize - t as isize);
        0.5 * (data.a0.at_clamped(p) + data.a0.at_clamped(m)) + 0.5 * (data.a1.at_clamped(p) - data.a1.at_clamped(m))
            - 0.5 * coupling * w_rho.at(x, t)
    });
    let a1 = Slab::from_fn(n, layers, |x, t| {
        let (p, m) = (x as isize + t as isize, x as isize - t as isize);
        0.5 * (data.a0.at_clamped(p) - data.a0.at_clamped(m)) + 0.5 * (data.a1.at_clamped(p) + data.a1.at_clamped(m))
            - 0.5 * ie.at(x, t)
            + 0.5 * coupling * w_j.at(x, t)
    });
    (a0, a1)
}

fn electric_field_from(uu: &Slab<f64>, vv: &Slab<f64>, e0: &GridFunction<f64>, coupling: f64, h: f64) -> Slab<f64> {
    let ju = characteristic_integral(uu, Direction::Minus, h);
    let jv = characteristic_integral(vv, Direction::Plus, h);
    Slab::from_fn(uu.n_x, uu.n_layers, |x, t| {
        let (p, m) = (x as isize + t as isize, x as isize - t as isize);
        coupling * (jv.at(x, t) - ju.at(x, t)) + 0.5 * (e0.at_clamped(p) + e0.at_clamped(m))
    })
}

/// `E(x,t) = λ(-∫|u(x+t-s,s)|² ds + ∫|v(x-t+s,s)|² ds) + (E0(x+t) + E0(x-t))/2`.
pub fn electric_field(h: &SpinorHistory, e0: &GridFunction<f64>, coupling: f64) -> Slab<f64> {
    let (uu, vv) = densities(h);
    electric_field_from(&uu, &vv, e0, coupling, h.grid.dx)
}

/// Closed form of `∂_t A0 - ∂_x A1`:
/// `-λ∫|u(x+t-s,s)|² ds - λ∫|v(x-t+s,s)|² ds + (E0(x+t) - E0(x-t))/2`.
pub fn lorenz_residual(h: &SpinorHistory, e0: &GridFunction<f64>, coupling: f64) -> Slab<f64> {
    let (uu, vv) = densities(h);
    let ju = characteristic_integral(&uu, Direction::Minus, h.grid.dx);
    let jv = characteristic_integral(&vv, Direction::Plus, h.grid.dx);
    Slab::from_fn(uu.n_x, uu.n_layers, |x, t| {
        let (p, m) = (x as isize + t as isize, x as isize - t as isize);
        -coupling * (ju.at(x, t) + jv.at(x, t)) + 0.5 * (e0.at_clamped(p) - e0.at_clamped(m))
    })
}

/// Centered-difference `∂_t A0 - ∂_x A1` on interior nodes (zero elsewhere).
pub fn lorenz_residual_fd(em: &EmHistory) -> Slab<f64> {
    let (n, layers, h) = (em.a0.n_x, em.a0.n_layers, em.grid.dx);
    Slab::from_fn(n, layers, |x, t| {
        if x == 0 || x + 1 >= n || t == 0 || t + 1 >= layers {
            return 0.0;
        }
        (em.a0.at(x, t + 1) - em.a0.at(x, t - 1)) / (2.0 * h) - (em.a1.at(x + 1, t) - em.a1.at(x - 1, t)) / (2.0 * h)
    })
}

/// `E0(x) = κ + ∫_0^x (|f|² + |g|²) dy`, anchored at the node nearest `0`.
pub fn gauss_e0(f: &GridFunction<Complex64>, g: &GridFunction<Complex64>, kappa: f64) -> GridFunction<f64> {
    gauss_e0_coupled(f, g, kappa, 1.0)
}

/// Gauss-law field for charge coupling `λ`: `E0 = κ + λ ∫_0^x ρ`.
pub fn gauss_e0_coupled(
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    kappa: f64,
    coupling: f64,
) -> GridFunction<f64> {
    let grid = f.grid;
    let rho: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    let origin = grid.nearest_index(0.0);
    let cum = cumulative_from(&rho, origin, grid.dx);
    GridFunction {
        grid,
        values: cum.into_iter().map(|c| kappa + coupling * c).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_grid, sample_function, sample_real, FunctionSpec, LightConeGrid};
    use crate::quad::trap_weight;

    /// Direct double trapezoid over the backward cone.
    fn w_brute(f: &Slab<f64>, h: f64) -> Slab<f64> {
        Slab::from_fn(f.n_x, f.n_layers, |x, t| {
            let mut acc = 0.0;
            for s in 0..=t {
                let l = t - s;
                let mut inner = 0.0;
                for d in 0..=2 * l {
                    let y = x as isize - l as isize + d as isize;
                    inner += trap_weight(d, 2 * l) * f.at_zero(y, s);
                }
                acc += trap_weight(s, t) * inner;
            }
            acc * h * h
        })
    }

    fn grid() -> LightConeGrid {
        build_grid(-1.0, 1.0, 1.0 / 16.0, 0.5).unwrap()
    }

    #[test]
    fn recursion_equals_double_trapezoid() {
        let g = grid();
        let f = Slab::from_fn(g.n_x, g.layers(), |x, t| ((x * 31 + t * 17) % 11) as f64 - 4.0);
        let a = w_apply(&f, g.dx);
        let b = w_brute(&f, g.dx);
        for (p, q) in a.data.iter().zip(&b.data) {
            assert!((p - q).abs() < 1e-12, "{p} vs {q}");
        }
    }

    #[test]
    fn w_of_one_is_t_squared() {
        let g = grid();
        let ones = Slab::from_fn(g.n_x, g.layers(), |_, _| 1.0);
        let w = w_apply(&ones, g.dx);
        // Only nodes whose cone stays on the grid see the constant.
        for t in 0..g.layers() {
            for x in t..g.n_x - t {
                assert!((w.at(x, t) - g.t(t).powi(2)).abs() < 1e-13);
            }
        }
        // Oracle: Riemann sum at ten times the resolution for one apex.
        let (tt, m) = (0.5, 160);
        let hh = tt / m as f64;
        let mut riemann = 0.0;
        for s in 0..m {
            let sm = (s as f64 + 0.5) * hh;
            riemann += 2.0 * (tt - sm) * hh;
        }
        assert!((riemann - 0.25).abs() < 1e-12);
        assert_eq!(w_apply(&Slab::<f64>::for_grid(&g), g.dx).sup_norm(), 0.0);
    }

    #[test]
    fn a_free_examples() {
        let g = grid();
        let kappa = 0.7;
        let mut data = FieldData::zeros(g);
        data.e0.values.iter_mut().for_each(|e| *e = kappa);
        let p = a_free(&data, g.layers(), Direction::Plus);
        let m = a_free(&data, g.layers(), Direction::Minus);
        for t in 0..g.layers() {
            for x in 0..g.n_x {
                assert!((p.at(x, t) + kappa * g.t(t)).abs() < 1e-13);
                assert!((m.at(x, t) - kappa * g.t(t)).abs() < 1e-13);
            }
        }
        let mut data = FieldData::zeros(g);
        data.a0.values.iter_mut().for_each(|a| *a = 1.0);
        assert!(a_free(&data, g.layers(), Direction::Plus).data.iter().all(|&v| v == 1.0));
        assert!(a_free(&data, g.layers(), Direction::Minus).data.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn potentials_examples() {
        let g = grid();
        let kappa = -0.3;
        let mut data = FieldData::zeros(g);
        data.e0.values.iter_mut().for_each(|e| *e = kappa);
        let h = SpinorHistory::zeros(g);
        let pa = assemble_potentials(&h, &data, 1.0);
        for t in 0..g.layers() {
            for x in 0..g.n_x {
                assert!(pa.em.a0.at(x, t).abs() < 1e-14);
                assert!((pa.em.a1.at(x, t) + kappa * g.t(t)).abs() < 1e-13);
                assert!((pa.em.e.at(x, t) - kappa).abs() < 1e-14);
            }
        }

        // |u|² = 1 everywhere on the slab, v = 0.
        let mut h = SpinorHistory::zeros(g);
        h.u.data.iter_mut().for_each(|z| *z = Complex64::new(0.0, 1.0));
        let pa = assemble_potentials(&h, &FieldData::zeros(g), 1.0);
        for t in 0..g.layers() {
            for x in t..g.n_x - t {
                let tt = g.t(t);
                assert!((pa.em.a0.at(x, t) + 0.5 * tt * tt).abs() < 1e-13);
                assert!((pa.em.a1.at(x, t) - 0.5 * tt * tt).abs() < 1e-13);
                // E = -t where the left-moving path stays on the grid.
                if x + t < g.n_x {
                    assert!((pa.em.e.at(x, t) + tt).abs() < 1e-13);
                }
            }
        }
        for (p, m, a0, a1) in combos(&pa) {
            assert_eq!(p - m, 2.0 * a1);
            assert_eq!(p + m, 2.0 * a0);
        }
    }

    fn combos(pa: &PotentialAssembly) -> Vec<(f64, f64, f64, f64)> {
        (0..pa.a_plus.data.len())
            .map(|i| (pa.a_plus.data[i], pa.a_minus.data[i], pa.em.a0.data[i], pa.em.a1.data[i]))
            .collect()
    }

    #[test]
    fn routes_agree() {
        let g = build_grid(-2.0, 2.0, 1.0 / 32.0, 0.5).unwrap();
        let f = sample_function(&g, &FunctionSpec::gaussian(-0.2, 0.2, 0.8, 0.4)).unwrap();
        let gg = sample_function(&g, &FunctionSpec::gaussian(0.3, 0.15, 0.6, -1.0)).unwrap();
        let mut h = SpinorHistory::zeros(g);
        for k in 0..g.layers() {
            for i in 0..g.n_x {
                h.u.set(i, k, f.at(i as isize - k as isize) * Complex64::from_polar(1.0, 0.1 * k as f64));
                h.v.set(i, k, gg.at(i as isize + k as isize));
            }
        }
        let data = FieldData {
            a0: sample_real(&g, &FunctionSpec::gaussian(0.0, 0.3, 0.5, 0.0)).unwrap(),
            a1: sample_real(&g, &FunctionSpec::gaussian(0.5, 0.2, -0.4, 0.0)).unwrap(),
            e0: gauss_e0(&f, &gg, 0.1),
        };
        let pa = assemble_potentials(&h, &data, 0.8);
        let (a0, a1) = potentials_direct(&h, &data, 0.8);
        let scale = pa.em.a0.sup_norm().max(pa.em.a1.sup_norm());
        for i in 0..a0.data.len() {
            assert!((a0.data[i] - pa.em.a0.data[i]).abs() <= 1e-12 * scale);
            assert!((a1.data[i] - pa.em.a1.data[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gauss_e0_examples() {
        let g = build_grid(-2.0, 2.0, 1.0 / 64.0, 0.5).unwrap();
        let z = GridFunction::<Complex64>::zeros(g);
        assert!(gauss_e0(&z, &z, 0.4).values.iter().all(|&e| e == 0.4));

        let ind = sample_function(&g, &FunctionSpec::Indicator { a: 0.0, b: 1.0, value: 1.0 }).unwrap();
        let e = gauss_e0(&ind, &z, 0.0);
        for (i, &v) in e.values.iter().enumerate() {
            let x = g.x(i as isize);
            let ramp = x.clamp(0.0, 1.0);
            // The trapezoid smears the jumps over one cell.
            assert!((v - ramp).abs() <= 0.5 * g.dx + 1e-14, "x={x}: {v}");
            if x == 0.0 {
                assert_eq!(v, 0.0);
            }
        }

        // Smooth data against a refined-grid oracle: error O(dx²).
        let spec = FunctionSpec::gaussian(0.3, 0.25, 1.0, 0.0);
        let fine = build_grid(-2.0, 2.0, 1.0 / 640.0, 0.5).unwrap();
        let ef = gauss_e0(&sample_function(&fine, &spec).unwrap(), &GridFunction::zeros(fine), 0.0);
        let ec = gauss_e0(&sample_function(&g, &spec).unwrap(), &GridFunction::zeros(g), 0.0);
        let err = (0..g.n_x).map(|i| (ec.values[i] - ef.values[10 * i]).abs()).fold(0.0, f64::max);
        assert!(err < 5.0 * g.dx * g.dx, "err {err}");
    }

    #[test]
    fn lorenz_residual_vanishes_for_constant_field() {
        let g = grid();
        let mut e0 = GridFunction::<f64>::zeros(g);
        e0.values.iter_mut().for_each(|e| *e = 1.3);
        let r = lorenz_residual(&SpinorHistory::zeros(g), &e0, 1.0);
        assert!(r.data.iter().all(|&v| v == 0.0));
    }
}
