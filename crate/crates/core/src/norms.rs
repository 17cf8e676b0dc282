//! The data norm `D(T)`, the characteristic norms `X±(T)`, the envelope norms
//! `𝒳±(T)`, the forcing norms `N±(T)` and their sum `Y±(T)`.
//!
//! Every quantity is a sup over a line of a trapezoid along a ray of nodes.
//! Reads outside the stored grid are zero, and sups range over every ray that
//! meets the grid, which makes the discrete norms translation invariant.
//! `Direction::Plus` pairs with `u` and `Direction::Minus` with `v`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{Direction, GridFunction, Scalar, Slab, SpinorHistory};
use crate::quad::trap_weight;

/// Spinor component selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    U,
    V,
}

impl Component {
    pub fn direction(self) -> Direction {
        match self {
            Component::U => Direction::Plus,
            Component::V => Direction::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub name: String,
    pub value: f64,
    pub auxiliary: Option<GridFunction<f64>>,
}

/// Largest value of `sum_j w_j s[x + 2j]`, `j = 0..=k`, over every start `x`
/// whose window meets `s`. Entries outside `s` count as zero.
///
/// Uses one prefix sum per parity class. Shifting `s` by an even number of
/// places (padding with zeros) leaves the result bitwise unchanged.
pub(crate) fn ray_window_max(s: &[f64], k: usize) -> f64 {
    if k == 0 || s.is_empty() {
        return 0.0;
    }
    let k = k as isize;
    let mut best = 0.0f64;
    for parity in 0..2 {
        let e: Vec<f64> = s.iter().skip(parity).step_by(2).copied().collect();
        let len = e.len() as isize;
        if len == 0 {
            continue;
        }
        let mut pre = Vec::with_capacity(e.len() + 1);
        pre.push(0.0);
        let mut acc = 0.0;
        for &v in &e {
            acc += v;
            pre.push(acc);
        }
        for m0 in -k..len {
            let m1 = m0 + k;
            let a = m0.max(0) as usize;
            let b = m1.min(len - 1) as usize;
            let mut sum = pre[b + 1] - pre[a];
            if m0 >= 0 {
                sum -= 0.5 * e[m0 as usize];
            }
            if m1 < len {
                sum -= 0.5 * e[m1 as usize];
            }
            best = best.max(sum);
        }
    }
    best
}

/// `D(T)` norm, `T = k h`, of an arbitrary finite sequence of node values.
pub fn d_norm_values<T: Scalar>(values: &[T], k: usize, h: f64) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v.modulus_sqr()).collect();
    (h * ray_window_max(&sq, k)).sqrt()
}

/// `‖f‖_{D(T)} = sup_x (∫_0^T |f(x + 2s)|² ds)^{1/2}`.
pub fn d_norm<T: Scalar>(f: &GridFunction<T>, t: f64) -> Result<f64> {
    let k = f.grid.steps_for(t)?;
    Ok(d_norm_values(&f.values, k, f.grid.dx))
}

/// Number of steps spanned by a slab.
#[inline]
fn steps(slab_layers: usize) -> usize {
    slab_layers.saturating_sub(1)
}

/// Squared characteristic norm along the transversal family: `X+` reads
/// `s(x - t, t)`, `X-` reads `s(x + t, t)`.
pub fn x_norm_sq_slab<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> f64 {
    let k = steps(slab.n_layers);
    let n = slab.n_x;
    let mut acc = vec![0.0f64; n + k];
    for t in 0..=k {
        let w = trap_weight(t, k);
        if w == 0.0 {
            continue;
        }
        let layer = slab.layer(t);
        // Plus: ray index x = i + t; Minus: x = i - t + k.
        let off = match dir {
            Direction::Plus => t,
            Direction::Minus => k - t,
        };
        for (a, v) in acc[off..off + n].iter_mut().zip(layer) {
            *a += w * v.modulus_sqr();
        }
    }
    h * acc.into_iter().fold(0.0, f64::max)
}

pub fn x_norm_slab<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> f64 {
    x_norm_sq_slab(slab, dir, h).sqrt()
}

/// `‖u‖_{X+(T)}` or `‖v‖_{X-(T)}` of a history.
pub fn x_norm(h: &SpinorHistory, component: Component) -> f64 {
    match component {
        Component::U => x_norm_slab(&h.u, Direction::Plus, h.grid.dx),
        Component::V => x_norm_slab(&h.v, Direction::Minus, h.grid.dx),
    }
}

/// Minimal dominating profile on the extended line. For `Plus`,
/// `p(y) = max_t |s(y + t, t)|` for `y` in `[-K, n)`, stored at `y + K`;
/// for `Minus`, `q(y) = max_t |s(y - t, t)|` for `y` in `[0, n + K)`.
pub fn envelope_profile<T: Scalar>(slab: &Slab<T>, dir: Direction) -> Vec<f64> {
    let k = steps(slab.n_layers);
    let n = slab.n_x;
    let mut env = vec![0.0f64; n + k];
    for t in 0..=k {
        let off = match dir {
            Direction::Plus => k - t,
            Direction::Minus => t,
        };
        for (e, v) in env[off..off + n].iter_mut().zip(slab.layer(t)) {
            *e = e.max(v.modulus());
        }
    }
    env
}

pub fn envelope_norm_slab<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> f64 {
    let env = envelope_profile(slab, dir);
    d_norm_values(&env, steps(slab.n_layers), h)
}

/// `‖u‖_{𝒳+(T)}` or `‖v‖_{𝒳-(T)}`, realised by the pointwise minimal envelope.
/// The auxiliary field is the envelope restricted to the grid.
pub fn envelope_norm(h: &SpinorHistory, component: Component) -> NormReport {
    let (slab, dir, name) = match component {
        Component::U => (&h.u, Direction::Plus, "envelope+"),
        Component::V => (&h.v, Direction::Minus, "envelope-"),
    };
    let k = steps(slab.n_layers);
    let env = envelope_profile(slab, dir);
    let value = d_norm_values(&env, k, h.grid.dx);
    let on_grid = match dir {
        Direction::Plus => env[k..k + slab.n_x].to_vec(),
        Direction::Minus => env[..slab.n_x].to_vec(),
    };
    NormReport {
        name: name.into(),
        value,
        auxiliary: Some(GridFunction {
            grid: h.grid,
            values: on_grid,
        }),
    }
}

/// Profile `P(y) = ∫_0^T |F(y ± s, s)| ds` on the extended line, indexed as in
/// [`envelope_profile`].
pub fn n_profile<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> Vec<f64> {
    let k = steps(slab.n_layers);
    let n = slab.n_x;
    let mut acc = vec![0.0f64; n + k];
    for t in 0..=k {
        let w = trap_weight(t, k);
        if w == 0.0 {
            continue;
        }
        let off = match dir {
            Direction::Plus => k - t,
            Direction::Minus => t,
        };
        for (a, v) in acc[off..off + n].iter_mut().zip(slab.layer(t)) {
            *a += w * v.modulus();
        }
    }
    acc.iter_mut().for_each(|a| *a *= h);
    acc
}

pub fn n_norm_slab<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> f64 {
    d_norm_values(&n_profile(slab, dir, h), steps(slab.n_layers), h)
}

/// `‖F‖_{N±(T)}` of a space-time field stored on a slab of the grid.
pub fn n_norm<T: Scalar>(field: &Slab<T>, sign: Direction, h: f64) -> f64 {
    n_norm_slab(field, sign, h)
}

/// `‖F(·, t)‖_{D(T)}` for every stored layer, with `T` the slab length.
pub fn layer_d_norms<T: Scalar>(slab: &Slab<T>, h: f64) -> Vec<f64> {
    let k = steps(slab.n_layers);
    (0..slab.n_layers)
        .map(|t| d_norm_values(slab.layer(t), k, h))
        .collect()
}

pub fn y_norm_slab<T: Scalar>(slab: &Slab<T>, dir: Direction, h: f64) -> f64 {
    let sup_d = layer_d_norms(slab, h).into_iter().fold(0.0, f64::max);
    sup_d + x_norm_slab(slab, dir, h) + envelope_norm_slab(slab, dir, h)
}

/// `‖u‖_{Y+(T)}` or `‖v‖_{Y-(T)}`.
pub fn y_norm(h: &SpinorHistory, component: Component) -> f64 {
    match component {
        Component::U => y_norm_slab(&h.u, Direction::Plus, h.grid.dx),
        Component::V => y_norm_slab(&h.v, Direction::Minus, h.grid.dx),
    }
}
