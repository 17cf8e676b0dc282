//! Light-cone lattice: grid geometry, field storage, data sampling and exact
//! characteristic transport.
//!
//! The time step always equals the spatial step, so both characteristic
//! families `x - t = const` and `x + t = const` pass through grid nodes and
//! free transport is a pure index shift. Reads outside the grid come in two
//! flavours: spinor data is zero-extended (compact support), while the
//! electromagnetic data `a0, a1, E0` is extended by its edge value, which is
//! exact whenever those fields are constant near the boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance, in units of cells, when deciding whether a length is an integer
/// multiple of the spacing.
const COMMENSURATE_TOL: f64 = 1e-9;

/// Values whose modulus is at most this fraction of the field's maximum are
/// treated as zero when checking support.
pub const SUPPORT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Scalar types that can live on the lattice.
pub trait Scalar: Copy + Default + Send + Sync + PartialEq + std::fmt::Debug + 'static {
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        // Cheaper than the overflow-safe `hypot`; values here are O(1).
        self.norm_sqr().sqrt()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Lattice scalars that also form a real vector space.
pub trait Field:
    Scalar
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
    + std::ops::AddAssign
{
}

impl Field for f64 {}
impl Field for Complex64 {}

/// Uniform space-time lattice with `dt == dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightConeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub n_x: usize,
    pub n_t: usize,
}

fn integer_ratio(length: f64, step: f64, what: &str) -> Result<usize> {
    let ratio = length / step;
    let rounded = ratio.round();
    if !ratio.is_finite() || (ratio - rounded).abs() > COMMENSURATE_TOL {
        return Err(Error::NonCommensurate(format!(
            "{what} = {length} is not an integer multiple of dx = {step}"
        )));
    }
    Ok(rounded as usize)
}

impl LightConeGrid {
    pub fn new(x_min: f64, x_max: f64, dx: f64, t_total: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidArgument(format!("dx must be positive, got {dx}")));
        }
        if !(t_total > 0.0) || !t_total.is_finite() {
            return Err(Error::InvalidArgument(format!("T must be positive, got {t_total}")));
        }
        let n_t = integer_ratio(t_total, dx, "T")?;
        let cells = integer_ratio(x_max - x_min, dx, "x_max - x_min")?;
        if n_t < 1 {
            return Err(Error::NonCommensurate(format!("T = {t_total} is below one step dx = {dx}")));
        }
        if cells < 1 {
            return Err(Error::InvalidArgument("grid needs at least two nodes".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            dx,
            dt: dx,
            n_x: cells + 1,
            n_t,
        })
    }

    /// Same spatial lattice with a different number of time layers.
    pub fn with_layers(&self, n_t: usize) -> Self {
        Self { n_t, ..*self }
    }

    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn t_total(&self) -> f64 {
        self.n_t as f64 * self.dt
    }

    /// Number of stored time layers, `n_t + 1`.
    pub fn layers(&self) -> usize {
        self.n_t + 1
    }

    /// Number of time steps making up the duration `t`.
    pub fn steps_for(&self, t: f64) -> Result<usize> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        integer_ratio(t, self.dt, "T")
    }

    /// Index of a grid-aligned coordinate (may lie outside the grid).
    pub fn aligned_index(&self, x: f64) -> Result<isize> {
        let r = (x - self.x_min) / self.dx;
        let rounded = r.round();
        if (r - rounded).abs() > COMMENSURATE_TOL {
            return Err(Error::NonCommensurate(format!("x = {x} is not a grid node")));
        }
        Ok(rounded as isize)
    }

    /// Node closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let r = ((x - self.x_min) / self.dx).round();
        r.clamp(0.0, (self.n_x - 1) as f64) as usize
    }

    /// The interval that initial spinor data must be supported in.
    pub fn support_window(&self, pad: f64) -> (f64, f64) {
        let t = self.t_total();
        (self.x_min + 2.0 * t + pad, self.x_max - 2.0 * t - pad)
    }
}

/// Builds a grid with `dt = dx` and `n_t = T / dx`.
pub fn build_grid(x_min: f64, x_max: f64, dx: f64, t_total: f64) -> Result<LightConeGrid> {
    LightConeGrid::new(x_min, x_max, dx, t_total)
}

#[inline]
pub(crate) fn read_zero<T: Scalar>(values: &[T], i: isize) -> T {
    if i >= 0 && (i as usize) < values.len() {
        values[i as usize]
    } else {
        T::default()
    }
}

#[inline]
pub(crate) fn read_clamped<T: Scalar>(values: &[T], i: isize) -> T {
    let last = values.len() as isize - 1;
    values[i.clamp(0, last) as usize]
}

/// One value per spatial node at a single time.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub grid: LightConeGrid,
    pub values: Vec<T>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn zeros(grid: LightConeGrid) -> Self {
        Self {
            grid,
            values: vec![T::default(); grid.n_x],
        }
    }

    pub fn from_values(grid: LightConeGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_x {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.n_x,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::InvalidArgument(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LightConeGrid, f: impl Fn(f64) -> T) -> Self {
        let values = (0..grid.n_x).map(|i| f(grid.x(i as isize))).collect();
        Self { grid, values }
    }

    /// Zero-extended read.
    #[inline]
    pub fn at(&self, i: isize) -> T {
        read_zero(&self.values, i)
    }

    /// Edge-extended read.
    #[inline]
    pub fn at_clamped(&self, i: isize) -> T {
        read_clamped(&self.values, i)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn modulus_sqr(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.modulus_sqr()).collect()
    }

    /// Squared L2 norm over the grid by the trapezoid rule.
    pub fn l2_norm_sqr(&self) -> f64 {
        let n = self.values.len();
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc += w * v.modulus_sqr();
        }
        acc * self.grid.dx
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    /// Same values on a grid with a different number of time layers.
    pub fn on_grid(&self, grid: LightConeGrid) -> Self {
        debug_assert_eq!(grid.n_x, self.grid.n_x);
        Self {
            grid,
            values: self.values.clone(),
        }
    }

    /// Checks that the field vanishes (to the support threshold) outside `[lo, hi]`.
    pub fn check_support(&self, lo: f64, hi: f64, name: &str) -> Result<()> {
        let peak = self.sup_norm();
        if peak == 0.0 {
            return Ok(());
        }
        let cut = peak * SUPPORT_RELATIVE_THRESHOLD;
        let tol = 1e-9 * self.grid.dx;
        for (i, v) in self.values.iter().enumerate() {
            let x = self.grid.x(i as isize);
            if (x < lo - tol || x > hi + tol) && v.modulus() > cut {
                return Err(Error::SupportViolation(format!(
                    "{name} is nonzero at x = {x}, outside the admissible window [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

impl GridFunction<Complex64> {
    pub fn real_part(&self) -> GridFunction<f64> {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|c| c.re).collect(),
        }
    }
}

impl GridFunction<f64> {
    pub fn to_complex(&self) -> GridFunction<Complex64> {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }
}

/// Field values on every node of every time layer, stored layer by layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab<T> {
    pub n_x: usize,
    pub n_layers: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Slab<T> {
    pub fn zeros(n_x: usize, n_layers: usize) -> Self {
        Self {
            n_x,
            n_layers,
            data: vec![T::default(); n_x * n_layers],
        }
    }

    pub fn for_grid(grid: &LightConeGrid) -> Self {
        Self::zeros(grid.n_x, grid.layers())
    }

    pub fn from_fn(n_x: usize, n_layers: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n_x * n_layers);
        for k in 0..n_layers {
            for i in 0..n_x {
                data.push(f(i, k));
            }
        }
        Self { n_x, n_layers, data }
    }

    #[inline]
    pub fn layer(&self, k: usize) -> &[T] {
        &self.data[k * self.n_x..(k + 1) * self.n_x]
    }

    #[inline]
    pub fn layer_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.data[k * self.n_x..(k + 1) * self.n_x]
    }

    #[inline]
    pub fn at(&self, i: usize, k: usize) -> T {
        self.data[k * self.n_x + i]
    }

    /// Zero-extended read in space; `k` must be a stored layer.
    #[inline]
    pub fn at_zero(&self, i: isize, k: usize) -> T {
        if i >= 0 && (i as usize) < self.n_x {
            self.data[k * self.n_x + i as usize]
        } else {
            T::default()
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, value: T) {
        self.data[k * self.n_x + i] = value;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Slab<U> {
        Slab {
            n_x: self.n_x,
            n_layers: self.n_layers,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: Scalar, V: Scalar>(&self, other: &Slab<U>, f: impl Fn(T, U) -> V) -> Slab<V> {
        assert_eq!(self.n_x, other.n_x);
        assert_eq!(self.n_layers, other.n_layers);
        Slab {
            n_x: self.n_x,
            n_layers: self.n_layers,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite_value())
    }
}

/// The spinor `(u, v)` on the whole slab.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorHistory {
    pub grid: LightConeGrid,
    pub u: Slab<Complex64>,
    pub v: Slab<Complex64>,
}

impl SpinorHistory {
    pub fn zeros(grid: LightConeGrid) -> Self {
        Self {
            grid,
            u: Slab::for_grid(&grid),
            v: Slab::for_grid(&grid),
        }
    }

    pub fn u_layer(&self, k: usize) -> GridFunction<Complex64> {
        GridFunction {
            grid: self.grid,
            values: self.u.layer(k).to_vec(),
        }
    }

    pub fn v_layer(&self, k: usize) -> GridFunction<Complex64> {
        GridFunction {
            grid: self.grid,
            values: self.v.layer(k).to_vec(),
        }
    }

    /// Charge density `|u|^2 + |v|^2` at one layer.
    pub fn density(&self, k: usize) -> Vec<f64> {
        self.u
            .layer(k)
            .iter()
            .zip(self.v.layer(k))
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }
}

/// Electromagnetic initial data `a0, a1, E0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub a0: GridFunction<f64>,
    pub a1: GridFunction<f64>,
    pub e0: GridFunction<f64>,
}

impl FieldData {
    pub fn zeros(grid: LightConeGrid) -> Self {
        Self {
            a0: GridFunction::zeros(grid),
            a1: GridFunction::zeros(grid),
            e0: GridFunction::zeros(grid),
        }
    }

    pub fn on_grid(&self, grid: LightConeGrid) -> Self {
        Self {
            a0: self.a0.on_grid(grid),
            a1: self.a1.on_grid(grid),
            e0: self.e0.on_grid(grid),
        }
    }
}

/// Potentials and electric field on the slab together with the data they
/// were built from. `coupling` is the charge coupling that scales the sources.
#[derive(Debug, Clone, PartialEq)]
pub struct EmHistory {
    pub grid: LightConeGrid,
    pub coupling: f64,
    pub data: FieldData,
    pub a0: Slab<f64>,
    pub a1: Slab<f64>,
    pub e: Slab<f64>,
}

/// Characteristic family: `Plus` moves right (`x - t` fixed), `Minus` moves left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Plus,
    Minus,
}

/// Exact one-cell transport along a characteristic with zero inflow.
pub fn transport_shift<T: Scalar>(field: &GridFunction<T>, direction: Direction) -> GridFunction<T> {
    let n = field.values.len();
    let mut out = vec![T::default(); n];
    match direction {
        Direction::Plus => out[1..].copy_from_slice(&field.values[..n - 1]),
        Direction::Minus => out[..n - 1].copy_from_slice(&field.values[1..]),
    }
    GridFunction {
        grid: field.grid,
        values: out,
    }
}

/// Scalar data description accepted by [`sample_function`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Zero,
    Constant {
        value: f64,
        #[serde(default)]
        imag: f64,
    },
    /// Closed interval `[a, b]`.
    Indicator {
        a: f64,
        b: f64,
        #[serde(default = "one")]
        value: f64,
    },
    /// `amplitude * exp(-(x - center)^2 / (2 width^2)) * exp(i phase)`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
    Tabulated {
        values: Vec<f64>,
        #[serde(default)]
        imag: Option<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::UnknownSpec(e.to_string()))
    }

    pub fn from_value(value: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| Error::UnknownSpec(e.to_string()))
    }

    pub fn gaussian(center: f64, width: f64, amplitude: f64, phase: f64) -> Self {
        FunctionSpec::Gaussian {
            center,
            width,
            amplitude,
            phase,
        }
    }

    fn eval_into(&self, grid: &LightConeGrid, out: &mut [Complex64]) -> Result<()> {
        match self {
            FunctionSpec::Zero => {}
            FunctionSpec::Constant { value, imag } => {
                let c = Complex64::new(*value, *imag);
                out.iter_mut().for_each(|o| *o += c);
            }
            FunctionSpec::Indicator { a, b, value } => {
                if !(a <= b) {
                    return Err(Error::UnknownSpec(format!("indicator needs a <= b, got [{a}, {b}]")));
                }
                let tol = 1e-9 * grid.dx;
                for (i, o) in out.iter_mut().enumerate() {
                    let x = grid.x(i as isize);
                    if x >= a - tol && x <= b + tol {
                        *o += Complex64::new(*value, 0.0);
                    }
                }
            }
            FunctionSpec::Gaussian {
                center,
                width,
                amplitude,
                phase,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::UnknownSpec(format!("gaussian width must be positive, got {width}")));
                }
                let rot = Complex64::from_polar(*amplitude, *phase);
                for (i, o) in out.iter_mut().enumerate() {
                    let z = (grid.x(i as isize) - center) / width;
                    *o += rot * (-0.5 * z * z).exp();
                }
            }
            FunctionSpec::Sum { terms } => {
                for term in terms {
                    term.eval_into(grid, out)?;
                }
            }
            FunctionSpec::Tabulated { values, imag } => {
                if values.len() != grid.n_x {
                    return Err(Error::UnknownSpec(format!(
                        "tabulated data has {} values for a grid of {} nodes",
                        values.len(),
                        grid.n_x
                    )));
                }
                match imag {
                    Some(im) if im.len() != values.len() => {
                        return Err(Error::UnknownSpec("tabulated imag length mismatch".into()));
                    }
                    Some(im) => {
                        for ((o, &r), &j) in out.iter_mut().zip(values).zip(im) {
                            *o += Complex64::new(r, j);
                        }
                    }
                    None => {
                        for (o, &r) in out.iter_mut().zip(values) {
                            *o += Complex64::new(r, 0.0);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Pointwise evaluation of a data description at the grid nodes.
pub fn sample_function(grid: &LightConeGrid, spec: &FunctionSpec) -> Result<GridFunction<Complex64>> {
    let mut values = vec![Complex64::default(); grid.n_x];
    spec.eval_into(grid, &mut values)?;
    GridFunction::from_values(*grid, values)
}

/// Real-valued sampling for the electromagnetic data.
pub fn sample_real(grid: &LightConeGrid, spec: &FunctionSpec) -> Result<GridFunction<f64>> {
    let c = sample_function(grid, spec)?;
    if c.values.iter().any(|z| z.im != 0.0) {
        return Err(Error::UnknownSpec("real field specified with a nonzero imaginary part".into()));
    }
    Ok(c.real_part())
}
