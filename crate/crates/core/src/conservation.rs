//! Charge conservation identities and the a priori bounds used for global
//! continuation. The density and current are recomputed from the spinor on
//! demand, `ρ = |u|² + |v|²` and `j = |u|² - |v|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Direction, EmHistory, GridFunction, Slab, SpinorHistory};
use crate::maxwell::{characteristic_integral, densities, lorenz_residual};
use crate::norms::d_norm_values;
use crate::quad::{trap_weight, trapezoid};
use crate::report::CheckReport;

/// Absolute floor for identity residuals.
pub const IDENTITY_FLOOR: f64 = 1e-9;

/// `∫ (|u|² + |v|²) dx` at one layer. The two components are summed
/// separately so that pure transport leaves the value bitwise unchanged.
pub fn total_charge(h: &SpinorHistory, layer: usize) -> f64 {
    let sq = |s: &[Complex64]| s.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>();
    trapezoid(&sq(h.u.layer(layer)), h.grid.dx) + trapezoid(&sq(h.v.layer(layer)), h.grid.dx)
}

/// Apex of a backward cone, as node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeRegion {
    pub x0: usize,
    pub t0: usize,
}

impl ConeRegion {
    /// Cone from physical coordinates; both must be grid-aligned.
    pub fn at(h: &SpinorHistory, x0: f64, t0: f64) -> Result<Self> {
        let i = h.grid.aligned_index(x0)?;
        let k = h.grid.steps_for(t0)?;
        let cone = Self {
            x0: usize::try_from(i).map_err(|_| Error::ConeOutsideGrid(format!("apex x0 = {x0} left of the grid")))?,
            t0: k,
        };
        cone.check(h)?;
        Ok(cone)
    }

    fn check(&self, h: &SpinorHistory) -> Result<()> {
        if self.t0 >= h.u.n_layers || self.x0 < self.t0 || self.x0 + self.t0 >= h.u.n_x {
            return Err(Error::ConeOutsideGrid(format!(
                "apex (node {}, layer {}) needs base nodes {}..={} and {} layers",
                self.x0,
                self.t0,
                self.x0 as isize - self.t0 as isize,
                self.x0 + self.t0,
                self.t0 + 1
            )));
        }
        Ok(())
    }

    /// Node range of the slice at layer `k`.
    fn slice(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        let r = self.t0 - k;
        self.x0 - r..=self.x0 + r
    }
}

fn sup_density(h: &SpinorHistory, layers: usize) -> f64 {
    (0..layers)
        .flat_map(|k| h.density(k))
        .fold(0.0, f64::max)
}

/// Reports for the backward cone at layer `t`: the four-term identity, the
/// nonincrease of the slice charge and, at `t == t0`, the flux identity.
///
/// Each residual is allowed `1e-9` plus a quadrature allowance of
/// `4 h sup ρ`, which is what the different trapezoid rules on slices and
/// edges can disagree by.
pub fn cone_charge_report(h: &SpinorHistory, cone: ConeRegion, t: usize) -> Result<Vec<CheckReport>> {
    cone.check(h)?;
    if t > cone.t0 {
        return Err(Error::ConeOutsideGrid(format!("time layer {t} beyond apex layer {}", cone.t0)));
    }
    let dx = h.grid.dx;
    let slice_charge = |k: usize| {
        let rho = h.density(k);
        trapezoid(&rho[cone.slice(k)], dx)
    };
    let (right, left) = cone_edges(h, cone, t);
    let base = slice_charge(0);
    let top = slice_charge(t);
    let allowance = 4.0 * dx * sup_density(h, cone.t0 + 1);
    let tol = IDENTITY_FLOOR + allowance;
    let ctx = format!(
        "apex x0 = {}, t0 = {}, t = {}, allowance = {allowance:e}",
        h.grid.x(cone.x0 as isize),
        h.grid.t(cone.t0),
        h.grid.t(t)
    );

    let mut out = vec![
        CheckReport::identity("LocalCharge", top + right + left - base, tol, ctx.clone()),
        CheckReport::inequality("LocalChargeBound", top, base, 0.0, tol, ctx.clone()),
    ];
    if t == cone.t0 {
        out.push(CheckReport::identity("LocalCharge2", right + left - base, tol, ctx));
    }
    Ok(out)
}

/// Trapezoid of `2|u|²` on the right edge and `2|v|²` on the left edge of the cone, up to layer `t`.
fn cone_edges(h: &SpinorHistory, cone: ConeRegion, t: usize) -> (f64, f64) {
    let dx = h.grid.dx;
    (0..=t).fold((0.0, 0.0), |(r, l), s| {
        let w = trap_weight(s, t) * dx * 2.0;
        let right = h.u.at(cone.x0 + cone.t0 - s, s).norm_sqr();
        let left = h.v.at(cone.x0 - cone.t0 + s, s).norm_sqr();
        (r + w * right, l + w * left)
    })
}

/// Centered-difference `∂_x E - λρ` at interior nodes (endpoints are zero).
/// The report allows `h (sup|∂_x ρ| + sup ρ) |λ|` on top of `1e-9`.
pub fn gauss_residual(e: &[f64], rho: &[f64], dx: f64, coupling: f64) -> (Vec<f64>, CheckReport) {
    let n = e.len().min(rho.len());
    let mut res = vec![0.0; n];
    for i in 1..n.saturating_sub(1) {
        res[i] = (e[i + 1] - e[i - 1]) / (2.0 * dx) - coupling * rho[i];
    }
    let sup = res.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let drho = (1..n.saturating_sub(1))
        .map(|i| ((rho[i + 1] - rho[i - 1]) / (2.0 * dx)).abs())
        .fold(0.0, f64::max);
    let rho_sup = rho.iter().fold(0.0_f64, |m, r| m.max(*r));
    let allowance = dx * coupling.abs() * (drho + rho_sup);
    let report = CheckReport::identity(
        "GaussLaw",
        sup,
        IDENTITY_FLOOR + allowance,
        format!("allowance = {allowance:e}"),
    );
    (res, report)
}

/// Gauss residual of layer `k` of a run.
pub fn gauss_residual_layer(em: &EmHistory, h: &SpinorHistory, k: usize) -> (Vec<f64>, CheckReport) {
    gauss_residual(em.e.layer(k), &h.density(k), h.grid.dx, em.coupling)
}

/// Sup of the closed-form Lorenz residual `∂t A0 - ∂x A1` over the history.
///
/// With a Gauss-consistent `E0` the residual is `λ/2` times the flux
/// identity residual of the backward cone with apex at the node, so it gets
/// half the cone allowance scaled by `|λ|`: `1e-9 + 2 |λ| h sup ρ`.
pub fn lorenz_report(h: &SpinorHistory, e0: &GridFunction<f64>, coupling: f64) -> CheckReport {
    let sup = lorenz_residual(h, e0, coupling).sup_norm();
    let allowance = IDENTITY_FLOOR + 2.0 * coupling.abs() * h.grid.dx * sup_density(h, h.u.n_layers);
    CheckReport::identity("Lorenz", sup, allowance, format!("allowance = {allowance:e}"))
}

/// Integrating factors and the Grönwall bound on the layer data norms.
#[derive(Debug, Clone, PartialEq)]
pub struct DelgadoReport {
    /// Initial charge `‖f‖² + ‖g‖²`.
    pub m_charge: f64,
    pub phi_plus: Slab<f64>,
    pub phi_minus: Slab<f64>,
    pub bound_lhs: Vec<f64>,
    pub bound_rhs: Vec<f64>,
    pub phi_check: CheckReport,
    pub bound_checks: Vec<CheckReport>,
    pub pass: bool,
}

/// `φ+(x,t) = ∫ 4|v(x-t+s,s)|² ds`, `φ-(x,t) = ∫ 4|u(x+t-s,s)|² ds`, checked
/// against `2M`, and per layer
/// `D(u)² + D(v)² ≤ (D(f)² + D(g)²) exp(2m e^{4M} t)` with `D = D(T)`.
///
/// The bound is stated for unit Gross–Neveu coupling and stays valid for
/// `|λ3| ≤ 2`. Allowances are `1e-9` relative plus `4 h sup ρ`.
pub fn delgado_report(
    h: &SpinorHistory,
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    m: f64,
    t_window: f64,
) -> Result<DelgadoReport> {
    let grid = h.grid;
    let dx = grid.dx;
    let kw = grid.steps_for(t_window)?;
    let m_charge = f.l2_norm_sqr() + g.l2_norm_sqr();
    let (uu, vv) = densities(h);
    let phi_plus = characteristic_integral(&vv, Direction::Plus, dx).map(|x: f64| 4.0 * x);
    let phi_minus = characteristic_integral(&uu, Direction::Minus, dx).map(|x: f64| 4.0 * x);
    let allowance = 4.0 * dx * sup_density(h, h.u.n_layers);

    let phi_sup = phi_plus.sup_norm().max(phi_minus.sup_norm());
    let phi_check = CheckReport::inequality(
        "PhiBound",
        phi_sup,
        2.0 * m_charge,
        1e-9,
        IDENTITY_FLOOR + 4.0 * allowance,
        format!("M = {m_charge:e}"),
    );

    let df = d_norm_values(&f.values, kw, dx);
    let dg = d_norm_values(&g.values, kw, dx);
    let layer_norms = |slab: &Slab<Complex64>| -> Vec<f64> {
        (0..slab.n_layers).map(|k| d_norm_values(slab.layer(k), kw, dx)).collect()
    };
    let du = layer_norms(&h.u);
    let dv = layer_norms(&h.v);
    let growth = 2.0 * m * (4.0 * m_charge).exp();
    let base = df * df + dg * dg;
    let (bound_lhs, bound_rhs): (Vec<f64>, Vec<f64>) = (0..h.u.n_layers)
        .map(|k| (du[k] * du[k] + dv[k] * dv[k], base * (growth * grid.t(k)).exp()))
        .unzip();
    let bound_checks: Vec<CheckReport> = bound_lhs
        .iter()
        .zip(&bound_rhs)
        .enumerate()
        .map(|(k, (l, r))| {
            CheckReport::inequality("Dbound", *l, *r, 1e-9, IDENTITY_FLOOR + allowance, format!("t = {}", grid.t(k)))
        })
        .collect();
    let pass = phi_check.pass && bound_checks.iter().all(|c| c.pass);
    Ok(DelgadoReport {
        m_charge,
        phi_plus,
        phi_minus,
        bound_lhs,
        bound_rhs,
        phi_check,
        bound_checks,
        pass,
    })
}

/// Sup-norm bounds on the potentials and the electric field at one layer:
/// `‖Aμ‖ ≤ ‖a0‖ + ‖a1‖ + t‖E0‖ + |λ| t M / 2` and `‖E‖ ≤ ‖E0‖ + |λ| M / 2`.
/// Allowance is `1e-9` relative plus `2 |λ| h (1 + t) sup ρ`.
pub fn field_bound_report(
    em: &EmHistory,
    f: &GridFunction<Complex64>,
    g: &GridFunction<Complex64>,
    layer: usize,
) -> Vec<CheckReport> {
    let t = em.grid.t(layer);
    let m_charge = f.l2_norm_sqr() + g.l2_norm_sqr();
    let lam = em.coupling.abs();
    let sup = |s: &[f64]| s.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let rho_sup = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .fold(0.0, f64::max);
    let allowance = IDENTITY_FLOOR + 2.0 * lam * em.grid.dx * (1.0 + t) * rho_sup;
    let a_rhs = em.data.a0.sup_norm() + em.data.a1.sup_norm() + t * em.data.e0.sup_norm() + 0.5 * lam * t * m_charge;
    let e_rhs = em.data.e0.sup_norm() + 0.5 * lam * m_charge;
    let ctx = format!("t = {t}, M = {m_charge:e}");
    vec![
        CheckReport::inequality("Abound(A0)", sup(em.a0.layer(layer)), a_rhs, 1e-9, allowance, ctx.clone()),
        CheckReport::inequality("Abound(A1)", sup(em.a1.layer(layer)), a_rhs, 1e-9, allowance, ctx.clone()),
        CheckReport::inequality("Ebound", sup(em.e.layer(layer)), e_rhs, 1e-9, allowance, ctx),
    ]
}
