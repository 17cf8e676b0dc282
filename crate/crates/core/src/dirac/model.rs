use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Self-interaction of the spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Interaction {
    /// Maxwell coupling `lambda1`, Thirring `lambda2`, Gross–Neveu `lambda3`.
    Mdtgn { lambda1: f64, lambda2: f64, lambda3: f64 },
    /// `(∂t + ∂x)u = -imv + c1|v|² + c2 uv`, `(∂t - ∂x)v = -imu + c3|u|² + c4 uv`.
    Quadratic { c: [Complex64; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mass: f64,
    pub interaction: Interaction,
}

impl ModelParams {
    pub fn mdtgn(mass: f64, lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        Self {
            mass,
            interaction: Interaction::Mdtgn { lambda1, lambda2, lambda3 },
        }
        .validated()
    }

    pub fn quadratic(mass: f64, c: [Complex64; 4]) -> Result<Self> {
        Self {
            mass,
            interaction: Interaction::Quadratic { c },
        }
        .validated()
    }

    pub fn free(mass: f64) -> Result<Self> {
        Self::mdtgn(mass, 0.0, 0.0, 0.0)
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.mass >= 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidArgument(format!("mass must be >= 0, got {}", self.mass)));
        }
        let finite = match self.interaction {
            Interaction::Mdtgn { lambda1, lambda2, lambda3 } => [lambda1, lambda2, lambda3].iter().all(|l| l.is_finite()),
            Interaction::Quadratic { c } => c.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        };
        if !finite {
            return Err(Error::InvalidArgument("non-finite coupling".into()));
        }
        Ok(self)
    }

    /// Charge coupling of the Maxwell field (zero for the quadratic model).
    pub fn charge_coupling(&self) -> f64 {
        match self.interaction {
            Interaction::Mdtgn { lambda1, .. } => lambda1,
            Interaction::Quadratic { .. } => 0.0,
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self.interaction, Interaction::Quadratic { .. })
    }
}

/// Forcing `(G, F)` at one node, with `(∂t + ∂x)u = iG` and `(∂t - ∂x)v = iF`.
/// `a_plus = A0 + A1` and `a_minus = A0 - A1`.
#[inline]
pub fn rhs_point(u: Complex64, v: Complex64, a_plus: f64, a_minus: f64, p: &ModelParams) -> (Complex64, Complex64) {
    let m = p.mass;
    match p.interaction {
        Interaction::Mdtgn { lambda1, lambda2, lambda3 } => {
            let re_uv = (u * v.conj()).re;
            let g = -m * v + lambda1 * a_plus * u + 2.0 * lambda2 * v.norm_sqr() * u + 2.0 * lambda3 * re_uv * v;
            let f = -m * u + lambda1 * a_minus * v + 2.0 * lambda2 * u.norm_sqr() * v + 2.0 * lambda3 * re_uv * u;
            (g, f)
        }
        Interaction::Quadratic { c } => {
            let uv = u * v;
            let g = -m * v - I * (c[0] * v.norm_sqr() + c[1] * uv);
            let f = -m * u - I * (c[2] * u.norm_sqr() + c[3] * uv);
            (g, f)
        }
    }
}

/// Forcing on one layer.
pub fn rhs_eval(
    u: &[Complex64],
    v: &[Complex64],
    a_plus: &[f64],
    a_minus: &[f64],
    params: &ModelParams,
) -> (Vec<Complex64>, Vec<Complex64>) {
    (0..u.len())
        .map(|i| rhs_point(u[i], v[i], a_plus[i], a_minus[i], params))
        .unzip()
}

/// One RK4 step of the pointwise system `u' = iG`, `v' = iF` with frozen potentials.
pub fn local_ode_step(
    u0: Complex64,
    v0: Complex64,
    a_plus: f64,
    a_minus: f64,
    params: &ModelParams,
    dt: f64,
) -> (Complex64, Complex64) {
    let field = |u: Complex64, v: Complex64| {
        let (g, f) = rhs_point(u, v, a_plus, a_minus, params);
        (I * g, I * f)
    };
    let (k1u, k1v) = field(u0, v0);
    let (k2u, k2v) = field(u0 + 0.5 * dt * k1u, v0 + 0.5 * dt * k1v);
    let (k3u, k3v) = field(u0 + 0.5 * dt * k2u, v0 + 0.5 * dt * k2v);
    let (k4u, k4v) = field(u0 + dt * k3u, v0 + dt * k3v);
    (
        u0 + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_examples() {
        let p = ModelParams::mdtgn(1.0, 0.7, 0.3, -0.2).unwrap();
        assert_eq!(rhs_point(c(0.0, 0.0), c(0.0, 0.0), 0.5, -0.5, &p), (c(0.0, 0.0), c(0.0, 0.0)));

        // Mass only: the v equation's right side is iF = -i.
        let p = ModelParams::free(1.0).unwrap();
        let (_, f) = rhs_point(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, &p);
        assert_eq!(I * f, c(0.0, -1.0));

        // Thirring term alone contributes 2i; with the Gross–Neveu term it is 4i.
        let p = ModelParams::mdtgn(0.0, 0.0, 1.0, 0.0).unwrap();
        let (g, _) = rhs_point(c(1.0, 0.0), c(1.0, 0.0), 0.0, 0.0, &p);
        assert_eq!(I * g, c(0.0, 2.0));
        let p = ModelParams::mdtgn(0.0, 0.0, 1.0, 1.0).unwrap();
        let (g, _) = rhs_point(c(1.0, 0.0), c(1.0, 0.0), 0.0, 0.0, &p);
        assert_eq!(I * g, c(0.0, 4.0));

        assert!(ModelParams::free(-1.0).is_err());
    }

    #[test]
    fn quadratic_rhs_matches_equation() {
        let cs = [c(0.3, -0.1), c(-0.2, 0.5), c(1.0, 0.0), c(0.0, -0.7)];
        let p = ModelParams::quadratic(0.4, cs).unwrap();
        let (u, v) = (c(0.2, 0.9), c(-0.6, 0.1));
        let (g, f) = rhs_point(u, v, 0.0, 0.0, &p);
        let du = -I * 0.4 * v + cs[0] * v.norm_sqr() + cs[1] * u * v;
        let dv = -I * 0.4 * u + cs[2] * u.norm_sqr() + cs[3] * u * v;
        assert_abs_diff_eq!((I * g - du).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((I * f - dv).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ode_step_examples() {
        let p = ModelParams::free(0.0).unwrap();
        let (u, v) = (c(0.3, -0.2), c(0.1, 0.4));
        assert_eq!(local_ode_step(u, v, 0.2, -0.1, &p, 0.01), (u, v));

        let m = 1.3;
        let dt = 0.01;
        let p = ModelParams::free(m).unwrap();
        let (u1, v1) = local_ode_step(c(1.0, 0.0), c(0.0, 0.0), 0.0, 0.0, &p, dt);
        assert_abs_diff_eq!((u1 - c((m * dt).cos(), 0.0)).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!((v1 - c(0.0, -(m * dt).sin())).norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn ode_step_conserves_charge() {
        let p = ModelParams::mdtgn(0.8, 0.9, 1.1, -0.7).unwrap();
        let (u, v) = (c(0.5, -0.3), c(-0.2, 0.6));
        let q0 = u.norm_sqr() + v.norm_sqr();
        let drift = |dt: f64| {
            let (u1, v1) = local_ode_step(u, v, 0.4, -0.25, &p, dt);
            ((u1.norm_sqr() + v1.norm_sqr() - q0) / q0).abs()
        };
        assert!(drift(1e-2) < 1e-9);
        // Fifth order: halving dt cuts the drift by roughly 32.
        assert!(drift(5e-3) < drift(1e-2) / 16.0);
    }
}
